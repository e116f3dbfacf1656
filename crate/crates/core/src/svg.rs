//! Static SVG figure: the curve, its sextactic points, and the osculating
//! conic at each of them.

use std::fmt::Write;

use crate::curve::ClosedCurve;
use crate::sextactic::SextacticReport;

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 40.0;
const CURVE_SAMPLES: usize = 720;
const CONIC_SAMPLES: usize = 360;
const COLORS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    xmin: f64,
    ymax: f64,
    scale: f64,
    height: f64,
    /// Plane-coordinate box in which conic branches are drawn.
    bounds: [f64; 4],
}

impl Frame {
    fn new(points: &[[f64; 2]]) -> Self {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in points {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
            ymin = ymin.min(p[1]);
            ymax = ymax.max(p[1]);
        }
        let pad = 0.35 * (xmax - xmin).max(ymax - ymin);
        let (xmin, xmax, ymin, ymax) = (xmin - pad, xmax + pad, ymin - pad, ymax + pad);
        let scale = (WIDTH - 2.0 * MARGIN) / (xmax - xmin);
        let height = (ymax - ymin) * scale + 2.0 * MARGIN;
        Self { xmin, ymax, scale, height, bounds: [xmin, xmax, ymin, ymax] }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (MARGIN + (p[0] - self.xmin) * self.scale, MARGIN + (self.ymax - p[1]) * self.scale)
    }

    fn inside(&self, p: [f64; 2]) -> bool {
        let [x0, x1, y0, y1] = self.bounds;
        p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1
    }
}

/// Path data, broken wherever the polyline leaves the frame.
fn path_data(frame: &Frame, points: &[[f64; 2]], closed: bool) -> String {
    let mut d = String::new();
    let mut pen_down = false;
    for &p in points {
        if !frame.inside(p) {
            pen_down = false;
            continue;
        }
        let (x, y) = frame.map(p);
        let _ = write!(d, "{}{x:.3},{y:.3} ", if pen_down { "L" } else { "M" });
        pen_down = true;
    }
    if closed {
        d.push('Z');
    }
    d.trim_end().to_string()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(curve: &ClosedCurve, sextactic: &SextacticReport, title: &str) -> String {
    let outline: Vec<[f64; 2]> =
        (0..CURVE_SAMPLES).map(|j| curve.point(j as f64 / CURVE_SAMPLES as f64)).collect();
    let frame = Frame::new(&outline);
    let reach = frame.bounds[1] - frame.bounds[0];

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH:.0}" height="{:.0}" viewBox="0 0 {WIDTH:.0} {:.3}">"#,
        frame.height.ceil(),
        frame.height
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{:.3}" fill="white"/>"#, frame.height);
    let _ = writeln!(svg, r#"<text x="{MARGIN:.0}" y="24" font-family="sans-serif" font-size="14">{}</text>"#, escape(title));
    for (i, pt) in sextactic.points.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let conic = pt.osculating_conic.polyline(CONIC_SAMPLES, reach);
        let closed = pt.osculating_conic.k0 < 0.0;
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="0.8" stroke-opacity="0.7"/>"#,
            path_data(&frame, &conic, closed)
        );
    }
    let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="black" stroke-width="1.6"/>"#, path_data(&frame, &outline, true));
    for (i, pt) in sextactic.points.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let (x, y) = frame.map(pt.point);
        let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="{color}" stroke="black" stroke-width="0.5"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11">S{}</text>"#,
            x + 6.0,
            y - 6.0,
            i + 1
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{affine_curvature, reparametrize_affine};
    use crate::projective::curve_to_ode;
    use crate::sextactic::find_sextactic_points;
    use crate::settings::Settings;

    #[test]
    fn markers_sit_at_report_coordinates() {
        let s = Settings::default();
        let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.05, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, -0.05)], 256)
            .unwrap();
        let p = reparametrize_affine(&c, &s).unwrap();
        let k = affine_curvature(&p, &s).unwrap();
        let (ode, _) = curve_to_ode(&p, &k, &s).unwrap();
        let r = find_sextactic_points(&p, &k, &ode, &s).unwrap();
        let svg = render_svg(&c, &r, "a < b");
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<circle").count(), 6);
        let outline: Vec<[f64; 2]> = (0..CURVE_SAMPLES).map(|j| c.point(j as f64 / CURVE_SAMPLES as f64)).collect();
        let frame = Frame::new(&outline);
        for pt in &r.points {
            let (x, y) = frame.map(pt.point);
            assert!(svg.contains(&format!(r#"cx="{x:.3}" cy="{y:.3}""#)));
        }
    }
}
