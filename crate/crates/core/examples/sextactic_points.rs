//! Sextactic points, their contact orders, and an SVG figure.
//!
//! `cargo run --example sextactic_points -- out.svg`

use sixvertex::affine::{affine_curvature, reparametrize_affine};
use sixvertex::curve::ClosedCurve;
use sixvertex::projective::curve_to_ode;
use sixvertex::sextactic::{contact_order, find_sextactic_points, osculating_conic};
use sixvertex::settings::Settings;
use sixvertex::svg::render_svg;

fn main() -> sixvertex::error::Result<()> {
    let settings = Settings::default();
    let c = ClosedCurve::from_fourier(
        &[(0.0, 0.0), (1.0, 0.0), (0.06, 0.0), (0.0, 0.0), (0.015, 0.01)],
        &[(0.0, 0.0), (0.0, 1.0), (0.0, -0.06), (0.0, 0.0), (-0.01, 0.015)],
        512,
    )?;
    let p = reparametrize_affine(&c, &settings)?;
    let k = affine_curvature(&p, &settings)?;
    let (ode, _) = curve_to_ode(&p, &k, &settings)?;
    let report = find_sextactic_points(&p, &k, &ode, &settings)?;
    println!("{} sextactic points", report.count);
    for pt in &report.points {
        println!(
            "  x = {:.6}  ({:.4}, {:.4})  contact {:?}  crosses conic: {}",
            pt.x, pt.point[0], pt.point[1], pt.contact.order(), pt.crossing.crossing
        );
    }

    let u = 0.1;
    let osc = osculating_conic(&p, &k, u);
    let e = contact_order(&p, &osc.conic, u, &settings)?;
    println!("generic point u = {u}: contact {} (slope {:.3}), leading coefficient {:.6} vs k'/20 = {:.6}",
        e.order, e.slope.unwrap_or(f64::NAN), e.leading_coefficient * osc.form_scale, k.k_prime.eval(u) / 20.0);

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, render_svg(&c, &report, "sextactic points")).expect("writable path");
        println!("wrote {path}");
    }
    Ok(())
}
