//! Sextactic points move with the curve under projective maps.

use sixvertex::curve::{apply_transform, ClosedCurve, PlaneTransform};
use sixvertex::sextactic::analyze_curve;
use sixvertex::settings::Settings;

fn main() -> sixvertex::error::Result<()> {
    let settings = Settings::default();
    let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.05, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, -0.05)], 512)?;
    let t = PlaneTransform::new([[1.0, 0.2, 0.5], [-0.1, 0.8, 0.0], [0.15, -0.1, 1.0]])?;
    let image = apply_transform(&c, &t)?;

    let before = analyze_curve(&c, &settings)?;
    let after = analyze_curve(&image, &settings)?;
    println!("{:>12} {:>12}", "original", "image");
    for (a, b) in before.sextactic.points.iter().zip(&after.sextactic.points) {
        println!("{:>12.8} {:>12.8}", a.x, b.x);
    }
    let osc = &before.sextactic.points[0].osculating_conic.conic;
    let moved = osc.transformed(&t);
    let q = t.apply_point(before.sextactic.points[0].point).expect("in chart");
    println!("first osculating conic, mapped, still passes through the image point: {:.1e}", moved.eval(q));
    Ok(())
}
