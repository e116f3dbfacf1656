//! The staged certificate: at least six sextactic points on a convex curve.

use sixvertex::curve::ClosedCurve;
use sixvertex::sextactic::{analyze_curve, six_vertices_certificate};
use sixvertex::settings::Settings;

fn main() -> sixvertex::error::Result<()> {
    let settings = Settings::default();
    let c = ClosedCurve::from_fn(512, |x| {
        let t = std::f64::consts::TAU * x;
        (t.cos() + 0.03 * (3.0 * t).cos(), t.sin() - 0.03 * (3.0 * t).sin())
    })?;
    let cert = six_vertices_certificate(&c, &settings)?;
    for stage in &cert.analysis.chain {
        println!("{:<13} {}  {}", stage.stage, if stage.ok { "ok  " } else { "FAIL" }, stage.detail);
    }
    println!("sextactic points: {} (bound {}), pass = {}", cert.sextactic_count, cert.theorem2_bound, cert.pass);

    let ellipse = analyze_curve(&ClosedCurve::ellipse(1.5, 1.0, 256)?, &settings)?;
    println!("ellipse: degenerate conic = {}, product orthogonality residuals {:?}", ellipse.sextactic.degenerate_conic, ellipse.lemma3.residuals);

    let limacon = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.3, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, 0.3)], 256)?;
    match analyze_curve(&limacon, &settings) {
        Ok(a) => println!("limacon: pass = {}", a.pass),
        Err(e) => println!("limacon rejected at stage {:?}: {}", e.stage(), e.root()),
    }
    Ok(())
}
