//! The dual curve of tangent lines and its sextactic points.

use sixvertex::affine::{affine_curvature, reparametrize_affine};
use sixvertex::curve::ClosedCurve;
use sixvertex::projective::curve_to_ode;
use sixvertex::sextactic::{dual_chart_curve, dual_curve, dual_incidence, find_sextactic_points};
use sixvertex::settings::Settings;

fn main() -> sixvertex::error::Result<()> {
    let settings = Settings::default();
    let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.05, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, -0.05)], 512)?;
    let p = reparametrize_affine(&c, &settings)?;
    let k = affine_curvature(&p, &settings)?;
    let (ode, lift) = curve_to_ode(&p, &k, &settings)?;
    let primal = find_sextactic_points(&p, &k, &ode, &settings)?;

    let dual = dual_curve(&lift)?;
    let (on_point, on_tangent) = dual_incidence(&lift, &dual);
    println!("incidence residuals: {on_point:.1e} (point), {on_tangent:.1e} (tangent)");

    let chart = dual_chart_curve(&dual, [0.0, 0.0])?;
    let dp = reparametrize_affine(&chart, &settings)?;
    let dk = affine_curvature(&dp, &settings)?;
    let (dode, _) = curve_to_ode(&dp, &dk, &settings)?;
    let dual_points = find_sextactic_points(&dp, &dk, &dode, &settings)?;
    println!("primal sextactic u: {:?}", primal.points.iter().map(|q| format!("{:.6}", q.u)).collect::<Vec<_>>());
    println!("dual sextactic at:  {:?}", dual_points.points.iter().map(|q| format!("{:.6}", q.x)).collect::<Vec<_>>());
    Ok(())
}
