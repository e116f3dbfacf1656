//! Curve to third-order equation and back, and the conic from `h = 0`.

use sixvertex::affine::{affine_curvature, reparametrize_affine};
use sixvertex::curve::ClosedCurve;
use sixvertex::periodic::PeriodicFunction;
use sixvertex::projective::{conic_from_kappa, curve_to_ode, projective_curvature, round_trip};
use sixvertex::settings::Settings;

fn main() -> sixvertex::error::Result<()> {
    let settings = Settings::default();
    let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.05, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, -0.05)], 512)?;
    let p = reparametrize_affine(&c, &settings)?;
    let k = affine_curvature(&p, &settings)?;
    let (ode, lift) = curve_to_ode(&p, &k, &settings)?;
    println!("lift residual {:.2e}, wronskian defect {:.2e}", lift.equation_residual(&ode), lift.wronskian_defect());
    println!("max |h| = {:.6}", ode.h().max_abs());

    let pc = projective_curvature(&ode, &settings)?;
    let shown = pc.values.iter().filter(|v| v.is_some()).count();
    println!("signed projective length {:.6}; curvature defined at {shown} of {} samples", pc.total_projective_length, pc.values.len());

    let reg = round_trip(&c, &settings)?;
    println!("round trip registration residual: {:.2e}", reg.residual);

    let kappa = PeriodicFunction::constant(-1.0, 256)?;
    let conic = conic_from_kappa(&kappa, std::f64::consts::TAU, &settings)?;
    println!("h = 0 with kappa = -1: closes = {}, conic relation residual {:.2e}",
        conic.diagnostic.closes, conic.conic_relation_residual());
    Ok(())
}
