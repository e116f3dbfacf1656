//! Affine arclength and affine curvature, and their invariance under
//! area-preserving affine maps.

use sixvertex::affine::{affine_curvature, reparametrize_affine};
use sixvertex::curve::{apply_transform, ClosedCurve, PlaneTransform};
use sixvertex::settings::Settings;

fn main() -> sixvertex::error::Result<()> {
    let settings = Settings::default();
    let ellipse = ClosedCurve::ellipse(2.0, 0.5, 256)?;
    let p = reparametrize_affine(&ellipse, &settings)?;
    let k = affine_curvature(&p, &settings)?;
    println!("ellipse a=2 b=0.5: affine length {:.12}, k = {:.12} (expected {:.12})",
        p.total_length(), k.k.eval(0.0), -1.0f64.powf(-2.0 / 3.0));
    println!("constant curvature detected: {}", k.is_conic());

    let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.05, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, -0.05)], 512)?;
    let p = reparametrize_affine(&c, &settings)?;
    let k = affine_curvature(&p, &settings)?;
    println!("perturbed ellipse: length {:.10}, k in [{:.6}, {:.6}]", p.total_length(), k.k.min_value(), k.k.max_value());
    for cp in k.critical_points() {
        println!("  critical point u = {:.8}  k = {:.8}  sign k'' = {}", cp.u, cp.k, cp.second_derivative_sign);
    }

    let shear = PlaneTransform::affine([[1.0, 0.7], [0.0, 1.0]], [3.0, -1.0])?;
    let moved = apply_transform(&c, &shear)?;
    let km = affine_curvature(&reparametrize_affine(&moved, &settings)?, &settings)?;
    let drift = (0..512).map(|j| (km.k.values()[j] - k.k.values()[j]).abs()).fold(0.0, f64::max);
    println!("after a shear: max |k change| = {drift:.2e}");
    Ok(())
}
