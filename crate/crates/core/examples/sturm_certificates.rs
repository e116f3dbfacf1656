//! Zero-count certificates for disconjugate periodic equations.

use sixvertex::periodic::{count_sign_changes, PeriodicFunction};
use sixvertex::settings::Settings;
use sixvertex::sturm::{certify_corollary, certify_theorem1, certify_theorem2, check_disconjugate, LinearPeriodicODE};
use std::f64::consts::PI;

fn main() -> sixvertex::error::Result<()> {
    let settings = Settings::default();
    let third = LinearPeriodicODE::harmonic(1, 256)?;
    let t1 = certify_theorem1(&third, 100, 7, &settings)?;
    println!("order 3, orthogonal to solutions: min sign changes {} (bound {}), pass {}", t1.min_count, t1.bound, t1.pass);

    let witness = PeriodicFunction::from_fn(256, |x| (4.0 * PI * x).cos())?;
    println!("witness cos 4 pi x: {} sign changes", count_sign_changes(&witness, &settings)?.count);

    let fifth = LinearPeriodicODE::harmonic(2, 256)?;
    let t5 = certify_theorem1(&fifth, 50, 7, &settings)?;
    println!("order 5: min sign changes {} (bound {})", t5.min_count, t5.bound);

    let t2 = certify_theorem2(&third, 100, 7, &settings)?;
    println!("order 3, orthogonal to products: min {} (bound {})", t2.min_count, t2.bound);
    let second = LinearPeriodicODE::constant_coefficients(&[PI * PI, 0.0], 256)?;
    let t2b = certify_theorem2(&second, 100, 7, &settings)?;
    println!("order 2 anti-periodic, products: min {} (bound {})", t2b.min_count, t2b.bound);

    let g = PeriodicFunction::from_fn(256, |x| (2.0 * PI * x).sin().exp())?;
    let cor = certify_corollary(&third, &g, &settings)?;
    println!("image of the operator: {} sign changes (bound {}), adjoint residual {:.1e}", cor.count, cor.bound, cor.adjoint_orthogonality_residual);

    let resonant = LinearPeriodicODE::constant_coefficients(&[0.0, 16.0 * PI * PI, 0.0], 256)?;
    let report = check_disconjugate(&resonant, &settings)?;
    println!(
        "phi''' + (4 pi)^2 phi': certified = {}, monodromy defect {:.1e}, most zeros seen {} (limit {})",
        report.certified, report.monodromy_defect, report.max_observed_zero_count, report.zero_count_limit
    );
    Ok(())
}
