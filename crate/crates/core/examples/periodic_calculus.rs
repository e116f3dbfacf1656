//! Spectral calculus on the unit circle and robust sign-change counting.

use sixvertex::periodic::{count_sign_changes, locate_zero_clusters, PeriodicFunction};
use sixvertex::settings::Settings;
use std::f64::consts::TAU;

fn main() -> sixvertex::error::Result<()> {
    let settings = Settings::default();
    let f = PeriodicFunction::from_fn(256, |x| (TAU * x).sin() + 0.3 * (3.0 * TAU * x).cos())?;

    let df = f.differentiate(1);
    let exact = |x: f64| TAU * (TAU * x).cos() - 0.9 * TAU * (3.0 * TAU * x).sin();
    let err = (0..256).map(|j| (df.values()[j] - exact(j as f64 / 256.0)).abs()).fold(0.0, f64::max);
    println!("max derivative error: {err:.2e}");
    println!("mean of f: {:.2e}", f.integrate());
    println!("f(0.123) between grid points: {:.15}", f.eval(0.123));

    let sc = count_sign_changes(&f, &settings)?;
    println!("sign changes: {} at {:?}", sc.count, sc.crossings);

    // (sin 2 pi x)^2 touches zero twice without changing sign
    let g = &PeriodicFunction::from_fn(256, |x| (TAU * x).sin())? * &PeriodicFunction::from_fn(256, |x| (TAU * x).sin())?;
    for z in locate_zero_clusters(&g, &settings)? {
        println!("touching zero at {:.6}, multiplicity {}", z.at, z.multiplicity);
    }
    Ok(())
}
