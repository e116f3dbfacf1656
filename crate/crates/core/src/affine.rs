//! Affine arclength and affine curvature of locally convex closed curves.
//!
//! The resampled curve is stored in the unit-period parameter `u = sigma / L`,
//! so `d/dsigma = (1/L) d/du`.

use serde::{Deserialize, Serialize};

use crate::curve::ClosedCurve;
use crate::error::Result;
use crate::periodic::{locate_zero_clusters, PeriodicFunction};
use crate::settings::Settings;

/// `det(c'(x), c''(x))^(1/3)`.
pub fn affine_length_element(c: &ClosedCurve) -> Result<PeriodicFunction> {
    c.require_locally_convex()?;
    Ok(c.det_first_second().map(f64::cbrt))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineParametrization {
    source: ClosedCurve,
    element: PeriodicFunction,
    /// Integral of the raw length element over the period.
    raw_length: f64,
    /// Periodic part `P` of `sigma_raw(x) = raw_length * x + P(x)`.
    sigma_periodic: PeriodicFunction,
    total_length: f64,
    /// Curve sampled uniformly in `u`.
    curve: ClosedCurve,
}

impl AffineParametrization {
    pub fn source(&self) -> &ClosedCurve {
        &self.source
    }

    /// Total affine length `L`.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// The curve in the parameter `u = sigma / L`.
    pub fn curve_in_sigma(&self) -> &ClosedCurve {
        &self.curve
    }

    pub fn length_element(&self) -> &PeriodicFunction {
        &self.element
    }

    /// `u(x)` for the stored (orientation-normalized) source parameter.
    pub fn u_of_x(&self, x: f64) -> f64 {
        x + self.sigma_periodic.eval(x) / self.raw_length
    }

    pub fn sigma_of_x(&self, x: f64) -> f64 {
        self.total_length * self.u_of_x(x)
    }

    /// `d sigma / dx`.
    pub fn sigma_prime(&self, x: f64) -> f64 {
        self.total_length / self.raw_length * self.element.eval(x)
    }

    /// Inverts `u(x)` by Newton's method to machine precision.
    pub fn x_of_u(&self, u: f64) -> f64 {
        let mut x = u - self.sigma_periodic.eval(u) / self.raw_length;
        for _ in 0..60 {
            let g = x + self.sigma_periodic.eval(x) / self.raw_length - u;
            let dg = self.element.eval(x) / self.raw_length;
            let step = g / dg;
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }

    /// Point at parameter `u`.
    pub fn point(&self, u: f64) -> [f64; 2] {
        self.curve.point(u)
    }

    /// `d^order c / dsigma^order` at parameter `u`.
    pub fn derivative_sigma(&self, u: f64, order: usize) -> [f64; 2] {
        let s = self.total_length.powi(order as i32);
        let d = self.curve.derivative(u, order);
        [d[0] / s, d[1] / s]
    }

    /// `max |det(c_sigma, c_sigmasigma) - 1|` on the grid.
    pub fn unimodularity_defect(&self) -> f64 {
        let l3 = self.total_length.powi(3);
        self.curve.det_first_second().values().iter().fold(0.0f64, |m, d| m.max((d / l3 - 1.0).abs()))
    }
}

/// Resamples a locally convex curve uniformly in affine arclength.
pub fn reparametrize_affine(c: &ClosedCurve, settings: &Settings) -> Result<AffineParametrization> {
    let element = affine_length_element(c)?;
    let n = c.grid_size();
    let raw_length = element.integrate();
    let mean = PeriodicFunction::constant(raw_length, n)?;
    let sigma_periodic = (&element - &mean).antiderivative_periodic();
    let mut p = AffineParametrization {
        source: c.clone(),
        element,
        raw_length,
        sigma_periodic,
        total_length: raw_length,
        curve: c.clone(),
    };
    let pts: Vec<[f64; 2]> = (0..n).map(|j| c.point(p.x_of_u(j as f64 / n as f64))).collect();
    let x = PeriodicFunction::from_samples(pts.iter().map(|q| q[0]).collect())?.denoised(settings.spectral_trim);
    let y = PeriodicFunction::from_samples(pts.iter().map(|q| q[1]).collect())?.denoised(settings.spectral_trim);
    let curve = ClosedCurve::new(x, y)?;
    curve.require_locally_convex()?;
    p.total_length = curve.det_first_second().integrate().cbrt();
    p.curve = curve;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    /// Unit-period affine parameter.
    pub u: f64,
    pub sigma: f64,
    /// Parameter of the curve as given.
    pub x: f64,
    pub k: f64,
    /// Sign of `k''`, or 0 when it is numerically zero.
    pub second_derivative_sign: i8,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriticalSet {
    Points { points: Vec<CriticalPoint> },
    /// `k` is constant: the curve is a conic and every point is critical.
    ConstantConic { k: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineCurvature {
    /// `k` on the uniform `u` grid.
    pub k: PeriodicFunction,
    /// `dk / dsigma` on the uniform `u` grid.
    pub k_prime: PeriodicFunction,
    /// `max |c''' - k c'| / max |c'''|`.
    pub residual: f64,
    pub critical: CriticalSet,
}

impl AffineCurvature {
    pub fn is_conic(&self) -> bool {
        matches!(self.critical, CriticalSet::ConstantConic { .. })
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        match &self.critical {
            CriticalSet::Points { points } => points,
            CriticalSet::ConstantConic { .. } => &[],
        }
    }
}

/// `k = det(c''', c'')` in the affine parameter, with its critical points.
pub fn affine_curvature(p: &AffineParametrization, settings: &Settings) -> Result<AffineCurvature> {
    let l = p.total_length;
    let c = &p.curve;
    let (d1x, d1y) = (c.x().differentiate(1), c.y().differentiate(1));
    let (d2x, d2y) = (c.x().differentiate(2), c.y().differentiate(2));
    let (d3x, d3y) = (c.x().differentiate(3), c.y().differentiate(3));
    let k = &(&(&d3x * &d2y) - &(&d3y * &d2x)) * l.powi(-5);

    let third_scale = d3x.max_abs().max(d3y.max_abs()) / l.powi(3);
    let rx = &(&d3x * l.powi(-3)) - &(&(&k * &d1x) * (1.0 / l));
    let ry = &(&d3y * l.powi(-3)) - &(&(&k * &d1y) * (1.0 / l));
    let residual = rx.max_abs().max(ry.max_abs()) / third_scale;

    let k_prime = &k.differentiate(1) * (1.0 / l);
    let k_scale = k.max_abs().max(1.0);
    let critical = if k_prime.max_abs() < settings.degenerate_tol * k_scale / l {
        CriticalSet::ConstantConic { k: k.integrate() }
    } else {
        let k2 = k_prime.differentiate(1);
        let k2_scale = k2.max_abs();
        let points = locate_zero_clusters(&k_prime, settings)?
            .into_iter()
            .map(|z| {
                let s = k2.eval(z.at);
                let sign = if s.abs() <= settings.deriv_tol * k2_scale {
                    0
                } else if s > 0.0 {
                    1
                } else {
                    -1
                };
                CriticalPoint {
                    u: z.at,
                    sigma: z.at * l,
                    x: p.source.input_parameter(p.x_of_u(z.at)),
                    k: k.eval(z.at),
                    second_derivative_sign: sign,
                    multiplicity: z.multiplicity,
                }
            })
            .collect();
        CriticalSet::Points { points }
    };
    Ok(AffineCurvature { k, k_prime, residual, critical })
}
