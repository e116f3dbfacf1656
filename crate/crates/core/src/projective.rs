//! Third-order equations `phi''' = kappa phi' + v phi` attached to locally
//! convex curves, the cubic differential `h = v - kappa'/2`, projective
//! curvature, and reconstruction of curves from equations.
//!
//! All functions are sampled on the unit circle `t` in `[0, 1)`. The
//! equation itself lives in the physical parameter `s = P t`, where `P` is
//! the `period` (the affine length for equations built from curves).

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::affine::{AffineCurvature, AffineParametrization};
use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::periodic::{locate_zero_clusters, PeriodicFunction};
use crate::settings::Settings;
use crate::sturm::{check_disconjugate, DisconjugacyReport, FundamentalSystem, LinearPeriodicODE, Periodicity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    Affine,
    Original,
    Projective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveODE {
    kappa: PeriodicFunction,
    v: PeriodicFunction,
    h: PeriodicFunction,
    period: f64,
    parameter_kind: ParameterKind,
}

impl ProjectiveODE {
    pub fn new(kappa: PeriodicFunction, v: PeriodicFunction, period: f64, parameter_kind: ParameterKind) -> Result<Self> {
        if kappa.grid_size() != v.grid_size() {
            return Err(Error::InvalidInput("kappa and v live on different grids".into()));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        let h = &v - &(&kappa.differentiate(1) * (0.5 / period));
        Ok(Self { kappa, v, h, period, parameter_kind })
    }

    pub fn kappa(&self) -> &PeriodicFunction {
        &self.kappa
    }

    pub fn v(&self) -> &PeriodicFunction {
        &self.v
    }

    pub fn h(&self) -> &PeriodicFunction {
        &self.h
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn parameter_kind(&self) -> ParameterKind {
        self.parameter_kind
    }

    pub fn grid_size(&self) -> usize {
        self.kappa.grid_size()
    }

    /// `max |h - (v - kappa'/2)|`, recomputed independently of construction order.
    pub fn h_identity_defect(&self) -> f64 {
        let dk = &self.kappa.differentiate(1) * (1.0 / self.period);
        let rebuilt = self.v.zip_map(&dk, |v, d| v - 0.5 * d);
        (&rebuilt - &self.h).max_abs()
    }

    /// `h` is negligible against the scale of `kappa`.
    pub fn is_conic(&self, settings: &Settings) -> bool {
        self.h.max_abs() < 0.5 * settings.degenerate_tol * self.kappa.max_abs().max(1.0) / self.period
    }

    /// The same equation on the unit period: `phi''' - P^2 kappa phi' - P^3 v phi = 0`.
    pub fn to_linear_ode(&self) -> LinearPeriodicODE {
        let n = self.grid_size();
        let p = self.period;
        LinearPeriodicODE::new(vec![
            &self.v * (-p.powi(3)),
            &self.kappa * (-p * p),
            PeriodicFunction::constant(0.0, n).expect("grid validated"),
        ])
        .expect("coefficients share a grid")
    }

    /// `A0 g = g''' - (kappa g' + (kappa g)')/2` in the physical parameter.
    pub fn apply_a0(&self, g: &PeriodicFunction) -> PeriodicFunction {
        let p = self.period;
        let third = &g.differentiate(3) * p.powi(-3);
        let a = &self.kappa * &g.differentiate(1);
        let b = (&self.kappa * g).differentiate(1);
        &third - &(&(&a + &b) * (0.5 / p))
    }
}

/// Three solutions giving homogeneous coordinates `(phi1 : phi2 : phi3)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousLift {
    phi: [PeriodicFunction; 3],
    period: f64,
}

impl HomogeneousLift {
    pub fn new(phi: [PeriodicFunction; 3], period: f64) -> Result<Self> {
        let n = phi[0].grid_size();
        if phi.iter().any(|p| p.grid_size() != n) {
            return Err(Error::InvalidInput("lift components live on different grids".into()));
        }
        Ok(Self { phi, period })
    }

    pub fn phi(&self) -> &[PeriodicFunction; 3] {
        &self.phi
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn grid_size(&self) -> usize {
        self.phi[0].grid_size()
    }

    /// Derivatives with respect to the physical parameter.
    pub fn derivative(&self, i: usize, order: usize) -> PeriodicFunction {
        &self.phi[i].differentiate(order) * self.period.powi(-(order as i32))
    }

    /// Homogeneous coordinates at grid point `j`.
    pub fn at(&self, j: usize) -> [f64; 3] {
        [0, 1, 2].map(|i| self.phi[i].values()[j])
    }

    pub fn wronskian(&self) -> PeriodicFunction {
        let d: Vec<Vec<PeriodicFunction>> = (0..3).map(|r| (0..3).map(|i| self.derivative(i, r)).collect()).collect();
        let n = self.grid_size();
        let w = (0..n)
            .map(|j| Matrix3::from_fn(|r, i| d[r][i].values()[j]).determinant())
            .collect();
        PeriodicFunction::from_samples(w).expect("grid validated")
    }

    /// `max |W - mean W| / |mean W|`.
    pub fn wronskian_defect(&self) -> f64 {
        let w = self.wronskian();
        let mean = w.integrate();
        w.values().iter().fold(0.0f64, |m, x| m.max((x - mean).abs())) / mean.abs()
    }

    /// `max_i |phi_i''' - kappa phi_i' - v phi_i| / max_i |phi_i'''|`.
    pub fn equation_residual(&self, ode: &ProjectiveODE) -> f64 {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for i in 0..3 {
            let d3 = self.derivative(i, 3);
            let r = &(&d3 - &(ode.kappa() * &self.derivative(i, 1))) - &(ode.v() * &self.phi[i]);
            num = num.max(r.max_abs());
            den = den.max(d3.max_abs());
        }
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }

    /// The plane curve `(phi2 / phi1, phi3 / phi1)`.
    pub fn chart_curve(&self) -> Result<ClosedCurve> {
        let n = self.grid_size();
        let w = self.phi[0].values();
        let peak = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(j) = (0..n).find(|&j| w[j] * w[0].signum() <= 1e-12 * peak) {
            return Err(Error::LeavesAffineChart { at: j as f64 / n as f64, w: w[j] });
        }
        ClosedCurve::new(
            self.phi[1].zip_map(&self.phi[0], |a, b| a / b),
            self.phi[2].zip_map(&self.phi[0], |a, b| a / b),
        )
    }
}

/// The equation of a curve in its affine parameter: `kappa = k`, `v = 0`,
/// lift `(1, c1, c2)`.
pub fn curve_to_ode(
    p: &AffineParametrization,
    k: &AffineCurvature,
    settings: &Settings,
) -> Result<(ProjectiveODE, HomogeneousLift)> {
    let c = p.curve_in_sigma();
    let n = c.grid_size();
    let ode = ProjectiveODE::new(
        k.k.clone(),
        PeriodicFunction::constant(0.0, n)?,
        p.total_length(),
        ParameterKind::Affine,
    )?;
    let lift = HomogeneousLift::new(
        [PeriodicFunction::constant(1.0, n)?, c.x().clone(), c.y().clone()],
        p.total_length(),
    )?;
    let residual = lift.equation_residual(&ode);
    if residual > settings.lift_residual_tol {
        return Err(Error::ResidualTooLarge { residual, tolerance: settings.lift_residual_tol });
    }
    Ok((ode, lift))
}

/// `h` in the source curve parameter: `h(sigma(x)) sigma'(x)^3`, sampled on
/// the stored source grid.
pub fn pull_back_h(ode: &ProjectiveODE, p: &AffineParametrization) -> Result<PeriodicFunction> {
    let n = p.source().grid_size();
    PeriodicFunction::from_fn(n, |x| ode.h().eval(p.u_of_x(x)) * p.sigma_prime(x).powi(3))
}

/// Sign-preserving cube root of `h`.
pub fn projective_length_element(ode: &ProjectiveODE) -> PeriodicFunction {
    ode.h().map(f64::cbrt)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveCurvature {
    /// Projective curvature at each grid point, `None` where masked.
    pub values: Vec<Option<f64>>,
    /// Zeros of `h`, where the projective parameter degenerates.
    pub masked_at: Vec<f64>,
    /// `int h^(1/3) ds` over one period.
    pub total_projective_length: f64,
}

/// One quarter of the equation's `kappa` rewritten in the projective
/// parameter `y` with `dy = h^(1/3) ds`:
/// `(kappa + 2 S(y)) / y'^2 / 4`, `S` the Schwarzian derivative.
pub fn projective_curvature(ode: &ProjectiveODE, settings: &Settings) -> Result<ProjectiveCurvature> {
    if ode.is_conic(settings) {
        return Err(Error::EverywhereDegenerate);
    }
    let p = ode.period();
    let n = ode.grid_size();
    let h = ode.h();
    let h1 = &h.differentiate(1) * (1.0 / p);
    let h2 = &h.differentiate(2) * (1.0 / (p * p));
    let element = projective_length_element(ode);
    let masked_at: Vec<f64> = if h.min_value() > 0.0 || h.max_value() < 0.0 {
        Vec::new()
    } else {
        locate_zero_clusters(h, settings)?.into_iter().map(|z| z.at).collect()
    };
    let floor = settings.zero_tol * h.max_abs();
    let values = (0..n)
        .map(|j| {
            let t = j as f64 / n as f64;
            let near = masked_at.iter().any(|&z| {
                let d = (t - z).rem_euclid(1.0);
                d.min(1.0 - d) <= settings.cluster_tol
            });
            let hv = h.values()[j];
            if near || hv.abs() <= floor {
                return None;
            }
            let g = hv.cbrt();
            let g2 = g * g;
            let d1 = h1.values()[j] / (3.0 * g2);
            let d2 = h2.values()[j] / (3.0 * g2) - 2.0 / 9.0 * h1.values()[j].powi(2) / (hv * g2);
            let schwarzian = d2 / g - 1.5 * (d1 / g).powi(2);
            Some((ode.kappa().values()[j] + 2.0 * schwarzian) / g2 / 4.0)
        })
        .collect();
    Ok(ProjectiveCurvature { values, masked_at, total_projective_length: p * element.integrate() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityDiagnostic {
    pub periodicity: Periodicity,
    /// `|M - I|` in scaled coordinates.
    pub defect_identity: f64,
    /// `|M + I|` in scaled coordinates.
    pub defect_minus_identity: f64,
    pub closes: bool,
}

/// Solutions of an equation over one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeCurve {
    /// `phi_i(t_j)` at `t_j = j / N`, `j = 0..=N` (the endpoint included).
    pub samples: [Vec<f64>; 3],
    pub diagnostic: PeriodicityDiagnostic,
    /// Present when the monodromy is the identity.
    pub lift: Option<HomogeneousLift>,
}

impl OdeCurve {
    pub fn point(&self, j: usize) -> [f64; 3] {
        [0, 1, 2].map(|i| self.samples[i][j])
    }

    /// `max |phi2^2 - phi1 phi3| / max_i |phi_i|^2`.
    pub fn conic_relation_residual(&self) -> f64 {
        let scale = self.samples.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).powi(2);
        (0..self.samples[0].len())
            .map(|j| {
                let [a, b, c] = self.point(j);
                (b * b - a * c).abs()
            })
            .fold(0.0, f64::max)
            / scale
    }
}

/// Integrates the equation from three initial triples; row `i` of `frame`
/// is `(phi_i, phi_i', phi_i'')(0)` in the physical parameter.
pub fn ode_to_curve(ode: &ProjectiveODE, frame: [[f64; 3]; 3], settings: &Settings) -> Result<OdeCurve> {
    let m = Matrix3::from_fn(|i, j| frame[i][j]);
    if m.determinant().abs() <= 1e-14 * m.norm().powi(3) {
        return Err(Error::InvalidInput("initial frame is singular".into()));
    }
    let fs = FundamentalSystem::new(&ode.to_linear_ode(), settings)?;
    let w = fs.frequency_scale();
    let p = ode.period();
    let n = fs.grid_size();
    let samples: [Vec<f64>; 3] = [0, 1, 2].map(|i| {
        let c = DVector::from_fn(3, |r, _| frame[i][r] * (p / w).powi(r as i32));
        (0..=n).map(|j| (fs.scaled_state(j).row(0) * &c)[0]).collect::<Vec<f64>>()
    });
    let (defect_identity, defect_minus_identity) = fs.monodromy_defects();
    let periodicity = fs.periodicity(settings.monodromy_tol);
    let closes = periodicity == Periodicity::Periodic;
    let lift = if closes {
        let phi = [0, 1, 2].map(|i| PeriodicFunction::from_samples(samples[i][..n].to_vec()));
        let [a, b, c] = phi;
        Some(HomogeneousLift::new([a?, b?, c?], p)?)
    } else {
        None
    };
    Ok(OdeCurve {
        samples,
        diagnostic: PeriodicityDiagnostic { periodicity, defect_identity, defect_minus_identity, closes },
        lift,
    })
}

/// Reconstructs the curve of an equation with `h = 0`, built from `kappa`
/// alone (`v = kappa'/2`). The initial frame is that of the squares
/// `psi1^2, psi1 psi2, psi2^2` of solutions of `psi'' = (kappa/4) psi`, so
/// the result satisfies `phi2^2 = phi1 phi3`.
pub fn conic_from_kappa(kappa: &PeriodicFunction, period: f64, settings: &Settings) -> Result<OdeCurve> {
    let v = &kappa.differentiate(1) * (0.5 / period);
    let ode = ProjectiveODE::new(kappa.clone(), v, period, ParameterKind::Original)?;
    let k0 = kappa.values()[0];
    ode_to_curve(&ode, [[1.0, 0.0, k0 / 2.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]], settings)
}

pub fn check_disconjugacy_of_lift(ode: &ProjectiveODE, settings: &Settings) -> Result<DisconjugacyReport> {
    check_disconjugate(&ode.to_linear_ode(), settings)
}

/// A projective map `Q` with `Q psi_j` parallel to `phi_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registration {
    pub matrix: [[f64; 3]; 3],
    /// `max_j |Q psi_j x phi_j| / (|Q psi_j| |phi_j|)`.
    pub residual: f64,
}

/// Least-squares solution of `Q psi_j x phi_j = 0` with `|Q| = 1`.
pub fn projective_registration(psi: &[[f64; 3]], phi: &[[f64; 3]]) -> Result<Registration> {
    if psi.len() != phi.len() || psi.len() < 4 {
        return Err(Error::InvalidInput("registration needs at least 4 matched points".into()));
    }
    let unit = |v: &[f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        v.map(|x| x / n)
    };
    let m = psi.len();
    let mut a = DMatrix::<f64>::zeros(3 * m, 9);
    for (j, (s, f)) in psi.iter().zip(phi).enumerate() {
        let (s, f) = (unit(s), unit(f));
        // (Q s) x f, with (Q s)_r = sum_c q[3r + c] s_c
        for c in 0..3 {
            // row 0: (Qs)_1 f_2 - (Qs)_2 f_1
            a[(3 * j, 3 + c)] += s[c] * f[2];
            a[(3 * j, 6 + c)] -= s[c] * f[1];
            // row 1: (Qs)_2 f_0 - (Qs)_0 f_2
            a[(3 * j + 1, 6 + c)] += s[c] * f[0];
            a[(3 * j + 1, c)] -= s[c] * f[2];
            // row 2: (Qs)_0 f_1 - (Qs)_1 f_0
            a[(3 * j + 2, c)] += s[c] * f[1];
            a[(3 * j + 2, 3 + c)] -= s[c] * f[0];
        }
    }
    let svd = a.svd(false, true);
    let imin = svd.singular_values.imin();
    let q = svd.v_t.expect("requested V^T").row(imin).transpose();
    let matrix = [0, 1, 2].map(|r| [0, 1, 2].map(|c| q[3 * r + c]));
    let residual = psi
        .iter()
        .zip(phi)
        .map(|(s, f)| {
            let qs = [0, 1, 2].map(|r| (0..3).map(|c| matrix[r][c] * s[c]).sum::<f64>());
            let cross = [qs[1] * f[2] - qs[2] * f[1], qs[2] * f[0] - qs[0] * f[2], qs[0] * f[1] - qs[1] * f[0]];
            let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            norm(cross) / (norm(qs) * norm(*f))
        })
        .fold(0.0, f64::max);
    Ok(Registration { matrix, residual })
}

/// Curve to equation and back: returns the registration of the
/// reconstructed solutions onto the original lift.
pub fn round_trip(c: &ClosedCurve, settings: &Settings) -> Result<Registration> {
    let p = crate::affine::reparametrize_affine(c, settings).map_err(|e| e.at_stage("affine"))?;
    let k = crate::affine::affine_curvature(&p, settings).map_err(|e| e.at_stage("curvature"))?;
    let (ode, lift) = curve_to_ode(&p, &k, settings).map_err(|e| e.at_stage("lift"))?;
    let identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let back = ode_to_curve(&ode, identity, settings).map_err(|e| e.at_stage("reconstruction"))?;
    if !back.diagnostic.closes {
        return Err(Error::NotPeriodic("reconstructed solutions do not close").at_stage("reconstruction"));
    }
    let n = lift.grid_size();
    let psi: Vec<[f64; 3]> = (0..n).map(|j| back.point(j)).collect();
    let phi: Vec<[f64; 3]> = (0..n).map(|j| lift.at(j)).collect();
    projective_registration(&psi, &phi).map_err(|e| e.at_stage("registration"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{affine_curvature, reparametrize_affine};
    use crate::sturm::random_band_limited;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn s() -> Settings {
        Settings::default()
    }

    fn lift_of(c: &ClosedCurve) -> (AffineParametrization, ProjectiveODE, HomogeneousLift) {
        let p = reparametrize_affine(c, &s()).unwrap();
        let k = affine_curvature(&p, &s()).unwrap();
        let (ode, lift) = curve_to_ode(&p, &k, &s()).unwrap();
        (p, ode, lift)
    }

    fn perturbed_ellipse() -> ClosedCurve {
        ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.05, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, -0.05)], 512)
            .unwrap()
    }

    #[test]
    fn ellipse_equation() {
        let (a, b): (f64, f64) = (1.5, 0.8);
        let (_, ode, lift) = lift_of(&ClosedCurve::ellipse(a, b, 256).unwrap());
        let k = -(a * b).powf(-2.0 / 3.0);
        assert!((ode.kappa().max_value() - k).abs() < 1e-8 && (ode.kappa().min_value() - k).abs() < 1e-8);
        assert_eq!(ode.v().max_abs(), 0.0);
        assert!(ode.h().max_abs() < 1e-7);
        assert!(ode.is_conic(&s()));
        assert!(lift.wronskian_defect() < 1e-8);
        assert!(ode.h_identity_defect() < 1e-10);
    }

    #[test]
    fn circle_lift_solves_equation() {
        let (_, ode, lift) = lift_of(&ClosedCurve::circle(1.0, 128).unwrap());
        assert!(lift.equation_residual(&ode) < 1e-10);
        // (1, cos sigma, sin sigma) up to the starting point
        let d3 = lift.derivative(1, 3);
        let d1 = lift.derivative(1, 1);
        assert!((&d3 + &d1).max_abs() < 1e-10);
    }

    #[test]
    fn perturbed_ellipse_h_has_six_simple_zeros() {
        let (p, ode, lift) = lift_of(&perturbed_ellipse());
        let zeros = locate_zero_clusters(ode.h(), &s()).unwrap();
        assert_eq!(zeros.len(), 6);
        assert!(zeros.iter().all(|z| z.multiplicity == 1));
        assert!(lift.wronskian_defect() < 1e-8);

        let pulled = pull_back_h(&ode, &p).unwrap();
        let xz = locate_zero_clusters(&pulled, &s()).unwrap();
        assert_eq!(xz.len(), 6);
        for z in &xz {
            let u = p.u_of_x(z.at).rem_euclid(1.0);
            let d = zeros.iter().map(|w| (w.at - u).rem_euclid(1.0).min((u - w.at).rem_euclid(1.0))).fold(1.0, f64::min);
            assert!(d < 1e-8, "{d}");
        }
        // sign pattern of the pullback matches h through sigma
        for j in (0..512).step_by(7) {
            let x = j as f64 / 512.0;
            let a = pulled.values()[j];
            let b = ode.h().eval(p.u_of_x(x));
            assert!(a * b >= 0.0);
        }
        let curv = projective_curvature(&ode, &s()).unwrap();
        assert_eq!(curv.masked_at.len(), 6);
    }

    #[test]
    fn length_element_examples() {
        let n = 64;
        let eight = ProjectiveODE::new(
            PeriodicFunction::constant(0.0, n).unwrap(),
            PeriodicFunction::constant(8.0, n).unwrap(),
            1.0,
            ParameterKind::Original,
        )
        .unwrap();
        assert!((projective_length_element(&eight).max_value() - 2.0).abs() < 1e-14);
        let small = PeriodicFunction::from_fn(n, |x| -0.001 * (TAU * x).sin()).unwrap();
        let ode = ProjectiveODE::new(PeriodicFunction::constant(0.0, n).unwrap(), small.clone(), 1.0, ParameterKind::Original)
            .unwrap();
        let e = projective_length_element(&ode);
        for j in 0..n {
            assert_eq!(e.values()[j] == 0.0, small.values()[j] == 0.0);
        }
    }

    #[test]
    fn curvature_with_unit_h_is_quarter_kappa() {
        let n = 128;
        let kappa = PeriodicFunction::constant(-3.0, n).unwrap();
        let ode = ProjectiveODE::new(kappa, PeriodicFunction::constant(1.0, n).unwrap(), 2.0, ParameterKind::Original).unwrap();
        let c = projective_curvature(&ode, &s()).unwrap();
        assert!(c.masked_at.is_empty());
        assert!(c.values.iter().all(|v| (v.unwrap() + 0.75).abs() < 1e-12));
        assert!((c.total_projective_length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_matches_schwarzian_oracle() {
        let n = 256;
        let g = |x: f64| 1.0 + 0.5 * (TAU * x).cos();
        let g1 = |x: f64| -0.5 * TAU * (TAU * x).sin();
        let g2 = |x: f64| -0.5 * TAU * TAU * (TAU * x).cos();
        let h = PeriodicFunction::from_fn(n, |x| g(x).powi(3)).unwrap();
        let ode = ProjectiveODE::new(PeriodicFunction::constant(0.0, n).unwrap(), h, 1.0, ParameterKind::Original).unwrap();
        let c = projective_curvature(&ode, &s()).unwrap();
        for (j, v) in c.values.iter().enumerate() {
            let x = j as f64 / n as f64;
            let schwarzian = g2(x) / g(x) - 1.5 * (g1(x) / g(x)).powi(2);
            let expected = 2.0 * schwarzian / g(x).powi(2) / 4.0;
            assert!((v.unwrap() - expected).abs() < 1e-9 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn conic_has_no_projective_curvature() {
        let (_, ode, _) = lift_of(&ClosedCurve::ellipse(1.0, 2.0, 128).unwrap());
        assert!(matches!(projective_curvature(&ode, &s()), Err(Error::EverywhereDegenerate)));
    }

    #[test]
    fn circle_from_equation() {
        let n = 256;
        let ode = ProjectiveODE::new(
            PeriodicFunction::constant(-1.0, n).unwrap(),
            PeriodicFunction::constant(0.0, n).unwrap(),
            TAU,
            ParameterKind::Original,
        )
        .unwrap();
        let out = ode_to_curve(&ode, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], &s()).unwrap();
        assert!(out.diagnostic.closes);
        for j in 0..=n {
            let t = TAU * j as f64 / n as f64;
            let [a, b, c] = out.point(j);
            assert!((a - 1.0).abs() < 1e-9 && (b - t.sin()).abs() < 1e-9 && (c - (1.0 - t.cos())).abs() < 1e-9);
        }
        assert!(out.lift.is_some());
    }

    #[test]
    fn free_equation_does_not_close() {
        let n = 64;
        let zero = PeriodicFunction::constant(0.0, n).unwrap();
        let ode = ProjectiveODE::new(zero.clone(), zero, 1.0, ParameterKind::Original).unwrap();
        let out = ode_to_curve(&ode, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], &s()).unwrap();
        assert!(!out.diagnostic.closes);
        assert_eq!(out.diagnostic.periodicity, Periodicity::Neither);
        assert!(out.lift.is_none());
        let t = 1.0;
        assert!((out.samples[2][n] - t * t / 2.0).abs() < 1e-10);
        let r = check_disconjugacy_of_lift(&ode, &s()).unwrap();
        assert!(!r.certified);
    }

    #[test]
    fn conic_from_kappa_satisfies_square_relation() {
        let n = 256;
        let kappa = PeriodicFunction::from_coefficients(&[(-1.0, 0.0), (0.3, 0.1), (0.0, -0.2)], n).unwrap();
        let out = conic_from_kappa(&kappa, 3.0, &s()).unwrap();
        assert!(out.conic_relation_residual() < 1e-7);
    }

    #[test]
    fn lifts_of_convex_curves_are_disconjugate() {
        for c in [ClosedCurve::ellipse(1.0, 0.6, 256).unwrap(), perturbed_ellipse()] {
            let (_, ode, _) = lift_of(&c);
            let r = check_disconjugacy_of_lift(&ode, &s()).unwrap();
            assert!(r.certified, "{r:?}");
            assert!(r.max_observed_zero_count <= 2);
        }
    }

    #[test]
    fn a0_is_antisymmetric() {
        let n = 256;
        let kappa = random_band_limited(n, 11, &s());
        let ode = ProjectiveODE::new(kappa, PeriodicFunction::constant(0.0, n).unwrap(), 1.7, ParameterKind::Original).unwrap();
        for seed in 0..5 {
            let g1 = random_band_limited(n, 100 + seed, &s());
            let g2 = random_band_limited(n, 200 + seed, &s());
            let sum = (&g1 * &ode.apply_a0(&g2)).integrate() + (&ode.apply_a0(&g1) * &g2).integrate();
            assert!(sum.abs() < 1e-9);
        }
    }

    #[test]
    fn round_trips() {
        let r = round_trip(&ClosedCurve::ellipse(1.3, 0.9, 256).unwrap(), &s()).unwrap();
        assert!(r.residual < 1e-9, "{}", r.residual);
        let r = round_trip(&perturbed_ellipse(), &s()).unwrap();
        assert!(r.residual < 1e-6, "{}", r.residual);
    }
}
