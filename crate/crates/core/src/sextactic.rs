//! Osculating conics, contact orders, sextactic points, and the staged
//! six-vertices certificate.

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector2};
use serde::{Deserialize, Serialize};

use crate::affine::{affine_curvature, reparametrize_affine, AffineCurvature, AffineParametrization, CriticalPoint};
use crate::curve::{ClosedCurve, ConvexityReport, PlaneTransform};
use crate::error::{Error, Result};
use crate::periodic::{locate_zero_clusters, PeriodicFunction};
use crate::projective::{curve_to_ode, pull_back_h, HomogeneousLift, ProjectiveODE};
use crate::settings::Settings;
use crate::sturm::{certify_function, DisconjugacyReport, FunctionCertificate, FundamentalSystem};

/// A conic `{P : P^T M P = 0}` for `P = (x, y, 1)`, with `|M|_F = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conic {
    matrix: [[f64; 3]; 3],
    rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConicKind {
    Ellipse,
    Parabola,
    Hyperbola,
    Degenerate,
}

fn to_array(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)]))
}

impl Conic {
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        let m = Matrix3::from_fn(|i, j| 0.5 * (m[i][j] + m[j][i]));
        let norm = m.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("conic matrix vanishes".into()));
        }
        let m = m / norm;
        let sv = m.singular_values();
        let rank = sv.iter().filter(|&&s| s > 1e-10 * sv.max()).count();
        Ok(Self { matrix: to_array(&m), rank })
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.matrix
    }

    pub fn to_matrix3(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.matrix[i][j])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let v = [p[0], p[1], 1.0];
        (0..3).map(|i| (0..3).map(|j| v[i] * self.matrix[i][j] * v[j]).sum::<f64>()).sum()
    }

    pub fn kind(&self) -> ConicKind {
        if self.rank < 3 {
            return ConicKind::Degenerate;
        }
        let m = &self.matrix;
        let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if d.abs() <= 1e-12 {
            ConicKind::Parabola
        } else if d > 0.0 {
            ConicKind::Ellipse
        } else {
            ConicKind::Hyperbola
        }
    }

    /// Image under a plane transform: `T^-T M T^-1`.
    pub fn transformed(&self, t: &PlaneTransform) -> Conic {
        let inv = t.inverse().to_matrix3();
        let m = inv.transpose() * self.to_matrix3() * inv;
        Conic::from_matrix(to_array(&m)).expect("congruent to a nonzero matrix")
    }
}

/// The conic with fifth-order contact at `c(sigma0)`: in the frame
/// `c0 + X c' + Y c''` it reads `X^2 - 2Y - k0 Y^2 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsculatingConic {
    pub conic: Conic,
    pub u: f64,
    pub sigma: f64,
    pub point: [f64; 2],
    pub k0: f64,
    /// `c'(sigma0)` and `c''(sigma0)`.
    pub frame: [[f64; 2]; 2],
    /// `X^2 - 2Y - k0 Y^2 = form_scale * P^T M P`.
    pub form_scale: f64,
}

impl OsculatingConic {
    pub fn local_coordinates(&self, p: [f64; 2]) -> [f64; 2] {
        let b = Matrix2::new(self.frame[0][0], self.frame[1][0], self.frame[0][1], self.frame[1][1]);
        let d = Vector2::new(p[0] - self.point[0], p[1] - self.point[1]);
        let xy = b.try_inverse().expect("frame is a basis") * d;
        [xy[0], xy[1]]
    }

    pub fn local_form(&self, p: [f64; 2]) -> f64 {
        let [x, y] = self.local_coordinates(p);
        x * x - 2.0 * y - self.k0 * y * y
    }

    fn from_local(&self, x: f64, y: f64) -> [f64; 2] {
        [
            self.point[0] + x * self.frame[0][0] + y * self.frame[1][0],
            self.point[1] + x * self.frame[0][1] + y * self.frame[1][1],
        ]
    }

    /// Points along the conic for drawing. Unbounded branches stop once
    /// `|X| |c'|` exceeds `reach`.
    pub fn polyline(&self, samples: usize, reach: f64) -> Vec<[f64; 2]> {
        let speed = self.frame[0][0].hypot(self.frame[0][1]);
        let xmax = reach / speed;
        let k0 = self.k0;
        let n = samples.max(2);
        if k0 < -1e-12 {
            let m = -k0;
            (0..=n)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / n as f64;
                    self.from_local(t.cos() / m.sqrt(), (1.0 + t.sin()) / m)
                })
                .collect()
        } else if k0 > 1e-12 {
            let smax = (xmax * k0.sqrt()).asinh();
            (0..=n)
                .map(|i| {
                    let s = -smax + 2.0 * smax * i as f64 / n as f64;
                    self.from_local(s.sinh() / k0.sqrt(), (s.cosh() - 1.0) / k0)
                })
                .collect()
        } else {
            (0..=n)
                .map(|i| {
                    let x = -xmax + 2.0 * xmax * i as f64 / n as f64;
                    self.from_local(x, x * x / 2.0)
                })
                .collect()
        }
    }
}

pub fn osculating_conic(p: &AffineParametrization, k: &AffineCurvature, u0: f64) -> OsculatingConic {
    let c0 = p.point(u0);
    let d1 = p.derivative_sigma(u0, 1);
    let d2 = p.derivative_sigma(u0, 2);
    let k0 = k.k.eval(u0);
    let b = Matrix2::new(d1[0], d2[0], d1[1], d2[1]);
    let binv = b.try_inverse().expect("locally convex frame");
    let shift = -(binv * Vector2::new(c0[0], c0[1]));
    let h = Matrix3::new(
        binv[(0, 0)], binv[(0, 1)], shift[0],
        binv[(1, 0)], binv[(1, 1)], shift[1],
        0.0, 0.0, 1.0,
    );
    let local = Matrix3::new(1.0, 0.0, 0.0, 0.0, -k0, -1.0, 0.0, -1.0, 0.0);
    let global = h.transpose() * local * h;
    let form_scale = global.norm();
    OsculatingConic {
        conic: Conic::from_matrix(to_array(&global)).expect("nonzero"),
        u: u0,
        sigma: u0 * p.total_length(),
        point: c0,
        k0,
        frame: [d1, d2],
        form_scale,
    }
}

/// A closed curve on the unit period with a physical parameter length.
pub trait PlanarCurve {
    fn point(&self, t: f64) -> [f64; 2];
    /// Physical length of the unit period.
    fn parameter_length(&self) -> f64;
}

impl PlanarCurve for AffineParametrization {
    fn point(&self, t: f64) -> [f64; 2] {
        AffineParametrization::point(self, t)
    }
    fn parameter_length(&self) -> f64 {
        self.total_length()
    }
}

impl PlanarCurve for ClosedCurve {
    fn point(&self, t: f64) -> [f64; 2] {
        ClosedCurve::point(self, t)
    }
    fn parameter_length(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactEstimate {
    pub order: u32,
    /// Fitted log-log slope; `None` when fewer than two step sizes rose above the floor.
    pub slope: Option<f64>,
    pub fit_residual: Option<f64>,
    /// Coefficient of `delta^order` in the normalized form.
    pub leading_coefficient: f64,
    pub steps_used: usize,
    /// The conic agrees with the curve to round-off at every probed step.
    pub capped: bool,
}

/// `G(delta) = P(at + delta)^T M P(at + delta)` expanded about the contact point.
struct ContactProbe<'a, C: PlanarCurve> {
    curve: &'a C,
    at: f64,
    p0: [f64; 2],
    a: [[f64; 2]; 2],
    grad: [f64; 2],
}

impl<'a, C: PlanarCurve> ContactProbe<'a, C> {
    fn new(curve: &'a C, conic: &Conic, at: f64) -> Result<Self> {
        let p0 = curve.point(at);
        let residual = conic.eval(p0).abs() / (p0[0] * p0[0] + p0[1] * p0[1] + 1.0);
        if residual > 1e-10 {
            return Err(Error::PointNotOnConic { residual });
        }
        let m = conic.matrix();
        let a = [[m[0][0], m[0][1]], [m[1][0], m[1][1]]];
        let grad = [
            m[0][0] * p0[0] + m[0][1] * p0[1] + m[0][2],
            m[1][0] * p0[0] + m[1][1] * p0[1] + m[1][2],
        ];
        Ok(Self { curve, at, p0, a, grad })
    }

    /// `delta` in physical units.
    fn value(&self, delta: f64) -> f64 {
        let q = self.curve.point(self.at + delta / self.curve.parameter_length());
        let d = [q[0] - self.p0[0], q[1] - self.p0[1]];
        let quad = d[0] * (self.a[0][0] * d[0] + self.a[0][1] * d[1]) + d[1] * (self.a[1][0] * d[0] + self.a[1][1] * d[1]);
        quad + 2.0 * (self.grad[0] * d[0] + self.grad[1] * d[1])
    }
}

/// Order of vanishing of the conic's form along the curve at `at`, by
/// log-log regression over dyadic steps `+-delta0 2^-m`.
pub fn contact_order<C: PlanarCurve>(curve: &C, conic: &Conic, at: f64, settings: &Settings) -> Result<ContactEstimate> {
    let probe = ContactProbe::new(curve, conic, at)?;
    let delta0 = settings.contact_delta_frac * curve.parameter_length();
    let floor = settings.contact_floor;
    // per level: (delta, G(+delta), G(-delta))
    let levels: Vec<(f64, f64, f64)> = (0..=settings.contact_halvings)
        .map(|m| {
            let d = delta0 * 0.5f64.powi(m as i32);
            (d, probe.value(d), probe.value(-d))
        })
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut level_means = Vec::new();
    for &(d, gp, gm) in &levels {
        let mut acc = Vec::new();
        for g in [gp, gm] {
            if g.abs() > floor {
                xs.push(d.ln());
                ys.push(g.abs().ln());
                acc.push(g.abs().ln());
            }
        }
        if !acc.is_empty() {
            level_means.push((d.ln(), acc.iter().sum::<f64>() / acc.len() as f64));
        }
    }
    let cap = settings.contact_cap;
    if level_means.len() < 2 {
        return Ok(ContactEstimate {
            order: cap,
            slope: None,
            fit_residual: None,
            leading_coefficient: 0.0,
            steps_used: level_means.len(),
            capped: true,
        });
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rms = (xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum::<f64>() / n).sqrt();
    if rms > settings.slope_residual_tol {
        let local: Vec<f64> = level_means.windows(2).map(|w| (w[0].1 - w[1].1) / (w[0].0 - w[1].0)).collect();
        let low = local.iter().copied().fold(f64::INFINITY, f64::min);
        let high = local.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::SlopeAmbiguous { low, high });
    }
    let order = (slope.round().max(1.0) as u32).min(cap);
    let capped = order == cap;
    let leading_coefficient = levels
        .iter()
        .rev()
        .find(|(_, gp, gm)| gp.abs() > floor && gm.abs() > floor)
        .map_or(0.0, |&(d, gp, gm)| {
            let sym = if order % 2 == 1 { gp - gm } else { gp + gm };
            sym / (2.0 * d.powi(order as i32))
        });
    Ok(ContactEstimate {
        order,
        slope: Some(slope),
        fit_residual: Some(rms),
        leading_coefficient,
        steps_used: level_means.len(),
        capped,
    })
}

/// Whether the curve passes from one side of the conic to the other at `at`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingProbe {
    pub crossing: bool,
    /// Physical offset at which both signs were read.
    pub delta: f64,
    /// False when the form stayed below the floor at every probed offset.
    pub resolved: bool,
}

/// Signs of the form at `+-delta`, starting from `crossing_delta_frac * L`
/// and doubling while either value is below the floor.
pub fn crossing_probe<C: PlanarCurve>(curve: &C, conic: &Conic, at: f64, settings: &Settings) -> Result<CrossingProbe> {
    let probe = ContactProbe::new(curve, conic, at)?;
    let l = curve.parameter_length();
    let mut delta = settings.crossing_delta_frac * l;
    while delta <= 0.125 * l {
        let (gp, gm) = (probe.value(delta), probe.value(-delta));
        if gp.abs() > settings.contact_floor && gm.abs() > settings.contact_floor {
            return Ok(CrossingProbe { crossing: (gp > 0.0) != (gm > 0.0), delta, resolved: true });
        }
        delta *= 2.0;
    }
    Ok(CrossingProbe { crossing: false, delta, resolved: false })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ContactOutcome {
    Estimated(ContactEstimate),
    Ambiguous { low: f64, high: f64 },
}

impl ContactOutcome {
    pub fn order(&self) -> Option<u32> {
        match self {
            ContactOutcome::Estimated(e) => Some(e.order),
            ContactOutcome::Ambiguous { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SextacticPoint {
    pub u: f64,
    pub sigma: f64,
    /// Parameter of the curve as given.
    pub x: f64,
    pub point: [f64; 2],
    pub multiplicity: usize,
    pub contact: ContactOutcome,
    pub crossing: CrossingProbe,
    pub osculating_conic: OsculatingConic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SextacticReport {
    pub points: Vec<SextacticPoint>,
    pub count: usize,
    pub degenerate_conic: bool,
    /// Largest distance (in `u`) between matched zeros of `k'` and of the pulled-back `h`.
    pub route_agreement: f64,
    pub cluster_tol: f64,
}

impl SextacticReport {
    /// Report for a conic, on which every point is sextactic.
    pub fn conic(settings: &Settings) -> Self {
        Self { points: Vec::new(), count: 0, degenerate_conic: true, route_agreement: 0.0, cluster_tol: settings.cluster_tol }
    }

    pub fn min_contact_order(&self) -> Option<u32> {
        self.points.iter().map(|p| p.contact.order().unwrap_or(0)).min()
    }
}

fn cyclic_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Sextactic points as zero clusters of `h = -k'/2`, cross-checked against
/// zeros of `h` pulled back to the source parameter.
pub fn find_sextactic_points(
    p: &AffineParametrization,
    k: &AffineCurvature,
    ode: &ProjectiveODE,
    settings: &Settings,
) -> Result<SextacticReport> {
    if k.is_conic() || ode.is_conic(settings) {
        return Err(Error::DegenerateConicCurve);
    }
    let critical: &[CriticalPoint] = k.critical_points();
    let pulled = pull_back_h(ode, p)?;
    let second: Vec<f64> =
        locate_zero_clusters(&pulled, settings)?.iter().map(|z| p.u_of_x(z.at).rem_euclid(1.0)).collect();
    if second.len() != critical.len() {
        return Err(Error::ResidualTooLarge { residual: f64::INFINITY, tolerance: settings.cluster_tol });
    }
    let mut agreement: f64 = 0.0;
    for cp in critical {
        let d = second.iter().map(|&u| cyclic_distance(u, cp.u)).fold(f64::INFINITY, f64::min);
        agreement = agreement.max(d);
    }
    if agreement > settings.cluster_tol {
        return Err(Error::ResidualTooLarge { residual: agreement, tolerance: settings.cluster_tol });
    }

    let points = critical
        .iter()
        .enumerate()
        .map(|(i, cp)| {
            let osc = osculating_conic(p, k, cp.u);
            // keep the dyadic probe inside a quarter of the gap to the neighbours
            let gap = critical
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, other)| cyclic_distance(other.u, cp.u))
                .fold(f64::INFINITY, f64::min);
            let local = Settings { contact_delta_frac: settings.contact_delta_frac.min(0.25 * gap), ..settings.clone() };
            let contact = match contact_order(p, &osc.conic, cp.u, &local) {
                Ok(mut e) => {
                    e.leading_coefficient *= osc.form_scale;
                    ContactOutcome::Estimated(e)
                }
                Err(Error::SlopeAmbiguous { low, high }) => ContactOutcome::Ambiguous { low, high },
                Err(e) => return Err(e),
            };
            let crossing = crossing_probe(p, &osc.conic, cp.u, settings)?;
            Ok(SextacticPoint {
                u: cp.u,
                sigma: cp.sigma,
                x: cp.x,
                point: osc.point,
                multiplicity: cp.multiplicity,
                contact,
                crossing,
                osculating_conic: osc,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SextacticReport {
        count: points.len(),
        points,
        degenerate_conic: false,
        route_agreement: agreement,
        cluster_tol: settings.cluster_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Report {
    /// Index pairs `(i, j)`, `i <= j`, of the products `phi_i phi_j`.
    pub pairs: Vec<(usize, usize)>,
    /// `|int phi_i phi_j h dt| / (max |phi_i phi_j| * max(|h|, |kappa|^(3/2)))`.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Orthogonality of `h` to the six products of lift components.
pub fn verify_lemma3(ode: &ProjectiveODE, lift: &HomogeneousLift, settings: &Settings) -> Lemma3Report {
    lemma3_residuals(ode.h(), ode.kappa(), lift, settings)
}

/// [`verify_lemma3`] for an arbitrary `h`.
pub fn lemma3_residuals(
    h: &PeriodicFunction,
    kappa: &PeriodicFunction,
    lift: &HomogeneousLift,
    settings: &Settings,
) -> Lemma3Report {
    let h_scale = h.max_abs().max(kappa.max_abs().powf(1.5));
    let mut pairs = Vec::new();
    let mut residuals = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let prod = &lift.phi()[i] * &lift.phi()[j];
            let scale = prod.max_abs() * h_scale;
            let value = (&prod * h).integrate().abs();
            pairs.push((i, j));
            residuals.push(if scale > 0.0 { value / scale } else { value });
        }
    }
    let pass = residuals.iter().all(|&r| r < settings.orthogonality_tol);
    Lemma3Report { pairs, residuals, tolerance: settings.orthogonality_tol, pass }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub min: f64,
    pub max: f64,
    pub residual: f64,
    pub constant: bool,
    pub critical_points: Vec<CriticalPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSummary {
    pub min: f64,
    pub max: f64,
    pub max_abs: f64,
    pub sign_changes: Option<usize>,
}

/// Every stage of the curve chain, including the conic case.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveAnalysis {
    pub convexity: ConvexityReport,
    pub total_affine_length: f64,
    pub unimodularity_defect: f64,
    pub curvature: CurvatureSummary,
    pub h: HSummary,
    pub lift_residual: f64,
    pub wronskian_defect: f64,
    pub disconjugacy: DisconjugacyReport,
    pub lemma3: Lemma3Report,
    /// Absent for conics.
    pub theorem2: Option<FunctionCertificate>,
    pub sextactic: SextacticReport,
    pub chain: Vec<StageRecord>,
    pub pass: bool,
    #[serde(skip)]
    pub parametrization: Option<AffineParametrization>,
    #[serde(skip)]
    pub affine_curvature: Option<AffineCurvature>,
    #[serde(skip)]
    pub ode: Option<ProjectiveODE>,
    #[serde(skip)]
    pub lift: Option<HomogeneousLift>,
}

impl CurveAnalysis {
    /// First stage whose check did not pass.
    pub fn failed_stage(&self) -> Option<&str> {
        self.chain.iter().find(|s| !s.ok).map(|s| s.stage.as_str())
    }
}

fn record(chain: &mut Vec<StageRecord>, stage: &str, ok: bool, detail: String) {
    chain.push(StageRecord { stage: stage.into(), ok, detail });
}

/// Runs convexity, affine reparametrization, lift, disconjugacy, orthogonality
/// of `h` to the lift products, the product-orthogonality zero bound, and
/// sextactic detection. Numerical
/// failures are returned as errors tagged with their stage; failed checks
/// are recorded in the chain and clear `pass`.
pub fn analyze_curve(c: &ClosedCurve, settings: &Settings) -> Result<CurveAnalysis> {
    let mut chain = Vec::new();
    let convexity = c.convexity().clone();
    c.require_locally_convex().map_err(|e| e.at_stage("convexity"))?;
    if !convexity.globally_convex {
        return Err(Error::InvalidInput(format!("turning number {} is not +-1", convexity.turning_number))
            .at_stage("convexity"));
    }
    record(&mut chain, "convexity", true, format!("min det {:e}, turning number {}", convexity.min_det, convexity.turning_number));

    let p = reparametrize_affine(c, settings).map_err(|e| e.at_stage("affine"))?;
    let unimodularity_defect = p.unimodularity_defect();
    record(&mut chain, "affine", true, format!("length {}, det defect {:e}", p.total_length(), unimodularity_defect));

    let k = affine_curvature(&p, settings).map_err(|e| e.at_stage("curvature"))?;
    record(&mut chain, "curvature", true, format!("residual {:e}, {} critical points", k.residual, k.critical_points().len()));

    let (ode, lift) = curve_to_ode(&p, &k, settings).map_err(|e| e.at_stage("lift"))?;
    let lift_residual = lift.equation_residual(&ode);
    let wronskian_defect = lift.wronskian_defect();
    record(&mut chain, "lift", true, format!("residual {lift_residual:e}, wronskian defect {wronskian_defect:e}"));

    let fs = FundamentalSystem::new(&ode.to_linear_ode(), settings).map_err(|e| e.at_stage("disconjugacy"))?;
    let disconjugacy = fs.check_disconjugate(settings).map_err(|e| e.at_stage("disconjugacy"))?;
    if !disconjugacy.certified {
        return Err(Error::NotDisconjugate(Box::new(disconjugacy)).at_stage("disconjugacy"));
    }
    record(&mut chain, "disconjugacy", true, format!("monodromy defect {:e}", disconjugacy.monodromy_defect));

    let lemma3 = verify_lemma3(&ode, &lift, settings);
    let worst = lemma3.residuals.iter().copied().fold(0.0, f64::max);
    record(&mut chain, "lemma3", lemma3.pass, format!("max residual {worst:e}"));

    let h = ode.h();
    let conic = k.is_conic() || ode.is_conic(settings);
    let h_summary = HSummary {
        min: h.min_value(),
        max: h.max_value(),
        max_abs: h.max_abs(),
        sign_changes: if conic { None } else { crate::periodic::count_sign_changes(h, settings).ok().map(|s| s.count) },
    };
    let curvature = CurvatureSummary {
        min: k.k.min_value(),
        max: k.k.max_value(),
        residual: k.residual,
        constant: k.is_conic(),
        critical_points: k.critical_points().to_vec(),
    };

    let (theorem2, sextactic, pass) = if conic {
        record(&mut chain, "sextactic", true, "curve is a conic: every point is sextactic".into());
        (None, SextacticReport::conic(settings), lemma3.pass)
    } else {
        let t2 = certify_function(&fs, h, true, settings, settings.orthogonality_tol)
            .map_err(|e| e.at_stage("theorem2"))?;
        record(
            &mut chain,
            "theorem2",
            t2.pass,
            format!("{} sign changes of h, bound {}, orthogonality {:e}", t2.count, t2.bound, t2.orthogonality_residual),
        );
        let report = find_sextactic_points(&p, &k, &ode, settings).map_err(|e| e.at_stage("sextactic"))?;
        let min_order = report.min_contact_order().unwrap_or(0);
        let ok = report.count >= 6 && report.count == k.critical_points().len() && min_order >= 6;
        record(
            &mut chain,
            "sextactic",
            ok,
            format!("{} points, minimal contact order {min_order}, route agreement {:e}", report.count, report.route_agreement),
        );
        let pass = lemma3.pass && t2.pass && ok;
        (Some(t2), report, pass)
    };

    Ok(CurveAnalysis {
        convexity,
        total_affine_length: p.total_length(),
        unimodularity_defect,
        curvature,
        h: h_summary,
        lift_residual,
        wronskian_defect,
        disconjugacy,
        lemma3,
        theorem2,
        sextactic,
        chain,
        pass,
        parametrization: Some(p),
        affine_curvature: Some(k),
        ode: Some(ode),
        lift: Some(lift),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SixVerticesCertificate {
    pub sextactic_count: usize,
    pub theorem2_bound: usize,
    pub pass: bool,
    pub analysis: CurveAnalysis,
}

/// The full chain for a convex curve that is not a conic; conics are
/// rejected with [`Error::DegenerateConicCurve`].
pub fn six_vertices_certificate(c: &ClosedCurve, settings: &Settings) -> Result<SixVerticesCertificate> {
    let analysis = analyze_curve(c, settings)?;
    if analysis.sextactic.degenerate_conic {
        return Err(Error::DegenerateConicCurve.at_stage("sextactic"));
    }
    Ok(SixVerticesCertificate {
        sextactic_count: analysis.sextactic.count,
        theorem2_bound: 6,
        pass: analysis.pass,
        analysis,
    })
}

/// Tangent lines `Phi x Phi'`, normalized at each grid point.
pub fn dual_curve(lift: &HomogeneousLift) -> Result<HomogeneousLift> {
    let n = lift.grid_size();
    let d: Vec<PeriodicFunction> = (0..3).map(|i| lift.derivative(i, 1)).collect();
    let lines: Vec<[f64; 3]> = (0..n)
        .map(|j| {
            let a = lift.at(j);
            let b = [d[0].values()[j], d[1].values()[j], d[2].values()[j]];
            [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
        })
        .collect();
    let norms: Vec<f64> = lines.iter().map(|l| (l[0] * l[0] + l[1] * l[1] + l[2] * l[2]).sqrt()).collect();
    let peak = norms.iter().fold(0.0f64, |m, &x| m.max(x));
    if let Some(j) = norms.iter().position(|&x| x <= 1e-12 * peak) {
        return Err(Error::DegenerateTangent { at: j as f64 / n as f64 });
    }
    let comp = |i: usize| PeriodicFunction::from_samples((0..n).map(|j| lines[j][i] / norms[j]).collect());
    HomogeneousLift::new([comp(0)?, comp(1)?, comp(2)?], lift.period())
}

/// `max |<l, Phi>|` and `max |<l, Phi'>|`, each relative to the norms involved.
pub fn dual_incidence(lift: &HomogeneousLift, dual: &HomogeneousLift) -> (f64, f64) {
    let n = lift.grid_size();
    let d: Vec<PeriodicFunction> = (0..3).map(|i| lift.derivative(i, 1)).collect();
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let mut worst = (0.0f64, 0.0f64);
    for j in 0..n {
        let (l, a) = (dual.at(j), lift.at(j));
        let b = [d[0].values()[j], d[1].values()[j], d[2].values()[j]];
        let dot = |x: [f64; 3]| (l[0] * x[0] + l[1] * x[1] + l[2] * x[2]).abs() / (norm(l) * norm(x));
        worst.0 = worst.0.max(dot(a));
        worst.1 = worst.1.max(dot(b));
    }
    worst
}

/// The dual curve in the chart where lines through `(1 : interior)` sit at
/// infinity: `(l1, l2) / <l, (1, q1, q2)>`. Any point strictly inside a
/// convex curve works.
pub fn dual_chart_curve(dual: &HomogeneousLift, interior: [f64; 2]) -> Result<ClosedCurve> {
    let n = dual.grid_size();
    let w: Vec<f64> = (0..n)
        .map(|j| {
            let l = dual.at(j);
            l[0] + l[1] * interior[0] + l[2] * interior[1]
        })
        .collect();
    let peak = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(j) = (0..n).find(|&j| w[j] * w[0].signum() <= 1e-12 * peak) {
        return Err(Error::LeavesAffineChart { at: j as f64 / n as f64, w: w[j] });
    }
    let x = PeriodicFunction::from_samples((0..n).map(|j| dual.at(j)[1] / w[j]).collect())?;
    let y = PeriodicFunction::from_samples((0..n).map(|j| dual.at(j)[2] / w[j]).collect())?;
    ClosedCurve::new(x, y)
}

/// Least-squares symmetric `N` with `l^T N l = 0` along a lift; returns the
/// normalized residual and the singular values of `N`.
pub fn fit_conic(lift: &HomogeneousLift) -> (f64, [f64; 3]) {
    let n = lift.grid_size();
    let idx = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    let a = DMatrix::from_fn(n, 6, |j, c| {
        let l = lift.at(j);
        let norm2 = l[0] * l[0] + l[1] * l[1] + l[2] * l[2];
        let (p, q) = idx[c];
        let w = if p == q { 1.0 } else { 2.0 };
        w * l[p] * l[q] / norm2
    });
    let svd = a.svd(false, true);
    let imin = svd.singular_values.imin();
    let v = svd.v_t.expect("requested V^T").row(imin).transpose();
    let mut m = Matrix3::zeros();
    for (c, &(p, q)) in idx.iter().enumerate() {
        m[(p, q)] = v[c];
        m[(q, p)] = v[c];
    }
    let sv = m.singular_values();
    let residual = svd.singular_values[imin] / (n as f64).sqrt();
    (residual, [sv[0], sv[1], sv[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::curve_to_ode;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn s() -> Settings {
        Settings::default()
    }

    fn perturbed_ellipse() -> ClosedCurve {
        ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.05, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, -0.05)], 512)
            .unwrap()
    }

    fn chain(c: &ClosedCurve) -> (AffineParametrization, AffineCurvature, ProjectiveODE, HomogeneousLift) {
        let p = reparametrize_affine(c, &s()).unwrap();
        let k = affine_curvature(&p, &s()).unwrap();
        let (ode, lift) = curve_to_ode(&p, &k, &s()).unwrap();
        (p, k, ode, lift)
    }

    /// `z = e^{i theta} + sum_m w_m e^{i m theta}` with complex weights.
    fn fourier_curve(terms: &[(i32, f64, f64)], n: usize) -> ClosedCurve {
        ClosedCurve::from_fn(n, |x| {
            let t = TAU * x;
            let mut z = (t.cos(), t.sin());
            for &(m, re, im) in terms {
                let (c, s) = ((m as f64 * t).cos(), (m as f64 * t).sin());
                z.0 += re * c - im * s;
                z.1 += re * s + im * c;
            }
            z
        })
        .unwrap()
    }

    #[test]
    fn circle_osculates_itself() {
        let c = ClosedCurve::circle(1.0, 128).unwrap();
        let (p, k, _, _) = chain(&c);
        let osc = osculating_conic(&p, &k, 0.3);
        let m = osc.conic.matrix();
        // proportional to diag(1, 1, -1)
        let r = m[0][0];
        assert!((m[1][1] - r).abs() < 1e-9 && (m[2][2] + r).abs() < 1e-9);
        assert!(m[0][1].abs() < 1e-9 && m[0][2].abs() < 1e-9 && m[1][2].abs() < 1e-9);
        assert_eq!(osc.conic.kind(), ConicKind::Ellipse);
        let e = contact_order(&p, &osc.conic, 0.3, &s()).unwrap();
        assert_eq!(e.order, s().contact_cap);
    }

    #[test]
    fn zero_curvature_gives_parabola() {
        let c = ClosedCurve::circle(1.0, 64).unwrap();
        let (p, mut k, _, _) = chain(&c);
        k.k = PeriodicFunction::constant(0.0, 64).unwrap();
        let osc = osculating_conic(&p, &k, 0.0);
        assert_eq!(osc.conic.kind(), ConicKind::Parabola);
        let q = osc.from_local(0.7, 0.245);
        assert!(osc.local_form(q).abs() < 1e-12);
    }

    #[test]
    fn generic_contact_is_fifth_order() {
        let (p, k, _, _) = chain(&perturbed_ellipse());
        for u in [0.05, 0.21, 0.4, 0.62, 0.9] {
            let osc = osculating_conic(&p, &k, u);
            let e = contact_order(&p, &osc.conic, u, &s()).unwrap();
            assert_eq!(e.order, 5);
            let expected = k.k_prime.eval(u) / 20.0;
            let got = e.leading_coefficient * osc.form_scale;
            assert!((got - expected).abs() < 0.05 * expected.abs(), "{got} vs {expected}");
            // the form vanishes to fifth order in the local frame as well
            let delta = 1e-2;
            let q = p.point(u + delta / p.total_length());
            assert!((osc.local_form(q) / delta.powi(5) - expected).abs() < 0.1 * expected.abs());
        }
    }

    #[test]
    fn tangent_line_pair_has_second_order_contact() {
        let (p, _, _, _) = chain(&perturbed_ellipse());
        let u = 0.3;
        let c0 = p.point(u);
        let t = p.derivative_sigma(u, 1);
        // tangent line n . (P - c0) = 0 times a line missing c0
        let nrm = [-t[1], t[0]];
        let l1 = [nrm[0], nrm[1], -(nrm[0] * c0[0] + nrm[1] * c0[1])];
        let l2 = [1.0, 0.0, -(c0[0] + 5.0)];
        let m = [0, 1, 2].map(|i| [0, 1, 2].map(|j| 0.5 * (l1[i] * l2[j] + l2[i] * l1[j])));
        let conic = Conic::from_matrix(m).unwrap();
        assert!(conic.rank() < 3);
        assert_eq!(contact_order(&p, &conic, u, &s()).unwrap().order, 2);
    }

    #[test]
    fn off_conic_point_is_rejected() {
        let (p, k, _, _) = chain(&perturbed_ellipse());
        let osc = osculating_conic(&p, &k, 0.1);
        assert!(matches!(contact_order(&p, &osc.conic, 0.3, &s()), Err(Error::PointNotOnConic { .. })));
    }

    #[test]
    fn perturbed_ellipse_has_six_sextactic_points() {
        let (p, k, ode, _) = chain(&perturbed_ellipse());
        let r = find_sextactic_points(&p, &k, &ode, &s()).unwrap();
        assert_eq!(r.count, 6);
        for pt in &r.points {
            assert_eq!(pt.contact.order(), Some(6), "{pt:?}");
            assert!(!pt.crossing.crossing && pt.crossing.resolved);
        }
        assert!(r.route_agreement < 1e-8);
    }

    #[test]
    fn ellipse_is_degenerate() {
        let (p, k, ode, lift) = chain(&ClosedCurve::ellipse(1.0, 0.5, 256).unwrap());
        assert!(matches!(find_sextactic_points(&p, &k, &ode, &s()), Err(Error::DegenerateConicCurve)));
        let l3 = verify_lemma3(&ode, &lift, &s());
        assert!(l3.residuals.iter().all(|&r| r < 1e-10));
        let err = six_vertices_certificate(&ClosedCurve::ellipse(1.0, 0.5, 256).unwrap(), &s()).unwrap_err();
        assert!(matches!(err.root(), Error::DegenerateConicCurve));
    }

    #[test]
    fn lemma3_on_perturbed_ellipse_and_corrupted_h() {
        let (_, _, ode, lift) = chain(&perturbed_ellipse());
        let l3 = verify_lemma3(&ode, &lift, &s());
        assert!(l3.pass, "{:?}", l3.residuals);
        let shifted = ode.h().map(|v| v + 0.01);
        let bad = lemma3_residuals(&shifted, ode.kappa(), &lift, &s());
        // phi1 = 1 has no zeros: the integral is 0.01
        assert!((bad.residuals[0] * ode.kappa().max_abs().powf(1.5).max(ode.h().max_abs()) - 0.01).abs() < 1e-9);
    }

    fn curvature_of(c: &ClosedCurve) -> (AffineParametrization, AffineCurvature) {
        let p = reparametrize_affine(c, &s()).unwrap();
        let k = affine_curvature(&p, &s()).unwrap();
        (p, k)
    }

    /// Bisects `param` on `[lo, hi]` for a sign change of `f`.
    fn bisect_param(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let flo = f(lo).signum();
        assert_ne!(flo, f(hi).signum());
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn fold_of_two_sextactic_points_crosses() {
        // two zeros of k' are born between t = 0.008 and t = 0.010
        let family = |t: f64| fourier_curve(&[(-2, 0.05, 0.0), (-3, t * 0.7f64.cos(), t * 0.7f64.sin())], 512);
        let extremum = |t: f64| {
            let (_, k) = curvature_of(&family(t));
            let (k2, k3) = (k.k_prime.differentiate(1), k.k_prime.differentiate(2));
            let mut u = 0.595;
            for _ in 0..50 {
                u -= k2.eval(u) / k3.eval(u);
            }
            (u, k.k_prime.eval(u))
        };
        let t = bisect_param(0.008, 0.010, |t| extremum(t).1);
        let (u, _) = extremum(t);
        let (p, k) = curvature_of(&family(t));
        let (ode, _) = curve_to_ode(&p, &k, &s()).unwrap();
        let r = find_sextactic_points(&p, &k, &ode, &s()).unwrap();
        let fold = r.points.iter().find(|q| cyclic_distance(q.u, u) < 1e-4).expect("fold point found");
        assert_eq!(fold.multiplicity, 2);
        assert_eq!(fold.contact.order(), Some(7));
        assert!(fold.crossing.crossing);
        for q in r.points.iter().filter(|q| cyclic_distance(q.u, u) >= 1e-4) {
            assert_eq!(q.contact.order(), Some(6));
            assert!(!q.crossing.crossing);
        }
    }

    #[test]
    fn symmetric_triple_zero_has_even_contact() {
        // reflection symmetry keeps k'(0) = 0; k''(0) changes sign in b
        let family = |b: f64| fourier_curve(&[(-2, 0.05, 0.0), (-4, b, 0.0)], 512);
        let b = bisect_param(-0.04, 0.0, |b| {
            let (p, k) = curvature_of(&family(b));
            k.k_prime.differentiate(1).eval(p.u_of_x(0.0))
        });
        let (p, k) = curvature_of(&family(b));
        let cp = k.critical_points().iter().find(|c| cyclic_distance(c.u, 0.0) < 1e-3).unwrap();
        let osc = osculating_conic(&p, &k, cp.u);
        let settings = Settings { contact_delta_frac: 0.03, ..s() };
        let e = contact_order(&p, &osc.conic, cp.u, &settings).unwrap();
        assert_eq!(e.order, 8);
        assert!(!crossing_probe(&p, &osc.conic, cp.u, &settings).unwrap().crossing);
    }

    #[test]
    fn harmonic_three_perturbation_has_eight_points() {
        let c = fourier_curve(&[(-3, 0.03, 0.0)], 512);
        let cert = six_vertices_certificate(&c, &s()).unwrap();
        assert!(cert.pass, "{:?}", cert.analysis.chain);
        assert_eq!(cert.sextactic_count, 8);
    }

    #[test]
    fn certificate_on_perturbed_ellipse() {
        let cert = six_vertices_certificate(&perturbed_ellipse(), &s()).unwrap();
        assert!(cert.pass, "{:?}", cert.analysis.chain);
        assert_eq!(cert.sextactic_count, 6);
        let t2 = cert.analysis.theorem2.unwrap();
        assert!(t2.count >= 6);
    }

    #[test]
    fn figure_eight_fails_at_convexity() {
        let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0)], &[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)], 128).unwrap();
        let err = analyze_curve(&c, &s()).unwrap_err();
        assert_eq!(err.stage(), Some("convexity"));
    }

    #[test]
    fn circle_dual_is_circle() {
        let (_, _, _, lift) = chain(&ClosedCurve::circle(1.0, 128).unwrap());
        let dual = dual_curve(&lift).unwrap();
        let (a, b) = dual_incidence(&lift, &dual);
        assert!(a < 1e-10 && b < 1e-10);
        let chart = dual_chart_curve(&dual, [0.0, 0.0]).unwrap();
        for j in 0..128 {
            let r = chart.x().values()[j].hypot(chart.y().values()[j]);
            assert!((r - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dual_of_conic_is_conic() {
        let (_, _, _, lift) = chain(&ClosedCurve::ellipse(2.0, 0.5, 256).unwrap());
        let dual = dual_curve(&lift).unwrap();
        let (res, sv) = fit_conic(&dual);
        assert!(res < 1e-10);
        assert!(sv[2] > 1e-3 * sv[0]);
    }

    #[test]
    fn dual_preserves_sextactic_parameters() {
        let (_, k, _, lift) = chain(&perturbed_ellipse());
        let dual = dual_curve(&lift).unwrap();
        let chart = dual_chart_curve(&dual, [0.0, 0.0]).unwrap();
        let (dp, dk, dode, _) = chain(&chart);
        let r = find_sextactic_points(&dp, &dk, &dode, &s()).unwrap();
        assert_eq!(r.count, 6);
        for cp in k.critical_points() {
            let d = r.points.iter().map(|q| cyclic_distance(q.x, cp.u)).fold(1.0, f64::min);
            assert!(d < 1e-6, "{d}");
        }
    }

    #[test]
    fn conic_transforms_with_the_plane() {
        let (p, k, _, _) = chain(&perturbed_ellipse());
        let osc = osculating_conic(&p, &k, 0.2);
        let t = PlaneTransform::new([[1.2, 0.3, 0.1], [-0.2, 0.9, 0.0], [0.05, 0.02, 1.0]]).unwrap();
        let image = osc.conic.transformed(&t);
        let q = t.apply_point(osc.point).unwrap();
        assert!(image.eval(q).abs() < 1e-12);
    }

    #[test]
    fn polylines_lie_on_the_conic() {
        let (p, k, _, _) = chain(&perturbed_ellipse());
        let osc = osculating_conic(&p, &k, 0.37);
        for q in osc.polyline(64, 2.0) {
            assert!(osc.local_form(q).abs() < 1e-9);
        }
    }
}
