//! Periodic linear ODEs `phi^(n) + u_{n-1} phi^(n-1) + ... + u_0 phi = 0` on
//! the unit circle: fundamental systems, monodromy, numerical disconjugacy
//! certificates, and zero-count certificates for functions orthogonal to
//! solutions (or to products of two solutions).
//!
//! Solutions are integrated in scaled coordinates `z_r = phi^(r) / w^r`,
//! where `w` is a frequency scale read off the coefficients, so that all
//! state components have comparable size. Monodromy defects are measured in
//! those coordinates.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::integrate;
use crate::periodic::{count_sample_sign_changes, count_sign_changes_scaled, PeriodicFunction};
use crate::settings::Settings;

const TAU: f64 = 2.0 * PI;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Normal-form operator with unit leading coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPeriodicODE {
    /// `u_0, ..., u_{n-1}`.
    coefficients: Vec<PeriodicFunction>,
}

impl LinearPeriodicODE {
    pub fn new(coefficients: Vec<PeriodicFunction>) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(Error::InvalidInput("an equation needs order at least 1".into()));
        };
        let n = first.grid_size();
        if coefficients.iter().any(|c| c.grid_size() != n) {
            return Err(Error::InvalidInput("coefficients live on different grids".into()));
        }
        Ok(Self { coefficients })
    }

    /// Constant coefficients `u_0..u_{n-1}`.
    pub fn constant_coefficients(values: &[f64], grid_size: usize) -> Result<Self> {
        let coefficients =
            values.iter().map(|&c| PeriodicFunction::constant(c, grid_size)).collect::<Result<Vec<_>>>()?;
        Self::new(coefficients)
    }

    /// `d/dx (d^2/dx^2 + (2 pi)^2) ... (d^2/dx^2 + (2 pi m)^2)`, of order `2m + 1`.
    /// Its solutions are the trigonometric polynomials of degree `m`.
    pub fn harmonic(m: usize, grid_size: usize) -> Result<Self> {
        // ascending polynomial coefficients in s = d/dx
        let mut poly = vec![0.0, 1.0];
        for j in 1..=m {
            let w2 = (TAU * j as f64).powi(2);
            let mut next = vec![0.0; poly.len() + 2];
            for (i, &p) in poly.iter().enumerate() {
                next[i] += w2 * p;
                next[i + 2] += p;
            }
            poly = next;
        }
        poly.pop();
        Self::constant_coefficients(&poly, grid_size)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn grid_size(&self) -> usize {
        self.coefficients[0].grid_size()
    }

    pub fn coefficients(&self) -> &[PeriodicFunction] {
        &self.coefficients
    }

    /// Frequency used to balance derivative orders in the state vector.
    pub fn frequency_scale(&self) -> f64 {
        let n = self.order();
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, u)| u.max_abs().powf(1.0 / (n - j) as f64))
            .fold(TAU, f64::max)
    }

    /// `A g = g^(n) + sum_j u_j g^(j)`.
    pub fn apply(&self, g: &PeriodicFunction) -> PeriodicFunction {
        let mut acc = g.differentiate(self.order());
        for (j, u) in self.coefficients.iter().enumerate() {
            acc = &acc + &(u * &g.differentiate(j));
        }
        acc
    }

    /// The largest single term of `A g`, used as the magnitude reference for
    /// deciding whether `A g` vanishes.
    pub fn term_scale(&self, g: &PeriodicFunction) -> f64 {
        let mut scale = g.differentiate(self.order()).max_abs();
        for (j, u) in self.coefficients.iter().enumerate() {
            scale = scale.max((u * &g.differentiate(j)).max_abs());
        }
        scale
    }

    /// Formal adjoint applied directly: `A* g = sum_j (-1)^j (u_j g)^(j)`
    /// with `u_n = 1`.
    pub fn apply_adjoint(&self, g: &PeriodicFunction) -> PeriodicFunction {
        let n = self.order();
        let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = &g.differentiate(n) * sign(n);
        for (j, u) in self.coefficients.iter().enumerate() {
            acc = &acc + &(&(u * g).differentiate(j) * sign(j));
        }
        acc
    }

    /// The adjoint equation `A* phi = 0` in normal form (divided by `(-1)^n`).
    pub fn adjoint(&self) -> Self {
        let n = self.order();
        let grid = self.grid_size();
        let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
        let coefficients = (0..n)
            .map(|i| {
                let mut w = PeriodicFunction::constant(0.0, grid).unwrap();
                for j in i..n {
                    let term = &self.coefficients[j].differentiate(j - i) * (sign(j) * binomial(j, i));
                    w = &w + &term;
                }
                &w * sign(n)
            })
            .collect();
        Self { coefficients }
    }
}

/// Whether solutions return to themselves, change sign, or neither after one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Periodicity {
    Periodic,
    AntiPeriodic,
    Neither,
}

impl Periodicity {
    fn twist(self) -> i8 {
        match self {
            Periodicity::AntiPeriodic => -1,
            _ => 1,
        }
    }
}

/// Canonical solutions over one period and the monodromy.
///
/// Canonical solution `c` has scaled initial data `e_c`, that is
/// `phi_c^(r)(0) = w^c` if `r = c` and `0` otherwise.
#[derive(Debug, Clone)]
pub struct FundamentalSystem {
    ode: LinearPeriodicODE,
    scale: f64,
    tol: f64,
    /// Scaled fundamental matrix at `x_j = j / N`, `j = 0..=N`.
    states: Vec<DMatrix<f64>>,
}

struct CoefficientField {
    coefficients: Vec<PeriodicFunction>,
    scale: f64,
}

impl CoefficientField {
    fn new(ode: &LinearPeriodicODE, scale: f64) -> Self {
        let coefficients = ode.coefficients.iter().map(|u| u.trimmed(1e-16)).collect();
        Self { coefficients, scale }
    }

    /// Right-hand side for `n` columns stored column-major.
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.coefficients.len();
        let w = self.scale;
        let weights: Vec<f64> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(j, u)| u.eval(t) * w.powi(j as i32 + 1 - n as i32))
            .collect();
        for col in 0..y.len() / n {
            let z = &y[col * n..(col + 1) * n];
            let d = &mut dy[col * n..(col + 1) * n];
            for r in 0..n - 1 {
                d[r] = w * z[r + 1];
            }
            d[n - 1] = -weights.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

fn matrix_from_state(n: usize, y: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(n, n, y)
}

impl FundamentalSystem {
    pub fn new(ode: &LinearPeriodicODE, settings: &Settings) -> Result<Self> {
        let n = ode.order();
        let grid = ode.grid_size();
        let scale = ode.frequency_scale();
        let field = CoefficientField::new(ode, scale);
        let y0 = DMatrix::<f64>::identity(n, n);
        let outputs: Vec<f64> = (1..=grid).map(|j| j as f64 / grid as f64).collect();
        let traj = integrate(|t, y, dy| field.rhs(t, y, dy), 0.0, y0.as_slice(), &outputs, settings.ode_tol)?;
        let mut states = Vec::with_capacity(grid + 1);
        states.push(y0);
        states.extend(traj.iter().map(|y| matrix_from_state(n, y)));
        Ok(Self { ode: ode.clone(), scale, tol: settings.ode_tol, states })
    }

    pub fn order(&self) -> usize {
        self.ode.order()
    }

    pub fn grid_size(&self) -> usize {
        self.states.len() - 1
    }

    pub fn ode(&self) -> &LinearPeriodicODE {
        &self.ode
    }

    pub fn frequency_scale(&self) -> f64 {
        self.scale
    }

    fn unscale(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_fn(self.order(), |r, _| self.scale.powi(r as i32)))
    }

    /// Scaled fundamental matrix at grid index `j` (`0..=N`).
    pub fn scaled_state(&self, j: usize) -> &DMatrix<f64> {
        &self.states[j]
    }

    /// Scaled fundamental matrix at any `x` in `[0, 1]`.
    pub fn scaled_state_at(&self, x: f64) -> Result<DMatrix<f64>> {
        let n = self.grid_size();
        let pos = x.clamp(0.0, 1.0) * n as f64;
        let j = (pos.floor() as usize).min(n);
        let base = j as f64 / n as f64;
        if pos - j as f64 <= 1e-14 || j == n {
            return Ok(self.states[j].clone());
        }
        let field = CoefficientField::new(&self.ode, self.scale);
        let out = integrate(|t, y, dy| field.rhs(t, y, dy), base, self.states[j].as_slice(), &[x], self.tol)?;
        Ok(matrix_from_state(self.order(), &out[0]))
    }

    /// `(phi_c^(r)(x))` for the canonical solutions, in original derivatives.
    pub fn derivative_matrix(&self, x: f64) -> Result<DMatrix<f64>> {
        Ok(self.unscale() * self.scaled_state_at(x)?)
    }

    /// Maps `(phi, phi', ..., phi^(n-1))(0)` to the same data at `x = 1`.
    pub fn monodromy(&self) -> DMatrix<f64> {
        let d = self.unscale();
        let dinv = d.clone().try_inverse().expect("diagonal scale is invertible");
        &d * &self.states[self.grid_size()] * dinv
    }

    pub fn scaled_monodromy(&self) -> &DMatrix<f64> {
        &self.states[self.grid_size()]
    }

    /// `(|M - I|, |M + I|)` in scaled coordinates, entrywise max norm.
    pub fn monodromy_defects(&self) -> (f64, f64) {
        let m = self.scaled_monodromy();
        let id = DMatrix::<f64>::identity(m.nrows(), m.ncols());
        ((m - &id).amax(), (m + &id).amax())
    }

    pub fn periodicity(&self, tol: f64) -> Periodicity {
        let (minus, plus) = self.monodromy_defects();
        if minus < tol {
            Periodicity::Periodic
        } else if plus < tol {
            Periodicity::AntiPeriodic
        } else {
            Periodicity::Neither
        }
    }

    /// `ln det M + int u_{n-1}`, which vanishes by Liouville's formula.
    pub fn liouville_defect(&self) -> f64 {
        let det = self.scaled_monodromy().determinant();
        det.ln() + self.ode.coefficients.last().unwrap().integrate()
    }

    /// Grid samples `phi(x_j)`, `j = 0..N-1`, of the solution with
    /// canonical coordinates `c`.
    pub fn solution_values(&self, c: &DVector<f64>) -> Vec<f64> {
        self.states[..self.grid_size()].iter().map(|y| (y.row(0) * c)[0]).collect()
    }

    /// Canonical solutions as periodic functions. Only meaningful when the
    /// monodromy is the identity.
    pub fn periodic_solutions(&self) -> Result<Vec<PeriodicFunction>> {
        (0..self.order())
            .map(|c| {
                let e = DVector::from_fn(self.order(), |r, _| if r == c { 1.0 } else { 0.0 });
                PeriodicFunction::from_samples(self.solution_values(&e))
            })
            .collect()
    }

    /// Symmetric products `phi_i phi_j`, `i <= j`, as periodic functions.
    pub fn solution_products(&self) -> Result<Vec<PeriodicFunction>> {
        let n = self.order();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|c| self.solution_values(&DVector::from_fn(n, |r, _| if r == c { 1.0 } else { 0.0 })))
            .collect();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(PeriodicFunction::from_samples(
                    cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).collect(),
                )?);
            }
        }
        Ok(out)
    }

    fn projection_basis(&self, products: bool, settings: &Settings) -> Result<Vec<PeriodicFunction>> {
        if products {
            return self.solution_products();
        }
        match self.periodicity(settings.monodromy_tol) {
            Periodicity::Periodic => self.periodic_solutions(),
            Periodicity::AntiPeriodic => Err(Error::NotPeriodic("solutions are anti-periodic")),
            Periodicity::Neither => Err(Error::NotPeriodic("monodromy is neither I nor -I")),
        }
    }

    /// Basis of solutions meeting every `(point, order)` condition, where
    /// `order` is the zero multiplicity (`phi, ..., phi^(order-1)` vanish).
    pub fn prescribed_zero_solution(
        &self,
        conditions: &[(f64, usize)],
        settings: &Settings,
    ) -> Result<SolutionSpace> {
        let n = self.order();
        let total: usize = conditions.iter().map(|c| c.1).sum();
        if total > n {
            return Err(Error::InvalidInput(format!("{total} conditions exceed the order {n}")));
        }
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut row = 0;
        for &(p, m) in conditions {
            let y = self.scaled_state_at(p.rem_euclid(1.0))?;
            for r in 0..m {
                let mut v = y.row(r).clone_owned();
                let norm = v.norm();
                if norm > 0.0 {
                    v /= norm;
                }
                a.set_row(row, &v);
                row += 1;
            }
        }
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let sv = svd.singular_values;
        let threshold = settings.null_space_tol * sv.max().max(1.0);
        let basis: Vec<DVector<f64>> = (0..n)
            .filter(|&i| sv[i] <= threshold)
            .map(|i| v_t.row(i).transpose())
            .collect();
        let mut singular_values: Vec<f64> = sv.iter().copied().collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        if basis.is_empty() {
            return Err(Error::NoNontrivialSolution { singular_values });
        }
        Ok(SolutionSpace { basis, singular_values })
    }

    /// Removes from `f0` its projection onto the solutions (or their
    /// pairwise products), and reports the largest normalized residual
    /// `|int f b| / (|f| |b|)` over the basis.
    pub fn project_out(
        &self,
        f0: &PeriodicFunction,
        products: bool,
        settings: &Settings,
    ) -> Result<(PeriodicFunction, f64)> {
        let basis = self.projection_basis(products, settings)?;
        project_out(f0, &basis, settings)
    }

    /// A seeded random band-limited function made orthogonal to the
    /// solutions (or to their products).
    pub fn orthogonal_complement_sample(
        &self,
        seed: u64,
        products: bool,
        settings: &Settings,
    ) -> Result<PeriodicFunction> {
        let f0 = random_band_limited(self.grid_size(), seed, settings);
        Ok(self.project_out(&f0, products, settings)?.0)
    }

    /// Numerical disconjugacy certificate: monodromy, extremal solutions,
    /// and random solutions.
    pub fn check_disconjugate(&self, settings: &Settings) -> Result<DisconjugacyReport> {
        let n = self.order();
        let grid = self.grid_size();
        let expected = if n % 2 == 1 { Periodicity::Periodic } else { Periodicity::AntiPeriodic };
        let (minus, plus) = self.monodromy_defects();
        let periodicity = self.periodicity(settings.monodromy_tol);
        let monodromy_defect = if n % 2 == 1 { minus } else { plus };
        let twist = expected.twist();
        let limit = n - 1;

        // solutions vanishing to order n-1 at one point may not change sign elsewhere
        let allowed_extremal = (n - 1) % 2;
        let points = settings.extremal_points.clamp(1, grid);
        let mut extremal_max = 0;
        if n >= 2 {
            for i in 0..points {
                let j = i * grid / points;
                let space = self.prescribed_zero_solution(&[(j as f64 / grid as f64, n - 1)], settings)?;
                let values = self.solution_values(&space.basis[0]);
                extremal_max = extremal_max.max(count_sample_sign_changes(&values, twist, settings.zero_tol));
            }
        }
        let extremal_pass = extremal_max <= allowed_extremal;

        let mut rng = ChaCha8Rng::seed_from_u64(settings.disconjugacy_seed);
        let mut sample_max = 0;
        for _ in 0..settings.disconjugacy_samples {
            let mut c = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let norm = c.norm();
            if norm > 0.0 {
                c /= norm;
            }
            let values = self.solution_values(&c);
            sample_max = sample_max.max(count_sample_sign_changes(&values, twist, settings.zero_tol));
        }
        let samples_pass = sample_max <= limit;
        let certified = periodicity == expected && extremal_pass && samples_pass;
        Ok(DisconjugacyReport {
            order: n,
            periodicity,
            monodromy_defect,
            monodromy_tolerance: settings.monodromy_tol,
            liouville_defect: self.liouville_defect(),
            extremal_points: if n >= 2 { points } else { 0 },
            extremal_max_sign_changes: extremal_max,
            extremal_pass,
            sample_count: settings.disconjugacy_samples,
            max_observed_zero_count: sample_max.max(extremal_max),
            zero_count_limit: limit,
            certified,
            counting: "sign changes on the grid; tangential zeros are not counted".into(),
        })
    }
}

/// Removes from `f0` its projection onto `span(basis)`. Directions with
/// singular value below `null_space_tol * max` are treated as dependent.
pub fn project_out(
    f0: &PeriodicFunction,
    basis: &[PeriodicFunction],
    settings: &Settings,
) -> Result<(PeriodicFunction, f64)> {
    let n = f0.grid_size();
    let m = basis.len();
    let w = (1.0 / n as f64).sqrt();
    let a = DMatrix::from_fn(n, m, |i, j| basis[j].values()[i] * w);
    let svd = a.svd(true, false);
    let u = svd.u.expect("requested U");
    let sv = &svd.singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return Err(Error::GramSingular { condition: f64::INFINITY });
    }
    let mut f = DVector::from_fn(n, |i, _| f0.values()[i] * w);
    for k in (0..m).filter(|&k| sv[k] > settings.null_space_tol * smax) {
        let col = u.column(k);
        let c = col.dot(&f);
        f -= col * c;
    }
    let f = PeriodicFunction::from_samples(f.iter().map(|v| v / w).collect())?;
    Ok((f.clone(), orthogonality_residual(&f, basis)))
}

/// `max_b |int f b| / (|f|_2 |b|_2)`.
pub fn orthogonality_residual(f: &PeriodicFunction, basis: &[PeriodicFunction]) -> f64 {
    let norm = |g: &PeriodicFunction| (g * g).integrate().sqrt();
    let nf = norm(f);
    basis
        .iter()
        .map(|b| {
            let d = nf * norm(b);
            if d == 0.0 {
                0.0
            } else {
                (f * b).integrate().abs() / d
            }
        })
        .fold(0.0, f64::max)
}

/// Seeded random function on `n` samples with `band_fraction * n/2`
/// harmonics whose amplitudes decay like `(1 + k)^-spectral_decay`.
pub fn random_band_limited(n: usize, seed: u64, settings: &Settings) -> PeriodicFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = ((n / 2) as f64 * settings.band_fraction).floor().max(1.0) as usize;
    let coeffs: Vec<(f64, f64)> = (0..=band)
        .map(|k| {
            let amp = (1.0 + k as f64).powf(-settings.spectral_decay);
            let a = rng.random_range(-1.0..1.0) * amp;
            let b = if k == 0 { 0.0 } else { rng.random_range(-1.0..1.0) * amp };
            (a, b)
        })
        .collect();
    PeriodicFunction::from_coefficients(&coeffs, n).expect("band fits on the grid")
}

/// Solutions meeting a set of zero conditions, in canonical coordinates.
#[derive(Debug, Clone)]
pub struct SolutionSpace {
    pub basis: Vec<DVector<f64>>,
    /// Singular values of the condition matrix, decreasing.
    pub singular_values: Vec<f64>,
}

impl SolutionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisconjugacyReport {
    pub order: usize,
    pub periodicity: Periodicity,
    /// `|M - I|` for odd order, `|M + I|` for even order (scaled coordinates).
    pub monodromy_defect: f64,
    pub monodromy_tolerance: f64,
    pub liouville_defect: f64,
    pub extremal_points: usize,
    pub extremal_max_sign_changes: usize,
    pub extremal_pass: bool,
    pub sample_count: usize,
    pub max_observed_zero_count: usize,
    pub zero_count_limit: usize,
    pub certified: bool,
    /// How zeros were counted.
    pub counting: String,
}

pub fn fundamental_system(ode: &LinearPeriodicODE, settings: &Settings) -> Result<FundamentalSystem> {
    FundamentalSystem::new(ode, settings)
}

pub fn check_disconjugate(ode: &LinearPeriodicODE, settings: &Settings) -> Result<DisconjugacyReport> {
    FundamentalSystem::new(ode, settings)?.check_disconjugate(settings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Orthogonal to all solutions of an odd-order equation.
    Solutions,
    /// Orthogonal to all products of two solutions.
    Products,
    /// In the image of the operator.
    Image,
}

/// Zero-count certificate over seeded trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCertificate {
    pub theorem: Theorem,
    pub order: usize,
    pub bound: usize,
    pub seed: u64,
    pub trials: usize,
    /// Sign-change count per trial, in seed order.
    pub counts: Vec<usize>,
    pub min_count: usize,
    pub max_orthogonality_residual: f64,
    pub orthogonality_tolerance: f64,
    pub pass: bool,
    pub disconjugacy: DisconjugacyReport,
}

/// Zero-count check of one given function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionCertificate {
    pub count: usize,
    pub bound: usize,
    pub crossings: Vec<f64>,
    pub orthogonality_residual: f64,
    pub orthogonality_tolerance: f64,
    pub pass: bool,
}

fn certified_system(ode: &LinearPeriodicODE, settings: &Settings) -> Result<(FundamentalSystem, DisconjugacyReport)> {
    let fs = FundamentalSystem::new(ode, settings)?;
    let report = fs.check_disconjugate(settings)?;
    if !report.certified {
        return Err(Error::NotDisconjugate(Box::new(report)));
    }
    Ok((fs, report))
}

fn run_trials(
    theorem: Theorem,
    ode: &LinearPeriodicODE,
    trials: usize,
    seed: u64,
    settings: &Settings,
) -> Result<TheoremCertificate> {
    let n = ode.order();
    let products = theorem == Theorem::Products;
    if !products && n % 2 == 0 {
        return Err(Error::InvalidInput(format!("orthogonality to solutions needs odd order, got {n}")));
    }
    let bound = if products { 2 * n } else { n + 1 };
    let (fs, disconjugacy) = certified_system(ode, settings)?;
    let basis = fs.projection_basis(products, settings)?;
    let mut counts = Vec::with_capacity(trials);
    let mut max_res: f64 = 0.0;
    for t in 0..trials {
        let f0 = random_band_limited(fs.grid_size(), seed.wrapping_add(t as u64), settings);
        let (f, res) = project_out(&f0, &basis, settings)?;
        max_res = max_res.max(res);
        counts.push(count_sign_changes_scaled(&f, f0.max_abs(), settings)?.count);
    }
    let min_count = counts.iter().copied().min().unwrap_or(0);
    let pass = counts.iter().all(|&c| c >= bound) && max_res < settings.null_space_tol;
    Ok(TheoremCertificate {
        theorem,
        order: n,
        bound,
        seed,
        trials,
        counts,
        min_count,
        max_orthogonality_residual: max_res,
        orthogonality_tolerance: settings.null_space_tol,
        pass,
        disconjugacy,
    })
}

/// Random functions orthogonal to every solution of a disconjugate equation
/// of order `2n + 1` must change sign at least `2n + 2` times.
pub fn certify_theorem1(
    ode: &LinearPeriodicODE,
    trials: usize,
    seed: u64,
    settings: &Settings,
) -> Result<TheoremCertificate> {
    run_trials(Theorem::Solutions, ode, trials, seed, settings)
}

/// Random functions orthogonal to every product of two solutions of a
/// disconjugate equation of order `n` must change sign at least `2n` times.
pub fn certify_theorem2(
    ode: &LinearPeriodicODE,
    trials: usize,
    seed: u64,
    settings: &Settings,
) -> Result<TheoremCertificate> {
    run_trials(Theorem::Products, ode, trials, seed, settings)
}

/// Checks one function against the zero bound, verifying its orthogonality first.
pub fn certify_function(
    fs: &FundamentalSystem,
    f: &PeriodicFunction,
    products: bool,
    settings: &Settings,
    orthogonality_tol: f64,
) -> Result<FunctionCertificate> {
    let n = fs.order();
    let bound = if products { 2 * n } else { n + 1 };
    let basis = fs.projection_basis(products, settings)?;
    let residual = orthogonality_residual(f, &basis);
    let sc = crate::periodic::count_sign_changes(f, settings)?;
    Ok(FunctionCertificate {
        count: sc.count,
        bound,
        crossings: sc.crossings,
        orthogonality_residual: residual,
        orthogonality_tolerance: orthogonality_tol,
        pass: sc.count >= bound && residual < orthogonality_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryCertificate {
    pub order: usize,
    pub bound: usize,
    pub count: usize,
    pub crossings: Vec<f64>,
    /// `max |int (A g) psi|` over solutions `psi` of the adjoint, normalized.
    pub adjoint_orthogonality_residual: f64,
    pub adjoint_disconjugate: bool,
    pub pass: bool,
}

/// `f = A g` must change sign at least `order + 1` times for odd-order
/// disconjugate `A`. Also forms the adjoint and checks that `f` is
/// orthogonal to its solutions.
pub fn certify_corollary(
    ode: &LinearPeriodicODE,
    g: &PeriodicFunction,
    settings: &Settings,
) -> Result<CorollaryCertificate> {
    let n = ode.order();
    if n % 2 == 0 {
        return Err(Error::InvalidInput(format!("the image bound needs odd order, got {n}")));
    }
    certified_system(ode, settings)?;
    let f = ode.apply(g);
    let sc = count_sign_changes_scaled(&f, ode.term_scale(g), settings)?;
    let adjoint = FundamentalSystem::new(&ode.adjoint(), settings)?;
    let adjoint_report = adjoint.check_disconjugate(settings)?;
    let adjoint_orthogonality_residual = match adjoint.periodic_solutions() {
        Ok(sols) if adjoint_report.periodicity == Periodicity::Periodic => orthogonality_residual(&f, &sols),
        _ => f64::INFINITY,
    };
    let bound = n + 1;
    Ok(CorollaryCertificate {
        order: n,
        bound,
        count: sc.count,
        crossings: sc.crossings,
        adjoint_orthogonality_residual,
        adjoint_disconjugate: adjoint_report.certified,
        pass: sc.count >= bound && adjoint_report.certified,
    })
}
