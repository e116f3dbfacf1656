//! Smooth functions on the unit circle: a uniform grid of samples paired with
//! the trigonometric series that interpolates them.
//!
//! The period is normalized to 1. A function on `N` samples carries harmonics
//! `k = 0..=N/2`; the Nyquist harmonic has no sine part.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::settings::Settings;

const TAU: f64 = 2.0 * PI;

/// Highest derivative order probed when estimating zero multiplicity.
const MAX_MULTIPLICITY: usize = 8;
/// Half-width of the window whose derivative sizes set the vanishing scale.
const MULTIPLICITY_WINDOW: f64 = 0.125;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFunction {
    values: Vec<f64>,
    /// `(cos_k, sin_k)` for `k = 0..=N/2`.
    coeffs: Vec<(f64, f64)>,
    /// Highest harmonic with a nonzero coefficient.
    band: usize,
}

fn check_grid(n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidInput(format!("grid size {n} must be even and at least 4")));
    }
    Ok(())
}

fn analyze(values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    let half = n / 2;
    let mut coeffs = Vec::with_capacity(half + 1);
    coeffs.push((buf[0].re / nf, 0.0));
    for x in &buf[1..half] {
        coeffs.push((2.0 * x.re / nf, -2.0 * x.im / nf));
    }
    coeffs.push((buf[half].re / nf, 0.0));
    coeffs
}

fn synthesize(coeffs: &[(f64, f64)], n: usize) -> Vec<f64> {
    let half = n / 2;
    let nf = n as f64;
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    buf[0] = Complex::new(coeffs[0].0 * nf, 0.0);
    for k in 1..half.min(coeffs.len()) {
        let (a, b) = coeffs[k];
        let x = Complex::new(a, -b) * (nf / 2.0);
        buf[k] = x;
        buf[n - k] = x.conj();
    }
    if coeffs.len() > half {
        buf[half] = Complex::new(coeffs[half].0 * nf, 0.0);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|x| x.re / nf).collect()
}

fn band_of(coeffs: &[(f64, f64)]) -> usize {
    coeffs.iter().rposition(|&(a, b)| a != 0.0 || b != 0.0).unwrap_or(0)
}

/// Rotates a harmonic by `order` derivatives at angular frequency `w`.
fn derive_pair(a: f64, b: f64, w: f64, order: usize) -> (f64, f64) {
    let s = w.powi(order as i32);
    match order % 4 {
        0 => (a * s, b * s),
        1 => (b * s, -a * s),
        2 => (-a * s, -b * s),
        _ => (-b * s, a * s),
    }
}

impl PeriodicFunction {
    /// Interpolates grid samples `values[j] = f(j / N)`.
    pub fn from_samples(values: Vec<f64>) -> Result<Self> {
        check_grid(values.len())?;
        let coeffs = analyze(&values);
        let band = band_of(&coeffs);
        Ok(Self { values, coeffs, band })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(n)?;
        Self::from_samples((0..n).map(|j| f(j as f64 / n as f64)).collect())
    }

    /// Builds `a_0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x)` on `n` samples.
    pub fn from_coefficients(coeffs: &[(f64, f64)], n: usize) -> Result<Self> {
        check_grid(n)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty coefficient list".into()));
        }
        let half = n / 2;
        if coeffs.len() > half + 1 {
            return Err(Error::InvalidInput(format!(
                "{} harmonics do not fit on {n} samples",
                coeffs.len() - 1
            )));
        }
        let mut full = vec![(0.0, 0.0); half + 1];
        full[..coeffs.len()].copy_from_slice(coeffs);
        full[0].1 = 0.0;
        full[half].1 = 0.0;
        let values = synthesize(&full, n);
        let band = band_of(&full);
        Ok(Self { values, coeffs: full, band })
    }

    pub fn constant(c: f64, n: usize) -> Result<Self> {
        Self::from_coefficients(&[(c, 0.0)], n)
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coefficients(&self) -> &[(f64, f64)] {
        &self.coeffs
    }

    /// Highest harmonic carrying a nonzero coefficient.
    pub fn bandwidth(&self) -> usize {
        self.band
    }

    pub fn grid_point(&self, j: usize) -> f64 {
        j as f64 / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean over the period (trapezoid rule on the grid).
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_derivative(x, 0)
    }

    pub fn eval_derivative(&self, x: f64, order: usize) -> f64 {
        let mut acc = if order == 0 { self.coeffs[0].0 } else { 0.0 };
        let (s1, c1) = (TAU * x).sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        for k in 1..=self.band {
            let next = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next;
            let (a, b) = self.coeffs[k];
            let (da, db) = derive_pair(a, b, TAU * k as f64, order);
            acc += da * c + db * s;
        }
        acc
    }

    /// Spectral derivative of the given order.
    pub fn differentiate(&self, order: usize) -> Self {
        if order == 0 {
            return self.clone();
        }
        let n = self.values.len();
        let half = n / 2;
        let mut out = vec![(0.0, 0.0); half + 1];
        for k in 1..=self.band.min(half) {
            let (a, b) = self.coeffs[k];
            if k == half && order % 2 == 1 {
                continue;
            }
            out[k] = derive_pair(a, b, TAU * k as f64, order);
        }
        out[half].1 = 0.0;
        let band = band_of(&out);
        Self { values: synthesize(&out, n), coeffs: out, band }
    }

    /// Periodic part of the antiderivative, `P(x) = int_0^x (f - mean)`, so `P(0) = 0`.
    pub fn antiderivative_periodic(&self) -> Self {
        let n = self.values.len();
        let half = n / 2;
        let mut out = vec![(0.0, 0.0); half + 1];
        let mut offset = 0.0;
        for k in 1..=self.band.min(half) {
            let (a, b) = self.coeffs[k];
            let w = TAU * k as f64;
            // a cos -> a sin / w ; b sin -> -b cos / w
            out[k] = (-b / w, a / w);
            offset += b / w;
        }
        out[half].1 = 0.0;
        out[0].0 = offset;
        let band = band_of(&out);
        Self { values: synthesize(&out, n), coeffs: out, band }
    }

    /// Same trigonometric polynomial on a different grid. Harmonics that do
    /// not fit on the new grid are dropped.
    pub fn resample(&self, n: usize) -> Result<Self> {
        check_grid(n)?;
        let keep = (n / 2 + 1).min(self.coeffs.len());
        let mut c = self.coeffs[..keep].to_vec();
        if keep == n / 2 + 1 && keep < self.coeffs.len() {
            // the new Nyquist slot loses its sine part; fold into cosine-only form
            c[keep - 1].1 = 0.0;
        }
        Self::from_coefficients(&c, n)
    }

    /// Drops harmonics above the last one whose size exceeds `rel * max`.
    pub fn trimmed(&self, rel: f64) -> Self {
        let mag = |&(a, b): &(f64, f64)| a.hypot(b);
        let peak = self.coeffs.iter().map(mag).fold(0.0, f64::max);
        let keep = self.coeffs.iter().rposition(|c| mag(c) > rel * peak).unwrap_or(0);
        if keep >= self.band {
            return self.clone();
        }
        let mut c = self.coeffs.clone();
        for x in &mut c[keep + 1..] {
            *x = (0.0, 0.0);
        }
        Self::from_coefficients(&c, self.values.len()).expect("grid already validated")
    }

    /// Like [`trimmed`](Self::trimmed), but when the upper half of the
    /// spectrum is flat round-off, the cut is raised to a multiple of that floor.
    pub fn denoised(&self, rel: f64) -> Self {
        let mag = |&(a, b): &(f64, f64)| a.hypot(b);
        let peak = self.coeffs.iter().map(mag).fold(0.0, f64::max);
        let mut upper: Vec<f64> = self.coeffs[self.band / 2..].iter().map(mag).collect();
        upper.sort_by(f64::total_cmp);
        let median = upper.get(upper.len() / 2).copied().unwrap_or(0.0);
        if median <= 1e-12 * peak && median > 0.0 {
            self.trimmed(rel.max(16.0 * median / peak))
        } else {
            self.trimmed(rel)
        }
    }

    /// Pointwise map on the grid, re-expanded.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_samples(self.values.iter().map(|&v| f(v)).collect()).expect("grid already validated")
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid_size(), other.grid_size(), "grid sizes differ");
        Self::from_samples(self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
            .expect("grid already validated")
    }

    /// `f(x + shift)` evaluated spectrally.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut c = self.coeffs.clone();
        for (k, pair) in c.iter_mut().enumerate().skip(1) {
            let (s, co) = (TAU * k as f64 * shift).sin_cos();
            let (a, b) = *pair;
            *pair = (a * co + b * s, b * co - a * s);
        }
        let half = self.values.len() / 2;
        c[half].1 = 0.0;
        Self::from_coefficients(&c, self.values.len()).expect("grid already validated")
    }

    /// `f(-x)`.
    pub fn reversed(&self) -> Self {
        let n = self.values.len();
        let values = (0..n).map(|j| self.values[(n - j) % n]).collect();
        Self::from_samples(values).expect("grid already validated")
    }
}

impl Add for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn add(self, rhs: Self) -> PeriodicFunction {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn sub(self, rhs: Self) -> PeriodicFunction {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn mul(self, rhs: Self) -> PeriodicFunction {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Mul<f64> for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn mul(self, rhs: f64) -> PeriodicFunction {
        self.map(|v| v * rhs)
    }
}

impl Neg for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn neg(self) -> PeriodicFunction {
        self.map(|v| -v)
    }
}

/// Serialized as its harmonic coefficients and grid size.
impl Serialize for PeriodicFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            grid_size: usize,
            fourier: &'a [(f64, f64)],
        }
        Repr { grid_size: self.grid_size(), fourier: &self.coeffs[..=self.band] }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PeriodicFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            grid_size: usize,
            fourier: Vec<(f64, f64)>,
        }
        let r = Repr::deserialize(d)?;
        Self::from_coefficients(&r.fourier, r.grid_size).map_err(serde::de::Error::custom)
    }
}

/// Transversal sign changes of a function around the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignChanges {
    pub count: usize,
    /// Crossing abscissae in `[0, 1)`, increasing.
    pub crossings: Vec<f64>,
    /// Grid on which the count was taken (N, or 4N after a disagreement).
    pub grid_size: usize,
}

/// A group of nearby zeros with its estimated multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCluster {
    pub at: f64,
    pub multiplicity: usize,
}

/// Sign of each sample, zero when below `threshold`.
fn signs(values: &[f64], threshold: f64) -> Vec<i8> {
    values
        .iter()
        .map(|&v| if v > threshold { 1 } else if v < -threshold { -1 } else { 0 })
        .collect()
}

/// Pairs `(a, b)` of consecutive signed samples with opposite sign, walking
/// once around the circle. `twist = -1` treats the samples as anti-periodic,
/// so `b` may be `a + 1` past the end with its sign flipped.
fn sign_change_pairs(signs: &[i8], twist: i8) -> Vec<(usize, usize)> {
    let n = signs.len();
    let nonzero: Vec<usize> = (0..n).filter(|&j| signs[j] != 0).collect();
    let mut pairs = Vec::new();
    if nonzero.is_empty() {
        return pairs;
    }
    for w in nonzero.windows(2) {
        if signs[w[0]] != signs[w[1]] {
            pairs.push((w[0], w[1]));
        }
    }
    let (last, first) = (*nonzero.last().unwrap(), nonzero[0]);
    if signs[last] != twist * signs[first] {
        pairs.push((last, first + n));
    }
    pairs
}

/// Counts sign changes of raw samples on `[0, 1)`; `twist` is `1` for
/// periodic and `-1` for anti-periodic data. Samples below
/// `rel_tol * max|v|` carry no sign.
pub fn count_sample_sign_changes(values: &[f64], twist: i8, rel_tol: f64) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0;
    }
    sign_change_pairs(&signs(values, rel_tol * peak), twist).len()
}

fn wrap01(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn cyclic_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn crossings_on_grid(f: &PeriodicFunction, threshold: f64, tol: f64) -> Vec<f64> {
    let n = f.grid_size() as f64;
    let pairs = sign_change_pairs(&signs(f.values(), threshold), 1);
    let mut xs: Vec<f64> = pairs
        .into_iter()
        .map(|(a, b)| wrap01(bisect(|x| f.eval(x), a as f64 / n, b as f64 / n, tol)))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Counts transversal sign changes of `f`, treating samples below
/// `zero_tol * reference` as signless. Errors when `max|f|` itself falls
/// below that threshold.
pub fn count_sign_changes_scaled(
    f: &PeriodicFunction,
    reference: f64,
    settings: &Settings,
) -> Result<SignChanges> {
    let peak = f.max_abs();
    let threshold = settings.zero_tol * reference.max(peak);
    if peak <= threshold || peak == 0.0 {
        return Err(Error::IndistinguishableFromZero { max_abs: peak, threshold });
    }
    let n = f.grid_size();
    let first = crossings_on_grid(f, threshold, settings.bisection_tol);
    let fine = f.resample(2 * n)?;
    let second = sign_change_pairs(&signs(fine.values(), threshold), 1).len();
    if second == first.len() {
        return Ok(SignChanges { count: first.len(), crossings: first, grid_size: n });
    }
    let finest = f.resample(4 * n)?;
    let crossings = crossings_on_grid(&finest, threshold, settings.bisection_tol);
    Ok(SignChanges { count: crossings.len(), crossings, grid_size: 4 * n })
}

/// Counts transversal sign changes of `f` around the circle.
pub fn count_sign_changes(f: &PeriodicFunction, settings: &Settings) -> Result<SignChanges> {
    count_sign_changes_scaled(f, f.max_abs(), settings)
}

/// Zeros of `f` grouped into clusters, each with an estimated multiplicity.
///
/// Crossings come from [`count_sign_changes`]; touching zeros are found as
/// critical points of `f` at grid minima of `|f|` where `f` is below the
/// zero threshold.
pub fn locate_zero_clusters(f: &PeriodicFunction, settings: &Settings) -> Result<Vec<ZeroCluster>> {
    let sc = count_sign_changes(f, settings)?;
    let threshold = settings.zero_tol * f.max_abs();
    let df = f.differentiate(1);
    let n = f.grid_size();
    let nf = n as f64;
    let v = f.values();
    // (location, is a bisected sign change)
    let mut candidates: Vec<(f64, bool)> = sc.crossings.iter().map(|&x| (x, true)).collect();
    for j in 0..n {
        let (prev, next) = (v[(j + n - 1) % n], v[(j + 1) % n]);
        if v[j].abs() > prev.abs() || v[j].abs() > next.abs() {
            continue;
        }
        let (lo, hi) = ((j as f64 - 1.0) / nf, (j as f64 + 1.0) / nf);
        let x = if (df.eval(lo) > 0.0) != (df.eval(hi) > 0.0) {
            bisect(|x| df.eval(x), lo, hi, settings.bisection_tol * 1e-2)
        } else {
            j as f64 / nf
        };
        if f.eval(x).abs() <= threshold {
            candidates.push((wrap01(x), false));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    // same cluster: within cluster_tol, or joined by a run of sub-threshold samples
    let joined = |a: f64, b: f64| {
        if cyclic_distance(a, b) <= settings.cluster_tol {
            return true;
        }
        let span = (b - a).rem_euclid(1.0);
        if span > 0.5 {
            return false;
        }
        let first = (a * nf).ceil() as usize;
        let last = ((a + span) * nf).floor() as usize;
        f.eval(a + 0.5 * span).abs() <= threshold && (first..=last).all(|j| v[j % n].abs() <= threshold)
    };
    let mut clusters: Vec<Vec<(f64, bool)>> = Vec::new();
    for c in candidates {
        match clusters.last_mut() {
            Some(cl) if joined(cl.last().unwrap().0, c.0) => cl.push(c),
            _ => clusters.push(vec![c]),
        }
    }
    if clusters.len() > 1 {
        let first = clusters[0][0].0;
        let last = clusters.last().unwrap().last().unwrap().0;
        if joined(last, first) {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail.into_iter().map(|(x, b)| (x - 1.0, b)));
        }
    }

    let derivs: Vec<PeriodicFunction> = (1..=MAX_MULTIPLICITY).map(|m| f.differentiate(m)).collect();
    // local sizes, so a sharp feature elsewhere does not make every zero look degenerate
    let local_scale = |d: &PeriodicFunction, at: f64| {
        let w = (MULTIPLICITY_WINDOW * nf).ceil() as isize;
        let centre = (at * nf).round() as isize;
        (-w..=w).map(|o| d.values()[(centre + o).rem_euclid(n as isize) as usize].abs()).fold(0.0, f64::max)
    };
    Ok(clusters
        .into_iter()
        .map(|c| {
            let crossing: Vec<f64> = c.iter().filter(|p| p.1).map(|p| p.0).collect();
            let pts: Vec<f64> = if crossing.is_empty() { c.iter().map(|p| p.0).collect() } else { crossing };
            let at = wrap01(pts.iter().sum::<f64>() / pts.len() as f64);
            let multiplicity = derivs
                .iter()
                .position(|d| d.eval(at).abs() > settings.deriv_tol * local_scale(d, at))
                .map_or(MAX_MULTIPLICITY, |m| m + 1);
            ZeroCluster { at, multiplicity }
        })
        .collect::<Vec<_>>())
    .map(|mut v: Vec<ZeroCluster>| {
        v.sort_by(|a, b| a.at.total_cmp(&b.at));
        v
    })
}
