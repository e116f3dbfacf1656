//! Closed plane curves stored as pairs of periodic functions, convexity
//! checks, and the affine and projective group actions.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periodic::PeriodicFunction;

const TAU: f64 = 2.0 * PI;

/// Relative size below which a grid quantity is treated as vanishing.
const VANISH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub locally_convex: bool,
    pub globally_convex: bool,
    /// Minimum over the grid of `orientation * det(c', c'')`.
    pub min_det: f64,
    pub min_det_at: f64,
    /// Winding number of the tangent direction.
    pub turning_number: i64,
    /// Sign of `det(c', c'')` for the curve as given.
    pub orientation: i8,
    pub min_speed: f64,
}

/// A closed curve `c(x) = (c1(x), c2(x))`, `x` in `[0, 1)`.
///
/// Locally convex curves are stored with `det(c', c'') > 0`; when the input
/// runs the other way the parameter is reversed and `reversed` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedCurve {
    x: PeriodicFunction,
    y: PeriodicFunction,
    reversed: bool,
    convexity: ConvexityReport,
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter().enumerate().fold((0, f64::INFINITY), |(i, m), (j, &x)| if x < m { (j, x) } else { (i, m) })
}

fn turning_number(dx: &PeriodicFunction, dy: &PeriodicFunction) -> Result<i64> {
    let n = dx.grid_size();
    let (fx, fy) = (dx.resample(4 * n)?, dy.resample(4 * n)?);
    let angles: Vec<f64> = fx.values().iter().zip(fy.values()).map(|(a, b)| b.atan2(*a)).collect();
    let m = angles.len();
    let total: f64 = (0..m)
        .map(|j| {
            let d = angles[(j + 1) % m] - angles[j];
            (d + PI).rem_euclid(TAU) - PI
        })
        .sum();
    Ok((total / TAU).round() as i64)
}

impl ClosedCurve {
    pub fn new(x: PeriodicFunction, y: PeriodicFunction) -> Result<Self> {
        if x.grid_size() != y.grid_size() {
            return Err(Error::InvalidInput("curve components live on different grids".into()));
        }
        let n = x.grid_size();
        let (dx, dy) = (x.differentiate(1), y.differentiate(1));
        let speed: Vec<f64> = dx.values().iter().zip(dy.values()).map(|(a, b)| a.hypot(*b)).collect();
        let (j, min_speed) = argmin(&speed);
        let max_speed = speed.iter().fold(0.0f64, |m, &s| m.max(s));
        if max_speed == 0.0 || min_speed <= VANISH * max_speed {
            return Err(Error::NotImmersed { min_speed, at: j as f64 / n as f64 });
        }

        let (ddx, ddy) = (dx.differentiate(1), dy.differentiate(1));
        let det: Vec<f64> = (0..n).map(|j| dx.values()[j] * ddy.values()[j] - dy.values()[j] * ddx.values()[j]).collect();
        let peak = det.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let imax = det.iter().position(|d| d.abs() == peak).unwrap_or(0);
        let orientation: i8 = if det[imax] < 0.0 { -1 } else { 1 };
        let oriented: Vec<f64> = det.iter().map(|d| d * orientation as f64).collect();
        let (jmin, min_det) = argmin(&oriented);
        let locally_convex = peak > 0.0 && min_det > VANISH * peak;
        let turning = turning_number(&dx, &dy)?;

        let reverse = locally_convex && orientation < 0;
        let (x, y) = if reverse { (x.reversed(), y.reversed()) } else { (x, y) };
        let min_det_at = if reverse { (-(jmin as f64) / n as f64).rem_euclid(1.0) } else { jmin as f64 / n as f64 };
        let convexity = ConvexityReport {
            locally_convex,
            globally_convex: locally_convex && turning.abs() == 1,
            min_det,
            min_det_at,
            turning_number: if reverse { -turning } else { turning },
            orientation,
            min_speed,
        };
        Ok(Self { x, y, reversed: reverse, convexity })
    }

    /// Curve from Fourier coefficient lists of the two components.
    pub fn from_fourier(fx: &[(f64, f64)], fy: &[(f64, f64)], grid_size: usize) -> Result<Self> {
        Self::new(
            PeriodicFunction::from_coefficients(fx, grid_size)?,
            PeriodicFunction::from_coefficients(fy, grid_size)?,
        )
    }

    /// Samples `f` on the grid; `f` must be 1-periodic.
    pub fn from_fn(grid_size: usize, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        let pts: Vec<(f64, f64)> = (0..grid_size).map(|j| f(j as f64 / grid_size as f64)).collect();
        Self::new(
            PeriodicFunction::from_samples(pts.iter().map(|p| p.0).collect())?,
            PeriodicFunction::from_samples(pts.iter().map(|p| p.1).collect())?,
        )
    }

    /// `(a cos 2 pi x, b sin 2 pi x)`.
    pub fn ellipse(a: f64, b: f64, grid_size: usize) -> Result<Self> {
        Self::from_fourier(&[(0.0, 0.0), (a, 0.0)], &[(0.0, 0.0), (0.0, b)], grid_size)
    }

    pub fn circle(r: f64, grid_size: usize) -> Result<Self> {
        Self::ellipse(r, r, grid_size)
    }

    pub fn x(&self) -> &PeriodicFunction {
        &self.x
    }

    pub fn y(&self) -> &PeriodicFunction {
        &self.y
    }

    pub fn grid_size(&self) -> usize {
        self.x.grid_size()
    }

    pub fn convexity(&self) -> &ConvexityReport {
        &self.convexity
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    /// Parameter of the curve as originally given that corresponds to `t`.
    pub fn input_parameter(&self, t: f64) -> f64 {
        if self.reversed {
            (-t).rem_euclid(1.0)
        } else {
            t.rem_euclid(1.0)
        }
    }

    /// Inverse of [`ClosedCurve::input_parameter`].
    pub fn stored_parameter(&self, t: f64) -> f64 {
        self.input_parameter(t)
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        [self.x.eval(t), self.y.eval(t)]
    }

    pub fn derivative(&self, t: f64, order: usize) -> [f64; 2] {
        [self.x.eval_derivative(t, order), self.y.eval_derivative(t, order)]
    }

    /// `det(c', c'')` on the grid.
    pub fn det_first_second(&self) -> PeriodicFunction {
        let (dx, dy) = (self.x.differentiate(1), self.y.differentiate(1));
        let (ddx, ddy) = (self.x.differentiate(2), self.y.differentiate(2));
        &(&dx * &ddy) - &(&dy * &ddx)
    }

    pub fn require_locally_convex(&self) -> Result<()> {
        if self.convexity.locally_convex {
            Ok(())
        } else {
            Err(Error::NotLocallyConvex { min_det: self.convexity.min_det, at: self.convexity.min_det_at })
        }
    }
}

pub fn check_convexity(c: &ClosedCurve) -> ConvexityReport {
    c.convexity.clone()
}

/// A projective transformation of the plane acting on `(x, y, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneTransform {
    matrix: [[f64; 3]; 3],
}

impl PlaneTransform {
    pub fn new(matrix: [[f64; 3]; 3]) -> Result<Self> {
        let m = Matrix3::from_fn(|i, j| matrix[i][j]);
        let scale = m.norm();
        if !m.iter().all(|v| v.is_finite()) || m.determinant().abs() <= 1e-14 * scale.powi(3) {
            return Err(Error::InvalidInput("transform matrix is singular".into()));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self { matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    /// `p -> L p + t`.
    pub fn affine(linear: [[f64; 2]; 2], translation: [f64; 2]) -> Result<Self> {
        Self::new([
            [linear[0][0], linear[0][1], translation[0]],
            [linear[1][0], linear[1][1], translation[1]],
            [0.0, 0.0, 1.0],
        ])
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.matrix
    }

    pub fn to_matrix3(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.matrix[i][j])
    }

    pub fn is_affine(&self) -> bool {
        let r = self.matrix[2];
        r[0] == 0.0 && r[1] == 0.0 && r[2] != 0.0
    }

    /// Determinant of the linear part of an affine map (after dividing by the corner entry).
    pub fn linear_determinant(&self) -> f64 {
        let m = &self.matrix;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / (m[2][2] * m[2][2])
    }

    pub fn inverse(&self) -> Self {
        let inv = self.to_matrix3().try_inverse().expect("checked nonsingular");
        Self { matrix: [0, 1, 2].map(|i| [0, 1, 2].map(|j| inv[(i, j)])) }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = self.to_matrix3() * other.to_matrix3();
        Self { matrix: [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)])) }
    }

    /// Homogeneous image `(X, Y, W)` of `(x, y, 1)`.
    pub fn apply_homogeneous(&self, p: [f64; 2]) -> [f64; 3] {
        let m = &self.matrix;
        [0, 1, 2].map(|i| m[i][0] * p[0] + m[i][1] * p[1] + m[i][2])
    }

    /// Image point, or `None` on the line at infinity.
    pub fn apply_point(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        let [x, y, w] = self.apply_homogeneous(p);
        (w != 0.0).then(|| [x / w, y / w])
    }
}

/// Pointwise image `T c`, resampled on the same grid. The parameter of the
/// result matches the parameter of `c` as given.
pub fn apply_transform(c: &ClosedCurve, t: &PlaneTransform) -> Result<ClosedCurve> {
    let n = c.grid_size();
    let hom: Vec<[f64; 3]> =
        (0..n).map(|j| t.apply_homogeneous([c.x.values()[j], c.y.values()[j]])).collect();
    let wmax = hom.iter().fold(0.0f64, |m, h| m.max(h[2].abs()));
    let sign = hom[0][2].signum();
    if let Some(j) = hom.iter().position(|h| h[2] * sign <= VANISH * wmax) {
        return Err(Error::LeavesAffineChart { at: c.input_parameter(j as f64 / n as f64), w: hom[j][2] });
    }
    let x = PeriodicFunction::from_samples(hom.iter().map(|h| h[0] / h[2]).collect())?;
    let y = PeriodicFunction::from_samples(hom.iter().map(|h| h[1] / h[2]).collect())?;
    let mut out = ClosedCurve::new(x, y)?;
    out.reversed ^= c.reversed;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_is_convex() {
        let c = ClosedCurve::circle(1.0, 256).unwrap();
        let r = check_convexity(&c);
        assert!(r.locally_convex && r.globally_convex);
        assert_eq!(r.turning_number, 1);
        assert!((r.min_det - TAU.powi(3)).abs() < 1e-9 * TAU.powi(3));
    }

    #[test]
    fn limacon_turning_number() {
        let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0), (0.2, 0.0)], &[(0.0, 0.0), (0.0, 1.0), (0.0, 0.2)], 256)
            .unwrap();
        let r = check_convexity(&c);
        assert!(r.locally_convex);
        // winding of z'(t) = i e^{it}(1 + 0.4 e^{it}) counted on a dense grid
        let m = 1 << 14;
        let mut total = 0.0;
        let arg = |t: f64| {
            let (dx, dy) = (-(TAU * t).sin() - 0.4 * (2.0 * TAU * t).sin(), (TAU * t).cos() + 0.4 * (2.0 * TAU * t).cos());
            dy.atan2(dx)
        };
        for j in 0..m {
            let d = arg((j + 1) as f64 / m as f64) - arg(j as f64 / m as f64);
            total += (d + PI).rem_euclid(TAU) - PI;
        }
        assert_eq!(r.turning_number, (total / TAU).round() as i64);
        assert_eq!(r.turning_number, 1);
        assert!((r.min_det - TAU.powi(3) * 0.12).abs() < 1e-6 * TAU.powi(3));
    }

    #[test]
    fn figure_eight_is_not_locally_convex() {
        let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0)], &[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)], 256).unwrap();
        let r = check_convexity(&c);
        assert!(!r.locally_convex && !r.globally_convex);
        assert!(r.min_det < 0.0);
        assert!(matches!(c.require_locally_convex(), Err(Error::NotLocallyConvex { .. })));
    }

    #[test]
    fn clockwise_input_is_reversed() {
        let c = ClosedCurve::from_fourier(&[(0.0, 0.0), (1.0, 0.0)], &[(0.0, 0.0), (0.0, -1.0)], 64).unwrap();
        assert!(c.is_reversed());
        assert_eq!(c.convexity().orientation, -1);
        assert!(c.det_first_second().min_value() > 0.0);
        let t = 0.1;
        let p = c.point(t);
        let q = c.input_parameter(t);
        assert!((p[0] - (TAU * q).cos()).abs() < 1e-12 && (p[1] + (TAU * q).sin()).abs() < 1e-12);
    }

    #[test]
    fn constant_curve_is_not_immersed() {
        let c = ClosedCurve::from_fourier(&[(1.0, 0.0)], &[(2.0, 0.0)], 16);
        assert!(matches!(c, Err(Error::NotImmersed { .. })));
    }

    #[test]
    fn transforms() {
        let c = ClosedCurve::circle(1.0, 128).unwrap();
        let id = apply_transform(&c, &PlaneTransform::identity()).unwrap();
        assert_eq!(id.x().values(), c.x().values());

        let s = PlaneTransform::affine([[2.0, 0.0], [0.0, 2.0]], [0.0, 0.0]).unwrap();
        let big = apply_transform(&c, &s).unwrap();
        for j in 0..128 {
            let (a, b) = (big.x().values()[j], big.y().values()[j]);
            assert!((a.hypot(b) - 2.0).abs() < 1e-12);
        }

        let p = PlaneTransform::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.1, 0.0, 1.0]]).unwrap();
        let oval = apply_transform(&c, &p).unwrap();
        assert!(oval.convexity().globally_convex);
        let back = apply_transform(&oval, &p.inverse()).unwrap();
        assert!((back.x() - c.x()).max_abs() < 1e-9 && (back.y() - c.y()).max_abs() < 1e-9);
    }

    #[test]
    fn chart_exit_is_reported() {
        let c = ClosedCurve::circle(1.0, 128).unwrap();
        let p = PlaneTransform::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(apply_transform(&c, &p), Err(Error::LeavesAffineChart { .. })));
    }

    #[test]
    fn singular_transform_is_rejected() {
        assert!(PlaneTransform::new([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
    }
}
