//! TOML input documents for curves and linear periodic equations.
//!
//! Field names are frozen in `schema/input.md`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::periodic::PeriodicFunction;
use crate::sturm::LinearPeriodicODE;

pub const DEFAULT_GRID: usize = 512;

/// A closed curve given by truncated Fourier series
/// `x(t) = sum_k a_k cos(2 pi k t) + b_k sin(2 pi k t)`, `t` in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    /// `[cos, sin]` pairs for harmonics `0, 1, 2, ...`.
    pub fourier_x: Vec<[f64; 2]>,
    pub fourier_y: Vec<[f64; 2]>,
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn check_grid_for(grid: usize, harmonics: usize) -> Result<()> {
    if !grid.is_power_of_two() || grid < 4 * harmonics.max(1) {
        return Err(Error::InvalidInput(format!(
            "grid_size {grid} must be a power of two and at least 4 x {} harmonics",
            harmonics.max(1)
        )));
    }
    Ok(())
}

fn check_series(name: &str, series: &[[f64; 2]]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::InvalidInput(format!("{name} is empty")));
    }
    if series.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} has a non-finite coefficient")));
    }
    Ok(())
}

fn pairs(series: &[[f64; 2]]) -> Vec<(f64, f64)> {
    series.iter().map(|&[a, b]| (a, b)).collect()
}

impl CurveSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn harmonics(&self) -> usize {
        self.fourier_x.len().max(self.fourier_y.len()) - 1
    }

    pub fn validate(&self) -> Result<()> {
        check_series("fourier_x", &self.fourier_x)?;
        check_series("fourier_y", &self.fourier_y)?;
        check_grid_for(self.grid_size, self.harmonics())
    }

    pub fn with_grid(&self, grid_size: usize) -> Result<Self> {
        let spec = Self { grid_size, ..self.clone() };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds the curve. Immersion and orientation are checked here;
    /// convexity is left to the analysis.
    pub fn to_curve(&self) -> Result<ClosedCurve> {
        ClosedCurve::from_fourier(&pairs(&self.fourier_x), &pairs(&self.fourier_y), self.grid_size)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("plain data")
    }
}

/// One coefficient `u_index` of `phi^(n) + u_{n-1} phi^(n-1) + ... + u_0 phi = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub index: usize,
    pub fourier: Vec<[f64; 2]>,
}

/// A linear equation on the unit period. Unlisted coefficients vanish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSpec {
    #[serde(default)]
    pub name: String,
    pub order: usize,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    #[serde(default, rename = "coefficient")]
    pub coefficients: Vec<CoefficientSpec>,
    /// Function fed through the operator for the image bound; a seeded
    /// random function is used when absent.
    #[serde(default)]
    pub test_function: Option<Vec<[f64; 2]>>,
}

impl OdeSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidInput("order must be positive".into()));
        }
        let mut harmonics = 1;
        let mut seen = vec![false; self.order];
        for c in &self.coefficients {
            if c.index >= self.order {
                return Err(Error::InvalidInput(format!("coefficient index {} >= order {}", c.index, self.order)));
            }
            if std::mem::replace(&mut seen[c.index], true) {
                return Err(Error::InvalidInput(format!("coefficient {} listed twice", c.index)));
            }
            check_series(&format!("coefficient {}", c.index), &c.fourier)?;
            harmonics = harmonics.max(c.fourier.len() - 1);
        }
        if let Some(g) = &self.test_function {
            check_series("test_function", g)?;
            harmonics = harmonics.max(g.len() - 1);
        }
        check_grid_for(self.grid_size, harmonics)
    }

    pub fn to_ode(&self) -> Result<LinearPeriodicODE> {
        let mut coeffs: Vec<PeriodicFunction> =
            (0..self.order).map(|_| PeriodicFunction::constant(0.0, self.grid_size)).collect::<Result<_>>()?;
        for c in &self.coefficients {
            coeffs[c.index] = PeriodicFunction::from_coefficients(&pairs(&c.fourier), self.grid_size)?;
        }
        LinearPeriodicODE::new(coeffs)
    }

    pub fn test_function(&self) -> Result<Option<PeriodicFunction>> {
        self.test_function.as_ref().map(|g| PeriodicFunction::from_coefficients(&pairs(g), self.grid_size)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ELLIPSE: &str = r#"
name = "ellipse"
fourier_x = [[0.0, 0.0], [2.0, 0.0]]
fourier_y = [[0.0, 0.0], [0.0, 1.0]]
"#;

    #[test]
    fn curve_spec_defaults_and_round_trip() {
        let spec = CurveSpec::from_toml_str(ELLIPSE).unwrap();
        assert_eq!(spec.grid_size, DEFAULT_GRID);
        assert_eq!(spec.harmonics(), 1);
        let again = CurveSpec::from_toml_str(&spec.to_toml_string()).unwrap();
        assert_eq!(spec, again);
        let c = spec.to_curve().unwrap();
        assert!((c.point(0.25)[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn curve_spec_rejections() {
        assert!(CurveSpec::from_toml_str("fourier_x = []\nfourier_y = [[0.0, 1.0]]").is_err());
        assert!(CurveSpec::from_toml_str(&format!("{ELLIPSE}grid_size = 100")).is_err());
        assert!(CurveSpec::from_toml_str(&format!("{ELLIPSE}grid = 64")).is_err());
        let many = vec![[0.1, 0.0]; 40];
        let spec = CurveSpec { name: String::new(), grid_size: 128, fourier_x: many.clone(), fourier_y: many };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn ode_spec_builds_operator() {
        let text = r#"
order = 3
grid_size = 128
[[coefficient]]
index = 1
fourier = [[39.47841760435743, 0.0]]
"#;
        let spec = OdeSpec::from_toml_str(text).unwrap();
        let ode = spec.to_ode().unwrap();
        assert_eq!(ode.order(), 3);
        assert!(ode.coefficients()[0].max_abs() == 0.0);
        assert!((ode.coefficients()[1].values()[7] - 39.47841760435743).abs() < 1e-12);
        assert!(spec.test_function().unwrap().is_none());
    }

    #[test]
    fn ode_spec_rejections() {
        assert!(OdeSpec::from_toml_str("order = 0").is_err());
        assert!(OdeSpec::from_toml_str("order = 2\n[[coefficient]]\nindex = 2\nfourier = [[1.0, 0.0]]").is_err());
        let twice = "order = 2\n[[coefficient]]\nindex = 0\nfourier = [[1.0, 0.0]]\n[[coefficient]]\nindex = 0\nfourier = [[1.0, 0.0]]";
        assert!(OdeSpec::from_toml_str(twice).is_err());
    }
}
