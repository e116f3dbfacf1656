//! Numeric settings shared by every stage of the toolkit.

use serde::{Deserialize, Serialize};

/// Environment variable that points at a TOML settings file.
pub const SETTINGS_ENV: &str = "SIXVERTEX_SETTINGS";

/// All tolerances and resolution knobs in one record.
///
/// Relative tolerances are scaled by the magnitude of whatever they are
/// compared against; the field docs say which.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Samples per period.
    pub grid_size: usize,
    /// Samples below `zero_tol * max|f|` carry no sign.
    pub zero_tol: f64,
    /// Zeros closer than this (in the unit-period parameter) form one cluster.
    pub cluster_tol: f64,
    /// A derivative counts as nonvanishing above `deriv_tol * max|f^(m)|`.
    pub deriv_tol: f64,
    /// Abscissa tolerance for bisection refinement of crossings.
    pub bisection_tol: f64,
    /// Local error tolerance of the adaptive integrator.
    pub ode_tol: f64,
    /// Bound on the scaled monodromy defect `|M -+ I|`.
    pub monodromy_tol: f64,
    /// Relative singular value threshold for null spaces and Gram solves.
    pub null_space_tol: f64,
    /// `max|k'| < degenerate_tol * max(|k|, 1) / L` means a conic.
    pub degenerate_tol: f64,
    /// Relative residual allowed in `phi''' = kappa phi' + v phi`.
    pub lift_residual_tol: f64,
    /// Relative residual allowed in the Lemma-3 product integrals.
    pub orthogonality_tol: f64,
    /// First contact-regression step as a fraction of the period.
    pub contact_delta_frac: f64,
    /// Number of dyadic shrinkages in the contact regression.
    pub contact_halvings: u32,
    /// Conic values below this are treated as round-off.
    pub contact_floor: f64,
    /// Contact orders are capped here.
    pub contact_cap: u32,
    /// RMS log residual above which a slope is ambiguous.
    pub slope_residual_tol: f64,
    /// Crossing-flag probe offset as a fraction of the period.
    pub crossing_delta_frac: f64,
    /// Points on the coarse sub-grid used for extremal solutions.
    pub extremal_points: usize,
    /// Random solutions sampled by the disconjugacy check.
    pub disconjugacy_samples: usize,
    /// Seed for the disconjugacy sampler.
    pub disconjugacy_seed: u64,
    /// Random test functions use `band_fraction * N/2` harmonics.
    pub band_fraction: f64,
    /// Harmonic k of a random function has amplitude `(1 + k)^-decay`.
    pub spectral_decay: f64,
    /// Fourier tails below `spectral_trim * max` are dropped after resampling.
    pub spectral_trim: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            grid_size: 512,
            zero_tol: 1e-9,
            cluster_tol: 1e-6,
            deriv_tol: 1e-4,
            bisection_tol: 1e-10,
            ode_tol: 1e-11,
            monodromy_tol: 1e-7,
            null_space_tol: 1e-9,
            degenerate_tol: 1e-7,
            lift_residual_tol: 1e-6,
            orthogonality_tol: 1e-7,
            contact_delta_frac: 1e-2,
            contact_halvings: 10,
            contact_floor: 1e-13,
            contact_cap: 10,
            slope_residual_tol: 0.25,
            crossing_delta_frac: 1e-3,
            extremal_points: 32,
            disconjugacy_samples: 64,
            disconjugacy_seed: 0x5eed,
            band_fraction: 0.25,
            spectral_decay: 2.0,
            spectral_trim: 1e-15,
        }
    }
}

impl Settings {
    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Same settings on a different grid.
    pub fn with_grid(&self, grid_size: usize) -> Self {
        Self { grid_size, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_keeps_defaults() {
        let s = Settings::from_toml_str("grid_size = 1024\nzero_tol = 1e-8").unwrap();
        assert_eq!(s.grid_size, 1024);
        assert_eq!(s.zero_tol, 1e-8);
        assert_eq!(s.cluster_tol, Settings::default().cluster_tol);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Settings::from_toml_str("gird_size = 4").is_err());
    }
}
