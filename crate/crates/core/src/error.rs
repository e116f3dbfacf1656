use thiserror::Error;

use crate::sturm::DisconjugacyReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("function is indistinguishable from zero (max |f| = {max_abs:e}, threshold {threshold:e})")]
    IndistinguishableFromZero { max_abs: f64, threshold: f64 },

    #[error("curve is not immersed: |c'| = {min_speed:e} at x = {at}")]
    NotImmersed { min_speed: f64, at: f64 },

    #[error("curve is not locally convex: det(c', c'') = {min_det:e} at x = {at}")]
    NotLocallyConvex { min_det: f64, at: f64 },

    #[error("transformed curve leaves the affine chart near x = {at} (w = {w:e})")]
    LeavesAffineChart { at: f64, w: f64 },

    #[error("lift residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("projective length element vanishes identically (conic)")]
    EverywhereDegenerate,

    #[error("integration failed at t = {t} (step {step:e})")]
    IntegrationFailure { t: f64, step: f64 },

    #[error("no nontrivial solution meets the conditions (singular values {singular_values:?})")]
    NoNontrivialSolution { singular_values: Vec<f64> },

    #[error("projection basis is numerically dependent (condition {condition:e})")]
    GramSingular { condition: f64 },

    #[error("solutions are not period-1 functions ({0})")]
    NotPeriodic(&'static str),

    #[error("equation is not certified disconjugate")]
    NotDisconjugate(Box<DisconjugacyReport>),

    #[error("point does not lie on the conic (residual {residual:e})")]
    PointNotOnConic { residual: f64 },

    #[error("contact slope ambiguous: local slopes in [{low}, {high}]")]
    SlopeAmbiguous { low: f64, high: f64 },

    #[error("curve is a conic: every point is sextactic")]
    DegenerateConicCurve,

    #[error("tangent line degenerates near x = {at}")]
    DegenerateTangent { at: f64 },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage { stage, source: Box::new(other) },
        }
    }

    /// Name of the pipeline stage that failed, if known.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    /// The error underneath any stage wrapper.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
