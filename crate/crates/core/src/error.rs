use thiserror::Error;

use crate::acb::ManifoldKind;
use crate::expr::EvalError;
use crate::tensor::BasisTag;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("metric is degenerate at {point:?} (|det g| = {det:e})")]
    Degenerate { point: Vec<f64>, det: f64 },
    #[error("metric is not symmetric at {point:?} (max |g_ij - g_ji| = {asymmetry:e})")]
    NotSymmetric { point: Vec<f64>, asymmetry: f64 },
    #[error("point {point:?} is outside the chart domain: {reason}")]
    OutsideDomain { point: Vec<f64>, reason: String },
    #[error(transparent)]
    Expression(#[from] EvalError),
    #[error("slot {slot} out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: BasisTag, right: BasisTag },
    #[error("slots {0} and {1} have the same variance; a metric is required to contract them")]
    MetricRequired(usize, usize),
    #[error("tensor shapes differ")]
    ShapeMismatch,
    #[error("vector field evaluation failed near {point:?}: {reason}")]
    FieldEvaluation { point: Vec<f64>, reason: String },
    #[error("seed vector is not horizontal (eta(seed) = {0:e})")]
    SeedNotHorizontal(f64),
    #[error("seed vector is isotropic (g(s,s) = {0:e}, g(s,phi s) = {1:e}); choose another seed")]
    IsotropicSeed(f64, f64),
    #[error("section plane is degenerate (g(x,x) g(y,y) = {0:e})")]
    DegenerateSection(f64),
    #[error("step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("expected a {expected:?} manifold, got {found:?}")]
    WrongKind {
        expected: ManifoldKind,
        found: ManifoldKind,
    },
}
