//! Numerical engine for three-dimensional almost contact B-metric manifolds
//! built over two-dimensional Norden surfaces: the cone `C(N)` and the
//! `S¹`-solvable extension `S¹(N)`.

pub mod acb;
pub mod classify;
pub mod curvature;
pub mod dual;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod linalg;
pub mod norden;
pub mod tensor;
pub mod verify;

pub use acb::{cone_of, s1_extension_of, AcbManifold, AlmostContactMetric, ManifoldKind, MetricPerturbation};
pub use dual::{HyperDual, Scalar};
pub use error::GeometryError;
pub use expr::{EvalError, ParseError, ScalarFieldExpr};
pub use norden::{make_conformal_surface, make_flat_surface, NordenSurface};
pub use tensor::{BasisTag, TensorComponents, Variance};
