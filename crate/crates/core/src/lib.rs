//! Refinement of manifold-valued sequences by the Riemannian analogue of
//! linear subdivision schemes, with exact derived-scheme convergence
//! analysis and certified centers of mass on Cartan–Hadamard manifolds.

// `!(x > 0.0)` deliberately treats NaN as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covering;
pub mod error;
pub mod io;
pub mod karcher;
pub mod manifold;
pub mod mask;
pub mod parallel;
pub mod render;
pub mod subdivision;

pub use error::{Error, Result};
pub use karcher::{riemannian_average, MeanCertificate, WeightedConfiguration};
pub use manifold::{Manifold, ManifoldPoint, TangentVector};
pub use mask::{Mask, MaskAnalysis, Rational, WeightRow};
pub use subdivision::{refine, refine_once, Polygon, RefinementTrace};
