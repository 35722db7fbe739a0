//! Weighted Bergman kernels on the disk and annulus: closed-form expression
//! trees, Gram-matrix and quadrature oracles, kernel zero location and the
//! Hartogs-domain lift.

pub mod base;
pub mod dd;
pub mod domain;
pub mod error;
pub mod expr;
pub mod formula;
pub mod hartogs;
pub mod jet;
pub mod oracle;
pub mod poly;
pub mod transform;
pub mod zeros;

pub use domain::{BaseWeight, ComplexPoint, DomainKind, DomainSpec, Factor, WeightSpec};
pub use error::{Error, Result};
pub use expr::KernelExpr;
