//! Transient stress intensity factors and dynamic weight functions for a
//! semi-infinite crack running at constant sub-Rayleigh speed parallel to the
//! free edge of an elastic half-plane.
//!
//! The numerical primitives (material model, special functions, quadrature,
//! Laplace inversion, whole-plane solution) are generic over [`Real`]; the
//! half-plane pipeline built on top of them works in `f64`.

pub mod error;
pub mod factor;
pub mod growth;
pub mod integral;
pub mod kernel;
pub mod laplace;
pub mod material;
pub mod plane;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub type C64 = Complex<f64>;
pub type Material64 = material::Material<f64>;
pub type CrackSetup64 = material::CrackSetup<f64>;
pub type InversionConfig64 = laplace::InversionConfig<f64>;
pub type PlaneSolver64 = plane::PlaneSolver<f64>;
