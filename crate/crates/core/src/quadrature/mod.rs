//! Quadrature rules: Gauss-Legendre, adaptive Gauss-Kronrod, and the
//! trigonometric principal-value rule on the unit circle.

mod circle;
mod kronrod;
mod legendre;

pub use circle::{cauchy_pv_circle, circle_nodes, CircleCauchy};
pub use kronrod::{integrate, integrate_real_line, Tolerance};
pub use legendre::{gauss_legendre, GaussLegendre};
