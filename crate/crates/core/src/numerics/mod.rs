//! Exact rationals, adaptive quadrature and finite differences.

mod diff;
mod quadrature;
pub mod rational;

pub use diff::central_derivative;
pub use quadrature::{
    integrate_1d, integrate_1d_raw, integrate_disc_radial, integrate_semi_infinite,
    Direction, IntegrationResult, QuadratureSpec, SemiInfiniteTransform,
};
