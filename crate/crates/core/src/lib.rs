//! Archimedean local arithmetic Siegel–Weil identities, computed and checked.
//!
//! Both sides of the local identities are implemented here:
//!
//! - the analytic side: normalized Whittaker values and their derivatives
//!   ([`whittaker`]), built on one-dimensional special functions
//!   ([`special`]), the subset-sum helper family ([`combinatorial`]) and the
//!   determinant differential operator ([`delta`]);
//! - the geometric side: Green functions, Chern forms and Kudla–Millson form
//!   coefficients on the complex unit ball ([`geometry`]).
//!
//! Everything algebraic is checked in exact rational arithmetic; integrals go
//! through the adaptive quadrature in [`numerics`]. The [`cli`] module turns
//! the checks into JSON verification reports.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod cli;
pub mod combinatorial;
pub mod delta;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod numerics;
pub mod special;
pub mod whittaker;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_rational::BigRational;
