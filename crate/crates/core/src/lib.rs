//! Eigenfunction-expansion solutions of time-fractional diffusion-wave
//! equations `∂_t^α u = -A u` with `0 < α < 2`, together with the decay
//! analysis built on their large-time asymptotics.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod basis;
pub mod decay;
pub mod error;
pub mod experiment;
pub mod observe;
pub mod oracle;
pub mod par;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use par::Execution;
