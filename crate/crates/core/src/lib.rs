//! Bidirectional path tracing with two interchangeable balance-heuristic
//! weight engines and the tooling to check that they agree.

// `!(x > 0.0)` is used deliberately so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod color;
pub mod compare;
pub mod error;
pub mod image;
pub mod integrators;
pub mod misweights;
pub mod oracle;
pub mod pathwalk;
pub mod rng;
pub mod scene;
pub mod vecmath;
pub mod verification;

pub use error::{Error, Result};
