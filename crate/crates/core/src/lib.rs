//! Numerics for λ-analytic functions on the unit disk: the Dunkl basis,
//! reproducing and projection kernels, quadrature for the weighted measures,
//! Bloch-type norms and a verification harness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod kernels;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod series;
pub mod specfun;
pub mod sum;
pub mod verify;

pub use basis::DiskPoint;
pub use error::{Error, Result};
pub use kernels::{KernelValue, KernelWeights};
pub use num_complex::Complex64;
pub use quadrature::{CircleRule, DiskRule, Rule};
pub use series::{CoefficientSeries, SeriesKind};
pub use specfun::LambdaParam;
pub use verify::{run_verification, CheckRecord, RunConfig, Tolerances, VerificationReport};
