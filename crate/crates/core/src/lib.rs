//! DC approximation of the ℓ0-norm with DCA solvers, applied to feature
//! selection in linear support vector machines.
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiation.

// NaN-aware comparisons such as `!(x > 0)` are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod data;
pub mod dcacore;
pub mod error;
pub mod exactpen;
pub mod scalar;
pub mod subsolver;
pub mod svmfs;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Penalty = approx::PenaltySpec<f64>;
pub type Instance = svmfs::SvmInstance<f64>;
pub type Iterate = svmfs::ModelIterate<f64>;
pub type Data = data::Dataset<f64>;
pub type Lp = subsolver::LinearProgram<f64>;
pub type Qp = subsolver::DiagQp<f64>;
pub type Boxed = exactpen::BoxedInstance<f64>;

pub type PenaltyF32 = approx::PenaltySpec<f32>;
pub type InstanceF32 = svmfs::SvmInstance<f32>;
