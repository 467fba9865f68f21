//! Fit multi-factor scaling laws (accuracy as a function of pretraining data,
//! model size, and image resolution), project uniform scale-up scenarios,
//! and account for ViT/MAE architecture cost and continuous-chunk dataset
//! subsampling.
//!
//! The numeric core ([`models`], [`optim`], [`fit`], [`project`]) is generic
//! over [`Scalar`]; the aliases below pin the common `f64` and `f32`
//! instantiations.

pub mod arch;
pub mod cli;
pub mod data;
pub mod fit;
pub mod models;
pub mod optim;
pub mod plot;
pub mod project;
mod rng;
pub mod sampler;
mod scalar;

pub use data::{Benchmark, FinetuneCondition, Observation, ObservationSet};
pub use models::{InputPoint, ModelFamily, ScalingModel};
pub use scalar::Scalar;

pub type ScalingModel64 = models::ScalingModel<f64>;
pub type ScalingModel32 = models::ScalingModel<f32>;
pub type InputPoint64 = models::InputPoint<f64>;
pub type InputPoint32 = models::InputPoint<f32>;
pub type OptimOptions64 = optim::OptimOptions<f64>;
pub type OptimOptions32 = optim::OptimOptions<f32>;
pub type OptimResult64 = optim::OptimResult<f64>;
pub type OptimResult32 = optim::OptimResult<f32>;
pub type FitSpec64 = fit::FitSpec<f64>;
pub type FitSpec32 = fit::FitSpec<f32>;
pub type FitResult64 = fit::FitResult<f64>;
pub type FitResult32 = fit::FitResult<f32>;
pub type SyntheticSpec64 = fit::SyntheticSpec<f64>;
