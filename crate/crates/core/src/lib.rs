//! Behavior-specific filtering and classification of 6-axis IMU streams.

pub mod classifiers;
pub mod cli;
pub mod config;
pub mod data_model;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod filters;
pub mod outlier;
pub mod pipeline;
pub mod router;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
