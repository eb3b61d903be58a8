//! Stacked Grenander and stacked rearrangement estimators of a discrete
//! probability mass function.
//!
//! The stacked estimators mix a monotone (Grenander) or sorted
//! (rearrangement) fit with the empirical relative frequencies; the mixture
//! weight comes from closed-form leave-one-out least-squares
//! cross-validation. The crate also builds plug-in global confidence bands
//! and ships a Monte-Carlo harness for comparing estimators on the standard
//! test models.
//!
//! ```
//! use stackpmf::estimators::{stacked, FrequencyData, ShapeKind};
//!
//! let x = FrequencyData::new(vec![1, 2]).unwrap();
//! let fit = stacked(&x, ShapeKind::Grenander).unwrap();
//! assert_eq!(fit.beta_hat, 1.0);
//! assert_eq!(fit.estimate.probs, vec![0.5, 0.5]);
//! ```

pub mod band;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod models;
pub mod numeric;
pub mod rng;
pub mod shape;
pub mod sim;

pub use error::{Error, Result};
pub use estimators::{EstimatorKind, FrequencyData, ShapeKind, StackedFit};
pub use models::{ModelSpec, Pmf};
