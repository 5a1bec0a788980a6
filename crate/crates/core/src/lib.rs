//! Desk-scale laboratory for black-box membership inference against
//! toy generative models.
//!
//! The pipeline: synthesize member/auxiliary data ([`synthdata`]), train a
//! target generator of one of several families behind a black-box handle
//! ([`generators`]), assemble an attack training set from generated positives
//! and auxiliary negatives and fit a binary attack classifier ([`attack`]),
//! score membership with ROC/AUC machinery ([`metrics`]), and drive the whole
//! thing through reproducible study runners ([`experiments`]).

pub mod attack;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod metrics;
pub mod nn;
pub mod rng;
pub mod synthdata;

pub use error::{Error, Result};
