//! Multistage multiple imputation for two-wave longitudinal data.
//!
//! Three ways of completing a dataset when a second wave arrives:
//! re-imputation of both waves, nested imputation (a full multiple
//! imputation of the new wave inside every completed first-wave dataset) and
//! appended imputation (a single imputation of the new wave per completed
//! first-wave dataset). The crate also carries the pooling rules for
//! independent and two-level nested collections and a Monte Carlo harness
//! that compares the strategies on simulated Gaussian data.

pub mod error;
pub mod amputation;
pub mod data;
pub mod dgp;
pub mod harness;
pub mod imputer;
pub mod numerics;
pub mod pooling;
pub mod strategies;

pub use error::{Error, Result};
