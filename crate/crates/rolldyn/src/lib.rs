//! Vehicle roll-dynamics analysis toolkit.
//!
//! From steering-excitation measurement runs to predicted subjective
//! ratings: Welch H1 frequency-response estimation, characteristic-value
//! extraction, rating statistics, stepwise regression, calibrated
//! prediction models, and a synthesis lab for generating test runs from
//! parametric vehicle models.

pub mod charvals;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod ingest;
pub mod predictor;
pub mod ratestats;
pub mod report;
pub mod spectra;
pub mod stepfit;
pub mod synthlab;

pub use error::{Error, Result};
