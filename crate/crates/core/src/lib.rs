//! Evaluation of test suite effectiveness metrics by order preservation.
//!
//! Given a project's kill matrix, statement and branch coverage matrices and
//! fault manifest, the crate builds benchmark suite pairs whose relation is
//! known (from real faults, or from whole-mutant-set mutation scores), scores
//! both suites of each pair with a metric, and reports the share of pairs whose
//! order the metric preserves.

pub mod agreement;
pub mod error;
pub mod groundtruth;
pub mod io;
pub mod metrics;
pub mod model;
pub mod overlap;
pub mod report;
pub mod rng;
pub mod run;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
