//! Exact halting-time probability bounds, step horizons, and an exhaustive
//! census of small register-machine programs to test them against.

pub mod census;
pub mod crm;
pub mod error;
pub mod horizon;
pub mod interval;
pub mod model;
pub mod prob;
pub mod rational;
pub mod report;
mod series;

pub use error::{Error, Result};
pub use interval::ProbInterval;
pub use model::{ComplexityModel, ModelParams, ModelRegistry, Plain, SelfDelimiting};
pub use rational::ExactRational;
