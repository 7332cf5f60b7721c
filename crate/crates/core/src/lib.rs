pub mod error;
pub mod features;
pub mod ingest;
pub mod jsonio;
pub mod learn;
pub mod matrix;
pub mod metrics;
pub mod reference;
pub mod resample;
pub mod seed;
pub mod select;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
