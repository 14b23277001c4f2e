pub mod checksum;
pub mod codec;
pub mod error;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod training;
pub mod transform;

pub use error::{Error, Result};
