//! Reference by description: identifying unnamed nodes of a labeled graph
//! through their relations to a small set of nodes whose names are shared.

pub mod describe;
mod error;
pub mod experiments;
pub mod graph;
pub mod info;
pub mod protocol;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Information quantities in bits.
pub type Bits = f64;
pub type ThresholdPrediction = describe::ThresholdPrediction<Bits>;
pub type SharingRequirement = describe::SharingRequirement<Bits>;
pub type LengthBounds = describe::LengthBounds<Bits>;
pub type IdentifiabilityReport = describe::IdentifiabilityReport<Bits>;
