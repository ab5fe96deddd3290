//! Localization of a small, unknown number of indistinguishable RF emitters from
//! aggregate received-signal-strength data, treated as a sparse recovery
//! problem on a grid of candidate locations, together with the resolution and
//! detectability limits of that recovery.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod noise;
pub mod scene;
pub mod solver;

pub use error::{Error, Result};
