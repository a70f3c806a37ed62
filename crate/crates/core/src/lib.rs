pub mod dynamics;
pub mod encoder;
pub mod error;
pub mod hardness;
pub mod rl;
pub mod rng;
pub mod schedule;

pub use error::{Error, Result};
