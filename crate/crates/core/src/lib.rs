pub mod analysis;
pub mod config;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod lip;
pub mod oracle;
pub mod output;
pub mod potentials;
pub mod propagator;
pub mod scenario;
pub mod units;

pub use error::{ConfigError, Error, Result};
