//! Simulation and verification laboratory for random multiplicative
//! functions: model sampling, exact partial sums, random Euler products,
//! multiplicative-chaos barrier events, and conditional Gaussian covariance
//! structure, with Monte Carlo and closed-form cross-checks throughout.

pub mod chaos;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod parallel;
pub mod primes;
pub mod products;
pub mod rmf;
pub mod rng;
pub mod sums;
pub mod util;

pub use error::{Error, Result};
