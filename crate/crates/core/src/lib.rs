//! Compression–equivocation rate regions for lossless source coding with
//! side information at a legitimate receiver and at an eavesdropper.
//!
//! - [`prob`]: exact joint PMFs, channels and information measures (bits).
//! - [`regions`]: region formulas and the auxiliary-variable optimizer.
//! - [`orderings`]: stochastic degradation (LP) and less-noisy falsification.
//! - [`erasure`]: closed forms for the binary erasure family.
//! - [`binning`]: Monte Carlo random-binning simulations with exact posteriors.
//! - [`cli`]: command-line front end.

pub mod error;
pub mod binning;
pub mod cli;
pub mod erasure;
mod lp;
mod optimize;
pub mod orderings;
pub mod prob;
pub mod regions;

pub use error::{Error, Result};
pub use optimize::OptimizerConfig;
pub use prob::{Alphabet, Channel, JointPmf};
pub use regions::{RatePoint, SwitchConfig};
