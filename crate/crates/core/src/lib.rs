//! Key-rate engine for coherent-state continuous-variable QKD over a lossy
//! channel under Gaussian collective attacks.
//!
//! * [`gaussian`]: entropy function, channel variances, two-mode covariance
//!   and symplectic eigenvalues.
//! * [`rates`]: exact and infinite-modulation key rates for every
//!   direction × measurement pair, strong-loss limits and thresholds.
//! * [`mc`]: Monte Carlo simulation used to cross-check channel statistics.
//! * [`sweep`], [`compare`] and the `cli` module: batch evaluation and the
//!   `cvqkd` command line.

#[cfg(feature = "cli")]
pub mod cli;
pub mod compare;
pub mod error;
pub mod gaussian;
pub mod mc;
pub mod rates;
pub mod sweep;
pub mod unit;

pub use error::{CoreError, Result};
pub use gaussian::ChannelPoint;
pub use rates::{Direction, Measurement, ProtocolSpec, RateBreakdown};
pub use unit::InfoUnit;
