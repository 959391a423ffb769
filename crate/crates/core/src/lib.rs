//! Treating-interference-as-noise analysis for the 3×2 Gaussian X channel.
//!
//! The crate evaluates the TDMA-TIN achievable sum-rate and GDoF, the
//! genie-aided sum-capacity upper bound and its GDoF limit, and classifies
//! channel-strength exponents against the extended noisy-interference regime
//! (and the older, smaller regime it contains). The [`experiments`] module
//! runs the seeded audits built on top of those pieces.
//!
//! Indices follow the usual labelling: transmitters are `1..=3`, receivers
//! `1..=2`, and the exponent α_{ji} belongs to the link Tx i → Rx j.

pub mod achievability;
pub mod bounds;
pub mod channel;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod regime;
pub mod report;

pub use achievability::{tdma_tin_gdof, tdma_tin_rate, AchievabilityResult, IcConfig};
pub use bounds::{gdof_ub, sum_capacity_ub, BoundResult, GenieParams, TxPermutation};
pub use channel::{AlphaMatrix, ChannelScenario, Gain};
pub use error::{Error, Result};
pub use regime::{classify, RegimeVerdict};

/// `C(x) = log₂(1 + x)`.
#[inline]
pub fn cap(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Positive part `max{x, 0}`.
#[inline]
pub fn pos(x: f64) -> f64 {
    x.max(0.0)
}
