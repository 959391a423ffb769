//! TDMA-TIN: time-share over the six embedded 2-user interference channels,
//! each decoded by treating interference as noise.
//!
//! The time-sharing problem is linear in the fractions, so the optimum puts
//! all time on the single best pairing. Both the finite-SNR sum-rate and the
//! GDoF are therefore a maximum over six configurations.

use std::fmt;

use serde::Serialize;

use crate::channel::{effective_inr, AlphaMatrix};
use crate::error::{Error, Result};
use crate::{cap, pos};

/// Pairing Tx `i1` → Rx `j1`, Tx `i2` → Rx `j2`, kept in canonical form
/// `j1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IcConfig {
    i1: usize,
    i2: usize,
}

impl IcConfig {
    /// Builds a configuration; a tuple with `j1 = 2` is folded onto the
    /// equivalent canonical one.
    pub fn new(i1: usize, i2: usize, j1: usize, j2: usize) -> Result<Self> {
        let tx_ok = (1..=3).contains(&i1) && (1..=3).contains(&i2) && i1 != i2;
        let rx_ok = (j1, j2) == (1, 2) || (j1, j2) == (2, 1);
        if !(tx_ok && rx_ok) {
            return Err(Error::InvalidIndex(format!(
                "IC config ({i1},{i2},{j1},{j2}) needs distinct tx in 1..=3 and distinct rx in 1..=2"
            )));
        }
        Ok(if j1 == 1 {
            IcConfig { i1, i2 }
        } else {
            IcConfig { i1: i2, i2: i1 }
        })
    }

    pub fn i1(&self) -> usize {
        self.i1
    }

    pub fn i2(&self) -> usize {
        self.i2
    }

    pub fn j1(&self) -> usize {
        1
    }

    pub fn j2(&self) -> usize {
        2
    }
}

impl fmt::Display for IcConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},1,2)", self.i1, self.i2)
    }
}

impl Serialize for IcConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// All six canonical configurations in lexicographic `(i1, i2)` order.
pub fn enumerate_ic_configs() -> Vec<IcConfig> {
    let mut out = Vec::with_capacity(6);
    for i1 in 1..=3 {
        for i2 in 1..=3 {
            if i1 != i2 {
                out.push(IcConfig { i1, i2 });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AchievabilityResult {
    pub value: f64,
    pub argmax: IcConfig,
}

/// TIN sum-rate of one embedded 2-user IC, in bits.
pub fn tin_sum_rate(rho: f64, alpha: &AlphaMatrix, cfg: IcConfig) -> f64 {
    let (i1, i2) = (cfg.i1, cfg.i2);
    let p = |rx, tx| effective_inr(rho, alpha.get(rx, tx));
    cap(p(1, i1) / (1.0 + p(1, i2))) + cap(p(2, i2) / (1.0 + p(2, i1)))
}

/// GDoF of one configuration: `(α_{j1i1}−α_{j1i2})⁺ + (α_{j2i2}−α_{j2i1})⁺`.
pub fn tdma_tin_gdof_config(alpha: &AlphaMatrix, cfg: IcConfig) -> f64 {
    let (i1, i2) = (cfg.i1, cfg.i2);
    pos(alpha.get(1, i1) - alpha.get(1, i2)) + pos(alpha.get(2, i2) - alpha.get(2, i1))
}

// strict `>` keeps the first (lexicographically smallest) maximizer
fn argmax_over_configs(f: impl Fn(IcConfig) -> f64) -> AchievabilityResult {
    let mut best: Option<AchievabilityResult> = None;
    for cfg in enumerate_ic_configs() {
        let value = f(cfg);
        if best.is_none_or(|b| value > b.value) {
            best = Some(AchievabilityResult { value, argmax: cfg });
        }
    }
    best.expect("six configurations")
}

/// Best TDMA-TIN sum-rate over the six configurations, in bits.
pub fn tdma_tin_rate(rho: f64, alpha: &AlphaMatrix) -> AchievabilityResult {
    argmax_over_configs(|cfg| tin_sum_rate(rho, alpha, cfg))
}

/// TDMA-TIN GDoF: the maximum of [`tdma_tin_gdof_config`] over all configurations.
pub fn tdma_tin_gdof(alpha: &AlphaMatrix) -> AchievabilityResult {
    argmax_over_configs(|cfg| tdma_tin_gdof_config(alpha, cfg))
}
