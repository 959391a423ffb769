//! Seeded, reproducible studies: the regime sweep over the two cross-link
//! exponents, the constant-gap audit, the unconditional sandwich audit and a
//! GDoF convergence probe.
//!
//! Randomness comes from ChaCha8 seeded with the user seed, with one stream
//! per sample index. Samples are evaluated in parallel and collected in index
//! order, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::achievability::{tdma_tin_gdof, tdma_tin_rate};
use crate::bounds::{gdof_ub, sum_capacity_ub, TxPermutation};
use crate::channel::{AlphaMatrix, DEFAULT_ALPHA_CAP};
use crate::error::{Error, Result};
use crate::regime::classify_tol;
use crate::report::{fmt_sig, Tabular};

pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(seed), stream = sample index";

/// Claimed constant gap between the bound and TDMA-TIN, in bits.
pub const GAP_CLAIM_BITS: f64 = 7.0;

/// Sandwich audit tolerances.
pub const RATE_TOL_BITS: f64 = 1e-9;
pub const GDOF_TOL: f64 = 1e-12;

/// Rejection sampling gives up on a single draw after this many trials.
pub const MAX_TRIALS_PER_DRAW: u64 = 1_000_000;
/// Minimum acceptance rate once at least [`MAX_TRIALS_PER_DRAW`] trials ran.
pub const MIN_ACCEPTANCE: f64 = 1e-3;

// ---------------------------------------------------------------------------
// Regime sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub alpha21: f64,
    pub alpha12: f64,
    pub extended: bool,
    pub gsj: bool,
    pub d_tt: f64,
    pub gdof_ub: f64,
    pub witness: Option<TxPermutation>,
}

impl Tabular for SweepRecord {
    fn header() -> &'static [&'static str] {
        &["alpha21", "alpha12", "extended", "gsj", "d_tt", "gdof_ub", "witness"]
    }

    fn row(&self) -> Vec<String> {
        vec![
            fmt_sig(self.alpha21),
            fmt_sig(self.alpha12),
            self.extended.to_string(),
            self.gsj.to_string(),
            fmt_sig(self.d_tt),
            fmt_sig(self.gdof_ub),
            self.witness.map(|p| p.to_string()).unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub beta: f64,
    pub step: f64,
    pub range_max: f64,
    /// Slack applied to both regime inequalities.
    pub tolerance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            beta: 0.75,
            step: 0.005,
            range_max: 0.75,
            tolerance: 0.0,
        }
    }
}

/// Grid `0, step, 2·step, …` up to `range_max` inclusive, generated by
/// integer index. When `1/step` is an integer the coordinates are `k/m`,
/// which are exactly rounded decimals.
pub fn grid_axis(step: f64, range_max: f64) -> Vec<f64> {
    let count = (range_max / step + 1e-9).floor() as usize + 1;
    let per_unit = 1.0 / step;
    let exact_division = (per_unit - per_unit.round()).abs() < 1e-9;
    (0..count)
        .map(|k| {
            if exact_division {
                k as f64 / per_unit.round()
            } else {
                k as f64 * step
            }
        })
        .collect()
}

/// Regime sweep over `(α21, α12)` with `α11 = α22 = 1` and `α13 = α23 = β`.
/// Records are row-major: `α21` outer, `α12` inner.
pub fn sweep_fig2(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    if !(0.5..1.0).contains(&cfg.beta) {
        return Err(Error::InvalidBeta(cfg.beta));
    }
    if !(cfg.step > 0.0 && cfg.step <= cfg.range_max) {
        return Err(Error::InvalidArgument(format!(
            "step must lie in (0, range_max], got {}",
            cfg.step
        )));
    }
    if !(cfg.range_max > 0.0 && cfg.range_max <= DEFAULT_ALPHA_CAP) {
        return Err(Error::InvalidArgument(format!(
            "range_max must lie in (0, {DEFAULT_ALPHA_CAP}], got {}",
            cfg.range_max
        )));
    }
    if !(cfg.tolerance >= 0.0) {
        return Err(Error::InvalidArgument("tolerance must be >= 0".into()));
    }
    let axis = grid_axis(cfg.step, cfg.range_max);
    let points: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&x| axis.iter().map(move |&y| (x, y)))
        .collect();
    points
        .par_iter()
        .map(|&(alpha21, alpha12)| {
            let alpha = AlphaMatrix::limit([[1.0, alpha12, cfg.beta], [alpha21, 1.0, cfg.beta]])?;
            let verdict = classify_tol(&alpha, cfg.tolerance);
            Ok(SweepRecord {
                alpha21,
                alpha12,
                extended: verdict.in_extended,
                gsj: verdict.in_gsj,
                d_tt: tdma_tin_gdof(&alpha).value,
                gdof_ub: gdof_ub(&alpha).value,
                witness: verdict.witness_extended,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub beta: f64,
    pub step: f64,
    pub range_max: f64,
    pub tolerance: f64,
    pub points: usize,
    pub extended_points: usize,
    pub gsj_points: usize,
    /// Records with `gsj` but not `extended`; must be 0.
    pub inclusion_violations: usize,
    /// In-regime records whose `d_tt` and `gdof_ub` differ by more than 1e-12.
    pub equality_violations: usize,
}

impl SweepSummary {
    pub fn new(cfg: &SweepConfig, records: &[SweepRecord]) -> Self {
        SweepSummary {
            beta: cfg.beta,
            step: cfg.step,
            range_max: cfg.range_max,
            tolerance: cfg.tolerance,
            points: records.len(),
            extended_points: records.iter().filter(|r| r.extended).count(),
            gsj_points: records.iter().filter(|r| r.gsj).count(),
            inclusion_violations: records.iter().filter(|r| r.gsj && !r.extended).count(),
            equality_violations: records
                .iter()
                .filter(|r| r.extended && (r.d_tt - r.gdof_ub).abs() > GDOF_TOL)
                .count(),
        }
    }

    pub fn passed(&self) -> bool {
        self.inclusion_violations == 0 && self.equality_violations == 0
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Where random exponent matrices are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AlphaBox {
    /// All six entries i.i.d. uniform on `(0, max]`.
    Free { max: f64 },
    /// `α11 = α22 = 1`, `α13 = α23 = β` with `β ~ U(0.5, 1)`, and
    /// `α21, α12 ~ U(0, cross_max]`.
    Fig2Family { cross_max: f64 },
}

impl Default for AlphaBox {
    fn default() -> Self {
        AlphaBox::Free { max: 2.0 }
    }
}

/// Uniform on `(0, hi]`.
fn open_closed(rng: &mut ChaCha8Rng, hi: f64) -> f64 {
    hi - rng.random::<f64>() * hi
}

impl AlphaBox {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> AlphaMatrix {
        let rows = match *self {
            AlphaBox::Free { max } => {
                let mut rows = [[0.0; 3]; 2];
                for v in rows.iter_mut().flatten() {
                    *v = open_closed(rng, max);
                }
                rows
            }
            AlphaBox::Fig2Family { cross_max } => {
                let beta = 0.5 + 0.5 * rng.random::<f64>();
                let a21 = open_closed(rng, cross_max);
                let a12 = open_closed(rng, cross_max);
                [[1.0, a12, beta], [a21, 1.0, beta]]
            }
        };
        AlphaMatrix::new(rows).expect("box lies inside the valid exponent range")
    }

    fn validate(&self) -> Result<()> {
        let max = match *self {
            AlphaBox::Free { max } => max,
            AlphaBox::Fig2Family { cross_max } => cross_max,
        };
        if max > 0.0 && max <= DEFAULT_ALPHA_CAP {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "sampling box upper edge must lie in (0, {DEFAULT_ALPHA_CAP}], got {max}"
            )))
        }
    }
}

/// Deterministic per-sample generator.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One accepted draw from rejection sampling.
#[derive(Debug, Clone, Copy)]
pub struct RegimeDraw {
    pub alpha: AlphaMatrix,
    pub witness: TxPermutation,
    pub trials: u64,
}

/// Draws from `bx` until the extended regime holds.
pub fn draw_in_regime(bx: &AlphaBox, rng: &mut ChaCha8Rng) -> Result<RegimeDraw> {
    draw_in_regime_capped(bx, rng, MAX_TRIALS_PER_DRAW)
}

pub fn draw_in_regime_capped(
    bx: &AlphaBox,
    rng: &mut ChaCha8Rng,
    max_trials: u64,
) -> Result<RegimeDraw> {
    for trials in 1..=max_trials {
        let alpha = bx.sample(rng);
        if let Some(witness) = crate::regime::in_extended_regime(&alpha) {
            return Ok(RegimeDraw {
                alpha,
                witness,
                trials,
            });
        }
    }
    Err(Error::SamplerExhausted {
        accepted: 0,
        trials: max_trials,
    })
}

/// `n` in-regime draws, sample `k` taken from stream `k`.
pub fn draw_many_in_regime(n: usize, seed: u64, bx: &AlphaBox) -> Result<Vec<RegimeDraw>> {
    bx.validate()?;
    let draws = (0..n as u64)
        .into_par_iter()
        .map(|k| draw_in_regime(bx, &mut sample_rng(seed, k)))
        .collect::<Result<Vec<_>>>()?;
    let trials: u64 = draws.iter().map(|d| d.trials).sum();
    if trials >= MAX_TRIALS_PER_DRAW && (n as f64) / (trials as f64) < MIN_ACCEPTANCE {
        return Err(Error::SamplerExhausted {
            accepted: n as u64,
            trials,
        });
    }
    Ok(draws)
}

fn check_rho_list(rho_list: &[f64]) -> Result<()> {
    if rho_list.is_empty() {
        return Err(Error::InvalidArgument("rho list is empty".into()));
    }
    match rho_list.iter().find(|r| !(**r > 1.0 && r.is_finite())) {
        Some(&rho) => Err(Error::DegenerateSnr { rho }),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Constant-gap audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapAuditConfig {
    pub n: usize,
    pub rho_list: Vec<f64>,
    pub seed: u64,
    pub alpha_box: AlphaBox,
}

impl GapAuditConfig {
    /// `beta_free` selects the fully free box `(0, 2]⁶`; otherwise draws come
    /// from the β-family with cross exponents in `(0, 0.75]`.
    pub fn new(n: usize, rho_list: Vec<f64>, seed: u64, beta_free: bool) -> Self {
        GapAuditConfig {
            n,
            rho_list,
            seed,
            alpha_box: if beta_free {
                AlphaBox::Free { max: 2.0 }
            } else {
                AlphaBox::Fig2Family { cross_max: 0.75 }
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub sample: usize,
    pub rho: f64,
    pub gap_bits: f64,
    pub ub_bits: f64,
    pub rate_bits: f64,
}

impl Tabular for GapRow {
    fn header() -> &'static [&'static str] {
        &["sample", "rho", "gap_bits", "ub_bits", "rate_bits"]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.sample.to_string(),
            fmt_sig(self.rho),
            fmt_sig(self.gap_bits),
            fmt_sig(self.ub_bits),
            fmt_sig(self.rate_bits),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerRhoGap {
    pub rho: f64,
    pub max_gap_bits: f64,
    pub min_gap_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub generator: &'static str,
    pub seed: u64,
    pub n_samples: usize,
    pub rho_list: Vec<f64>,
    pub alpha_box: AlphaBox,
    pub trials: u64,
    pub max_gap_bits: f64,
    pub mean_gap_bits: f64,
    pub min_gap_bits: f64,
    pub argmax_alpha: AlphaMatrix,
    pub argmax_rho: f64,
    pub per_rho: Vec<PerRhoGap>,
    pub all_positive: bool,
    pub all_within_7: bool,
}

impl GapReport {
    pub fn passed(&self) -> bool {
        self.all_positive && self.all_within_7
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapAudit {
    pub report: GapReport,
    pub rows: Vec<GapRow>,
}

/// Gap between the bound and TDMA-TIN on one exponent matrix and SNR.
pub fn gap_row(sample: usize, rho: f64, alpha: &AlphaMatrix) -> GapRow {
    let ub_bits = sum_capacity_ub(rho, alpha).value;
    let rate_bits = tdma_tin_rate(rho, alpha).value;
    GapRow {
        sample,
        rho,
        gap_bits: ub_bits - rate_bits,
        ub_bits,
        rate_bits,
    }
}

pub fn gap_audit(cfg: &GapAuditConfig) -> Result<GapAudit> {
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    check_rho_list(&cfg.rho_list)?;
    let draws = draw_many_in_regime(cfg.n, cfg.seed, &cfg.alpha_box)?;
    let alphas: Vec<AlphaMatrix> = draws.iter().map(|d| d.alpha).collect();
    let trials = draws.iter().map(|d| d.trials).sum();
    gap_audit_on(cfg, &alphas, trials)
}

/// Gap audit over an explicit list of exponent matrices.
pub fn gap_audit_on(cfg: &GapAuditConfig, alphas: &[AlphaMatrix], trials: u64) -> Result<GapAudit> {
    check_rho_list(&cfg.rho_list)?;
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let rows: Vec<GapRow> = alphas
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, a)| cfg.rho_list.iter().map(move |&rho| gap_row(k, rho, a)))
        .collect();

    let worst = rows
        .iter()
        .copied()
        .reduce(|b, r| if r.gap_bits > b.gap_bits { r } else { b })
        .expect("non-empty");
    let per_rho = cfg
        .rho_list
        .iter()
        .map(|&rho| {
            let gaps = rows.iter().filter(|r| r.rho == rho).map(|r| r.gap_bits);
            PerRhoGap {
                rho,
                max_gap_bits: gaps.clone().fold(f64::NEG_INFINITY, f64::max),
                min_gap_bits: gaps.fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    let min_gap = rows.iter().map(|r| r.gap_bits).fold(f64::INFINITY, f64::min);
    let mean = rows.iter().map(|r| r.gap_bits).sum::<f64>() / rows.len() as f64;

    let report = GapReport {
        generator: GENERATOR,
        seed: cfg.seed,
        n_samples: alphas.len(),
        rho_list: cfg.rho_list.clone(),
        alpha_box: cfg.alpha_box,
        trials,
        max_gap_bits: worst.gap_bits,
        mean_gap_bits: mean,
        min_gap_bits: min_gap,
        argmax_alpha: alphas[worst.sample],
        argmax_rho: worst.rho,
        per_rho,
        all_positive: min_gap > 0.0,
        all_within_7: worst.gap_bits <= GAP_CLAIM_BITS,
    };
    Ok(GapAudit { report, rows })
}

// ---------------------------------------------------------------------------
// Sandwich audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RhoSource {
    /// Sample `k` uses `list[k % len]`.
    List(Vec<f64>),
    /// `log₁₀ρ` uniform on `[log₁₀ min, log₁₀ max]`.
    LogUniform { min: f64, max: f64 },
}

impl Default for RhoSource {
    fn default() -> Self {
        RhoSource::LogUniform { min: 10.0, max: 1e9 }
    }
}

impl RhoSource {
    fn validate(&self) -> Result<()> {
        match self {
            RhoSource::List(list) => check_rho_list(list),
            RhoSource::LogUniform { min, max } => {
                check_rho_list(&[*min, *max])?;
                if min <= max {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("rho range is empty".into()))
                }
            }
        }
    }

    fn pick(&self, k: usize, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            RhoSource::List(list) => list[k % list.len()],
            RhoSource::LogUniform { min, max } => {
                let (lo, hi) = (min.log10(), max.log10());
                10f64.powf(lo + (hi - lo) * rng.random::<f64>())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichConfig {
    pub n: usize,
    pub seed: u64,
    pub rho: RhoSource,
    pub alpha_box: AlphaBox,
}

impl SandwichConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        SandwichConfig {
            n,
            seed,
            rho: RhoSource::default(),
            alpha_box: AlphaBox::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichSample {
    pub rho: f64,
    pub alpha: AlphaMatrix,
    pub rate_bits: f64,
    pub ub_bits: f64,
    pub d_tt: f64,
    pub d_ub: f64,
}

impl SandwichSample {
    pub fn evaluate(rho: f64, alpha: AlphaMatrix) -> Self {
        SandwichSample {
            rho,
            alpha,
            rate_bits: tdma_tin_rate(rho, &alpha).value,
            ub_bits: sum_capacity_ub(rho, &alpha).value,
            d_tt: tdma_tin_gdof(&alpha).value,
            d_ub: gdof_ub(&alpha).value,
        }
    }

    pub fn rate_excess(&self) -> f64 {
        self.rate_bits - self.ub_bits
    }

    pub fn gdof_excess(&self) -> f64 {
        self.d_tt - self.d_ub
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub generator: &'static str,
    pub seed: u64,
    pub n_samples: usize,
    pub rate_tol_bits: f64,
    pub gdof_tol: f64,
    /// `max(R_TT − UB)`; negative when the bound always holds with margin.
    pub max_rate_excess_bits: f64,
    /// `max(d_TT − D_UB)`.
    pub max_gdof_excess: f64,
    pub rate_violations: usize,
    pub gdof_violations: usize,
    pub worst_rate_sample: SandwichSample,
    pub worst_gdof_sample: SandwichSample,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.rate_violations == 0 && self.gdof_violations == 0
    }
}

pub fn sandwich_audit(cfg: &SandwichConfig) -> Result<SandwichReport> {
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    cfg.rho.validate()?;
    cfg.alpha_box.validate()?;
    let samples: Vec<SandwichSample> = (0..cfg.n)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(cfg.seed, k as u64);
            let alpha = cfg.alpha_box.sample(&mut rng);
            let rho = cfg.rho.pick(k, &mut rng);
            SandwichSample::evaluate(rho, alpha)
        })
        .collect();

    let worst_by = |f: fn(&SandwichSample) -> f64| {
        samples
            .iter()
            .copied()
            .reduce(|b, s| if f(&s) > f(&b) { s } else { b })
            .expect("n >= 1")
    };
    let worst_rate = worst_by(SandwichSample::rate_excess);
    let worst_gdof = worst_by(SandwichSample::gdof_excess);
    Ok(SandwichReport {
        generator: GENERATOR,
        seed: cfg.seed,
        n_samples: cfg.n,
        rate_tol_bits: RATE_TOL_BITS,
        gdof_tol: GDOF_TOL,
        max_rate_excess_bits: worst_rate.rate_excess(),
        max_gdof_excess: worst_gdof.gdof_excess(),
        rate_violations: samples
            .iter()
            .filter(|s| s.rate_excess() > RATE_TOL_BITS)
            .count(),
        gdof_violations: samples
            .iter()
            .filter(|s| s.gdof_excess() > GDOF_TOL)
            .count(),
        worst_rate_sample: worst_rate,
        worst_gdof_sample: worst_gdof,
    })
}

// ---------------------------------------------------------------------------
// Convergence probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub rho: f64,
    pub rate_norm: f64,
    pub ub_norm: f64,
    pub d_tt: f64,
    pub d_ub: f64,
    /// `2 / log₂ρ`, the finite-SNR corridor around `d_tt`.
    pub corridor: f64,
}

impl Tabular for ConvergenceRow {
    fn header() -> &'static [&'static str] {
        &["rho", "rate_norm", "ub_norm", "d_tt", "d_ub", "corridor"]
    }

    fn row(&self) -> Vec<String> {
        vec![
            fmt_sig(self.rho),
            fmt_sig(self.rate_norm),
            fmt_sig(self.ub_norm),
            fmt_sig(self.d_tt),
            fmt_sig(self.d_ub),
            fmt_sig(self.corridor),
        ]
    }
}

/// Normalized rate and bound against their GDoF values, one row per SNR.
pub fn gdof_convergence_probe(alpha: &AlphaMatrix, rho_list: &[f64]) -> Result<Vec<ConvergenceRow>> {
    check_rho_list(rho_list)?;
    if rho_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("rho values must be increasing".into()));
    }
    let d_tt = tdma_tin_gdof(alpha).value;
    let d_ub = gdof_ub(alpha).value;
    Ok(rho_list
        .iter()
        .map(|&rho| {
            let l = rho.log2();
            ConvergenceRow {
                rho,
                rate_norm: tdma_tin_rate(rho, alpha).value / l,
                ub_norm: sum_capacity_ub(rho, alpha).value / l,
                d_tt,
                d_ub,
                corridor: 2.0 / l,
            }
        })
        .collect())
}
