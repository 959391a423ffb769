//! Channel parametrization: gains and SNR versus GDoF exponents.
//!
//! A link Tx i → Rx j with complex gain `h` at transmit SNR `rho` has the
//! exponent `α = log₂(ρ|h|²) / log₂ρ`, so that `ρ|h|² = ρ^α`. Only `|h|²`
//! enters any formula downstream; gain phases are carried along but unused.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RX: usize = 2;
pub const TX: usize = 3;

/// Largest exponent accepted by default. Keeps `ρ^α` finite at the audit SNRs.
pub const DEFAULT_ALPHA_CAP: f64 = 4.0;

/// Complex channel coefficient stored as `(re, im)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gain {
    pub re: f64,
    pub im: f64,
}

impl Gain {
    pub const fn new(re: f64, im: f64) -> Self {
        Gain { re, im }
    }

    /// Real gain with the given power `|h|²`.
    pub fn from_power(power: f64) -> Self {
        Gain::new(power.sqrt(), 0.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// `ρ = 10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(rho: f64) -> f64 {
    10.0 * rho.log10()
}

fn check_rho(rho: f64) -> Result<()> {
    // NaN fails the comparison too
    if rho > 1.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateSnr { rho })
    }
}

/// Exponent of a single link: `log₂(ρ|h|²) / log₂ρ`.
pub fn alpha_from_gain(h: Gain, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let inr = rho * h.norm_sq();
    if !(inr > 1.0) {
        return Err(Error::NotInterferenceLimited { rx: 0, tx: 0, inr });
    }
    Ok(inr.log2() / rho.log2())
}

/// `ρ^α`, the received power of a link with exponent `α` relative to noise.
#[inline]
pub fn effective_inr(rho: f64, alpha: f64) -> f64 {
    debug_assert!(rho > 1.0 && alpha >= 0.0);
    rho.powf(alpha)
}

/// The 2×3 grid of exponents α_{ji}; row `j` is receiver `j`, column `i`
/// is transmitter `i`.
///
/// Entries are always finite and nonnegative. Matrices built with
/// [`AlphaMatrix::new`] additionally have strictly positive entries, as the
/// interference-limited model requires; [`AlphaMatrix::limit`] admits zeros,
/// which only makes sense for GDoF-level (ρ → ∞) analysis such as regime
/// sweeps whose axes start at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlphaMatrix([[f64; TX]; RX]);

impl AlphaMatrix {
    /// Strictly positive entries, capped at [`DEFAULT_ALPHA_CAP`].
    pub fn new(rows: [[f64; TX]; RX]) -> Result<Self> {
        Self::with_cap(rows, DEFAULT_ALPHA_CAP)
    }

    pub fn with_cap(rows: [[f64; TX]; RX], cap: f64) -> Result<Self> {
        Self::build(rows, cap, true)
    }

    /// Nonnegative entries (zeros admitted), capped at [`DEFAULT_ALPHA_CAP`].
    pub fn limit(rows: [[f64; TX]; RX]) -> Result<Self> {
        Self::build(rows, DEFAULT_ALPHA_CAP, false)
    }

    fn build(rows: [[f64; TX]; RX], cap: f64, strict: bool) -> Result<Self> {
        for (j, row) in rows.iter().enumerate() {
            for (i, &value) in row.iter().enumerate() {
                let reason = if !value.is_finite() {
                    Some("not finite")
                } else if value < 0.0 || (strict && value == 0.0) {
                    Some(if strict {
                        "must be > 0 (interference-limited links)"
                    } else {
                        "must be >= 0"
                    })
                } else if value > cap {
                    Some("exceeds the configured alpha cap")
                } else {
                    None
                };
                if let Some(reason) = reason {
                    return Err(Error::InvalidAlpha {
                        rx: j + 1,
                        tx: i + 1,
                        value,
                        reason,
                    });
                }
            }
        }
        Ok(AlphaMatrix(rows))
    }

    /// Parses six comma-separated entries `a11,a12,a13,a21,a22,a23`.
    pub fn parse_flat(s: &str) -> Result<Self> {
        let vals = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidArgument(format!("alpha list `{s}`: {e}")))?;
        if vals.len() != RX * TX {
            return Err(Error::InvalidArgument(format!(
                "alpha list needs 6 entries, got {}",
                vals.len()
            )));
        }
        Self::new([[vals[0], vals[1], vals[2]], [vals[3], vals[4], vals[5]]])
    }

    /// α_{rx,tx} with 1-based labels (`rx ∈ 1..=2`, `tx ∈ 1..=3`).
    #[inline]
    pub fn get(&self, rx: usize, tx: usize) -> f64 {
        self.0[rx - 1][tx - 1]
    }

    pub fn rows(&self) -> &[[f64; TX]; RX] {
        &self.0
    }

    /// Relabels transmitters: column `i` of the result is column `sigma[i]`
    /// of `self` (0-based).
    pub fn permute_tx(&self, sigma: [usize; TX]) -> Self {
        let mut out = [[0.0; TX]; RX];
        for (j, row) in out.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                *v = self.0[j][sigma[i]];
            }
        }
        AlphaMatrix(out)
    }

    /// Swaps the two receiver labels.
    pub fn swap_rx(&self) -> Self {
        AlphaMatrix([self.0[1], self.0[0]])
    }
}

impl fmt::Display for AlphaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [r1, r2] = &self.0;
        write!(
            f,
            "[[{}, {}, {}], [{}, {}, {}]]",
            r1[0], r1[1], r1[2], r2[0], r2[1], r2[2]
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    Gains([[Gain; TX]; RX]),
    Alpha([[f64; TX]; RX]),
}

/// Transmit SNR plus either raw gains or exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelScenario {
    pub rho: f64,
    pub channel: ChannelSpec,
}

impl ChannelScenario {
    pub fn from_gains(rho: f64, gains: [[Gain; TX]; RX]) -> Self {
        ChannelScenario {
            rho,
            channel: ChannelSpec::Gains(gains),
        }
    }

    pub fn from_alpha(rho: f64, alpha: [[f64; TX]; RX]) -> Self {
        ChannelScenario {
            rho,
            channel: ChannelSpec::Alpha(alpha),
        }
    }

    pub fn gains(&self) -> Option<&[[Gain; TX]; RX]> {
        match &self.channel {
            ChannelSpec::Gains(g) => Some(g),
            ChannelSpec::Alpha(_) => None,
        }
    }

    /// Parses the JSON scenario format:
    /// `{"rho_db": x, "gains": [[[re,im] x3] x2]}` or
    /// `{"rho_db": x, "alpha": [[a11,a12,a13],[a21,a22,a23]]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        file.try_into()
    }

    pub fn load(path: &Path) -> std::io::Result<std::result::Result<Self, Error>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_json(&text))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    rho_db: f64,
    gains: Option<[[[f64; 2]; TX]; RX]>,
    alpha: Option<[[f64; TX]; RX]>,
}

impl TryFrom<ScenarioFile> for ChannelScenario {
    type Error = Error;

    fn try_from(file: ScenarioFile) -> Result<Self> {
        let rho = db_to_linear(file.rho_db);
        match (file.gains, file.alpha) {
            (Some(g), None) => Ok(ChannelScenario::from_gains(
                rho,
                g.map(|row| row.map(|[re, im]| Gain::new(re, im))),
            )),
            (None, Some(a)) => Ok(ChannelScenario::from_alpha(rho, a)),
            (Some(_), Some(_)) => Err(Error::Scenario(
                "exactly one of `gains` and `alpha` may be given, found both".into(),
            )),
            (None, None) => Err(Error::Scenario(
                "exactly one of `gains` and `alpha` must be given, found neither".into(),
            )),
        }
    }
}

/// Checks the model assumptions and materializes the exponent matrix.
pub fn validate_scenario(s: &ChannelScenario) -> Result<AlphaMatrix> {
    validate_scenario_with_cap(s, DEFAULT_ALPHA_CAP)
}

pub fn validate_scenario_with_cap(s: &ChannelScenario, cap: f64) -> Result<AlphaMatrix> {
    check_rho(s.rho)?;
    match &s.channel {
        ChannelSpec::Alpha(a) => AlphaMatrix::with_cap(*a, cap),
        ChannelSpec::Gains(g) => {
            let mut rows = [[0.0; TX]; RX];
            for j in 0..RX {
                for i in 0..TX {
                    rows[j][i] = alpha_from_gain(g[j][i], s.rho).map_err(|e| match e {
                        Error::NotInterferenceLimited { inr, .. } => {
                            Error::NotInterferenceLimited {
                                rx: j + 1,
                                tx: i + 1,
                                inr,
                            }
                        }
                        other => other,
                    })?;
                }
            }
            AlphaMatrix::with_cap(rows, cap)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn alpha_from_gain_examples() {
        let a = alpha_from_gain(Gain::from_power(0.1), 100.0).unwrap();
        // mpmath: log2(10)/log2(100) = 0.5
        assert!(close(a, 0.5, 1e-15), "{a}");
        assert_eq!(alpha_from_gain(Gain::new(1.0, 0.0), 100.0).unwrap(), 1.0);
        assert!(matches!(
            alpha_from_gain(Gain::from_power(0.005), 100.0),
            Err(Error::NotInterferenceLimited { .. })
        ));
        assert!(matches!(
            alpha_from_gain(Gain::new(1.0, 0.0), 1.0),
            Err(Error::DegenerateSnr { .. })
        ));
        assert!(matches!(
            alpha_from_gain(Gain::new(0.0, 0.0), 100.0),
            Err(Error::NotInterferenceLimited { .. })
        ));
    }

    #[test]
    fn phase_does_not_matter() {
        let a = alpha_from_gain(Gain::new(0.0, 0.5), 1e4).unwrap();
        let b = alpha_from_gain(Gain::new(-0.5, 0.0), 1e4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn effective_inr_examples() {
        assert!(close(effective_inr(100.0, 0.5), 10.0, 1e-15));
        assert_eq!(effective_inr(100.0, 0.0), 1.0);
        assert!(close(effective_inr(1e4, 0.75), 1000.0, 1e-14));
    }

    #[test]
    fn validate_all_unit_gains() {
        let s = ChannelScenario::from_gains(100.0, [[Gain::new(1.0, 0.0); 3]; 2]);
        assert_eq!(validate_scenario(&s).unwrap().rows(), &[[1.0; 3]; 2]);
    }

    #[test]
    fn validate_alpha_identity() {
        let rows = [[1.0, 0.2, 0.75], [0.4, 1.0, 0.75]];
        let s = ChannelScenario::from_alpha(100.0, rows);
        assert_eq!(validate_scenario(&s).unwrap().rows(), &rows);
    }

    #[test]
    fn validate_names_offending_entry() {
        let mut g = [[Gain::new(1.0, 0.0); 3]; 2];
        g[1][0] = Gain::from_power(0.009);
        let err = validate_scenario(&ChannelScenario::from_gains(100.0, g)).unwrap_err();
        match err {
            Error::NotInterferenceLimited { rx, tx, inr } => {
                assert_eq!((rx, tx), (2, 1));
                assert!(close(inr, 0.9, 1e-12));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn validate_rejects_low_snr() {
        let s = ChannelScenario::from_alpha(0.5, [[1.0; 3]; 2]);
        assert!(matches!(validate_scenario(&s), Err(Error::DegenerateSnr { .. })));
    }

    #[test]
    fn alpha_matrix_rejects_bad_entries() {
        assert!(AlphaMatrix::new([[1.0, 0.0, 1.0], [1.0; 3]]).is_err());
        assert!(AlphaMatrix::limit([[1.0, 0.0, 1.0], [1.0; 3]]).is_ok());
        assert!(AlphaMatrix::limit([[1.0, -0.1, 1.0], [1.0; 3]]).is_err());
        assert!(AlphaMatrix::new([[1.0, f64::NAN, 1.0], [1.0; 3]]).is_err());
        assert!(AlphaMatrix::new([[1.0, 4.5, 1.0], [1.0; 3]]).is_err());
        assert!(AlphaMatrix::with_cap([[1.0, 4.5, 1.0], [1.0; 3]], 5.0).is_ok());
        match AlphaMatrix::new([[1.0; 3], [1.0, 1.0, 9.0]]) {
            Err(Error::InvalidAlpha { rx: 2, tx: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_flat_alpha() {
        let a = AlphaMatrix::parse_flat("1,0.2,0.75, 0.4,1,0.75").unwrap();
        assert_eq!(a.get(2, 1), 0.4);
        assert_eq!(a.get(1, 3), 0.75);
        assert!(AlphaMatrix::parse_flat("1,2,3").is_err());
        assert!(AlphaMatrix::parse_flat("1,2,x,1,1,1").is_err());
    }

    #[test]
    fn scenario_json_forms() {
        let s = ChannelScenario::from_json(r#"{"rho_db": 20, "alpha": [[1,0.2,0.75],[0.4,1,0.75]]}"#)
            .unwrap();
        assert!(close(s.rho, 100.0, 1e-14));
        let s = ChannelScenario::from_json(
            r#"{"rho_db": 20, "gains": [[[1,0],[0.1,0.2],[0,1]],[[0.5,0.5],[1,0],[0.3,0]]]}"#,
        )
        .unwrap();
        assert_eq!(s.gains().unwrap()[0][1], Gain::new(0.1, 0.2));

        for bad in [
            r#"{"rho_db": 20}"#,
            r#"{"rho_db": 20, "alpha": [[1,1,1],[1,1,1]], "gains": [[[1,0],[1,0],[1,0]],[[1,0],[1,0],[1,0]]]}"#,
            r#"{"rho_db": 20, "alpha": [[1,1],[1,1]]}"#,
            r#"{"alpha": [[1,1,1],[1,1,1]]}"#,
            r#"{"rho_db": 20, "alpha": [[1,1,1],[1,1,1]], "extra": 1}"#,
            "not json",
        ] {
            assert!(
                matches!(ChannelScenario::from_json(bad), Err(Error::Scenario(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn relabelings() {
        let a = AlphaMatrix::new([[1.0, 0.2, 0.75], [0.4, 1.0, 0.75]]).unwrap();
        let p = a.permute_tx([2, 0, 1]);
        assert_eq!(p.rows(), &[[0.75, 1.0, 0.2], [0.75, 0.4, 1.0]]);
        assert_eq!(a.swap_rx().swap_rx(), a);
        assert_eq!(a.swap_rx().get(1, 1), 0.4);
    }
}
