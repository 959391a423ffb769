use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("transmit SNR must exceed 1 (got {rho})")]
    DegenerateSnr { rho: f64 },

    #[error("link Tx{tx} -> Rx{rx} is not interference limited: rho*|h|^2 = {inr} <= 1")]
    NotInterferenceLimited { rx: usize, tx: usize, inr: f64 },

    #[error("alpha entry ({rx},{tx}) = {value} is invalid: {reason}")]
    InvalidAlpha {
        rx: usize,
        tx: usize,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid index tuple: {0}")]
    InvalidIndex(String),

    #[error("case formula does not apply: {0}")]
    CaseMismatch(&'static str),

    #[error("Lemma-2 check not applicable: genie flag d = 0 for this permutation")]
    NotApplicable,

    #[error("beta must lie in [0.5, 1) (got {0})")]
    InvalidBeta(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rejection sampler exhausted: {accepted} accepted out of {trials} trials")]
    SamplerExhausted { accepted: u64, trials: u64 },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("format `{0}` is not supported for this output")]
    UnsupportedFormat(String),
}
