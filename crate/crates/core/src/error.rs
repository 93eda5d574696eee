use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every constraint a configuration violated, collected in one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl ConfigError {
    pub fn single(msg: impl Into<String>) -> Self {
        Self {
            violations: vec![msg.into()],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.violations.join("; "))
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("signals are sampled on different time grids")]
    GridMismatch,
    #[error("slot {slot} is not covered by the signal (covers {start_ms}..{end_ms} ms)")]
    SlotOutOfRange {
        slot: usize,
        start_ms: f64,
        end_ms: f64,
    },
    #[error("bit sequences differ in length ({tx} vs {rx})")]
    LengthMismatch { tx: usize, rx: usize },
    #[error("numerical instability at t = {t_ms} ms (step too large?)")]
    NumericalInstability { t_ms: f64 },
    #[error("invalid spike train: {0}")]
    InvalidSpikeTrain(String),
    #[error("expected one concentration trace per device ({expected}), got {got}")]
    DeviceCount { expected: usize, got: usize },
    #[error("invalid bit string: {0}")]
    InvalidBits(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
