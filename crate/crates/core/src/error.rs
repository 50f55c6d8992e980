use std::fmt;

use thiserror::Error;

/// Stage of the trace fitting pipeline an error originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    DelayRemoval,
    Normalization,
    CircleFit,
    PhaseFit,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::DelayRemoval => "delay removal",
            Stage::Normalization => "off-resonant normalization",
            Stage::CircleFit => "circle fit",
            Stage::PhaseFit => "phase fit",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("measurement mode mismatch: expected {expected}, got {found}")]
    ModeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// The leakage phasor sits on the single pole of the normalizing transform (b = 0.5, phi = pi).
    #[error("degenerate normalization: 1 + b~ e^(i phi) vanishes")]
    DegenerateNormalization,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("cable delay estimation failed ({reason}); best estimate {best_delay:e} s")]
    DelayEstimation { best_delay: f64, reason: String },

    #[error("off-resonant normalization failed: {0}")]
    Normalization(String),

    #[error("phase fit failed: {0}")]
    PhaseFit(String),

    #[error("leakage bound b = {b} is below the minimum consistent amplitude b_min = {b_min}")]
    InfeasibleBound { b: f64, b_min: f64 },

    #[error("centerpoint circle diverges for b~ = {b_tilde} (requires b < 0.5)")]
    DivergentGeometry { b_tilde: f64 },

    #[error("trajectory circle implies b~ = {b_tilde} >= 1, no physical leakage amplitude")]
    InfeasibleCalibration { b_tilde: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, with pipeline stage tags stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
