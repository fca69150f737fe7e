use std::fmt;

use bondwh::Error;
use serde::Serialize;
use thiserror::Error as ThisError;

/// Pipeline stage an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Generate,
    Load,
    Interpolate,
    Returns,
    Estimate,
    Fit,
    Symbol,
    Factorize,
    Optimize,
    Arbitrage,
    Backtest,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Generate => "generate",
            Stage::Load => "load",
            Stage::Interpolate => "interpolate",
            Stage::Returns => "returns",
            Stage::Estimate => "estimate",
            Stage::Fit => "fit",
            Stage::Symbol => "symbol",
            Stage::Factorize => "factorize",
            Stage::Optimize => "optimize",
            Stage::Arbitrage => "arbitrage",
            Stage::Backtest => "backtest",
            Stage::Report => "report",
        };
        f.write_str(s)
    }
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("backtest window of {window} months needs at least {needed} dates, panel has {got}")]
    WindowTooShort { window: usize, needed: usize, got: usize },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Error,
    },

    /// A failure inside one backtest window.
    #[error("{source} (window ending {date})")]
    AtDate { date: String, source: Box<CliError> },
}

impl CliError {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            CliError::Stage { stage, .. } => Some(*stage),
            CliError::AtDate { source, .. } => source.stage(),
            _ => None,
        }
    }

    /// 2 for configuration and input validation, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::WindowTooShort { .. } => 2,
            CliError::Stage { stage, source } => match (stage, source) {
                (Stage::Load | Stage::Generate | Stage::Report, _) => 2,
                (_, Error::GridOutOfRange { .. }) => 2,
                _ => 3,
            },
            CliError::AtDate { source, .. } => source.exit_code(),
        }
    }
}

/// Attaches a stage to a core result.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, CliError>;
}

impl<T> StageExt<T> for bondwh::Result<T> {
    fn stage(self, stage: Stage) -> Result<T, CliError> {
        self.map_err(|source| CliError::Stage { stage, source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        let e: Result<(), _> = Err::<(), _>(Error::RootOnCircle { modulus: 1.0 }).stage(Stage::Factorize);
        let e = e.unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert_eq!(e.stage(), Some(Stage::Factorize));
        assert!(e.to_string().starts_with("stage factorize:"));
        let grid = Error::GridOutOfRange {
            months: 400.0,
            min: 0.1,
            max: 30.0,
        };
        assert_eq!(Err::<(), _>(grid).stage(Stage::Interpolate).unwrap_err().exit_code(), 2);
    }
}
