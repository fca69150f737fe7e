//! Run configuration: a TOML document overlaid by command-line flags.
//!
//! ```toml
//! input = "curves.csv"          # relative paths resolve against this file
//! out = "out"
//! format = "csv"                # or "json"
//! grid = "2..41"                # inclusive months, or an explicit list
//! max_lag = 33
//! pade = [0, 5, 28]             # M, N, K
//! trunc = 240
//! gamma = 0.5                   # or sum_to_one = true
//! threshold = 2.0               # near-arbitrage level C
//! seed = 42
//!
//! [backtest]
//! mode = "walk-forward"         # or "fit-once"
//! window = 36
//!
//! [generate]                    # synthetic panel parameters
//! dates = 500
//! maturities = 40
//! correlation_decay = 0.9
//!
//! [model]                       # skip estimation and fitting
//! chat_numerator = [1.0]
//! chat_denominator = [1.0, -0.5]
//! expect_e0 = 1.0
//! expect_beta = 0.25
//! ```

use std::path::{Path, PathBuf};

use bondwh::corrfit::PadeOrder;
use bondwh::synthetic::SyntheticConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Sizing {
    Gamma(f64),
    SumToOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BacktestMode {
    WalkForward,
    FitOnce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestConfig {
    pub mode: BacktestMode,
    /// Trailing months used for each walk-forward fit.
    pub window: usize,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            mode: BacktestMode::WalkForward,
            window: 36,
        }
    }
}

/// Correlation function and expectations given directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Ascending coefficients of the numerator of `C(z)`.
    pub chat_numerator: Vec<f64>,
    pub chat_denominator: Vec<f64>,
    /// Normalized expectations `E(t)`; alternatively `expect_e0 * expect_beta^t`.
    #[serde(default)]
    pub expectations: Option<Vec<f64>>,
    #[serde(default)]
    pub expect_e0: Option<f64>,
    #[serde(default)]
    pub expect_beta: Option<f64>,
    /// Length of the geometric expectations; defaults to the truncation.
    #[serde(default)]
    pub maturities: Option<usize>,
}

impl ModelConfig {
    pub fn expectations(&self, trunc: usize) -> Result<Vec<f64>, CliError> {
        match (&self.expectations, self.expect_e0, self.expect_beta) {
            (Some(e), None, None) => Ok(e.clone()),
            (None, Some(e0), beta) => {
                let beta = beta.unwrap_or(0.0);
                let n = self.maturities.unwrap_or(trunc);
                Ok((0..n).map(|k| e0 * beta.powi(k as i32)).collect())
            }
            _ => Err(CliError::Config(
                "model needs either `expectations` or `expect_e0` (with optional `expect_beta`)".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Range(String),
    List(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum PadeSpec {
    Text(String),
    List(Vec<usize>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<Format>,
    grid: Option<GridSpec>,
    max_lag: Option<usize>,
    pade: Option<PadeSpec>,
    trunc: Option<usize>,
    gamma: Option<f64>,
    sum_to_one: Option<bool>,
    threshold: Option<f64>,
    seed: Option<u64>,
    backtest: Option<BacktestConfig>,
    generate: Option<SyntheticConfig>,
    model: Option<ModelConfig>,
}

/// Values given on the command line; each one replaces the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<String>,
    pub pade: Option<String>,
    pub gamma: Option<f64>,
    pub sum_to_one: bool,
    pub threshold: Option<f64>,
    pub trunc: Option<usize>,
    pub format: Option<Format>,
    pub max_lag: Option<usize>,
    pub window: Option<usize>,
    pub fit_once: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub format: Format,
    pub grid: Vec<u32>,
    pub max_lag: usize,
    pub pade: PadeOrder,
    pub trunc: usize,
    pub sizing: Sizing,
    pub threshold: f64,
    pub backtest: BacktestConfig,
    pub generate: SyntheticConfig,
    pub model: Option<ModelConfig>,
}

pub const DEFAULT_MAX_LAG: usize = 33;
pub const DEFAULT_PADE: (usize, usize, usize) = (0, 5, 28);
pub const DEFAULT_TRUNC: usize = 240;
pub const DEFAULT_GAMMA: f64 = 0.5;
/// Illustrative near-arbitrage level; the right value is a judgement about
/// investors' risk aversion and should be set per study.
pub const DEFAULT_THRESHOLD: f64 = 2.0;

/// Parses `a..b` or `a..=b` (both inclusive of `b`).
pub fn parse_grid(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Config(format!("grid `{s}` is not of the form start..end"));
    let (a, b) = s.trim().split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if b < a {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

/// Parses `M,N,K` (or `M,N` for a classical order).
pub fn parse_pade(s: &str) -> Result<(usize, usize, usize), CliError> {
    let parts: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match parts.as_deref() {
        Ok([m, n]) => Ok((*m, *n, 0)),
        Ok([m, n, k]) => Ok((*m, *n, *k)),
        _ => Err(CliError::Config(format!("Padé order `{s}` is not of the form M,N,K"))),
    }
}

fn pade_from_list(v: &[usize]) -> Result<(usize, usize, usize), CliError> {
    match v {
        [m, n] => Ok((*m, *n, 0)),
        [m, n, k] => Ok((*m, *n, *k)),
        _ => Err(CliError::Config(format!(
            "Padé order {v:?} must have two or three entries"
        ))),
    }
}

impl RunConfig {
    /// Reads the optional config file, applies the flag overrides and validates.
    pub fn load(ov: &Overrides) -> Result<Self, CliError> {
        let (file, base) = match &ov.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let parsed: ConfigFile =
                    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                (parsed, path.parent().map(Path::to_path_buf))
            }
            None => (ConfigFile::default(), None),
        };
        let rel = |p: PathBuf| match &base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p,
        };

        let mut generate = file.generate.unwrap_or_default();
        if let Some(seed) = ov.seed.or(file.seed) {
            generate.seed = seed;
        }

        let grid = match (&ov.grid, file.grid) {
            (Some(s), _) => parse_grid(s)?,
            (None, Some(GridSpec::Range(s))) => parse_grid(&s)?,
            (None, Some(GridSpec::List(v))) => v,
            (None, None) => generate.grid(),
        };
        let (m, n, k) = match (&ov.pade, file.pade) {
            (Some(s), _) => parse_pade(s)?,
            (None, Some(PadeSpec::Text(s))) => parse_pade(&s)?,
            (None, Some(PadeSpec::List(v))) => pade_from_list(&v)?,
            (None, None) => DEFAULT_PADE,
        };
        if n == 0 {
            return Err(CliError::Config("Padé denominator degree N must be at least 1".into()));
        }
        let pade = PadeOrder::new(m, n, k).map_err(|e| CliError::Config(e.to_string()))?;

        let sizing = if let Some(g) = ov.gamma {
            Sizing::Gamma(g)
        } else if ov.sum_to_one {
            Sizing::SumToOne
        } else {
            match (file.gamma, file.sum_to_one.unwrap_or(false)) {
                (Some(_), true) => return Err(CliError::Config("set either `gamma` or `sum_to_one`, not both".into())),
                (_, true) => Sizing::SumToOne,
                (g, false) => Sizing::Gamma(g.unwrap_or(DEFAULT_GAMMA)),
            }
        };

        let mut backtest = file.backtest.unwrap_or_default();
        if let Some(w) = ov.window {
            backtest.window = w;
        }
        if ov.fit_once {
            backtest.mode = BacktestMode::FitOnce;
        }

        let cfg = RunConfig {
            input: ov.input.clone().or(file.input.map(&rel)),
            out: ov
                .out
                .clone()
                .or(file.out.map(&rel))
                .unwrap_or_else(|| PathBuf::from("out")),
            format: ov.format.or(file.format).unwrap_or(Format::Csv),
            grid,
            max_lag: ov.max_lag.or(file.max_lag).unwrap_or(DEFAULT_MAX_LAG),
            pade,
            trunc: ov.trunc.or(file.trunc).unwrap_or(DEFAULT_TRUNC),
            sizing,
            threshold: ov.threshold.or(file.threshold).unwrap_or(DEFAULT_THRESHOLD),
            backtest,
            generate,
            model: file.model,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked before touching data.
    pub fn validate(&self) -> Result<(), CliError> {
        let err = |m: String| Err(CliError::Config(m));
        if self.pade.n == 0 {
            return err("Padé denominator degree N must be at least 1".into());
        }
        let mn = self.pade.m + self.pade.n;
        if self.trunc < 4 * mn {
            return err(format!("truncation {} is below 4 (M + N) = {}", self.trunc, 4 * mn));
        }
        if let Sizing::Gamma(g) = self.sizing {
            if !(g > 0.0 && g.is_finite()) {
                return err(format!("gamma must be positive, got {g}"));
            }
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return err(format!("threshold must be positive, got {}", self.threshold));
        }
        if let Some(model) = &self.model {
            if model.chat_denominator.iter().all(|&c| c == 0.0) {
                return err("model denominator is zero".into());
            }
            let e = model.expectations(self.trunc)?;
            if e.is_empty() || e.len() > self.trunc {
                return err(format!(
                    "model has {} expectations for truncation {}",
                    e.len(),
                    self.trunc
                ));
            }
            return Ok(());
        }
        if self.grid.len() < 2 {
            return err(format!(
                "maturity grid needs at least 2 maturities, got {}",
                self.grid.len()
            ));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return err("maturity grid must be strictly increasing".into());
        }
        if self.max_lag + 2 > self.grid.len() {
            return err(format!(
                "max_lag {} needs at least {} maturities, grid has {}",
                self.max_lag,
                self.max_lag + 2,
                self.grid.len()
            ));
        }
        if self.pade.coefficients_used() > self.max_lag + 1 {
            return err(format!(
                "Padé order [{}/{}/{}] uses {} correlation lags, max_lag {} provides {}",
                self.pade.m,
                self.pade.n,
                self.pade.k,
                self.pade.coefficients_used(),
                self.max_lag,
                self.max_lag + 1
            ));
        }
        if self.trunc < self.grid.len() {
            return err(format!(
                "truncation {} is below the grid size {}",
                self.trunc,
                self.grid.len()
            ));
        }
        if self.backtest.window < 2 {
            return err(format!(
                "backtest window must be at least 2 months, got {}",
                self.backtest.window
            ));
        }
        Ok(())
    }

    /// The input file, which must exist.
    pub fn input_path(&self) -> Result<&Path, CliError> {
        let p = self
            .input
            .as_deref()
            .ok_or_else(|| CliError::Config("no input file given (use --input or `input`)".into()))?;
        if !p.is_file() {
            return Err(CliError::Config(format!("input file {} does not exist", p.display())));
        }
        Ok(p)
    }
}
