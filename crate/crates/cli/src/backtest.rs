//! Out-of-sample comparison of the optimal and uncorrelated sum-to-one portfolios.
//!
//! The portfolio held over month `s` is formed from the curve at `s` and the
//! correlation structure fitted on returns observed before `s` (walk-forward)
//! or on the whole panel (fit-once), and earns `sum_t X(t) R(t, s)`.

use serde::Serialize;

use crate::config::{BacktestMode, RunConfig};
use crate::error::CliError;
use crate::pipeline::{self, Market};

/// Minimum number of return dates for a backtest.
pub const MIN_DATES: usize = 13;
pub const ANNUALIZATION: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestRow {
    pub date: String,
    /// Annualized (`x 12`) monthly log return.
    pub optimal: f64,
    pub benchmark: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnStats {
    pub mean: f64,
    pub std: f64,
    pub variance: f64,
    pub min: f64,
}

impl ReturnStats {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let variance = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std: variance.sqrt(),
            variance,
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BacktestReport {
    pub mode: BacktestMode,
    pub window: Option<usize>,
    pub rows: Vec<BacktestRow>,
    pub optimal: ReturnStats,
    pub benchmark: ReturnStats,
}

fn realized(x: &[f64], returns: &[f64]) -> f64 {
    x.iter().zip(returns).map(|(a, b)| a * b).sum::<f64>() * ANNUALIZATION
}

fn at(date: &str) -> impl FnOnce(CliError) -> CliError + '_ {
    move |e| CliError::AtDate {
        date: date.to_string(),
        source: Box::new(e),
    }
}

pub fn run_backtest(market: &Market, cfg: &RunConfig) -> Result<BacktestReport, CliError> {
    let panel = &market.panel;
    let n = panel.n_dates();
    let (first, window) = match cfg.backtest.mode {
        BacktestMode::WalkForward => (cfg.backtest.window, Some(cfg.backtest.window)),
        BacktestMode::FitOnce => (0, None),
    };
    let needed = MIN_DATES.max(first + 1);
    if n < needed {
        return Err(CliError::WindowTooShort {
            window: first,
            needed,
            got: n,
        });
    }

    let mut rows = Vec::with_capacity(n - first);
    match cfg.backtest.mode {
        BacktestMode::FitOnce => {
            let est = pipeline::estimate(panel, cfg)?;
            let fit = pipeline::fit(&est, cfg)?;
            let sym = pipeline::symbol(&fit.rational, cfg)?;
            let fac = pipeline::factorization(&sym)?;
            for s in 0..n {
                let date = &panel.dates[s];
                let e = pipeline::market_expectations(&market.curves[s], panel, &cfg.grid).map_err(at(date))?;
                let (x, b) = pipeline::sum_to_one_pair(&sym, &fac, &e, cfg.trunc).map_err(at(date))?;
                rows.push(BacktestRow {
                    date: date.clone(),
                    optimal: realized(&x, &panel.returns[s]),
                    benchmark: realized(&b, &panel.returns[s]),
                });
            }
        }
        BacktestMode::WalkForward => {
            for s in first..n {
                let date = &panel.dates[s];
                let step = || -> Result<BacktestRow, CliError> {
                    let hist = panel.window(s - first..s).map_err(|e| CliError::Stage {
                        stage: crate::error::Stage::Backtest,
                        source: e,
                    })?;
                    let est = pipeline::estimate(&hist, cfg)?;
                    let fit = pipeline::fit(&est, cfg)?;
                    let sym = pipeline::symbol(&fit.rational, cfg)?;
                    let fac = pipeline::factorization(&sym)?;
                    let e = pipeline::market_expectations(&market.curves[s], &hist, &cfg.grid)?;
                    let (x, b) = pipeline::sum_to_one_pair(&sym, &fac, &e, cfg.trunc)?;
                    Ok(BacktestRow {
                        date: date.clone(),
                        optimal: realized(&x, &panel.returns[s]),
                        benchmark: realized(&b, &panel.returns[s]),
                    })
                };
                rows.push(step().map_err(at(date))?);
            }
        }
    }
    let opt: Vec<f64> = rows.iter().map(|r| r.optimal).collect();
    let bench: Vec<f64> = rows.iter().map(|r| r.benchmark).collect();
    Ok(BacktestReport {
        mode: cfg.backtest.mode,
        window,
        optimal: ReturnStats::of(&opt),
        benchmark: ReturnStats::of(&bench),
        rows,
    })
}
