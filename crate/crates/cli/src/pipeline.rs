//! The individual pipeline stages, each tagging its failures.

use bondwh::arbitrage::{arbitrage_report, invertibility_check, ArbitrageReport};
use bondwh::corrfit::{estimate_correlation, pade_generalized, CorrelationEstimate, PadeFit};
use bondwh::laurent::{Polynomial, RationalFunction};
use bondwh::marketdata::{
    compute_returns, expected_returns_static, load_curves, variance_estimates, ReturnPanel, YieldCurve,
};
use bondwh::portfolio::{
    benchmark_uncorrelated, normalize_expectations, optimize, sum_to_one, Allocation, NormalizedExpectations,
};
use bondwh::wienerhopf::{build_symbol, factorize, Factorization, SymbolSpectrum};
use bondwh::Error;

use crate::config::{RunConfig, Sizing};
use crate::error::{CliError, Stage, StageExt};

/// Risk aversion used before rescaling to a unit net position; the
/// rescaled portfolio does not depend on it.
const SUM_TO_ONE_GAMMA: f64 = 0.5;

pub struct Market {
    pub curves: Vec<YieldCurve<f64>>,
    pub panel: ReturnPanel<f64>,
}

fn returns_stage(e: &Error) -> Stage {
    match e {
        Error::GridOutOfRange { .. } => Stage::Interpolate,
        _ => Stage::Returns,
    }
}

/// Loads the curve file and builds the return panel on the configured grid.
pub fn load_market(cfg: &RunConfig) -> Result<Market, CliError> {
    let curves = load_curves(cfg.input_path()?).stage(Stage::Load)?;
    let panel = compute_returns(&curves, &cfg.grid).map_err(|e| CliError::Stage {
        stage: returns_stage(&e),
        source: e,
    })?;
    Ok(Market { curves, panel })
}

pub fn estimate(panel: &ReturnPanel<f64>, cfg: &RunConfig) -> Result<CorrelationEstimate<f64>, CliError> {
    estimate_correlation(panel, cfg.max_lag).stage(Stage::Estimate)
}

pub fn fit(est: &CorrelationEstimate<f64>, cfg: &RunConfig) -> Result<PadeFit<f64>, CliError> {
    pade_generalized(&est.values, cfg.pade).stage(Stage::Fit)
}

/// `C(z)` of a pure-model configuration.
pub fn model_chat(cfg: &RunConfig) -> Result<RationalFunction<f64>, CliError> {
    let m = cfg
        .model
        .as_ref()
        .ok_or_else(|| CliError::Config("no [model] section".into()))?;
    RationalFunction::from_polynomials(
        Polynomial::new(m.chat_numerator.clone()),
        Polynomial::new(m.chat_denominator.clone()),
    )
    .stage(Stage::Fit)
}

pub fn symbol(chat: &RationalFunction<f64>, cfg: &RunConfig) -> Result<SymbolSpectrum<f64>, CliError> {
    build_symbol(chat, cfg.trunc).stage(Stage::Symbol)
}

pub fn factorization(sym: &SymbolSpectrum<f64>) -> Result<Factorization<f64>, CliError> {
    factorize(sym).stage(Stage::Factorize)
}

/// Normalized expectations from the static curve of `curve` and the panel variances.
pub fn market_expectations(
    curve: &YieldCurve<f64>,
    panel: &ReturnPanel<f64>,
    grid: &[u32],
) -> Result<NormalizedExpectations<f64>, CliError> {
    let er = expected_returns_static(curve, grid).map_err(|e| CliError::Stage {
        stage: returns_stage(&e),
        source: e,
    })?;
    let v = variance_estimates(panel).stage(Stage::Optimize)?;
    normalize_expectations(&er, &v).stage(Stage::Optimize)
}

pub fn model_expectations(cfg: &RunConfig) -> Result<NormalizedExpectations<f64>, CliError> {
    let m = cfg
        .model
        .as_ref()
        .ok_or_else(|| CliError::Config("no [model] section".into()))?;
    let e = m.expectations(cfg.trunc)?;
    let v = vec![1.0; e.len()];
    normalize_expectations(&e, &v).stage(Stage::Optimize)
}

pub struct Allocations {
    /// The optimum for the configured risk aversion, or its rescaling under `sum_to_one`.
    pub optimal: Allocation<f64>,
    pub optimal_sum_to_one: Allocation<f64>,
    pub benchmark: Allocation<f64>,
}

pub fn allocate(
    sym: &SymbolSpectrum<f64>,
    fac: &Factorization<f64>,
    e: &NormalizedExpectations<f64>,
    sizing: Sizing,
    trunc: usize,
) -> Result<Allocations, CliError> {
    let gamma = match sizing {
        Sizing::Gamma(g) => g,
        Sizing::SumToOne => SUM_TO_ONE_GAMMA,
    };
    let raw = optimize(sym, fac, e, gamma, trunc).stage(Stage::Optimize)?;
    let optimal_sum_to_one = sum_to_one(&raw).stage(Stage::Optimize)?;
    let benchmark = benchmark_uncorrelated(e, trunc).stage(Stage::Optimize)?;
    Ok(Allocations {
        optimal: match sizing {
            Sizing::Gamma(_) => raw,
            Sizing::SumToOne => optimal_sum_to_one.clone(),
        },
        optimal_sum_to_one,
        benchmark,
    })
}

/// Optimal and benchmark sum-to-one holdings only, as used by the backtest.
pub fn sum_to_one_pair(
    sym: &SymbolSpectrum<f64>,
    fac: &Factorization<f64>,
    e: &NormalizedExpectations<f64>,
    trunc: usize,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let a = allocate(sym, fac, e, Sizing::SumToOne, trunc)?;
    Ok((a.optimal_sum_to_one.raw, a.benchmark.raw))
}

pub fn arbitrage(
    sym: &SymbolSpectrum<f64>,
    fac: Option<&Factorization<f64>>,
    e: &NormalizedExpectations<f64>,
    cfg: &RunConfig,
) -> Result<ArbitrageReport<f64>, CliError> {
    arbitrage_report(sym, fac, e, cfg.threshold, cfg.trunc).stage(Stage::Arbitrage)
}

/// Factorizes for the arbitrage check. A symbol that fails the invertibility
/// test cannot be factorized, and the check reports on its kernel instead.
pub fn factorization_if_invertible(sym: &SymbolSpectrum<f64>) -> Result<Option<Factorization<f64>>, CliError> {
    match factorization(sym) {
        Ok(f) => Ok(Some(f)),
        Err(_) if !invertibility_check(sym).0 => Ok(None),
        Err(e) => Err(e),
    }
}
