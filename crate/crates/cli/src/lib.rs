//! Command-line driver: runs the estimation, fitting, factorization,
//! allocation, arbitrage and backtest stages and writes every intermediate
//! result to the output directory.

pub mod backtest;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;

use std::fs::File;
use std::io::BufWriter;

use bondwh::arbitrage::ArbitrageReport;
use bondwh::corrfit::{CorrelationEstimate, PadeFit};
use bondwh::laurent::RationalFunction;
use bondwh::marketdata::write_curves;
use bondwh::portfolio::NormalizedExpectations;
use bondwh::synthetic::generate_curves;
use bondwh::wienerhopf::{Factorization, SymbolSpectrum};
use bondwh::Error;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::backtest::{run_backtest, BacktestReport, ReturnStats};
use crate::config::RunConfig;
use crate::error::{CliError, Stage, StageExt};
use crate::pipeline::Allocations;
use crate::report::ReportWriter;

pub use crate::config::{Format, Overrides, Sizing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Generate,
    Estimate,
    Fit,
    Factorize,
    Optimize,
    CheckArbitrage,
    Backtest,
    Pipeline,
}

impl Command {
    fn depth(self) -> u8 {
        match self {
            Command::Generate | Command::Backtest => 0,
            Command::Estimate => 1,
            Command::Fit => 2,
            Command::Factorize => 3,
            Command::Optimize => 4,
            Command::CheckArbitrage | Command::Pipeline => 5,
        }
    }
}

/// Headline numbers of a run, also written as `summary`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub command: Option<Command>,
    pub curves_written: Option<String>,
    pub fit_objective: Option<f64>,
    pub fit_circle_min: Option<f64>,
    pub fit_negative_symbol: Option<bool>,
    pub circle_interval: Option<(f64, f64)>,
    pub product_error: Option<f64>,
    pub utility: Option<f64>,
    pub expected_return: Option<f64>,
    pub variance: Option<f64>,
    pub quadratic_form: Option<f64>,
    pub near_arbitrage: Option<bool>,
    pub invertible: Option<bool>,
    pub backtest_optimal: Option<ReturnStats>,
    pub backtest_benchmark: Option<ReturnStats>,
    pub files: Vec<String>,
}

#[derive(Serialize)]
struct RationalReport<'a> {
    scale: f64,
    numerator: &'a [f64],
    denominator: &'a [f64],
    numerator_roots: &'a [Complex64],
    denominator_roots: &'a [Complex64],
}

fn rational(f: &RationalFunction<f64>) -> RationalReport<'_> {
    RationalReport {
        scale: f.scale(),
        numerator: f.numerator().coefficients(),
        denominator: f.denominator().coefficients(),
        numerator_roots: f.numerator_roots(),
        denominator_roots: f.denominator_roots(),
    }
}

fn num(x: f64) -> Value {
    // NaN and infinities have no JSON form and are written as empty cells
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn write_correlation(
    w: &mut ReportWriter,
    est: &CorrelationEstimate<f64>,
    fit: Option<&PadeFit<f64>>,
) -> Result<(), CliError> {
    let fitted = fit.map(|f| f.taylor(est.values.len()));
    let rows: Vec<Vec<Value>> = (0..est.values.len())
        .map(|k| {
            vec![
                json!(k),
                num(est.values[k]),
                json!(est.pair_counts[k]),
                fitted.as_ref().map_or(Value::Null, |f| num(f[k])),
            ]
        })
        .collect();
    w.table("correlation", &["lag", "estimate", "pair_count", "fitted"], &rows)
}

fn write_fit(w: &mut ReportWriter, fit: Option<&PadeFit<f64>>, chat: &RationalFunction<f64>) -> Result<(), CliError> {
    let v = match fit {
        Some(f) => json!({
            "order": { "m": f.order.m, "n": f.order.n, "k": f.order.k },
            "chat": rational(&f.rational),
            "objective": f.objective,
            "circle_min": f.circle_min,
            "negative_symbol": f.negative_symbol,
        }),
        None => json!({ "chat": rational(chat), "source": "model" }),
    };
    w.object("fit", &v)
}

fn write_factorization(
    w: &mut ReportWriter,
    sym: &SymbolSpectrum<f64>,
    fac: &Factorization<f64>,
) -> Result<(), CliError> {
    let a: Vec<f64> = (0..=sym.truncation() as i64).map(|k| sym.coeff(k)).collect();
    let v = json!({
        "symbol": {
            "circle_min": sym.circle_min,
            "circle_max": sym.circle_max,
            "grid_refinement": sym.grid_refinement,
            "rational": sym.rational.as_ref().map(rational),
            "coefficients": a,
        },
        "scale": fac.scale,
        "product_error": fac.product_error,
        "exp_minus_aplus": rational(&fac.exp_minus_aplus),
        "exp_minus_aminus": rational(&fac.exp_minus_aminus),
    });
    w.object("factorization", &v)
}

fn write_allocation(
    w: &mut ReportWriter,
    maturities: &[u32],
    e: &NormalizedExpectations<f64>,
    a: &Allocations,
) -> Result<(), CliError> {
    let rows: Vec<Vec<Value>> = (0..e.len())
        .map(|i| {
            vec![
                json!(maturities[i]),
                num(e.expected_returns[i]),
                num(e.variances[i]),
                num(e.series.coeff(i as i64)),
                num(a.optimal.normalized.coeff(i as i64)),
                num(a.optimal.raw[i]),
                num(a.optimal_sum_to_one.raw[i]),
                num(a.benchmark.normalized.coeff(i as i64)),
                num(a.benchmark.raw[i]),
            ]
        })
        .collect();
    w.table(
        "allocation",
        &[
            "maturity",
            "expected_return",
            "variance",
            "e_normalized",
            "y_optimal",
            "x_optimal",
            "x_optimal_sum_to_one",
            "y_benchmark",
            "x_benchmark",
        ],
        &rows,
    )
}

fn write_backtest(w: &mut ReportWriter, b: &BacktestReport) -> Result<(), CliError> {
    let rows: Vec<Vec<Value>> = b
        .rows
        .iter()
        .map(|r| vec![json!(r.date), num(r.optimal), num(r.benchmark)])
        .collect();
    w.table("backtest", &["date", "optimal", "benchmark"], &rows)?;
    w.object(
        "backtest_summary",
        &json!({ "mode": b.mode, "window": b.window, "optimal": b.optimal, "benchmark": b.benchmark }),
    )
}

fn write_arbitrage(w: &mut ReportWriter, r: &ArbitrageReport<f64>) -> Result<(), CliError> {
    w.object("arbitrage", r)
}

fn generate(cfg: &RunConfig, summary: &mut Summary) -> Result<(), CliError> {
    let curves = generate_curves(&cfg.generate).stage(Stage::Generate)?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| Error::Io(e.to_string()))
        .stage(Stage::Report)?;
    let path = cfg.out.join("curves.csv");
    let file = File::create(&path).map_err(Error::from).stage(Stage::Report)?;
    write_curves(BufWriter::new(file), &curves).stage(Stage::Report)?;
    summary.curves_written = Some(path.display().to_string());
    Ok(())
}

/// Runs `cmd` and writes its reports under `cfg.out`.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Summary, CliError> {
    let mut summary = Summary {
        command: Some(cmd),
        ..Default::default()
    };
    if cmd == Command::Generate {
        generate(cfg, &mut summary)?;
        return Ok(summary);
    }
    let model_mode = cfg.model.is_some();
    if model_mode && matches!(cmd, Command::Estimate | Command::Backtest) {
        return Err(CliError::Config(format!(
            "`{}` needs market data; remove the [model] section",
            serde_json::to_value(cmd)
                .unwrap_or_default()
                .as_str()
                .unwrap_or("command")
        )));
    }
    let market = if model_mode {
        None
    } else {
        Some(pipeline::load_market(cfg)?)
    };
    let mut w = ReportWriter::new(&cfg.out, cfg.format)?;

    if cmd == Command::Backtest {
        let b = run_backtest(market.as_ref().expect("data mode"), cfg)?;
        write_backtest(&mut w, &b)?;
        summary.backtest_optimal = Some(b.optimal);
        summary.backtest_benchmark = Some(b.benchmark);
        return finish(w, summary);
    }

    // correlation function
    let (chat, fit) = match &market {
        Some(m) => {
            let est = pipeline::estimate(&m.panel, cfg)?;
            if cmd.depth() < 2 {
                write_correlation(&mut w, &est, None)?;
                return finish(w, summary);
            }
            let fit = pipeline::fit(&est, cfg);
            write_correlation(&mut w, &est, fit.as_ref().ok())?;
            let fit = fit?;
            if fit.negative_symbol {
                eprintln!(
                    "warning: fitted symbol is negative on the unit circle (min {:.3e})",
                    fit.circle_min
                );
            }
            summary.fit_objective = Some(fit.objective);
            summary.fit_circle_min = Some(fit.circle_min);
            summary.fit_negative_symbol = Some(fit.negative_symbol);
            (fit.rational.clone(), Some(fit))
        }
        None => (pipeline::model_chat(cfg)?, None),
    };
    write_fit(&mut w, fit.as_ref(), &chat)?;
    if cmd.depth() < 3 {
        return finish(w, summary);
    }

    let sym = pipeline::symbol(&chat, cfg)?;
    summary.circle_interval = Some((sym.circle_min, sym.circle_max));
    let e = match &market {
        Some(m) => pipeline::market_expectations(m.curves.last().expect("two or more curves"), &m.panel, &cfg.grid)?,
        None => pipeline::model_expectations(cfg)?,
    };
    let fac = if cmd == Command::CheckArbitrage {
        pipeline::factorization_if_invertible(&sym)?
    } else {
        Some(pipeline::factorization(&sym)?)
    };
    if let Some(f) = &fac {
        write_factorization(&mut w, &sym, f)?;
        summary.product_error = Some(f.product_error);
    }
    if cmd == Command::Factorize {
        return finish(w, summary);
    }

    if let Some(f) = &fac {
        let a = pipeline::allocate(&sym, f, &e, cfg.sizing, cfg.trunc)?;
        let maturities: Vec<u32> = match &market {
            Some(m) => m.panel.maturities.clone(),
            None => (0..e.len() as u32).collect(),
        };
        write_allocation(&mut w, &maturities, &e, &a)?;
        summary.utility = a.optimal.utility;
        summary.expected_return = Some(a.optimal.expected_return);
        summary.variance = Some(a.optimal.variance);
    }
    if cmd == Command::Optimize {
        return finish(w, summary);
    }

    let r = pipeline::arbitrage(&sym, fac.as_ref(), &e, cfg)?;
    write_arbitrage(&mut w, &r)?;
    summary.invertible = Some(r.invertible);
    summary.quadratic_form = r.quadratic_form;
    summary.near_arbitrage = r.near_arbitrage;

    if cmd == Command::Pipeline {
        if let Some(m) = &market {
            let b = run_backtest(m, cfg)?;
            write_backtest(&mut w, &b)?;
            summary.backtest_optimal = Some(b.optimal);
            summary.backtest_benchmark = Some(b.benchmark);
        }
    }
    finish(w, summary)
}

fn finish(mut w: ReportWriter, mut summary: Summary) -> Result<Summary, CliError> {
    summary.files = w.written().to_vec();
    w.object("summary", &summary)?;
    Ok(summary)
}
