//! Synthetic yield-curve panels whose monthly returns form a Gaussian field
//! with a prescribed maturity-difference correlation.
//!
//! Curves are quoted at whole months `1..=G` with `G = maturities + 1`. The
//! returns of maturities `2..=G` are drawn as
//! `R(t, s) = mu(t) + sigma(t) x_t` with `x ~ N(0, C)`, `C_ij = rho^|i-j|`,
//! `mu(t)` the static-curve expected return of a fixed base curve and
//! `sigma(t) = yield_vol * t / 12` (duration times yield volatility). Each
//! draw is rolled into the next curve by inverting the return definition, so
//! the panel recomputed from the written curves reproduces the draws.

use chrono::{Months, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, Matrix};
use crate::marketdata::YieldCurve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub seed: u64,
    /// Number of monthly returns; one more curve than this is produced.
    pub dates: usize,
    /// Number of maturities carrying random returns (months `2 ..= maturities + 1`).
    pub maturities: usize,
    /// `rho` in `C(tau) = rho^tau`, within `[0, 1]`.
    pub correlation_decay: f64,
    /// Annualized yield volatility per month; zero gives deterministic returns.
    pub yield_vol: f64,
    /// Base curve `level - slope * exp(-m / slope_months)`.
    pub level: f64,
    pub slope: f64,
    pub slope_months: f64,
    pub start_date: String,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            dates: 500,
            maturities: 40,
            correlation_decay: 0.9,
            yield_vol: 0.0005,
            level: 0.05,
            slope: 0.02,
            slope_months: 24.0,
            start_date: "1985-08-01".into(),
        }
    }
}

impl SyntheticConfig {
    /// Months on which the generated returns are random.
    pub fn grid(&self) -> Vec<u32> {
        (2..=self.maturities as u32 + 1).collect()
    }

    fn base_yield(&self, m: u32) -> f64 {
        self.level - self.slope * (-(m as f64) / self.slope_months).exp()
    }

    fn validate(&self) -> Result<NaiveDate> {
        if self.maturities < 1 || self.dates < 1 {
            return Err(Error::InvalidInput("need at least one date and one maturity".into()));
        }
        if !(0.0..=1.0).contains(&self.correlation_decay) {
            return Err(Error::InvalidInput("correlation decay must lie in [0, 1]".into()));
        }
        if !(self.yield_vol >= 0.0 && self.yield_vol.is_finite()) {
            return Err(Error::InvalidInput("yield volatility must be non-negative".into()));
        }
        if self.slope_months <= 0.0 {
            return Err(Error::InvalidInput("slope_months must be positive".into()));
        }
        NaiveDate::parse_from_str(&self.start_date, "%Y-%m-%d")
            .map_err(|e| Error::InvalidInput(format!("start date `{}`: {e}", self.start_date)))
    }
}

/// Draws the curve panel described by `cfg`; deterministic given the seed.
pub fn generate_curves(cfg: &SyntheticConfig) -> Result<Vec<YieldCurve<f64>>> {
    let start = cfg.validate()?;
    let n = cfg.maturities;
    let top = n as u32 + 1;
    let months: Vec<u32> = (1..=top).collect();
    let base: Vec<f64> = months.iter().map(|&m| cfg.base_yield(m)).collect();
    // mu(t) for t = 2..=top, indexed by t - 2
    let mu: Vec<f64> = (2..=top)
        .map(|t| (base[(t - 1) as usize] * t as f64 - base[(t - 2) as usize] * (t - 1) as f64) / 12.0)
        .collect();
    let factor = correlation_factor(n, cfg.correlation_decay)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut curves = Vec::with_capacity(cfg.dates + 1);
    let mut y = base.clone();
    for s in 0..=cfg.dates {
        let date = start
            .checked_add_months(Months::new(s as u32))
            .ok_or_else(|| Error::InvalidInput("date overflow".into()))?;
        curves.push(YieldCurve::new(
            date.format("%Y-%m-%d").to_string(),
            months.iter().map(|&m| m as f64 / 12.0).collect(),
            y.clone(),
        )?);
        if s == cfg.dates {
            break;
        }
        let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x = factor.mul_vec(&z);
        let mut next = y.clone();
        for t in 2..=top {
            let i = (t - 2) as usize;
            let r = mu[i] + cfg.yield_vol * t as f64 / 12.0 * x[i];
            // log P_{s+1}(t-1) = log P_s(t) + R
            next[(t - 2) as usize] = (y[(t - 1) as usize] * t as f64 - 12.0 * r) / (t - 1) as f64;
        }
        next[(top - 1) as usize] = base[(top - 1) as usize];
        y = next;
    }
    Ok(curves)
}

// Lower factor L with L L^T = C, C_ij = rho^|i-j|.
fn correlation_factor(n: usize, rho: f64) -> Result<Matrix<f64>> {
    if rho >= 1.0 {
        // rank one: every maturity shares the same draw
        return Ok(Matrix::from_fn(n, n, |_, j| if j == 0 { 1.0 } else { 0.0 }));
    }
    let col: Vec<f64> = (0..n).map(|k| rho.powi(k as i32)).collect();
    cholesky(&Matrix::symmetric_toeplitz(&col))
}
