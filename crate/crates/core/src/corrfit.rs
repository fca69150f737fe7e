//! Maturity-difference correlation: estimation from a return panel and
//! rational (Padé) fits of the estimated sequence.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{long_division, Polynomial, RationalFunction};
use crate::linalg::{least_squares, lu_solve, Matrix};
use crate::marketdata::{is_degenerate, ReturnPanel};
use crate::scalar::Real;

/// Points on the unit circle used for the symbol sanity check of a fit.
pub const FIT_CIRCLE_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationEstimate<T> {
    /// `C(0..=max_lag)`, with `C(0) = 1`.
    pub values: Vec<T>,
    /// Number of (date, maturity) pairs averaged at each lag.
    pub pair_counts: Vec<usize>,
    pub max_lag: usize,
}

/// Average of `E(s,t) E(s,t+tau)` over all observed pairs, where `E` is the
/// return demeaned and scaled per maturity.
///
/// Scaling uses the population (`1/n`) standard deviation so that a panel of
/// identical columns gives exactly `C(tau) = 1`; `C(0)` is then set to one.
/// Missing entries (`NaN`) are skipped and each lag is divided by its own
/// pair count.
pub fn estimate_correlation<T: Real>(panel: &ReturnPanel<T>, max_lag: usize) -> Result<CorrelationEstimate<T>> {
    if panel.n_dates() < 2 {
        return Err(Error::InsufficientDates {
            needed: 2,
            got: panel.n_dates(),
        });
    }
    if panel.n_maturities() < max_lag + 2 {
        return Err(Error::InsufficientData(format!(
            "lag {max_lag} needs {} maturities, panel has {}",
            max_lag + 2,
            panel.n_maturities()
        )));
    }
    let ncols = panel.n_maturities();
    let mut scaled = vec![vec![T::nan(); ncols]; panel.n_dates()];
    for j in 0..ncols {
        let vals: Vec<T> = panel.returns.iter().map(|r| r[j]).filter(|v| v.is_finite()).collect();
        if vals.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "maturity index {j} has {} observations",
                vals.len()
            )));
        }
        let n = T::from_usize_lossy(vals.len());
        let mean = vals.iter().copied().sum::<T>() / n;
        let sd = (vals.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n).sqrt();
        if is_degenerate(sd, mean) {
            return Err(Error::DegenerateMaturity { index: j });
        }
        for (row, out) in panel.returns.iter().zip(scaled.iter_mut()) {
            if row[j].is_finite() {
                out[j] = (row[j] - mean) / sd;
            }
        }
    }

    let mut values = Vec::with_capacity(max_lag + 1);
    let mut pair_counts = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let mut sum = T::zero();
        let mut count = 0usize;
        for row in &scaled {
            for t in 0..ncols - lag {
                let (a, b) = (row[t], row[t + lag]);
                if a.is_finite() && b.is_finite() {
                    sum += a * b;
                    count += 1;
                }
            }
        }
        if count == 0 {
            return Err(Error::InsufficientData(format!("no valid pairs at lag {lag}")));
        }
        values.push(sum / T::from_usize_lossy(count));
        pair_counts.push(count);
    }
    values[0] = T::one();
    Ok(CorrelationEstimate {
        values,
        pair_counts,
        max_lag,
    })
}

/// Orders of a `[M/N]` Padé fit matching `M + N + K + 1` coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PadeOrder {
    pub m: usize,
    pub n: usize,
    pub k: usize,
}

impl PadeOrder {
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("Padé denominator degree must be at least 1".into()));
        }
        Ok(Self { m, n, k })
    }

    pub fn classical(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, 0)
    }

    /// Number of leading coefficients the fit consumes.
    pub fn coefficients_used(&self) -> usize {
        self.m + self.n + self.k + 1
    }

    fn check_available(&self, available: usize) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("Padé denominator degree must be at least 1".into()));
        }
        if self.coefficients_used() > available {
            return Err(Error::TruncationTooShort {
                requested: self.coefficients_used(),
                available,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PadeFit<T> {
    pub order: PadeOrder,
    /// `P_M / Q_N` with `Q_N(0) = 1`.
    pub rational: RationalFunction<T>,
    /// Sum of squared linearized residuals `(Q c - P)_i` over the fitted window.
    pub objective: T,
    /// Minimum of `2 Re f(e^{i theta}) - 1` on the check grid.
    pub circle_min: T,
    /// Set when `circle_min <= 0`: the fit does not define a valid covariance symbol.
    pub negative_symbol: bool,
}

impl<T: Real> PadeFit<T> {
    /// First `n` Taylor coefficients of the fitted function.
    pub fn taylor(&self, n: usize) -> Vec<T> {
        long_division(self.rational.numerator(), self.rational.denominator(), n)
    }
}

// Row i of the linear system for q_1..q_N: sum_j q_j c_{i-j} = -c_i.
fn system_row<T: Real>(c: &[T], i: usize, n: usize) -> Vec<T> {
    (1..=n).map(|j| if j <= i { c[i - j] } else { T::zero() }).collect()
}

fn assemble<T: Real>(c: &[T], order: PadeOrder, q_tail: &[T]) -> Result<PadeFit<T>> {
    let mut q = Vec::with_capacity(order.n + 1);
    q.push(T::one());
    q.extend_from_slice(q_tail);
    let linear = |i: usize| -> T { (0..=order.n.min(i)).map(|j| q[j] * c[i - j]).sum() };
    let p: Vec<T> = (0..=order.m).map(linear).collect();
    let objective = (order.m + 1..order.coefficients_used())
        .map(|i| {
            let r = linear(i);
            r * r
        })
        .sum();
    let rational = RationalFunction::from_polynomials(Polynomial::new(p), Polynomial::new(q))?;
    let circle_min = symbol_min_on_grid(&rational, FIT_CIRCLE_POINTS);
    Ok(PadeFit {
        order,
        rational,
        objective,
        circle_min,
        negative_symbol: !(circle_min > T::zero()),
    })
}

/// Minimum over `points` equispaced angles of `2 Re f(e^{i theta}) - 1`.
pub fn symbol_min_on_grid<T: Real>(f: &RationalFunction<T>, points: usize) -> T {
    let two_pi = T::lit(std::f64::consts::TAU);
    (0..points)
        .map(|k| {
            let th = two_pi * T::from_usize_lossy(k) / T::from_usize_lossy(points);
            let v = f.eval_complex(Complex::new(th.cos(), th.sin()));
            v.re + v.re - T::one()
        })
        .fold(T::infinity(), |a, b| a.min(b))
}

/// Classical `[M/N]` Padé approximant: matches `c_0 .. c_{M+N}` exactly.
pub fn pade_classical<T: Real>(c: &[T], order: PadeOrder) -> Result<PadeFit<T>> {
    if order.k != 0 {
        return Err(Error::InvalidInput("classical Padé requires K = 0".into()));
    }
    order.check_available(c.len())?;
    let n = order.n;
    let rows: Vec<usize> = (order.m + 1..=order.m + n).collect();
    let a = Matrix::from_fn(n, n, |r, j| system_row(c, rows[r], n)[j]);
    let b: Vec<T> = rows.iter().map(|&i| -c[i]).collect();
    let q = lu_solve(&a, &b)?;
    assemble(c, order, &q)
}

/// Generalized `[M/N/K]` Padé fit.
///
/// The denominator minimizes the linearized residual `sum_i ((Q c)_i)^2`
/// over `i = M+1 .. M+N+K` (Householder least squares); the numerator then
/// matches `c_0 .. c_M` exactly. With `K = 0` this is the classical fit.
pub fn pade_generalized<T: Real>(c: &[T], order: PadeOrder) -> Result<PadeFit<T>> {
    order.check_available(c.len())?;
    let n = order.n;
    let rows: Vec<usize> = (order.m + 1..order.coefficients_used()).collect();
    let a = Matrix::from_fn(rows.len(), n, |r, j| system_row(c, rows[r], n)[j]);
    let b: Vec<T> = rows.iter().map(|&i| -c[i]).collect();
    let q = least_squares(&a, &b)?;
    let fit = assemble(c, order, &q)?;
    for root in fit.rational.denominator_roots() {
        if (root.norm() - T::one()).abs() < T::circle_guard() {
            return Err(Error::UnstableFit {
                modulus: root.norm().to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(fit)
}
