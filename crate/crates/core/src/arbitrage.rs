//! Arbitrage diagnostics for a rate structure.
//!
//! The Toeplitz operator with a real continuous symbol is invertible exactly
//! when `0` lies outside the range of the symbol on the unit circle. When it
//! is not, zero-risk portfolios exist and the question is whether the
//! expectations see them. When it is, the quadratic form
//! `<E|[P+ A x]^-1 E>` measures how close the structure is to an arbitrage.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::inner_product;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::portfolio::NormalizedExpectations;
use crate::scalar::Real;
use crate::wienerhopf::{apply_inverse, Factorization, SymbolSpectrum};

/// Largest section used for the kernel estimate.
pub const KERNEL_MAX_SIZE: usize = 1024;
/// Eigenvalues below this fraction of the largest count as numerical kernel.
pub const KERNEL_SIGMA_TOLERANCE: f64 = 1e-8;
/// Overlap with a kernel vector above this fraction of `|E|` is an arbitrage.
pub const KERNEL_ORTHOGONALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalArbitrage {
    Absent,
    Present,
    /// The operator is not invertible but its finite sections show no
    /// numerical kernel, so the test has nothing to decide on.
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArbitrageReport<T> {
    pub invertible: bool,
    pub circle_interval: (T, T),
    /// Grid-approximation error reported with the interval.
    pub grid_refinement: T,
    pub kernel_dimension_estimate: usize,
    pub classical_arbitrage: ClassicalArbitrage,
    /// `<E|[P+ A x]^-1 E>`, when the operator could be inverted.
    pub quadratic_form: Option<T>,
    pub threshold: T,
    pub near_arbitrage: Option<bool>,
}

/// `(0 not in [min - g, max + g], [min, max])` with `g = 1e-9 (1 + |max|)`.
pub fn invertibility_check<T: Real>(sym: &SymbolSpectrum<T>) -> (bool, (T, T)) {
    let (lo, hi) = (sym.circle_min, sym.circle_max);
    let g = T::lit(1e-9) * (T::one() + hi.abs());
    let invertible = lo - g > T::zero() || hi + g < T::zero();
    (invertible, (lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelVerdict {
    pub classical_arbitrage: ClassicalArbitrage,
    pub kernel_dimension_estimate: usize,
}

/// Compares the expectations with the numerical kernel of the `t x t` section.
pub fn kernel_orthogonality<T: Real>(
    sym: &SymbolSpectrum<T>,
    e: &NormalizedExpectations<T>,
    t: usize,
) -> Result<KernelVerdict> {
    if invertibility_check(sym).0 {
        return Ok(KernelVerdict {
            classical_arbitrage: ClassicalArbitrage::Absent,
            kernel_dimension_estimate: 0,
        });
    }
    if t == 0 || t > KERNEL_MAX_SIZE {
        return Err(Error::InvalidInput(format!(
            "kernel section size must be in 1..={KERNEL_MAX_SIZE}, got {t}"
        )));
    }
    let m = Matrix::from_fn(t, t, |i, j| sym.coeff(i as i64 - j as i64));
    let (vals, vecs) = symmetric_eigen(&m)?;
    let largest = vals.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let sigma_tol = T::lit(KERNEL_SIGMA_TOLERANCE) * largest;
    let kernel: Vec<usize> = (0..t).filter(|&k| vals[k].abs() < sigma_tol).collect();
    if kernel.is_empty() {
        return Ok(KernelVerdict {
            classical_arbitrage: ClassicalArbitrage::NotApplicable,
            kernel_dimension_estimate: 0,
        });
    }
    let ev = e.series.head(t);
    let norm = ev.iter().map(|&x| x * x).sum::<T>().sqrt();
    let orth_tol = T::lit(KERNEL_ORTHOGONALITY_TOLERANCE) * norm;
    let present = kernel.iter().any(|&k| {
        let overlap: T = (0..t).map(|i| vecs[(i, k)] * ev[i]).sum();
        overlap.abs() > orth_tol
    });
    Ok(KernelVerdict {
        classical_arbitrage: if present {
            ClassicalArbitrage::Present
        } else {
            ClassicalArbitrage::Absent
        },
        kernel_dimension_estimate: kernel.len(),
    })
}

/// `q = <E|[P+ A x]^-1 E>` and whether it exceeds `threshold`.
pub fn near_arbitrage<T: Real>(
    fac: &Factorization<T>,
    e: &NormalizedExpectations<T>,
    threshold: T,
    t: usize,
) -> Result<(bool, T)> {
    if !(threshold > T::zero()) {
        return Err(Error::InvalidInput("near-arbitrage threshold must be positive".into()));
    }
    let q = inner_product(&e.series, &apply_inverse(fac, &e.series, t)?);
    Ok((q > threshold, q))
}

/// Assembles the full report; `fac` is `None` when the symbol could not be factorized.
pub fn arbitrage_report<T: Real>(
    sym: &SymbolSpectrum<T>,
    fac: Option<&Factorization<T>>,
    e: &NormalizedExpectations<T>,
    threshold: T,
    t: usize,
) -> Result<ArbitrageReport<T>> {
    let (invertible, circle_interval) = invertibility_check(sym);
    let kernel = kernel_orthogonality(sym, e, t.min(KERNEL_MAX_SIZE))?;
    let near = match (invertible, fac) {
        (true, Some(f)) => Some(near_arbitrage(f, e, threshold, t)?),
        _ => None,
    };
    Ok(ArbitrageReport {
        invertible,
        circle_interval,
        grid_refinement: sym.grid_refinement,
        kernel_dimension_estimate: kernel.kernel_dimension_estimate,
        classical_arbitrage: kernel.classical_arbitrage,
        quadratic_form: near.map(|n| n.1),
        threshold,
        near_arbitrage: near.map(|n| n.0),
    })
}
