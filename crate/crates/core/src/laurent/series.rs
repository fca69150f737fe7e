use std::fmt;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A finite truncation of a two-sided formal series `sum_k a_k z^k`.
///
/// `coefficients[i]` is the coefficient of `z^(min_index + i)`; every power
/// outside the stored window is zero.
#[derive(Debug, Clone, Serialize)]
pub struct LaurentSeries<T> {
    coefficients: Vec<T>,
    min_index: i64,
}

impl<T: Real> LaurentSeries<T> {
    pub fn new(min_index: i64, coefficients: Vec<T>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput("a series needs at least one coefficient".into()));
        }
        if let Some(i) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coefficient of z^{} is not finite",
                min_index + i as i64
            )));
        }
        Ok(Self {
            coefficients,
            min_index,
        })
    }

    /// A power series `sum_{k>=0} c_k z^k`.
    pub fn power_series(coefficients: Vec<T>) -> Result<Self> {
        Self::new(0, coefficients)
    }

    pub fn zero() -> Self {
        Self {
            coefficients: vec![T::zero()],
            min_index: 0,
        }
    }

    pub fn constant(c: T) -> Self {
        Self {
            coefficients: vec![c],
            min_index: 0,
        }
    }

    pub fn monomial(power: i64, c: T) -> Self {
        Self {
            coefficients: vec![c],
            min_index: power,
        }
    }

    /// Builds the window `range` from a coefficient function.
    pub fn from_fn(range: RangeInclusive<i64>, f: impl FnMut(i64) -> T) -> Self {
        let (lo, hi) = (*range.start(), *range.end());
        if hi < lo {
            return Self::zero();
        }
        Self {
            coefficients: (lo..=hi).map(f).collect(),
            min_index: lo,
        }
    }

    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    pub fn max_index(&self) -> i64 {
        self.min_index + self.coefficients.len() as i64 - 1
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// Coefficient of `z^k` (zero outside the stored window).
    pub fn coeff(&self, k: i64) -> T {
        let i = k - self.min_index;
        if i < 0 || i >= self.coefficients.len() as i64 {
            T::zero()
        } else {
            self.coefficients[i as usize]
        }
    }

    /// Coefficients of `z^0 .. z^(n-1)`.
    pub fn head(&self, n: usize) -> Vec<T> {
        (0..n as i64).map(|k| self.coeff(k)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| *c == T::zero())
    }

    pub fn has_negative_powers(&self) -> bool {
        (self.min_index..0).any(|k| self.coeff(k) != T::zero())
    }

    pub fn has_positive_powers(&self) -> bool {
        (1..=self.max_index()).any(|k| self.coeff(k) != T::zero())
    }

    /// Removes exact-zero coefficients from both edges.
    pub fn trimmed(&self) -> Self {
        let first = self.coefficients.iter().position(|c| *c != T::zero());
        match first {
            None => Self::zero(),
            Some(first) => {
                let last = self.coefficients.iter().rposition(|c| *c != T::zero()).unwrap_or(first);
                Self {
                    coefficients: self.coefficients[first..=last].to_vec(),
                    min_index: self.min_index + first as i64,
                }
            }
        }
    }

    /// Restricts to the powers in `range`, padding with zeros.
    pub fn truncate(&self, range: RangeInclusive<i64>) -> Self {
        Self::from_fn(range, |k| self.coeff(k))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|&c| c * s).collect(),
            min_index: self.min_index,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.min_index.min(other.min_index);
        let hi = self.max_index().max(other.max_index());
        Self::from_fn(lo..=hi, |k| self.coeff(k) + other.coeff(k))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    /// Largest absolute coefficient difference after alignment.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let lo = self.min_index.min(other.min_index);
        let hi = self.max_index().max(other.max_index());
        (lo..=hi).fold(T::zero(), |m, k| m.max((self.coeff(k) - other.coeff(k)).abs()))
    }

    /// Evaluates the truncated series at a complex point.
    pub fn eval_complex(&self, z: num_complex::Complex<T>) -> num_complex::Complex<T> {
        let mut acc = num_complex::Complex::new(T::zero(), T::zero());
        for (i, &c) in self.coefficients.iter().enumerate() {
            acc += z.powi((self.min_index + i as i64) as i32) * c;
        }
        acc
    }
}

impl<T: Real> PartialEq for LaurentSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.trimmed(), other.trimmed());
        a.min_index == b.min_index && a.coefficients == b.coefficients
    }
}

impl<T: Real> fmt::Display for LaurentSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if *c == T::zero() {
                continue;
            }
            let k = self.min_index + i as i64;
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·z")?,
                _ => write!(f, "{c}·z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Cauchy product of `a` and `b`, keeping only the powers in `trunc`.
///
/// Every kept coefficient is exact: all products contributing to a power
/// inside `trunc` are summed.
pub fn multiply<T: Real>(a: &LaurentSeries<T>, b: &LaurentSeries<T>, trunc: RangeInclusive<i64>) -> LaurentSeries<T> {
    let (lo, hi) = (*trunc.start(), *trunc.end());
    if hi < lo {
        return LaurentSeries::zero();
    }
    let mut out = vec![T::zero(); (hi - lo + 1) as usize];
    let (amin, bmin) = (a.min_index(), b.min_index());
    let bc = b.coefficients();
    for (i, &ai) in a.coefficients().iter().enumerate() {
        if ai == T::zero() {
            continue;
        }
        let ka = amin + i as i64;
        // powers ka + kb must land in [lo, hi]
        let kb_lo = (lo - ka).max(bmin);
        let kb_hi = (hi - ka).min(b.max_index());
        if kb_hi < kb_lo {
            continue;
        }
        for kb in kb_lo..=kb_hi {
            let j = (kb - bmin) as usize;
            out[(ka + kb - lo) as usize] += ai * bc[j];
        }
    }
    LaurentSeries {
        coefficients: out,
        min_index: lo,
    }
}

/// `<a|b> = sum_k a_k b_k` over the overlap of the two windows.
pub fn inner_product<T: Real>(a: &LaurentSeries<T>, b: &LaurentSeries<T>) -> T {
    let lo = a.min_index().max(b.min_index());
    let hi = a.max_index().min(b.max_index());
    if hi < lo {
        return T::zero();
    }
    (lo..=hi).map(|k| a.coeff(k) * b.coeff(k)).sum()
}

/// Orthogonal projection onto the non-negative powers.
pub fn project_plus<T: Real>(a: &LaurentSeries<T>) -> LaurentSeries<T> {
    if a.max_index() < 0 {
        return LaurentSeries::zero();
    }
    LaurentSeries::from_fn(a.min_index().max(0)..=a.max_index(), |k| a.coeff(k))
}
