//! Truncated Laurent series, real polynomials and rational functions.
//!
//! Series are finite windows of two-sided formal series; the scalar product
//! is `sum a_k b_k` and `project_plus` keeps the non-negative powers.
//! Rational functions are expanded into one-sided series on demand, either
//! around the origin (poles outside the unit circle) or around infinity
//! (poles inside).

mod polynomial;
mod rational;
mod series;

pub use polynomial::Polynomial;
pub use rational::RationalFunction;
pub use series::{inner_product, multiply, project_plus, LaurentSeries};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which side of the unit circle a one-sided expansion converges on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Powers `z^0 .. z^T`, convergent on `|z| <= 1`.
    Plus,
    /// Powers `z^0 .. z^-T`, convergent on `|z| >= 1`.
    Minus,
}

/// Expands `f` into a one-sided series with powers up to `max_power` in magnitude.
pub fn expand_rational<T: Real>(
    f: &RationalFunction<T>,
    direction: Direction,
    max_power: usize,
) -> Result<LaurentSeries<T>> {
    let guard = T::circle_guard();
    match direction {
        Direction::Plus => {
            if let Some(p) = f.denominator_roots().iter().find(|p| p.norm() < T::one() + guard) {
                return Err(Error::PoleOnWrongSide {
                    modulus: p.norm().to_f64().unwrap_or(f64::NAN),
                    direction: "plus",
                });
            }
            let c = long_division(f.numerator(), f.denominator(), max_power + 1);
            LaurentSeries::new(0, c)
        }
        Direction::Minus => {
            if let Some(p) = f.denominator_roots().iter().find(|p| p.norm() > T::one() - guard) {
                return Err(Error::PoleOnWrongSide {
                    modulus: p.norm().to_f64().unwrap_or(f64::NAN),
                    direction: "minus",
                });
            }
            let (num, den) = (f.numerator(), f.denominator());
            if num.is_zero() {
                return LaurentSeries::new(-(max_power as i64), vec![T::zero(); max_power + 1]);
            }
            if num.degree() > den.degree() {
                return Err(Error::NotProperAtInfinity);
            }
            let shift = den.degree() - num.degree();
            let g = long_division(&num.reversed(), &den.reversed(), max_power + 1);
            // coefficient of w^(k + shift), w = 1/z; stored from z^-T up to z^0
            let coeffs = (0..=max_power)
                .rev()
                .map(|p| if p >= shift { g[p - shift] } else { T::zero() })
                .collect();
            LaurentSeries::new(-(max_power as i64), coeffs)
        }
    }
}

/// First `n` Taylor coefficients of `num / den` at the origin; `den(0) != 0`.
pub(crate) fn long_division<T: Real>(num: &Polynomial<T>, den: &Polynomial<T>, n: usize) -> Vec<T> {
    let d = den.coefficients();
    let d0 = d[0];
    let mut c = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = num.coeff(k);
        for j in 1..d.len().min(k + 1) {
            acc -= d[j] * c[k - j];
        }
        c.push(acc / d0);
    }
    c
}
