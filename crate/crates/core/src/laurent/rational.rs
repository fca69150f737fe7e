use num_complex::Complex;
use serde::Serialize;

use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `f(z) = scale * prod (z - numerator_roots) / prod (z - denominator_roots)`.
///
/// The numerator and denominator polynomials are kept alongside their roots;
/// evaluation and series expansion go through the polynomials, while
/// classification against the unit circle goes through the roots.
#[derive(Debug, Clone, Serialize)]
pub struct RationalFunction<T> {
    scale: T,
    numerator_roots: Vec<Complex<T>>,
    denominator_roots: Vec<Complex<T>>,
    numerator: Polynomial<T>,
    denominator: Polynomial<T>,
}

impl<T: Real> RationalFunction<T> {
    /// Builds `num / den`, locating the roots of both.
    ///
    /// Trailing coefficients below `64 eps` of the largest one are dropped
    /// first, so that rounding noise does not turn into roots near infinity.
    pub fn from_polynomials(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        let chop = T::lit(64.0) * T::epsilon();
        let num = num.chop(chop);
        let den = den.chop(chop);
        if den.is_zero() {
            return Err(Error::InvalidInput("denominator is identically zero".into()));
        }
        if num.is_zero() {
            return Ok(Self {
                scale: T::zero(),
                numerator_roots: Vec::new(),
                denominator_roots: den.roots()?,
                numerator: num,
                denominator: den,
            });
        }
        Ok(Self {
            scale: num.leading() / den.leading(),
            numerator_roots: num.roots()?,
            denominator_roots: den.roots()?,
            numerator: num,
            denominator: den,
        })
    }

    /// Builds `scale * prod (z - zeros) / prod (z - poles)`.
    pub fn from_roots(scale: T, zeros: Vec<Complex<T>>, poles: Vec<Complex<T>>) -> Self {
        let numerator = Polynomial::from_roots(&zeros).scale(scale);
        let denominator = Polynomial::from_roots(&poles);
        Self {
            scale,
            numerator_roots: zeros,
            denominator_roots: poles,
            numerator,
            denominator,
        }
    }

    /// Assembles a function whose polynomials and roots are already known to agree.
    pub(crate) fn from_parts(
        numerator: Polynomial<T>,
        denominator: Polynomial<T>,
        numerator_roots: Vec<Complex<T>>,
        denominator_roots: Vec<Complex<T>>,
    ) -> Self {
        let scale = if numerator.is_zero() {
            T::zero()
        } else {
            numerator.leading() / denominator.leading()
        };
        Self {
            scale,
            numerator_roots,
            denominator_roots,
            numerator,
            denominator,
        }
    }

    pub fn constant(c: T) -> Self {
        Self::from_parts(Polynomial::constant(c), Polynomial::one(), Vec::new(), Vec::new())
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn numerator_roots(&self) -> &[Complex<T>] {
        &self.numerator_roots
    }

    pub fn denominator_roots(&self) -> &[Complex<T>] {
        &self.denominator_roots
    }

    pub fn numerator(&self) -> &Polynomial<T> {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial<T> {
        &self.denominator
    }

    pub fn eval(&self, x: T) -> T {
        self.numerator.eval(x) / self.denominator.eval(x)
    }

    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        self.numerator.eval_complex(z) / self.denominator.eval_complex(z)
    }

    /// Smallest `| |pole| - 1 |` over the poles, or `None` without poles.
    pub fn pole_distance_to_circle(&self) -> Option<T> {
        self.denominator_roots
            .iter()
            .map(|p| (p.norm() - T::one()).abs())
            .fold(None, |acc: Option<T>, d| Some(acc.map_or(d, |a| a.min(d))))
    }

    /// Fails with [`Error::PoleOnCircle`] if a pole lies within the guard band.
    pub fn check_poles_off_circle(&self) -> Result<()> {
        for p in &self.denominator_roots {
            if (p.norm() - T::one()).abs() < T::circle_guard() {
                return Err(Error::PoleOnCircle {
                    modulus: p.norm().to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}
