use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, Matrix};
use crate::scalar::Real;

/// Real polynomial with coefficients in ascending power order.
///
/// The leading coefficient is nonzero unless the polynomial is identically
/// zero, in which case `coefficients == [0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial<T> {
    coefficients: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(mut coefficients: Vec<T>) -> Self {
        while coefficients.len() > 1 && *coefficients.last().unwrap() == T::zero() {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(T::zero());
        }
        Self { coefficients }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// `prod_i (z - r_i)` for roots closed under conjugation.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        let mut c = vec![Complex::new(T::one(), T::zero())];
        for &r in roots {
            let mut next = vec![Complex::new(T::zero(), T::zero()); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * r;
            }
            c = next;
        }
        Self::new(c.into_iter().map(|z| z.re).collect())
    }

    /// `prod_i (1 - z / r_i)`, the normalization with unit constant term.
    /// Every root must be nonzero.
    pub fn from_roots_unit_constant(roots: &[Complex<T>]) -> Self {
        let mut c = vec![Complex::new(T::one(), T::zero())];
        for &r in roots {
            let inv = Complex::new(T::one(), T::zero()) / r;
            let mut next = vec![Complex::new(T::zero(), T::zero()); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] += ci;
                next[i + 1] -= ci * inv;
            }
            c = next;
        }
        Self::new(c.into_iter().map(|z| z.re).collect())
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.len() == 1 && self.coefficients[0] == T::zero()
    }

    pub fn leading(&self) -> T {
        *self.coefficients.last().unwrap()
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coefficients.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: T) -> T {
        self.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![T::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            for (j, &b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coefficients.iter().map(|&c| c * s).collect())
    }

    /// `z^n p(1/z)` with `n = degree`.
    pub fn reversed(&self) -> Self {
        Self::new(self.coefficients.iter().rev().copied().collect())
    }

    /// Drops trailing coefficients below `rel * max|c|`.
    pub fn chop(&self, rel: T) -> Self {
        let scale = self.norm_inf();
        let mut c = self.coefficients.clone();
        while c.len() > 1 && c.last().unwrap().abs() <= rel * scale {
            c.pop();
        }
        Self::new(c)
    }

    pub fn norm_inf(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// `sum_k |c_k| r^k`, the scale against which a residual at `|z| = r` is judged.
    fn magnitude_at(&self, r: T) -> T {
        self.coefficients
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * r + c.abs())
    }

    fn derivative(&self) -> Self {
        if self.coefficients.len() == 1 {
            return Self::constant(T::zero());
        }
        Self::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::from_usize_lossy(k))
                .collect(),
        )
    }

    /// All complex roots with multiplicity.
    ///
    /// Exact zeros at the origin are split off first; the rest come from the
    /// eigenvalues of the balanced companion matrix, are polished by Newton
    /// steps, and are re-symmetrized so conjugate pairs are exact conjugates
    /// (returned adjacently, positive imaginary part first). Each root must
    /// satisfy `|p(r)| <= tol * sum_k |c_k| |r|^k` with `tol = T::root_tolerance()`.
    pub fn roots(&self) -> Result<Vec<Complex<T>>> {
        if self.is_zero() {
            return Err(Error::InvalidInput("the zero polynomial has no finite root set".into()));
        }
        let zeros_at_origin = self.coefficients.iter().take_while(|c| **c == T::zero()).count();
        let reduced = Polynomial::new(self.coefficients[zeros_at_origin..].to_vec());
        let n = reduced.degree();
        let mut roots = vec![Complex::new(T::zero(), T::zero()); zeros_at_origin];
        if n == 0 {
            return Ok(roots);
        }

        let lead = reduced.leading();
        let companion = Matrix::from_fn(n, n, |i, j| {
            if i == 0 {
                -reduced.coeff(n - 1 - j) / lead
            } else if i == j + 1 {
                T::one()
            } else {
                T::zero()
            }
        });
        let eig = eigenvalues(&companion)?;
        let deriv = reduced.derivative();
        let mut found: Vec<Complex<T>> = eig
            .into_iter()
            .map(|(re, im)| polish(&reduced, &deriv, Complex::new(re, im)))
            .collect();
        resymmetrize(&mut found);

        let tol = T::root_tolerance();
        for r in &found {
            let res = reduced.eval_complex(*r).norm();
            let scale = reduced.magnitude_at(r.norm());
            if !(res <= tol * scale) {
                return Err(Error::ConvergenceFailure(format!(
                    "root {r} has residual {:e} above {:e} x {:e}",
                    res.to_f64().unwrap_or(f64::NAN),
                    tol.to_f64().unwrap_or(f64::NAN),
                    scale.to_f64().unwrap_or(f64::NAN),
                )));
            }
        }
        roots.extend(found);
        Ok(roots)
    }
}

fn polish<T: Real>(p: &Polynomial<T>, dp: &Polynomial<T>, mut z: Complex<T>) -> Complex<T> {
    let mut best = p.eval_complex(z).norm();
    for _ in 0..8 {
        let d = dp.eval_complex(z);
        if d.norm() == T::zero() {
            break;
        }
        let next = z - p.eval_complex(z) / d;
        let r = p.eval_complex(next).norm();
        if !(r < best) {
            break;
        }
        best = r;
        z = next;
    }
    z
}

fn resymmetrize<T: Real>(roots: &mut Vec<Complex<T>>) {
    let tiny = T::lit(64.0) * T::epsilon().sqrt();
    let mut reals = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &r in roots.iter() {
        if r.im.abs() <= tiny * r.norm().max(T::one()) {
            reals.push(Complex::new(r.re, T::zero()));
        } else if r.im > T::zero() {
            upper.push(r);
        } else {
            lower.push(r);
        }
    }
    // pair each upper-half root with its nearest conjugate partner
    let mut out = reals;
    out.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal));
    for u in upper {
        let best = lower
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1.conj() - u)
                    .norm()
                    .partial_cmp(&(b.1.conj() - u).norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i);
        match best {
            Some(i) => {
                let l = lower.swap_remove(i);
                let avg = (u + l.conj()) * T::lit(0.5);
                out.push(avg);
                out.push(avg.conj());
            }
            None => out.push(u),
        }
    }
    out.extend(lower);
    *roots = out;
}
