//! The Toeplitz symbol `A(z) = C(1/z) + C(z) - 1` of a fitted correlation
//! function, its Wiener-Hopf split, and the inverse of `P+ A x` on `H+`.
//!
//! Writing `A = a0 prod (z - theta_i) / prod (z - eta_i)` and splitting the
//! roots by modulus, the two factors are
//!
//! ```text
//! exp(-A+) = prod (z - eta+) / (a0 prod (z - theta+))    analytic in |z| <= 1
//! exp(-A-) = prod (z - eta-) / prod (z - theta-)         analytic in |z| >= 1, -> 1 at infinity
//! ```
//!
//! and `[P+ A x]^-1 = exp(-A+) x P+ exp(-A-) x`. No logarithm is ever taken.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{
    expand_rational, long_division, multiply, Direction, LaurentSeries, Polynomial, RationalFunction,
};
use crate::linalg::{lu_solve, symmetric_eigen, Matrix};
use crate::scalar::Real;

/// Uniform grid used for the range of the symbol on the unit circle.
pub const CIRCLE_GRID: usize = 4096;
/// Points on the unit circle at which the product identity is verified.
pub const PRODUCT_CHECK_POINTS: usize = 64;
/// Largest dense system the oracle accepts.
pub const ORACLE_MAX_SIZE: usize = 2048;
/// Tolerance on `C(0) = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct SymbolSpectrum<T> {
    /// The correlation generating function the symbol was built from.
    pub chat: Option<RationalFunction<T>>,
    /// `A(z)` as one rational function in `z`.
    pub rational: Option<RationalFunction<T>>,
    /// `A_k` for `k = -T ..= T`.
    pub laurent: LaurentSeries<T>,
    pub circle_min: T,
    pub circle_max: T,
    /// How far local refinement moved the extremes away from the raw grid
    /// values; a measure of the grid approximation error.
    pub grid_refinement: T,
}

impl<T: Real> SymbolSpectrum<T> {
    /// Order `T` of the stored Laurent window.
    pub fn truncation(&self) -> usize {
        self.laurent.max_index() as usize
    }

    /// `A_k` (zero beyond the stored window).
    pub fn coeff(&self, k: i64) -> T {
        self.laurent.coeff(k)
    }

    /// `A(e^{i theta})`, real on the circle.
    pub fn eval_circle(&self, theta: T) -> T {
        match &self.chat {
            Some(c) => {
                let v = c.eval_complex(Complex::new(theta.cos(), theta.sin()));
                v.re + v.re - T::one()
            }
            None => {
                let t = self.truncation();
                let tail: T = (1..=t)
                    .map(|k| self.laurent.coeff(k as i64) * (theta * T::from_usize_lossy(k)).cos())
                    .sum();
                self.laurent.coeff(0) + tail + tail
            }
        }
    }

    /// The identity symbol `A = 1` (uncorrelated returns).
    pub fn identity(t: usize) -> Self {
        build_symbol(&RationalFunction::constant(T::one()), t).expect("constant symbol")
    }

    /// A symbol known only through its coefficients `A_0 .. A_T`
    /// (`A_-k = A_k`). Such a symbol supports the dense oracle, variances and
    /// the arbitrage checks, but not the rational factorization.
    pub fn from_coefficients(a: &[T]) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInput("symbol needs A_0".into()));
        }
        let t = a.len() as i64 - 1;
        let laurent = LaurentSeries::new(-t, (-t..=t).map(|k| a[k.unsigned_abs() as usize]).collect())?;
        let mut sym = Self {
            chat: None,
            rational: None,
            laurent,
            circle_min: T::zero(),
            circle_max: T::zero(),
            grid_refinement: T::zero(),
        };
        sym.fill_range();
        Ok(sym)
    }

    fn fill_range(&mut self) {
        let (lo, hi, moved) = circle_range(|th| self.eval_circle(th), CIRCLE_GRID);
        self.circle_min = lo;
        self.circle_max = hi;
        self.grid_refinement = moved;
    }

    /// Dense `n x n` Toeplitz matrix `M_ij = A_{i-j}`.
    pub fn toeplitz(&self, n: usize) -> Result<Matrix<T>> {
        if n == 0 || n - 1 > self.truncation() {
            return Err(Error::TruncationTooShort {
                requested: n,
                available: self.truncation() + 1,
            });
        }
        let col: Vec<T> = (0..n).map(|k| self.coeff(k as i64)).collect();
        Ok(Matrix::symmetric_toeplitz(&col))
    }
}

// Grid extremes with a golden-section pass around each, plus the larger of
// the two refinement moves.
fn circle_range<T: Real>(f: impl Fn(T) -> T, points: usize) -> (T, T, T) {
    let two_pi = T::lit(std::f64::consts::TAU);
    let h = two_pi / T::from_usize_lossy(points);
    let values: Vec<T> = (0..points).map(|k| f(h * T::from_usize_lossy(k))).collect();
    let (mut imin, mut imax) = (0, 0);
    for (k, v) in values.iter().enumerate() {
        if *v < values[imin] {
            imin = k;
        }
        if *v > values[imax] {
            imax = k;
        }
    }
    let center_min = h * T::from_usize_lossy(imin);
    let center_max = h * T::from_usize_lossy(imax);
    let lo = golden(&f, center_min - h, center_min + h, false).min(values[imin]);
    let hi = golden(&f, center_max - h, center_max + h, true).max(values[imax]);
    let moved = (values[imin] - lo).max(hi - values[imax]);
    (lo, hi, moved)
}

fn golden<T: Real>(f: &impl Fn(T) -> T, mut a: T, mut b: T, maximize: bool) -> T {
    let g = |x: T| if maximize { -f(x) } else { f(x) };
    let r = T::lit(0.618_033_988_749_894_9);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        }
    }
    let best = f1.min(f2);
    if maximize {
        -best
    } else {
        best
    }
}

fn modulus_f64<T: Real>(z: &Complex<T>) -> f64 {
    z.norm().to_f64().unwrap_or(f64::NAN)
}

/// Builds `A(z) = C(1/z) + C(z) - 1` from a rational `C = P/Q`, keeping
/// `A_k` for `|k| <= t`.
///
/// With `L(z) = P(1/z) Q(z) + P(z) Q(1/z) - Q(z) Q(1/z)` (a symmetric Laurent
/// polynomial of effective half-degree `d`) and `n = deg Q`,
/// `A = z^(n-d) S(z) / (Q(z) Qr(z))` where `S = z^d L` and `Qr` is `Q`
/// reversed, whose roots are the reciprocals of those of `Q`.
pub fn build_symbol<T: Real>(chat: &RationalFunction<T>, t: usize) -> Result<SymbolSpectrum<T>> {
    for p in chat.denominator_roots() {
        let m = p.norm();
        if (m - T::one()).abs() < T::circle_guard() {
            return Err(Error::PoleOnCircle {
                modulus: modulus_f64(p),
            });
        }
        if m < T::one() {
            return Err(Error::PoleInsideDisk {
                modulus: modulus_f64(p),
            });
        }
    }
    let p = chat.numerator();
    let q = chat.denominator();
    let c = long_division(p, q, t + 1);
    if (c[0] - T::one()).abs() > T::lit(NORMALIZATION_TOLERANCE) {
        return Err(Error::NotNormalized {
            value: c[0].to_f64().unwrap_or(f64::NAN),
        });
    }
    let laurent = LaurentSeries::from_fn(-(t as i64)..=t as i64, |k| {
        if k == 0 {
            c[0] + c[0] - T::one()
        } else {
            c[k.unsigned_abs() as usize]
        }
    });

    // L_k = X_k + X_-k - R_k with X_k = sum_i p_i q_{i-k}, R_k = sum_i q_i q_{i-k}
    let (pc, qc) = (p.coefficients(), q.coefficients());
    let cross = |a: &[T], b: &[T], k: i64| -> T {
        (0..a.len() as i64)
            .filter_map(|i| {
                let j = i - k;
                (j >= 0 && (j as usize) < b.len()).then(|| a[i as usize] * b[j as usize])
            })
            .sum()
    };
    let dmax = p.degree().max(q.degree());
    let half: Vec<T> = (0..=dmax as i64)
        .map(|k| cross(pc, qc, k) + cross(pc, qc, -k) - cross(qc, qc, k))
        .collect();
    let scale = half.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let cut = T::lit(64.0) * T::epsilon() * scale;
    let d = half.iter().rposition(|v| v.abs() > cut).unwrap_or(0);
    let s_coeffs: Vec<T> = (0..=2 * d)
        .map(|i| half[(i as i64 - d as i64).unsigned_abs() as usize])
        .collect();
    let s = Polynomial::new(s_coeffs);
    let n = q.degree();

    let mut zeros = if s.is_zero() { Vec::new() } else { s.roots()? };
    let eta = chat.denominator_roots().to_vec();
    let mut poles: Vec<Complex<T>> = eta.clone();
    poles.extend(eta.iter().map(|e| Complex::new(T::one(), T::zero()) / e));
    let origin = Complex::new(T::zero(), T::zero());
    let (mut num, mut den) = (s.clone(), q.mul(&q.reversed()));
    if n > d {
        zeros.extend(std::iter::repeat_n(origin, n - d));
        num = num.mul(&monomial(n - d));
    } else if d > n {
        poles.extend(std::iter::repeat_n(origin, d - n));
        den = den.mul(&monomial(d - n));
    }
    let rational = RationalFunction::from_parts(num, den, zeros, poles);
    let mut sym = SymbolSpectrum {
        chat: Some(chat.clone()),
        rational: Some(rational),
        laurent,
        circle_min: T::zero(),
        circle_max: T::zero(),
        grid_refinement: T::zero(),
    };
    sym.fill_range();
    Ok(sym)
}

fn monomial<T: Real>(k: usize) -> Polynomial<T> {
    let mut c = vec![T::zero(); k + 1];
    c[k] = T::one();
    Polynomial::new(c)
}

#[derive(Debug, Clone, Serialize)]
pub struct Factorization<T> {
    /// `exp(-A+)`: zeros `eta+`, poles `theta+`, all outside the unit circle.
    pub exp_minus_aplus: RationalFunction<T>,
    /// `exp(-A-)` written in `z`: zeros `eta-`, poles `theta-`, all inside.
    pub exp_minus_aminus: RationalFunction<T>,
    /// Taylor coefficients of `exp(-A+)`, powers `0 ..= T`.
    pub plus_expansion: LaurentSeries<T>,
    /// Expansion of `exp(-A-)` at infinity, powers `-T ..= 0`.
    pub minus_expansion: LaurentSeries<T>,
    /// Leading constant `a0` of `A`.
    pub scale: T,
    /// Largest `|exp(-A+) exp(-A-) A - 1|` seen on the check points.
    pub product_error: T,
}

/// Splits the zeros and poles of `A` by modulus and forms the two factors.
pub fn factorize<T: Real>(sym: &SymbolSpectrum<T>) -> Result<Factorization<T>> {
    let a = sym.rational.as_ref().ok_or(Error::NotRational)?;
    let guard = T::circle_guard();
    let on_circle = |r: &Complex<T>| (r.norm() - T::one()).abs() < guard;
    if let Some(r) = a
        .numerator_roots()
        .iter()
        .chain(a.denominator_roots())
        .find(|r| on_circle(r))
    {
        return Err(Error::RootOnCircle {
            modulus: modulus_f64(r),
        });
    }
    if !(sym.circle_min > T::zero()) {
        return Err(Error::NonPositiveSymbol {
            min: sym.circle_min.to_f64().unwrap_or(f64::NAN),
        });
    }
    let outside = |r: &&Complex<T>| r.norm() > T::one();
    let theta_plus: Vec<_> = a.numerator_roots().iter().filter(outside).copied().collect();
    let theta_minus: Vec<_> = a.numerator_roots().iter().filter(|r| !outside(r)).copied().collect();
    let eta_plus: Vec<_> = a.denominator_roots().iter().filter(outside).copied().collect();
    let eta_minus: Vec<_> = a.denominator_roots().iter().filter(|r| !outside(r)).copied().collect();
    if theta_minus.len() != eta_minus.len() {
        // a positive symbol has winding number zero; unequal counts mean it is not
        return Err(Error::NonPositiveSymbol {
            min: sym.circle_min.to_f64().unwrap_or(f64::NAN),
        });
    }

    let minus = RationalFunction::from_parts(
        Polynomial::from_roots(&eta_minus),
        Polynomial::from_roots(&theta_minus),
        eta_minus,
        theta_minus,
    );
    // exp(-A+) = k * prod (1 - z/eta+) / prod (1 - z/theta+); k from F+ F- A = 1 at z = 1
    let unit_num = Polynomial::from_roots_unit_constant(&eta_plus);
    let unit_den = Polynomial::from_roots_unit_constant(&theta_plus);
    let one = T::one();
    let k = one / (unit_num.eval(one) / unit_den.eval(one) * minus.eval(one) * sym.eval_circle(T::zero()));
    let plus = RationalFunction::from_parts(unit_num.scale(k), unit_den, eta_plus, theta_plus);

    let two_pi = T::lit(std::f64::consts::TAU);
    let mut product_error = T::zero();
    for j in 0..PRODUCT_CHECK_POINTS {
        let th = two_pi * (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(PRODUCT_CHECK_POINTS);
        let z = Complex::new(th.cos(), th.sin());
        let prod = plus.eval_complex(z) * minus.eval_complex(z) * a.eval_complex(z);
        product_error = product_error.max((prod - one).norm());
    }
    if !(product_error <= T::product_identity_tolerance()) {
        return Err(Error::ProductIdentityViolated {
            max_error: product_error.to_f64().unwrap_or(f64::NAN),
        });
    }
    let t = sym.truncation();
    Ok(Factorization {
        plus_expansion: expand_rational(&plus, Direction::Plus, t)?,
        minus_expansion: expand_rational(&minus, Direction::Minus, t)?,
        exp_minus_aplus: plus,
        exp_minus_aminus: minus,
        scale: a.scale(),
        product_error,
    })
}

fn check_plus<T: Real>(e: &LaurentSeries<T>) -> Result<()> {
    if e.has_negative_powers() {
        return Err(Error::InvalidInput("expected a series without negative powers".into()));
    }
    Ok(())
}

/// `exp(-A+) x P+ exp(-A-) x e`, keeping powers `0 .. t-1` throughout.
pub fn apply_inverse<T: Real>(fac: &Factorization<T>, e: &LaurentSeries<T>, t: usize) -> Result<LaurentSeries<T>> {
    check_plus(e)?;
    if t == 0 {
        return Ok(LaurentSeries::zero());
    }
    let top = t as i64 - 1;
    let e = e.truncate(0..=top);
    let (plus, minus) = if fac.plus_expansion.max_index() >= top {
        (fac.plus_expansion.clone(), fac.minus_expansion.clone())
    } else {
        (
            expand_rational(&fac.exp_minus_aplus, Direction::Plus, t - 1)?,
            expand_rational(&fac.exp_minus_aminus, Direction::Minus, t - 1)?,
        )
    };
    let w = multiply(&minus, &e, 0..=top);
    Ok(multiply(&plus, &w, 0..=top))
}

/// Dense solve of `M y = e` with `M_ij = A_{i-j}`, `i, j < t`.
pub fn toeplitz_solve_oracle<T: Real>(
    sym: &SymbolSpectrum<T>,
    e: &LaurentSeries<T>,
    t: usize,
) -> Result<LaurentSeries<T>> {
    check_plus(e)?;
    if t > ORACLE_MAX_SIZE {
        return Err(Error::InvalidInput(format!(
            "oracle size {t} exceeds {ORACLE_MAX_SIZE}"
        )));
    }
    let m = sym.toeplitz(t)?;
    let y = lu_solve(&m, &e.head(t)).map_err(|err| match err {
        Error::SingularSystem(msg) => Error::SingularMatrix(msg),
        other => other,
    })?;
    LaurentSeries::power_series(y)
}

/// Smallest eigenvalue of the `t x t` Toeplitz section.
pub fn toeplitz_min_eigenvalue<T: Real>(sym: &SymbolSpectrum<T>, t: usize) -> Result<T> {
    let (vals, _) = symmetric_eigen(&sym.toeplitz(t)?)?;
    Ok(vals[0])
}
