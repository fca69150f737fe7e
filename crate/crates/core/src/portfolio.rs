//! Mean-variance allocation over the maturity continuum.
//!
//! Holdings are expressed in unit-variance securities, `Y(t) = X(t) sqrt(V(t))`,
//! so that the covariance operator is the Toeplitz operator of the symbol.
//! The optimum of `<E|Y> - gamma <Y|P+ A Y>` is `Y = (1/2 gamma) [P+ A x]^-1 E`
//! with utility `U = (1/4 gamma) <E|[P+ A x]^-1 E>`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{inner_product, LaurentSeries, Polynomial, RationalFunction};
use crate::scalar::Real;
use crate::wienerhopf::{apply_inverse, factorize, Factorization, SymbolSpectrum};

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedExpectations<T> {
    /// `E(t) = ER(t) / sqrt(V(t))` as a power series.
    pub series: LaurentSeries<T>,
    pub expected_returns: Vec<T>,
    pub variances: Vec<T>,
}

impl<T: Real> NormalizedExpectations<T> {
    /// Expectations given directly in normalized form (unit variances).
    pub fn from_series(series: LaurentSeries<T>) -> Result<Self> {
        if series.has_negative_powers() {
            return Err(Error::InvalidInput("expectations must not have negative powers".into()));
        }
        let n = series.max_index().max(0) as usize + 1;
        Ok(Self {
            expected_returns: series.head(n),
            variances: vec![T::one(); n],
            series: series.truncate(0..=n as i64 - 1),
        })
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            series: self.series.scale(c),
            expected_returns: self.expected_returns.iter().map(|&v| v * c).collect(),
            variances: self.variances.clone(),
        }
    }
}

fn check_variances<T: Real>(v: &[T]) -> Result<()> {
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(**x > T::zero() && x.is_finite())) {
        return Err(Error::NonPositiveVariance {
            index,
            value: value.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

pub fn normalize_expectations<T: Real>(er: &[T], v: &[T]) -> Result<NormalizedExpectations<T>> {
    if er.len() != v.len() || er.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} expected returns for {} variances",
            er.len(),
            v.len()
        )));
    }
    check_variances(v)?;
    let coeffs = er.iter().zip(v).map(|(&e, &var)| e / var.sqrt()).collect();
    Ok(NormalizedExpectations {
        series: LaurentSeries::power_series(coeffs)?,
        expected_returns: er.to_vec(),
        variances: v.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Objective<T> {
    RiskAversion(T),
    SumToOne,
}

#[derive(Debug, Clone, Serialize)]
pub struct Allocation<T> {
    /// `Y(t)` on the maturities of the expectations.
    pub normalized: LaurentSeries<T>,
    /// `X(t) = Y(t) / sqrt(V(t))`.
    pub raw: Vec<T>,
    /// `(1/4 gamma) <E|[P+ A x]^-1 E>`; absent once rescaled.
    pub utility: Option<T>,
    pub variance: T,
    /// `<E|Y> = sum ER(t) X(t)` per period.
    pub expected_return: T,
    pub objective: Objective<T>,
}

impl<T: Real> Allocation<T> {
    /// Variance of this allocation under another symbol.
    pub fn variance_under(&self, sym: &SymbolSpectrum<T>) -> Result<T> {
        portfolio_variance(sym, &self.normalized)
    }
}

/// `<y|P+ (A y)> = sum_ij y_i A_{i-j} y_j`.
pub fn portfolio_variance<T: Real>(sym: &SymbolSpectrum<T>, y: &LaurentSeries<T>) -> Result<T> {
    if y.has_negative_powers() {
        return Err(Error::InvalidInput("holdings must not have negative powers".into()));
    }
    let top = y.max_index().max(0);
    if top as usize > sym.truncation() {
        return Err(Error::TruncationTooShort {
            requested: top as usize + 1,
            available: sym.truncation() + 1,
        });
    }
    let coeffs = y.head(top as usize + 1);
    let mut total = T::zero();
    for (i, &yi) in coeffs.iter().enumerate() {
        if yi == T::zero() {
            continue;
        }
        let row: T = coeffs
            .iter()
            .enumerate()
            .map(|(j, &yj)| sym.coeff(i as i64 - j as i64) * yj)
            .sum();
        total += yi * row;
    }
    Ok(total)
}

/// `U(Y) = <E|Y> - gamma variance(Y)`.
pub fn utility<T: Real>(
    sym: &SymbolSpectrum<T>,
    e: &NormalizedExpectations<T>,
    y: &LaurentSeries<T>,
    gamma: T,
) -> Result<T> {
    Ok(inner_product(&e.series, y) - gamma * portfolio_variance(sym, y)?)
}

/// `X(t) = Y(t) / sqrt(v(t))` for the maturities covered by `v`.
pub fn denormalize<T: Real>(y: &LaurentSeries<T>, v: &[T]) -> Result<Vec<T>> {
    check_variances(v)?;
    Ok(y.head(v.len()).iter().zip(v).map(|(&yi, &vi)| yi / vi.sqrt()).collect())
}

/// The unconstrained optimum for risk aversion `gamma`.
///
/// The inverse is evaluated with `t` coefficients; holdings, variance and
/// expected return refer to the maturities of `e` (the first `e.len()`
/// coefficients), while the utility is the value of the full optimum.
pub fn optimize<T: Real>(
    sym: &SymbolSpectrum<T>,
    fac: &Factorization<T>,
    e: &NormalizedExpectations<T>,
    gamma: T,
    t: usize,
) -> Result<Allocation<T>> {
    if !(gamma > T::zero() && gamma.is_finite()) {
        return Err(Error::InvalidInput("risk aversion must be positive".into()));
    }
    if t < e.len() {
        return Err(Error::TruncationTooShort {
            requested: e.len(),
            available: t,
        });
    }
    let inv = apply_inverse(fac, &e.series, t)?;
    let q = inner_product(&e.series, &inv);
    let two_gamma = gamma + gamma;
    let full = inv.scale(T::one() / two_gamma);
    let normalized = full.truncate(0..=e.len() as i64 - 1);
    let raw = denormalize(&normalized, &e.variances)?;
    Ok(Allocation {
        variance: portfolio_variance(sym, &normalized)?,
        expected_return: inner_product(&e.series, &normalized),
        utility: Some(q / (two_gamma + two_gamma)),
        normalized,
        raw,
        objective: Objective::RiskAversion(gamma),
    })
}

/// Rescales an allocation so that its bond holdings sum to one.
pub fn sum_to_one<T: Real>(alloc: &Allocation<T>) -> Result<Allocation<T>> {
    let total: T = alloc.raw.iter().copied().sum();
    let gross: T = alloc.raw.iter().map(|x| x.abs()).sum();
    if total.abs() <= T::lit(1e-12) * gross.max(T::one()) {
        return Err(Error::ZeroNetPosition);
    }
    let s = T::one() / total;
    Ok(Allocation {
        normalized: alloc.normalized.scale(s),
        raw: alloc.raw.iter().map(|&x| x * s).collect(),
        utility: None,
        variance: alloc.variance * s * s,
        expected_return: alloc.expected_return * s,
        objective: Objective::SumToOne,
    })
}

/// Sum-to-one portfolio that ignores correlations: `X(t)` proportional to `ER(t)/V(t)`.
pub fn benchmark_uncorrelated<T: Real>(e: &NormalizedExpectations<T>, t: usize) -> Result<Allocation<T>> {
    let sym = SymbolSpectrum::identity(t.max(e.len()));
    let fac = factorize(&sym)?;
    sum_to_one(&optimize(&sym, &fac, e, T::lit(0.5), t.max(e.len()))?)
}

/// Optimum for `C(z) = 1/(1 - alpha z)` and `E(z) = e0/(1 - beta z)`:
/// `Y = (e0/2 gamma) (1 - alpha beta)/(1 - alpha^2) (1 - alpha z)/(1 - beta z)`
/// and `U = (e0^2/4 gamma) (1 - alpha beta)^2 / ((1 - alpha^2)(1 - beta^2))`.
pub fn ar1_closed_form<T: Real>(alpha: T, beta: T, e0: T, gamma: T) -> Result<(RationalFunction<T>, T)> {
    let one = T::one();
    if !(alpha.abs() < one && beta.abs() < one) {
        return Err(Error::InvalidInput("AR(1) parameters must lie in (-1, 1)".into()));
    }
    if !(gamma > T::zero()) {
        return Err(Error::InvalidInput("risk aversion must be positive".into()));
    }
    let two_gamma = gamma + gamma;
    let k = e0 / two_gamma * (one - alpha * beta) / (one - alpha * alpha);
    let yhat =
        RationalFunction::from_polynomials(Polynomial::new(vec![k, -k * alpha]), Polynomial::new(vec![one, -beta]))?;
    let u = e0 * e0 / (two_gamma + two_gamma) * (one - alpha * beta) * (one - alpha * beta)
        / ((one - alpha * alpha) * (one - beta * beta));
    Ok((yhat, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::long_division;
    use crate::wienerhopf::build_symbol;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ar1_setup(alpha: f64, t: usize) -> (SymbolSpectrum<f64>, Factorization<f64>) {
        let c =
            RationalFunction::from_polynomials(Polynomial::new(vec![1.0]), Polynomial::new(vec![1.0, -alpha])).unwrap();
        let sym = build_symbol(&c, t).unwrap();
        let fac = factorize(&sym).unwrap();
        (sym, fac)
    }

    fn geometric(e0: f64, beta: f64, n: usize) -> NormalizedExpectations<f64> {
        let s = LaurentSeries::power_series((0..n).map(|k| e0 * beta.powi(k as i32)).collect()).unwrap();
        NormalizedExpectations::from_series(s).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let e = normalize_expectations(&[0.01, 0.02], &[1.0, 4.0]).unwrap();
        assert_eq!(e.series.coefficients(), &[0.01, 0.01]);
        assert!(normalize_expectations(&[0.0, 0.0], &[1.0, 2.0])
            .unwrap()
            .series
            .is_zero());
        let er: Vec<f64> = (0..10).map(|t| 0.004 * 0.25f64.powi(t)).collect();
        let e = normalize_expectations(&er, &[1.0; 10]).unwrap();
        let want = long_division(&Polynomial::constant(0.004), &Polynomial::new(vec![1.0, -0.25]), 10);
        for k in 0..10 {
            assert!((e.series.coeff(k as i64) - want[k]).abs() < 1e-18);
        }
        assert!(matches!(
            normalize_expectations(&[1.0, 1.0], &[1.0, 0.0]),
            Err(Error::NonPositiveVariance { index: 1, .. })
        ));
    }

    #[test]
    fn ar1_optimum_matches_closed_form() {
        let (sym, fac) = ar1_setup(0.5, 256);
        let e = geometric(1.0, 0.25, 256);
        let alloc = optimize(&sym, &fac, &e, 0.5, 256).unwrap();
        let (yhat, u) = ar1_closed_form(0.5f64, 0.25, 1.0, 0.5).unwrap();
        assert!((u - 0.5444444444444444).abs() < 1e-15);
        assert!((alloc.utility.unwrap() - u).abs() < 1e-8);
        let want = long_division(yhat.numerator(), yhat.denominator(), 256);
        assert!((want[0] - 7.0 / 6.0).abs() < 1e-15);
        for k in 0..256 {
            assert!((alloc.normalized.coeff(k as i64) - want[k]).abs() < 1e-12);
        }
        // unit variances: raw equals normalized
        assert_eq!(alloc.raw, alloc.normalized.head(256));
    }

    #[test]
    fn identity_optimum_is_half_gamma_inverse() {
        let sym = SymbolSpectrum::identity(8);
        let fac = factorize(&sym).unwrap();
        let e =
            NormalizedExpectations::from_series(LaurentSeries::power_series(vec![0.3f64, -0.2, 0.5]).unwrap()).unwrap();
        let a = optimize(&sym, &fac, &e, 0.5, 8).unwrap();
        assert_eq!(a.normalized, e.series);
        assert!((a.utility.unwrap() - 0.5 * (0.09 + 0.04 + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn zero_expectations_give_no_position() {
        let (sym, fac) = ar1_setup(0.5, 16);
        let e = NormalizedExpectations::from_series(LaurentSeries::power_series(vec![0.0; 4]).unwrap()).unwrap();
        let a = optimize(&sym, &fac, &e, 1.0, 16).unwrap();
        assert!(a.normalized.is_zero());
        assert_eq!(a.utility, Some(0.0));
        assert!(matches!(sum_to_one(&a), Err(Error::ZeroNetPosition)));
    }

    #[test]
    fn variance_examples() {
        let y = LaurentSeries::power_series(vec![1.0, 1.0]).unwrap();
        assert_eq!(portfolio_variance(&SymbolSpectrum::identity(4), &y).unwrap(), 2.0);
        let (sym, _) = ar1_setup(0.5, 4);
        assert_eq!(portfolio_variance(&sym, &y).unwrap(), 3.0);
        assert_eq!(portfolio_variance(&sym, &LaurentSeries::zero()).unwrap(), 0.0);
        let long = LaurentSeries::power_series(vec![1.0; 8]).unwrap();
        assert!(matches!(
            portfolio_variance(&sym, &long),
            Err(Error::TruncationTooShort { .. })
        ));
    }

    #[test]
    fn denormalize_examples() {
        let y = LaurentSeries::power_series(vec![1.0, 1.0]).unwrap();
        assert_eq!(denormalize(&y, &[4.0, 0.25]).unwrap(), vec![0.5, 2.0]);
        assert_eq!(denormalize(&y, &[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        let v = [0.3f64, 2.0, 0.7];
        let y = LaurentSeries::power_series(vec![0.2, -1.5, 3.0]).unwrap();
        let x = denormalize(&y, &v).unwrap();
        for i in 0..3 {
            assert!((x[i] * v[i].sqrt() - y.coeff(i as i64)).abs() < 1e-12);
        }
    }

    fn alloc_from_raw(raw: Vec<f64>) -> Allocation<f64> {
        Allocation {
            normalized: LaurentSeries::power_series(raw.clone()).unwrap(),
            raw,
            utility: Some(1.0),
            variance: 4.0,
            expected_return: 2.0,
            objective: Objective::RiskAversion(1.0),
        }
    }

    #[test]
    fn sum_to_one_examples() {
        assert_eq!(sum_to_one(&alloc_from_raw(vec![2.0, 2.0])).unwrap().raw, vec![0.5, 0.5]);
        let a = sum_to_one(&alloc_from_raw(vec![3.0, -1.0])).unwrap();
        assert_eq!(a.raw, vec![1.5, -0.5]);
        assert_eq!(a.variance, 1.0);
        assert_eq!(a.expected_return, 1.0);
        assert_eq!(a.objective, Objective::SumToOne);
        assert!(a.utility.is_none());

        let (sym, fac) = ar1_setup(0.5, 64);
        let e = geometric(1.0, 0.25, 64);
        let opt = optimize(&sym, &fac, &e, 0.5, 64).unwrap();
        let s: f64 = opt.raw.iter().sum();
        let scaled = sum_to_one(&opt).unwrap();
        assert!((scaled.raw.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((scaled.variance - opt.variance / (s * s)).abs() < 1e-12);
        assert!((portfolio_variance(&sym, &scaled.normalized).unwrap() - scaled.variance).abs() < 1e-12);
    }

    #[test]
    fn benchmark_examples() {
        let e = normalize_expectations(&[0.02f64, 0.01], &[1.0, 1.0]).unwrap();
        let b = benchmark_uncorrelated(&e, 2).unwrap();
        assert!((b.raw[0] - 2.0 / 3.0).abs() < 1e-15 && (b.raw[1] - 1.0 / 3.0).abs() < 1e-15);
        let e = normalize_expectations(&[0.01f64, 0.01], &[1.0, 4.0]).unwrap();
        let b = benchmark_uncorrelated(&e, 2).unwrap();
        assert!((b.raw[0] - 0.8).abs() < 1e-15 && (b.raw[1] - 0.2).abs() < 1e-15);
        let er = [0.004, 0.0045, 0.005, 0.0052];
        let v = [1e-6, 4e-6, 9e-6, 1.6e-5];
        let e = normalize_expectations(&er, &v).unwrap();
        let b = benchmark_uncorrelated(&e, 4).unwrap();
        let w: Vec<f64> = er.iter().zip(&v).map(|(a, b)| a / b).collect();
        let total: f64 = w.iter().sum();
        for i in 0..4 {
            assert!((b.raw[i] - w[i] / total).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_special_cases() {
        for alpha in [-0.5f64, 0.0, 0.3, 0.9] {
            let (y, u) = ar1_closed_form(alpha, alpha, 2.0, 0.5).unwrap();
            assert!((u - 2.0).abs() < 1e-12);
            let c = long_division(y.numerator(), y.denominator(), 5);
            assert!((c[0] - 2.0).abs() < 1e-12);
            assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
        }
        let (y, u) = ar1_closed_form(0.0f64, 0.4, 1.0, 1.0).unwrap();
        assert!((u - 0.25 / (1.0 - 0.16)).abs() < 1e-15);
        let c = long_division(y.numerator(), y.denominator(), 3);
        assert!((c[2] - 0.5 * 0.16).abs() < 1e-15);
        assert!(ar1_closed_form(1.0f64, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn short_positions_when_expectations_decay_faster() {
        for (alpha, beta) in [(0.5, 0.25), (0.9, 0.5), (0.25, 0.1)] {
            let (sym, fac) = ar1_setup(alpha, 128);
            let y = optimize(&sym, &fac, &geometric(1.0, beta, 128), 1.0, 128).unwrap();
            assert!(y.raw[0] > 0.0);
            assert!(y.raw[1..40].iter().all(|&x| x < 0.0));
            let (sym, fac) = ar1_setup(beta, 128);
            let y = optimize(&sym, &fac, &geometric(1.0, alpha, 128), 1.0, 128).unwrap();
            assert!(y.raw[1..40].iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn optimum_is_stationary() {
        let (sym, fac) = ar1_setup(0.5, 256);
        let e = geometric(1.0, 0.25, 256);
        let gamma = 0.5;
        let opt = optimize(&sym, &fac, &e, gamma, 256).unwrap();
        let u0 = utility(&sym, &e, &opt.normalized, gamma).unwrap();
        assert!((u0 - opt.utility.unwrap()).abs() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let d: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
            let moved = opt.normalized.add(&LaurentSeries::power_series(d).unwrap().scale(1e-4));
            assert!(u0 >= utility(&sym, &e, &moved, gamma).unwrap() - 1e-8);
        }
    }

    proptest! {
        #[test]
        fn homogeneity_and_gamma_scaling(alpha in -0.8f64..0.8, beta in -0.8f64..0.8, c in 0.1f64..10.0, gamma in 0.1f64..5.0) {
            let (sym, fac) = ar1_setup(alpha, 128);
            let e = geometric(1.0, beta, 128);
            let base = optimize(&sym, &fac, &e, gamma, 128).unwrap();
            let scaled = optimize(&sym, &fac, &e.scale(c), gamma, 128).unwrap();
            prop_assert!(scaled.normalized.max_abs_diff(&base.normalized.scale(c)) <= 1e-12 * c.max(1.0) * 10.0);
            let (u, uc) = (base.utility.unwrap(), scaled.utility.unwrap());
            prop_assert!((uc - c * c * u).abs() <= 1e-12 * uc.abs().max(1.0));
            let g2 = optimize(&sym, &fac, &e, 2.0 * gamma, 128).unwrap();
            prop_assert!(g2.normalized.max_abs_diff(&base.normalized.scale(0.5)) <= 1e-12 * 10.0);
            prop_assert!((g2.utility.unwrap() - 0.5 * u).abs() <= 1e-12 * u.abs().max(1.0));
        }

        #[test]
        fn pipeline_matches_closed_form(alpha in -0.9f64..0.9, beta in -0.9f64..0.9, gamma in 0.2f64..4.0, e0 in -2.0f64..2.0) {
            let (sym, fac) = ar1_setup(alpha, 256);
            let a = optimize(&sym, &fac, &geometric(e0, beta, 256), gamma, 256).unwrap();
            let (_, u) = ar1_closed_form(alpha, beta, e0, gamma).unwrap();
            prop_assert!((a.utility.unwrap() - u).abs() <= 1e-8);
        }
    }
}
