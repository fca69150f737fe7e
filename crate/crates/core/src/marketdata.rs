//! Zero-coupon yield curves, monthly interpolation and the return panel.
//!
//! Prices are `P = exp(-y t)` with `t` in years and continuously compounded
//! zero yields. Maturities on the working grid are whole months; one period
//! is one month (`1/12` year).

use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Slack (in years) allowed when a grid point sits on the edge of the quoted range.
const EDGE_SLACK_YEARS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YieldCurve<T> {
    pub date: String,
    pub tenors: Vec<T>,
    pub yields: Vec<T>,
}

impl<T: Real> YieldCurve<T> {
    pub fn new(date: impl Into<String>, tenors: Vec<T>, yields: Vec<T>) -> Result<Self> {
        let date = date.into();
        if tenors.len() != yields.len() || tenors.is_empty() {
            return Err(Error::InvalidInput(format!(
                "curve {date}: {} tenors vs {} yields",
                tenors.len(),
                yields.len()
            )));
        }
        if tenors.iter().any(|t| !(t.is_finite() && *t > T::zero())) {
            return Err(Error::InvalidInput(format!("curve {date}: tenors must be positive")));
        }
        if tenors.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTenors { date });
        }
        if yields.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidInput(format!("curve {date}: yields must be finite")));
        }
        Ok(Self { date, tenors, yields })
    }

    pub fn min_tenor(&self) -> T {
        self.tenors[0]
    }

    pub fn max_tenor(&self) -> T {
        *self.tenors.last().unwrap()
    }
}

/// Monthly log returns `R(t, s)` indexed by (calendar date, maturity).
///
/// Row `s` holds the return earned from date `s` to date `s + 1`. Missing
/// observations are `NaN`; per-maturity statistics skip them.
#[derive(Debug, Clone, Serialize)]
pub struct ReturnPanel<T> {
    pub dates: Vec<String>,
    pub maturities: Vec<u32>,
    pub returns: Vec<Vec<T>>,
    pub means: Vec<T>,
    pub stds: Vec<T>,
}

impl<T: Real> ReturnPanel<T> {
    pub fn new(dates: Vec<String>, maturities: Vec<u32>, returns: Vec<Vec<T>>) -> Result<Self> {
        if returns.len() != dates.len() {
            return Err(Error::InvalidInput(format!(
                "{} return rows for {} dates",
                returns.len(),
                dates.len()
            )));
        }
        if let Some(i) = returns.iter().position(|r| r.len() != maturities.len()) {
            return Err(Error::InvalidInput(format!(
                "return row {i} has {} entries for {} maturities",
                returns[i].len(),
                maturities.len()
            )));
        }
        let (means, stds) = column_stats(&returns, maturities.len());
        Ok(Self {
            dates,
            maturities,
            returns,
            means,
            stds,
        })
    }

    pub fn n_dates(&self) -> usize {
        self.returns.len()
    }

    pub fn n_maturities(&self) -> usize {
        self.maturities.len()
    }

    pub fn get(&self, date: usize, maturity: usize) -> T {
        self.returns[date][maturity]
    }

    /// Rows `range` as a new panel with recomputed statistics.
    pub fn window(&self, range: std::ops::Range<usize>) -> Result<Self> {
        Self::new(
            self.dates[range.clone()].to_vec(),
            self.maturities.clone(),
            self.returns[range].to_vec(),
        )
    }

    /// Demeaned returns divided by the per-maturity sample standard deviation.
    pub fn standardized(&self) -> Result<Vec<Vec<T>>> {
        for (j, s) in self.stds.iter().enumerate() {
            if !(*s > T::zero()) {
                return Err(Error::DegenerateMaturity { index: j });
            }
        }
        Ok(self
            .returns
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &r)| (r - self.means[j]) / self.stds[j])
                    .collect()
            })
            .collect())
    }
}

// Sample mean and (n - 1) standard deviation of each column, skipping NaN.
fn column_stats<T: Real>(rows: &[Vec<T>], ncols: usize) -> (Vec<T>, Vec<T>) {
    let mut means = Vec::with_capacity(ncols);
    let mut stds = Vec::with_capacity(ncols);
    for j in 0..ncols {
        let vals: Vec<T> = rows.iter().map(|r| r[j]).filter(|v| v.is_finite()).collect();
        let n = vals.len();
        if n == 0 {
            means.push(T::nan());
            stds.push(T::nan());
            continue;
        }
        let mean = vals.iter().copied().sum::<T>() / T::from_usize_lossy(n);
        let var = if n > 1 {
            vals.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / T::from_usize_lossy(n - 1)
        } else {
            T::nan()
        };
        means.push(mean);
        stds.push(var.sqrt());
    }
    (means, stds)
}

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub struct NaturalSpline<T> {
    x: Vec<T>,
    y: Vec<T>,
    second: Vec<T>,
}

impl<T: Real> NaturalSpline<T> {
    pub fn new(x: &[T], y: &[T]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidInput("a spline needs at least two knots".into()));
        }
        let mut second = vec![T::zero(); n];
        if n > 2 {
            // tridiagonal system for the interior second derivatives
            let m = n - 2;
            let mut diag = vec![T::zero(); m];
            let mut upper = vec![T::zero(); m];
            let mut rhs = vec![T::zero(); m];
            let six = T::lit(6.0);
            for i in 0..m {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                diag[i] = (h0 + h1) * T::lit(2.0);
                upper[i] = h1;
                rhs[i] = six * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
            }
            // Thomas elimination; sub-diagonal entry i is h_i = x[i+1] - x[i]
            for i in 1..m {
                let sub = x[i + 1] - x[i];
                let w = sub / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] = rhs[i] - w * rhs[i - 1];
            }
            let mut sol = vec![T::zero(); m];
            sol[m - 1] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
            }
            second[1..n - 1].copy_from_slice(&sol);
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            second,
        })
    }

    /// Evaluates inside `[x_0, x_n]`; the caller guarantees the range.
    pub fn eval(&self, t: T) -> T {
        let n = self.x.len();
        let hi = self.x.partition_point(|&xi| xi < t).clamp(1, n - 1);
        if self.x[hi] == t {
            return self.y[hi];
        }
        if self.x[hi - 1] == t {
            return self.y[hi - 1];
        }
        let lo = hi - 1;
        let h = self.x[hi] - self.x[lo];
        let a = (self.x[hi] - t) / h;
        let b = (t - self.x[lo]) / h;
        let six = T::lit(6.0);
        a * self.y[lo]
            + b * self.y[hi]
            + ((a * a * a - a) * self.second[lo] + (b * b * b - b) * self.second[hi]) * h * h / six
    }
}

fn month_years<T: Real>(m: u32) -> T {
    T::from_u32(m).unwrap() / T::lit(12.0)
}

fn check_range<T: Real>(curve: &YieldCurve<T>, months: u32) -> Result<T> {
    let t = month_years::<T>(months);
    let slack = T::lit(EDGE_SLACK_YEARS);
    if t < curve.min_tenor() - slack || t > curve.max_tenor() + slack {
        return Err(Error::GridOutOfRange {
            months: months as f64,
            min: curve.min_tenor().to_f64().unwrap_or(f64::NAN),
            max: curve.max_tenor().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(t.max(curve.min_tenor()).min(curve.max_tenor()))
}

/// Natural cubic spline of `curve` evaluated at `grid` months; no extrapolation.
pub fn spline_interpolate<T: Real>(curve: &YieldCurve<T>, grid: &[u32]) -> Result<YieldCurve<T>> {
    let spline = NaturalSpline::new(&curve.tenors, &curve.yields)?;
    let mut tenors = Vec::with_capacity(grid.len());
    let mut yields = Vec::with_capacity(grid.len());
    for &m in grid {
        let t = check_range(curve, m)?;
        tenors.push(month_years(m));
        yields.push(spline.eval(t));
    }
    YieldCurve::new(curve.date.clone(), tenors, yields)
}

// log P(m months) on one curve; month 0 is cash with log price 0.
fn log_prices<T: Real>(curve: &YieldCurve<T>, months: &[u32]) -> Result<Vec<T>> {
    let spline = NaturalSpline::new(&curve.tenors, &curve.yields)?;
    months
        .iter()
        .map(|&m| {
            if m == 0 {
                return Ok(T::zero());
            }
            let t = check_range(curve, m)?;
            Ok(-spline.eval(t) * month_years::<T>(m))
        })
        .collect()
}

fn validate_grid(grid: &[u32]) -> Result<()> {
    if grid.is_empty() || grid.contains(&0) {
        return Err(Error::InvalidInput("grid months must be positive".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("grid months must be strictly increasing".into()));
    }
    Ok(())
}

/// Panel of one-month returns `R(t, s) = log P(t-1, s+1) - log P(t, s)` over
/// all consecutive pairs of curves.
pub fn compute_returns<T: Real>(curves: &[YieldCurve<T>], grid: &[u32]) -> Result<ReturnPanel<T>> {
    validate_grid(grid)?;
    if curves.len() < 2 {
        return Err(Error::InsufficientDates {
            needed: 2,
            got: curves.len(),
        });
    }
    let shorter: Vec<u32> = grid.iter().map(|m| m - 1).collect();
    let mut rows = Vec::with_capacity(curves.len() - 1);
    let mut dates = Vec::with_capacity(curves.len() - 1);
    let mut today = log_prices(&curves[0], grid)?;
    for pair in curves.windows(2) {
        let tomorrow = log_prices(&pair[1], &shorter)?;
        rows.push(tomorrow.iter().zip(&today).map(|(&a, &b)| a - b).collect());
        dates.push(pair[0].date.clone());
        today = log_prices(&pair[1], grid)?;
    }
    ReturnPanel::new(dates, grid.to_vec(), rows)
}

/// Expected one-month returns under a static curve: `log P(t-1) - log P(t)`
/// on the same date, i.e. the one-month forward rate divided by 12.
pub fn expected_returns_static<T: Real>(curve: &YieldCurve<T>, grid: &[u32]) -> Result<Vec<T>> {
    validate_grid(grid)?;
    let shorter: Vec<u32> = grid.iter().map(|m| m - 1).collect();
    let long = log_prices(curve, grid)?;
    let short = log_prices(curve, &shorter)?;
    Ok(short.iter().zip(&long).map(|(&a, &b)| a - b).collect())
}

/// A return series is constant when its spread is at rounding level relative
/// to its mean; recomputed prices leave such noise on deterministic returns.
pub(crate) fn is_degenerate<T: Real>(sd: T, mean: T) -> bool {
    !(sd > T::epsilon().sqrt() * mean.abs())
}

/// Unbiased per-maturity variance of the panel returns.
pub fn variance_estimates<T: Real>(panel: &ReturnPanel<T>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(panel.n_maturities());
    for (j, s) in panel.stds.iter().enumerate() {
        let n = panel.returns.iter().filter(|r| r[j].is_finite()).count();
        if n < 2 {
            return Err(Error::InsufficientDates { needed: 2, got: n });
        }
        let v = *s * *s;
        if is_degenerate(*s, panel.means[j]) {
            return Err(Error::DegenerateMaturity { index: j });
        }
        out.push(v);
    }
    Ok(out)
}

/// Reads yield curves from a CSV file; see [`parse_curves`].
pub fn load_curves(path: impl AsRef<Path>) -> Result<Vec<YieldCurve<f64>>> {
    let file =
        std::fs::File::open(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_curves(file)
}

/// Parses curves in either layout:
///
/// * long: header `date,tenor_years,yield`, one row per (date, tenor), the
///   rows of a date contiguous and in increasing tenor order;
/// * wide: header `date,y_<tenor>,...`, one row per date, blank cells skipped.
///
/// Dates are ISO `YYYY-MM-DD`; the result is sorted by date.
pub fn parse_curves(reader: impl Read) -> Result<Vec<YieldCurve<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::ParseError {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    if header.is_empty() || header[0] != "date" {
        return Err(Error::ParseError {
            line: 1,
            message: "first column must be `date`".into(),
        });
    }
    let mut curves = if header.len() == 3 && header[1] == "tenor_years" && header[2] == "yield" {
        parse_long(&mut rdr)?
    } else if header.len() > 1 && header[1..].iter().all(|h| h.starts_with("y_")) {
        parse_wide(&mut rdr, &header)?
    } else {
        return Err(Error::ParseError {
            line: 1,
            message: "header must be `date,tenor_years,yield` or `date,y_<tenor>,...`".into(),
        });
    };
    if curves.is_empty() {
        return Err(Error::EmptyInput);
    }
    curves.sort_by(|a, b| a.date.cmp(&b.date));
    Ok(curves)
}

fn record_line(rec: &csv::StringRecord) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn parse_date(s: &str, line: usize) -> Result<String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(|d| d.format("%Y-%m-%d").to_string())
        .map_err(|e| Error::ParseError {
            line,
            message: format!("bad date `{s}`: {e}"),
        })
}

fn parse_number(s: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::ParseError {
        line,
        message: format!("bad {what} `{s}`"),
    })?;
    if !v.is_finite() {
        return Err(Error::ParseError {
            line,
            message: format!("{what} must be finite"),
        });
    }
    Ok(v)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::ParseError {
        line,
        message: e.to_string(),
    }
}

fn parse_long<R: Read>(rdr: &mut csv::Reader<R>) -> Result<Vec<YieldCurve<f64>>> {
    let mut curves: Vec<YieldCurve<f64>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut current: Option<(String, Vec<f64>, Vec<f64>, usize)> = None;
    let finish = |cur: (String, Vec<f64>, Vec<f64>, usize)| -> Result<YieldCurve<f64>> {
        let (date, tenors, yields, line) = cur;
        YieldCurve::new(date, tenors, yields).map_err(|e| match e {
            Error::NonMonotoneTenors { .. } => e,
            other => Error::ParseError {
                line,
                message: other.to_string(),
            },
        })
    };
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = record_line(&rec);
        if rec.len() != 3 {
            return Err(Error::ParseError {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let date = parse_date(&rec[0], line)?;
        let tenor = parse_number(&rec[1], line, "tenor")?;
        let y = parse_number(&rec[2], line, "yield")?;
        if tenor <= 0.0 {
            return Err(Error::ParseError {
                line,
                message: "tenor must be positive".into(),
            });
        }
        match current.as_mut() {
            Some(cur) if cur.0 == date => {
                cur.1.push(tenor);
                cur.2.push(y);
            }
            _ => {
                if let Some(done) = current.take() {
                    curves.push(finish(done)?);
                }
                if !seen.insert(date.clone()) {
                    return Err(Error::DuplicateDate { date });
                }
                current = Some((date, vec![tenor], vec![y], line));
            }
        }
    }
    if let Some(done) = current.take() {
        curves.push(finish(done)?);
    }
    Ok(curves)
}

fn parse_wide<R: Read>(rdr: &mut csv::Reader<R>, header: &[String]) -> Result<Vec<YieldCurve<f64>>> {
    let tenors: Vec<f64> = header[1..]
        .iter()
        .map(|h| parse_number(&h[2..], 1, "tenor"))
        .collect::<Result<_>>()?;
    if tenors.iter().any(|&t| t <= 0.0) || tenors.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneTenors { date: "header".into() });
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut curves = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = record_line(&rec);
        if rec.len() != header.len() {
            return Err(Error::ParseError {
                line,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        let date = parse_date(&rec[0], line)?;
        if !seen.insert(date.clone()) {
            return Err(Error::DuplicateDate { date });
        }
        let mut ts = Vec::new();
        let mut ys = Vec::new();
        for (k, cell) in rec.iter().skip(1).enumerate() {
            if cell.is_empty() {
                continue;
            }
            ts.push(tenors[k]);
            ys.push(parse_number(cell, line, "yield")?);
        }
        if ts.is_empty() {
            return Err(Error::ParseError {
                line,
                message: "row has no yields".into(),
            });
        }
        curves.push(YieldCurve::new(date, ts, ys)?);
    }
    Ok(curves)
}

/// Writes curves in the long layout with round-trip float formatting.
pub fn write_curves(mut out: impl Write, curves: &[YieldCurve<f64>]) -> Result<()> {
    writeln!(out, "date,tenor_years,yield")?;
    for c in curves {
        for (t, y) in c.tenors.iter().zip(&c.yields) {
            writeln!(out, "{},{},{}", c.date, t, y)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn months(r: std::ops::RangeInclusive<u32>) -> Vec<u32> {
        r.collect()
    }

    fn curve(date: &str, tenors: &[f64], f: impl Fn(f64) -> f64) -> YieldCurve<f64> {
        YieldCurve::new(date, tenors.to_vec(), tenors.iter().map(|&t| f(t)).collect()).unwrap()
    }

    const TENORS: [f64; 7] = [1.0 / 12.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0];

    #[test]
    fn parses_long_format_sorted() {
        let csv = "date,tenor_years,yield\n\
                   1990-02-01,0.0833,0.05\n1990-02-01,1,0.055\n1990-02-01,5,0.06\n\
                   1990-01-01,0.0833,0.049\n1990-01-01,1,0.054\n1990-01-01,5,0.059\n";
        let c = parse_curves(csv.as_bytes()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].date, "1990-01-01");
        assert_eq!(c[1].yields, vec![0.05, 0.055, 0.06]);
    }

    #[test]
    fn parses_wide_format() {
        let csv = "date,y_0.0833,y_1,y_5\n1990-01-01,0.049,0.054,0.059\n1990-02-01,0.05,,0.06\n";
        let c = parse_curves(csv.as_bytes()).unwrap();
        assert_eq!(c[0].tenors, vec![0.0833, 1.0, 5.0]);
        assert_eq!(c[1].tenors, vec![0.0833, 5.0]);
    }

    #[test]
    fn loader_errors() {
        let dup = "date,tenor_years,yield\n1990-01-01,1,0.05\n1990-02-01,1,0.05\n1990-01-01,2,0.05\n";
        assert!(matches!(parse_curves(dup.as_bytes()), Err(Error::DuplicateDate { .. })));
        let dup_wide = "date,y_1,y_2\n1990-01-01,0.05,0.05\n1990-01-01,0.05,0.05\n";
        assert!(matches!(
            parse_curves(dup_wide.as_bytes()),
            Err(Error::DuplicateDate { .. })
        ));
        assert!(matches!(
            parse_curves("date,tenor_years,yield\n".as_bytes()),
            Err(Error::EmptyInput)
        ));
        let nonmono = "date,tenor_years,yield\n1990-01-01,2,0.05\n1990-01-01,1,0.05\n";
        assert!(matches!(
            parse_curves(nonmono.as_bytes()),
            Err(Error::NonMonotoneTenors { .. })
        ));
        let bad = "date,tenor_years,yield\n1990-01-01,1,0.05\n1990-01-01,x,0.05\n";
        assert!(matches!(
            parse_curves(bad.as_bytes()),
            Err(Error::ParseError { line: 3, .. })
        ));
        let bad_date = "date,tenor_years,yield\n1990-13-01,1,0.05\n";
        assert!(matches!(
            parse_curves(bad_date.as_bytes()),
            Err(Error::ParseError { line: 2, .. })
        ));
    }

    #[test]
    fn write_then_parse_round_trips() {
        let c = vec![curve("2000-01-01", &TENORS, |t| 0.05 - 0.03 * (-t).exp())];
        let mut buf = Vec::new();
        write_curves(&mut buf, &c).unwrap();
        assert_eq!(parse_curves(buf.as_slice()).unwrap(), c);
    }

    #[test]
    fn spline_reproduces_constants_and_lines() {
        let flat = curve("d", &TENORS, |_| 0.05);
        let out = spline_interpolate(&flat, &months(1..=120)).unwrap();
        assert!(out.yields.iter().all(|&y| y == 0.05 || (y - 0.05).abs() < 1e-15));
        let lin = curve("d", &TENORS, |t| 0.02 + 0.001 * t);
        let out = spline_interpolate(&lin, &months(1..=120)).unwrap();
        for (t, y) in out.tenors.iter().zip(&out.yields) {
            assert!((y - (0.02 + 0.001 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn spline_is_exact_at_knots() {
        let c = curve("d", &[0.25, 0.5, 1.0, 2.0, 5.0, 10.0], |t| 0.05 - 0.03 * (-t).exp());
        let out = spline_interpolate(&c, &[3, 6, 12, 24, 60, 120]).unwrap();
        for (y, want) in out.yields.iter().zip(&c.yields) {
            assert!((y - want).abs() < 1e-12);
        }
    }

    #[test]
    fn spline_tracks_smooth_curve() {
        let f = |t: f64| 0.05 - 0.03 * (-t).exp();
        let c = curve("d", &[0.25, 0.5, 1.0, 2.0, 5.0, 10.0], f);
        let y3 = spline_interpolate(&c, &[36]).unwrap().yields[0];
        // scipy.interpolate.CubicSpline(x, y, bc_type="natural")(3.0)
        assert!((y3 - 0.04887836292430346).abs() < 1e-12, "{y3}");
        // the 2y..5y knot gap limits accuracy to a few basis points
        assert!((y3 - f(3.0)).abs() < 4e-4);
        // dense knots converge to the function
        let dense: Vec<f64> = (0..=400).map(|k| 0.25 + k as f64 * (9.75 / 400.0)).collect();
        let ys: Vec<f64> = dense.iter().map(|&t| f(t)).collect();
        let reference = NaturalSpline::new(&dense, &ys).unwrap().eval(3.0);
        assert!((reference - f(3.0)).abs() < 1e-8);
    }

    #[test]
    fn no_extrapolation() {
        let c = curve("d", &[0.25, 1.0, 5.0], |_| 0.05);
        assert!(matches!(
            spline_interpolate(&c, &[1]),
            Err(Error::GridOutOfRange { .. })
        ));
        assert!(matches!(
            spline_interpolate(&c, &[61]),
            Err(Error::GridOutOfRange { .. })
        ));
    }

    #[test]
    fn flat_static_curve_returns() {
        let c0 = curve("2000-01-01", &TENORS, |_| 0.05);
        let c1 = curve("2000-02-01", &TENORS, |_| 0.05);
        let grid = months(1..=120);
        let panel = compute_returns(&[c0.clone(), c1], &grid).unwrap();
        for &r in &panel.returns[0] {
            // -0.05 (t - 1/12) + 0.05 t
            assert!((r - 0.05 / 12.0).abs() < 1e-15);
        }
        let er = expected_returns_static(&c0, &grid).unwrap();
        assert_eq!(er, panel.returns[0]);
    }

    #[test]
    fn parallel_shift_return() {
        let c0 = curve("2000-01-01", &TENORS, |_| 0.05);
        let c1 = curve("2000-02-01", &TENORS, |_| 0.0499);
        let panel = compute_returns(&[c0, c1], &[60]).unwrap();
        let want = 0.05 / 12.0 + 0.0001 * (59.0 / 12.0);
        assert!((panel.returns[0][0] - want).abs() < 1e-15);
    }

    #[test]
    fn one_month_bond_matures_into_cash() {
        let c0 = curve("2000-01-01", &TENORS, |t| 0.03 + 0.01 * t);
        let c1 = curve("2000-02-01", &TENORS, |t| 0.04 + 0.01 * t);
        let panel = compute_returns(&[c0.clone(), c1], &[1]).unwrap();
        let y1 = 0.03 + 0.01 / 12.0;
        assert!((panel.returns[0][0] - y1 / 12.0).abs() < 1e-15);
        let er = expected_returns_static(&c0, &[1]).unwrap();
        assert!((er[0] - y1 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn static_expected_return_is_forward_rate() {
        let f = |t: f64| 0.05 - 0.03 * (-t).exp();
        let c = curve("d", &TENORS, f);
        let grid = months(2..=120);
        let er = expected_returns_static(&c, &grid).unwrap();
        let interp = spline_interpolate(&c, &months(1..=120)).unwrap();
        for (i, &m) in grid.iter().enumerate() {
            let (t1, t0) = (m as f64 / 12.0, (m - 1) as f64 / 12.0);
            let (y1, y0) = (interp.yields[(m - 1) as usize], interp.yields[(m - 2) as usize]);
            let fwd = (y1 * t1 - y0 * t0) / (t1 - t0);
            assert!((er[i] - fwd / 12.0).abs() < 1e-15);
        }
        // forward above spot on the rising part of the curve
        assert!(er.windows(2).take(20).all(|w| w[1] > w[0]));
    }

    #[test]
    fn variance_examples() {
        let p = ReturnPanel::new(vec!["a".into(), "b".into()], vec![1], vec![vec![0.01], vec![0.03]]).unwrap();
        assert!((variance_estimates(&p).unwrap()[0] - 0.0002f64).abs() < 1e-18);
        let flat = ReturnPanel::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![1],
            vec![vec![0.01], vec![0.01], vec![0.01]],
        )
        .unwrap();
        assert!(matches!(
            variance_estimates(&flat),
            Err(Error::DegenerateMaturity { index: 0 })
        ));
    }

    #[test]
    fn standardized_columns_have_unit_std() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|s| {
                (0..4)
                    .map(|j| ((s * 7 + j * 3) % 11) as f64 * 0.001 * (j + 1) as f64)
                    .collect()
            })
            .collect();
        let dates = (0..50).map(|s| s.to_string()).collect();
        let p = ReturnPanel::new(dates, vec![1, 2, 3, 4], rows).unwrap();
        let z = p.standardized().unwrap();
        for j in 0..4 {
            let col: Vec<f64> = z.iter().map(|r| r[j]).collect();
            let mean = col.iter().sum::<f64>() / 50.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 49.0;
            assert!(mean.abs() < 1e-12);
            assert!((var.sqrt() - 1.0).abs() < 1e-9);
        }
    }
}
