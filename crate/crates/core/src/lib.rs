//! Optimal bond portfolios from a maturity-difference correlation structure.
//!
//! The pipeline runs: yield curves ([`marketdata`]) → correlation estimate and
//! Padé fit ([`corrfit`]) → Toeplitz symbol and Wiener-Hopf factorization
//! ([`wienerhopf`]) → optimal allocation ([`portfolio`]) → arbitrage checks
//! ([`arbitrage`]). All numerical code is generic over [`Real`]; the aliases
//! below fix the common precisions. [`synthetic`] generates curve panels
//! with a known correlation structure for testing.

// Negated comparisons double as NaN guards.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod arbitrage;
pub mod corrfit;
pub mod error;
pub mod laurent;
pub mod linalg;
pub mod marketdata;
pub mod portfolio;
mod scalar;
pub mod synthetic;
pub mod wienerhopf;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Laurent64 = laurent::LaurentSeries<f64>;
pub type Polynomial64 = laurent::Polynomial<f64>;
pub type Rational64 = laurent::RationalFunction<f64>;
pub type Symbol64 = wienerhopf::SymbolSpectrum<f64>;
pub type Factorization64 = wienerhopf::Factorization<f64>;
pub type Expectations64 = portfolio::NormalizedExpectations<f64>;
pub type Allocation64 = portfolio::Allocation<f64>;
pub type PadeFit64 = corrfit::PadeFit<f64>;
pub type Correlation64 = corrfit::CorrelationEstimate<f64>;
pub type Panel64 = marketdata::ReturnPanel<f64>;
pub type Curve64 = marketdata::YieldCurve<f64>;
pub type ArbitrageReport64 = arbitrage::ArbitrageReport<f64>;

pub type Laurent32 = laurent::LaurentSeries<f32>;
pub type Polynomial32 = laurent::Polynomial<f32>;
pub type Rational32 = laurent::RationalFunction<f32>;
pub type Symbol32 = wienerhopf::SymbolSpectrum<f32>;
pub type Factorization32 = wienerhopf::Factorization<f32>;
pub type Expectations32 = portfolio::NormalizedExpectations<f32>;
pub type Allocation32 = portfolio::Allocation<f32>;
