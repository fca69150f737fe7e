//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_FAIL` are evaluated exactly as stated and
//! reported, but do not fail the run; every other criterion must pass.

use std::time::{Duration, Instant};

use bondwh::arbitrage::invertibility_check;
use bondwh::corrfit::{estimate_correlation, pade_classical, pade_generalized, PadeOrder};
use bondwh::laurent::{LaurentSeries, Polynomial, RationalFunction};
use bondwh::marketdata::{compute_returns, parse_curves, write_curves};
use bondwh::portfolio::{ar1_closed_form, utility};
use bondwh::synthetic::{generate_curves, SyntheticConfig};
use bondwh::wienerhopf::{apply_inverse, build_symbol, factorize, toeplitz_solve_oracle, SymbolSpectrum};
use bondwh_cli::config::{Overrides, RunConfig, Sizing};
use bondwh_cli::{pipeline, run, Command};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// The sign claim cannot hold for negative `beta`: the holdings are
/// `k (beta - alpha) beta^(t-1)` and alternate in sign.
const EXPECTED_FAIL: &[&str] = &["sign-pattern"];

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    Outcome {
        name,
        pass,
        detail,
        elapsed: start.elapsed(),
    }
}

const AR1_GRID: [f64; 5] = [-0.5, -0.25, 0.25, 0.5, 0.9];
const GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];

fn model_config(alpha: f64, beta: f64, gamma: f64, trunc: usize) -> RunConfig {
    let text = format!(
        "trunc = {trunc}\ngamma = {gamma}\n[model]\nchat_numerator = [1.0]\nchat_denominator = [1.0, {}]\n\
         expect_e0 = 1.0\nexpect_beta = {beta}\n",
        -alpha
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.toml");
    std::fs::write(&path, text).unwrap();
    RunConfig::load(&Overrides {
        config: Some(path),
        ..Default::default()
    })
    .unwrap()
}

/// Utility and raw holdings from the pipeline stages in pure-model mode.
fn model_run(cfg: &RunConfig) -> (f64, Vec<f64>) {
    let chat = pipeline::model_chat(cfg).unwrap();
    let sym = pipeline::symbol(&chat, cfg).unwrap();
    let fac = pipeline::factorization(&sym).unwrap();
    let e = pipeline::model_expectations(cfg).unwrap();
    let a = pipeline::allocate(&sym, &fac, &e, cfg.sizing, cfg.trunc).unwrap();
    (a.optimal.utility.unwrap(), a.optimal.raw)
}

fn ar1_utility() -> Outcome {
    let configs: Vec<(f64, f64, f64, RunConfig)> = AR1_GRID
        .iter()
        .flat_map(|&a| AR1_GRID.iter().map(move |&b| (a, b)))
        .flat_map(|(a, b)| GAMMAS.iter().map(move |&g| (a, b, g)))
        .map(|(a, b, g)| (a, b, g, model_config(a, b, g, 256)))
        .collect();
    timed("ar1-utility", || {
        let mut worst: f64 = 0.0;
        for (a, b, g, cfg) in &configs {
            let (u, _) = model_run(cfg);
            let (_, exact) = ar1_closed_form(*a, *b, 1.0, *g).unwrap();
            worst = worst.max((u - exact).abs());
        }
        let example = model_run(&model_config(0.5, 0.25, 0.5, 256)).0;
        (
            worst <= 1e-8 && (example - 0.5444444).abs() < 5e-8,
            format!(
                "{} cases, max |U - closed form| = {worst:.1e}; alpha=0.5 beta=0.25 gamma=0.5 gives U = {example:.7}",
                configs.len()
            ),
        )
    })
}

fn root(rng: &mut ChaCha8Rng) -> f64 {
    // modulus in [1.1, 3] keeps every root 0.1 or more from the circle
    rng.random_range(1.1..3.0)
}

fn random_roots(rng: &mut ChaCha8Rng, degree: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(degree);
    while out.len() < degree {
        if degree - out.len() >= 2 && rng.random_bool(0.5) {
            let z = Complex64::from_polar(root(rng), rng.random_range(0.1..std::f64::consts::PI - 0.1));
            out.push(z);
            out.push(z.conj());
        } else {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            out.push(Complex64::new(sign * root(rng), 0.0));
        }
    }
    out
}

fn off_circle(roots: &[Complex64]) -> bool {
    roots.iter().all(|r| (r.norm() - 1.0).abs() >= 0.1)
}

/// Rational symbols of degree at most 6 whose zeros and poles all lie 0.1 or
/// more from the unit circle, found by rejection sampling.
fn random_symbols(count: usize) -> Vec<SymbolSpectrum<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100_000, "rejection sampler stalled");
        let num_deg = rng.random_range(0..=3);
        let den_deg = rng.random_range(1..=3);
        let num = Polynomial::from_roots_unit_constant(&random_roots(&mut rng, num_deg));
        let den = Polynomial::from_roots_unit_constant(&random_roots(&mut rng, den_deg));
        let Ok(chat) = RationalFunction::from_polynomials(num, den) else {
            continue;
        };
        let Ok(sym) = build_symbol(&chat, 200) else { continue };
        let rational = sym.rational.as_ref().expect("built from a rational function");
        let degree = rational.numerator().degree().max(rational.denominator().degree());
        if degree > 6
            || sym.circle_min.is_nan()
            || sym.circle_min <= 0.0
            || !off_circle(rational.numerator_roots())
            || !off_circle(rational.denominator_roots())
        {
            continue;
        }
        out.push(sym);
    }
    out
}

fn factorization_oracle() -> (Outcome, Outcome) {
    let symbols = random_symbols(50);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut product = 0.0f64;
    let mut failures = 0;
    let oracle = timed("factorization-oracle", || {
        let mut worst = 0.0f64;
        for sym in &symbols {
            let fac = match factorize(sym) {
                Ok(f) => f,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            product = product.max(fac.product_error);
            let e: Vec<f64> = (0..50).map(|_| StandardNormal.sample(&mut rng)).collect();
            let e = LaurentSeries::power_series(e).unwrap();
            let fast = apply_inverse(&fac, &e, 200).unwrap();
            let slow = toeplitz_solve_oracle(sym, &e, 200).unwrap();
            for k in 0..50 {
                worst = worst.max((fast.coeff(k) - slow.coeff(k)).abs());
            }
        }
        (
            failures == 0 && worst <= 1e-6,
            format!("50 symbols, {failures} factorization failures, max error on first 50 coefficients = {worst:.1e}"),
        )
    });
    let identity = Outcome {
        name: "factorization-product-identity",
        pass: failures == 0 && product <= 1e-8,
        detail: format!("max |F+ F- A - 1| over 64 circle points = {product:.1e}"),
        elapsed: Duration::ZERO,
    };
    (oracle, identity)
}

fn invertibility_endpoints() -> Outcome {
    timed("invertibility-ar1", || {
        let cfg = model_config(0.5, 0.25, 1.0, 256);
        let sym = pipeline::symbol(&pipeline::model_chat(&cfg).unwrap(), &cfg).unwrap();
        let (ok, (lo, hi)) = invertibility_check(&sym);
        let err = (lo - 1.0 / 3.0).abs().max((hi - 3.0).abs());
        (
            ok && err <= 1e-9,
            format!("interval [{lo:.12}, {hi:.12}], endpoint error {err:.1e}, invertible = {ok}"),
        )
    })
}

/// Correlation-like sequences: normalized mixtures of geometric decays.
fn mixture(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let terms: Vec<(f64, f64)> = (0..rng.random_range(2..=4))
        .map(|_| (rng.random_range(-0.9..0.95), rng.random_range(0.05..1.0)))
        .collect();
    let total: f64 = terms.iter().map(|t| t.1).sum();
    (0..len)
        .map(|i| terms.iter().map(|&(r, w)| w / total * r.powi(i as i32)).sum())
        .collect()
}

const ORDERS: [(usize, usize); 6] = [(0, 1), (1, 1), (1, 2), (2, 1), (0, 2), (2, 2)];

fn classical_pade() -> Outcome {
    timed("pade-classical", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut interp = 0.0f64;
        let mut fits = 0;
        for _ in 0..100 {
            let c = mixture(&mut rng, 8);
            for (m, n) in ORDERS {
                let Ok(fit) = pade_classical(&c, PadeOrder::classical(m, n).unwrap()) else {
                    continue;
                };
                fits += 1;
                let t = fit.taylor(m + n + 1);
                for i in 0..=m + n {
                    interp = interp.max((t[i] - c[i]).abs());
                }
            }
        }
        // planted [1/2]: (1 + 0.3 z) / ((1 - 0.2 z)(1 - 0.5 z))
        let num = [1.0, 0.3];
        let den = [1.0, -0.7, 0.1];
        let planted =
            RationalFunction::from_polynomials(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec())).unwrap();
        let c: Vec<f64> = {
            let s = bondwh::laurent::expand_rational(&planted, bondwh::laurent::Direction::Plus, 3).unwrap();
            (0..4).map(|k| s.coeff(k)).collect()
        };
        let fit = pade_classical(&c, PadeOrder::classical(1, 2).unwrap()).unwrap();
        let mut recovery = 0.0f64;
        for (k, &v) in num.iter().enumerate() {
            recovery = recovery.max((fit.rational.numerator().coeff(k) - v).abs());
        }
        for (k, &v) in den.iter().enumerate() {
            recovery = recovery.max((fit.rational.denominator().coeff(k) - v).abs());
        }
        (
            fits > 0 && interp <= 1e-10 && recovery <= 1e-9,
            format!("{fits} fits, max Taylor mismatch {interp:.1e}; planted [1/2] recovered to {recovery:.1e}"),
        )
    })
}

fn generalized_k0() -> Outcome {
    timed("pade-generalized-k0", || {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut worst = 0.0f64;
        let mut compared = 0;
        for _ in 0..100 {
            let c = mixture(&mut rng, 8);
            for (m, n) in ORDERS {
                let order = PadeOrder::classical(m, n).unwrap();
                let (Ok(a), Ok(b)) = (pade_classical(&c, order), pade_generalized(&c, order)) else {
                    continue;
                };
                compared += 1;
                let pairs = [
                    (a.rational.numerator(), b.rational.numerator()),
                    (a.rational.denominator(), b.rational.denominator()),
                ];
                for (pa, pb) in pairs {
                    for k in 0..=pa.degree().max(pb.degree()) {
                        worst = worst.max((pa.coeff(k) - pb.coeff(k)).abs());
                    }
                }
            }
        }
        (
            compared > 0 && worst <= 1e-8,
            format!("{compared} orders compared, max coefficient difference in P and Q {worst:.1e}"),
        )
    })
}

fn fixture() -> SyntheticConfig {
    SyntheticConfig {
        seed: 42,
        dates: 500,
        maturities: 40,
        correlation_decay: 0.9,
        ..SyntheticConfig::default()
    }
}

fn estimator_round_trip() -> Outcome {
    timed("estimator-round-trip", || {
        let cfg = fixture();
        let mut bytes = Vec::new();
        write_curves(&mut bytes, &generate_curves(&cfg).unwrap()).unwrap();
        let curves = parse_curves(bytes.as_slice()).unwrap();
        let panel = compute_returns(&curves, &cfg.grid()).unwrap();
        let est = estimate_correlation(&panel, 12).unwrap();
        let worst = (0..=12)
            .map(|tau| (est.values[tau] - 0.9f64.powi(tau as i32)).abs())
            .fold(0.0, f64::max);
        (worst <= 0.1, format!("max_(tau<=12) |C(tau) - 0.9^tau| = {worst:.4}"))
    })
}

fn backtest_variance() -> Outcome {
    timed("backtest-variance", || {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("data");
        let gen = RunConfig::load(&Overrides {
            out: Some(data.clone()),
            seed: Some(42),
            ..Default::default()
        })
        .unwrap();
        run(Command::Generate, &gen).unwrap();
        let cfg = RunConfig::load(&Overrides {
            input: Some(data.join("curves.csv")),
            out: Some(dir.path().join("out")),
            sum_to_one: true,
            ..Default::default()
        })
        .unwrap();
        let s = run(Command::Backtest, &cfg).unwrap();
        let (opt, bench) = (s.backtest_optimal.unwrap(), s.backtest_benchmark.unwrap());
        (
            opt.variance <= bench.variance,
            format!(
                "walk-forward 36 months, [0/5/28]: variance optimal {:.3e} vs benchmark {:.3e} (annualized returns)",
                opt.variance, bench.variance
            ),
        )
    })
}

fn stationarity() -> Outcome {
    timed("stationarity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut worst_gain = f64::NEG_INFINITY;
        let mut cases = Vec::new();

        let cfg = model_config(0.5, 0.25, 0.5, 256);
        let sym = pipeline::symbol(&pipeline::model_chat(&cfg).unwrap(), &cfg).unwrap();
        cases.push((sym, pipeline::model_expectations(&cfg).unwrap(), 0.5, 256));

        let fx = fixture();
        let curves = generate_curves(&fx).unwrap();
        let panel = compute_returns(&curves, &fx.grid()).unwrap();
        let est = estimate_correlation(&panel, 33).unwrap();
        let fit = pade_generalized(&est.values, PadeOrder::new(0, 5, 28).unwrap()).unwrap();
        let sym = build_symbol(&fit.rational, 240).unwrap();
        let e = pipeline::market_expectations(curves.last().unwrap(), &panel, &fx.grid()).unwrap();
        cases.push((sym, e, 1.0, 240));

        for (sym, e, gamma, t) in &cases {
            let fac = factorize(sym).unwrap();
            let ystar = apply_inverse(&fac, &e.series, *t).unwrap().scale(1.0 / (2.0 * gamma));
            let u0 = utility(sym, e, &ystar, *gamma).unwrap();
            for _ in 0..100 {
                let d: Vec<f64> = (0..*t).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                let d = LaurentSeries::power_series(d.iter().map(|x| 1e-4 * x / norm).collect()).unwrap();
                let u1 = utility(sym, e, &ystar.add(&d), *gamma).unwrap();
                worst_gain = worst_gain.max(u1 - u0);
            }
        }
        (
            worst_gain <= 1e-8,
            format!("AR(1) and fitted fixture, 100 directions each, step 1e-4: max U(Y+d) - U(Y) = {worst_gain:.1e}"),
        )
    })
}

fn sign_pattern() -> Outcome {
    timed("sign-pattern", || {
        let mut holds = 0;
        let mut broken = Vec::new();
        for &alpha in &AR1_GRID {
            for &beta in &AR1_GRID {
                if alpha == beta {
                    continue;
                }
                let cfg = model_config(alpha, beta, 1.0, 256);
                assert_eq!(cfg.sizing, Sizing::Gamma(1.0));
                let (_, x) = model_run(&cfg);
                // only maturities whose holding is resolvable above rounding
                let floor = 1e-12 * x[0].abs();
                let want = if beta < alpha { -1.0 } else { 1.0 };
                let ok = x[1..].iter().filter(|v| v.abs() > floor).all(|v| v.signum() == want);
                if ok {
                    holds += 1;
                } else {
                    broken.push(format!("({alpha},{beta})"));
                }
            }
        }
        (
            broken.is_empty(),
            format!(
                "holds for {holds}/20 pairs; fails for {}",
                if broken.is_empty() {
                    "none".into()
                } else {
                    broken.join(" ")
                }
            ),
        )
    })
}

#[test]
fn acceptance() {
    let mut outcomes = vec![ar1_utility()];
    let (oracle, identity) = factorization_oracle();
    outcomes.push(oracle);
    outcomes.push(identity);
    outcomes.push(invertibility_endpoints());
    outcomes.push(classical_pade());
    outcomes.push(generalized_k0());
    outcomes.push(estimator_round_trip());
    outcomes.push(backtest_variance());
    outcomes.push(stationarity());
    outcomes.push(sign_pattern());

    let budgets = [
        ("ar1-utility", 1.0),
        ("factorization-oracle", 30.0),
        ("estimator-round-trip", 10.0),
    ];
    let mut unexpected = Vec::new();
    for o in &mut outcomes {
        if let Some(&(_, limit)) = budgets.iter().find(|b| b.0 == o.name) {
            if o.elapsed.as_secs_f64() >= limit {
                o.pass = false;
                o.detail.push_str(&format!("; over the {limit} s budget"));
            }
        }
        let expected = EXPECTED_FAIL.contains(&o.name);
        let tag = match (o.pass, expected) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        println!("{tag} [{}] {} ({:.2} s)", o.name, o.detail, o.elapsed.as_secs_f64());
        if !o.pass && !expected {
            unexpected.push(o.name);
        }
    }
    assert!(unexpected.is_empty(), "failed criteria: {unexpected:?}");
}
