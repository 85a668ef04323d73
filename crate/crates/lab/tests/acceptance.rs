//! Acceptance gate: every criterion at its stated tolerance, one PASS/FAIL
//! line each.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use dynlab::config::{Config, ExperimentId, Params};
use dynlab::report::Report;
use dynlab::Verdict;
use dynlab_core::cfrac::{approximants, cf_eval, DigitStream, RotationNumber};
use dynlab_core::maps::{rotation_multiplier, PolynomialMap, C64, IS_CRITICAL_VALUE};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: usize,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn line(o: &Outcome) {
    // Written to the raw handle so the lines survive output capture.
    let mut e = std::io::stderr();
    let _ = writeln!(
        e,
        "[acceptance] criterion {:>2}: {} ({:.1} s) {}",
        o.id,
        if o.passed { "PASS" } else { "FAIL" },
        o.elapsed.as_secs_f64(),
        o.detail
    );
}

fn timed(id: usize, limit: Duration, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let detail = if in_time { detail } else { format!("{detail}; over the {} s budget", limit.as_secs()) };
    let o = Outcome { id, passed: ok && in_time, detail, elapsed };
    line(&o);
    o
}

fn run(id: ExperimentId) -> Report {
    dynlab::run(&Config::default_for(id)).expect("experiment runs")
}

fn summary(r: &Report) -> String {
    r.checks
        .iter()
        .map(|c| format!("{}={}", c.name, c.measured.map(|m| format!("{m:.6}")).unwrap_or_else(|| "n/a".into())))
        .collect::<Vec<_>>()
        .join(" ")
}

fn checks_pass(r: &Report, names: &[&str]) -> bool {
    names.iter().all(|n| r.check(n).is_some_and(|c| c.passed))
}

fn criterion_1() -> (bool, String) {
    let (mut a, mut b) = (BigUint::one(), BigUint::one());
    let mut fib = true;
    for c in RotationNumber::golden().approximants(20) {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
        fib &= c.q == a;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut det_ok, mut approx_ok) = (true, true);
    for _ in 0..1000 {
        let len = rng.gen_range(1..16);
        let mut digits = vec![0u64];
        digits.extend((0..len).map(|_| rng.gen_range(1u64..50)));
        let s = DigitStream::from_u64(&digits, &[]).expect("valid digits");
        let all: Vec<BigUint> = digits.iter().map(|&d| BigUint::from(d)).collect();
        let exact = cf_eval(&all).expect("finite cf");
        let cs = approximants(&s, len);
        for w in cs.windows(2) {
            let d = BigInt::from(w[1].p.clone()) * BigInt::from(w[0].q.clone())
                - BigInt::from(w[0].p.clone()) * BigInt::from(w[1].q.clone());
            det_ok &= d.abs().is_one();
        }
        for c in &cs {
            let err = (exact.clone() - c.to_rational()).abs();
            let q = BigInt::from(c.q.clone());
            approx_ok &= err < BigRational::new(BigInt::one(), &q * &q);
        }
    }
    (fib && det_ok && approx_ok, format!("fibonacci={fib} determinant={det_ok} inverse_square={approx_ok}"))
}

fn criterion_2() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let t: f64 = rng.gen();
        let lam = rotation_multiplier(t);
        let f = PolynomialMap::cubic_siegel(t);
        worst = worst.max(f.eval(C64::new(-1.0, 0.0)).norm());
        worst = worst.max((f.eval(C64::new(-1.0 / 3.0, 0.0)) + lam * (4.0 / 27.0)).norm());
        let q = PolynomialMap::quad_is(t);
        for (c, v) in q.critical_points().expect("critical points") {
            worst = worst.max((v - IS_CRITICAL_VALUE).norm()).max((q.eval(c) - IS_CRITICAL_VALUE).norm());
        }
    }
    (worst < 1e-12, format!("max identity error {worst:e}"))
}

fn criterion_3() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, tol) in [(1e-3, 0.05), (1e-4, 0.005)] {
        let sigma = PolynomialMap::quad_is(alpha).nonzero_fixed_points().expect("fixed point")[0];
        let dev = (sigma * 27.0 / C64::new(0.0, -32.0 * PI * alpha) - 1.0).norm();
        ok &= dev < tol;
        parts.push(format!("alpha={alpha:e}: {dev:.3e} (< {tol})"));
    }
    (ok, parts.join(", "))
}

fn verdict_pass(r: &Report) -> (bool, String) {
    (r.verdict() == Verdict::Pass, summary(r))
}

fn small_density() -> Config {
    let mut c = Config::default_for(ExperimentId::E1);
    if let Params::Density(p) = &mut c.params {
        p.resolution = 128;
        p.horizon = 500;
    }
    c
}

fn criterion_11() -> (bool, String) {
    let configs = [Config::default_for(ExperimentId::E4), Config::default_for(ExperimentId::E5), small_density()];
    let mut same = Vec::new();
    for c in &configs {
        let a = dynlab::run(c).expect("runs").csv();
        let b = dynlab::run(c).expect("runs").csv();
        same.push((c.experiment.name(), a == b));
    }
    let ok = same.iter().all(|s| s.1);
    (ok, same.iter().map(|(n, s)| format!("{n}={s}")).collect::<Vec<_>>().join(" "))
}

#[test]
fn acceptance_criteria() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let sec = Duration::from_secs;
    let outcomes = vec![
        timed(1, sec(1), criterion_1),
        timed(2, sec(1), criterion_2),
        timed(3, sec(1), criterion_3),
        timed(4, sec(10), || verdict_pass(&run(ExperimentId::Siegel))),
        timed(5, min(10), || verdict_pass(&run(ExperimentId::E1))),
        timed(5, min(10), || {
            let r = run(ExperimentId::E1b);
            (checks_pass(&r, &["density_last3_r0.8"]), summary(&r))
        }),
        timed(6, min(10), || verdict_pass(&run(ExperimentId::E2))),
        timed(7, min(1), || {
            let r = run(ExperimentId::E5);
            (checks_pass(&r, &["abel_median", "normalization", "multiplier_max_rel_error"]), summary(&r))
        }),
        timed(8, min(5), || {
            let r = run(ExperimentId::E3);
            (checks_pass(&r, &["profile_max_drop", "final_density_min"]), summary(&r))
        }),
        timed(9, min(10), || {
            let r = run(ExperimentId::E6);
            (checks_pass(&r, &["top_estimate", "drift_top_two"]), summary(&r))
        }),
        timed(10, min(1), || {
            let r = run(ExperimentId::E4);
            (checks_pass(&r, &["all_counts_two", "v_margin"]), summary(&r))
        }),
        timed(11, min(10), criterion_11),
    ];
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
