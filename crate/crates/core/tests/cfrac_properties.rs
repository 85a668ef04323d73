use dynlab_core::cfrac::*;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn digits_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..50, 1..16)
}

fn stream(frac: &[u64]) -> DigitStream {
    let mut prefix = vec![0u64];
    prefix.extend_from_slice(frac);
    DigitStream::from_u64(&prefix, &[]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn convergent_determinant_is_unit(frac in digits_strategy()) {
        let s = stream(&frac);
        let cs: Vec<Approximant> = s.convergents().collect();
        for w in cs.windows(2) {
            let lhs = BigInt::from(w[1].p.clone()) * BigInt::from(w[0].q.clone());
            let rhs = BigInt::from(w[0].p.clone()) * BigInt::from(w[1].q.clone());
            prop_assert_eq!((lhs - rhs).abs(), BigInt::one());
        }
    }

    #[test]
    fn convergents_approximate_within_inverse_square(frac in digits_strategy()) {
        let s = stream(&frac);
        let all: Vec<BigUint> = s.iter().cloned().collect();
        let alpha = cf_eval(&all).unwrap();
        for c in approximants(&s, frac.len()) {
            let err = (alpha.clone() - c.to_rational()).abs();
            let q = BigInt::from(c.q.clone());
            let bound = BigRational::new(BigInt::one(), &q * &q);
            if err.is_zero() {
                continue;
            }
            prop_assert!(err < bound, "index {}", c.index);
        }
    }

    #[test]
    fn expansion_of_exact_value_recovers_digits(frac in digits_strategy(), last in 2u64..50) {
        let mut f = frac.clone();
        f.push(last);
        let s = stream(&f);
        let all: Vec<BigUint> = s.iter().cloned().collect();
        let x = Real::exact(cf_eval(&all).unwrap());
        let back = cf_expand(&x, f.len() + 5).unwrap();
        prop_assert_eq!(back.take(f.len() + 1), all);
    }

    #[test]
    fn brjuno_partial_sums_nondecreasing(frac in digits_strategy()) {
        let s = stream(&frac);
        let sums: Vec<f64> = (0..=frac.len()).map(|n| brjuno_sum(&s, n)).collect();
        prop_assert!(sums.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn golden_denominators_are_fibonacci() {
    let golden = RotationNumber::golden();
    let (mut a, mut b) = (BigUint::one(), BigUint::one());
    for c in golden.approximants(20) {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
        // q_n = F_{n+1}: q_1 = 1, q_2 = 2, q_3 = 3, ...
        assert_eq!(c.q, a, "index {}", c.index);
    }
}

#[test]
fn golden_brjuno_increments_shrink() {
    let g = RotationNumber::golden();
    let inc: Vec<f64> = (1..60).map(|n| brjuno_sum(g.digits(), n + 1) - brjuno_sum(g.digits(), n)).collect();
    assert!(inc.iter().skip(40).all(|d| *d < 1e-6 && *d >= 0.0));
    let direct: f64 = {
        let (mut q0, mut q1) = (1.0f64, 1.0f64);
        let mut s = 0.0;
        for _ in 0..30 {
            s += q1.ln() / q0;
            let q2 = q1 + q0;
            q0 = q1;
            q1 = q2;
        }
        s
    };
    assert!((brjuno_sum(g.digits(), 30) - direct).abs() < 1e-12);
}

#[test]
fn growth_rule_for_doubly_exponential_digits() {
    let alpha = RotationNumber::periodic(3);
    let mut prev: Option<(f64, f64)> = None;
    for c in alpha.approximants(6).into_iter().skip(1) {
        let q = c.q.clone();
        let q_f = q.to_string().parse::<f64>().unwrap();
        let a_n = BigUint::one() << (q_f.powf(1.5).ceil() as usize);
        let (log_root, root) = schedule_growth(&a_n, &q);
        if let Some((lr, r)) = prev {
            assert!(log_root <= lr + 1e-12, "(log A)^(1/q) not decreasing at q = {q}");
            assert!(root >= r - 1e-12, "A^(1/q) not increasing at q = {q}");
        }
        prev = Some((log_root, root));
    }
}

#[test]
fn perturbed_rotation_converges_to_base() {
    let alpha = RotationNumber::golden();
    let theta = RotationNumber::periodic(3);
    let base = alpha.value();
    let mut errs = Vec::new();
    for n in 1..8 {
        let a_n = BigUint::from(n as u64 + 1);
        let an = perturbed_rotation(&alpha, n, &a_n, &theta).unwrap();
        assert_eq!(an.digits().take(n + 1), alpha.digits().take(n + 1));
        errs.push((an.value() - base.clone()).abs());
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn digit_stream_json_round_trip() {
    let big = BigUint::one() << 80usize;
    let s = DigitStream::new(vec![BigUint::zero(), big.clone(), BigUint::from(2u8)], vec![BigUint::one()]).unwrap();
    let json = serde_json::to_string(&s).unwrap();
    assert!(json.contains(&format!("\"{big}\"")));
    let back: DigitStream = serde_json::from_str(&json).unwrap();
    assert_eq!(back, s);
    let g: RotationNumber = serde_json::from_str(r#"{"prefix":[0],"period":[1]}"#).unwrap();
    assert_eq!(g, RotationNumber::golden());
    assert!(serde_json::from_str::<RotationNumber>(r#"{"prefix":[1,2]}"#).is_err());
}
