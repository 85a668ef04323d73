use std::f64::consts::PI;

use dynlab_core::cfrac::RotationNumber;
use dynlab_core::maps::*;
use dynlab_core::measure::winding_number;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

fn families(theta: f64) -> Vec<PolynomialMap> {
    vec![
        PolynomialMap::quad_bc(theta),
        PolynomialMap::cubic_siegel(theta),
        PolynomialMap::quad_is(theta),
        PolynomialMap::perturbed_quad(theta, 1e-3, 3).unwrap(),
        PolynomialMap::perturbed_quad(theta, 0.2, 6).unwrap(),
    ]
}

fn random_point(r: &mut ChaCha8Rng, half: f64) -> C64 {
    C64::new(r.gen_range(-half..half), r.gen_range(-half..half))
}

#[test]
fn derivative_matches_central_differences() {
    let mut r = rng();
    let h = 1e-5;
    for map in families(0.3819660112501051) {
        for _ in 0..50 {
            let z = random_point(&mut r, 1.5);
            let fd = (map.eval(z + h) - map.eval(z - h)) / (2.0 * h);
            let d = map.deriv(z);
            assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0), "{:?} at {z}", map.family());
        }
    }
}

#[test]
fn critical_points_are_roots_of_derivative() {
    let mut r = rng();
    for _ in 0..10 {
        let theta = r.gen_range(0.01..0.99);
        for map in families(theta) {
            let c = map.coeffs();
            let dc: Vec<C64> = c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
            let roots = polynomial_roots(&dc).unwrap();
            let crit = map.critical_points().unwrap();
            assert_eq!(roots.len(), crit.len());
            for (p, v) in &crit {
                let nearest = roots.iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-10, "{:?} theta={theta}", map.family());
                assert!((map.eval(*p) - v).norm() < 1e-12);
            }
            assert!(crit.windows(2).all(|w| w[0].0.re <= w[1].0.re));
        }
    }
}

#[test]
fn critical_value_identities_for_random_parameters() {
    let mut r = rng();
    for _ in 0..20 {
        let t = r.gen_range(0.0..1.0);
        let lam = rotation_multiplier(t);
        let f = PolynomialMap::cubic_siegel(t);
        assert!(f.eval(C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((f.eval(C64::new(-1.0 / 3.0, 0.0)) - (-4.0 / 27.0) * lam).norm() < 1e-12);
        let q = PolynomialMap::quad_is(t);
        let (c, v) = q.critical_points().unwrap()[0];
        assert!((c - (-8.0 / 27.0) / lam).norm() < 1e-12);
        assert!((v - C64::new(IS_CRITICAL_VALUE, 0.0)).norm() < 1e-12);
        assert!((q.eval(c) - C64::new(IS_CRITICAL_VALUE, 0.0)).norm() < 1e-12);
        let p = PolynomialMap::quad_bc(t);
        let (c, v) = p.critical_points().unwrap()[0];
        assert!((c + lam / 2.0).norm() < 1e-12);
        assert!((v + lam * lam / 4.0).norm() < 1e-12);
    }
}

#[test]
fn fixed_points_are_fixed() {
    let mut r = rng();
    for _ in 0..20 {
        let t = r.gen_range(0.01..0.99);
        for map in families(t) {
            for s in map.nonzero_fixed_points().unwrap() {
                let tol = 1e-12 * (1.0 + s.norm()).powi(map.degree() as i32);
                assert!((map.eval(s) - s).norm() < tol, "{:?}", map.family());
            }
        }
    }
    assert!(PolynomialMap::quad_is(0.0).nonzero_fixed_points().is_err());
}

#[test]
fn sigma_asymptotics() {
    for (alpha, tol) in [(1e-3, 0.05), (1e-4, 0.005)] {
        let sigma = PolynomialMap::quad_is(alpha).nonzero_fixed_points().unwrap()[0];
        let model = C64::new(0.0, -32.0 * PI * alpha / 27.0);
        assert!((sigma / model - 1.0).norm() < tol, "alpha = {alpha}");
        let closed = (16.0 / 27.0) * (1.0 - rotation_multiplier(alpha)) / rotation_multiplier(2.0 * alpha);
        assert!((sigma - closed).norm() < 1e-15);
    }
}

#[test]
fn cubic_fixed_point_polynomial_cross_check() {
    for t in [0.1, 0.3819660112501051, 0.77] {
        let f = PolynomialMap::cubic_siegel(t);
        let lam = rotation_multiplier(t);
        let roots = polynomial_roots(&[C64::new(0.0, 0.0), lam - 1.0, 2.0 * lam, lam]).unwrap();
        let mut expected = f.nonzero_fixed_points().unwrap();
        expected.push(C64::new(0.0, 0.0));
        let half = C64::from_polar(1.0, -PI * t);
        for closed in [half - 1.0, -half - 1.0] {
            assert!(expected.iter().any(|e| (e - closed).norm() < 1e-12));
        }
        for e in &expected {
            assert!(roots.iter().any(|q| (q - e).norm() < 1e-10), "t={t} {e}");
        }
    }
}

#[test]
fn domain_membership_matches_winding_oracle() {
    let curve: Vec<C64> = IsDomain::boundary(4096);
    let mut r = rng();
    let mut checked = 0;
    while checked < 100 {
        let z = C64::new(r.gen_range(-3.0..1.0), r.gen_range(-2.0..2.0));
        let near = curve.iter().map(|c| (c - z).norm()).fold(f64::INFINITY, f64::min);
        if near < 1e-3 {
            continue;
        }
        let oracle = winding_number(&curve, z) != 0;
        assert_eq!(is_in_v(z), oracle, "{z}");
        checked += 1;
    }
    assert!(is_in_v(C64::new(0.0, 0.0)));
    assert!(is_in_v(C64::new(-1.0 / 3.0, 0.0)));
    assert!(!is_in_v(C64::new(-1.0, 0.0)));
}

#[test]
fn orbit_records() {
    let f = PolynomialMap::cubic_siegel(RotationNumber::golden().to_f64());
    let rec = f.orbit(C64::new(0.0, 0.0), 100, 10.0, false);
    assert!(!rec.escaped && rec.points.iter().all(|z| z.norm() == 0.0));
    let rec = f.orbit(C64::new(-1.0 / 3.0, 0.0), 10_000, 10.0, true);
    assert_eq!(rec.left_domain, None);
    assert!(!rec.escaped);
    for w in rec.points.windows(2).take(500) {
        assert_eq!(w[1], f.eval(w[0]));
    }
    let p = PolynomialMap::quad_bc(0.3);
    let rec = p.orbit(C64::new(10.0, 0.0), 50, 4.0, false);
    assert!(rec.escaped && rec.escape_index.unwrap() <= 1);
    assert!(rec.points[rec.escape_index.unwrap()].norm() > 4.0);
}

#[test]
fn root_finder_basics() {
    let mut roots = polynomial_roots(&[C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert!((roots[0] + 1.0).norm() < 1e-14 && (roots[1] - 1.0).norm() < 1e-14);
    let zero = C64::new(0.0, 0.0);
    let triple = polynomial_roots(&[zero, zero, zero, C64::new(1.0, 0.0)]).unwrap();
    assert_eq!(cluster_roots(&triple), vec![(zero, 3)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_have_small_residual(
        re in prop::collection::vec(-2.0f64..2.0, 2..9),
        im in prop::collection::vec(-2.0f64..2.0, 9),
    ) {
        let coeffs: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
        prop_assume!(coeffs.last().unwrap().norm() > 0.1);
        let roots = polynomial_roots(&coeffs).unwrap();
        prop_assert_eq!(roots.len(), coeffs.len() - 1);
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for z in roots {
            prop_assert!(horner(&coeffs, z).norm() < 1e-10 * scale * z.norm().max(1.0).powi(coeffs.len() as i32 - 1));
        }
    }

    #[test]
    fn preimage_counts(theta in 0.01f64..0.99, wr in -1.0f64..1.0, wi in -1.0f64..1.0) {
        let p = PolynomialMap::perturbed_quad(theta, 0.0, 3).unwrap();
        let w = C64::new(wr, wi);
        prop_assert_eq!(p.count_preimages_in(w, |_| true).unwrap(), 2);
        prop_assert_eq!(p.count_preimages_in(w, |z| z.norm() > 100.0).unwrap(), 0);
    }
}

#[test]
fn quadratic_like_verification() {
    let theta = RotationNumber::golden().to_f64();
    let (r, r2) = quadratic_like_radius(&[theta], 3.0, 8).unwrap();
    let p = PolynomialMap::quad_bc(theta);
    let f = PolynomialMap::perturbed_quad(theta, 1e-3, 3).unwrap();
    let mut g = rng();
    for _ in 0..200 {
        let w = C64::from_polar(r * g.gen::<f64>().sqrt(), 2.0 * PI * g.gen::<f64>());
        let n = f.count_preimages_in(w, |z| p.eval(z).norm() < r2).unwrap();
        assert_eq!(n, 2, "{w}");
    }
    assert!(preimage_max_modulus(&p, r, 256).unwrap() < r);
}

#[test]
fn descriptor_json_shape() {
    let d: MapDescriptor =
        serde_json::from_str(r#"{"family":"cubic_siegel","theta":{"prefix":[0,1,1],"period":[1]}}"#).unwrap();
    let m = d.build().unwrap();
    assert_eq!(m.family(), Family::CubicSiegel);
    assert!((m.theta() - RotationNumber::golden().to_f64()).abs() < 1e-15);
    let back = serde_json::to_value(&d).unwrap();
    assert_eq!(back["family"], "cubic_siegel");
}

#[test]
fn exit_steps_match_naive_iteration() {
    let p = PolynomialMap::quad_bc(0.3);
    let mut r = rng();
    let starts: Vec<C64> = (0..37).map(|_| random_point(&mut r, 1.2)).collect();
    let got = exit_steps(&p, &starts, 500, |z| z.norm() > 2.0);
    for (z0, s) in starts.iter().zip(got) {
        let mut z = *z0;
        let mut want = u32::MAX;
        for k in 1..=500 {
            z = p.eval(z);
            if z.norm() > 2.0 {
                want = k;
                break;
            }
        }
        assert_eq!(s, want);
    }
}

#[test]
fn lane_evaluation_is_bitwise_scalar() {
    let mut r = rng();
    for map in families(0.2) {
        let pts: Vec<C64> = (0..LANES).map(|_| random_point(&mut r, 1.0)).collect();
        let mut re: [f64; LANES] = std::array::from_fn(|l| pts[l].re);
        let mut im: [f64; LANES] = std::array::from_fn(|l| pts[l].im);
        map.apply_lanes(&mut re, &mut im);
        for (l, z) in pts.iter().enumerate() {
            let w = map.eval(*z);
            assert_eq!((re[l].to_bits(), im[l].to_bits()), (w.re.to_bits(), w.im.to_bits()));
        }
    }
}
