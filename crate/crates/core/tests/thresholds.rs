use std::time::Instant;

use polarimeter::thresholds::{
    critical_alpha, critical_alpha_with, feasible_alpha_interval, g_value, sup_g, SupPolicy,
};
use polarimeter::Alienation;

/// Exact `g(p, q, α)` for integer `α`: numerator and denominator are
/// integers below 2^53, so one correctly rounded division is exact to ½ ulp.
fn g_exact(p: i128, q: i128, alpha: u32) -> f64 {
    let a1 = alpha + 1;
    let num = p.pow(a1) * q + p * q.pow(a1) - (p + 1).pow(a1) * (q - 2) - (p + 1) * (q - 2).pow(a1);
    let den = (p + 1).pow(alpha + 2) - p.pow(alpha + 2);
    num as f64 / den as f64
}

#[test]
fn g_matches_exact_rational_oracle() {
    assert_eq!(g_exact(1, 2, 1), 6.0 / 7.0);
    assert_eq!(g_exact(1, 2, 0), 4.0 / 3.0);
    let mut worst: f64 = 0.0;
    for alpha in 0..=2u32 {
        for p in 1..=1000i128 {
            for q in 2..=1000i128 {
                let exact = g_exact(p, q, alpha);
                let got = g_value(p as u64, q as u64, alpha as f64).unwrap();
                let err = (got - exact).abs() / exact.abs().max(1.0);
                worst = worst.max(err);
                assert!(err <= 1e-10, "p={p} q={q} alpha={alpha}: {got} vs {exact}");
            }
        }
    }
    eprintln!("worst scaled error vs exact oracle: {worst:e}");
}

#[test]
fn every_probed_g_at_alpha_one_is_below_one() {
    for p in 1..=2000u64 {
        for q in 2..=2000u64 {
            assert!(g_value(p, q, 1.0).unwrap() < 1.0, "g({p},{q},1) >= 1");
        }
    }
    let s = sup_g(1.0, 1e-6, (64, 64)).unwrap();
    assert!(s.value < 1.0 && s.value > 0.999_99);
}

#[test]
fn running_maximum_never_decreases_with_limits() {
    for alpha in [0.2, 1.0, 1.6, 1.9] {
        let mut prev = f64::NEG_INFINITY;
        for limit in [16u64, 64, 256, 1024, 4096] {
            let s = sup_g(alpha, 1.0, (limit, limit)).unwrap();
            assert!(s.value >= prev, "alpha={alpha} limit={limit}");
            prev = s.value;
        }
    }
}

#[test]
fn sup_brackets_two_around_alpha_star() {
    let below = sup_g(1.55, 1e-3, (64, 64)).unwrap();
    let above = sup_g(1.65, 1e-3, (64, 64)).unwrap();
    let far = sup_g(1.7, 1e-3, (64, 64)).unwrap();
    assert!(below.value < 2.0, "{below:?}");
    assert!(above.value > 2.0, "{above:?}");
    assert!(far.value > 2.0);
}

#[test]
fn alpha_star_and_double_star() {
    let t = Instant::now();
    let star = critical_alpha(2.0, 0.01, (0.0, 4.0)).unwrap();
    eprintln!(
        "alpha* = {} in {:?} ({:?})",
        star.alpha_critical,
        t.elapsed(),
        star.bracket
    );
    assert!((1.55..=1.65).contains(&star.alpha_critical));
    let t = Instant::now();
    let star2 = critical_alpha(4.0, 0.01, (0.0, 4.0)).unwrap();
    eprintln!("alpha** = {} in {:?}", star2.alpha_critical, t.elapsed());
    assert!((1.85..=1.95).contains(&star2.alpha_critical));
    for est in [&star, &star2] {
        let (lo, hi) = est.bracket;
        assert!(lo < est.alpha_critical && est.alpha_critical <= hi);
        assert!(hi - lo <= est.tolerance);
        let m = |a: f64| est.m_alpha_samples.iter().find(|s| s.0 == a).unwrap().1;
        assert!(m(lo) < est.bound && est.bound <= m(hi));
    }
}

#[test]
fn bound_just_above_one_crosses_just_above_alpha_one() {
    let est = critical_alpha(1.0 + 1e-6, 1e-4, (1.0, 1.2)).unwrap();
    assert!(est.alpha_critical > 1.0 && est.alpha_critical < 1.01, "{est:?}");
    // the sampled curve is increasing on this range
    assert!(est.m_alpha_samples.windows(2).all(|w| w[0].1 <= w[1].1));
}

#[test]
fn critical_alpha_is_deterministic() {
    let policy = SupPolicy {
        tolerance: 1e-5,
        ..SupPolicy::default()
    };
    let a = critical_alpha_with(2.0, 0.02, (0.0, 4.0), &policy).unwrap();
    let b = critical_alpha_with(2.0, 0.02, (0.0, 4.0), &policy).unwrap();
    assert_eq!(a, b);
}

#[test]
fn feasible_intervals_for_example_families() {
    let linear = feasible_alpha_interval(&Alienation::linear(), 0.01).unwrap();
    assert!((1.55..=1.65).contains(&linear.alpha_critical));
    assert_eq!(linear.bound, 2.0);
    let square = feasible_alpha_interval(&Alienation::power(2.0).unwrap(), 0.01).unwrap();
    assert!((1.85..=1.95).contains(&square.alpha_critical));
    let cube = feasible_alpha_interval(&Alienation::power(3.0).unwrap(), 0.01).unwrap();
    assert!(cube.alpha_critical >= 1.9);
    assert_eq!(cube.bound, 8.0);
    let exp = feasible_alpha_interval(&Alienation::exponential(1.0).unwrap(), 0.01).unwrap();
    assert!(exp.bound > 2.0 && exp.bound < 2.01);
    assert!(exp.alpha_critical >= linear.alpha_critical - 0.01);
}
