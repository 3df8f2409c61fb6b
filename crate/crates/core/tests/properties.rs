use polarimeter::analysis::{crossover_alpha, Ordering};
use polarimeter::{evaluate_index, Alienation, AntagonismSpec, Distribution};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn alienation() -> impl Strategy<Value = Alienation> {
    prop_oneof![
        Just(Alienation::linear()),
        (0.3f64..3.0).prop_map(|r| Alienation::power(r).unwrap()),
        (0.01f64..0.2).prop_map(|k| Alienation::exponential(k).unwrap()),
        prop::collection::vec(0.1f64..2.0, 1..4).prop_map(|c| Alienation::polynomial(c).unwrap()),
    ]
}

fn spec() -> impl Strategy<Value = AntagonismSpec> {
    (0.0f64..2.0, alienation()).prop_map(|(a, f)| AntagonismSpec::new(a, f).unwrap())
}

/// Groups on well separated characteristic values in `[-100, 100]`.
fn distribution() -> impl Strategy<Value = Distribution> {
    (2usize..8).prop_flat_map(|n| {
        (
            prop::collection::vec(1u64..1000, n),
            prop::collection::btree_set(-200i32..200, n),
            prop::collection::vec(0.0f64..0.4, n),
        )
            .prop_map(|(pi, slots, jitter)| {
                let y = slots.iter().zip(&jitter).map(|(&s, j)| 0.5 * s as f64 + j).collect();
                Distribution::new(pi, y).unwrap()
            })
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn permutation_invariance(d in distribution(), s in spec(), seed in any::<u64>()) {
        let n = d.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let p = evaluate_index(&d, &s).unwrap();
        let q = evaluate_index(&d.permute(&order).unwrap(), &s).unwrap();
        prop_assert!(rel(p, q) <= 1e-12, "{p} vs {q}");
    }

    #[test]
    fn translation_invariance(d in distribution(), s in spec(), c in -1000.0f64..1000.0) {
        let p = evaluate_index(&d, &s).unwrap();
        let q = evaluate_index(&d.translate(c).unwrap(), &s).unwrap();
        prop_assert!(rel(p, q) <= 1e-12, "{p} vs {q}");
    }

    #[test]
    fn scaling_law(d in distribution(), s in spec(), lambda in 1u64..=50) {
        let scaled = evaluate_index(&d.scale_population(lambda).unwrap(), &s).unwrap();
        let expected = (lambda as f64).powf(s.alpha() + 2.0) * evaluate_index(&d, &s).unwrap();
        prop_assert!((scaled - expected).abs() / scaled <= 1e-12);
    }

    #[test]
    fn positive_for_nondegenerate_distributions(d in distribution(), s in spec()) {
        prop_assert!(evaluate_index(&d, &s).unwrap() > 0.0);
    }

    #[test]
    fn crossovers_reflect_under_swap(d1 in distribution(), d2 in distribution(), f in alienation()) {
        let a = crossover_alpha(&d1, &d2, &f, (0.0, 2.0), 16, 1e-6).unwrap();
        let b = crossover_alpha(&d2, &d1, &f, (0.0, 2.0), 16, 1e-6).unwrap();
        let reflected: Vec<Ordering> = a.sign_series.iter().map(|o| o.reversed()).collect();
        prop_assert_eq!(&reflected, &b.sign_series);
        prop_assert_eq!(a.crossovers.len(), b.crossovers.len());
        for (x, y) in a.crossovers.iter().zip(&b.crossovers) {
            prop_assert_eq!(x.bracket, y.bracket);
            prop_assert_eq!(x.below, y.below.reversed());
        }
        prop_assert!(a.crossovers.windows(2).all(|w| w[0].alpha < w[1].alpha));
    }
}

#[test]
fn single_point_mass_gap_is_degenerate() {
    // two groups at the same characteristic value are rejected, so the
    // closest to a degenerate distribution is a vanishing gap
    let s = AntagonismSpec::new(1.0, Alienation::linear()).unwrap();
    let near = Distribution::new(vec![5, 5], vec![0.0, 1e-300]).unwrap();
    assert!(evaluate_index(&near, &s).unwrap() < 1e-296);
    assert!(Distribution::new(vec![5, 5], vec![1.0, 1.0]).is_err());
}
