use ouroboros_core::domain::{parse_domain, parse_signature, Domain, DomainSignature, SampleWindow};
use ouroboros_core::Scalar;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        (-1000i64..1000).prop_map(Scalar::Int),
        (-1e6f64..1e6).prop_map(Scalar::Real),
    ]
}

fn domain() -> impl Strategy<Value = Domain> {
    prop_oneof![
        prop::collection::vec(scalar(), 1..8).prop_map(|v| Domain::finite_set(v).unwrap()),
        (-100i64..100, 0i64..50).prop_map(|(lo, w)| Domain::int_range(lo, lo + w).unwrap()),
        (-100f64..100.0, 0.001f64..50.0, any::<bool>(), any::<bool>()).prop_map(|(lo, w, a, b)| Domain::real_interval(
            lo,
            lo + w,
            a,
            b
        )
        .unwrap()),
        Just(Domain::AllReals),
        Just(Domain::AllIntegers),
    ]
}

fn signature() -> impl Strategy<Value = DomainSignature> {
    prop_oneof![
        (domain(), 1usize..5).prop_map(|(d, n)| DomainSignature::power(d, n).unwrap()),
        prop::collection::vec(domain(), 1..4).prop_map(|v| DomainSignature::mixed(v).unwrap()),
    ]
}

proptest! {
    #[test]
    fn enumerated_members_are_contained(d in domain()) {
        if let Ok(all) = d.enumerate() {
            prop_assert!(all.windows(2).all(|w| w[0].cmp_value(&w[1]).is_lt()));
            prop_assert!(all.iter().all(|&v| d.contains(v)));
            prop_assert_eq!(all.len() as u128, d.size().unwrap());
        } else {
            prop_assert!(!d.is_finite());
        }
    }

    #[test]
    fn samples_are_members_and_reproducible(d in domain(), seed in any::<u64>(), k in 1usize..64) {
        let w = SampleWindow::default();
        let a = d.sample(k, &mut ChaCha8Rng::seed_from_u64(seed), w);
        let b = d.sample(k, &mut ChaCha8Rng::seed_from_u64(seed), w);
        prop_assert_eq!(a.len(), k);
        prop_assert!(a.iter().all(|&v| d.contains(v)));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn domain_text_round_trips(d in domain()) {
        prop_assert_eq!(parse_domain(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn signature_text_round_trips(s in signature()) {
        prop_assert_eq!(parse_signature(&s.to_string()).unwrap(), s);
    }
}

/// Exact two-sided binomial tail `P(X < lo) + P(X > hi)` for `X ~ Bin(n, p)`,
/// from log-pmf terms.
fn binomial_outside(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    let ln_fact = |k: u64| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    let ln_n = ln_fact(n);
    (0..=n)
        .filter(|&k| k < lo || k > hi)
        .map(|k| {
            let ln_pmf = ln_n - ln_fact(k) - ln_fact(n - k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln();
            ln_pmf.exp()
        })
        .sum()
}

#[test]
fn digit_frequencies_within_binomial_bounds() {
    // bounds [800, 1200] fixed in advance; the exact tail mass outside them
    // must be below 1e-4 for the check to be a 99.99% statement
    let outside = binomial_outside(10_000, 0.1, 800, 1200);
    assert!(outside < 1e-4, "tail mass {outside}");

    let d = Domain::int_range(0, 9).unwrap();
    let draws = d.sample(10_000, &mut ChaCha8Rng::seed_from_u64(7), SampleWindow::default());
    let mut counts = [0u32; 10];
    for v in draws {
        let Scalar::Int(i) = v else {
            panic!("integer domain produced {v:?}")
        };
        counts[i as usize] += 1;
    }
    for (digit, &c) in counts.iter().enumerate() {
        assert!((800..=1200).contains(&c), "digit {digit} drawn {c} times");
    }
}

#[test]
fn interval_samples_are_roughly_uniform() {
    // decile counts of 10^4 uniform draws, same binomial bound
    let d = Domain::closed(0.0, 1.0).unwrap();
    let draws = d.sample(10_000, &mut ChaCha8Rng::seed_from_u64(42), SampleWindow::default());
    let mut counts = [0u32; 10];
    for v in draws {
        counts[((v.as_f64() * 10.0) as usize).min(9)] += 1;
    }
    assert!(counts.iter().all(|c| (800..=1200).contains(c)), "{counts:?}");
}
