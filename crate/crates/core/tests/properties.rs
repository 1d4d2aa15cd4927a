use nrmi_core::*;
use proptest::prelude::*;

fn families() -> impl Strategy<Value = LevyFamily> {
    prop_oneof![
        Just(LevyFamily::dirichlet()),
        Just(LevyFamily::nig()),
        (1u32..6).prop_map(|g| format!("gdir:{g}").parse().unwrap()),
        (0.05f64..0.95).prop_map(|s| format!("stable:{s}").parse().unwrap()),
        (0.05f64..0.95, 0.1f64..5.0).prop_map(|(s, t)| format!("ngg:{s}:{t}").parse().unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn inverse_tail_mass_roundtrip(family in families(), lu in -6f64..8.0) {
        let u = 10f64.powf(lu);
        let v = match family.inverse_tail_mass(u) {
            Err(Error::Underflow { .. }) => {
                // only log-type tails can be this thin at moderate u
                prop_assert!(u > 700.0);
                return Ok(());
            }
            r => r.unwrap(),
        };
        let back = family.tail_mass(v).unwrap();
        prop_assert!((back / u - 1.0).abs() < 1e-8, "{} u={} v={} back={}", family, u, v, back);
    }

    #[test]
    fn tail_mass_decreasing(family in families(), lv in -8f64..1.0, step in 0.01f64..2.0) {
        let v = 10f64.powf(lv);
        prop_assert!(family.tail_mass(v).unwrap() > family.tail_mass(v * (1.0 + step)).unwrap());
    }

    #[test]
    fn family_strings_roundtrip(family in families()) {
        let back: LevyFamily = family.to_string().parse().unwrap();
        prop_assert_eq!(back.to_string(), family.to_string());
    }

    #[test]
    fn partition_values_are_a_distribution(seed in 0u64..1000, cut in 0.05f64..0.95) {
        let mut rng = replicate_rng(seed, 0);
        let mu = sample_crm_ferguson_klass(
            &LevyFamily::nig(), 3.0, &BaseMeasure::UniformOn01, &TruncationSpec::fixed(50), &mut rng,
        ).unwrap();
        let p = normalize(&mu).unwrap();
        let part = Partition::from_cuts(&[0.0, cut, 1.0], &BaseMeasure::UniformOn01).unwrap();
        let vals = p.evaluate_partition(&part);
        let s: f64 = vals.values.iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
        prop_assert!(vals.values.iter().all(|x| (0.0..=1.0).contains(x)));
        prop_assert!(p.cdf(cut) >= 0.0 && p.cdf(cut) <= 1.0);
    }

    #[test]
    fn truncation_strings_roundtrip(t in 1usize..100_000, drop in any::<bool>(), eps in proptest::option::of(1e-9f64..1.0)) {
        let r = if drop { RemainderPolicy::Drop } else { RemainderPolicy::MomentMatched };
        for spec in [TruncationSpec::fixed(t).with_remainder(r), TruncationSpec::adaptive(eps).with_remainder(r)] {
            let back: TruncationSpec = spec.to_string().parse().unwrap();
            prop_assert_eq!(back, spec);
        }
    }

    #[test]
    fn crm_moments_positive_and_increasing_in_h(family in families(), h in 0.01f64..0.99) {
        if family.tau(4).unwrap().is_finite() {
            for p in 1..=4 {
                let lo = crm_moment(&family, p, h).unwrap();
                let hi = crm_moment(&family, p, (h + 0.01).min(1.0)).unwrap();
                prop_assert!(lo > 0.0 && hi > lo);
            }
        }
    }
}
