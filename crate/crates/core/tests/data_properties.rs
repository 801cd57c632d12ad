use proptest::prelude::*;
use swh_core::split::split_indices;
use swh_core::stats::descriptive_stats;
use swh_core::synthetic::{generate_synthetic, GeneratorConfig, MEASURED_FEATURES};
use swh_core::{Feature, N_FEATURES};

proptest! {
    #[test]
    fn split_is_partition(n in 2usize..500, f in 0.05f64..0.95, seed in any::<u64>()) {
        let expect = (n as f64 * f).round() as usize;
        match split_indices(n, f, seed) {
            Ok(s) => {
                prop_assert_eq!(s.train.len(), expect);
                let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
                all.sort();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
                prop_assert_eq!(s, split_indices(n, f, seed).unwrap());
            }
            Err(_) => prop_assert!(expect == 0 || expect == n),
        }
    }

    #[test]
    fn generator_respects_bounds(n in 1usize..200, seed in any::<u64>()) {
        let ds = generate_synthetic(n, seed, &GeneratorConfig::default()).unwrap();
        let bounds = MEASURED_FEATURES.bounds();
        for r in ds.records() {
            r.validate(None).unwrap();
            let x = r.features();
            for j in 0..N_FEATURES {
                prop_assert!(x[j] >= bounds[j].0 && x[j] <= bounds[j].1);
            }
            prop_assert!((6.7..=11.3).contains(&r.hcr.unwrap()));
            prop_assert!((8.0..=13.0).contains(&r.hlc.unwrap()));
            prop_assert_eq!(r.feature(Feature::FinalTemp).fract(), 0.0);
        }
        for s in descriptive_stats(&ds).unwrap() {
            prop_assert_eq!(s.range, s.maximum - s.minimum);
            prop_assert!(s.minimum <= s.average && s.average <= s.maximum);
            prop_assert!(s.std_dev >= 0.0);
        }
    }
}
