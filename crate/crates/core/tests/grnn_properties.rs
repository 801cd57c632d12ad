use proptest::prelude::*;
use swh_core::model::grnn::{self, GrnnConfig};
use swh_core::synthetic::{generate_synthetic, GeneratorConfig};
use swh_core::{DesignRecord, Target};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn predictions_are_convex(seed in any::<u64>(), sigma in 0.001f64..50.0, q in prop::collection::vec(0.01f64..10.0, 7)) {
        let ds = generate_synthetic(25, seed, &GeneratorConfig::default()).unwrap();
        let model = grnn::fit(&ds, Target::Hcr, &GrnnConfig { sigma }).unwrap();
        let ys: Vec<f64> = ds.records().iter().map(|r| r.hcr.unwrap()).collect();
        let (lo, hi) = ys.iter().fold((f64::MAX, f64::MIN), |(a, b), y| (a.min(*y), b.max(*y)));
        let mut x: [f64; 7] = q.clone().try_into().unwrap();
        x[1] = x[1].ceil();
        let r = DesignRecord::from_features(&x).unwrap();
        let p = model.predict(&r).unwrap();
        prop_assert!(p >= lo && p <= hi, "{p} outside [{lo}, {hi}]");
        prop_assert_eq!(p.to_bits(), model.predict(&r).unwrap().to_bits());
    }
}

#[test]
fn sigma_selection_prefers_smallest_on_ties() {
    let ds = generate_synthetic(30, 1, &GeneratorConfig::default()).unwrap();
    let mut flat = ds.clone().into_records();
    for r in &mut flat {
        r.hcr = Some(9.0);
    }
    let flat = swh_core::Dataset::new(flat).unwrap();
    let (train, hold) = swh_core::split::split(&flat, 0.8, 0).unwrap();
    let (cfg, scores) = grnn::select_sigma(&train, &hold, Target::Hcr, &[2.0, 0.5, 1.0]).unwrap();
    assert_eq!(cfg.sigma, 0.5);
    assert!(scores.iter().all(|(_, rms)| *rms == 0.0));
}
