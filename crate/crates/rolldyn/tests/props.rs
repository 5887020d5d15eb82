//! Randomized invariants over the numeric kernels and file formats.

use num_complex::Complex64;
use proptest::prelude::*;
use rolldyn::charvals::{catalog, CharacteristicValueSet, CvKey};
use rolldyn::ingest::{
    load_ratings_str, load_run_str, ratings_to_string, run_to_string, Aspect, Criterion,
    MeasurementRun, RatingEntry, RatingTable,
};
use rolldyn::ratestats::{
    correlate, rmse, standardize, welch_ttest, winsorize, Observations, QuartileMethod, RmseMode,
};
use rolldyn::spectra::{derive_response, FrequencyResponse, InputChannel};

#[test]
fn catalog_is_sorted_unique_and_parseable() {
    let keys = catalog();
    assert_eq!(keys.len(), 84);
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "strictly increasing key order");
    for k in &keys {
        assert_eq!(CvKey::parse(&k.to_string()).unwrap(), *k, "display/parse identity");
    }
}

fn finite_vec(len: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, len)
}

fn sample_rate() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![20.0, 50.0, 100.0, 250.0])
}

prop_compose! {
    fn arb_run()(
        fs in sample_rate(),
        variant in "[a-z][a-z0-9_-]{0,7}",
        v_kmh in 30.0..160.0f64,
        ay_target in 1.0..8.0f64,
        delta_h in finite_vec(32),
        m_h in finite_vec(32),
        a_y in finite_vec(32),
        phi in finite_vec(32),
        phi_dot in prop::option::of(finite_vec(32)),
        has_ddot in any::<bool>(),
        phi_ddot in finite_vec(32),
    ) -> MeasurementRun {
        let t: Vec<f64> = (0..32).map(|i| i as f64 / fs).collect();
        // the second derivative may only be present alongside the first
        let phi_ddot = if has_ddot && phi_dot.is_some() { Some(phi_ddot) } else { None };
        MeasurementRun {
            variant_id: variant,
            v_kmh,
            ay_target,
            sample_rate: fs,
            t,
            delta_h,
            m_h,
            a_y,
            phi,
            phi_dot,
            phi_ddot,
        }
    }
}

proptest! {
    #[test]
    fn run_file_roundtrip(run in arb_run()) {
        run.validate().expect("generated run is valid");
        let text = run_to_string(&run);
        let back = load_run_str(&text, "prop").expect("reload");
        prop_assert_eq!(back, run);
    }

    #[test]
    fn cvset_file_roundtrip(
        mask in prop::collection::vec(any::<bool>(), 84),
        values in prop::collection::vec(-1e6..1e6f64, 84),
        variant in "[A-Za-z][A-Za-z0-9_-]{0,7}",
    ) {
        let mut set = CharacteristicValueSet::new(variant);
        for ((key, keep), value) in catalog().into_iter().zip(mask).zip(values) {
            if keep {
                set.insert(key, value).expect("insert");
            }
        }
        prop_assume!(set.len() > 0);
        let text = rolldyn::charvals::cvsets_to_string(std::slice::from_ref(&set));
        let back = rolldyn::charvals::load_cvsets_str(&text, "prop").expect("reload");
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0].variant_id, &set.variant_id);
        for key in catalog() {
            prop_assert_eq!(back[0].get(&key), set.get(&key));
        }
    }

    #[test]
    fn ratings_file_roundtrip(
        include in prop::collection::vec(any::<bool>(), 3 * 2 * 7 * 2),
        values in prop::collection::vec(1.0..10.0f64, 3 * 2 * 7 * 2),
    ) {
        let mut table = RatingTable::new();
        let mut written = 0usize;
        let mut idx = 0usize;
        for subject in ["s0", "s1", "s2"] {
            for variant in ["A", "B"] {
                for criterion in Criterion::ALL {
                    for aspect in [Aspect::Liking, Aspect::Intensity] {
                        // the overall criterion is only ever rated for liking
                        let allowed = !(criterion == Criterion::Or && aspect == Aspect::Intensity);
                        if include[idx] && allowed {
                            table.insert(RatingEntry {
                                subject: subject.into(),
                                variant: variant.into(),
                                criterion,
                                aspect,
                                value: values[idx],
                            }).expect("insert");
                            written += 1;
                        }
                        idx += 1;
                    }
                }
            }
        }
        prop_assume!(written > 0);
        let text = ratings_to_string(&table);
        let back = load_ratings_str(&text, "prop").expect("reload");
        let digest = |t: &RatingTable| {
            let mut rows: Vec<String> = t.entries().iter().map(|e| format!(
                "{}|{}|{}|{}|{}",
                e.subject, e.variant, e.criterion.as_str(), e.aspect.as_str(), e.value,
            )).collect();
            rows.sort();
            rows
        };
        prop_assert_eq!(digest(&back), digest(&table));
    }

    #[test]
    fn winsorize_respects_fences(
        values in finite_vec(4..30),
        k in 0.5..3.0f64,
        hinges in any::<bool>(),
    ) {
        let method = if hinges { QuartileMethod::TukeyHinges } else { QuartileMethod::Linear };
        let w = winsorize(&values, k, method).expect("winsorize");
        prop_assert_eq!(w.values.len(), values.len());
        let mut clipped = 0usize;
        for (orig, out) in values.iter().zip(&w.values) {
            prop_assert!(*out >= w.lower_fence - 1e-12 && *out <= w.upper_fence + 1e-12);
            if *orig < w.lower_fence {
                prop_assert_eq!(*out, w.lower_fence);
                clipped += 1;
            } else if *orig > w.upper_fence {
                prop_assert_eq!(*out, w.upper_fence);
                clipped += 1;
            } else {
                prop_assert_eq!(out, orig, "inliers pass through untouched");
            }
        }
        prop_assert_eq!(w.n_clipped, clipped);
        // clamping is monotone: pairwise order never inverts
        for (a, wa) in values.iter().zip(&w.values) {
            for (b, wb) in values.iter().zip(&w.values) {
                if a < b {
                    prop_assert!(wa <= wb);
                }
            }
        }
    }

    #[test]
    fn standardize_equalizes_subject_scales(
        offsets in prop::collection::vec(0.5..2.0f64, 3),
        gains in prop::collection::vec(0.3..1.0f64, 3),
        base in prop::collection::vec(2.0..8.0f64, 5),
    ) {
        // distinct affine views of a shared profile with guaranteed spread
        let spread: f64 = {
            let m = base.iter().sum::<f64>() / base.len() as f64;
            base.iter().map(|v| (v - m).abs()).fold(0.0, f64::max)
        };
        prop_assume!(spread > 0.05);
        let mut table = RatingTable::new();
        let variants = ["A", "B", "C", "D", "E"];
        for (s, (off, gain)) in offsets.iter().zip(&gains).enumerate() {
            for (variant, b) in variants.iter().zip(&base) {
                table.insert(RatingEntry {
                    subject: format!("s{s}"),
                    variant: variant.to_string(),
                    criterion: Criterion::Ral,
                    aspect: Aspect::Liking,
                    value: off + gain * b,
                }).expect("insert");
            }
        }
        let pooled: Vec<f64> = table.entries().iter().map(|e| e.value).collect();
        let mu = pooled.iter().sum::<f64>() / pooled.len() as f64;
        let sd = (pooled.iter().map(|v| (v - mu).powi(2)).sum::<f64>()
            / (pooled.len() - 1) as f64).sqrt();
        let out = standardize(&table, Aspect::Liking).expect("standardize");
        for s in 0..3 {
            let values = out.subject_values(&format!("s{s}"), Aspect::Liking);
            let m = values.iter().sum::<f64>() / values.len() as f64;
            let v = (values.iter().map(|v| (v - m).powi(2)).sum::<f64>()
                / (values.len() - 1) as f64).sqrt();
            prop_assert!((m - mu).abs() < 1e-9, "subject mean {} vs pooled {}", m, mu);
            prop_assert!((v - sd).abs() < 1e-9, "subject std {} vs pooled {}", v, sd);
        }
    }

    #[test]
    fn ttest_is_antisymmetric(
        a in finite_vec(2..12),
        b in finite_vec(2..12),
    ) {
        let spread = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|w| (w - m).powi(2)).sum::<f64>()
        };
        prop_assume!(spread(&a) + spread(&b) > 0.0);
        match (welch_ttest(&a, &b, 0.05), welch_ttest(&b, &a, 0.05)) {
            (Ok(ab), Ok(ba)) => {
                prop_assert_eq!(ab.t, -ba.t);
                prop_assert_eq!(ab.df, ba.df);
                prop_assert_eq!(ab.p, ba.p);
                prop_assert_eq!(ab.significant, ba.significant);
            }
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "one-sided failure: {:?} vs {:?}", x.is_ok(), y.is_ok()),
        }
    }

    #[test]
    fn correlation_is_affine_invariant(
        x in finite_vec(5),
        y in finite_vec(5),
        gain in 0.1..50.0f64,
        offset in -100.0..100.0f64,
        flip in any::<bool>(),
    ) {
        let spread = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|w| (w - m).powi(2)).sum::<f64>()
        };
        prop_assume!(spread(&x) > 1e-6 && spread(&y) > 1e-6);
        let obs = |x: Vec<f64>, y: Vec<f64>| Observations {
            ids: (0..5).map(|i| format!("v{i}")).collect(),
            columns: vec![("x".into(), x), ("y".into(), y)],
        };
        let gain = if flip { -gain } else { gain };
        let x2: Vec<f64> = x.iter().map(|v| gain * v + offset).collect();
        let m1 = correlate(&obs(x.clone(), y.clone()), None, 0.05).expect("correlate");
        let m2 = correlate(&obs(x2, y), None, 0.05).expect("correlate transformed");
        let (r1, p1, s1) = m1.get("x", "y").expect("cell");
        let (r2, p2, s2) = m2.get("x", "y").expect("transformed cell");
        let expected_r = if flip { -r1 } else { r1 };
        prop_assert!((r2 - expected_r).abs() < 1e-9, "r {} vs {}", r2, expected_r);
        prop_assert!((p2 - p1).abs() < 1e-9, "p {} vs {}", p2, p1);
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn rmse_modes_differ_by_sqrt_n(
        actual in finite_vec(1..12),
        noise in finite_vec(12),
    ) {
        let predicted: Vec<f64> = actual.iter().zip(&noise).map(|(a, n)| a + n * 0.01).collect();
        let sum = rmse(&actual, &predicted, RmseMode::Sum).expect("sum mode");
        let mean = rmse(&actual, &predicted, RmseMode::Mean).expect("mean mode");
        let n = actual.len() as f64;
        prop_assert!((sum - mean * n.sqrt()).abs() <= 1e-9 * sum.max(1.0));
    }

    #[test]
    fn derivative_steps_compose(
        mags in prop::collection::vec(0.01..10.0f64, 24),
        phases in prop::collection::vec(-3.1..3.1f64, 24),
    ) {
        let fr = FrequencyResponse {
            input: InputChannel::Ay,
            output_order: 0,
            freqs: (0..24).map(|i| 0.2 + 0.1 * i as f64).collect(),
            values: mags
                .iter()
                .zip(&phases)
                .map(|(m, p)| Complex64::from_polar(*m, *p))
                .collect(),
            coherence: None,
            variant_id: "prop".into(),
        };
        let two_steps = derive_response(&derive_response(&fr, 1).expect("first"), 1)
            .expect("second");
        let one_jump = derive_response(&fr, 2).expect("jump");
        prop_assert_eq!(two_steps.output_order, 2);
        prop_assert_eq!(one_jump.output_order, 2);
        for (a, b) in two_steps.values.iter().zip(&one_jump.values) {
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-12));
        }
    }
}
