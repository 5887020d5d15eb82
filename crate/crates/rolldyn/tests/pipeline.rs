//! Library-level end-to-end flows over real files in temporary
//! directories, including the noisy path and canonical-form stability
//! of every writer.

use rolldyn::charvals::{extract_all, load_cvsets, save_cvsets};
use rolldyn::ingest::{load_run, run_to_string, save_run};
use rolldyn::predictor::{builtin_models, models_to_string, parse_models, predict_all};
use rolldyn::report::response_family;
use rolldyn::spectra::{
    estimate_tf, fr_to_string, load_fr, save_fr, WelchConfig, WelchOverrides, Window,
};
use rolldyn::synthlab::{preset, synthesize_run, ChirpSpec, NoiseSpec};

#[test]
fn noisy_run_survives_the_full_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let params = preset("coupe").unwrap();
    let noise = NoiseSpec { seed: 7, relative_std: 0.02 };
    let run = synthesize_run(&params, &ChirpSpec::default(), Some(&noise)).unwrap();

    // disk round trip is canonical: save, load, save again, same bytes
    let run_path = tmp.path().join("run.csv");
    save_run(&run, &run_path).unwrap();
    let reloaded = load_run(&run_path).unwrap();
    assert_eq!(reloaded, run);
    assert_eq!(run_to_string(&reloaded), std::fs::read_to_string(&run_path).unwrap());

    let cfg = WelchConfig::default_for(run.sample_rate);
    let frs = response_family(&reloaded, &cfg).unwrap();
    let set = extract_all(&frs).unwrap();
    assert!(set.is_complete(), "2% sensor noise must not cost any characteristic value");

    // mild noise leaves the band coherent
    let ay = frs.iter().find(|fr| fr.input.as_str() == "ay" && fr.output_order == 0).unwrap();
    let coh = ay.coherence.as_ref().unwrap();
    assert!(coh.iter().all(|&c| c > 0.9), "coherence floor under noise");

    let cv_path = tmp.path().join("cv.csv");
    save_cvsets(std::slice::from_ref(&set), &cv_path).unwrap();
    let restored = load_cvsets(&cv_path).unwrap();
    let models = builtin_models().unwrap();
    let from_memory = predict_all(&models, &set, false).unwrap();
    let from_disk = predict_all(&models, &restored[0], false).unwrap();
    for (a, b) in from_memory.iter().zip(&from_disk) {
        assert_eq!(a.value, b.value, "{}", a.criterion.as_str());
        assert!(a.value.is_finite());
    }
}

#[test]
fn fr_files_round_trip_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let params = preset("sports-car").unwrap();
    let run = synthesize_run(&params, &ChirpSpec::default(), None).unwrap();
    let cfg = WelchConfig::default_for(run.sample_rate);
    let fr = estimate_tf(&run, "dh", "phi", &cfg).unwrap();
    assert!(fr.coherence.is_some());

    let path = tmp.path().join("fr.csv");
    save_fr(&fr, &path).unwrap();
    let back = load_fr(&path).unwrap();
    assert_eq!(back.input, fr.input);
    assert_eq!(back.output_order, fr.output_order);
    assert_eq!(back.variant_id, fr.variant_id);
    assert_eq!(back.freqs, fr.freqs);
    assert_eq!(back.values, fr.values);
    assert_eq!(back.coherence, fr.coherence);
    assert_eq!(fr_to_string(&back), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn builtin_models_have_a_stable_canonical_form() {
    let models = builtin_models().unwrap();
    let text = models_to_string(&models);
    let reparsed = parse_models(&text, "first print").unwrap();
    assert_eq!(models_to_string(&reparsed), text, "print-parse-print is a fixpoint");

    let set = &rolldyn::fixtures::study_cvs().unwrap()[0];
    let a = predict_all(&models, set, false).unwrap();
    let b = predict_all(&reparsed, set, false).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.value, y.value);
        assert_eq!(x.in_range, y.in_range);
    }
}

#[test]
fn welch_overrides_layer_in_order() {
    let file = WelchOverrides {
        segment_length: Some(2048),
        band_lo: Some(0.3),
        ..Default::default()
    };
    let flags = WelchOverrides {
        segment_length: Some(4096),
        window: Some(Window::Hamming),
        ..Default::default()
    };

    let merged = file.merged_with(&flags);
    let cfg = merged.resolve_for(100.0).unwrap();
    let defaults = WelchConfig::default_for(100.0);
    assert_eq!(cfg.segment_length, 4096, "flag beats file");
    assert_eq!(cfg.window, Window::Hamming, "flag fills what the file left open");
    assert_eq!(cfg.eval_band.0, 0.3, "file beats builtin default");
    assert_eq!(cfg.eval_band.1, defaults.eval_band.1, "untouched fields keep defaults");
    assert_eq!(cfg.overlap_fraction, defaults.overlap_fraction);

    // an empty override set reproduces the builtin defaults exactly
    let plain = WelchOverrides::default().resolve_for(100.0).unwrap();
    assert_eq!(plain, defaults);

    // merged settings still go through validation
    let bad = WelchOverrides { overlap_fraction: Some(1.5), ..Default::default() };
    assert!(bad.resolve_for(100.0).is_err(), "overlap above 1 is rejected");
}
