//! Drives the compiled binary through every subcommand with real files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rolldyn"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn rolldyn");
    assert!(
        out.status.success(),
        "rolldyn {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn rolldyn");
    assert!(!out.status.success(), "rolldyn {args:?} unexpectedly succeeded");
    out
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf8 path")
}

fn write_study_fixtures(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let cvs_path = dir.join("study_cvs.csv");
    let liking_path = dir.join("study_liking.csv");
    let ratings_path = dir.join("study_ratings.csv");
    let cvs = rolldyn::fixtures::study_cvs().unwrap();
    rolldyn::charvals::save_cvsets(&cvs, &cvs_path).unwrap();
    rolldyn::ingest::save_ratings(&rolldyn::fixtures::study_liking().unwrap(), &liking_path)
        .unwrap();
    rolldyn::ingest::save_ratings(&rolldyn::fixtures::study_ratings().unwrap(), &ratings_path)
        .unwrap();
    (cvs_path, liking_path, ratings_path)
}

#[test]
fn pipeline_smoke_synth_tf_cv_predict() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run.csv");
    let fr_dir = tmp.path().join("fr");
    let cv = tmp.path().join("cv.csv");

    run_ok(&["synth", "--preset", "rv-like", "--out", path_str(&run), "--duration", "200"]);
    assert!(run.is_file());

    let out = run_ok(&["tf", "--in", path_str(&run), "--out", path_str(&fr_dir)]);
    assert_eq!(stdout_of(&out).lines().count(), 9);
    for input in ["mh", "dh", "ay"] {
        for order in 0..3 {
            assert!(fr_dir.join(format!("fr_{input}_d{order}.csv")).is_file());
        }
    }

    run_ok(&["cv", "--in", path_str(&fr_dir), "--out", path_str(&cv)]);
    let sets = rolldyn::charvals::load_cvsets(&cv).unwrap();
    assert_eq!(sets.len(), 1);
    assert!(sets[0].is_complete(), "all 84 characteristic values extracted");

    let out = run_ok(&["predict", "--models", "builtin", "--cvs", path_str(&cv)]);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("variant,criterion,value,in_range"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 7);
    assert!(rows[0].starts_with("rv-like,RAL,"));
    for row in rows {
        let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(value.is_finite());
    }
}

#[test]
fn predict_backtest_marks_tdl_worst() {
    let tmp = tempfile::tempdir().unwrap();
    let (cvs, liking, _) = write_study_fixtures(tmp.path());
    let out = run_ok(&[
        "predict",
        "--models",
        "builtin",
        "--cvs",
        path_str(&cvs),
        "--backtest",
        path_str(&liking),
    ]);
    let text = stdout_of(&out);
    assert!(text.starts_with("criterion,n,rmse_mean,rmse_sum,worst\n"));
    assert_eq!(text.matches(",true").count(), 1);
    let tdl = text.lines().find(|l| l.starts_with("TDL,")).unwrap();
    assert!(tdl.ends_with(",true"), "TDL is the worst criterion: {tdl}");
    let rmse_sum: f64 = tdl.split(',').nth(3).unwrap().parse().unwrap();
    assert!((rmse_sum - 0.3069).abs() < 5e-4, "TDL rmse_sum {rmse_sum}");
}

#[test]
fn predict_writes_json_and_clamps() {
    let tmp = tempfile::tempdir().unwrap();
    let (cvs, _, _) = write_study_fixtures(tmp.path());
    let json_path = tmp.path().join("pred.json");
    let out_path = tmp.path().join("pred.csv");
    run_ok(&[
        "predict",
        "--models",
        "builtin",
        "--cvs",
        path_str(&cvs),
        "--clamp",
        "--out",
        path_str(&out_path),
        "--json",
        path_str(&json_path),
    ]);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let variants = doc["variants"].as_array().unwrap();
    assert_eq!(variants.len(), 6);
    assert_eq!(variants[0]["predictions"].as_array().unwrap().len(), 7);
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6 * 7);
    for line in csv.lines().skip(1) {
        let v: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((1.0..=10.0).contains(&v), "clamped value out of scale: {line}");
    }
}

#[test]
fn corr_reproduces_significance_pattern() {
    let tmp = tempfile::tempdir().unwrap();
    let (_, _, ratings) = write_study_fixtures(tmp.path());
    let out = run_ok(&["stats", "corr", "--ratings", path_str(&ratings)]);
    let text = stdout_of(&out);
    assert!(text.starts_with("row,col,n,r,p,significant\n"));
    // 7 diagonal cells plus 6 significant pairs, mirrored
    assert_eq!(text.matches(",true").count(), 7 + 12);
    // alpha tightening from a config file drops the borderline RAL-TDL pair
    let cfg = tmp.path().join("cfg.txt");
    std::fs::write(&cfg, "# rolldyn config v1\nalpha = 0.04\n").unwrap();
    let out = run_ok(&[
        "--config",
        path_str(&cfg),
        "stats",
        "corr",
        "--ratings",
        path_str(&ratings),
    ]);
    assert_eq!(stdout_of(&out).matches(",true").count(), 7 + 10);
    // cross matrix has no intensity OR column: 7 x 6 cells
    let out = run_ok(&["stats", "corr", "--ratings", path_str(&ratings), "--cross"]);
    assert_eq!(stdout_of(&out).lines().count(), 1 + 7 * 6);
}

fn multi_subject_table(path: &Path) {
    let mut csv = String::from("subject,variant,criterion,aspect,value\n");
    let a = [6.0, 7.0, 6.5, 7.5, 6.0];
    let b = [3.0, 4.0, 3.5, 4.5, 9.9];
    for (i, (va, vb)) in a.iter().zip(&b).enumerate() {
        csv.push_str(&format!("s{i},A,RAL,liking,{va}\n"));
        csv.push_str(&format!("s{i},B,RAL,liking,{vb}\n"));
    }
    std::fs::write(path, csv).unwrap();
}

#[test]
fn ttest_compares_two_variants() {
    let tmp = tempfile::tempdir().unwrap();
    let ratings = tmp.path().join("r.csv");
    multi_subject_table(&ratings);
    let base = [
        "stats",
        "ttest",
        "--ratings",
        path_str(&ratings),
        "--criterion",
        "RAL",
    ];
    let mut ab = base.to_vec();
    ab.extend(["--variant-a", "A", "--variant-b", "B"]);
    let out = run_ok(&ab);
    let text = stdout_of(&out);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(&fields[..6], &["RAL", "liking", "A", "B", "5", "5"]);
    let t_ab: f64 = fields[8].parse().unwrap();
    let mut ba = base.to_vec();
    ba.extend(["--variant-a", "B", "--variant-b", "A"]);
    let text = stdout_of(&run_ok(&ba));
    let t_ba: f64 = text.lines().nth(1).unwrap().split(',').nth(8).unwrap().parse().unwrap();
    assert!((t_ab + t_ba).abs() < 1e-12, "antisymmetric in argument order");
}

#[test]
fn winsorize_clips_and_standardize_roundtrips() {
    let tmp = tempfile::tempdir().unwrap();
    let ratings = tmp.path().join("r.csv");
    multi_subject_table(&ratings);
    let out = run_ok(&["stats", "winsorize", "--ratings", path_str(&ratings)]);
    let text = stdout_of(&out);
    assert!(text.starts_with("subject,variant,criterion,aspect,value\n"));
    let max: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(max < 9.0, "outlier 9.9 clipped to the upper fence, got max {max}");
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("clipped 1 of 5"),
        "clip note on stderr"
    );

    let out = run_ok(&["stats", "standardize", "--ratings", path_str(&ratings)]);
    let table =
        rolldyn::ingest::load_ratings_str(&stdout_of(&out), "stdout").unwrap();
    assert_eq!(table.entries().len(), 10);
}

#[test]
fn fit_recovers_calibrated_predictor() {
    let tmp = tempfile::tempdir().unwrap();
    let (cvs, liking, _) = write_study_fixtures(tmp.path());
    let model_path = tmp.path().join("fitted.txt");
    let out = run_ok(&[
        "fit",
        "--cvs",
        path_str(&cvs),
        "--ratings",
        path_str(&liking),
        "--criterion",
        "RAH",
        "--out",
        path_str(&model_path),
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("+ mh/1/vmax"));
    let text = std::fs::read_to_string(&model_path).unwrap();
    assert!(text.starts_with("# rolldyn models v1\n"));
    assert!(text.contains("[RAH]"));
    assert!(text.contains("* mh/1/vmax in [2.35, 3.73]"), "{text}");
    // the fitted file loads back as a usable model set
    let models = rolldyn::predictor::load_models(&model_path).unwrap();
    assert_eq!(models.len(), 1);
    assert!(models[0].r2_adj > 0.9);
}

#[test]
fn synth_is_seed_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let mk = |name: &str, extra: &[&str]| -> Vec<u8> {
        let path = tmp.path().join(name);
        let mut args = vec![
            "synth",
            "--preset",
            "coupe",
            "--out",
            path_str(&path),
            "--duration",
            "200",
        ];
        args.extend_from_slice(extra);
        run_ok(&args);
        std::fs::read(&path).unwrap()
    };
    let clean = mk("clean.csv", &[]);
    let a = mk("a.csv", &["--noise-std", "0.02", "--seed", "9"]);
    let b = mk("b.csv", &["--noise-std", "0.02", "--seed", "9"]);
    let c = mk("c.csv", &["--noise-std", "0.02", "--seed", "10"]);
    assert_eq!(a, b, "same seed, same bytes");
    assert_ne!(a, c, "different seed, different noise");
    assert_ne!(a, clean, "noise changes the data");
}

#[test]
fn synth_accepts_params_file() {
    let tmp = tempfile::tempdir().unwrap();
    let params = tmp.path().join("veh.params");
    let p = rolldyn::synthlab::preset("sports-suv").unwrap();
    rolldyn::synthlab::save_params(&p, &params).unwrap();
    let run_path = tmp.path().join("run.csv");
    run_ok(&[
        "synth",
        "--params",
        path_str(&params),
        "--out",
        path_str(&run_path),
        "--duration",
        "200",
        "--ay-target",
        "3",
    ]);
    let run = rolldyn::ingest::load_run(&run_path).unwrap();
    assert_eq!(run.variant_id, "sports-suv");
    assert_eq!(run.ay_target, 3.0);
}

#[test]
fn config_file_overrides_with_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run.csv");
    run_ok(&["synth", "--preset", "rv-like", "--out", path_str(&run), "--duration", "200"]);
    let cfg = tmp.path().join("cfg.txt");
    std::fs::write(&cfg, "# rolldyn config v1\n# analysis defaults\nseg_len = 2048\n").unwrap();

    let (d_default, d_cfg, d_flag) = (tmp.path().join("d0"), tmp.path().join("d1"), tmp.path().join("d2"));
    run_ok(&["tf", "--in", path_str(&run), "--out", path_str(&d_default)]);
    run_ok(&["--config", path_str(&cfg), "tf", "--in", path_str(&run), "--out", path_str(&d_cfg)]);
    run_ok(&[
        "--config",
        path_str(&cfg),
        "tf",
        "--in",
        path_str(&run),
        "--out",
        path_str(&d_flag),
        "--seg-len",
        "4096",
    ]);
    let read = |d: &Path| std::fs::read(d.join("fr_ay_d0.csv")).unwrap();
    assert_ne!(read(&d_default), read(&d_cfg), "config file changes the grid");
    assert_eq!(read(&d_default), read(&d_flag), "flag restores the default over the file");
}

#[test]
fn report_emits_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let in_dir = tmp.path().join("in");
    std::fs::create_dir_all(&in_dir).unwrap();
    run_ok(&[
        "synth",
        "--preset",
        "luxury-sedan",
        "--out",
        path_str(&in_dir.join("sedan.csv")),
        "--duration",
        "200",
    ]);
    rolldyn::ingest::save_ratings(
        &rolldyn::fixtures::study_ratings().unwrap(),
        &in_dir.join("ratings.csv"),
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = run_ok(&["report", "--in", path_str(&in_dir), "--out", path_str(&out_dir)]);
    let text = stdout_of(&out);
    assert!(text.contains("luxury-sedan: 23 files under sedan"));
    assert!(out_dir.join("sedan/bode_ay_d0.svg").is_file());
    assert!(out_dir.join("sedan/predictions.json").is_file());
    assert!(out_dir.join("correlations_liking.csv").is_file());
    // study variants do not overlap the synthetic run, so no backtest
    assert!(String::from_utf8_lossy(&out.stderr).contains("backtest.csv skipped"));
}

#[test]
fn errors_exit_nonzero_with_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["synth".into(), "--preset".into(), "hovercraft".into(), "--out".into(), "x.csv".into()],
        vec!["synth".into(), "--out".into(), "x.csv".into()],
        vec!["predict".into(), "--models".into(), "builtin".into(), "--cvs".into(), "missing.csv".into()],
        vec!["cv".into(), "--in".into(), tmp.path().to_str().unwrap().into(), "--out".into(), "x.csv".into()],
        vec![
            "stats".into(),
            "corr".into(),
            "--ratings".into(),
            "missing.csv".into(),
        ],
    ];
    for args in cases {
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run_err(&arg_refs);
        assert!(
            String::from_utf8_lossy(&out.stderr).contains("error"),
            "no diagnostic for {args:?}"
        );
        assert!(out.stdout.is_empty() || args[0] == "synth", "no partial table on stdout");
    }
    // clap usage errors are also nonzero
    run_err(&["tf", "--bogus-flag"]);
}
