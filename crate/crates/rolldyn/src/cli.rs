//! Command-line front end: file-in, file-out orchestration of the
//! analysis modules. No prompts; data tables go to stdout unless an
//! output path is given, diagnostics and warnings go to stderr.

use crate::charvals::extract_all;
use crate::error::{Error, Result};
use crate::ingest::{
    fmt_f64, load_ratings, load_run, ratings_to_string, save_run, Aspect, Criterion,
    RatingTable,
};
use crate::predictor::{
    backtest, builtin_models, load_models, models_to_string, predict_all, ModelTerm,
    PredictionModel, RangeBound,
};
use crate::ratestats::{
    correlate, correlation_to_csv, welch_ttest, winsorize, Observations, QuartileMethod,
};
use crate::report::{
    backtest_csv, fr_file_name, predictions_json_value, report_bundle, response_family,
    ReportOptions,
};
use crate::spectra::{load_fr, save_fr, Detrend, InputChannel, WelchOverrides, Window};
use crate::stepfit::{design_from, stepwise, StepAction, StepwiseConfig};
use crate::synthlab::{load_params, preset, synthesize_run, ChirpSpec, NoiseSpec, PRESET_NAMES};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rolldyn",
    version,
    about = "Vehicle roll-dynamics analysis: spectral estimation, characteristic values, rating statistics and prediction"
)]
struct Cli {
    /// Defaults file (# rolldyn config v1); flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the nine frequency responses of a measurement run.
    Tf(TfArgs),
    /// Extract the characteristic-value catalog from saved responses.
    Cv(CvArgs),
    /// Apply prediction models to characteristic values.
    Predict(PredictArgs),
    /// Rating-table statistics.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Stepwise regression of a criterion onto characteristic values.
    Fit(FitArgs),
    /// Generate a synthetic measurement run.
    Synth(SynthArgs),
    /// Emit the full report bundle for a directory of runs.
    Report(ReportArgs),
}

#[derive(Args)]
struct TfArgs {
    /// Measurement run CSV.
    #[arg(long = "in", value_name = "run.csv")]
    input: PathBuf,
    /// Output directory for fr_{mh,dh,ay}_d{0,1,2}.csv.
    #[arg(long, value_name = "dir")]
    out: PathBuf,
    #[arg(long = "seg-len", value_name = "N")]
    seg_len: Option<usize>,
    #[arg(long, value_name = "F")]
    overlap: Option<f64>,
    /// hann, hamming or rect.
    #[arg(long, value_name = "NAME")]
    window: Option<String>,
}

#[derive(Args)]
struct CvArgs {
    /// Directory holding fr_*.csv files from `tf`.
    #[arg(long = "in", value_name = "dir")]
    input: PathBuf,
    #[arg(long, value_name = "cv.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// `builtin` or a model file path.
    #[arg(long, value_name = "builtin|file")]
    models: String,
    #[arg(long, value_name = "cv.csv")]
    cvs: PathBuf,
    /// Compare predictions against liking ratings instead of printing them.
    #[arg(long, value_name = "ratings.csv")]
    backtest: Option<PathBuf>,
    /// Clamp predictions to the 1..10 rating scale.
    #[arg(long)]
    clamp: bool,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "file")]
    out: Option<PathBuf>,
    /// Also write a JSON document of the predictions.
    #[arg(long, value_name = "file")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Pearson correlation matrix with two-tailed significance.
    Corr(CorrArgs),
    /// Welch two-sample t-test between two variants.
    Ttest(TtestArgs),
    /// Per-subject z-transform, rescaled to the pooled distribution.
    Standardize(StandardizeArgs),
    /// Clip each variant-criterion sample to its Tukey fences.
    Winsorize(WinsorizeArgs),
}

#[derive(Args)]
struct CorrArgs {
    #[arg(long, value_name = "ratings.csv")]
    ratings: PathBuf,
    /// liking or intensity.
    #[arg(long, value_name = "ASPECT", conflicts_with = "cross")]
    aspect: Option<String>,
    /// Correlate liking criteria against intensity criteria.
    #[arg(long)]
    cross: bool,
    #[arg(long, value_name = "F")]
    alpha: Option<f64>,
    #[arg(long, value_name = "file")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TtestArgs {
    #[arg(long, value_name = "ratings.csv")]
    ratings: PathBuf,
    #[arg(long, value_name = "C")]
    criterion: String,
    #[arg(long = "variant-a", value_name = "ID")]
    variant_a: String,
    #[arg(long = "variant-b", value_name = "ID")]
    variant_b: String,
    #[arg(long, value_name = "ASPECT")]
    aspect: Option<String>,
    #[arg(long, value_name = "F")]
    alpha: Option<f64>,
}

#[derive(Args)]
struct StandardizeArgs {
    #[arg(long, value_name = "ratings.csv")]
    ratings: PathBuf,
    #[arg(long, value_name = "ASPECT")]
    aspect: Option<String>,
    #[arg(long, value_name = "file")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WinsorizeArgs {
    #[arg(long, value_name = "ratings.csv")]
    ratings: PathBuf,
    #[arg(long, value_name = "ASPECT")]
    aspect: Option<String>,
    /// Tukey fence factor.
    #[arg(long, value_name = "K")]
    k: Option<f64>,
    /// Quartile method: linear or hinges.
    #[arg(long, value_name = "NAME")]
    method: Option<String>,
    #[arg(long, value_name = "file")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_name = "cv.csv")]
    cvs: PathBuf,
    #[arg(long, value_name = "ratings.csv")]
    ratings: PathBuf,
    #[arg(long, value_name = "C")]
    criterion: String,
    #[arg(long, value_name = "ASPECT")]
    aspect: Option<String>,
    #[arg(long = "min-gain", value_name = "F")]
    min_gain: Option<f64>,
    /// Adjusted R^2 at which selection stops.
    #[arg(long, value_name = "F")]
    target: Option<f64>,
    #[arg(long = "max-terms", value_name = "N")]
    max_terms: Option<usize>,
    /// Write the fitted model file here instead of stdout.
    #[arg(long, value_name = "file")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Builtin vehicle preset name.
    #[arg(long, value_name = "NAME", conflicts_with = "params")]
    preset: Option<String>,
    /// Vehicle parameter file.
    #[arg(long, value_name = "file")]
    params: Option<PathBuf>,
    #[arg(long, value_name = "run.csv")]
    out: PathBuf,
    /// Noise seed; only meaningful with --noise-std > 0.
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Noise level relative to each response channel's RMS; 0 is clean.
    #[arg(long = "noise-std", value_name = "F", default_value_t = 0.0)]
    noise_std: f64,
    #[arg(long, value_name = "S")]
    duration: Option<f64>,
    #[arg(long, value_name = "HZ")]
    f0: Option<f64>,
    #[arg(long, value_name = "HZ")]
    f1: Option<f64>,
    #[arg(long = "sample-rate", value_name = "HZ")]
    sample_rate: Option<f64>,
    /// Steering amplitude [deg]; default sizes it from --ay-target.
    #[arg(long, value_name = "DEG")]
    amplitude: Option<f64>,
    #[arg(long = "ay-target", value_name = "M/S^2")]
    ay_target: Option<f64>,
    #[arg(long = "v-kmh", value_name = "KMH")]
    v_kmh: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory of run CSVs, optionally with a ratings.csv.
    #[arg(long = "in", value_name = "dir")]
    input: PathBuf,
    #[arg(long, value_name = "dir")]
    out: PathBuf,
}

/// Values from the optional `--config` file.
#[derive(Debug, Default, Clone)]
struct FileConfig {
    welch: WelchOverrides,
    min_gain: Option<f64>,
    target: Option<f64>,
    max_terms: Option<usize>,
    alpha: Option<f64>,
}

const CONFIG_BANNER: &str = "# rolldyn config v1";

fn parse_config(text: &str, origin: &str) -> Result<FileConfig> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end() == CONFIG_BANNER => {}
        _ => {
            return Err(Error::parse(origin, 1, format!("missing {CONFIG_BANNER:?} banner")))
        }
    }
    let mut cfg = FileConfig::default();
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(origin, lineno, format!("expected key = value, got {line:?}")));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad_value =
            || Error::parse(origin, lineno, format!("bad value {value:?} for {key}"));
        match key {
            "seg_len" => cfg.welch.segment_length = Some(value.parse().map_err(|_| bad_value())?),
            "overlap" => cfg.welch.overlap_fraction = Some(value.parse().map_err(|_| bad_value())?),
            "window" => cfg.welch.window = Some(Window::parse(value).ok_or_else(bad_value)?),
            "detrend" => cfg.welch.detrend = Some(Detrend::parse(value).ok_or_else(bad_value)?),
            "band_lo" => cfg.welch.band_lo = Some(value.parse().map_err(|_| bad_value())?),
            "band_hi" => cfg.welch.band_hi = Some(value.parse().map_err(|_| bad_value())?),
            "min_gain" => cfg.min_gain = Some(value.parse().map_err(|_| bad_value())?),
            "target" => cfg.target = Some(value.parse().map_err(|_| bad_value())?),
            "max_terms" => cfg.max_terms = Some(value.parse().map_err(|_| bad_value())?),
            "alpha" => cfg.alpha = Some(value.parse().map_err(|_| bad_value())?),
            _ => return Err(Error::parse(origin, lineno, format!("unknown key {key:?}"))),
        }
    }
    Ok(cfg)
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            parse_config(&text, &p.display().to_string())
        }
    }
}

fn parse_aspect(s: Option<&str>) -> Result<Aspect> {
    match s {
        None => Ok(Aspect::Liking),
        Some(s) => Aspect::parse(s)
            .ok_or_else(|| Error::Config(format!("unknown aspect {s:?}, use liking or intensity"))),
    }
}

fn parse_criterion(s: &str) -> Result<Criterion> {
    Criterion::parse(s).ok_or_else(|| {
        Error::Config(format!(
            "unknown criterion {s:?}, use one of {}",
            Criterion::ALL.map(|c| c.as_str()).join(", ")
        ))
    })
}

fn resolve_alpha(file: &FileConfig, flag: Option<f64>) -> f64 {
    flag.or(file.alpha).unwrap_or(0.05)
}

fn write_or_stdout(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            println!("{}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn load_model_source(source: &str) -> Result<Vec<PredictionModel>> {
    if source == "builtin" {
        builtin_models()
    } else {
        load_models(Path::new(source))
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let file_cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Tf(args) => cmd_tf(args, &file_cfg),
        Command::Cv(args) => cmd_cv(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Stats(cmd) => match cmd {
            StatsCommand::Corr(args) => cmd_corr(args, &file_cfg),
            StatsCommand::Ttest(args) => cmd_ttest(args, &file_cfg),
            StatsCommand::Standardize(args) => cmd_standardize(args),
            StatsCommand::Winsorize(args) => cmd_winsorize(args),
        },
        Command::Fit(args) => cmd_fit(args, &file_cfg),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args, &file_cfg),
    }
}

fn cmd_tf(args: TfArgs, file_cfg: &FileConfig) -> Result<()> {
    let run = load_run(&args.input)?;
    let flag_overrides = WelchOverrides {
        segment_length: args.seg_len,
        overlap_fraction: args.overlap,
        window: match args.window.as_deref() {
            None => None,
            Some(s) => Some(Window::parse(s).ok_or_else(|| {
                Error::Config(format!("unknown window {s:?}, use hann, hamming or rect"))
            })?),
        },
        ..Default::default()
    };
    let cfg = file_cfg.welch.merged_with(&flag_overrides).resolve_for(run.sample_rate)?;
    std::fs::create_dir_all(&args.out)?;
    for fr in response_family(&run, &cfg)? {
        let path = args.out.join(fr_file_name(fr.input, fr.output_order));
        save_fr(&fr, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_cv(args: CvArgs) -> Result<()> {
    let mut frs = Vec::new();
    for input in InputChannel::ALL {
        for order in 0..=2u8 {
            let path = args.input.join(fr_file_name(input, order));
            if path.is_file() {
                frs.push(load_fr(&path)?);
            }
        }
    }
    if frs.is_empty() {
        return Err(Error::CharVals(format!(
            "no fr_*.csv files found in {}",
            args.input.display()
        )));
    }
    let cvs = extract_all(&frs)?;
    for w in &cvs.warnings {
        eprintln!("warning: {w}");
    }
    crate::charvals::save_cvsets(std::slice::from_ref(&cvs), &args.out)?;
    println!("{}", args.out.display());
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let models = load_model_source(&args.models)?;
    let cvsets = crate::charvals::load_cvsets(&args.cvs)?;
    if let Some(ratings_path) = &args.backtest {
        let ratings = load_ratings(ratings_path)?;
        let bt = backtest(&models, &cvsets, &ratings)?;
        let csv = backtest_csv(&bt);
        if args.json.is_some() {
            return Err(Error::Config("--json applies to predictions, not --backtest".into()));
        }
        return write_or_stdout(args.out.as_deref(), &csv);
    }
    let mut csv = String::from("variant,criterion,value,in_range\n");
    let mut docs = Vec::new();
    for set in &cvsets {
        let preds = predict_all(&models, set, args.clamp)?;
        for p in &preds {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                set.variant_id,
                p.criterion.as_str(),
                fmt_f64(p.value),
                p.in_range.iter().all(|b| *b)
            );
            for w in &p.warnings {
                eprintln!("warning: {}: {w}", set.variant_id);
            }
        }
        docs.push(predictions_json_value(&set.variant_id, &preds));
    }
    if let Some(json_path) = &args.json {
        let doc = serde_json::json!({ "variants": docs });
        let mut text = serde_json::to_string_pretty(&doc).expect("json serialization");
        text.push('\n');
        std::fs::write(json_path, text)?;
        eprintln!("wrote {}", json_path.display());
    }
    write_or_stdout(args.out.as_deref(), &csv)
}

fn cmd_corr(args: CorrArgs, file_cfg: &FileConfig) -> Result<()> {
    let table = load_ratings(&args.ratings)?;
    let alpha = resolve_alpha(file_cfg, args.alpha);
    let matrix = if args.cross {
        let liking = Observations::from_ratings(&table, Aspect::Liking)?;
        let intensity = Observations::from_ratings(&table, Aspect::Intensity)?;
        correlate(&liking, Some(&intensity), alpha)?
    } else {
        let obs = Observations::from_ratings(&table, parse_aspect(args.aspect.as_deref())?)?;
        correlate(&obs, None, alpha)?
    };
    write_or_stdout(args.out.as_deref(), &correlation_to_csv(&matrix))
}

fn cell_sample(table: &RatingTable, variant: &str, criterion: Criterion, aspect: Aspect) -> Vec<f64> {
    table
        .entries()
        .iter()
        .filter(|e| e.variant == variant && e.criterion == criterion && e.aspect == aspect)
        .map(|e| e.value)
        .collect()
}

fn cmd_ttest(args: TtestArgs, file_cfg: &FileConfig) -> Result<()> {
    let table = load_ratings(&args.ratings)?;
    let criterion = parse_criterion(&args.criterion)?;
    let aspect = parse_aspect(args.aspect.as_deref())?;
    let alpha = resolve_alpha(file_cfg, args.alpha);
    let a = cell_sample(&table, &args.variant_a, criterion, aspect);
    let b = cell_sample(&table, &args.variant_b, criterion, aspect);
    for (id, sample) in [(&args.variant_a, &a), (&args.variant_b, &b)] {
        if sample.is_empty() {
            return Err(Error::Stats(format!(
                "no {} {} ratings for variant {id:?}",
                aspect.as_str(),
                criterion.as_str()
            )));
        }
    }
    let r = welch_ttest(&a, &b, alpha)?;
    let mut csv = String::from(
        "criterion,aspect,variant_a,variant_b,n_a,n_b,mean_a,mean_b,t,df,p,significant\n",
    );
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        criterion.as_str(),
        aspect.as_str(),
        args.variant_a,
        args.variant_b,
        r.n_a,
        r.n_b,
        fmt_f64(r.mean_a),
        fmt_f64(r.mean_b),
        fmt_f64(r.t),
        fmt_f64(r.df),
        fmt_f64(r.p),
        r.significant
    );
    print!("{csv}");
    Ok(())
}

fn cmd_standardize(args: StandardizeArgs) -> Result<()> {
    let table = load_ratings(&args.ratings)?;
    let aspect = parse_aspect(args.aspect.as_deref())?;
    let out = crate::ratestats::standardize(&table, aspect)?;
    write_or_stdout(args.out.as_deref(), &ratings_to_string(&out))
}

fn cmd_winsorize(args: WinsorizeArgs) -> Result<()> {
    let table = load_ratings(&args.ratings)?;
    let aspect = parse_aspect(args.aspect.as_deref())?;
    let k = args.k.unwrap_or(1.5);
    let method = match args.method.as_deref() {
        None | Some("linear") => QuartileMethod::Linear,
        Some("hinges") => QuartileMethod::TukeyHinges,
        Some(s) => {
            return Err(Error::Config(format!(
                "unknown quartile method {s:?}, use linear or hinges"
            )))
        }
    };
    let mut entries = table.entries().to_vec();
    for variant in table.variants() {
        for criterion in table.criteria(aspect) {
            let indices: Vec<usize> = entries
                .iter()
                .enumerate()
                .filter(|(_, e)| {
                    e.variant == variant && e.criterion == criterion && e.aspect == aspect
                })
                .map(|(i, _)| i)
                .collect();
            if indices.is_empty() {
                continue;
            }
            let values: Vec<f64> = indices.iter().map(|&i| entries[i].value).collect();
            let wr = winsorize(&values, k, method).map_err(|e| {
                Error::Stats(format!("{variant}/{}: {e}", criterion.as_str()))
            })?;
            if wr.n_clipped > 0 {
                eprintln!(
                    "{variant}/{}: clipped {} of {} to [{}, {}]",
                    criterion.as_str(),
                    wr.n_clipped,
                    values.len(),
                    fmt_f64(wr.lower_fence),
                    fmt_f64(wr.upper_fence)
                );
            }
            for (&i, &v) in indices.iter().zip(&wr.values) {
                entries[i].value = v;
            }
        }
    }
    let mut out = RatingTable::new();
    for e in entries {
        out.insert(e)?;
    }
    write_or_stdout(args.out.as_deref(), &ratings_to_string(&out))
}

fn cmd_fit(args: FitArgs, file_cfg: &FileConfig) -> Result<()> {
    let cvsets = crate::charvals::load_cvsets(&args.cvs)?;
    let ratings = load_ratings(&args.ratings)?;
    let criterion = parse_criterion(&args.criterion)?;
    let aspect = parse_aspect(args.aspect.as_deref())?;
    let mut cfg = StepwiseConfig::default();
    if let Some(v) = file_cfg.min_gain {
        cfg.min_gain = v;
    }
    if let Some(v) = file_cfg.target {
        cfg.target_r2_adj = v;
    }
    if let Some(v) = file_cfg.max_terms {
        cfg.max_terms = v;
    }
    if let Some(v) = args.min_gain {
        cfg.min_gain = v;
    }
    if let Some(v) = args.target {
        cfg.target_r2_adj = v;
    }
    if let Some(v) = args.max_terms {
        cfg.max_terms = v;
    }
    let (columns, y, variants) = design_from(&cvsets, &ratings, criterion, aspect)?;
    let result = stepwise(&columns, &y, &cfg)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "n={} variants: {}",
        result.n,
        variants.join(", ")
    );
    for step in &result.steps {
        let sign = match step.action {
            StepAction::Added => '+',
            StepAction::Removed => '-',
        };
        eprintln!("{sign} {} r2_adj={:.4}", step.key, step.r2_adj);
    }
    let mut terms = Vec::with_capacity(result.terms.len());
    for (key, coefficient) in &result.terms {
        let column = columns
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_slice())
            .expect("selected key came from the candidate columns");
        let min = column.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = column.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        terms.push(ModelTerm {
            coefficient: *coefficient,
            key: *key,
            range: RangeBound::parse(&fmt_f64(min), &fmt_f64(max))?,
            resolve: false,
        });
    }
    let model = PredictionModel {
        criterion,
        intercept: result.intercept,
        r2_adj: result.r2_adj,
        terms,
    };
    write_or_stdout(args.out.as_deref(), &models_to_string(std::slice::from_ref(&model)))
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let params = match (&args.preset, &args.params) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => load_params(path)?,
        _ => {
            return Err(Error::Config(format!(
                "give exactly one of --preset ({}) or --params <file>",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let mut spec = ChirpSpec::default();
    if let Some(v) = args.duration {
        spec.duration = v;
    }
    if let Some(v) = args.f0 {
        spec.f0 = v;
    }
    if let Some(v) = args.f1 {
        spec.f1 = v;
    }
    if let Some(v) = args.sample_rate {
        spec.sample_rate = v;
    }
    if let Some(v) = args.ay_target {
        spec.ay_target = v;
    }
    if let Some(v) = args.v_kmh {
        spec.v_kmh = v;
    }
    if args.amplitude.is_some() {
        spec.amplitude_deg = args.amplitude;
    }
    let noise = (args.noise_std > 0.0)
        .then_some(NoiseSpec { seed: args.seed, relative_std: args.noise_std });
    let run = synthesize_run(&params, &spec, noise.as_ref())?;
    save_run(&run, &args.out)?;
    println!("{}", args.out.display());
    Ok(())
}

fn cmd_report(args: ReportArgs, file_cfg: &FileConfig) -> Result<()> {
    let opts = ReportOptions {
        welch: file_cfg.welch.clone(),
        alpha: resolve_alpha(file_cfg, None),
        models: builtin_models()?,
    };
    let summary = report_bundle(&args.input, &args.out, &opts)?;
    for run in &summary.runs {
        println!("{}: {} files under {}", run.variant_id, run.files.len(), run.stem);
    }
    for name in &summary.top_level {
        println!("{name}");
    }
    for name in &summary.skipped {
        eprintln!("skipped non-run file {name}");
    }
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
