//! Report bundles: per-run frequency-response tables with Bode plots,
//! characteristic values, rating predictions with spider charts, and
//! rating-table analyses when ratings ship alongside the runs.
//!
//! Every figure is backed by a CSV twin holding the exact plotted
//! numbers; all outputs are byte-deterministic for identical inputs.

use crate::charvals::{extract_all, gain_unit, save_cvsets, CharacteristicValueSet};
use crate::error::{Error, Result};
use crate::ingest::{fmt_f64, load_ratings, load_run, Aspect, MeasurementRun, RatingTable};
use crate::predictor::{backtest, builtin_models, predict_all, PredictionModel, PredictionReport};
use crate::ratestats::{correlate, correlation_to_csv, Observations};
use crate::spectra::{
    derive_response, estimate_tf, save_fr, FrequencyResponse, InputChannel, WelchConfig,
    WelchOverrides,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Welch settings layered over each run's per-rate default.
    pub welch: WelchOverrides,
    /// Significance level for the correlation tables.
    pub alpha: f64,
    pub models: Vec<PredictionModel>,
}

impl ReportOptions {
    pub fn with_builtin_models() -> Result<ReportOptions> {
        Ok(ReportOptions {
            welch: WelchOverrides::default(),
            alpha: 0.05,
            models: builtin_models()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    /// Input file stem; names the per-run output directory.
    pub stem: String,
    pub variant_id: String,
    /// Written files, relative to the output root.
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReportSummary {
    pub runs: Vec<RunReport>,
    /// Rating-table outputs at the output root.
    pub top_level: Vec<String>,
    /// CSV files in the input directory that are not runs.
    pub skipped: Vec<String>,
    pub warnings: Vec<String>,
}

pub fn fr_file_name(input: InputChannel, order: u8) -> String {
    format!("fr_{}_d{order}.csv", input.as_str())
}

pub fn bode_file_name(input: InputChannel, order: u8) -> String {
    format!("bode_{}_d{order}.svg", input.as_str())
}

/// All nine responses of a run in fixed order: inputs mh, dh, ay with
/// output orders 0..=2 each. Orders 1 and 2 are spectral derivatives of
/// the estimated base response, so magnitude ratios and phase shifts
/// between orders are exact.
pub fn response_family(
    run: &MeasurementRun,
    cfg: &WelchConfig,
) -> Result<Vec<FrequencyResponse>> {
    let mut out = Vec::with_capacity(9);
    for input in InputChannel::ALL {
        let base = estimate_tf(run, input.as_str(), "phi", cfg)?;
        out.push(base.clone());
        out.push(derive_response(&base, 1)?);
        out.push(derive_response(&base, 2)?);
    }
    Ok(out)
}

/// Scans `in_dir` for run CSVs (first line `# variant=...`), writes the
/// full bundle for each into `out_dir/<stem>/`, and adds rating-table
/// analyses at the root when `in_dir/ratings.csv` exists.
pub fn report_bundle(
    in_dir: &Path,
    out_dir: &Path,
    opts: &ReportOptions,
) -> Result<ReportSummary> {
    if !(0.0 < opts.alpha && opts.alpha < 1.0) {
        return Err(Error::Config(format!("alpha {} outside (0, 1)", opts.alpha)));
    }
    let mut run_files = Vec::new();
    let mut skipped = Vec::new();
    let mut ratings_file: Option<PathBuf> = None;
    let mut entries: Vec<PathBuf> = std::fs::read_dir(in_dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().and_then(|e| e.to_str()) == Some("csv"))
        .collect();
    entries.sort();
    for path in entries {
        let name = file_name_of(&path);
        if name == "ratings.csv" {
            ratings_file = Some(path);
        } else if is_run_file(&path)? {
            run_files.push(path);
        } else {
            skipped.push(name);
        }
    }
    if run_files.is_empty() && ratings_file.is_none() {
        return Err(Error::Config(format!(
            "no run CSVs or ratings.csv found in {}",
            in_dir.display()
        )));
    }

    let mut summary = ReportSummary { skipped, ..Default::default() };
    let mut cvsets = Vec::new();
    for path in &run_files {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("run")
            .to_string();
        let run = load_run(path)?;
        let (report, cvs) = run_bundle(&run, &stem, out_dir, opts)?;
        summary.runs.push(report);
        cvsets.push(cvs);
    }

    if let Some(path) = ratings_file {
        let table = load_ratings(&path)?;
        emit_rating_outputs(&table, &cvsets, out_dir, opts, &mut summary)?;
    }
    Ok(summary)
}

fn file_name_of(path: &Path) -> String {
    path.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string()
}

fn is_run_file(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path)?;
    Ok(text.lines().next().is_some_and(|l| l.starts_with("# variant=")))
}

fn run_bundle(
    run: &MeasurementRun,
    stem: &str,
    out_dir: &Path,
    opts: &ReportOptions,
) -> Result<(RunReport, CharacteristicValueSet)> {
    let dir = out_dir.join(stem);
    std::fs::create_dir_all(&dir)?;
    let cfg = opts.welch.resolve_for(run.sample_rate)?;
    let mut files = Vec::new();
    let rel = |name: &str| format!("{stem}/{name}");

    let family = response_family(run, &cfg)?;
    for fr in &family {
        let csv = fr_file_name(fr.input, fr.output_order);
        save_fr(fr, &dir.join(&csv))?;
        files.push(rel(&csv));
        let svg = bode_file_name(fr.input, fr.output_order);
        std::fs::write(dir.join(&svg), bode_svg(fr))?;
        files.push(rel(&svg));
    }

    let cvs = extract_all(&family)?;
    save_cvsets(std::slice::from_ref(&cvs), &dir.join("cv.csv"))?;
    files.push(rel("cv.csv"));

    let preds = predict_all(&opts.models, &cvs, false)?;
    std::fs::write(dir.join("predictions.csv"), predictions_csv(&preds))?;
    files.push(rel("predictions.csv"));
    std::fs::write(dir.join("predictions.json"), predictions_json(&run.variant_id, &preds))?;
    files.push(rel("predictions.json"));

    let axes: Vec<(String, f64)> = preds
        .iter()
        .map(|p| (p.criterion.as_str().to_string(), p.value.clamp(1.0, 10.0)))
        .collect();
    std::fs::write(dir.join("spider.csv"), spider_csv(&axes))?;
    files.push(rel("spider.csv"));
    std::fs::write(dir.join("spider.svg"), spider_svg(&run.variant_id, &axes))?;
    files.push(rel("spider.svg"));

    let report =
        RunReport { stem: stem.to_string(), variant_id: run.variant_id.clone(), files };
    Ok((report, cvs))
}

fn emit_rating_outputs(
    table: &RatingTable,
    cvsets: &[CharacteristicValueSet],
    out_dir: &Path,
    opts: &ReportOptions,
    summary: &mut ReportSummary,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let mut liking_obs = None;
    for (aspect, name) in
        [(Aspect::Liking, "correlations_liking.csv"), (Aspect::Intensity, "correlations_intensity.csv")]
    {
        let obs = match Observations::from_ratings(table, aspect) {
            Ok(obs) => obs,
            Err(e) => {
                summary.warnings.push(format!("{name} skipped: {e}"));
                continue;
            }
        };
        match correlate(&obs, None, opts.alpha) {
            Ok(m) => {
                std::fs::write(out_dir.join(name), correlation_to_csv(&m))?;
                summary.top_level.push(name.to_string());
            }
            Err(e) => summary.warnings.push(format!("{name} skipped: {e}")),
        }
        if aspect == Aspect::Liking {
            liking_obs = Some(obs);
        }
    }
    if let Some(liking) = &liking_obs {
        match Observations::from_ratings(table, Aspect::Intensity)
            .and_then(|intensity| correlate(liking, Some(&intensity), opts.alpha))
        {
            Ok(m) => {
                std::fs::write(out_dir.join("correlations_cross.csv"), correlation_to_csv(&m))?;
                summary.top_level.push("correlations_cross.csv".to_string());
            }
            Err(e) => summary.warnings.push(format!("correlations_cross.csv skipped: {e}")),
        }
    }
    if cvsets.is_empty() {
        summary.warnings.push("backtest.csv skipped: no runs in the input directory".into());
        return Ok(());
    }
    match backtest(&opts.models, cvsets, table) {
        Ok(bt) => {
            std::fs::write(out_dir.join("backtest.csv"), backtest_csv(&bt))?;
            summary.top_level.push("backtest.csv".to_string());
        }
        Err(e) => summary.warnings.push(format!("backtest.csv skipped: {e}")),
    }
    Ok(())
}

pub fn backtest_csv(bt: &crate::predictor::BacktestReport) -> String {
    let mut csv = String::from("criterion,n,rmse_mean,rmse_sum,worst\n");
    for c in &bt.criteria {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            c.criterion.as_str(),
            c.variants.len(),
            fmt_f64(c.rmse_mean),
            fmt_f64(c.rmse_sum),
            c.criterion == bt.worst
        );
    }
    csv
}

pub fn predictions_csv(preds: &[PredictionReport]) -> String {
    let mut out = String::from("criterion,value,in_range\n");
    for p in preds {
        let _ = writeln!(
            out,
            "{},{},{}",
            p.criterion.as_str(),
            fmt_f64(p.value),
            p.in_range.iter().all(|b| *b)
        );
    }
    out
}

pub fn predictions_json_value(variant: &str, preds: &[PredictionReport]) -> serde_json::Value {
    let list: Vec<serde_json::Value> = preds
        .iter()
        .map(|p| {
            serde_json::json!({
                "criterion": p.criterion.as_str(),
                "value": p.value,
                "in_range": p.in_range,
                "warnings": p.warnings,
            })
        })
        .collect();
    serde_json::json!({ "variant": variant, "predictions": list })
}

pub fn predictions_json(variant: &str, preds: &[PredictionReport]) -> String {
    let mut text = serde_json::to_string_pretty(&predictions_json_value(variant, preds))
        .expect("json serialization");
    text.push('\n');
    text
}

fn spider_csv(axes: &[(String, f64)]) -> String {
    let mut out = String::from("criterion,radius\n");
    for (label, radius) in axes {
        let _ = writeln!(out, "{label},{}", fmt_f64(*radius));
    }
    out
}

// plot geometry shared by the SVG writers
const PLOT_FG: &str = "#1663a9";
const GRID: &str = "#cccccc";
const INK: &str = "#333333";

fn svg_open(out: &mut String, w: u32, h: u32) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" \
         font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, s: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\" fill=\"{INK}\">{s}</text>"
    );
}

fn line(out: &mut String, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
    let _ = writeln!(
        out,
        "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\"/>"
    );
}

fn polyline(out: &mut String, pts: &[(f64, f64)]) {
    let mut attr = String::with_capacity(pts.len() * 14);
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            attr.push(' ');
        }
        let _ = write!(attr, "{x:.2},{y:.2}");
    }
    let _ = writeln!(
        out,
        "<polyline points=\"{attr}\" fill=\"none\" stroke=\"{PLOT_FG}\" stroke-width=\"1.5\"/>"
    );
}

/// Frequency tick step keeping at most eight labels.
fn tick_step(range: f64) -> f64 {
    for step in [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0] {
        if range / step <= 8.0 {
            return step;
        }
    }
    range / 8.0
}

struct Axis {
    lo: f64,
    hi: f64,
    top: f64,
    bottom: f64,
}

impl Axis {
    fn y(&self, v: f64) -> f64 {
        self.bottom - (v - self.lo) / (self.hi - self.lo) * (self.bottom - self.top)
    }
}

/// Two stacked panels: log-magnitude and unwrapped phase over the
/// response's frequency grid. The plotted numbers are the CSV twin's
/// mag and phase_deg columns.
pub fn bode_svg(fr: &FrequencyResponse) -> String {
    let (w, h) = (640, 480);
    let (x0, x1) = (70.0, 610.0);
    let fmin = *fr.freqs.first().unwrap_or(&0.0);
    let fmax = *fr.freqs.last().unwrap_or(&1.0);
    let span = (fmax - fmin).max(1e-12);
    let fx = |f: f64| x0 + (f - fmin) / span * (x1 - x0);

    let mag: Vec<f64> = fr.magnitude().iter().map(|m| m.max(1e-300).log10()).collect();
    let phase = fr.phase_deg();
    let mut out = String::with_capacity(16 * 1024);
    svg_open(&mut out, w, h);
    text(
        &mut out,
        x0,
        22.0,
        "start",
        &format!("{} | input {} | output order {}", fr.variant_id, fr.input.as_str(), fr.output_order),
    );

    // magnitude panel on integer decades
    let (dlo, mut dhi) = decade_bounds(&mag);
    if dhi == dlo {
        dhi += 1;
    }
    let mag_axis = Axis { lo: dlo as f64, hi: dhi as f64, top: 40.0, bottom: 230.0 };
    for d in dlo..=dhi {
        let y = mag_axis.y(d as f64);
        line(&mut out, x0, y, x1, y, GRID);
        text(&mut out, x0 - 6.0, y + 4.0, "end", &fmt_f64(10f64.powi(d)));
    }
    let pts: Vec<(f64, f64)> =
        fr.freqs.iter().zip(&mag).map(|(&f, &m)| (fx(f), mag_axis.y(m))).collect();
    polyline(&mut out, &pts);
    frame(&mut out, x0, x1, &mag_axis);
    text(&mut out, 16.0, 135.0, "start", &format!("mag [{}]", gain_unit(fr.input, fr.output_order)));

    // phase panel on 90 degree lines
    let plo = (phase.iter().cloned().fold(f64::INFINITY, f64::min) / 90.0).floor() * 90.0;
    let mut phi = (phase.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / 90.0).ceil() * 90.0;
    if phi == plo {
        phi += 90.0;
    }
    let ph_axis = Axis { lo: plo, hi: phi, top: 270.0, bottom: 440.0 };
    let mut g = plo;
    while g <= phi + 1e-9 {
        let y = ph_axis.y(g);
        line(&mut out, x0, y, x1, y, GRID);
        text(&mut out, x0 - 6.0, y + 4.0, "end", &fmt_f64(g));
        g += 90.0;
    }
    let pts: Vec<(f64, f64)> =
        fr.freqs.iter().zip(&phase).map(|(&f, &p)| (fx(f), ph_axis.y(p))).collect();
    polyline(&mut out, &pts);
    frame(&mut out, x0, x1, &ph_axis);
    text(&mut out, 16.0, 355.0, "start", "phase [deg]");

    // shared frequency ticks under the phase panel
    let step = tick_step(span);
    let mut f = (fmin / step).ceil() * step;
    while f <= fmax + 1e-9 {
        let x = fx(f);
        line(&mut out, x, 440.0, x, 446.0, INK);
        text(&mut out, x, 460.0, "middle", &format!("{f:.1}"));
        f += step;
    }
    text(&mut out, (x0 + x1) / 2.0, 476.0, "middle", "frequency [Hz]");
    out.push_str("</svg>\n");
    out
}

fn decade_bounds(log_mag: &[f64]) -> (i32, i32) {
    let lo = log_mag.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = log_mag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return (0, 1);
    }
    (lo.floor() as i32, hi.ceil() as i32)
}

fn frame(out: &mut String, x0: f64, x1: f64, axis: &Axis) {
    line(out, x0, axis.top, x0, axis.bottom, INK);
    line(out, x0, axis.bottom, x1, axis.bottom, INK);
}

/// Radar chart of the predicted ratings; radius is the clamped [1, 10]
/// prediction from the CSV twin, full radius at 10.
pub fn spider_svg(variant: &str, axes: &[(String, f64)]) -> String {
    let (w, h) = (420, 420);
    let (cx, cy, radius) = (210.0, 220.0, 150.0);
    let n = axes.len().max(1);
    let point = |i: usize, v: f64| -> (f64, f64) {
        let angle = std::f64::consts::TAU * i as f64 / n as f64 - std::f64::consts::FRAC_PI_2;
        (cx + radius * v / 10.0 * angle.cos(), cy + radius * v / 10.0 * angle.sin())
    };
    let ring_path = |v: f64| -> String {
        let mut attr = String::new();
        for i in 0..n {
            if i > 0 {
                attr.push(' ');
            }
            let (x, y) = point(i, v);
            let _ = write!(attr, "{x:.2},{y:.2}");
        }
        attr
    };
    let mut out = String::with_capacity(4 * 1024);
    svg_open(&mut out, w, h);
    text(&mut out, 16.0, 24.0, "start", variant);
    for ring in [2.0, 4.0, 6.0, 8.0, 10.0] {
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"none\" stroke=\"{GRID}\"/>",
            ring_path(ring)
        );
        let (x, y) = point(0, ring);
        text(&mut out, x + 4.0, y + 4.0, "start", &fmt_f64(ring));
    }
    for (i, (label, _)) in axes.iter().enumerate() {
        let (x, y) = point(i, 10.0);
        line(&mut out, cx, cy, x, y, GRID);
        let (lx, ly) = point(i, 11.4);
        text(&mut out, lx, ly + 4.0, "middle", label);
    }
    if !axes.is_empty() {
        let mut attr = String::new();
        for (i, (_, v)) in axes.iter().enumerate() {
            if i > 0 {
                attr.push(' ');
            }
            let (x, y) = point(i, *v);
            let _ = write!(attr, "{x:.2},{y:.2}");
        }
        let _ = writeln!(
            out,
            "<polygon points=\"{attr}\" fill=\"{PLOT_FG}\" fill-opacity=\"0.25\" \
             stroke=\"{PLOT_FG}\" stroke-width=\"1.5\"/>"
        );
    }
    out.push_str("</svg>\n");
    out
}
