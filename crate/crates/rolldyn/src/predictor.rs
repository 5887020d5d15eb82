//! Calibrated prediction models: rating = intercept + sum of weighted
//! characteristic values.
//!
//! Model files state a calibration range next to every term. Terms
//! wrapped in resolve() do not trust their own key: the key is re-bound
//! by matching the range against the per-key min/max of the six-variant
//! study data, to one unit in the last printed digit per endpoint. The
//! nominal key wins whenever it matches its own range.

use crate::charvals::{CharacteristicValueSet, CvKey};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::ingest::{fmt_f64, Aspect, Criterion, RatingTable};
use crate::ratestats::{rmse, RmseMode};
use std::path::Path;

/// Closed interval with per-endpoint match tolerances derived from the
/// printed literals: one unit in the last printed digit.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeBound {
    pub lo: f64,
    pub hi: f64,
    pub lo_tol: f64,
    pub hi_tol: f64,
}

/// One unit in the last digit of the literal: "2.70" gives 0.01,
/// "-99" gives 1, "0.086" gives 0.001.
fn literal_tolerance(text: &str) -> Result<f64> {
    let t = text.trim();
    if t.parse::<f64>().is_err() {
        return Err(Error::Prediction(format!("bad range literal {text:?}")));
    }
    Ok(match t.split_once('.') {
        Some((_, frac)) => 10f64.powi(-(frac.len() as i32)),
        None => 1.0,
    })
}

impl RangeBound {
    pub fn parse(lo_text: &str, hi_text: &str) -> Result<RangeBound> {
        let lo: f64 = lo_text
            .trim()
            .parse()
            .map_err(|_| Error::Prediction(format!("bad range literal {lo_text:?}")))?;
        let hi: f64 = hi_text
            .trim()
            .parse()
            .map_err(|_| Error::Prediction(format!("bad range literal {hi_text:?}")))?;
        if lo >= hi {
            return Err(Error::Prediction(format!("empty range [{lo}, {hi}]")));
        }
        Ok(RangeBound {
            lo,
            hi,
            lo_tol: literal_tolerance(lo_text)?,
            hi_tol: literal_tolerance(hi_text)?,
        })
    }

    /// Calibration-range membership (exact bounds, no tolerance).
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Whether observed per-key extremes reproduce the printed range.
    pub fn matches_endpoints(&self, min: f64, max: f64) -> bool {
        (min - self.lo).abs() <= self.lo_tol && (max - self.hi).abs() <= self.hi_tol
    }

    fn endpoint_text(value: f64, tol: f64) -> String {
        let decimals = (-tol.log10()).round().max(0.0) as usize;
        format!("{value:.decimals$}")
    }

    pub fn display_text(&self) -> String {
        format!(
            "[{}, {}]",
            Self::endpoint_text(self.lo, self.lo_tol),
            Self::endpoint_text(self.hi, self.hi_tol)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelTerm {
    pub coefficient: f64,
    /// Effective key; resolution replaces a nominal key in place.
    pub key: CvKey,
    pub range: RangeBound,
    /// Whether the key is subject to range re-binding.
    pub resolve: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionModel {
    pub criterion: Criterion,
    pub intercept: f64,
    /// Calibration fit quality as published with the model.
    pub r2_adj: f64,
    pub terms: Vec<ModelTerm>,
}

/// Re-binds a printed range to the key whose study min/max reproduces
/// it. The nominal key is kept when it matches its own range; otherwise
/// exactly one other key must match.
pub fn resolve_binding(
    range: &RangeBound,
    nominal: &CvKey,
    cvsets: &[CharacteristicValueSet],
) -> Result<CvKey> {
    if cvsets.len() != 6 {
        return Err(Error::Prediction(format!(
            "binding resolution needs the six-variant study data, got {} sets",
            cvsets.len()
        )));
    }
    let shared: Vec<CvKey> = cvsets[0]
        .keys()
        .filter(|k| cvsets.iter().all(|s| s.get(k).is_some()))
        .copied()
        .collect();
    let extremes = |key: &CvKey| -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for set in cvsets {
            let v = set.get(key).expect("shared key");
            min = min.min(v);
            max = max.max(v);
        }
        (min, max)
    };
    let matches: Vec<CvKey> = shared
        .iter()
        .filter(|k| {
            let (min, max) = extremes(k);
            range.matches_endpoints(min, max)
        })
        .copied()
        .collect();
    if matches.contains(nominal) {
        return Ok(*nominal);
    }
    match matches.len() {
        1 => Ok(matches[0]),
        0 => Err(Error::UnresolvedBinding {
            lo: range.lo,
            hi: range.hi,
            detail: format!("no key reproduces the range (nominal {nominal})"),
        }),
        _ => Err(Error::UnresolvedBinding {
            lo: range.lo,
            hi: range.hi,
            detail: format!(
                "ambiguous, candidates: {}",
                matches
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }),
    }
}

/// Resolves every resolve() term of every model in place.
pub fn resolve_models(
    models: &mut [PredictionModel],
    cvsets: &[CharacteristicValueSet],
) -> Result<()> {
    for model in models.iter_mut() {
        for term in model.terms.iter_mut() {
            if term.resolve {
                term.key = resolve_binding(&term.range, &term.key, cvsets)?;
            }
        }
    }
    Ok(())
}

const MODELS_BANNER: &str = "# rolldyn models v1";

/// Parses a model file without binding resolution; resolve() keys stay
/// nominal with the resolve flag set.
pub fn parse_models(text: &str, origin: &str) -> Result<Vec<PredictionModel>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end() == MODELS_BANNER => {}
        _ => {
            return Err(Error::parse(
                origin,
                1,
                format!("missing {MODELS_BANNER:?} banner"),
            ))
        }
    }
    let mut models: Vec<PredictionModel> = Vec::new();
    let mut open: Option<(Criterion, Option<f64>, Option<f64>, Vec<ModelTerm>, usize)> = None;

    fn close(
        models: &mut Vec<PredictionModel>,
        open: Option<(Criterion, Option<f64>, Option<f64>, Vec<ModelTerm>, usize)>,
        origin: &str,
    ) -> Result<()> {
        let Some((criterion, intercept, r2_adj, terms, lineno)) = open else {
            return Ok(());
        };
        let intercept = intercept.ok_or_else(|| {
            Error::parse(origin, lineno, format!("model {} has no intercept", criterion.as_str()))
        })?;
        let r2_adj = r2_adj.ok_or_else(|| {
            Error::parse(origin, lineno, format!("model {} has no r2_adj", criterion.as_str()))
        })?;
        if terms.is_empty() {
            return Err(Error::parse(
                origin,
                lineno,
                format!("model {} has no terms", criterion.as_str()),
            ));
        }
        models.push(PredictionModel { criterion, intercept, r2_adj, terms });
        Ok(())
    }

    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let criterion = Criterion::parse(name.trim()).ok_or_else(|| {
                Error::parse(origin, lineno, format!("unknown criterion {name:?}"))
            })?;
            if models.iter().any(|m| m.criterion == criterion)
                || open.as_ref().is_some_and(|o| o.0 == criterion)
            {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("duplicate model for {}", criterion.as_str()),
                ));
            }
            close(&mut models, open.take(), origin)?;
            open = Some((criterion, None, None, Vec::new(), lineno));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(origin, lineno, format!("expected key = value, got {line:?}")));
        };
        let Some(model) = open.as_mut() else {
            return Err(Error::parse(origin, lineno, "key outside a [criterion] section"));
        };
        let value = value.trim();
        match key.trim() {
            "intercept" => {
                model.1 = Some(value.parse().map_err(|_| {
                    Error::parse(origin, lineno, format!("bad intercept {value:?}"))
                })?)
            }
            "r2_adj" => {
                model.2 = Some(value.parse().map_err(|_| {
                    Error::parse(origin, lineno, format!("bad r2_adj {value:?}"))
                })?)
            }
            "term" => model.3.push(parse_term(value, origin, lineno)?),
            other => {
                return Err(Error::parse(origin, lineno, format!("unknown key {other:?}")))
            }
        }
    }
    close(&mut models, open, origin)?;
    if models.is_empty() {
        return Err(Error::parse(origin, 1, "no models in file"));
    }
    Ok(models)
}

/// `<coefficient> * <key> in [<lo>, <hi>]`, key optionally wrapped in
/// resolve().
fn parse_term(text: &str, origin: &str, lineno: usize) -> Result<ModelTerm> {
    let bad = |what: &str| Error::parse(origin, lineno, format!("{what} in term {text:?}"));
    let (coef_text, rest) = text.split_once('*').ok_or_else(|| bad("missing *"))?;
    let coefficient: f64 = coef_text.trim().parse().map_err(|_| bad("bad coefficient"))?;
    let (key_text, range_text) = rest.split_once(" in ").ok_or_else(|| bad("missing in"))?;
    let key_text = key_text.trim();
    let (key_text, resolve) = match key_text
        .strip_prefix("resolve(")
        .and_then(|k| k.strip_suffix(')'))
    {
        Some(inner) => (inner.trim(), true),
        None => (key_text, false),
    };
    let key = CvKey::parse(key_text)
        .map_err(|e| Error::parse(origin, lineno, format!("{e} in term {text:?}")))?;
    let range_text = range_text.trim();
    let inner = range_text
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| bad("missing [lo, hi] range"))?;
    let (lo_text, hi_text) = inner.split_once(',').ok_or_else(|| bad("missing range comma"))?;
    let range = RangeBound::parse(lo_text, hi_text)
        .map_err(|e| Error::parse(origin, lineno, format!("{e} in term {text:?}")))?;
    Ok(ModelTerm { coefficient, key, range, resolve })
}

pub fn models_to_string(models: &[PredictionModel]) -> String {
    let mut out = String::from(MODELS_BANNER);
    out.push('\n');
    for model in models {
        out.push('\n');
        out.push_str(&format!("[{}]\n", model.criterion.as_str()));
        out.push_str(&format!("r2_adj = {}\n", fmt_f64(model.r2_adj)));
        out.push_str(&format!("intercept = {}\n", fmt_f64(model.intercept)));
        for term in &model.terms {
            let key = if term.resolve {
                format!("resolve({})", term.key)
            } else {
                term.key.to_string()
            };
            out.push_str(&format!(
                "term = {} * {key} in {}\n",
                fmt_f64(term.coefficient),
                term.range.display_text()
            ));
        }
    }
    out
}

pub fn save_models(models: &[PredictionModel], path: &Path) -> Result<()> {
    std::fs::write(path, models_to_string(models))?;
    Ok(())
}

/// Loads a model file and resolves resolve() terms against the bundled
/// study data.
pub fn load_models(path: &Path) -> Result<Vec<PredictionModel>> {
    let text = std::fs::read_to_string(path)?;
    let mut models = parse_models(&text, &path.display().to_string())?;
    resolve_models(&mut models, &fixtures::study_cvs()?)?;
    Ok(models)
}

const BUILTIN_MODELS: &str = include_str!("../data/builtin_models.txt");

/// The seven calibrated study models, binding-resolved and ready to
/// apply.
pub fn builtin_models() -> Result<Vec<PredictionModel>> {
    let mut models = parse_models(BUILTIN_MODELS, "builtin:models")?;
    resolve_models(&mut models, &fixtures::study_cvs()?)?;
    Ok(models)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub criterion: Criterion,
    pub value: f64,
    /// Per-term calibration-range membership, in term order.
    pub in_range: Vec<bool>,
    pub warnings: Vec<String>,
}

/// Applies a model to one variant's characteristic values. The raw
/// prediction is never clamped unless asked; leaving the calibration
/// range only warns.
pub fn predict(
    model: &PredictionModel,
    cvs: &CharacteristicValueSet,
    clamp: bool,
) -> Result<PredictionReport> {
    let mut value = model.intercept;
    let mut in_range = Vec::with_capacity(model.terms.len());
    let mut warnings = Vec::new();
    for term in &model.terms {
        let v = cvs.get(&term.key).ok_or_else(|| {
            Error::Prediction(format!(
                "characteristic value {} missing for variant {}",
                term.key, cvs.variant_id
            ))
        })?;
        let ok = term.range.contains(v);
        if !ok {
            warnings.push(format!(
                "{} = {} outside calibration range {} of {}",
                term.key,
                fmt_f64(v),
                term.range.display_text(),
                model.criterion.as_str()
            ));
        }
        in_range.push(ok);
        value += term.coefficient * v;
    }
    if clamp {
        let clamped = value.clamp(1.0, 10.0);
        if clamped != value {
            warnings.push(format!(
                "prediction {} of {} clamped to {}",
                fmt_f64(value),
                model.criterion.as_str(),
                fmt_f64(clamped)
            ));
            value = clamped;
        }
    }
    Ok(PredictionReport { criterion: model.criterion, value, in_range, warnings })
}

pub fn predict_all(
    models: &[PredictionModel],
    cvs: &CharacteristicValueSet,
    clamp: bool,
) -> Result<Vec<PredictionReport>> {
    models.iter().map(|m| predict(m, cvs, clamp)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionBacktest {
    pub criterion: Criterion,
    pub variants: Vec<String>,
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
    /// actual minus predicted, per variant.
    pub residuals: Vec<f64>,
    pub rmse_sum: f64,
    pub rmse_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub criteria: Vec<CriterionBacktest>,
    /// Criterion with the largest summed RMSE.
    pub worst: Criterion,
}

/// Compares model predictions against mean liking ratings on the
/// variants shared by both inputs.
pub fn backtest(
    models: &[PredictionModel],
    cvsets: &[CharacteristicValueSet],
    ratings: &RatingTable,
) -> Result<BacktestReport> {
    if models.is_empty() {
        return Err(Error::Prediction("no models to backtest".into()));
    }
    let mut criteria = Vec::new();
    for model in models {
        let mut variants = Vec::new();
        let mut actual = Vec::new();
        let mut predicted = Vec::new();
        for set in cvsets {
            let Some(mean) =
                ratings.variant_mean(&set.variant_id, model.criterion, Aspect::Liking)
            else {
                continue;
            };
            variants.push(set.variant_id.clone());
            actual.push(mean);
            predicted.push(predict(model, set, false)?.value);
        }
        if variants.is_empty() {
            return Err(Error::Prediction(format!(
                "no overlapping variants between value sets and {} ratings",
                model.criterion.as_str()
            )));
        }
        let residuals: Vec<f64> =
            actual.iter().zip(&predicted).map(|(a, p)| a - p).collect();
        criteria.push(CriterionBacktest {
            criterion: model.criterion,
            rmse_sum: rmse(&actual, &predicted, RmseMode::Sum)?,
            rmse_mean: rmse(&actual, &predicted, RmseMode::Mean)?,
            variants,
            actual,
            predicted,
            residuals,
        });
    }
    let worst = criteria
        .iter()
        .max_by(|a, b| a.rmse_sum.partial_cmp(&b.rmse_sum).unwrap())
        .map(|c| c.criterion)
        .unwrap();
    Ok(BacktestReport { criteria, worst })
}
