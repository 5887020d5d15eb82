//! On-disk data model for measurement runs and rating studies.
//!
//! Run files are CSV with `# key=value` header comments carrying the
//! metadata (variant, v_kmh, ay_target, sample_rate), then a header row
//! `t,delta_h,m_h,a_y,phi[,phi_dot[,phi_ddot]]` and one sample per line.
//! Ratings files are `subject,variant,criterion,aspect,value`.
//!
//! Loading validates; nothing is silently repaired. Files written by
//! [`save_run`] / [`save_ratings`] round-trip byte-identically.

use crate::error::{Error, Result, RunViolation};
use std::fmt;
use std::path::Path;

/// Subjective rating criteria, in the fixed catalog order used everywhere
/// (tables, CSV output, spider charts).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    Ral,
    Rah,
    Tdl,
    Tdh,
    Irm,
    Ros,
    Or,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::Ral,
        Criterion::Rah,
        Criterion::Tdl,
        Criterion::Tdh,
        Criterion::Irm,
        Criterion::Ros,
        Criterion::Or,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Ral => "RAL",
            Criterion::Rah => "RAH",
            Criterion::Tdl => "TDL",
            Criterion::Tdh => "TDH",
            Criterion::Irm => "IRM",
            Criterion::Ros => "ROS",
            Criterion::Or => "OR",
        }
    }

    pub fn parse(s: &str) -> Option<Criterion> {
        Criterion::ALL.iter().copied().find(|c| c.as_str() == s)
    }

    /// Long description, for report labels.
    pub fn describe(self) -> &'static str {
        match self {
            Criterion::Ral => "roll angle, lower frequencies",
            Criterion::Rah => "roll angle, higher frequencies",
            Criterion::Tdl => "time delay, lower frequencies",
            Criterion::Tdh => "time delay, higher frequencies",
            Criterion::Irm => "initial roll motion",
            Criterion::Ros => "roll overshoot",
            Criterion::Or => "overall rating",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Aspect {
    Liking,
    Intensity,
}

impl Aspect {
    pub fn as_str(self) -> &'static str {
        match self {
            Aspect::Liking => "liking",
            Aspect::Intensity => "intensity",
        }
    }

    pub fn parse(s: &str) -> Option<Aspect> {
        match s {
            "liking" => Some(Aspect::Liking),
            "intensity" => Some(Aspect::Intensity),
            _ => None,
        }
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Variant label. A trailing `*` marks a repetition run of the base
/// variant (`RV*` repeats `RV`); repetitions count as distinct
/// observations in correlation analyses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariantId(pub String);

impl VariantId {
    pub fn new(name: impl Into<String>) -> Self {
        VariantId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_repetition(&self) -> bool {
        self.0.ends_with('*') && self.0.len() > 1
    }

    /// Base variant this run belongs to; the id itself unless it is a
    /// repetition marker.
    pub fn base(&self) -> &str {
        if self.is_repetition() {
            &self.0[..self.0.len() - 1]
        } else {
            &self.0
        }
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One uniformly sampled continuous-sine-steer run.
///
/// Channel units: t [s], delta_h [deg], m_h [Nm], a_y [m/s^2], phi [deg],
/// phi_dot [deg/s], phi_ddot [deg/s^2].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRun {
    pub variant_id: String,
    /// Vehicle speed [km/h].
    pub v_kmh: f64,
    /// Quasi-stationary lateral acceleration the manoeuvre targets [m/s^2].
    pub ay_target: f64,
    pub sample_rate: f64,
    pub t: Vec<f64>,
    pub delta_h: Vec<f64>,
    pub m_h: Vec<f64>,
    pub a_y: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_dot: Option<Vec<f64>>,
    pub phi_ddot: Option<Vec<f64>>,
}

pub const RUN_CHANNELS: [&str; 7] = ["t", "delta_h", "m_h", "a_y", "phi", "phi_dot", "phi_ddot"];

impl MeasurementRun {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        match name {
            "t" => Some(&self.t),
            "delta_h" => Some(&self.delta_h),
            "m_h" => Some(&self.m_h),
            "a_y" => Some(&self.a_y),
            "phi" => Some(&self.phi),
            "phi_dot" => self.phi_dot.as_deref(),
            "phi_ddot" => self.phi_ddot.as_deref(),
            _ => None,
        }
    }

    /// Checks every stated invariant; the first violation is returned.
    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        if n < 2 {
            return Err(RunViolation::TooShort { len: n }.into());
        }
        if self.phi_ddot.is_some() && self.phi_dot.is_none() {
            return Err(RunViolation::DanglingAccel.into());
        }
        let channels: [(&'static str, &[f64]); 4] = [
            ("delta_h", &self.delta_h),
            ("m_h", &self.m_h),
            ("a_y", &self.a_y),
            ("phi", &self.phi),
        ];
        for (name, data) in channels {
            if data.len() != n {
                return Err(RunViolation::LengthMismatch {
                    channel: name,
                    len: data.len(),
                    expected: n,
                }
                .into());
            }
        }
        for (name, data) in [("phi_dot", &self.phi_dot), ("phi_ddot", &self.phi_ddot)] {
            if let Some(data) = data {
                if data.len() != n {
                    return Err(RunViolation::LengthMismatch {
                        channel: if name == "phi_dot" { "phi_dot" } else { "phi_ddot" },
                        len: data.len(),
                        expected: n,
                    }
                    .into());
                }
            }
        }
        if !(self.sample_rate > 0.0) {
            return Err(RunViolation::BadSampleRate(self.sample_rate).into());
        }
        for name in RUN_CHANNELS {
            if let Some(data) = self.channel(name) {
                if let Some(i) = data.iter().position(|v| !v.is_finite()) {
                    return Err(RunViolation::NonFinite {
                        channel: match name {
                            "t" => "t",
                            "delta_h" => "delta_h",
                            "m_h" => "m_h",
                            "a_y" => "a_y",
                            "phi" => "phi",
                            "phi_dot" => "phi_dot",
                            _ => "phi_ddot",
                        },
                        index: i,
                    }
                    .into());
                }
            }
        }
        let step = (self.t[n - 1] - self.t[0]) / (n - 1) as f64;
        for i in 1..n {
            let dt = self.t[i] - self.t[i - 1];
            if dt <= 0.0 {
                return Err(RunViolation::NonIncreasingTime { index: i }.into());
            }
            // uniform step within 1e-6 s
            if (dt - step).abs() > 1e-6 {
                return Err(RunViolation::NonUniformStep {
                    index: i,
                    step: dt,
                    expected: step,
                }
                .into());
            }
        }
        let measured = 1.0 / step;
        if (measured / self.sample_rate - 1.0).abs() > 1e-6 {
            return Err(RunViolation::SampleRateMismatch {
                declared: self.sample_rate,
                measured,
            }
            .into());
        }
        Ok(())
    }
}

/// Returns the run unchanged if every invariant holds.
pub fn validate_run(run: MeasurementRun) -> Result<MeasurementRun> {
    run.validate()?;
    Ok(run)
}

/// Shortest round-trip decimal form, integral values without a trailing
/// `.0`. Canonical number format of every file this crate writes.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn parse_f64(origin: &str, line: usize, field: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(origin, line, format!("bad {field} value {s:?}")))
}

pub fn load_run(path: &Path) -> Result<MeasurementRun> {
    let text = std::fs::read_to_string(path)?;
    load_run_str(&text, &path.display().to_string())
}

/// Parses run CSV content. `origin` appears in error messages.
pub fn load_run_str(text: &str, origin: &str) -> Result<MeasurementRun> {
    let mut variant: Option<String> = None;
    let mut v_kmh: Option<f64> = None;
    let mut ay_target: Option<f64> = None;
    let mut sample_rate: Option<f64> = None;
    let mut columns: Option<Vec<String>> = None;
    let mut data: Vec<Vec<f64>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            let Some((key, value)) = comment.split_once('=') else {
                continue; // free-form comment
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "variant" => variant = Some(value.to_string()),
                "v_kmh" => v_kmh = Some(parse_f64(origin, lineno, "v_kmh", value)?),
                "ay_target" => ay_target = Some(parse_f64(origin, lineno, "ay_target", value)?),
                "sample_rate" => {
                    sample_rate = Some(parse_f64(origin, lineno, "sample_rate", value)?)
                }
                other => {
                    return Err(Error::parse(
                        origin,
                        lineno,
                        format!("unknown header key {other:?}"),
                    ))
                }
            }
            continue;
        }
        if columns.is_none() {
            let cols: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
            let want: &[&[&str]] = &[
                &["t", "delta_h", "m_h", "a_y", "phi"],
                &["t", "delta_h", "m_h", "a_y", "phi", "phi_dot"],
                &["t", "delta_h", "m_h", "a_y", "phi", "phi_dot", "phi_ddot"],
            ];
            if !want.iter().any(|w| cols == *w) {
                // name the first missing mandatory channel for diagnosis
                for ch in ["t", "delta_h", "m_h", "a_y", "phi"] {
                    if !cols.iter().any(|c| c == ch) {
                        return Err(Error::parse(
                            origin,
                            lineno,
                            format!("missing channel {ch}"),
                        ));
                    }
                }
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("unexpected column layout {:?}", cols.join(",")),
                ));
            }
            data = vec![Vec::new(); cols.len()];
            columns = Some(cols);
            continue;
        }
        let ncol = data.len();
        let mut count = 0;
        for (ci, cell) in line.split(',').enumerate() {
            if ci >= ncol {
                return Err(Error::parse(origin, lineno, "too many fields"));
            }
            let v = parse_f64(origin, lineno, &columns.as_ref().unwrap()[ci], cell)?;
            if !v.is_finite() {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("non-finite {} sample", columns.as_ref().unwrap()[ci]),
                ));
            }
            data[ci].push(v);
            count += 1;
        }
        if count != ncol {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected {ncol} fields, got {count}"),
            ));
        }
    }

    let columns = columns.ok_or_else(|| Error::parse(origin, 1, "no header row"))?;
    let sample_rate =
        sample_rate.ok_or_else(|| Error::parse(origin, 1, "missing required header key sample_rate"))?;
    let mut iter = data.into_iter();
    let run = MeasurementRun {
        variant_id: variant.unwrap_or_else(|| "unnamed".to_string()),
        v_kmh: v_kmh.unwrap_or(100.0),
        ay_target: ay_target.unwrap_or(4.0),
        sample_rate,
        t: iter.next().unwrap(),
        delta_h: iter.next().unwrap(),
        m_h: iter.next().unwrap(),
        a_y: iter.next().unwrap(),
        phi: iter.next().unwrap(),
        phi_dot: if columns.len() > 5 { iter.next() } else { None },
        phi_ddot: if columns.len() > 6 { iter.next() } else { None },
    };
    run.validate()?;
    Ok(run)
}

pub fn save_run(run: &MeasurementRun, path: &Path) -> Result<()> {
    run.validate()?;
    std::fs::write(path, run_to_string(run))?;
    Ok(())
}

pub fn run_to_string(run: &MeasurementRun) -> String {
    let n = run.len();
    let mut out = String::with_capacity(n * 48);
    out.push_str(&format!("# variant={}\n", run.variant_id));
    out.push_str(&format!("# v_kmh={}\n", fmt_f64(run.v_kmh)));
    out.push_str(&format!("# ay_target={}\n", fmt_f64(run.ay_target)));
    out.push_str(&format!("# sample_rate={}\n", fmt_f64(run.sample_rate)));
    out.push_str("t,delta_h,m_h,a_y,phi");
    if run.phi_dot.is_some() {
        out.push_str(",phi_dot");
    }
    if run.phi_ddot.is_some() {
        out.push_str(",phi_ddot");
    }
    out.push('\n');
    for i in 0..n {
        out.push_str(&fmt_f64(run.t[i]));
        for ch in [&run.delta_h, &run.m_h, &run.a_y, &run.phi] {
            out.push(',');
            out.push_str(&fmt_f64(ch[i]));
        }
        if let Some(pd) = &run.phi_dot {
            out.push(',');
            out.push_str(&fmt_f64(pd[i]));
        }
        if let Some(pdd) = &run.phi_ddot {
            out.push(',');
            out.push_str(&fmt_f64(pdd[i]));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatingEntry {
    pub subject: String,
    pub variant: String,
    pub criterion: Criterion,
    pub aspect: Aspect,
    pub value: f64,
}

/// Ratings indexed by (subject, variant, criterion, aspect). Missing
/// entries are simply absent; nothing is zero-filled. Entry order is
/// preserved so saved files match their source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatingTable {
    entries: Vec<RatingEntry>,
}

impl RatingTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts with uniqueness and scale checks (ratings live on 1..10;
    /// OR has no intensity aspect).
    pub fn insert(&mut self, entry: RatingEntry) -> Result<()> {
        if !(1.0..=10.0).contains(&entry.value) {
            return Err(Error::Ratings(format!(
                "rating outside [1,10]: {} for ({}, {}, {}, {})",
                entry.value, entry.subject, entry.variant, entry.criterion, entry.aspect
            )));
        }
        if entry.criterion == Criterion::Or && entry.aspect == Aspect::Intensity {
            return Err(Error::Ratings(
                "OR has no intensity aspect".to_string(),
            ));
        }
        if self.get(&entry.subject, &entry.variant, entry.criterion, entry.aspect).is_some() {
            return Err(Error::Ratings(format!(
                "duplicate rating ({}, {}, {}, {})",
                entry.subject, entry.variant, entry.criterion, entry.aspect
            )));
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Inserts without the 1..10 bound, for derived analysis values
    /// (standardization can leave the raw scale). Uniqueness still holds.
    pub(crate) fn insert_unchecked(&mut self, entry: RatingEntry) {
        self.entries.push(entry);
    }

    pub fn get(&self, subject: &str, variant: &str, criterion: Criterion, aspect: Aspect) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| {
                e.subject == subject
                    && e.variant == variant
                    && e.criterion == criterion
                    && e.aspect == aspect
            })
            .map(|e| e.value)
    }

    pub fn entries(&self) -> &[RatingEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Unique subjects in first-seen order.
    pub fn subjects(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.subject.as_str()) {
                out.push(&e.subject);
            }
        }
        out
    }

    /// Unique variants in first-seen order.
    pub fn variants(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.variant.as_str()) {
                out.push(&e.variant);
            }
        }
        out
    }

    /// Criteria present for the aspect, in catalog order.
    pub fn criteria(&self, aspect: Aspect) -> Vec<Criterion> {
        Criterion::ALL
            .iter()
            .copied()
            .filter(|c| self.entries.iter().any(|e| e.criterion == *c && e.aspect == aspect))
            .collect()
    }

    /// Mean over subjects for one (variant, criterion, aspect) cell;
    /// None if no subject rated it.
    pub fn variant_mean(&self, variant: &str, criterion: Criterion, aspect: Aspect) -> Option<f64> {
        let vals: Vec<f64> = self
            .entries
            .iter()
            .filter(|e| e.variant == variant && e.criterion == criterion && e.aspect == aspect)
            .map(|e| e.value)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }

    /// All values one subject gave for an aspect.
    pub fn subject_values(&self, subject: &str, aspect: Aspect) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.subject == subject && e.aspect == aspect)
            .map(|e| e.value)
            .collect()
    }
}

pub fn load_ratings(path: &Path) -> Result<RatingTable> {
    let text = std::fs::read_to_string(path)?;
    load_ratings_str(&text, &path.display().to_string())
}

pub fn load_ratings_str(text: &str, origin: &str) -> Result<RatingTable> {
    let mut table = RatingTable::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != "subject,variant,criterion,aspect,value" {
                return Err(Error::parse(
                    origin,
                    lineno,
                    "expected header subject,variant,criterion,aspect,value",
                ));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        let criterion = Criterion::parse(fields[2])
            .ok_or_else(|| Error::parse(origin, lineno, format!("unknown criterion {:?}", fields[2])))?;
        let aspect = Aspect::parse(fields[3])
            .ok_or_else(|| Error::parse(origin, lineno, format!("unknown aspect {:?}", fields[3])))?;
        let value = parse_f64(origin, lineno, "rating", fields[4])?;
        table
            .insert(RatingEntry {
                subject: fields[0].to_string(),
                variant: fields[1].to_string(),
                criterion,
                aspect,
                value,
            })
            .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
    }
    if !seen_header {
        return Err(Error::parse(origin, 1, "no header row"));
    }
    Ok(table)
}

pub fn ratings_to_string(table: &RatingTable) -> String {
    let mut out = String::from("subject,variant,criterion,aspect,value\n");
    for e in table.entries() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.subject,
            e.variant,
            e.criterion,
            e.aspect,
            fmt_f64(e.value)
        ));
    }
    out
}

pub fn save_ratings(table: &RatingTable, path: &Path) -> Result<()> {
    std::fs::write(path, ratings_to_string(table))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_run() -> MeasurementRun {
        let n = 32;
        let fs = 100.0;
        MeasurementRun {
            variant_id: "test".into(),
            v_kmh: 100.0,
            ay_target: 4.0,
            sample_rate: fs,
            t: (0..n).map(|i| i as f64 / fs).collect(),
            delta_h: (0..n).map(|i| (i as f64 * 0.1).sin()).collect(),
            m_h: (0..n).map(|i| (i as f64 * 0.1).cos()).collect(),
            a_y: (0..n).map(|i| i as f64 * 0.01).collect(),
            phi: (0..n).map(|i| i as f64 * 0.02).collect(),
            phi_dot: None,
            phi_ddot: None,
        }
    }

    #[test]
    fn roundtrip_is_byte_identical() {
        let run = small_run();
        let text = run_to_string(&run);
        let back = load_run_str(&text, "mem").unwrap();
        assert_eq!(back, run);
        assert_eq!(run_to_string(&back), text);
    }

    #[test]
    fn missing_channel_named() {
        let text = "# sample_rate=100\nt,delta_h,a_y,phi\n0,0,0,0\n";
        let err = load_run_str(text, "mem").unwrap_err();
        assert!(err.to_string().contains("missing channel m_h"), "{err}");
    }

    #[test]
    fn nan_cites_line() {
        let mut text = String::from("# sample_rate=100\nt,delta_h,m_h,a_y,phi\n");
        for i in 0..10 {
            if i == 5 {
                text.push_str(&format!("{},0,NaN,0,0\n", i as f64 / 100.0));
            } else {
                text.push_str(&format!("{},0,0,0,0\n", i as f64 / 100.0));
            }
        }
        let err = load_run_str(&text, "mem").unwrap_err();
        // header comment + column row + 5 data rows before the bad one
        assert!(err.to_string().contains(":8:"), "{err}");
        assert!(err.to_string().contains("m_h"), "{err}");
    }

    #[test]
    fn nonuniform_step_rejected() {
        let mut run = small_run();
        run.t[10] += 0.004;
        let err = run.validate().unwrap_err();
        assert!(err.to_string().contains("non-uniform"), "{err}");
    }

    #[test]
    fn too_short_rejected() {
        let mut run = small_run();
        run.t.truncate(1);
        run.delta_h.truncate(1);
        run.m_h.truncate(1);
        run.a_y.truncate(1);
        run.phi.truncate(1);
        let err = run.validate().unwrap_err();
        assert!(err.to_string().contains("too short"), "{err}");
    }

    #[test]
    fn sample_rate_consistency() {
        let mut run = small_run();
        run.sample_rate = 50.0;
        let err = run.validate().unwrap_err();
        assert!(err.to_string().contains("inconsistent"), "{err}");
    }

    #[test]
    fn ratings_bounds_and_duplicates() {
        let mut t = RatingTable::new();
        let entry = RatingEntry {
            subject: "s1".into(),
            variant: "RV".into(),
            criterion: Criterion::Ral,
            aspect: Aspect::Liking,
            value: 7.5,
        };
        t.insert(entry.clone()).unwrap();
        let err = t.insert(entry.clone()).unwrap_err();
        assert!(err.to_string().contains("duplicate rating"), "{err}");
        let mut bad = entry.clone();
        bad.variant = "RD".into();
        bad.value = 11.0;
        let err = t.insert(bad).unwrap_err();
        assert!(err.to_string().contains("outside [1,10]"), "{err}");
    }

    #[test]
    fn or_intensity_rejected() {
        let mut t = RatingTable::new();
        let err = t
            .insert(RatingEntry {
                subject: "s1".into(),
                variant: "RV".into(),
                criterion: Criterion::Or,
                aspect: Aspect::Intensity,
                value: 5.0,
            })
            .unwrap_err();
        assert!(err.to_string().contains("OR has no intensity"), "{err}");
    }

    #[test]
    fn repetition_ids() {
        let id = VariantId::new("RV*");
        assert!(id.is_repetition());
        assert_eq!(id.base(), "RV");
        let id = VariantId::new("RV");
        assert!(!id.is_repetition());
        assert_eq!(id.base(), "RV");
    }
}
