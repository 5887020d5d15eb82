//! Welch cross-spectral frequency-response estimation.
//!
//! The estimator is H1: G(f) = S_uy(f) / S_uu(f), averaged over
//! overlapping windowed segments. Responses are kept on the evaluated
//! band only (default 0.2..2.5 Hz); phase is reported unwrapped in
//! degrees with the lowest bin forced into (-180, 180].

use crate::error::{Error, Result};
use crate::ingest::{fmt_f64, MeasurementRun};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::fmt;
use std::path::Path;

/// Input side of a transfer function, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InputChannel {
    /// Steering torque M_H [Nm].
    Mh,
    /// Steering wheel angle delta_H [deg].
    Dh,
    /// Lateral acceleration a_y [m/s^2].
    Ay,
}

impl InputChannel {
    pub const ALL: [InputChannel; 3] = [InputChannel::Mh, InputChannel::Dh, InputChannel::Ay];

    /// Short token used in keys, file names and CSV cells.
    pub fn as_str(self) -> &'static str {
        match self {
            InputChannel::Mh => "mh",
            InputChannel::Dh => "dh",
            InputChannel::Ay => "ay",
        }
    }

    /// Channel name in run files.
    pub fn channel_name(self) -> &'static str {
        match self {
            InputChannel::Mh => "m_h",
            InputChannel::Dh => "delta_h",
            InputChannel::Ay => "a_y",
        }
    }

    /// Accepts both the short token and the run channel name.
    pub fn parse(s: &str) -> Option<InputChannel> {
        match s {
            "mh" | "m_h" => Some(InputChannel::Mh),
            "dh" | "delta_h" => Some(InputChannel::Dh),
            "ay" | "a_y" => Some(InputChannel::Ay),
            _ => None,
        }
    }

    /// Physical input unit, for deriving gain units.
    pub fn unit(self) -> &'static str {
        match self {
            InputChannel::Mh => "Nm",
            InputChannel::Dh => "deg",
            InputChannel::Ay => "m/s^2",
        }
    }
}

impl fmt::Display for InputChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Hann,
    Hamming,
    Rectangular,
}

impl Window {
    pub fn as_str(self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Hamming => "hamming",
            Window::Rectangular => "rect",
        }
    }

    pub fn parse(s: &str) -> Option<Window> {
        match s {
            "hann" => Some(Window::Hann),
            "hamming" => Some(Window::Hamming),
            "rect" | "rectangular" => Some(Window::Rectangular),
            _ => None,
        }
    }

    /// Periodic window samples of length n.
    fn samples(self, n: usize) -> Vec<f64> {
        let nn = n as f64;
        (0..n)
            .map(|i| {
                let x = std::f64::consts::TAU * i as f64 / nn;
                match self {
                    Window::Hann => 0.5 * (1.0 - x.cos()),
                    Window::Hamming => 0.54 - 0.46 * x.cos(),
                    Window::Rectangular => 1.0,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detrend {
    None,
    Mean,
}

impl Detrend {
    pub fn as_str(self) -> &'static str {
        match self {
            Detrend::None => "none",
            Detrend::Mean => "mean",
        }
    }

    pub fn parse(s: &str) -> Option<Detrend> {
        match s {
            "none" => Some(Detrend::None),
            "mean" => Some(Detrend::Mean),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WelchConfig {
    pub segment_length: usize,
    pub overlap_fraction: f64,
    pub window: Window,
    pub detrend: Detrend,
    /// Evaluated frequency band [Hz]; responses are cropped to it.
    pub eval_band: (f64, f64),
}

/// Frequency resolution the default segment length targets. Tighter than
/// the 0.05 Hz the characteristic values need; the margin keeps coherence
/// high at lightly damped resonances and derivative ratios accurate at
/// the band edges.
pub const DEFAULT_RESOLUTION_HZ: f64 = 0.025;

pub const DEFAULT_EVAL_BAND: (f64, f64) = (0.2, 2.5);

impl WelchConfig {
    /// Default analysis settings for a given sample rate: Hann window,
    /// half-overlapping segments, per-segment mean removal, and the
    /// smallest power-of-two segment with resolution <= 0.025 Hz.
    pub fn default_for(sample_rate: f64) -> WelchConfig {
        let mut seg = 8usize;
        while sample_rate / seg as f64 > DEFAULT_RESOLUTION_HZ && seg < (1 << 24) {
            seg *= 2;
        }
        WelchConfig {
            segment_length: seg,
            overlap_fraction: 0.5,
            window: Window::Hann,
            detrend: Detrend::Mean,
            eval_band: DEFAULT_EVAL_BAND,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segment_length < 8 {
            return Err(Error::Spectra(format!(
                "segment length {} too small, need >= 8",
                self.segment_length
            )));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::Spectra(format!(
                "overlap fraction {} outside [0, 1)",
                self.overlap_fraction
            )));
        }
        let (lo, hi) = self.eval_band;
        if !(lo.is_finite() && hi.is_finite() && lo < hi && lo > 0.0) {
            return Err(Error::Spectra(format!(
                "bad evaluation band [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

/// Partial Welch settings layered over a base configuration; unset
/// fields keep the base value. Lets file- and flag-level overrides
/// stack on the per-run default.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WelchOverrides {
    pub segment_length: Option<usize>,
    pub overlap_fraction: Option<f64>,
    pub window: Option<Window>,
    pub detrend: Option<Detrend>,
    pub band_lo: Option<f64>,
    pub band_hi: Option<f64>,
}

impl WelchOverrides {
    pub fn apply_to(&self, cfg: &mut WelchConfig) {
        if let Some(v) = self.segment_length {
            cfg.segment_length = v;
        }
        if let Some(v) = self.overlap_fraction {
            cfg.overlap_fraction = v;
        }
        if let Some(v) = self.window {
            cfg.window = v;
        }
        if let Some(v) = self.detrend {
            cfg.detrend = v;
        }
        if let Some(v) = self.band_lo {
            cfg.eval_band.0 = v;
        }
        if let Some(v) = self.band_hi {
            cfg.eval_band.1 = v;
        }
    }

    /// Overlays `other` on top of this set; `other` wins where both set
    /// a field.
    pub fn merged_with(&self, other: &WelchOverrides) -> WelchOverrides {
        WelchOverrides {
            segment_length: other.segment_length.or(self.segment_length),
            overlap_fraction: other.overlap_fraction.or(self.overlap_fraction),
            window: other.window.or(self.window),
            detrend: other.detrend.or(self.detrend),
            band_lo: other.band_lo.or(self.band_lo),
            band_hi: other.band_hi.or(self.band_hi),
        }
    }

    /// Applies to the default configuration for `sample_rate` and
    /// validates the result.
    pub fn resolve_for(&self, sample_rate: f64) -> Result<WelchConfig> {
        let mut cfg = WelchConfig::default_for(sample_rate);
        self.apply_to(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Complex frequency response of one (input, roll-output-order) pair on
/// the evaluated band of the Welch grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub input: InputChannel,
    /// Derivative order of the roll-angle output: 0 phi, 1 phi_dot, 2 phi_ddot.
    pub output_order: u8,
    pub freqs: Vec<f64>,
    pub values: Vec<Complex64>,
    pub coherence: Option<Vec<f64>>,
    /// Variant label carried through from the source run, for file metadata.
    pub variant_id: String,
}

impl FrequencyResponse {
    pub fn magnitude(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Unwrapped phase in degrees; the first bin is folded into (-180, 180]
    /// and later bins continue from it without 360-degree jumps.
    pub fn phase_deg(&self) -> Vec<f64> {
        unwrap_phase_deg(&self.values)
    }

    pub fn validate(&self) -> Result<()> {
        if self.freqs.len() != self.values.len() {
            return Err(Error::Spectra("frequency/value length mismatch".into()));
        }
        if self.freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Spectra("frequencies not strictly increasing".into()));
        }
        if self.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Spectra("non-finite response value".into()));
        }
        if let Some(coh) = &self.coherence {
            if coh.len() != self.freqs.len() {
                return Err(Error::Spectra("coherence length mismatch".into()));
            }
            if coh.iter().any(|c| !(0.0..=1.0 + 1e-12).contains(c)) {
                return Err(Error::Spectra("coherence outside [0,1]".into()));
            }
        }
        Ok(())
    }
}

pub fn unwrap_phase_deg(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev = 0.0f64;
    for (i, v) in values.iter().enumerate() {
        let raw = v.im.atan2(v.re);
        if i == 0 {
            prev = raw;
            out.push(raw.to_degrees());
        } else {
            let mut d = raw - prev;
            d -= std::f64::consts::TAU * (d / std::f64::consts::TAU).round();
            prev += d;
            out.push(prev.to_degrees());
        }
    }
    if let Some(&first) = out.first() {
        // fold the starting bin into (-180, 180]
        let mut shift = 0.0;
        while first + shift <= -180.0 {
            shift += 360.0;
        }
        while first + shift > 180.0 {
            shift -= 360.0;
        }
        if shift != 0.0 {
            for p in &mut out {
                *p += shift;
            }
        }
    }
    out
}

fn output_order_of(channel: &str) -> Option<u8> {
    match channel {
        "phi" => Some(0),
        "phi_dot" => Some(1),
        "phi_ddot" => Some(2),
        _ => None,
    }
}

/// H1 transfer-function estimate from `input` to `output` ("phi",
/// "phi_dot" or "phi_ddot"). The run must be at least two segments long.
pub fn estimate_tf(
    run: &MeasurementRun,
    input: &str,
    output: &str,
    cfg: &WelchConfig,
) -> Result<FrequencyResponse> {
    cfg.validate()?;
    run.validate()?;
    let inp = InputChannel::parse(input)
        .ok_or_else(|| Error::Spectra(format!("unknown input channel {input:?}")))?;
    let order = output_order_of(output)
        .ok_or_else(|| Error::Spectra(format!("unknown output channel {output:?}")))?;
    let u = run
        .channel(inp.channel_name())
        .ok_or_else(|| Error::Spectra(format!("missing channel {}", inp.channel_name())))?;
    let y = run
        .channel(output)
        .ok_or_else(|| Error::Spectra(format!("missing channel {output}")))?;

    let nseg = cfg.segment_length;
    if u.len() < 2 * nseg {
        return Err(Error::Spectra(format!(
            "run too short for segment length {nseg}: {} samples, need {}",
            u.len(),
            2 * nseg
        )));
    }
    let hop = ((nseg as f64) * (1.0 - cfg.overlap_fraction)).round() as usize;
    let hop = hop.max(1);
    let nsegs = (u.len() - nseg) / hop + 1;

    let window = cfg.window.samples(nseg);
    let nbins = nseg / 2 + 1;
    let mut suu = vec![0.0f64; nbins];
    let mut syy = vec![0.0f64; nbins];
    let mut suy = vec![Complex64::new(0.0, 0.0); nbins];

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(nseg);
    let mut bu = vec![Complex64::new(0.0, 0.0); nseg];
    let mut by = vec![Complex64::new(0.0, 0.0); nseg];

    for s in 0..nsegs {
        let off = s * hop;
        let (mu, my) = match cfg.detrend {
            Detrend::Mean => (
                u[off..off + nseg].iter().sum::<f64>() / nseg as f64,
                y[off..off + nseg].iter().sum::<f64>() / nseg as f64,
            ),
            Detrend::None => (0.0, 0.0),
        };
        for i in 0..nseg {
            bu[i] = Complex64::new((u[off + i] - mu) * window[i], 0.0);
            by[i] = Complex64::new((y[off + i] - my) * window[i], 0.0);
        }
        fft.process(&mut bu);
        fft.process(&mut by);
        for k in 0..nbins {
            suu[k] += bu[k].norm_sqr();
            syy[k] += by[k].norm_sqr();
            suy[k] += bu[k].conj() * by[k];
        }
    }

    let fs = run.sample_rate;
    let (lo, hi) = cfg.eval_band;
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    let mut coh = Vec::new();
    for k in 0..nbins {
        let f = k as f64 * fs / nseg as f64;
        if f < lo || f > hi {
            continue;
        }
        if suu[k] <= 0.0 {
            return Err(Error::Spectra(format!(
                "input channel {input} has zero power at {f} Hz in the evaluation band"
            )));
        }
        freqs.push(f);
        values.push(suy[k] / suu[k]);
        let denom = suu[k] * syy[k];
        coh.push(if denom > 0.0 {
            (suy[k].norm_sqr() / denom).min(1.0)
        } else {
            0.0
        });
    }
    if freqs.is_empty() {
        return Err(Error::Spectra(format!(
            "evaluation band [{lo}, {hi}] contains no grid frequency (resolution {})",
            fs / nseg as f64
        )));
    }
    let fr = FrequencyResponse {
        input: inp,
        output_order: order,
        freqs,
        values,
        coherence: Some(coh),
        variant_id: run.variant_id.clone(),
    };
    fr.validate()?;
    Ok(fr)
}

/// Multiplies by (j 2 pi f)^n: each added derivative order scales the
/// magnitude by 2 pi f and advances the phase by 90 degrees.
pub fn derive_response(fr: &FrequencyResponse, n: u8) -> Result<FrequencyResponse> {
    if n == 0 || n > 2 {
        return Err(Error::Spectra(format!("derivative step {n} not in {{1, 2}}")));
    }
    if fr.output_order + n > 2 {
        return Err(Error::Spectra(format!(
            "derivative order {} exceeds roll acceleration",
            fr.output_order + n
        )));
    }
    let values = fr
        .freqs
        .iter()
        .zip(&fr.values)
        .map(|(&f, v)| {
            let jw = Complex64::new(0.0, std::f64::consts::TAU * f);
            match n {
                1 => v * jw,
                _ => v * jw * jw,
            }
        })
        .collect();
    Ok(FrequencyResponse {
        input: fr.input,
        output_order: fr.output_order + n,
        freqs: fr.freqs.clone(),
        values,
        coherence: fr.coherence.clone(),
        variant_id: fr.variant_id.clone(),
    })
}

/// Linear interpolation of real and imaginary parts; exact on bins.
pub fn eval_at(fr: &FrequencyResponse, f: f64) -> Result<Complex64> {
    let freqs = &fr.freqs;
    if freqs.is_empty() {
        return Err(Error::Spectra("empty frequency grid".into()));
    }
    let (first, last) = (freqs[0], freqs[freqs.len() - 1]);
    if f < first || f > last {
        return Err(Error::Spectra(format!(
            "frequency {f} Hz outside grid [{first}, {last}]"
        )));
    }
    match freqs.binary_search_by(|x| x.partial_cmp(&f).unwrap()) {
        Ok(i) => Ok(fr.values[i]),
        Err(i) => {
            let (f0, f1) = (freqs[i - 1], freqs[i]);
            let w = (f - f0) / (f1 - f0);
            Ok(fr.values[i - 1] * (1.0 - w) + fr.values[i] * w)
        }
    }
}

/// Linear interpolation on the unwrapped phase series [deg].
pub fn phase_at_interp(fr: &FrequencyResponse, f: f64) -> Result<f64> {
    let freqs = &fr.freqs;
    if freqs.is_empty() {
        return Err(Error::Spectra("empty frequency grid".into()));
    }
    let (first, last) = (freqs[0], freqs[freqs.len() - 1]);
    if f < first || f > last {
        return Err(Error::Spectra(format!(
            "frequency {f} Hz outside grid [{first}, {last}]"
        )));
    }
    let phase = fr.phase_deg();
    match freqs.binary_search_by(|x| x.partial_cmp(&f).unwrap()) {
        Ok(i) => Ok(phase[i]),
        Err(i) => {
            let (f0, f1) = (freqs[i - 1], freqs[i]);
            let w = (f - f0) / (f1 - f0);
            Ok(phase[i - 1] * (1.0 - w) + phase[i] * w)
        }
    }
}

/// `freq_hz,re,im,mag,phase_deg,coherence` with metadata comments.
/// Magnitude and phase columns are derived from re/im; re/im and
/// coherence are the authoritative values on load.
pub fn fr_to_string(fr: &FrequencyResponse) -> String {
    let mut out = String::new();
    out.push_str(&format!("# variant={}\n", fr.variant_id));
    out.push_str(&format!("# input={}\n", fr.input));
    out.push_str(&format!("# output_order={}\n", fr.output_order));
    out.push_str("freq_hz,re,im,mag,phase_deg,coherence\n");
    let phase = fr.phase_deg();
    for i in 0..fr.freqs.len() {
        let v = fr.values[i];
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(fr.freqs[i]),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(v.norm()),
            fmt_f64(phase[i]),
            match &fr.coherence {
                Some(c) => fmt_f64(c[i]),
                None => String::new(),
            }
        ));
    }
    out
}

pub fn save_fr(fr: &FrequencyResponse, path: &Path) -> Result<()> {
    std::fs::write(path, fr_to_string(fr))?;
    Ok(())
}

pub fn load_fr(path: &Path) -> Result<FrequencyResponse> {
    let text = std::fs::read_to_string(path)?;
    load_fr_str(&text, &path.display().to_string())
}

pub fn load_fr_str(text: &str, origin: &str) -> Result<FrequencyResponse> {
    let mut variant = String::from("unnamed");
    let mut input: Option<InputChannel> = None;
    let mut order: Option<u8> = None;
    let mut seen_header = false;
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    let mut coh: Vec<f64> = Vec::new();
    let mut has_coh = true;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.trim().split_once('=') {
                match key.trim() {
                    "variant" => variant = value.trim().to_string(),
                    "input" => {
                        input = Some(InputChannel::parse(value.trim()).ok_or_else(|| {
                            Error::parse(origin, lineno, format!("unknown input {value:?}"))
                        })?)
                    }
                    "output_order" => {
                        order = Some(value.trim().parse::<u8>().map_err(|_| {
                            Error::parse(origin, lineno, format!("bad output_order {value:?}"))
                        })?)
                    }
                    other => {
                        return Err(Error::parse(
                            origin,
                            lineno,
                            format!("unknown header key {other:?}"),
                        ))
                    }
                }
            }
            continue;
        }
        if !seen_header {
            if line != "freq_hz,re,im,mag,phase_deg,coherence" {
                return Err(Error::parse(origin, lineno, "unexpected column header"));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let p = |f: &str, what: &str| -> Result<f64> {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(origin, lineno, format!("bad {what} value {f:?}")))
        };
        freqs.push(p(fields[0], "freq_hz")?);
        values.push(Complex64::new(p(fields[1], "re")?, p(fields[2], "im")?));
        if fields[5].trim().is_empty() {
            has_coh = false;
        } else {
            coh.push(p(fields[5], "coherence")?);
        }
    }
    if !seen_header {
        return Err(Error::parse(origin, 1, "no header row"));
    }
    let input = input.ok_or_else(|| Error::parse(origin, 1, "missing input header"))?;
    let order = order.ok_or_else(|| Error::parse(origin, 1, "missing output_order header"))?;
    if order > 2 {
        return Err(Error::parse(origin, 1, format!("output_order {order} > 2")));
    }
    if has_coh && coh.len() != freqs.len() {
        return Err(Error::parse(origin, 1, "coherence column partially filled"));
    }
    let fr = FrequencyResponse {
        input,
        output_order: order,
        freqs,
        values,
        coherence: if has_coh { Some(coh) } else { None },
        variant_id: variant,
    };
    fr.validate()?;
    Ok(fr)
}
