//! Characteristic values condensed from frequency responses.
//!
//! Per transfer function: the low-frequency gain V0 (taken at 0.3 Hz),
//! the band maximum Vmax with its frequency omega0, the resonance ratio
//! beta = Vmax / V0, point gains at fixed frequencies, and (for the
//! roll-angle output only) point phases. The full catalog over three
//! inputs and three output derivative orders has 84 entries.

use crate::error::{Error, Result};
use crate::ingest::fmt_f64;
use crate::spectra::{derive_response, eval_at, phase_at_interp, FrequencyResponse, InputChannel};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Reference frequency for the low-frequency gain V0 [Hz].
pub const V0_REF_HZ: f64 = 0.3;

/// Point-evaluation frequencies, in tenths of a Hz.
pub const POINT_FREQ_TENTHS: [u16; 4] = [6, 9, 12, 15];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CvKind {
    V0,
    Vmax,
    Beta,
    Omega0,
    VAt,
    PhaseAt,
}

impl CvKind {
    /// Token used in the CSV `kind` column.
    pub fn as_str(self) -> &'static str {
        match self {
            CvKind::V0 => "v0",
            CvKind::Vmax => "vmax",
            CvKind::Beta => "beta",
            CvKind::Omega0 => "omega0",
            CvKind::VAt => "v_at",
            CvKind::PhaseAt => "phase_at",
        }
    }

    pub fn parse(s: &str) -> Option<CvKind> {
        match s {
            "v0" => Some(CvKind::V0),
            "vmax" => Some(CvKind::Vmax),
            "beta" => Some(CvKind::Beta),
            "omega0" => Some(CvKind::Omega0),
            "v_at" => Some(CvKind::VAt),
            "phase_at" => Some(CvKind::PhaseAt),
            _ => None,
        }
    }

    pub fn needs_freq(self) -> bool {
        matches!(self, CvKind::VAt | CvKind::PhaseAt)
    }
}

/// Identity of one characteristic value. Ordering is the catalog order:
/// input (mh, dh, ay), output order, kind, point frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CvKey {
    pub input: InputChannel,
    pub output_order: u8,
    pub kind: CvKind,
    /// Point frequency in tenths of a Hz; required for v_at/phase_at,
    /// absent otherwise.
    pub freq_tenths: Option<u16>,
}

impl CvKey {
    pub fn base(input: InputChannel, output_order: u8, kind: CvKind) -> CvKey {
        debug_assert!(!kind.needs_freq());
        CvKey { input, output_order, kind, freq_tenths: None }
    }

    pub fn v_at(input: InputChannel, output_order: u8, freq_tenths: u16) -> CvKey {
        CvKey { input, output_order, kind: CvKind::VAt, freq_tenths: Some(freq_tenths) }
    }

    pub fn phase_at(input: InputChannel, freq_tenths: u16) -> CvKey {
        CvKey { input, output_order: 0, kind: CvKind::PhaseAt, freq_tenths: Some(freq_tenths) }
    }

    pub fn freq_hz(&self) -> Option<f64> {
        self.freq_tenths.map(|t| t as f64 / 10.0)
    }

    /// Parses the compact text form, e.g. `mh/1/vmax`, `ay/0/v@1.2`,
    /// `dh/0/phase@1.5`.
    pub fn parse(s: &str) -> Result<CvKey> {
        let bad = || Error::CharVals(format!("bad characteristic value key {s:?}"));
        let mut parts = s.split('/');
        let input = parts.next().and_then(InputChannel::parse).ok_or_else(bad)?;
        let order: u8 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let kind = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() || order > 2 {
            return Err(bad());
        }
        let parse_freq = |f: &str| -> Result<u16> {
            let hz: f64 = f.parse().map_err(|_| bad())?;
            let tenths = (hz * 10.0).round();
            if hz <= 0.0 || (hz * 10.0 - tenths).abs() > 1e-9 || tenths > u16::MAX as f64 {
                return Err(Error::CharVals(format!(
                    "point frequency {f} Hz is not a positive multiple of 0.1"
                )));
            }
            Ok(tenths as u16)
        };
        let key = match kind {
            "v0" | "vmax" | "beta" | "omega0" => {
                CvKey::base(input, order, CvKind::parse(kind).unwrap())
            }
            _ if kind.starts_with("v@") => CvKey::v_at(input, order, parse_freq(&kind[2..])?),
            _ if kind.starts_with("phase@") => {
                if order != 0 {
                    return Err(Error::CharVals(format!(
                        "phase key {s:?} must use output order 0"
                    )));
                }
                CvKey::phase_at(input, parse_freq(&kind[6..])?)
            }
            _ => return Err(bad()),
        };
        Ok(key)
    }

    /// Measurement unit implied by the key.
    pub fn unit(&self) -> &'static str {
        match self.kind {
            CvKind::Beta => "-",
            CvKind::Omega0 => "Hz",
            CvKind::PhaseAt => "deg",
            CvKind::V0 | CvKind::Vmax | CvKind::VAt => gain_unit(self.input, self.output_order),
        }
    }
}

impl fmt::Display for CvKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/", self.input, self.output_order)?;
        match self.kind {
            CvKind::VAt => write!(f, "v@{}", fmt_f64(self.freq_hz().unwrap())),
            CvKind::PhaseAt => write!(f, "phase@{}", fmt_f64(self.freq_hz().unwrap())),
            k => f.write_str(k.as_str()),
        }
    }
}

/// Unit of a gain |output / input| for the given output derivative order.
pub fn gain_unit(input: InputChannel, output_order: u8) -> &'static str {
    match (input, output_order) {
        (InputChannel::Mh, 0) => "deg/Nm",
        (InputChannel::Mh, 1) => "deg/(s Nm)",
        (InputChannel::Mh, _) => "deg/(s^2 Nm)",
        (InputChannel::Dh, 0) => "-",
        (InputChannel::Dh, 1) => "1/s",
        (InputChannel::Dh, _) => "1/s^2",
        (InputChannel::Ay, 0) => "deg s^2/m",
        (InputChannel::Ay, 1) => "deg s/m",
        (InputChannel::Ay, _) => "deg/m",
    }
}

/// The full 84-entry catalog in canonical order.
pub fn catalog() -> Vec<CvKey> {
    let mut keys = Vec::with_capacity(84);
    for input in InputChannel::ALL {
        for order in 0u8..=2 {
            for kind in [CvKind::V0, CvKind::Vmax, CvKind::Beta, CvKind::Omega0] {
                keys.push(CvKey::base(input, order, kind));
            }
            for t in POINT_FREQ_TENTHS {
                keys.push(CvKey::v_at(input, order, t));
            }
            if order == 0 {
                for t in POINT_FREQ_TENTHS {
                    keys.push(CvKey::phase_at(input, t));
                }
            }
        }
    }
    keys
}

/// Characteristic values of one variant, keyed in catalog order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CharacteristicValueSet {
    pub variant_id: String,
    values: BTreeMap<CvKey, f64>,
    pub warnings: Vec<String>,
}

impl CharacteristicValueSet {
    pub fn new(variant_id: impl Into<String>) -> CharacteristicValueSet {
        CharacteristicValueSet { variant_id: variant_id.into(), ..Default::default() }
    }

    pub fn insert(&mut self, key: CvKey, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::CharVals(format!("non-finite value for {key}")));
        }
        if self.values.insert(key, value).is_some() {
            return Err(Error::CharVals(format!(
                "duplicate value for {key} in variant {}",
                self.variant_id
            )));
        }
        if key.kind == CvKind::Beta && value < 1.0 {
            self.warnings.push(format!(
                "beta {} below 1 for {}/{}",
                fmt_f64(value),
                key.input,
                key.output_order
            ));
        }
        Ok(())
    }

    pub fn get(&self, key: &CvKey) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Key/value pairs in catalog order.
    pub fn iter(&self) -> impl Iterator<Item = (&CvKey, &f64)> {
        self.values.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CvKey> {
        self.values.keys()
    }

    /// True when every catalog entry is present.
    pub fn is_complete(&self) -> bool {
        self.missing().is_empty()
    }

    pub fn missing(&self) -> Vec<CvKey> {
        catalog().into_iter().filter(|k| !self.values.contains_key(k)).collect()
    }
}

/// Extracts every catalog entry of one (input, output order) response
/// into `set`. The response grid must cover 0.3 Hz and the four point
/// frequencies.
fn extract_tf(fr: &FrequencyResponse, set: &mut CharacteristicValueSet) -> Result<()> {
    let input = fr.input;
    let order = fr.output_order;
    let v0 = eval_at(fr, V0_REF_HZ)?.norm();
    if v0 <= 0.0 {
        return Err(Error::CharVals(format!(
            "zero gain at {V0_REF_HZ} Hz for {input}/{order}, beta undefined"
        )));
    }
    let mag = fr.magnitude();
    let mut imax = 0;
    for (i, m) in mag.iter().enumerate() {
        // strict > keeps the lowest frequency on ties
        if *m > mag[imax] {
            imax = i;
        }
    }
    let vmax = mag[imax];
    let omega0 = fr.freqs[imax];
    set.insert(CvKey::base(input, order, CvKind::V0), v0)?;
    set.insert(CvKey::base(input, order, CvKind::Vmax), vmax)?;
    set.insert(CvKey::base(input, order, CvKind::Beta), vmax / v0)?;
    set.insert(CvKey::base(input, order, CvKind::Omega0), omega0)?;
    for t in POINT_FREQ_TENTHS {
        let f = t as f64 / 10.0;
        set.insert(CvKey::v_at(input, order, t), eval_at(fr, f)?.norm())?;
        if order == 0 {
            set.insert(CvKey::phase_at(input, t), phase_at_interp(fr, f)?)?;
        }
    }
    Ok(())
}

/// Builds the complete 84-entry catalog from the given responses.
///
/// Every input channel must be covered. Missing derivative orders are
/// derived spectrally from the highest available lower order; an
/// explicitly supplied response always wins over a derived one.
pub fn extract_all(frs: &[FrequencyResponse]) -> Result<CharacteristicValueSet> {
    if frs.is_empty() {
        return Err(Error::CharVals("no frequency responses given".into()));
    }
    let variant = frs[0].variant_id.clone();
    if frs.iter().any(|fr| fr.variant_id != variant) {
        return Err(Error::CharVals("mixed variants in one extraction".into()));
    }
    let mut by_pair: BTreeMap<(InputChannel, u8), &FrequencyResponse> = BTreeMap::new();
    for fr in frs {
        fr.validate()?;
        if by_pair.insert((fr.input, fr.output_order), fr).is_some() {
            return Err(Error::CharVals(format!(
                "duplicate response for {}/{}",
                fr.input, fr.output_order
            )));
        }
    }
    let mut set = CharacteristicValueSet::new(variant);
    for input in InputChannel::ALL {
        if !(0u8..=2).any(|o| by_pair.contains_key(&(input, o))) {
            return Err(Error::CharVals(format!(
                "no frequency response for input {input}"
            )));
        }
        for order in 0u8..=2 {
            if let Some(fr) = by_pair.get(&(input, order)) {
                extract_tf(fr, &mut set)?;
                continue;
            }
            let source = (0..order)
                .rev()
                .find_map(|o| by_pair.get(&(input, o)).map(|fr| (o, *fr)))
                .ok_or_else(|| {
                    Error::CharVals(format!(
                        "cannot derive {input}/{order}: no response of lower order"
                    ))
                })?;
            let derived = derive_response(source.1, order - source.0)?;
            extract_tf(&derived, &mut set)?;
        }
    }
    debug_assert!(set.is_complete());
    Ok(set)
}

/// `variant,input,deriv,kind,freq_hz,value,unit`, variants in the given
/// order, keys in catalog order.
pub fn cvsets_to_string(sets: &[CharacteristicValueSet]) -> String {
    let mut out = String::from("variant,input,deriv,kind,freq_hz,value,unit\n");
    for set in sets {
        for (key, value) in set.iter() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                set.variant_id,
                key.input,
                key.output_order,
                key.kind.as_str(),
                key.freq_hz().map(fmt_f64).unwrap_or_default(),
                fmt_f64(*value),
                key.unit()
            ));
        }
    }
    out
}

pub fn save_cvsets(sets: &[CharacteristicValueSet], path: &Path) -> Result<()> {
    std::fs::write(path, cvsets_to_string(sets))?;
    Ok(())
}

pub fn load_cvsets(path: &Path) -> Result<Vec<CharacteristicValueSet>> {
    let text = std::fs::read_to_string(path)?;
    load_cvsets_str(&text, &path.display().to_string())
}

pub fn load_cvsets_str(text: &str, origin: &str) -> Result<Vec<CharacteristicValueSet>> {
    let mut sets: Vec<CharacteristicValueSet> = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != "variant,input,deriv,kind,freq_hz,value,unit" {
                return Err(Error::parse(origin, lineno, "unexpected column header"));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected 7 fields, got {}", fields.len()),
            ));
        }
        let variant = fields[0].trim();
        let input = InputChannel::parse(fields[1].trim())
            .ok_or_else(|| Error::parse(origin, lineno, format!("unknown input {:?}", fields[1])))?;
        let order: u8 = fields[2]
            .trim()
            .parse()
            .ok()
            .filter(|o| *o <= 2)
            .ok_or_else(|| Error::parse(origin, lineno, format!("bad deriv {:?}", fields[2])))?;
        let kind = CvKind::parse(fields[3].trim())
            .ok_or_else(|| Error::parse(origin, lineno, format!("unknown kind {:?}", fields[3])))?;
        let freq = fields[4].trim();
        let key = if kind.needs_freq() {
            let hz: f64 = freq
                .parse()
                .map_err(|_| Error::parse(origin, lineno, format!("bad freq_hz {freq:?}")))?;
            let tenths = (hz * 10.0).round();
            if hz <= 0.0 || (hz * 10.0 - tenths).abs() > 1e-9 {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("freq_hz {freq} is not a positive multiple of 0.1"),
                ));
            }
            if kind == CvKind::PhaseAt && order != 0 {
                return Err(Error::parse(origin, lineno, "phase_at requires deriv 0"));
            }
            CvKey { input, output_order: order, kind, freq_tenths: Some(tenths as u16) }
        } else {
            if !freq.is_empty() {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("kind {} takes no freq_hz", kind.as_str()),
                ));
            }
            CvKey::base(input, order, kind)
        };
        let value: f64 = fields[5]
            .trim()
            .parse()
            .map_err(|_| Error::parse(origin, lineno, format!("bad value {:?}", fields[5])))?;
        let unit = fields[6].trim();
        if unit != key.unit() {
            return Err(Error::parse(
                origin,
                lineno,
                format!("unit {:?} for {key}, expected {:?}", unit, key.unit()),
            ));
        }
        let set = match sets.iter_mut().find(|s| s.variant_id == variant) {
            Some(s) => s,
            None => {
                sets.push(CharacteristicValueSet::new(variant));
                sets.last_mut().unwrap()
            }
        };
        set.insert(key, value)
            .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
    }
    if !seen_header {
        return Err(Error::parse(origin, 1, "no header row"));
    }
    if sets.is_empty() {
        return Err(Error::parse(origin, 1, "no data rows"));
    }
    Ok(sets)
}
