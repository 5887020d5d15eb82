//! Synthesis lab: parametric vehicle roll models, chirp steering
//! excitation, RK4 simulation, closed-form reference responses, and
//! reproducible measurement noise.
//!
//! The plant is a first-order lateral-acceleration lag feeding a
//! second-order roll oscillator:
//!
//!   a_y' = (g_ay delta_H - a_y) / tau_lat
//!   phi'' = wn^2 (k_roll a_y - phi) - 2 zeta wn phi'
//!
//! with steering torque M_H = c_t delta_H + d_t delta_H'.

use crate::error::{Error, Result};
use crate::ingest::{fmt_f64, MeasurementRun};
use crate::spectra::{FrequencyResponse, InputChannel};
use num_complex::Complex64;
use rand_chacha::ChaCha12Rng;
use rand_core::{Rng, SeedableRng};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleParams {
    pub name: String,
    /// Undamped roll natural frequency [Hz].
    pub fn_hz: f64,
    /// Roll damping ratio; stable real vehicles live in (0, 1).
    pub zeta: f64,
    /// Static roll angle per lateral acceleration [deg/(m/s^2)].
    pub k_roll: f64,
    /// Static lateral acceleration per steering angle [(m/s^2)/deg].
    pub g_ay: f64,
    /// Lateral acceleration lag time constant [s].
    pub tau_lat: f64,
    /// Static steering torque per steering angle [Nm/deg].
    pub c_t: f64,
    /// Steering torque per steering rate [Nm s/deg].
    pub d_t: f64,
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Synth(msg));
        if !(self.fn_hz > 0.0 && self.fn_hz.is_finite()) {
            return bad(format!("natural frequency {} must be positive", self.fn_hz));
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return bad(format!("damping ratio {} outside (0, 1)", self.zeta));
        }
        if !(self.k_roll >= 0.0 && self.k_roll.is_finite()) {
            return bad(format!("roll gain {} must be nonnegative", self.k_roll));
        }
        if !(self.g_ay > 0.0 && self.g_ay.is_finite()) {
            return bad(format!("lateral gain {} must be positive", self.g_ay));
        }
        if !(self.tau_lat > 0.0 && self.tau_lat.is_finite()) {
            return bad(format!("lateral lag {} must be positive", self.tau_lat));
        }
        if !(self.c_t > 0.0 && self.c_t.is_finite()) {
            return bad(format!("torque gain {} must be positive", self.c_t));
        }
        if !(self.d_t >= 0.0 && self.d_t.is_finite()) {
            return bad(format!("torque rate gain {} must be nonnegative", self.d_t));
        }
        Ok(())
    }
}

/// Linear sine sweep for steering excitation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpSpec {
    /// Start frequency [Hz].
    pub f0: f64,
    /// End frequency [Hz]; f1 = f0 degenerates to a constant-frequency
    /// sine, which is allowed.
    pub f1: f64,
    /// Sweep duration [s].
    pub duration: f64,
    /// Peak steering angle [deg]; `None` sizes the sweep for the lateral
    /// acceleration target: ay_target / g_ay.
    pub amplitude_deg: Option<f64>,
    pub v_kmh: f64,
    /// Peak lateral acceleration the sweep aims for [m/s^2].
    pub ay_target: f64,
    pub sample_rate: f64,
}

impl Default for ChirpSpec {
    /// Sweep past both edges of the evaluated band so edge bins keep
    /// coherence: 0.05 to 2.8 Hz over five minutes at 100 Hz.
    fn default() -> Self {
        ChirpSpec {
            f0: 0.05,
            f1: 2.8,
            duration: 300.0,
            amplitude_deg: None,
            v_kmh: 100.0,
            ay_target: 4.0,
            sample_rate: 100.0,
        }
    }
}

impl ChirpSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Synth(msg));
        if !(self.f0 > 0.0 && self.f0.is_finite()) {
            return bad(format!("start frequency {} must be positive", self.f0));
        }
        if !(self.f1 >= self.f0 && self.f1.is_finite()) {
            return bad(format!(
                "end frequency {} below start frequency {}",
                self.f1, self.f0
            ));
        }
        if !(self.duration >= 10.0 / self.f0) {
            // anything shorter cannot even carry ten start-frequency cycles
            return bad(format!(
                "duration {} s too short for {} Hz, need at least {} s",
                self.duration,
                self.f0,
                10.0 / self.f0
            ));
        }
        if !(self.sample_rate >= 20.0 * self.f1) {
            return bad(format!(
                "sample rate {} below 20 times the end frequency {}",
                self.sample_rate, self.f1
            ));
        }
        if let Some(a) = self.amplitude_deg {
            if !(a > 0.0 && a.is_finite()) {
                return bad(format!("amplitude {a} must be positive"));
            }
        }
        if !(self.ay_target > 0.0 && self.ay_target.is_finite()) {
            return bad(format!("lateral target {} must be positive", self.ay_target));
        }
        if !(self.v_kmh > 0.0 && self.v_kmh.is_finite()) {
            return bad(format!("speed {} must be positive", self.v_kmh));
        }
        Ok(())
    }

    /// Effective steering amplitude [deg] for the given vehicle.
    pub fn amplitude_for(&self, params: &VehicleParams) -> f64 {
        self.amplitude_deg.unwrap_or(self.ay_target / params.g_ay)
    }
}

/// Time axis and steering angle of the sweep; phase starts at zero, the
/// end point is included.
pub fn chirp_steer(spec: &ChirpSpec, amplitude_deg: f64) -> (Vec<f64>, Vec<f64>) {
    let n = (spec.duration * spec.sample_rate).round() as usize + 1;
    let mut t = Vec::with_capacity(n);
    let mut dh = Vec::with_capacity(n);
    for i in 0..n {
        let ti = i as f64 / spec.sample_rate;
        let theta = std::f64::consts::TAU
            * (spec.f0 * ti + (spec.f1 - spec.f0) * ti * ti / (2.0 * spec.duration));
        t.push(ti);
        dh.push(amplitude_deg * theta.sin());
    }
    (t, dh)
}

/// Simulated response channels, aligned with the input samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SimChannels {
    pub m_h: Vec<f64>,
    pub a_y: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
    pub phi_ddot: Vec<f64>,
}

/// Classic RK4 over the three-state plant with the input interpolated
/// linearly at every substep point. The roll acceleration channel is
/// recomputed exactly from the state equation rather than differenced.
pub fn simulate_steer(
    params: &VehicleParams,
    delta_h: &[f64],
    sample_rate: f64,
    substeps: usize,
) -> Result<SimChannels> {
    params.validate()?;
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(Error::Synth(format!("bad sample rate {sample_rate}")));
    }
    if sample_rate < 10.0 * params.fn_hz {
        return Err(Error::Synth(format!(
            "sample rate {} under-resolves the {} Hz roll mode, need at least {}",
            sample_rate,
            params.fn_hz,
            10.0 * params.fn_hz
        )));
    }
    if substeps == 0 {
        return Err(Error::Synth("substeps must be at least 1".into()));
    }
    let n = delta_h.len();
    if n < 2 {
        return Err(Error::Synth(format!("need at least 2 input samples, got {n}")));
    }
    if delta_h.iter().any(|v| !v.is_finite()) {
        return Err(Error::Synth("non-finite steering input".into()));
    }

    let wn = std::f64::consts::TAU * params.fn_hz;
    let (g, tau, k, zeta) = (params.g_ay, params.tau_lat, params.k_roll, params.zeta);
    let f = |x: [f64; 3], u: f64| -> [f64; 3] {
        [
            (g * u - x[0]) / tau,
            x[2],
            wn * wn * (k * x[0] - x[1]) - 2.0 * zeta * wn * x[2],
        ]
    };
    let h = 1.0 / sample_rate / substeps as f64;
    let mut a_y = vec![0.0; n];
    let mut phi = vec![0.0; n];
    let mut phi_dot = vec![0.0; n];
    let mut x = [0.0f64; 3];
    for i in 0..n - 1 {
        let (u0, u1) = (delta_h[i], delta_h[i + 1]);
        for s in 0..substeps {
            let at = |frac: f64| u0 + (u1 - u0) * (s as f64 + frac) / substeps as f64;
            let (ua, um, ub) = (at(0.0), at(0.5), at(1.0));
            let k1 = f(x, ua);
            let k2 = f(add(x, scale(k1, 0.5 * h)), um);
            let k3 = f(add(x, scale(k2, 0.5 * h)), um);
            let k4 = f(add(x, scale(k3, h)), ub);
            for j in 0..3 {
                x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        a_y[i + 1] = x[0];
        phi[i + 1] = x[1];
        phi_dot[i + 1] = x[2];
        if !x.iter().all(|v| v.is_finite()) || x[1].abs() > 1e6 {
            return Err(Error::Synth(format!(
                "simulation diverged at sample {} (roll angle {}); \
                 the time step cannot resolve the plant dynamics",
                i + 1,
                phi[i + 1]
            )));
        }
    }
    let phi_ddot: Vec<f64> = (0..n)
        .map(|i| wn * wn * (k * a_y[i] - phi[i]) - 2.0 * zeta * wn * phi_dot[i])
        .collect();

    // steering rate by central differences, one-sided at the ends
    let dt = 1.0 / sample_rate;
    let mut m_h = Vec::with_capacity(n);
    for i in 0..n {
        let rate = if i == 0 {
            (delta_h[1] - delta_h[0]) / dt
        } else if i == n - 1 {
            (delta_h[n - 1] - delta_h[n - 2]) / dt
        } else {
            (delta_h[i + 1] - delta_h[i - 1]) / (2.0 * dt)
        };
        m_h.push(params.c_t * delta_h[i] + params.d_t * rate);
    }
    Ok(SimChannels { m_h, a_y, phi, phi_dot, phi_ddot })
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Reproducible measurement noise. The same standard deviation,
/// relative to each channel's RMS, is added independently to every
/// response channel; the commanded steering angle stays clean so H1
/// estimates remain unbiased.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub seed: u64,
    /// Noise standard deviation as a fraction of the channel RMS.
    pub relative_std: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_std >= 0.0 && self.relative_std.is_finite()) {
            return Err(Error::Synth(format!(
                "relative noise level {} must be nonnegative",
                self.relative_std
            )));
        }
        Ok(())
    }
}

/// Standard normal draws by the Box-Muller transform over a seeded
/// ChaCha12 stream.
fn gaussian_noise(rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        // u in (0, 1], v in [0, 1)
        let u = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let v = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let r = (-2.0 * u.ln()).sqrt();
        let a = std::f64::consts::TAU * v;
        out.push(r * a.cos());
        out.push(r * a.sin());
    }
    out.truncate(n);
    out
}

fn add_noise(channel: &mut [f64], relative_std: f64, rng: &mut ChaCha12Rng) {
    if relative_std == 0.0 {
        return;
    }
    let n = channel.len();
    let rms = (channel.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    let std = relative_std * rms;
    for (v, g) in channel.iter_mut().zip(gaussian_noise(rng, n)) {
        *v += std * g;
    }
}

/// Synthesizes a complete measurement run: chirp excitation, simulated
/// response, optional noise on the response channels.
pub fn synthesize_run(
    params: &VehicleParams,
    chirp: &ChirpSpec,
    noise: Option<&NoiseSpec>,
) -> Result<MeasurementRun> {
    params.validate()?;
    chirp.validate()?;
    let (t, delta_h) = chirp_steer(chirp, chirp.amplitude_for(params));
    let mut sim = simulate_steer(params, &delta_h, chirp.sample_rate, 1)?;
    if let Some(noise) = noise {
        noise.validate()?;
        let mut rng = ChaCha12Rng::seed_from_u64(noise.seed);
        add_noise(&mut sim.m_h, noise.relative_std, &mut rng);
        add_noise(&mut sim.a_y, noise.relative_std, &mut rng);
        add_noise(&mut sim.phi, noise.relative_std, &mut rng);
        add_noise(&mut sim.phi_dot, noise.relative_std, &mut rng);
        add_noise(&mut sim.phi_ddot, noise.relative_std, &mut rng);
    }
    let run = MeasurementRun {
        variant_id: params.name.clone(),
        v_kmh: chirp.v_kmh,
        ay_target: chirp.ay_target,
        sample_rate: chirp.sample_rate,
        t,
        delta_h,
        m_h: sim.m_h,
        a_y: sim.a_y,
        phi: sim.phi,
        phi_dot: Some(sim.phi_dot),
        phi_ddot: Some(sim.phi_ddot),
    };
    run.validate()?;
    Ok(run)
}

/// Closed-form frequency response of the plant on the given grid.
pub fn analytic_tf(
    params: &VehicleParams,
    freqs: &[f64],
    input: InputChannel,
    output_order: u8,
) -> Result<FrequencyResponse> {
    params.validate()?;
    if output_order > 2 {
        return Err(Error::Synth(format!("output order {output_order} > 2")));
    }
    if freqs.is_empty() || freqs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Synth("frequency grid must be strictly increasing".into()));
    }
    let wn = std::f64::consts::TAU * params.fn_hz;
    let values = freqs
        .iter()
        .map(|&f| {
            let s = Complex64::new(0.0, std::f64::consts::TAU * f);
            let roll = params.k_roll * wn * wn
                / (s * s + 2.0 * params.zeta * wn * s + wn * wn);
            let g = match input {
                InputChannel::Ay => roll,
                InputChannel::Dh => params.g_ay / (1.0 + params.tau_lat * s) * roll,
                InputChannel::Mh => {
                    params.g_ay / (1.0 + params.tau_lat * s) * roll
                        / (params.c_t + params.d_t * s)
                }
            };
            g * s.powu(output_order as u32)
        })
        .collect();
    Ok(FrequencyResponse {
        input,
        output_order,
        freqs: freqs.to_vec(),
        values,
        coherence: None,
        variant_id: params.name.clone(),
    })
}

const PARAMS_BANNER: &str = "# rolldyn vehicle params v1";

pub fn params_to_string(params: &VehicleParams) -> String {
    format!(
        "{PARAMS_BANNER}\nname = {}\nfn_hz = {}\nzeta = {}\nk_roll = {}\n\
         g_ay = {}\ntau_lat = {}\nc_t = {}\nd_t = {}\n",
        params.name,
        fmt_f64(params.fn_hz),
        fmt_f64(params.zeta),
        fmt_f64(params.k_roll),
        fmt_f64(params.g_ay),
        fmt_f64(params.tau_lat),
        fmt_f64(params.c_t),
        fmt_f64(params.d_t),
    )
}

pub fn save_params(params: &VehicleParams, path: &Path) -> Result<()> {
    std::fs::write(path, params_to_string(params))?;
    Ok(())
}

pub fn parse_params(text: &str, origin: &str) -> Result<VehicleParams> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end() == PARAMS_BANNER => {}
        _ => {
            return Err(Error::parse(
                origin,
                1,
                format!("missing {PARAMS_BANNER:?} banner"),
            ))
        }
    }
    let mut name: Option<String> = None;
    let mut fields: [(&str, Option<f64>); 7] = [
        ("fn_hz", None),
        ("zeta", None),
        ("k_roll", None),
        ("g_ay", None),
        ("tau_lat", None),
        ("c_t", None),
        ("d_t", None),
    ];
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
        if key == "name" {
            if name.replace(value.to_string()).is_some() {
                return Err(Error::parse(origin, lineno, "duplicate name"));
            }
            continue;
        }
        let Some(slot) = fields.iter_mut().find(|(k, _)| *k == key) else {
            return Err(Error::parse(origin, lineno, format!("unknown key {key:?}")));
        };
        let parsed: f64 = value
            .parse()
            .map_err(|_| Error::parse(origin, lineno, format!("bad value {value:?} for {key}")))?;
        if slot.1.replace(parsed).is_some() {
            return Err(Error::parse(origin, lineno, format!("duplicate key {key}")));
        }
    }
    let get = |i: usize| -> Result<f64> {
        fields[i]
            .1
            .ok_or_else(|| Error::parse(origin, 1, format!("missing key {}", fields[i].0)))
    };
    let params = VehicleParams {
        name: name.ok_or_else(|| Error::parse(origin, 1, "missing key name"))?,
        fn_hz: get(0)?,
        zeta: get(1)?,
        k_roll: get(2)?,
        g_ay: get(3)?,
        tau_lat: get(4)?,
        c_t: get(5)?,
        d_t: get(6)?,
    };
    params.validate()?;
    Ok(params)
}

pub fn load_params(path: &Path) -> Result<VehicleParams> {
    let text = std::fs::read_to_string(path)?;
    parse_params(&text, &path.display().to_string())
}

/// Builtin vehicle presets, ordered from the stiffest to the softest
/// roll behavior.
pub const PRESET_NAMES: [&str; 5] =
    ["sports-car", "sports-suv", "coupe", "rv-like", "luxury-sedan"];

pub fn preset(name: &str) -> Result<VehicleParams> {
    let text = match name {
        "sports-car" => include_str!("../data/presets/sports-car.params"),
        "sports-suv" => include_str!("../data/presets/sports-suv.params"),
        "coupe" => include_str!("../data/presets/coupe.params"),
        "rv-like" => include_str!("../data/presets/rv-like.params"),
        "luxury-sedan" => include_str!("../data/presets/luxury-sedan.params"),
        _ => {
            return Err(Error::Synth(format!(
                "unknown preset {name:?}, have: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    parse_params(text, &format!("builtin:{name}.params"))
}
