//! C interface to the rolldyn toolkit.
//!
//! Conventions: every fallible call returns a [`RolldynStatus`]; on any
//! nonzero status the thread-local message queried through
//! [`rolldyn_last_error`] describes the failure. Objects cross the
//! boundary as opaque handles that stay owned by this library; each
//! `*_free` accepts null. Handles are not synchronized, so a given
//! handle must only be used from one thread at a time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use rolldyn::charvals::{extract_all, CharacteristicValueSet, CvKey};
use rolldyn::ingest::MeasurementRun;
use rolldyn::predictor::{builtin_models, predict_all};
use rolldyn::report::response_family;
use rolldyn::spectra::{derive_response, estimate_tf, eval_at, FrequencyResponse, WelchConfig};
use rolldyn::synthlab::{preset, synthesize_run, ChirpSpec, NoiseSpec};
use rolldyn::Error;

/// Status code returned by every fallible call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RolldynStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArg = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// Malformed file or key text.
    Parse = 3,
    Io = 4,
    /// Input rejected by a validity rule (bad preset, short run, ...).
    Invalid = 5,
    /// A prediction model range could not be resolved.
    Binding = 6,
    /// The requested element does not exist.
    NotFound = 7,
}

/// A loaded or synthesized measurement run.
pub struct RolldynRun(MeasurementRun);

/// An estimated frequency response.
pub struct RolldynFr(FrequencyResponse);

/// Characteristic values extracted from one run.
pub struct RolldynCvs(CharacteristicValueSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl std::fmt::Display) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("NUL-free message"));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::default());
}

fn status_of(err: &Error) -> RolldynStatus {
    match err {
        Error::Io(_) => RolldynStatus::Io,
        Error::Parse { .. } => RolldynStatus::Parse,
        Error::UnresolvedBinding { .. } => RolldynStatus::Binding,
        _ => RolldynStatus::Invalid,
    }
}

fn fail(err: &Error) -> RolldynStatus {
    set_error(err);
    status_of(err)
}

fn null_arg(name: &str) -> RolldynStatus {
    set_error(format!("null argument: {name}"));
    RolldynStatus::NullArg
}

/// Borrows a C string argument, recording an error on null or bad UTF-8.
unsafe fn text_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, RolldynStatus> {
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("argument {name} is not valid UTF-8"));
        RolldynStatus::Utf8
    })
}

/// Copies the message of the most recent error on this thread into `buf`
/// (NUL-terminated, truncated to `cap` bytes) and returns the full
/// message length in bytes, excluding the terminator. `buf` may be null
/// to query the length alone. The message is empty unless the latest
/// fallible call on this thread failed.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> RolldynStatus {
    *out = Box::into_raw(Box::new(value));
    clear_error();
    RolldynStatus::Ok
}

/// Reads a measurement run from a CSV file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid
/// pointer; on `ROLLDYN_STATUS_OK` it receives a handle to release with
/// [`rolldyn_run_free`].
#[no_mangle]
pub unsafe extern "C" fn rolldyn_run_load(
    path: *const c_char,
    out: *mut *mut RolldynRun,
) -> RolldynStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let path = match text_arg(path, "path") {
        Ok(p) => p,
        Err(status) => return status,
    };
    match rolldyn::ingest::load_run(Path::new(path)) {
        Ok(run) => emit(out, RolldynRun(run)),
        Err(e) => fail(&e),
    }
}

/// Writes a measurement run to a CSV file.
///
/// # Safety
/// `run` must be a live handle from this library and `path` a valid
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_run_save(
    run: *const RolldynRun,
    path: *const c_char,
) -> RolldynStatus {
    if run.is_null() {
        return null_arg("run");
    }
    let path = match text_arg(path, "path") {
        Ok(p) => p,
        Err(status) => return status,
    };
    match rolldyn::ingest::save_run(&(*run).0, Path::new(path)) {
        Ok(()) => {
            clear_error();
            RolldynStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Synthesizes a continuous-sine-steer run for a named preset vehicle
/// (`sports-car`, `sports-suv`, `coupe`, `rv-like`, `luxury-sedan`)
/// using the default sweep. `noise_std` adds seeded Gaussian sensor
/// noise as a fraction of each channel's RMS; pass 0 for a clean run.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid
/// pointer; on `ROLLDYN_STATUS_OK` it receives a handle to release with
/// [`rolldyn_run_free`].
#[no_mangle]
pub unsafe extern "C" fn rolldyn_run_synth_preset(
    name: *const c_char,
    seed: u64,
    noise_std: f64,
    out: *mut *mut RolldynRun,
) -> RolldynStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let name = match text_arg(name, "name") {
        Ok(n) => n,
        Err(status) => return status,
    };
    let params = match preset(name) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let noise =
        (noise_std > 0.0).then_some(NoiseSpec { seed, relative_std: noise_std });
    match synthesize_run(&params, &ChirpSpec::default(), noise.as_ref()) {
        Ok(run) => emit(out, RolldynRun(run)),
        Err(e) => fail(&e),
    }
}

/// Releases a run handle. Null is ignored.
///
/// # Safety
/// `run` must be a handle returned by this library that has not been
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_run_free(run: *mut RolldynRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of samples in the run, or -1 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_run_len(run: *const RolldynRun) -> isize {
    if run.is_null() {
        return -1;
    }
    (*run).0.len() as isize
}

/// Sample rate of the run in Hz, or 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_run_sample_rate(run: *const RolldynRun) -> f64 {
    if run.is_null() {
        return 0.0;
    }
    (*run).0.sample_rate
}

/// Estimates the frequency response from one input channel (`mh`, `dh`
/// or `ay`) to the roll angle derived `order` times (0, 1 or 2), using
/// the default spectral settings for the run's sample rate.
///
/// # Safety
/// `run` must be a live handle, `input` a valid NUL-terminated string
/// and `out` a valid pointer; on `ROLLDYN_STATUS_OK` it receives a
/// handle to release with [`rolldyn_fr_free`].
#[no_mangle]
pub unsafe extern "C" fn rolldyn_fr_estimate(
    run: *const RolldynRun,
    input: *const c_char,
    order: u8,
    out: *mut *mut RolldynFr,
) -> RolldynStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if run.is_null() {
        return null_arg("run");
    }
    let input = match text_arg(input, "input") {
        Ok(i) => i,
        Err(status) => return status,
    };
    if order > 2 {
        set_error(format!("derivative order {order} out of range 0..=2"));
        return RolldynStatus::Invalid;
    }
    let run = &(*run).0;
    let cfg = WelchConfig::default_for(run.sample_rate);
    let base = match estimate_tf(run, input, "phi", &cfg) {
        Ok(fr) => fr,
        Err(e) => return fail(&e),
    };
    let fr = if order == 0 { Ok(base) } else { derive_response(&base, order) };
    match fr {
        Ok(fr) => emit(out, RolldynFr(fr)),
        Err(e) => fail(&e),
    }
}

/// Releases a frequency-response handle. Null is ignored.
///
/// # Safety
/// `fr` must be a handle returned by this library that has not been
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_fr_free(fr: *mut RolldynFr) {
    if !fr.is_null() {
        drop(Box::from_raw(fr));
    }
}

/// Number of frequency bins, or -1 for a null handle.
///
/// # Safety
/// `fr` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_fr_len(fr: *const RolldynFr) -> isize {
    if fr.is_null() {
        return -1;
    }
    (*fr).0.freqs.len() as isize
}

/// Copies bin `index` into the non-null output pointers: frequency in
/// Hz, complex response parts, and coherence (-1 when the response
/// carries none).
///
/// # Safety
/// `fr` must be a live handle; each output pointer must be null or
/// valid for one `double`.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_fr_bin(
    fr: *const RolldynFr,
    index: usize,
    freq: *mut f64,
    re: *mut f64,
    im: *mut f64,
    coherence: *mut f64,
) -> RolldynStatus {
    if fr.is_null() {
        return null_arg("fr");
    }
    let fr = &(*fr).0;
    if index >= fr.freqs.len() {
        set_error(format!("bin {index} out of range 0..{}", fr.freqs.len()));
        return RolldynStatus::NotFound;
    }
    if !freq.is_null() {
        *freq = fr.freqs[index];
    }
    if !re.is_null() {
        *re = fr.values[index].re;
    }
    if !im.is_null() {
        *im = fr.values[index].im;
    }
    if !coherence.is_null() {
        *coherence = fr.coherence.as_ref().map_or(-1.0, |c| c[index]);
    }
    clear_error();
    RolldynStatus::Ok
}

/// Evaluates the response at `freq` Hz by linear interpolation between
/// bins, writing the complex parts to the non-null output pointers.
///
/// # Safety
/// `fr` must be a live handle; `re` and `im` must each be null or valid
/// for one `double`.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_fr_eval(
    fr: *const RolldynFr,
    freq: f64,
    re: *mut f64,
    im: *mut f64,
) -> RolldynStatus {
    if fr.is_null() {
        return null_arg("fr");
    }
    match eval_at(&(*fr).0, freq) {
        Ok(v) => {
            if !re.is_null() {
                *re = v.re;
            }
            if !im.is_null() {
                *im = v.im;
            }
            clear_error();
            RolldynStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Extracts the full characteristic-value catalog from a run: the nine
/// responses are estimated with default settings, then reduced to
/// scalar values.
///
/// # Safety
/// `run` must be a live handle and `out` a valid pointer; on
/// `ROLLDYN_STATUS_OK` it receives a handle to release with
/// [`rolldyn_cvs_free`].
#[no_mangle]
pub unsafe extern "C" fn rolldyn_cvs_extract(
    run: *const RolldynRun,
    out: *mut *mut RolldynCvs,
) -> RolldynStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if run.is_null() {
        return null_arg("run");
    }
    let run = &(*run).0;
    let cfg = WelchConfig::default_for(run.sample_rate);
    let set = response_family(run, &cfg).and_then(|frs| extract_all(&frs));
    match set {
        Ok(set) => emit(out, RolldynCvs(set)),
        Err(e) => fail(&e),
    }
}

/// Releases a characteristic-value handle. Null is ignored.
///
/// # Safety
/// `cvs` must be a handle returned by this library that has not been
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_cvs_free(cvs: *mut RolldynCvs) {
    if !cvs.is_null() {
        drop(Box::from_raw(cvs));
    }
}

/// Number of stored characteristic values, or -1 for a null handle.
///
/// # Safety
/// `cvs` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_cvs_len(cvs: *const RolldynCvs) -> isize {
    if cvs.is_null() {
        return -1;
    }
    (*cvs).0.len() as isize
}

/// Looks up one characteristic value by its key text, e.g.
/// `ay/0/beta`, `mh/1/vmax` or `dh/0/phase@1.5`.
///
/// # Safety
/// `cvs` must be a live handle, `key` a valid NUL-terminated string and
/// `value` null or valid for one `double`.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_cvs_get(
    cvs: *const RolldynCvs,
    key: *const c_char,
    value: *mut f64,
) -> RolldynStatus {
    if cvs.is_null() {
        return null_arg("cvs");
    }
    let key = match text_arg(key, "key") {
        Ok(k) => k,
        Err(status) => return status,
    };
    let key = match CvKey::parse(key) {
        Ok(k) => k,
        Err(e) => return fail(&e),
    };
    match (*cvs).0.get(&key) {
        Some(v) => {
            if !value.is_null() {
                *value = v;
            }
            clear_error();
            RolldynStatus::Ok
        }
        None => {
            set_error(format!("no value for {key}"));
            RolldynStatus::NotFound
        }
    }
}

/// Predicts the seven subjective ratings with the builtin models.
/// `values` receives the predictions in the order RAL, RAH, TDL, TDH,
/// IRM, ROS, OR; `in_range` (optional) receives 1 where every model
/// term stayed inside its calibrated range and 0 otherwise.
///
/// # Safety
/// `cvs` must be a live handle, `values` valid for seven `double`s and
/// `in_range` null or valid for seven `uint8_t`s.
#[no_mangle]
pub unsafe extern "C" fn rolldyn_predict_builtin(
    cvs: *const RolldynCvs,
    values: *mut f64,
    in_range: *mut u8,
) -> RolldynStatus {
    if cvs.is_null() {
        return null_arg("cvs");
    }
    if values.is_null() {
        return null_arg("values");
    }
    let models = match builtin_models() {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    match predict_all(&models, &(*cvs).0, false) {
        Ok(preds) => {
            for (i, p) in preds.iter().enumerate() {
                *values.add(i) = p.value;
                if !in_range.is_null() {
                    *in_range.add(i) = u8::from(p.in_range.iter().all(|b| *b));
                }
            }
            clear_error();
            RolldynStatus::Ok
        }
        Err(e) => fail(&e),
    }
}
