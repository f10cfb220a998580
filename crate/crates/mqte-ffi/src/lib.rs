//! C ABI over the core library: opaque handles, integer status codes, and
//! a thread-local last-error message. The header `include/mqte.h` is
//! generated at build time.
//!
//! Conventions:
//!   - Functions returning `int32_t` use 0 for success, 1 for any error,
//!     2 for a trajectory-budget rejection; on failure the handle or
//!     value outputs are untouched and `mqte_last_error` describes it.
//!   - Every `*_new`/`*_free` pair owns its handle; passing a handle to
//!     its free function twice, or a foreign pointer, is undefined.
//!   - String arguments are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use mqte_core::config::ExperimentConfig;
use mqte_core::exact::{diagonalize, Eigensystem};
use mqte_core::hamiltonian::Hamiltonian;
use mqte_core::noise::{max_tolerable_depth, required_shot_budget, survival_probability};
use mqte_core::rng::RngFactory;
use mqte_core::runner::run_experiment;
use mqte_core::sampling::{measure_signal, ConfigSelection, Evolver, SignalSeries};
use mqte_core::spectral::{detect_peaks, dft_real_even, noise_sigma_bound, Spectrum};
use mqte_core::state::BitString;
use mqte_core::MqteError;

pub const MQTE_OK: i32 = 0;
pub const MQTE_ERR: i32 = 1;
pub const MQTE_ERR_BUDGET: i32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(err: &MqteError) -> i32 {
    let text = err.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).unwrap_or_default();
    });
    match err.exit_code() {
        2 => MQTE_ERR_BUDGET,
        _ => MQTE_ERR,
    }
}

fn set_error_text(text: &str) -> i32 {
    set_error(&MqteError::InvalidInput(text.to_string()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mqte_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread. Valid until the
/// next failing call from the same thread.
#[no_mangle]
pub extern "C" fn mqte_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, i32> {
    if ptr.is_null() {
        return Err(set_error_text(&format!("{what} is NULL")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| set_error_text(&format!("{what} is not valid UTF-8")))
}

unsafe fn read_bits(ptr: *const c_char, what: &str) -> Result<BitString, i32> {
    let text = read_str(ptr, what)?;
    text.parse::<BitString>().map_err(|e| set_error(&e))
}

fn give<T>(value: T, out: *mut *mut T) -> i32 {
    if out.is_null() {
        return set_error_text("output handle pointer is NULL");
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    MQTE_OK
}

/// Spin Hamiltonian handle.
pub struct MqteHamiltonian(Hamiltonian);
/// Eigendecomposition handle.
pub struct MqteEigensystem(Eigensystem);
/// One measured time series handle.
pub struct MqteSignal(SignalSeries);
/// Cosine-transform spectrum handle.
pub struct MqteSpectrum(Spectrum);

/// One detected spectral line. `significance` is NaN when the detection
/// ran with sigma = 0 (exact-signal mode).
#[repr(C)]
pub struct MqtePeak {
    pub bin: usize,
    pub gap: f64,
    pub amplitude: f64,
    pub magnitude: f64,
    pub significance: f64,
    pub sigma_used: f64,
}

/// Nearest-neighbor Heisenberg chain with a uniform transverse field.
#[no_mangle]
pub extern "C" fn mqte_heisenberg_1d(
    sites: usize,
    j: f64,
    h: f64,
    out: *mut *mut MqteHamiltonian,
) -> i32 {
    match Hamiltonian::heisenberg_1d(sites, j, h) {
        Ok(hm) => give(MqteHamiltonian(hm), out),
        Err(e) => set_error(&e),
    }
}

/// Heisenberg model on a rows x cols grid.
#[no_mangle]
pub extern "C" fn mqte_heisenberg_2d(
    rows: usize,
    cols: usize,
    j: f64,
    h: f64,
    out: *mut *mut MqteHamiltonian,
) -> i32 {
    match Hamiltonian::heisenberg_2d(rows, cols, j, h) {
        Ok(hm) => give(MqteHamiltonian(hm), out),
        Err(e) => set_error(&e),
    }
}

#[no_mangle]
pub extern "C" fn mqte_hamiltonian_free(h: *mut MqteHamiltonian) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

#[no_mangle]
pub extern "C" fn mqte_hamiltonian_qubits(h: *const MqteHamiltonian) -> usize {
    if h.is_null() {
        return 0;
    }
    unsafe { &*h }.0.n_qubits()
}

/// Full eigendecomposition; rejects systems above the dense cap.
#[no_mangle]
pub extern "C" fn mqte_diagonalize(
    h: *const MqteHamiltonian,
    out: *mut *mut MqteEigensystem,
) -> i32 {
    if h.is_null() {
        return set_error_text("hamiltonian handle is NULL");
    }
    match diagonalize(&unsafe { &*h }.0) {
        Ok(eig) => give(MqteEigensystem(eig), out),
        Err(e) => set_error(&e),
    }
}

#[no_mangle]
pub extern "C" fn mqte_eigensystem_free(eig: *mut MqteEigensystem) {
    if !eig.is_null() {
        drop(unsafe { Box::from_raw(eig) });
    }
}

#[no_mangle]
pub extern "C" fn mqte_eigensystem_dim(eig: *const MqteEigensystem) -> usize {
    if eig.is_null() {
        return 0;
    }
    unsafe { &*eig }.0.dim()
}

/// Copy the ascending eigenvalues into `out[0..len]`; `len` must equal
/// the dimension.
#[no_mangle]
pub extern "C" fn mqte_eigensystem_energies(
    eig: *const MqteEigensystem,
    out: *mut f64,
    len: usize,
) -> i32 {
    if eig.is_null() || out.is_null() {
        return set_error_text("NULL argument");
    }
    let energies = unsafe { &*eig }.0.energies();
    if len != energies.len() {
        return set_error_text(&format!(
            "buffer holds {len} values but the system has {}",
            energies.len()
        ));
    }
    unsafe { ptr::copy_nonoverlapping(energies.as_ptr(), out, len) };
    MQTE_OK
}

/// Measurement-probability series p(n) for n = 0..=n_points under exact
/// evolution, started from `reference` and monitored at `config`.
/// `shots` = 0 gives exact probabilities, otherwise sampled estimates
/// seeded by `seed`.
#[no_mangle]
pub extern "C" fn mqte_exact_signal(
    eig: *const MqteEigensystem,
    reference: *const c_char,
    config: *const c_char,
    n_points: usize,
    delta: f64,
    shots: u64,
    seed: u64,
    out: *mut *mut MqteSignal,
) -> i32 {
    if eig.is_null() {
        return set_error_text("eigensystem handle is NULL");
    }
    let reference = match unsafe { read_bits(reference, "reference") } {
        Ok(b) => b,
        Err(code) => return code,
    };
    let config = match unsafe { read_bits(config, "config") } {
        Ok(b) => b,
        Err(code) => return code,
    };
    let factory = RngFactory::new(seed);
    let selection = ConfigSelection::Listed(vec![config.clone()]);
    let result = measure_signal(
        &Evolver::Exact(&unsafe { &*eig }.0),
        &reference,
        &selection,
        n_points,
        delta,
        shots,
        &factory,
    );
    match result {
        Ok(mut map) => match map.remove(&config) {
            Some(series) => give(MqteSignal(series), out),
            None => set_error_text("requested configuration missing from the result"),
        },
        Err(e) => set_error(&e),
    }
}

#[no_mangle]
pub extern "C" fn mqte_signal_free(signal: *mut MqteSignal) {
    if !signal.is_null() {
        drop(unsafe { Box::from_raw(signal) });
    }
}

/// Number of stored points, n_points + 1.
#[no_mangle]
pub extern "C" fn mqte_signal_len(signal: *const MqteSignal) -> usize {
    if signal.is_null() {
        return 0;
    }
    unsafe { &*signal }.0.values.len()
}

/// Copy the series values into `out[0..len]`; `len` must match.
#[no_mangle]
pub extern "C" fn mqte_signal_values(
    signal: *const MqteSignal,
    out: *mut f64,
    len: usize,
) -> i32 {
    if signal.is_null() || out.is_null() {
        return set_error_text("NULL argument");
    }
    let values = &unsafe { &*signal }.0.values;
    if len != values.len() {
        return set_error_text(&format!(
            "buffer holds {len} values but the series has {}",
            values.len()
        ));
    }
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), out, len) };
    MQTE_OK
}

/// Real-even cosine transform of a signal.
#[no_mangle]
pub extern "C" fn mqte_signal_spectrum(
    signal: *const MqteSignal,
    out: *mut *mut MqteSpectrum,
) -> i32 {
    if signal.is_null() {
        return set_error_text("signal handle is NULL");
    }
    match dft_real_even(&unsafe { &*signal }.0) {
        Ok(spectrum) => give(MqteSpectrum(spectrum), out),
        Err(e) => set_error(&e),
    }
}

#[no_mangle]
pub extern "C" fn mqte_spectrum_free(spectrum: *mut MqteSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Number of frequency bins, n_points + 1.
#[no_mangle]
pub extern "C" fn mqte_spectrum_len(spectrum: *const MqteSpectrum) -> usize {
    if spectrum.is_null() {
        return 0;
    }
    unsafe { &*spectrum }.0.coeffs.len()
}

/// Copy the raw cosine coefficients F(k) into `out[0..len]`.
#[no_mangle]
pub extern "C" fn mqte_spectrum_coeffs(
    spectrum: *const MqteSpectrum,
    out: *mut f64,
    len: usize,
) -> i32 {
    if spectrum.is_null() || out.is_null() {
        return set_error_text("NULL argument");
    }
    let coeffs = &unsafe { &*spectrum }.0.coeffs;
    if len != coeffs.len() {
        return set_error_text(&format!(
            "buffer holds {len} values but the spectrum has {}",
            coeffs.len()
        ));
    }
    unsafe { ptr::copy_nonoverlapping(coeffs.as_ptr(), out, len) };
    MQTE_OK
}

/// Energy gap represented by bin k; NaN for a NULL handle.
#[no_mangle]
pub extern "C" fn mqte_spectrum_gap_at(spectrum: *const MqteSpectrum, bin: usize) -> f64 {
    if spectrum.is_null() {
        return f64::NAN;
    }
    let s = &unsafe { &*spectrum }.0;
    if bin >= s.coeffs.len() {
        return f64::NAN;
    }
    s.gap_at(bin)
}

/// Shot-noise standard deviation bound for a spectrum of N + 1 points
/// estimated from M shots each; 0 when M = 0.
#[no_mangle]
pub extern "C" fn mqte_noise_sigma_bound(n_points: usize, shots: u64) -> f64 {
    noise_sigma_bound(n_points, shots)
}

/// Threshold peak detection. Writes up to `cap` peaks into `out` in
/// descending magnitude order and stores the total found in `found`;
/// when the total exceeds `cap` only the strongest `cap` are written.
#[no_mangle]
pub extern "C" fn mqte_detect_peaks(
    spectrum: *const MqteSpectrum,
    sigma: f64,
    multiplier: f64,
    out: *mut MqtePeak,
    cap: usize,
    found: *mut usize,
) -> i32 {
    if spectrum.is_null() || found.is_null() || (cap > 0 && out.is_null()) {
        return set_error_text("NULL argument");
    }
    let mut peaks = match detect_peaks(&unsafe { &*spectrum }.0, sigma, multiplier) {
        Ok(p) => p,
        Err(e) => return set_error(&e),
    };
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    unsafe { *found = peaks.len() };
    for (slot, peak) in (0..cap).zip(peaks.iter()) {
        let record = MqtePeak {
            bin: peak.bin,
            gap: peak.gap,
            amplitude: peak.amplitude,
            magnitude: peak.magnitude,
            significance: peak.significance.unwrap_or(f64::NAN),
            sigma_used: peak.sigma_used,
        };
        unsafe { ptr::write(out.add(slot), record) };
    }
    MQTE_OK
}

/// Probability that a depth-`noise_events` run sees no noise event,
/// (1 - gamma)^noise_events. Returns NaN on invalid gamma.
#[no_mangle]
pub extern "C" fn mqte_survival_probability(gamma: f64, noise_events: u64) -> f64 {
    survival_probability(gamma, noise_events).unwrap_or(f64::NAN)
}

/// Shots needed for one expected noise-free run at the given depth.
#[no_mangle]
pub extern "C" fn mqte_required_shot_budget(
    gamma: f64,
    noise_events: u64,
    out: *mut u64,
) -> i32 {
    if out.is_null() {
        return set_error_text("output pointer is NULL");
    }
    match required_shot_budget(gamma, noise_events) {
        Ok(budget) => {
            unsafe { *out = budget };
            MQTE_OK
        }
        Err(e) => set_error(&e),
    }
}

/// Largest event depth at which `budget` shots still expect one clean run.
#[no_mangle]
pub extern "C" fn mqte_max_tolerable_depth(gamma: f64, budget: u64, out: *mut u64) -> i32 {
    if out.is_null() {
        return set_error_text("output pointer is NULL");
    }
    match max_tolerable_depth(gamma, budget) {
        Ok(depth) => {
            unsafe { *out = depth };
            MQTE_OK
        }
        Err(e) => set_error(&e),
    }
}

/// Parse a TOML experiment config and run it end to end, writing all
/// artifacts under `out_dir` (NULL keeps the config's own output key).
/// On success stores the manifest path in `manifest_path_out` as a
/// heap string; release it with `mqte_string_free`.
#[no_mangle]
pub extern "C" fn mqte_run_experiment_toml(
    toml_text: *const c_char,
    out_dir: *const c_char,
    manifest_path_out: *mut *mut c_char,
) -> i32 {
    let text = match unsafe { read_str(toml_text, "config text") } {
        Ok(t) => t,
        Err(code) => return code,
    };
    let out_override = if out_dir.is_null() {
        None
    } else {
        match unsafe { read_str(out_dir, "output directory") } {
            Ok(d) => Some(d.to_string()),
            Err(code) => return code,
        }
    };
    let config = match ExperimentConfig::from_toml_str(text) {
        Ok(c) => c,
        Err(e) => return set_error(&e),
    };
    let artifacts = match run_experiment(&config, out_override.as_deref().map(Path::new)) {
        Ok(a) => a,
        Err(e) => return set_error(&e),
    };
    if !manifest_path_out.is_null() {
        let path = artifacts.manifest_path.display().to_string().replace('\0', " ");
        match CString::new(path) {
            Ok(cstring) => unsafe { *manifest_path_out = cstring.into_raw() },
            Err(_) => return set_error_text("manifest path is not representable"),
        }
    }
    MQTE_OK
}

/// Release a string returned by this library.
#[no_mangle]
pub extern "C" fn mqte_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(text: &str) -> CString {
        CString::new(text).unwrap()
    }

    #[test]
    fn version_is_a_valid_string() {
        let v = unsafe { CStr::from_ptr(mqte_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn two_site_pipeline_through_the_c_surface() {
        let mut h: *mut MqteHamiltonian = ptr::null_mut();
        assert_eq!(mqte_heisenberg_1d(2, 1.0, 2.0, &mut h), MQTE_OK);
        assert_eq!(mqte_hamiltonian_qubits(h), 2);

        let mut eig: *mut MqteEigensystem = ptr::null_mut();
        assert_eq!(mqte_diagonalize(h, &mut eig), MQTE_OK);
        assert_eq!(mqte_eigensystem_dim(eig), 4);
        let mut energies = [0.0f64; 4];
        assert_eq!(
            mqte_eigensystem_energies(eig, energies.as_mut_ptr(), 4),
            MQTE_OK
        );
        assert!((energies[0] + 4.0).abs() < 1e-12);

        let reference = c("01");
        let mut signal: *mut MqteSignal = ptr::null_mut();
        assert_eq!(
            mqte_exact_signal(
                eig,
                reference.as_ptr(),
                reference.as_ptr(),
                400,
                0.1,
                0,
                7,
                &mut signal
            ),
            MQTE_OK
        );
        assert_eq!(mqte_signal_len(signal), 401);

        let mut spectrum: *mut MqteSpectrum = ptr::null_mut();
        assert_eq!(mqte_signal_spectrum(signal, &mut spectrum), MQTE_OK);
        assert_eq!(mqte_spectrum_len(spectrum), 401);

        let mut peaks = [MqtePeak {
            bin: 0,
            gap: 0.0,
            amplitude: 0.0,
            magnitude: 0.0,
            significance: 0.0,
            sigma_used: 0.0,
        }];
        let mut found = 0usize;
        assert_eq!(
            mqte_detect_peaks(spectrum, 0.0, 4.0, peaks.as_mut_ptr(), 1, &mut found),
            MQTE_OK
        );
        assert!(found >= 1);
        // Dominant line of the two-site return signal sits at gap 4.
        assert!((peaks[0].gap - 4.0).abs() < 0.2, "gap {}", peaks[0].gap);
        assert!(peaks[0].significance.is_nan());

        mqte_spectrum_free(spectrum);
        mqte_signal_free(signal);
        mqte_eigensystem_free(eig);
        mqte_hamiltonian_free(h);
    }

    #[test]
    fn errors_set_a_readable_message_and_code() {
        let mut h: *mut MqteHamiltonian = ptr::null_mut();
        assert_eq!(mqte_heisenberg_1d(1, 1.0, 0.0, &mut h), MQTE_ERR);
        assert!(h.is_null());
        let message = unsafe { CStr::from_ptr(mqte_last_error()) };
        assert!(!message.to_bytes().is_empty());

        let mut eig: *mut MqteEigensystem = ptr::null_mut();
        assert_eq!(mqte_diagonalize(ptr::null(), &mut eig), MQTE_ERR);
        assert!(eig.is_null());
    }

    #[test]
    fn budget_helpers_match_the_library() {
        assert!((mqte_survival_probability(0.01, 100) - 0.3660323412732292).abs() < 1e-15);
        assert!(mqte_survival_probability(1.5, 10).is_nan());
        let mut budget = 0u64;
        assert_eq!(mqte_required_shot_budget(0.01, 916, &mut budget), MQTE_OK);
        assert_eq!(budget, 9958);
        let mut depth = 0u64;
        assert_eq!(mqte_max_tolerable_depth(0.01, 10_000, &mut depth), MQTE_OK);
        assert_eq!(depth, 916);
        assert_eq!(
            mqte_max_tolerable_depth(0.0, 10_000, &mut depth),
            MQTE_ERR
        );
    }

    #[test]
    fn toml_runner_writes_a_manifest() {
        let dir = tempdir();
        let toml = c(&format!(
            r#"
seed = 3
reference = "01"

[model]
kind = "heisenberg1d"
sites = 2
J = 1.0
h = 2.0

[grid]
delta = 0.1
N = 50

[configs]
list = ["01"]
"#
        ));
        let out = c(dir.to_str().unwrap());
        let mut manifest: *mut c_char = ptr::null_mut();
        assert_eq!(
            mqte_run_experiment_toml(toml.as_ptr(), out.as_ptr(), &mut manifest),
            MQTE_OK
        );
        let path = unsafe { CStr::from_ptr(manifest) }.to_str().unwrap().to_string();
        assert!(std::path::Path::new(&path).exists());
        mqte_string_free(manifest);
        std::fs::remove_dir_all(&dir).ok();

        let bad = c("seed = ");
        assert_eq!(
            mqte_run_experiment_toml(bad.as_ptr(), ptr::null(), ptr::null_mut()),
            MQTE_ERR
        );
    }

    fn tempdir() -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "mqte-ffi-test-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }
}
