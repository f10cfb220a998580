//! End-to-end experiment orchestration: build the model, acquire the
//! signal, run the spectral analysis, and persist every artifact with a
//! content-hashed manifest.
//!
//! Output layout per run (one directory):
//!   signal_<config>.csv / .json   time series and its metadata sidecar
//!   spectrum_<config>.csv         DFT coefficients
//!   peaks.json                    detected peaks for every reported config
//!   oracle.json                   ground-truth gaps when the model admits one
//!   circuit.json                  gate list, random-circuit models only
//!   manifest.json                 config echo, seed, version, timings,
//!                                 worker count, file hashes
//!
//! Numeric CSV/JSON fields are printed with 12 significant digits, and all
//! randomness is drawn from counter-based streams keyed by the config seed,
//! so reruns reproduce files byte for byte at any worker count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::circuits::RandomStepCircuit;
use crate::config::{BuiltModel, ExperimentConfig, EvolutionMode, SigmaMode};
use crate::error::{MqteError, Result};
use crate::evolution::build_trotter_circuit;
use crate::exact::{diagonalize, reference_peaks, Eigensystem};
use crate::hamiltonian::{Geometry, Hamiltonian};
use crate::noise::{noisy_signal, NoiseMode, NoiseModel, NoisyEvolver};
use crate::rng::RngFactory;
use crate::sampling::{measure_signal, Evolver, SignalMap, SignalSeries};
use crate::spectral::{
    detect_peaks, dft_real_even, empirical_sigma, noise_sigma_bound, PeakReport, SamplingPlan,
    Spectrum,
};
use crate::state::BitString;

/// Bins on each side of a known line excluded from noise-floor statistics.
pub const NOISE_FLOOR_EXCLUSION_BINS: usize = 5;

/// Everything one experiment run produced.
#[derive(Debug)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    /// Per reported configuration: detected peaks, keyed by bitstring text.
    pub peaks: BTreeMap<String, Vec<PeakReport>>,
    /// Per reported configuration: its spectrum.
    pub spectra: BTreeMap<String, Spectrum>,
    pub signals: SignalMap,
    pub n_points: usize,
    /// Ground-truth (gap, weight) table for the reference return signal,
    /// when the model admits one.
    pub oracle_lines: Option<Vec<(f64, f64)>>,
    pub manifest_path: PathBuf,
}

#[derive(Debug, Serialize)]
struct ManifestTimings {
    build_ms: u64,
    signal_ms: u64,
    analysis_ms: u64,
    write_ms: u64,
    total_ms: u64,
}

/// Run one experiment and write all artifacts under the output directory
/// (the config's `output`, overridden by `out_override`, default ".").
pub fn run_experiment(
    config: &ExperimentConfig,
    out_override: Option<&Path>,
) -> Result<RunArtifacts> {
    let started = Instant::now();
    config.validate()?;
    let out_dir = resolve_out_dir(config, out_override);
    std::fs::create_dir_all(&out_dir).map_err(|e| MqteError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;

    let build_started = Instant::now();
    let model = config.build_model()?;
    let width = match &model {
        BuiltModel::Hamiltonian(h) => h.n_qubits(),
        BuiltModel::Circuit(c) => c.n_qubits(),
    };
    let geometry = match &model {
        BuiltModel::Hamiltonian(h) => h.geometry().clone(),
        BuiltModel::Circuit(_) => Geometry::Custom,
    };
    let reference = config.reference_bits(&geometry, width)?;
    let noise = config.noise_model()?;
    let factory = RngFactory::new(config.seed);

    // Ground truth and grid length. With an epsilon grid the largest gap
    // (when known) feeds the aliasing diagnostic.
    let eigensystem: Option<Eigensystem> = match &model {
        BuiltModel::Hamiltonian(h) => diagonalize(h).ok(),
        BuiltModel::Circuit(_) => None,
    };
    let max_gap = match &model {
        BuiltModel::Hamiltonian(_) => eigensystem.as_ref().map(|e| e.max_gap()),
        BuiltModel::Circuit(_) => None,
    };
    let plan: Option<SamplingPlan> = if config.grid.epsilon.is_some() {
        Some(crate::spectral::plan_sampling(
            config.grid.delta,
            config.grid.epsilon.expect("checked"),
            max_gap,
        )?)
    } else {
        None
    };
    let n_points = match &plan {
        Some(p) => p.n_points,
        None => config.planned_points(None)?,
    };
    let build_ms = ms_since(build_started);

    let signal_started = Instant::now();
    let selection = config.selection()?;
    let delta = config.grid.delta;
    let shots = config.shots;
    let signals: SignalMap = match (&model, &noise) {
        (BuiltModel::Hamiltonian(h), None) => {
            let evolver = hamiltonian_evolver(config, h, eigensystem.as_ref())?;
            measure_signal(
                &evolver.as_evolver(),
                &reference,
                &selection,
                n_points,
                delta,
                shots,
                &factory,
            )?
        }
        (BuiltModel::Hamiltonian(h), Some(noise_model)) => {
            // Validation guarantees gate evolution here unless the noise is
            // an inert analytic gamma = 0; route that case through the
            // clean path so exact evolution stays available.
            if noise_model.gamma == 0.0 && config.evolution.mode == EvolutionMode::Exact {
                let evolver = hamiltonian_evolver(config, h, eigensystem.as_ref())?;
                measure_signal(
                    &evolver.as_evolver(),
                    &reference,
                    &selection,
                    n_points,
                    delta,
                    shots,
                    &factory,
                )?
            } else {
                let tau = config.evolution.tau.expect("validated trotter tau");
                let circuit = build_trotter_circuit(h, tau)?;
                noisy_signal(
                    &NoisyEvolver::Trotter(&circuit),
                    &reference,
                    &selection,
                    n_points,
                    delta,
                    shots,
                    noise_model,
                    &factory,
                    None,
                )?
            }
        }
        (BuiltModel::Circuit(c), noise) => {
            let inert = NoiseModel::new(0.0, NoiseMode::Analytic)?;
            let noise_model = noise.as_ref().unwrap_or(&inert);
            noisy_signal(
                &NoisyEvolver::RandomStep(c),
                &reference,
                &selection,
                n_points,
                delta,
                shots,
                noise_model,
                &factory,
                None,
            )?
        }
    };
    let signal_ms = ms_since(signal_started);

    let analysis_started = Instant::now();
    let sigma_bound = noise_sigma_bound(n_points, shots);
    let mut spectra = BTreeMap::new();
    let mut peaks = BTreeMap::new();
    for (bits, series) in &signals {
        let spectrum = dft_real_even(series)?;
        let sigma = match config.analysis.sigma {
            SigmaMode::Bound => sigma_bound,
            SigmaMode::Empirical => empirical_sigma(&spectrum),
        };
        let detected = detect_peaks(&spectrum, sigma, config.analysis.threshold)?;
        peaks.insert(bits.to_string(), detected);
        spectra.insert(bits.to_string(), spectrum);
    }
    let oracle_lines = oracle_line_table(config, &model, eigensystem.as_ref(), &reference, delta)?;
    let analysis_ms = ms_since(analysis_started);

    let write_started = Instant::now();
    let mut files: BTreeMap<String, String> = BTreeMap::new();
    for (bits, series) in &signals {
        let csv_name = format!("signal_{bits}.csv");
        write_file(&out_dir, &csv_name, &signal_csv(series), &mut files)?;
        let json_name = format!("signal_{bits}.json");
        write_file(
            &out_dir,
            &json_name,
            &signal_sidecar(config, series)?,
            &mut files,
        )?;
    }
    for (bits, spectrum) in &spectra {
        let name = format!("spectrum_{bits}.csv");
        write_file(&out_dir, &name, &spectrum_csv(spectrum), &mut files)?;
    }
    write_file(
        &out_dir,
        "peaks.json",
        &peaks_json(config, &peaks, sigma_bound, n_points)?,
        &mut files,
    )?;
    if let Some(lines) = &oracle_lines {
        let energies = oracle_energies(&model, eigensystem.as_ref(), delta);
        write_file(
            &out_dir,
            "oracle.json",
            &oracle_json(config, &energies, lines)?,
            &mut files,
        )?;
    }
    if let BuiltModel::Circuit(c) = &model {
        write_file(&out_dir, "circuit.json", &circuit_json(c)?, &mut files)?;
    }
    let write_ms = ms_since(write_started);

    let timings = ManifestTimings {
        build_ms,
        signal_ms,
        analysis_ms,
        write_ms,
        total_ms: ms_since(started),
    };
    let manifest = manifest_json(config, n_points, &plan, &timings, &files)?;
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest).map_err(|e| MqteError::Io {
        path: manifest_path.display().to_string(),
        source: e,
    })?;

    Ok(RunArtifacts {
        out_dir,
        peaks,
        spectra,
        signals,
        n_points,
        oracle_lines,
        manifest_path,
    })
}

/// Compute ground truth for a config without simulating: eigenenergies
/// (or eigenphases over delta for step circuits) and the expected line
/// table of the reference return signal, written as `oracle.json`.
pub fn write_oracle(config: &ExperimentConfig, out_override: Option<&Path>) -> Result<PathBuf> {
    config.validate()?;
    let out_dir = resolve_out_dir(config, out_override);
    std::fs::create_dir_all(&out_dir).map_err(|e| MqteError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    let model = config.build_model()?;
    let width = match &model {
        BuiltModel::Hamiltonian(h) => h.n_qubits(),
        BuiltModel::Circuit(c) => c.n_qubits(),
    };
    let geometry = match &model {
        BuiltModel::Hamiltonian(h) => h.geometry().clone(),
        BuiltModel::Circuit(_) => Geometry::Custom,
    };
    let reference = config.reference_bits(&geometry, width)?;
    let eigensystem = match &model {
        BuiltModel::Hamiltonian(h) => Some(diagonalize(h)?),
        BuiltModel::Circuit(_) => None,
    };
    let delta = config.grid.delta;
    let lines = oracle_line_table(config, &model, eigensystem.as_ref(), &reference, delta)?
        .expect("both model families admit a line table");
    let energies = oracle_energies(&model, eigensystem.as_ref(), delta);
    let json = oracle_json(config, &energies, &lines)?;
    let path = out_dir.join("oracle.json");
    std::fs::write(&path, json).map_err(|e| MqteError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(path)
}

/// Standalone analysis of a signal CSV written by a run. The metadata
/// sidecar `<stem>.json` must sit next to it; outputs land beside the
/// input as `spectrum_<label>.csv` and `peaks_<label>.json`.
#[derive(Debug)]
pub struct SignalFileAnalysis {
    pub label: String,
    pub spectrum_path: PathBuf,
    pub peaks_path: PathBuf,
    pub spectrum: Spectrum,
    pub peaks: Vec<PeakReport>,
}

pub fn analyze_signal_file(csv_path: &Path, threshold: f64) -> Result<SignalFileAnalysis> {
    let text = std::fs::read_to_string(csv_path).map_err(|e| MqteError::Io {
        path: csv_path.display().to_string(),
        source: e,
    })?;
    let mut lines = text.lines();
    match lines.next() {
        Some("n,t,p") => {}
        other => {
            return Err(MqteError::parse(format!(
                "{}: expected header n,t,p, got {:?}",
                csv_path.display(),
                other.unwrap_or("")
            )))
        }
    }
    let mut values = Vec::new();
    for (row, line) in lines.enumerate() {
        let p = line
            .rsplit(',')
            .next()
            .and_then(|f| f.parse::<f64>().ok())
            .ok_or_else(|| {
                MqteError::parse(format!(
                    "{}: row {} has no numeric p field",
                    csv_path.display(),
                    row + 2
                ))
            })?;
        values.push(p);
    }
    if values.is_empty() {
        return Err(MqteError::parse(format!(
            "{}: no data rows",
            csv_path.display()
        )));
    }

    let sidecar_path = csv_path.with_extension("json");
    let sidecar_text = std::fs::read_to_string(&sidecar_path).map_err(|e| MqteError::Io {
        path: sidecar_path.display().to_string(),
        source: e,
    })?;
    let sidecar: serde_json::Value = serde_json::from_str(&sidecar_text)
        .map_err(|e| MqteError::parse(format!("{}: {e}", sidecar_path.display())))?;
    let delta = sidecar["delta"].as_f64().ok_or_else(|| {
        MqteError::parse(format!("{}: missing delta", sidecar_path.display()))
    })?;
    let shots = sidecar["M"].as_u64().ok_or_else(|| {
        MqteError::parse(format!("{}: missing M", sidecar_path.display()))
    })?;
    let n_points = values.len() - 1;
    if let Some(n) = sidecar["N"].as_u64() {
        if n as usize != n_points {
            return Err(MqteError::invalid(format!(
                "sidecar N = {n} but the CSV has {} rows; stale sidecar?",
                values.len()
            )));
        }
    }
    let stem = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("signal");
    let label = sidecar["config"]
        .as_str()
        .map(str::to_string)
        .unwrap_or_else(|| stem.strip_prefix("signal_").unwrap_or(stem).to_string());

    let spectrum = crate::spectral::dft_from_values(&values, delta)?;
    let sigma = noise_sigma_bound(n_points, shots);
    let peaks = detect_peaks(&spectrum, sigma, threshold)?;

    let dir = csv_path.parent().unwrap_or_else(|| Path::new("."));
    let spectrum_path = dir.join(format!("spectrum_{label}.csv"));
    std::fs::write(&spectrum_path, spectrum_csv(&spectrum)).map_err(|e| MqteError::Io {
        path: spectrum_path.display().to_string(),
        source: e,
    })?;
    let peaks_doc = serde_json::json!({
        "configs": { &label: &peaks },
        "sigma_bound": sigma,
        "threshold_multiplier": threshold,
        "N": n_points,
        "delta": delta,
        "M": shots,
    });
    let peaks_path = dir.join(format!("peaks_{label}.json"));
    std::fs::write(&peaks_path, to_pretty(&peaks_doc)?).map_err(|e| MqteError::Io {
        path: peaks_path.display().to_string(),
        source: e,
    })?;

    Ok(SignalFileAnalysis {
        label,
        spectrum_path,
        peaks_path,
        spectrum,
        peaks,
    })
}

/// Eigenvalue list for the oracle dump: Hamiltonian energies, or step
/// eigenphases over delta for circuits.
fn oracle_energies(
    model: &BuiltModel,
    eigensystem: Option<&Eigensystem>,
    delta: f64,
) -> Vec<f64> {
    match (model, eigensystem) {
        (BuiltModel::Hamiltonian(_), Some(eig)) => eig.energies().to_vec(),
        (BuiltModel::Circuit(c), _) => {
            let mut phases: Vec<f64> = c.eigenphases().iter().map(|p| p / delta).collect();
            phases.sort_by(f64::total_cmp);
            phases
        }
        _ => Vec::new(),
    }
}

/// Exact or Trotter evolution for a Hamiltonian model. Owns what the
/// borrowed `Evolver` needs.
enum OwnedEvolver {
    Exact(Eigensystem),
    Trotter(crate::evolution::TrotterCircuit),
}

impl OwnedEvolver {
    fn as_evolver(&self) -> Evolver<'_> {
        match self {
            OwnedEvolver::Exact(eig) => Evolver::Exact(eig),
            OwnedEvolver::Trotter(circuit) => Evolver::Trotter(circuit),
        }
    }
}

fn hamiltonian_evolver(
    config: &ExperimentConfig,
    h: &Hamiltonian,
    eigensystem: Option<&Eigensystem>,
) -> Result<OwnedEvolver> {
    match config.evolution.mode {
        EvolutionMode::Exact => match eigensystem {
            Some(eig) => Ok(OwnedEvolver::Exact(eig.clone())),
            None => Ok(OwnedEvolver::Exact(diagonalize(h)?)),
        },
        EvolutionMode::Trotter => {
            let tau = config.evolution.tau.expect("validated trotter tau");
            Ok(OwnedEvolver::Trotter(build_trotter_circuit(h, tau)?))
        }
    }
}

/// Ground-truth line table for the reference return signal.
fn oracle_line_table(
    config: &ExperimentConfig,
    model: &BuiltModel,
    eigensystem: Option<&Eigensystem>,
    reference: &BitString,
    delta: f64,
) -> Result<Option<Vec<(f64, f64)>>> {
    let floor = config.analysis.weight_floor;
    match model {
        BuiltModel::Hamiltonian(_) => match eigensystem {
            Some(eig) => {
                let table = reference_peaks(eig, reference, reference, floor);
                Ok(Some(table.into_iter().map(|g| (g.gap, g.weight)).collect()))
            }
            None => Ok(None),
        },
        BuiltModel::Circuit(c) => {
            let lines = c.effective_lines(reference, reference, delta, floor)?;
            Ok(Some(lines.into_iter().map(|l| (l.gap, l.weight)).collect()))
        }
    }
}

fn resolve_out_dir(config: &ExperimentConfig, out_override: Option<&Path>) -> PathBuf {
    match out_override {
        Some(p) => p.to_path_buf(),
        None => config
            .output
            .as_ref()
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".")),
    }
}

fn ms_since(start: Instant) -> u64 {
    start.elapsed().as_millis().min(u64::MAX as u128) as u64
}

/// 12 significant digits, scientific; byte-stable across platforms.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn signal_csv(series: &SignalSeries) -> String {
    let mut out = String::with_capacity(series.values.len() * 40 + 8);
    out.push_str("n,t,p\n");
    for (n, &p) in series.values.iter().enumerate() {
        let t = n as f64 * series.delta;
        out.push_str(&format!("{n},{},{}\n", fmt12(t), fmt12(p)));
    }
    out
}

fn signal_sidecar(config: &ExperimentConfig, series: &SignalSeries) -> Result<String> {
    let mut doc = serde_json::Map::new();
    doc.insert("ref".into(), series.reference.to_string().into());
    doc.insert("config".into(), series.config.to_string().into());
    doc.insert("delta".into(), series.delta.into());
    doc.insert("N".into(), series.n_points.into());
    doc.insert("M".into(), series.shots.into());
    doc.insert("seed".into(), series.seed.into());
    if let Some(noise) = &config.noise {
        doc.insert("gamma".into(), noise.gamma.into());
        doc.insert("mode".into(), noise.mode.to_string().into());
        if let Some(c0) = noise.c0 {
            doc.insert("C0".into(), c0.into());
        }
    }
    to_pretty(&serde_json::Value::Object(doc))
}

fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::with_capacity(spectrum.coeffs.len() * 50 + 16);
    out.push_str("k,x_k,gap,F_k\n");
    for (k, &f) in spectrum.coeffs.iter().enumerate() {
        out.push_str(&format!(
            "{k},{},{},{}\n",
            fmt12(spectrum.x_at(k)),
            fmt12(spectrum.gap_at(k)),
            fmt12(f)
        ));
    }
    out
}

fn peaks_json(
    config: &ExperimentConfig,
    peaks: &BTreeMap<String, Vec<PeakReport>>,
    sigma_bound: f64,
    n_points: usize,
) -> Result<String> {
    let doc = serde_json::json!({
        "configs": peaks,
        "sigma_bound": sigma_bound,
        "threshold_multiplier": config.analysis.threshold,
        "N": n_points,
        "delta": config.grid.delta,
        "M": config.shots,
    });
    to_pretty(&doc)
}

fn oracle_json(
    config: &ExperimentConfig,
    energies: &[f64],
    lines: &[(f64, f64)],
) -> Result<String> {
    let peaks: Vec<serde_json::Value> = lines
        .iter()
        .map(|&(gap, weight)| serde_json::json!({ "gap": gap, "weight": weight }))
        .collect();
    let doc = serde_json::json!({
        "energies": energies,
        "peaks": peaks,
        "config": config,
    });
    to_pretty(&doc)
}

fn circuit_json(circuit: &RandomStepCircuit) -> Result<String> {
    let doc = serde_json::json!({
        "n_qubits": circuit.n_qubits(),
        "depth": circuit.depth(),
        "seed": circuit.seed(),
        "gates_per_step": circuit.gate_count_per_step(),
        "step": circuit.describe_step(),
    });
    to_pretty(&doc)
}

fn manifest_json(
    config: &ExperimentConfig,
    n_points: usize,
    plan: &Option<SamplingPlan>,
    timings: &ManifestTimings,
    files: &BTreeMap<String, String>,
) -> Result<String> {
    let doc = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.seed,
        "ideal": config.is_ideal(),
        "worker_count": rayon::current_num_threads(),
        "N": n_points,
        "plan": plan,
        "config": config,
        "timings": timings,
        "files": files,
    });
    to_pretty(&doc)
}

fn to_pretty(value: &impl Serialize) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| MqteError::parse(format!("serializing artifact: {e}")))
}

fn write_file(
    dir: &Path,
    name: &str,
    content: &str,
    hashes: &mut BTreeMap<String, String>,
) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| MqteError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut hasher = Sha256::new();
    hasher.update(content.as_bytes());
    let hex: String = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    hashes.insert(name.to_string(), hex);
    Ok(())
}

/// Sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Shots,
    Gamma,
    Delta,
}

impl std::str::FromStr for SweepAxis {
    type Err = MqteError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shots" => Ok(SweepAxis::Shots),
            "gamma" => Ok(SweepAxis::Gamma),
            "delta" => Ok(SweepAxis::Delta),
            other => Err(MqteError::invalid(format!(
                "sweep axis must be shots, gamma, or delta, got {other}"
            ))),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepAxis::Shots => "shots",
            SweepAxis::Gamma => "gamma",
            SweepAxis::Delta => "delta",
        })
    }
}

/// One sweep value's summary row.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub noise_floor_rms: f64,
    pub peak_count: usize,
    pub dominant_magnitude: f64,
}

#[derive(Debug)]
pub struct SweepArtifacts {
    pub out_dir: PathBuf,
    pub rows: Vec<SweepRow>,
    pub summary_path: PathBuf,
}

/// Run the base config once per axis value, writing each run under
/// `<out>/<axis>_<value>/` plus a combined `summary.csv`. Every run shares
/// the base seed; only the swept parameter changes.
pub fn run_sweep(
    base: &ExperimentConfig,
    axis: SweepAxis,
    values: &[f64],
    out_override: Option<&Path>,
) -> Result<SweepArtifacts> {
    if values.is_empty() {
        return Err(MqteError::invalid("sweep needs at least one value"));
    }
    base.validate()?;
    let out_dir = resolve_out_dir(base, out_override);
    std::fs::create_dir_all(&out_dir).map_err(|e| MqteError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;

    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let mut config = base.clone();
        apply_axis(&mut config, axis, value)?;
        let label = format!("{axis}_{value}");
        let sub = out_dir.join(&label);
        let artifacts = run_experiment(&config, Some(&sub))?;
        rows.push(summarize_run(&artifacts, value));
    }

    let mut summary = String::from("axis,value,noise_floor_rms,peak_count,dominant_magnitude\n");
    for row in &rows {
        summary.push_str(&format!(
            "{axis},{},{},{},{}\n",
            row.value,
            fmt12(row.noise_floor_rms),
            row.peak_count,
            fmt12(row.dominant_magnitude)
        ));
    }
    let summary_path = out_dir.join("summary.csv");
    std::fs::write(&summary_path, &summary).map_err(|e| MqteError::Io {
        path: summary_path.display().to_string(),
        source: e,
    })?;

    Ok(SweepArtifacts {
        out_dir,
        rows,
        summary_path,
    })
}

fn apply_axis(config: &mut ExperimentConfig, axis: SweepAxis, value: f64) -> Result<()> {
    match axis {
        SweepAxis::Shots => {
            if !(value.is_finite() && value >= 0.0 && value.fract() == 0.0) {
                return Err(MqteError::invalid(format!(
                    "shots sweep values must be non-negative integers, got {value}"
                )));
            }
            config.shots = value as u64;
        }
        SweepAxis::Gamma => match &mut config.noise {
            Some(noise) => noise.gamma = value,
            None => {
                return Err(MqteError::invalid(
                    "gamma sweep needs a [noise] table in the base config".to_string(),
                ))
            }
        },
        SweepAxis::Delta => config.grid.delta = value,
    }
    config.validate()
}

/// Summary statistics for one run: the reference return series when
/// reported, else the first config alphabetically.
fn summarize_run(artifacts: &RunArtifacts, value: f64) -> SweepRow {
    let key = artifacts
        .signals
        .iter()
        .find(|(_, s)| s.config == s.reference)
        .map(|(b, _)| b.to_string())
        .or_else(|| artifacts.spectra.keys().next().cloned());
    let (rms, count, dominant) = match key {
        Some(key) => {
            let spectrum = &artifacts.spectra[&key];
            let peaks = &artifacts.peaks[&key];
            let exclude: Vec<usize> = match &artifacts.oracle_lines {
                Some(lines) => lines
                    .iter()
                    .map(|&(gap, _)| continuous_bin(gap, spectrum).round() as usize)
                    .collect(),
                None => peaks.iter().map(|p| p.bin).collect(),
            };
            let rms = noise_floor_rms(spectrum, &exclude, NOISE_FLOOR_EXCLUSION_BINS);
            let dominant = peaks.iter().map(|p| p.magnitude).fold(0.0, f64::max);
            (rms, peaks.len(), dominant)
        }
        None => (0.0, 0, 0.0),
    };
    SweepRow {
        value,
        noise_floor_rms: rms,
        peak_count: count,
        dominant_magnitude: dominant,
    }
}

/// Continuous (fractional) bin position of a gap in a spectrum's grid.
pub fn continuous_bin(gap: f64, spectrum: &Spectrum) -> f64 {
    let length = 2 * spectrum.n_points + 1;
    gap * spectrum.delta * length as f64 / (2.0 * std::f64::consts::PI)
}

/// RMS of |2F(k)| over bins k ≥ 1 farther than `radius` bins from every
/// excluded position.
pub fn noise_floor_rms(spectrum: &Spectrum, excluded: &[usize], radius: usize) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in 1..spectrum.coeffs.len() {
        if excluded.iter().any(|&e| k.abs_diff(e) <= radius) {
            continue;
        }
        sum += spectrum.magnitude(k).powi(2);
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    }
}
