//! Pauli-channel circuit noise: Monte Carlo trajectories, a closed-form
//! attenuation model, shot-budget laws, and a small-register density-matrix
//! oracle validating both.
//!
//! Every gate application is followed by one channel draw per touched qubit
//! (two per bond gate). A draw leaves the state alone with probability 1−γ
//! and otherwise applies X, Y, or Z with probability γ/3 each. The survival
//! probability of a circuit with N_G draws is (1−γ)^{N_G}; surviving runs
//! contribute the clean signal, the rest a flat background C0, so the
//! expected measured probability is f·p + (1−f)·C0 with f = (1−γ)^{N_G}.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::RandomStepCircuit;
use crate::error::{MqteError, Result};
use crate::evolution::{StepGate, TrotterCircuit};
use crate::rng::{RngFactory, StreamDomain};
use crate::sampling::{
    build_map, map_from_counts, multinomial_counts, steps_per_sample, top_k_indices, validate_grid,
    ConfigSelection, SignalMap,
};
use crate::state::{BitString, PauliAxis, QuantumState, C64};

/// Default cap on total gate applications in trajectory-independent mode.
pub const DEFAULT_COST_CAP: u64 = 2_000_000_000;

/// Density-matrix oracle register cap.
pub const ORACLE_MAX_QUBITS: usize = 4;

/// How noisy runs are simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Fresh trajectory per (time point, shot): faithful to independent
    /// hardware runs, gate cost grows with the square of the grid length
    /// for stepped circuits.
    TrajectoryIndependent,
    /// One trajectory per shot walked across the whole grid: cheap, but
    /// noise is correlated between time points.
    TrajectorySequential,
    /// Closed-form attenuation f·p + (1−f)·C0, optionally shot-sampled.
    Analytic,
}

impl Default for NoiseMode {
    fn default() -> Self {
        NoiseMode::TrajectorySequential
    }
}

impl std::fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            NoiseMode::TrajectoryIndependent => "trajectory-independent",
            NoiseMode::TrajectorySequential => "trajectory-sequential",
            NoiseMode::Analytic => "analytic",
        };
        f.write_str(name)
    }
}

/// Per-gate Pauli error model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Error probability per channel draw.
    pub gamma: f64,
    pub mode: NoiseMode,
    /// Background each errored run collapses to; `None` means uniform,
    /// 1/2^n.
    pub c0: Option<f64>,
    /// Background variance; `None` means C0·(1−C0), the Bernoulli variance
    /// of a uniform-collapse outcome.
    pub sigma_q2: Option<f64>,
}

impl NoiseModel {
    pub fn new(gamma: f64, mode: NoiseMode) -> Result<Self> {
        let model = NoiseModel {
            gamma,
            mode,
            c0: None,
            sigma_q2: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && (0.0..=1.0).contains(&self.gamma)) {
            return Err(MqteError::invalid(format!(
                "noise strength gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if let Some(c0) = self.c0 {
            if !(c0.is_finite() && (0.0..=1.0).contains(&c0)) {
                return Err(MqteError::invalid(format!(
                    "background probability C0 must lie in [0, 1], got {c0}"
                )));
            }
        }
        if let Some(s) = self.sigma_q2 {
            if !(s.is_finite() && s >= 0.0) {
                return Err(MqteError::invalid(format!(
                    "background variance must be ≥ 0, got {s}"
                )));
            }
        }
        Ok(())
    }

    /// Background probability per configuration.
    pub fn background(&self, n_qubits: usize) -> f64 {
        self.c0.unwrap_or_else(|| 1.0 / (1u64 << n_qubits) as f64)
    }

    /// Background variance per configuration.
    pub fn background_variance(&self, n_qubits: usize) -> f64 {
        self.sigma_q2.unwrap_or_else(|| {
            let c0 = self.background(n_qubits);
            c0 * (1.0 - c0)
        })
    }
}

/// Error channel flavor used by the density-matrix oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Per-qubit Pauli error: ρ → (1−γ)ρ + (γ/3)(XρX + YρY + ZρZ). The
    /// exact expectation of the trajectory channel draws.
    PauliPerQubit,
    /// Per-draw uniform replacement: ρ → (1−γ)ρ + γ·tr(ρ)·I/2^n. Composes
    /// through any circuit to exactly f·UρU† + (1−f)·I/2^n, the closed
    /// form the analytic mode assumes.
    UniformReplacement,
}

/// Circuit families the noisy simulator accepts.
#[derive(Debug, Clone, Copy)]
pub enum NoisyEvolver<'a> {
    Trotter(&'a TrotterCircuit),
    RandomStep(&'a RandomStepCircuit),
}

impl NoisyEvolver<'_> {
    pub fn n_qubits(&self) -> usize {
        match self {
            NoisyEvolver::Trotter(c) => c.n_qubits(),
            NoisyEvolver::RandomStep(c) => c.n_qubits(),
        }
    }

    /// Circuit steps advancing one grid sample. Random step circuits define
    /// the grid spacing themselves; Trotter circuits require delta to be an
    /// integer multiple of tau.
    pub fn resolve_steps(&self, delta: f64) -> Result<usize> {
        match self {
            NoisyEvolver::Trotter(c) => steps_per_sample(c, delta),
            NoisyEvolver::RandomStep(_) => Ok(1),
        }
    }

    /// Channel draws in the circuit that reaches grid index `time_index`.
    /// Constant for random step circuits (the time-n circuit has fixed
    /// depth); linear in the index for stepped Trotter evolution.
    pub fn noise_events_at(&self, time_index: usize, steps_per_sample: usize) -> u64 {
        match self {
            NoisyEvolver::Trotter(c) => {
                time_index as u64 * steps_per_sample as u64 * trotter_step_events(c)
            }
            NoisyEvolver::RandomStep(c) => c.noise_events_per_step(),
        }
    }

    fn gate_apps_at(&self, time_index: usize, steps_per_sample: usize) -> u64 {
        match self {
            NoisyEvolver::Trotter(c) => {
                time_index as u64 * steps_per_sample as u64 * c.gates_per_step() as u64
            }
            NoisyEvolver::RandomStep(c) => c.gate_count_per_step() as u64,
        }
    }
}

/// Channel draws per Trotter step: one per touched qubit per gate.
fn trotter_step_events(circuit: &TrotterCircuit) -> u64 {
    circuit
        .step_gates()
        .iter()
        .map(|g| g.touched_qubits().len() as u64)
        .sum()
}

/// One channel draw: with probability 1−γ do nothing, else apply X, Y, or
/// Z (equal thirds) on the qubit. Expectation over draws is the channel
/// ρ → (1−γ)ρ + (γ/3)(XρX + YρY + ZρZ).
pub fn apply_pauli_channel(
    state: &mut QuantumState,
    qubit: usize,
    gamma: f64,
    rng: &mut impl Rng,
) {
    assert!(
        (0.0..=1.0).contains(&gamma),
        "gamma out of range: {gamma}"
    );
    let u: f64 = rng.gen();
    if u < gamma {
        let axis = match rng.gen_range(0u8..3) {
            0 => PauliAxis::X,
            1 => PauliAxis::Y,
            _ => PauliAxis::Z,
        };
        state.apply_pauli_axis(qubit, axis);
    }
}

/// Measured signal under the Pauli error model. Semantics per mode:
///
/// * trajectory-independent: each (time point, shot) is a fresh trajectory
///   from t = 0 through the circuit reaching that grid index, every gate
///   followed by one channel draw per touched qubit, then one projective
///   sample. Gate cost is checked against `cost_cap` (default
///   [`DEFAULT_COST_CAP`]) before any work.
/// * trajectory-sequential: one trajectory per shot advanced across the
///   whole grid, sampled at each point without collapsing. Cheap; noise is
///   correlated between time points, and a warning says so on stderr.
/// * analytic: clean p scaled by the survival factor plus (1−f)·C0;
///   `shots = 0` returns the expectation, otherwise shot-sampled.
///
/// Trajectory modes require `shots ≥ 1`. With gamma = 0 every mode matches
/// the clean sampled signal in distribution.
#[allow(clippy::too_many_arguments)]
pub fn noisy_signal(
    evolver: &NoisyEvolver,
    reference: &BitString,
    selection: &ConfigSelection,
    n_points: usize,
    delta: f64,
    shots: u64,
    model: &NoiseModel,
    factory: &RngFactory,
    cost_cap: Option<u64>,
) -> Result<SignalMap> {
    validate_grid(n_points, delta)?;
    model.validate()?;
    let n_qubits = evolver.n_qubits();
    if reference.n_qubits() != n_qubits {
        return Err(MqteError::invalid(format!(
            "reference on {} qubits does not match register of {}",
            reference.n_qubits(),
            n_qubits
        )));
    }
    if let ConfigSelection::Listed(configs) = selection {
        for c in configs {
            if c.n_qubits() != n_qubits {
                return Err(MqteError::invalid(format!(
                    "selected configuration {c} does not match register of {n_qubits} qubits"
                )));
            }
        }
    }
    let index_cap = 1u64 << 28;
    if shots >= index_cap || (n_points as u64) >= index_cap {
        return Err(MqteError::invalid(format!(
            "shot count and grid length must stay below 2^28, got M={shots}, N={n_points}"
        )));
    }
    let steps = evolver.resolve_steps(delta)?;

    match model.mode {
        NoiseMode::TrajectoryIndependent => {
            if shots == 0 {
                return Err(MqteError::invalid(
                    "trajectory modes are sampled; use analytic mode for exact expectations"
                        .to_string(),
                ));
            }
            let cap = cost_cap.unwrap_or(DEFAULT_COST_CAP);
            let mut estimate: u128 = 0;
            for t in 0..=n_points {
                estimate += evolver.gate_apps_at(t, steps) as u128;
            }
            estimate = estimate.saturating_mul(shots as u128);
            if estimate > cap as u128 {
                return Err(MqteError::BudgetExceeded {
                    estimate: estimate as f64,
                    cap: cap as f64,
                    suggestion: "switch noise mode to trajectory-sequential or analytic"
                        .to_string(),
                });
            }
            independent_counts(evolver, reference, n_points, steps, shots, model, factory).and_then(
                |counts| {
                    map_from_counts(
                        counts, selection, n_qubits, reference, delta, n_points, shots, factory,
                    )
                },
            )
        }
        NoiseMode::TrajectorySequential => {
            if shots == 0 {
                return Err(MqteError::invalid(
                    "trajectory modes are sampled; use analytic mode for exact expectations"
                        .to_string(),
                ));
            }
            eprintln!(
                "note: trajectory-sequential noise walks one trajectory per shot across the \
                 grid, so errors are correlated between time points; use trajectory-independent \
                 (costlier) or analytic mode for uncorrelated noise"
            );
            let counts =
                sequential_counts(evolver, reference, n_points, steps, shots, model, factory);
            map_from_counts(
                counts, selection, n_qubits, reference, delta, n_points, shots, factory,
            )
        }
        NoiseMode::Analytic => {
            analytic_signal(
                evolver, reference, selection, n_points, delta, steps, shots, model, factory,
            )
        }
    }
}

/// Apply `repeats` passes of `gates`, each gate followed by channel draws
/// on its touched qubits.
fn apply_gates_with_channels(
    state: &mut QuantumState,
    gates: &[StepGate],
    repeats: usize,
    gamma: f64,
    rng: &mut impl Rng,
) {
    for _ in 0..repeats {
        for gate in gates {
            gate.apply(state);
            for q in gate.touched_qubits() {
                apply_pauli_channel(state, q, gamma, rng);
            }
        }
    }
}

/// One projective sample from the state's distribution.
fn sample_index(probabilities: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = probabilities.iter().sum();
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.len() - 1
}

fn independent_counts(
    evolver: &NoisyEvolver,
    reference: &BitString,
    n_points: usize,
    steps: usize,
    shots: u64,
    model: &NoiseModel,
    factory: &RngFactory,
) -> Result<Vec<Vec<(usize, u64)>>> {
    let dim = 1usize << evolver.n_qubits();
    let initial = QuantumState::basis_state(reference);
    (0..=n_points)
        .into_par_iter()
        .map(|t| {
            let gates;
            let repeats;
            match evolver {
                NoisyEvolver::RandomStep(c) => {
                    gates = c.gates_for_steps(t as u64);
                    repeats = 1;
                }
                NoisyEvolver::Trotter(c) => {
                    gates = c.step_gates().to_vec();
                    repeats = t * steps;
                }
            }
            let mut tally = vec![0u64; dim];
            for s in 0..shots {
                let mut rng =
                    factory.stream(StreamDomain::TrajectoryIndependent, t as u64, s);
                let mut state = initial.clone();
                apply_gates_with_channels(&mut state, &gates, repeats, model.gamma, &mut rng);
                tally[sample_index(&state.probabilities(), &mut rng)] += 1;
            }
            Ok(tally
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .collect())
        })
        .collect()
}

fn sequential_counts(
    evolver: &NoisyEvolver,
    reference: &BitString,
    n_points: usize,
    steps: usize,
    shots: u64,
    model: &NoiseModel,
    factory: &RngFactory,
) -> Vec<Vec<(usize, u64)>> {
    let dim = 1usize << evolver.n_qubits();
    let initial = QuantumState::basis_state(reference);
    let step_gates: Vec<StepGate> = match evolver {
        NoisyEvolver::RandomStep(c) => c.step_gates(),
        NoisyEvolver::Trotter(c) => c.step_gates().to_vec(),
    };
    let per_shot: Vec<Vec<usize>> = (0..shots)
        .into_par_iter()
        .map(|s| {
            let mut rng = factory.stream(StreamDomain::TrajectorySequential, s, 0);
            let mut state = initial.clone();
            let mut picks = Vec::with_capacity(n_points + 1);
            for t in 0..=n_points {
                if t > 0 {
                    let repeats = match evolver {
                        NoisyEvolver::RandomStep(_) => 1,
                        NoisyEvolver::Trotter(_) => steps,
                    };
                    apply_gates_with_channels(
                        &mut state,
                        &step_gates,
                        repeats,
                        model.gamma,
                        &mut rng,
                    );
                }
                picks.push(sample_index(&state.probabilities(), &mut rng));
            }
            picks
        })
        .collect();

    let mut counts = vec![vec![0u64; dim]; n_points + 1];
    for picks in per_shot {
        for (t, idx) in picks.into_iter().enumerate() {
            counts[t][idx] += 1;
        }
    }
    counts
        .into_iter()
        .map(|tally| {
            tally
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .collect()
        })
        .collect()
}

/// Clean per-time-point distributions, [time][basis index].
fn clean_distributions(
    evolver: &NoisyEvolver,
    initial: &QuantumState,
    n_points: usize,
    steps: usize,
) -> Vec<Vec<f64>> {
    match evolver {
        NoisyEvolver::RandomStep(c) => (0..=n_points)
            .into_par_iter()
            .map(|t| {
                let mut state = initial.clone();
                c.apply_steps(&mut state, t as u64);
                state.probabilities()
            })
            .collect(),
        NoisyEvolver::Trotter(c) => {
            let mut out = Vec::with_capacity(n_points + 1);
            let mut state = initial.clone();
            for t in 0..=n_points {
                if t > 0 {
                    for _ in 0..steps {
                        c.apply_step(&mut state);
                    }
                }
                out.push(state.probabilities());
            }
            out
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn analytic_signal(
    evolver: &NoisyEvolver,
    reference: &BitString,
    selection: &ConfigSelection,
    n_points: usize,
    delta: f64,
    steps: usize,
    shots: u64,
    model: &NoiseModel,
    factory: &RngFactory,
) -> Result<SignalMap> {
    let n_qubits = evolver.n_qubits();
    let dim = 1usize << n_qubits;
    let c0 = model.background(n_qubits);
    let initial = QuantumState::basis_state(reference);
    let clean = clean_distributions(evolver, &initial, n_points, steps);
    let noisy: Vec<Vec<f64>> = clean
        .into_iter()
        .enumerate()
        .map(|(t, p)| {
            let f = (1.0 - model.gamma).powf(evolver.noise_events_at(t, steps) as f64);
            p.into_iter().map(|v| f * v + (1.0 - f) * c0).collect()
        })
        .collect();

    if shots == 0 {
        let indices: Vec<usize> = match selection {
            ConfigSelection::Listed(configs) => {
                configs.iter().map(|c| c.index() as usize).collect()
            }
            ConfigSelection::TopK(k) => {
                let mut sums = vec![0.0; dim];
                for row in &noisy {
                    for (s, &v) in sums.iter_mut().zip(row) {
                        *s += v;
                    }
                }
                top_k_indices(&sums, *k)
            }
            ConfigSelection::AllObserved => {
                (0..dim).filter(|&i| noisy.iter().any(|row| row[i] > 0.0)).collect()
            }
        };
        let columns: Vec<Vec<f64>> = indices
            .iter()
            .map(|&i| noisy.iter().map(|row| row[i]).collect())
            .collect();
        return build_map(
            n_qubits, reference, delta, n_points, shots, factory, indices, columns,
        );
    }

    let counts: Vec<Vec<(usize, u64)>> = (0..=n_points)
        .into_par_iter()
        .map(|t| {
            let mut rng = factory.stream(StreamDomain::AnalyticNoise, t as u64, 0);
            let row = &noisy[t];
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() <= 1e-9 {
                Ok(multinomial_counts(row, shots, &mut rng))
            } else {
                // A background override can break normalization; fall back
                // to independent per-configuration binomial draws.
                let mut out = Vec::new();
                for (i, &p) in row.iter().enumerate() {
                    let dist = Binomial::new(shots, p.clamp(0.0, 1.0)).map_err(|e| {
                        MqteError::invalid(format!("binomial draw failed: {e}"))
                    })?;
                    let c = dist.sample(&mut rng);
                    if c > 0 {
                        out.push((i, c));
                    }
                }
                Ok(out)
            }
        })
        .collect::<Result<_>>()?;
    map_from_counts(
        counts, selection, n_qubits, reference, delta, n_points, shots, factory,
    )
}

/// Exact mixed-state reference for registers of at most
/// [`ORACLE_MAX_QUBITS`] qubits: evolves the density matrix through the
/// circuit reaching grid index `time_index`, applying the chosen channel
/// after every gate on each touched qubit, and returns the diagonal.
pub fn density_matrix_oracle(
    evolver: &NoisyEvolver,
    reference: &BitString,
    gamma: f64,
    time_index: usize,
    delta: f64,
    channel: ChannelKind,
) -> Result<Vec<f64>> {
    let n_qubits = evolver.n_qubits();
    if n_qubits > ORACLE_MAX_QUBITS {
        return Err(MqteError::TooLarge {
            what: "density-matrix oracle qubits",
            cap: ORACLE_MAX_QUBITS,
            got: n_qubits,
        });
    }
    if reference.n_qubits() != n_qubits {
        return Err(MqteError::invalid(format!(
            "reference on {} qubits does not match register of {}",
            reference.n_qubits(),
            n_qubits
        )));
    }
    if !(gamma.is_finite() && (0.0..=1.0).contains(&gamma)) {
        return Err(MqteError::invalid(format!(
            "noise strength gamma must lie in [0, 1], got {gamma}"
        )));
    }
    let steps = evolver.resolve_steps(delta)?;
    let dim = 1usize << n_qubits;
    let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
    let r = reference.index() as usize;
    rho[r * dim + r] = C64::new(1.0, 0.0);

    let gates;
    let repeats;
    match evolver {
        NoisyEvolver::RandomStep(c) => {
            gates = c.gates_for_steps(time_index as u64);
            repeats = 1;
        }
        NoisyEvolver::Trotter(c) => {
            gates = c.step_gates().to_vec();
            repeats = time_index * steps;
        }
    }
    for _ in 0..repeats {
        for gate in &gates {
            let u = gate_unitary(gate, n_qubits);
            rho = conjugate(&u, &rho, dim);
            for q in gate.touched_qubits() {
                apply_channel_to_density(&mut rho, n_qubits, q, gamma, channel);
            }
        }
    }
    Ok((0..dim).map(|i| rho[i * dim + i].re).collect())
}

/// Dense matrix of a gate, built by applying it to each basis state.
fn gate_unitary(gate: &StepGate, n_qubits: usize) -> Vec<C64> {
    let dim = 1usize << n_qubits;
    let mut u = vec![C64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        let bits = BitString::new(n_qubits, j as u64).expect("index below register cap");
        let mut state = QuantumState::basis_state(&bits);
        gate.apply(&mut state);
        for i in 0..dim {
            u[i * dim + j] = state.amplitudes()[i];
        }
    }
    u
}

fn pauli_unitary(n_qubits: usize, qubit: usize, axis: PauliAxis) -> Vec<C64> {
    let dim = 1usize << n_qubits;
    let mut u = vec![C64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        let bits = BitString::new(n_qubits, j as u64).expect("index below register cap");
        let mut state = QuantumState::basis_state(&bits);
        state.apply_pauli_axis(qubit, axis);
        for i in 0..dim {
            u[i * dim + j] = state.amplitudes()[i];
        }
    }
    u
}

fn mat_mul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// U ρ U†.
fn conjugate(u: &[C64], rho: &[C64], dim: usize) -> Vec<C64> {
    let t = mat_mul(u, rho, dim);
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                acc += t[i * dim + k] * u[j * dim + k].conj();
            }
            out[i * dim + j] = acc;
        }
    }
    out
}

fn apply_channel_to_density(
    rho: &mut Vec<C64>,
    n_qubits: usize,
    qubit: usize,
    gamma: f64,
    kind: ChannelKind,
) {
    let dim = 1usize << n_qubits;
    match kind {
        ChannelKind::PauliPerQubit => {
            let mut mixed = vec![C64::new(0.0, 0.0); dim * dim];
            for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
                let p = pauli_unitary(n_qubits, qubit, axis);
                let s = conjugate(&p, rho, dim);
                for (m, v) in mixed.iter_mut().zip(s) {
                    *m += v;
                }
            }
            for (r, m) in rho.iter_mut().zip(mixed) {
                *r = (1.0 - gamma) * *r + (gamma / 3.0) * m;
            }
        }
        ChannelKind::UniformReplacement => {
            let trace: C64 = (0..dim).map(|i| rho[i * dim + i]).sum();
            let fill = trace * (gamma / dim as f64);
            for v in rho.iter_mut() {
                *v *= 1.0 - gamma;
            }
            for i in 0..dim {
                rho[i * dim + i] += fill;
            }
        }
    }
}

/// Probability that no error occurs over `noise_events` channel draws:
/// (1−γ)^{N_G}.
pub fn survival_probability(gamma: f64, noise_events: u64) -> Result<f64> {
    if !(gamma.is_finite() && (0.0..=1.0).contains(&gamma)) {
        return Err(MqteError::invalid(format!(
            "noise strength gamma must lie in [0, 1], got {gamma}"
        )));
    }
    Ok((1.0 - gamma).powf(noise_events as f64))
}

/// Shots needed to keep surviving-run statistics at a fixed level:
/// ceil((1/(1−γ))^{N_G}). Grows exponentially with circuit depth.
pub fn required_shot_budget(gamma: f64, noise_events: u64) -> Result<u64> {
    if gamma >= 1.0 {
        return Err(MqteError::invalid(
            "gamma = 1 leaves no surviving runs; no shot budget suffices".to_string(),
        ));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(MqteError::invalid(format!(
            "shot budget needs 0 < gamma < 1, got {gamma}"
        )));
    }
    let raw = (1.0 / (1.0 - gamma)).powf(noise_events as f64);
    if !raw.is_finite() || raw >= u64::MAX as f64 {
        return Err(MqteError::invalid(format!(
            "required shot budget for gamma={gamma}, N_G={noise_events} overflows a 64-bit count"
        )));
    }
    Ok(raw.ceil() as u64)
}

/// Largest circuit depth (channel-draw count) a shot budget tolerates:
/// round(ln M / −ln(1−γ)), the inversion of [`required_shot_budget`].
pub fn max_tolerable_depth(gamma: f64, budget: u64) -> Result<u64> {
    if !(gamma.is_finite() && gamma > 0.0 && gamma < 1.0) {
        return Err(MqteError::invalid(format!(
            "depth budget needs 0 < gamma < 1, got {gamma}"
        )));
    }
    if budget == 0 {
        return Err(MqteError::invalid(
            "shot budget must be ≥ 1".to_string(),
        ));
    }
    Ok(((budget as f64).ln() / -(1.0 - gamma).ln()).round() as u64)
}
