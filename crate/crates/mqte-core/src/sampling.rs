//! Time-resolved measurement signals.
//!
//! For a reference state evolved over the uniform grid t = nΔ, produce the
//! probability of finding each monitored basis configuration: exact values
//! when shots = 0, or empirical estimates from M projective-measurement
//! shots per time point. Shot draws come from per-time-point counter-based
//! streams, so sampled signals are identical under any parallel schedule.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{MqteError, Result};
use crate::evolution::{evolve_exact, TrotterCircuit};
use crate::exact::Eigensystem;
use crate::rng::{RngFactory, StreamDomain};
use crate::state::{BitString, QuantumState, C64};

/// Default number of automatically reported configurations.
pub const DEFAULT_TOP_K: usize = 8;

/// Relative tolerance for the Δ/τ integrality check in Trotter mode.
const STEP_RATIO_TOL: f64 = 1e-9;

/// One configuration's probability series p(n), n = 0..N, at spacing Δ.
/// The even extension p(−n) = p(n) is implicit; consumers index n ≥ 0.
#[derive(Debug, Clone)]
pub struct SignalSeries {
    /// Monitored configuration |φ_i⟩.
    pub config: BitString,
    /// Initial reference |φ_j⟩.
    pub reference: BitString,
    pub delta: f64,
    /// Grid extent N; `values` has N + 1 entries.
    pub n_points: usize,
    pub values: Vec<f64>,
    /// Shots per time point; 0 denotes exact probabilities.
    pub shots: u64,
    /// Experiment seed the shot streams were derived from.
    pub seed: u64,
}

impl SignalSeries {
    /// Value at signed index n, reading the even extension for n < 0.
    pub fn at(&self, n: i64) -> f64 {
        self.values[n.unsigned_abs() as usize]
    }
}

/// Signals keyed by configuration, ordered by basis index.
pub type SignalMap = BTreeMap<BitString, SignalSeries>;

/// Which configurations get a materialized series.
#[derive(Debug, Clone)]
pub enum ConfigSelection {
    /// Exactly these configurations (zero series if never observed).
    Listed(Vec<BitString>),
    /// The k configurations with the largest time-averaged probability.
    TopK(usize),
    /// Every configuration with nonzero probability anywhere on the grid
    /// (in sampled mode: every configuration observed at least once).
    AllObserved,
}

impl Default for ConfigSelection {
    fn default() -> Self {
        ConfigSelection::TopK(DEFAULT_TOP_K)
    }
}

/// Propagator used to produce the state at each grid time.
pub enum Evolver<'a> {
    /// Spectral-decomposition evolution; time points are independent.
    Exact(&'a Eigensystem),
    /// Repeated symmetric Trotter steps; the state streams across the grid.
    Trotter(&'a TrotterCircuit),
}

impl Evolver<'_> {
    pub fn n_qubits(&self) -> usize {
        match self {
            Evolver::Exact(eig) => eig.n_qubits(),
            Evolver::Trotter(c) => c.n_qubits(),
        }
    }
}

/// Binomial variance p(1−p)/M of a single sampled probability.
pub fn sampling_variance(p: f64, shots: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MqteError::invalid(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    if shots == 0 {
        return Err(MqteError::invalid(
            "sampling variance needs at least one shot".to_string(),
        ));
    }
    Ok(p * (1.0 - p) / shots as f64)
}

/// Number of Trotter steps per sample spacing, requiring Δ = k·τ.
pub fn steps_per_sample(circuit: &TrotterCircuit, delta: f64) -> Result<usize> {
    let ratio = delta / circuit.tau();
    let rounded = ratio.round();
    if rounded < 1.0 || (ratio - rounded).abs() > STEP_RATIO_TOL * ratio.max(1.0) {
        return Err(MqteError::invalid(format!(
            "sample spacing {} is not an integer multiple of step size {}",
            delta,
            circuit.tau()
        )));
    }
    Ok(rounded as usize)
}

/// Measure p_ij(n) for n = 0..N.
///
/// Exact mode (shots = 0) records |⟨φ_i|ψ(nΔ)⟩|² for each selected
/// configuration. Sampled mode draws `shots` basis indices per time point
/// from the state's distribution (one multinomial draw set shared by all
/// configurations) and records count/M. Deterministic in `factory`'s seed.
pub fn measure_signal(
    evolver: &Evolver,
    reference: &BitString,
    selection: &ConfigSelection,
    n_points: usize,
    delta: f64,
    shots: u64,
    factory: &RngFactory,
) -> Result<SignalMap> {
    validate_grid(n_points, delta)?;
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

    let dim = 1usize << n_qubits;
    let initial = QuantumState::basis_state(reference);

    if shots == 0 {
        let indices = match selection {
            ConfigSelection::Listed(configs) => {
                configs.iter().map(|c| c.index() as usize).collect()
            }
            ConfigSelection::TopK(k) => {
                let sums = probability_sums(evolver, &initial, n_points, delta)?;
                top_k_indices(&sums, *k)
            }
            ConfigSelection::AllObserved => {
                let sums = probability_sums(evolver, &initial, n_points, delta)?;
                (0..dim).filter(|&i| sums[i] > 0.0).collect()
            }
        };
        let columns = probability_columns(evolver, &initial, n_points, delta, &indices)?;
        build_map(
            n_qubits, reference, delta, n_points, shots, factory, indices, columns,
        )
    } else {
        let counts = sampled_counts(evolver, &initial, n_points, delta, shots, factory)?;
        map_from_counts(
            counts, selection, n_qubits, reference, delta, n_points, shots, factory,
        )
    }
}

/// Assemble a signal map from per-time-point sparse shot counts.
#[allow(clippy::too_many_arguments)]
pub(crate) fn map_from_counts(
    counts: Vec<Vec<(usize, u64)>>,
    selection: &ConfigSelection,
    n_qubits: usize,
    reference: &BitString,
    delta: f64,
    n_points: usize,
    shots: u64,
    factory: &RngFactory,
) -> Result<SignalMap> {
    let dim = 1usize << n_qubits;
    let mut observed: Vec<usize> = Vec::new();
    let mut seen = vec![false; dim];
    for per_point in &counts {
        for &(idx, _) in per_point {
            if !seen[idx] {
                seen[idx] = true;
                observed.push(idx);
            }
        }
    }
    observed.sort_unstable();

    let mut series: BTreeMap<usize, Vec<f64>> = observed
        .iter()
        .map(|&i| (i, vec![0.0; n_points + 1]))
        .collect();
    let inv_m = 1.0 / shots as f64;
    for (n, per_point) in counts.iter().enumerate() {
        for &(idx, count) in per_point {
            series.get_mut(&idx).expect("observed index")[n] = count as f64 * inv_m;
        }
    }

    let indices: Vec<usize> = match selection {
        ConfigSelection::Listed(configs) => configs.iter().map(|c| c.index() as usize).collect(),
        ConfigSelection::TopK(k) => {
            let mut sums = vec![0.0; dim];
            for (&i, vals) in &series {
                sums[i] = vals.iter().sum();
            }
            top_k_indices(&sums, *k)
        }
        ConfigSelection::AllObserved => observed,
    };
    let columns: Vec<Vec<f64>> = indices
        .iter()
        .map(|i| {
            series
                .get(i)
                .cloned()
                .unwrap_or_else(|| vec![0.0; n_points + 1])
        })
        .collect();
    build_map(
        n_qubits, reference, delta, n_points, shots, factory, indices, columns,
    )
}

pub(crate) fn validate_grid(n_points: usize, delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(MqteError::invalid(format!(
            "sample spacing must be positive and finite, got {delta}"
        )));
    }
    if n_points == 0 {
        return Err(MqteError::invalid(
            "grid needs at least one nonzero time point".to_string(),
        ));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn build_map(
    n_qubits: usize,
    reference: &BitString,
    delta: f64,
    n_points: usize,
    shots: u64,
    factory: &RngFactory,
    indices: Vec<usize>,
    columns: Vec<Vec<f64>>,
) -> Result<SignalMap> {
    let mut map = SignalMap::new();
    for (idx, values) in indices.into_iter().zip(columns) {
        let config = BitString::new(n_qubits, idx as u64)?;
        map.insert(
            config.clone(),
            SignalSeries {
                config,
                reference: reference.clone(),
                delta,
                n_points,
                values,
                shots,
                seed: factory.seed(),
            },
        );
    }
    Ok(map)
}

/// Per-configuration probability summed over the grid (selection pass).
fn probability_sums(
    evolver: &Evolver,
    initial: &QuantumState,
    n_points: usize,
    delta: f64,
) -> Result<Vec<f64>> {
    let dim = initial.dim();
    match evolver {
        Evolver::Exact(eig) => (0..=n_points)
            .into_par_iter()
            .try_fold(
                || vec![0.0; dim],
                |mut acc, n| {
                    let state = evolve_exact(initial, eig, n as f64 * delta)?;
                    for (a, amp) in acc.iter_mut().zip(state.amplitudes()) {
                        *a += amp.norm_sqr();
                    }
                    Ok(acc)
                },
            )
            .try_reduce(
                || vec![0.0; dim],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    Ok(a)
                },
            ),
        Evolver::Trotter(circuit) => {
            let steps = steps_per_sample(circuit, delta)?;
            let mut sums = vec![0.0; dim];
            let mut state = initial.clone();
            for n in 0..=n_points {
                if n > 0 {
                    for _ in 0..steps {
                        circuit.apply_step(&mut state);
                    }
                }
                for (a, amp) in sums.iter_mut().zip(state.amplitudes()) {
                    *a += amp.norm_sqr();
                }
            }
            Ok(sums)
        }
    }
}

/// Probability series for the given basis indices: columns[c][n].
fn probability_columns(
    evolver: &Evolver,
    initial: &QuantumState,
    n_points: usize,
    delta: f64,
    indices: &[usize],
) -> Result<Vec<Vec<f64>>> {
    match evolver {
        Evolver::Exact(eig) => {
            // Project once, then evaluate only the monitored rows: per
            // point this costs dim per index instead of the dim^2 of a
            // full reassembled state.
            let projection = eig.project(initial);
            let energies = eig.energies();
            let basis_rows: Vec<Vec<f64>> = indices.iter().map(|&i| eig.basis_row(i)).collect();
            let rows: Vec<Vec<f64>> = (0..=n_points)
                .into_par_iter()
                .map(|n| {
                    let t = n as f64 * delta;
                    let phased: Vec<C64> = projection
                        .iter()
                        .zip(energies)
                        .map(|(c, e)| c * C64::from_polar(1.0, -e * t))
                        .collect();
                    basis_rows
                        .iter()
                        .map(|row| {
                            row.iter()
                                .zip(&phased)
                                .map(|(v, a)| v * a)
                                .sum::<C64>()
                                .norm_sqr()
                        })
                        .collect()
                })
                .collect();
            Ok(transpose(rows, indices.len(), n_points + 1))
        }
        Evolver::Trotter(circuit) => {
            let steps = steps_per_sample(circuit, delta)?;
            let mut columns = vec![vec![0.0; n_points + 1]; indices.len()];
            let mut state = initial.clone();
            for n in 0..=n_points {
                if n > 0 {
                    for _ in 0..steps {
                        circuit.apply_step(&mut state);
                    }
                }
                for (c, &i) in indices.iter().enumerate() {
                    columns[c][n] = state.amplitudes()[i].norm_sqr();
                }
            }
            Ok(columns)
        }
    }
}

fn transpose(rows: Vec<Vec<f64>>, width: usize, height: usize) -> Vec<Vec<f64>> {
    let mut columns = vec![vec![0.0; height]; width];
    for (n, row) in rows.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            columns[c][n] = v;
        }
    }
    columns
}

/// Sparse shot counts per time point: counts[n] = [(basis index, count)].
fn sampled_counts(
    evolver: &Evolver,
    initial: &QuantumState,
    n_points: usize,
    delta: f64,
    shots: u64,
    factory: &RngFactory,
) -> Result<Vec<Vec<(usize, u64)>>> {
    match evolver {
        Evolver::Exact(eig) => (0..=n_points)
            .into_par_iter()
            .map(|n| {
                let state = evolve_exact(initial, eig, n as f64 * delta)?;
                Ok(draw_shots(&state.probabilities(), shots, factory, n))
            })
            .collect(),
        Evolver::Trotter(circuit) => {
            let steps = steps_per_sample(circuit, delta)?;
            let mut out = Vec::with_capacity(n_points + 1);
            let mut state = initial.clone();
            for n in 0..=n_points {
                if n > 0 {
                    for _ in 0..steps {
                        circuit.apply_step(&mut state);
                    }
                }
                out.push(draw_shots(&state.probabilities(), shots, factory, n));
            }
            Ok(out)
        }
    }
}

/// Draw `shots` basis indices from one time point's distribution.
pub(crate) fn draw_shots(
    probabilities: &[f64],
    shots: u64,
    factory: &RngFactory,
    time_index: usize,
) -> Vec<(usize, u64)> {
    let mut rng = factory.stream(StreamDomain::Measurement, time_index as u64, 0);
    multinomial_counts(probabilities, shots, &mut rng)
}

/// Multinomial draw by CDF inversion; returns sparse (index, count) pairs
/// sorted by index. Counts sum to `shots` exactly.
pub(crate) fn multinomial_counts(
    probabilities: &[f64],
    shots: u64,
    rng: &mut impl rand::Rng,
) -> Vec<(usize, u64)> {
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in probabilities {
        acc += p;
        cdf.push(acc);
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

pub(crate) fn top_k_indices(sums: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sums.len()).collect();
    // Ties broken by ascending basis index for determinism.
    order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::build_trotter_circuit;
    use crate::exact::diagonalize;
    use crate::hamiltonian::Hamiltonian;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn two_site() -> Eigensystem {
        diagonalize(&Hamiltonian::heisenberg_1d(2, 1.0, 2.0).unwrap()).unwrap()
    }

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn two_site_return_and_cross_signals_match_closed_form() {
        let eig = two_site();
        let map = measure_signal(
            &Evolver::Exact(&eig),
            &bits("01"),
            &ConfigSelection::Listed(vec![bits("01"), bits("10")]),
            100,
            0.1,
            0,
            &RngFactory::new(7),
        )
        .unwrap();
        let ret = &map[&bits("01")];
        let cross = &map[&bits("10")];
        for n in 0..=100 {
            let c = (4.0 * n as f64 * 0.1).cos();
            assert_abs_diff_eq!(ret.values[n], (1.0 + c) / 2.0, epsilon = 1e-9);
            assert_abs_diff_eq!(cross.values[n], (1.0 - c) / 2.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(ret.values[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_mode_series_sum_to_one_at_every_point() {
        let eig = diagonalize(&Hamiltonian::heisenberg_1d(3, 1.0, 2.0).unwrap()).unwrap();
        let map = measure_signal(
            &Evolver::Exact(&eig),
            &bits("010"),
            &ConfigSelection::AllObserved,
            40,
            0.2,
            0,
            &RngFactory::new(7),
        )
        .unwrap();
        for n in 0..=40 {
            let total: f64 = map.values().map(|s| s.values[n]).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn single_shot_signals_are_one_hot() {
        let eig = two_site();
        let map = measure_signal(
            &Evolver::Exact(&eig),
            &bits("01"),
            &ConfigSelection::AllObserved,
            30,
            0.1,
            1,
            &RngFactory::new(3),
        )
        .unwrap();
        for n in 0..=30 {
            let total: f64 = map.values().map(|s| s.values[n]).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            let ones = map.values().filter(|s| s.values[n] == 1.0).count();
            assert_eq!(ones, 1);
        }
    }

    #[test]
    fn sampled_values_are_count_ratios_conserving_shots() {
        let eig = two_site();
        let shots = 7u64;
        let map = measure_signal(
            &Evolver::Exact(&eig),
            &bits("01"),
            &ConfigSelection::AllObserved,
            50,
            0.1,
            shots,
            &RngFactory::new(11),
        )
        .unwrap();
        for n in 0..=50 {
            let mut total = 0.0;
            for s in map.values() {
                let scaled = s.values[n] * shots as f64;
                assert_abs_diff_eq!(scaled, scaled.round(), epsilon = 1e-9);
                assert!((0.0..=1.0).contains(&s.values[n]));
                total += s.values[n];
            }
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampled_mean_over_seeds_is_unbiased() {
        let eig = two_site();
        let reference = bits("01");
        let exact = measure_signal(
            &Evolver::Exact(&eig),
            &reference,
            &ConfigSelection::Listed(vec![reference.clone()]),
            20,
            0.1,
            0,
            &RngFactory::new(0),
        )
        .unwrap();
        let truth = &exact[&reference].values;

        let runs = 100usize;
        let shots = 100u64;
        let mut mean = vec![0.0; 21];
        for seed in 0..runs {
            let map = measure_signal(
                &Evolver::Exact(&eig),
                &reference,
                &ConfigSelection::Listed(vec![reference.clone()]),
                20,
                0.1,
                shots,
                &RngFactory::new(1000 + seed as u64),
            )
            .unwrap();
            for (m, v) in mean.iter_mut().zip(&map[&reference].values) {
                *m += v / runs as f64;
            }
        }
        let tol = 5.0 / ((runs as f64) * (shots as f64)).sqrt();
        for n in 0..=20 {
            assert!(
                (mean[n] - truth[n]).abs() < tol,
                "bias {} at n={n} exceeds {tol}",
                (mean[n] - truth[n]).abs()
            );
        }
    }

    #[test]
    fn sampled_variance_tracks_binomial_law() {
        let eig = two_site();
        let reference = bits("01");
        // n = 4: p = (1 + cos(1.6))/2 ≈ 0.485, comfortably mid-range.
        let n_probe = 4usize;
        let p = (1.0 + (4.0 * n_probe as f64 * 0.1).cos()) / 2.0;
        let shots = 64u64;
        let runs = 300usize;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for seed in 0..runs {
            let map = measure_signal(
                &Evolver::Exact(&eig),
                &reference,
                &ConfigSelection::Listed(vec![reference.clone()]),
                n_probe,
                0.1,
                shots,
                &RngFactory::new(5000 + seed as u64),
            )
            .unwrap();
            let v = map[&reference].values[n_probe];
            acc += v;
            acc2 += v * v;
        }
        let mean = acc / runs as f64;
        let var = acc2 / runs as f64 - mean * mean;
        let expected = sampling_variance(p, shots).unwrap();
        assert!(
            var > 0.5 * expected && var < 2.0 * expected,
            "variance {var} outside [0.5, 2]×{expected}"
        );
    }

    #[test]
    fn sampling_is_deterministic_in_seed() {
        let eig = two_site();
        let run = || {
            measure_signal(
                &Evolver::Exact(&eig),
                &bits("01"),
                &ConfigSelection::AllObserved,
                60,
                0.1,
                25,
                &RngFactory::new(99),
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.values().zip(b.values()) {
            assert_eq!(x.values, y.values);
        }
    }

    #[test]
    fn trotter_mode_rejects_non_integral_spacing() {
        let h = Hamiltonian::heisenberg_1d(2, 1.0, 2.0).unwrap();
        let circuit = build_trotter_circuit(&h, 0.03).unwrap();
        let err = measure_signal(
            &Evolver::Trotter(&circuit),
            &bits("01"),
            &ConfigSelection::AllObserved,
            10,
            0.1,
            0,
            &RngFactory::new(0),
        )
        .unwrap_err();
        assert!(err.to_string().contains("integer multiple"));
    }

    #[test]
    fn trotter_signal_approaches_exact_signal() {
        let h = Hamiltonian::heisenberg_1d(3, 1.0, 2.0).unwrap();
        let eig = diagonalize(&h).unwrap();
        let circuit = build_trotter_circuit(&h, 0.005).unwrap();
        let reference = bits("010");
        let sel = ConfigSelection::Listed(vec![reference.clone()]);
        let exact = measure_signal(
            &Evolver::Exact(&eig),
            &reference,
            &sel,
            20,
            0.1,
            0,
            &RngFactory::new(0),
        )
        .unwrap();
        let trotter = measure_signal(
            &Evolver::Trotter(&circuit),
            &reference,
            &sel,
            20,
            0.1,
            0,
            &RngFactory::new(0),
        )
        .unwrap();
        for n in 0..=20 {
            assert_abs_diff_eq!(
                exact[&reference].values[n],
                trotter[&reference].values[n],
                epsilon = 1e-3
            );
        }
    }

    #[test]
    fn top_k_keeps_largest_average_series() {
        let eig = two_site();
        let all = measure_signal(
            &Evolver::Exact(&eig),
            &bits("01"),
            &ConfigSelection::AllObserved,
            100,
            0.1,
            0,
            &RngFactory::new(0),
        )
        .unwrap();
        let best = all
            .iter()
            .max_by(|a, b| {
                let sa: f64 = a.1.values.iter().sum();
                let sb: f64 = b.1.values.iter().sum();
                sa.total_cmp(&sb)
            })
            .map(|(c, _)| c.clone())
            .unwrap();
        let top = measure_signal(
            &Evolver::Exact(&eig),
            &bits("01"),
            &ConfigSelection::TopK(1),
            100,
            0.1,
            0,
            &RngFactory::new(0),
        )
        .unwrap();
        assert_eq!(top.len(), 1);
        assert!(top.contains_key(&best));
    }

    #[test]
    fn listed_selection_validates_register_width() {
        let eig = two_site();
        let err = measure_signal(
            &Evolver::Exact(&eig),
            &bits("01"),
            &ConfigSelection::Listed(vec![bits("011")]),
            10,
            0.1,
            0,
            &RngFactory::new(0),
        )
        .unwrap_err();
        assert!(err.to_string().contains("does not match register"));
    }

    #[test]
    fn variance_formula_frozen_values() {
        assert_abs_diff_eq!(sampling_variance(0.2, 100).unwrap(), 0.0016, epsilon = 1e-18);
        assert_eq!(sampling_variance(0.5, 25).unwrap(), 0.01);
        assert_eq!(sampling_variance(0.0, 10).unwrap(), 0.0);
        assert_eq!(sampling_variance(1.0, 10).unwrap(), 0.0);
        assert!(sampling_variance(1.5, 10).is_err());
        assert!(sampling_variance(0.5, 0).is_err());
    }

    proptest! {
        #[test]
        fn sampled_signals_stay_valid(seed in 0u64..500, shots in 1u64..40) {
            let eig = two_site();
            let map = measure_signal(
                &Evolver::Exact(&eig),
                &bits("01"),
                &ConfigSelection::AllObserved,
                12,
                0.1,
                shots,
                &RngFactory::new(seed),
            ).unwrap();
            for s in map.values() {
                for &v in &s.values {
                    prop_assert!((0.0..=1.0).contains(&v));
                    let scaled = v * shots as f64;
                    prop_assert!((scaled - scaled.round()).abs() < 1e-9);
                }
            }
        }
    }
}
