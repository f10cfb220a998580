//! Seeded random step circuits with a known gap structure.
//!
//! A step unitary U = W · D · W†, where W is `depth` alternating layers of
//! random single-qubit rotations and CZ entanglers on a linear coupling,
//! and the core D is one layer of per-qubit Z rotations. Because D is
//! diagonal, U commutes with itself across steps: n applications equal one
//! circuit with the core angles scaled by n, so the circuit for any grid
//! time has the same gate count as a single step. The eigenphases of U are
//! known in closed form, giving noise studies on these circuits an exact
//! reference that generic random circuits lack.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;

use crate::error::{MqteError, Result};
use crate::evolution::StepGate;
use crate::rng::{RngFactory, StreamDomain};
use crate::state::{BitString, PauliAxis, QuantumState, MAX_QUBITS};

/// Gap-merge tolerance on folded step angles, radians.
const PHASE_MERGE_TOL: f64 = 1e-9;

/// One step unitary built from seeded random layers.
#[derive(Debug, Clone)]
pub struct RandomStepCircuit {
    n_qubits: usize,
    depth: usize,
    seed: u64,
    /// W: per layer, one (axis, angle) rotation per qubit, then CZ on the
    /// linear coupling.
    w_layers: Vec<Vec<(PauliAxis, f64)>>,
    /// Core Z-rotation angle per qubit, advanced by one step; ∈ [0, 2π).
    core_angles: Vec<f64>,
}

/// One entry of the circuit's line table: a folded step-angle gap mapped
/// to energy, with the cosine-projected weight the mirrored DFT sees.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EffectiveLine {
    pub gap: f64,
    pub weight: f64,
}

/// Archivable gate description.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateDescription {
    Rotation { qubit: usize, axis: PauliAxis, angle: f64 },
    ControlledZ { a: usize, b: usize },
}

/// Deterministic random step circuit.
pub fn generate_random_step(n_qubits: usize, depth: usize, seed: u64) -> Result<RandomStepCircuit> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(MqteError::invalid(format!(
            "random step circuit needs 1..={MAX_QUBITS} qubits, got {n_qubits}"
        )));
    }
    if depth == 0 {
        return Err(MqteError::invalid("circuit depth must be ≥ 1".to_string()));
    }
    let mut rng = RngFactory::new(seed).stream(StreamDomain::CircuitBuild, 0, 0);
    let two_pi = 2.0 * std::f64::consts::PI;
    let w_layers = (0..depth)
        .map(|_| {
            (0..n_qubits)
                .map(|_| {
                    let axis = match rng.gen_range(0u8..3) {
                        0 => PauliAxis::X,
                        1 => PauliAxis::Y,
                        _ => PauliAxis::Z,
                    };
                    (axis, rng.gen::<f64>() * two_pi)
                })
                .collect()
        })
        .collect();
    let core_angles = (0..n_qubits).map(|_| rng.gen::<f64>() * two_pi).collect();
    Ok(RandomStepCircuit {
        n_qubits,
        depth,
        seed,
        w_layers,
        core_angles,
    })
}

impl RandomStepCircuit {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Linear-chain CZ coupling (q, q+1).
    pub fn coupling(&self) -> Vec<(usize, usize)> {
        (0..self.n_qubits.saturating_sub(1))
            .map(|q| (q, q + 1))
            .collect()
    }

    fn push_w(&self, gates: &mut Vec<StepGate>) {
        for layer in &self.w_layers {
            for (q, &(axis, angle)) in layer.iter().enumerate() {
                gates.push(rotation_gate(q, axis, angle));
            }
            for (a, b) in self.coupling() {
                gates.push(cz_gate(a, b));
            }
        }
    }

    fn push_w_dagger(&self, gates: &mut Vec<StepGate>) {
        for layer in self.w_layers.iter().rev() {
            for (a, b) in self.coupling().into_iter().rev() {
                gates.push(cz_gate(a, b));
            }
            for (q, &(axis, angle)) in layer.iter().enumerate().rev() {
                gates.push(rotation_gate(q, axis, -angle));
            }
        }
    }

    /// Gate list advancing a state by `multiple` grid steps. The count is
    /// independent of `multiple`; only the core angles scale.
    pub fn gates_for_steps(&self, multiple: u64) -> Vec<StepGate> {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut gates = Vec::with_capacity(self.gate_count_per_step());
        // Time order W†, D, W makes the composed operator W·D·W†.
        self.push_w_dagger(&mut gates);
        for (q, &theta) in self.core_angles.iter().enumerate() {
            let scaled = (multiple as f64 * theta).rem_euclid(two_pi);
            gates.push(rotation_gate(q, PauliAxis::Z, scaled));
        }
        self.push_w(&mut gates);
        gates
    }

    /// The single-step gate list.
    pub fn step_gates(&self) -> Vec<StepGate> {
        self.gates_for_steps(1)
    }

    /// Apply U^n directly (clean evolution to grid index n).
    pub fn apply_steps(&self, state: &mut QuantumState, multiple: u64) {
        for gate in self.gates_for_steps(multiple) {
            gate.apply(state);
        }
    }

    /// Gates in one step: (2·depth+1)·n rotations + 2·depth·(n−1) CZ.
    pub fn gate_count_per_step(&self) -> usize {
        let n = self.n_qubits;
        (2 * self.depth + 1) * n + 2 * self.depth * n.saturating_sub(1)
    }

    /// Single-qubit error-channel draws per step: one per rotation, two
    /// per CZ.
    pub fn noise_events_per_step(&self) -> u64 {
        let n = self.n_qubits as u64;
        let d = self.depth as u64;
        (2 * d + 1) * n + 4 * d * (n - 1)
    }

    /// Step eigenphase φ(b) of the eigenvector W|b⟩: U·W|b⟩ = e^{−iφ}·W|b⟩.
    pub fn eigenphase(&self, basis_index: usize) -> f64 {
        let mut phi = 0.0;
        for (q, &theta) in self.core_angles.iter().enumerate() {
            let bit = (basis_index >> (self.n_qubits - 1 - q)) & 1;
            phi += (1.0 - 2.0 * bit as f64) * theta / 2.0;
        }
        phi
    }

    pub fn eigenphases(&self) -> Vec<f64> {
        (0..1usize << self.n_qubits)
            .map(|b| self.eigenphase(b))
            .collect()
    }

    /// Line table of the measured signal p_ij(n) for reference j and
    /// monitored configuration i: folded gaps with the cosine-projected
    /// weights of Σ_b ⟨i|W|b⟩⟨b|W†|j⟩ e^{−inφ_b}. Gaps within 1e-9 of each
    /// other (in step angle) merge; |weight| < `weight_floor` dropped.
    pub fn effective_lines(
        &self,
        reference: &BitString,
        config: &BitString,
        delta: f64,
        weight_floor: f64,
    ) -> Result<Vec<EffectiveLine>> {
        if reference.n_qubits() != self.n_qubits || config.n_qubits() != self.n_qubits {
            return Err(MqteError::invalid(
                "reference/config register width does not match circuit".to_string(),
            ));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(MqteError::invalid(format!(
                "sample spacing must be positive, got {delta}"
            )));
        }
        let dim = 1usize << self.n_qubits;
        // α = W†|i⟩ and β = W†|j⟩ give the line coefficients
        // A_b = conj(α_b)·β_b.
        let alpha = self.w_dagger_applied(config);
        let beta = self.w_dagger_applied(reference);
        let coeff: Vec<C64> = (0..dim)
            .map(|b| alpha.amplitudes()[b].conj() * beta.amplitudes()[b])
            .collect();

        let two_pi = 2.0 * std::f64::consts::PI;
        let mut lines: Vec<(f64, f64)> = Vec::new();
        for b in 0..dim {
            for b2 in 0..b {
                let theta = (self.eigenphase(b) - self.eigenphase(b2)).rem_euclid(two_pi);
                let folded = theta.min(two_pi - theta);
                if folded <= PHASE_MERGE_TOL {
                    continue;
                }
                // The mirrored even extension keeps only the cosine part
                // of the complex pair weight.
                let weight = 2.0 * (coeff[b] * coeff[b2].conj()).re;
                lines.push((folded, weight));
            }
        }
        lines.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<EffectiveLine> = Vec::new();
        for (folded, weight) in lines {
            match merged.last_mut() {
                Some(last) if (last.gap * delta - folded).abs() <= PHASE_MERGE_TOL => {
                    last.weight += weight;
                }
                _ => merged.push(EffectiveLine {
                    gap: folded / delta,
                    weight,
                }),
            }
        }
        merged.retain(|l| l.weight.abs() >= weight_floor);
        Ok(merged)
    }

    fn w_dagger_applied(&self, bits: &BitString) -> QuantumState {
        let mut gates = Vec::new();
        self.push_w_dagger(&mut gates);
        let mut state = QuantumState::basis_state(bits);
        for gate in gates {
            gate.apply(&mut state);
        }
        state
    }

    /// Archivable single-step gate list.
    pub fn describe_step(&self) -> Vec<GateDescription> {
        self.gates_for_steps(1)
            .iter()
            .map(|g| match g {
                StepGate::TermRotation { factors, theta } => {
                    let (qubit, axis) = factors[0];
                    GateDescription::Rotation {
                        qubit,
                        axis,
                        angle: 2.0 * theta,
                    }
                }
                StepGate::Bond { q1, q2, .. } => GateDescription::ControlledZ { a: *q1, b: *q2 },
            })
            .collect()
    }
}

fn rotation_gate(qubit: usize, axis: PauliAxis, angle: f64) -> StepGate {
    // R_a(angle) = e^{−i·angle·P_a/2}.
    StepGate::TermRotation {
        factors: vec![(qubit, axis)],
        theta: angle / 2.0,
    }
}

fn cz_gate(a: usize, b: usize) -> StepGate {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut m = [[zero; 4]; 4];
    m[0][0] = one;
    m[1][1] = one;
    m[2][2] = one;
    m[3][3] = -one;
    StepGate::Bond {
        q1: a,
        q2: b,
        matrix: Box::new(m),
    }
}
