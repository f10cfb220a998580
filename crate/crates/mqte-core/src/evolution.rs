//! Time evolution: symmetric (Strang) Trotter circuits and the exact
//! eigendecomposition path.
//!
//! Heisenberg bonds commute within one bond, so each bond contributes a
//! single exact 4x4 exponential per appearance; the second-order structure
//! comes from splitting between non-commuting bond groups (even/odd on
//! chains; horizontal-even/horizontal-odd/vertical-even/vertical-odd on
//! grids). Custom term lists fall back to per-term Pauli rotations arranged
//! in the same half-forward / full / half-backward pattern.

use num_complex::Complex64;

use crate::error::{MqteError, Result};
use crate::exact::Eigensystem;
use crate::hamiltonian::{Geometry, Hamiltonian};
use crate::state::{PauliAxis, QuantumState, C64};

/// One gate of a Trotter step. A bond exponential counts as one gate; so
/// does one Pauli-term rotation.
#[derive(Debug, Clone)]
pub enum StepGate {
    Bond {
        q1: usize,
        q2: usize,
        matrix: Box<[[C64; 4]; 4]>,
    },
    TermRotation {
        factors: Vec<(usize, PauliAxis)>,
        theta: f64,
    },
}

impl StepGate {
    pub fn apply(&self, state: &mut QuantumState) {
        match self {
            StepGate::Bond { q1, q2, matrix } => state.apply_two_qubit(*q1, *q2, matrix),
            StepGate::TermRotation { factors, theta } => {
                state.apply_pauli_rotation(factors, *theta)
            }
        }
    }

    /// Qubits the gate touches, for per-qubit noise attachment.
    pub fn touched_qubits(&self) -> Vec<usize> {
        match self {
            StepGate::Bond { q1, q2, .. } => vec![*q1, *q2],
            StepGate::TermRotation { factors, .. } => {
                factors.iter().map(|&(q, _)| q).collect()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrotterCircuit {
    n_qubits: usize,
    tau: f64,
    step_gates: Vec<StepGate>,
}

impl TrotterCircuit {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn step_gates(&self) -> &[StepGate] {
        &self.step_gates
    }

    pub fn gates_per_step(&self) -> usize {
        self.step_gates.len()
    }

    /// Advances the state by one step (time tau).
    pub fn apply_step(&self, state: &mut QuantumState) {
        for g in &self.step_gates {
            g.apply(state);
        }
    }
}

/// Builds the per-step gate sequence for `exp(-i H tau)` with second-order
/// symmetric splitting.
pub fn build_trotter_circuit(h: &Hamiltonian, tau: f64) -> Result<TrotterCircuit> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(MqteError::invalid(format!("step size tau={tau} must be positive")));
    }

    let groups = bond_groups(h);
    let step_gates = if !groups.is_empty() {
        symmetric_sequence(&groups, tau, |&(bond, xx, yy, zz), dt| StepGate::Bond {
            q1: bond.0,
            q2: bond.1,
            matrix: Box::new(bond_exponential(xx, yy, zz, dt)),
        })
    } else {
        // Custom models: one group per term, applied as exact Pauli
        // rotations exp(-i coeff dt P).
        let term_groups: Vec<Vec<&crate::state::PauliString>> =
            h.terms().iter().map(|t| vec![t]).collect();
        symmetric_sequence(&term_groups, tau, |t, dt| StepGate::TermRotation {
            factors: t.factors().to_vec(),
            theta: t.coeff * dt,
        })
    };

    Ok(TrotterCircuit {
        n_qubits: h.n_qubits(),
        tau,
        step_gates,
    })
}

/// Groups bonds so members of one group act on disjoint qubits.
fn bond_groups(h: &Hamiltonian) -> Vec<Vec<(crate::hamiltonian::Bond, f64, f64, f64)>> {
    match *h.geometry() {
        Geometry::Chain { .. } => {
            let mut even = Vec::new();
            let mut odd = Vec::new();
            for &(bond, xx, yy, zz) in h.bonds() {
                if bond.0 % 2 == 0 {
                    even.push((bond, xx, yy, zz));
                } else {
                    odd.push((bond, xx, yy, zz));
                }
            }
            [even, odd].into_iter().filter(|g| !g.is_empty()).collect()
        }
        Geometry::Grid { cols, .. } => {
            // Horizontal bonds keyed by column parity of the left site,
            // vertical bonds by row parity of the upper site.
            let mut groups: [Vec<(crate::hamiltonian::Bond, f64, f64, f64)>; 4] =
                Default::default();
            for &(bond, xx, yy, zz) in h.bonds() {
                let (a, b) = bond;
                let horizontal = b == a + 1 && b % cols != 0;
                let slot = if horizontal {
                    (a % cols) % 2
                } else {
                    2 + (a / cols) % 2
                };
                groups[slot].push((bond, xx, yy, zz));
            }
            groups.into_iter().filter(|g| !g.is_empty()).collect()
        }
        Geometry::Custom => Vec::new(),
    }
}

/// Half-steps for all groups but the last, full step for the last, then the
/// halves replayed in reverse. One group degenerates to a single full step.
fn symmetric_sequence<T, F>(groups: &[Vec<T>], tau: f64, mut make: F) -> Vec<StepGate>
where
    F: FnMut(&T, f64) -> StepGate,
{
    let m = groups.len();
    let mut gates = Vec::new();
    if m == 0 {
        return gates;
    }
    for g in &groups[..m - 1] {
        for item in g {
            gates.push(make(item, tau / 2.0));
        }
    }
    for item in &groups[m - 1] {
        gates.push(make(item, tau));
    }
    for g in groups[..m - 1].iter().rev() {
        for item in g.iter().rev() {
            gates.push(make(item, tau / 2.0));
        }
    }
    gates
}

/// Exact 4x4 exponential exp(-i dt (xx XX + yy YY + zz ZZ)) in the local
/// |b1 b2⟩ basis. The three operators commute, and the matrix splits into
/// the (|00⟩,|11⟩) and (|01⟩,|10⟩) planes:
///   outer: [[zz, xx-yy], [xx-yy, zz]]
///   inner: [[-zz, xx+yy], [xx+yy, -zz]]
/// each exponentiated in closed form.
pub fn bond_exponential(xx: f64, yy: f64, zz: f64, dt: f64) -> [[C64; 4]; 4] {
    let zero = C64::new(0.0, 0.0);
    let mut m = [[zero; 4]; 4];

    let plane = |a: f64, b: f64| -> (C64, C64) {
        let phase = Complex64::from_polar(1.0, -a * dt);
        let diag = phase * (b * dt).cos();
        let off = phase * C64::new(0.0, -(b * dt).sin());
        (diag, off)
    };

    let (od, oo) = plane(zz, xx - yy);
    m[0][0] = od;
    m[0][3] = oo;
    m[3][0] = oo;
    m[3][3] = od;

    let (id_, io) = plane(-zz, xx + yy);
    m[1][1] = id_;
    m[1][2] = io;
    m[2][1] = io;
    m[2][2] = id_;

    m
}

/// Applies the step circuit `steps` times.
pub fn evolve_trotter(
    state: &mut QuantumState,
    circuit: &TrotterCircuit,
    steps: usize,
) -> Result<()> {
    if state.n_qubits() != circuit.n_qubits() {
        return Err(MqteError::invalid(format!(
            "circuit acts on {} qubits, state has {}",
            circuit.n_qubits(),
            state.n_qubits()
        )));
    }
    for _ in 0..steps {
        circuit.apply_step(state);
    }
    Ok(())
}

/// Total gate count of `steps` repetitions.
pub fn gate_count(circuit: &TrotterCircuit, steps: usize) -> usize {
    circuit.gates_per_step() * steps
}

/// exp(-i H t)|psi⟩ through the eigendecomposition:
/// sum_k exp(-i E_k t) ⟨Ψ_k|psi⟩ |Ψ_k⟩.
pub fn evolve_exact(state: &QuantumState, eig: &Eigensystem, t: f64) -> Result<QuantumState> {
    if state.n_qubits() != eig.n_qubits() {
        return Err(MqteError::invalid(format!(
            "eigensystem is over {} qubits, state has {}",
            eig.n_qubits(),
            state.n_qubits()
        )));
    }
    let dim = eig.dim();
    let v = eig.vectors();

    // Real orthogonal V: split the complex vector, two GEMVs per direction.
    let mut re = nalgebra::DVector::<f64>::zeros(dim);
    let mut im = nalgebra::DVector::<f64>::zeros(dim);
    for (i, a) in state.amplitudes().iter().enumerate() {
        re[i] = a.re;
        im[i] = a.im;
    }
    let mut cre = v.transpose() * re;
    let mut cim = v.transpose() * im;
    for k in 0..dim {
        let ph = Complex64::from_polar(1.0, -eig.energies()[k] * t);
        let c = Complex64::new(cre[k], cim[k]) * ph;
        cre[k] = c.re;
        cim[k] = c.im;
    }
    let out_re = v * cre;
    let out_im = v * cim;

    let amps: Vec<C64> = (0..dim)
        .map(|i| C64::new(out_re[i], out_im[i]))
        .collect();
    QuantumState::from_amplitudes(state.n_qubits(), amps)
}
