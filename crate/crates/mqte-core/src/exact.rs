//! Exact diagonalization and closed-form predictions used as ground truth
//! for every other path in the crate.
//!
//! Eigensystems are real-orthogonal: the models are real symmetric in the
//! computational basis, so eigenvectors are real and overlap products are
//! signed reals. Complex (Y-odd) custom models get a warning and their
//! imaginary part is discarded.

use nalgebra::DMatrix;

use crate::error::{MqteError, Result};
use crate::hamiltonian::Hamiltonian;
use crate::state::{BitString, QuantumState, C64};

/// Diagonalization cap: dense eigensolve memory/time grows as 8^n.
pub const MAX_DIAG_QUBITS: usize = 14;

/// Gaps closer than this merge into one reference peak.
pub const GAP_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Eigensystem {
    n_qubits: usize,
    /// Ascending.
    energies: Vec<f64>,
    /// Column k is the eigenvector of energies[k]; orthonormal; sign gauge:
    /// largest-magnitude component positive (first index on ties).
    vectors: DMatrix<f64>,
}

/// One expected spectral line: |E_k - E_k'| and the signed overlap product
/// c_k'j c_k'i c_kj c_ki summed over all pairs sharing the gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWeight {
    pub gap: f64,
    pub weight: f64,
}

pub fn diagonalize(h: &Hamiltonian) -> Result<Eigensystem> {
    let n = h.n_qubits();
    if n > MAX_DIAG_QUBITS {
        return Err(MqteError::TooLarge {
            what: "diagonalization qubits",
            cap: MAX_DIAG_QUBITS,
            got: n,
        });
    }
    let dense = h.to_dense();
    let dim = dense.len();

    let mut scale = 0.0f64;
    let mut max_imag = 0.0f64;
    for row in &dense {
        for v in row {
            scale = scale.max(v.norm());
            max_imag = max_imag.max(v.im.abs());
        }
    }
    if max_imag > 1e-12 * scale.max(1.0) {
        eprintln!(
            "warning: hamiltonian matrix has imaginary entries up to {max_imag:.3e}; \
             discarding them (results assume a real symmetric model)"
        );
    }

    let m = DMatrix::from_fn(dim, dim, |r, c| dense[r][c].re);
    let eig = m.symmetric_eigen();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut energies = Vec::with_capacity(dim);
    let mut vectors = DMatrix::zeros(dim, dim);
    for (k, &src) in order.iter().enumerate() {
        energies.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        // Sign gauge: flip so the largest-magnitude component is positive.
        let mut best = 0;
        for r in 1..dim {
            if col[r].abs() > col[best].abs() {
                best = r;
            }
        }
        let sign = if col[best] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..dim {
            vectors[(r, k)] = sign * col[r];
        }
    }

    Ok(Eigensystem {
        n_qubits: n,
        energies,
        vectors,
    })
}

impl Eigensystem {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Overlaps c_kj = ⟨Ψ_k|φ_j⟩ for a basis state, indexed by k.
    pub fn overlaps(&self, bits: &BitString) -> Vec<f64> {
        assert_eq!(bits.n_qubits(), self.n_qubits, "register size mismatch");
        self.basis_row(bits.index() as usize)
    }

    /// ⟨i|Ψ_k⟩ for every k at basis index i: row i of the eigenvector
    /// matrix.
    pub fn basis_row(&self, index: usize) -> Vec<f64> {
        (0..self.dim()).map(|k| self.vectors[(index, k)]).collect()
    }

    /// Eigenbasis coefficients ⟨Ψ_k|ψ⟩ of an arbitrary state, indexed
    /// by k. Real eigenvectors, so no conjugation enters.
    pub fn project(&self, state: &QuantumState) -> Vec<C64> {
        assert_eq!(state.n_qubits(), self.n_qubits, "register size mismatch");
        let amps = state.amplitudes();
        (0..self.dim())
            .map(|k| {
                (0..self.dim())
                    .map(|i| self.vectors[(i, k)] * amps[i])
                    .sum()
            })
            .collect()
    }

    /// Largest spectral extent; an upper bound on any observable gap.
    pub fn max_gap(&self) -> f64 {
        match (self.energies.first(), self.energies.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }
}

/// Closed-form measurement probability series
///   p(n) = sum_k c_ki^2 c_kj^2
///        + sum_{k>k'} 2 c_k'j c_k'i c_kj c_ki cos((E_k - E_k') n delta),
/// the two-sided expansion of |⟨φ_i| exp(-i H t) |φ_j⟩|^2 for real overlaps.
pub fn predicted_signal(
    eig: &Eigensystem,
    reference: &BitString,
    config: &BitString,
    n_points: usize,
    delta: f64,
) -> Vec<f64> {
    let cj = eig.overlaps(reference);
    let ci = eig.overlaps(config);
    let dim = eig.dim();

    let mut dc = 0.0;
    let mut lines: Vec<(f64, f64)> = Vec::new();
    for k in 0..dim {
        let pk = ci[k] * cj[k];
        dc += pk * pk;
        for kp in 0..k {
            let amp = 2.0 * cj[kp] * ci[kp] * cj[k] * ci[k];
            if amp != 0.0 {
                lines.push((eig.energies[k] - eig.energies[kp], amp));
            }
        }
    }

    (0..=n_points)
        .map(|n| {
            let t = n as f64 * delta;
            dc + lines
                .iter()
                .map(|&(freq, amp)| amp * (freq * t).cos())
                .sum::<f64>()
        })
        .collect()
}

/// Expected peak list for the (reference, config) pair: distinct nonzero
/// gaps with their summed signed weights. Gaps equal within `GAP_MERGE_TOL`
/// merge; entries with |weight| < `weight_floor` after merging are dropped.
/// Zero gaps (degenerate pairs) belong to the DC background and are skipped.
pub fn reference_peaks(
    eig: &Eigensystem,
    reference: &BitString,
    config: &BitString,
    weight_floor: f64,
) -> Vec<GapWeight> {
    let cj = eig.overlaps(reference);
    let ci = eig.overlaps(config);
    let dim = eig.dim();

    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for k in 0..dim {
        for kp in 0..k {
            let weight = cj[kp] * ci[kp] * cj[k] * ci[k];
            if weight != 0.0 {
                let gap = eig.energies[k] - eig.energies[kp];
                if gap > GAP_MERGE_TOL {
                    pairs.push((gap, weight));
                }
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut merged: Vec<GapWeight> = Vec::new();
    for (gap, weight) in pairs {
        match merged.last_mut() {
            Some(last) if gap - last.gap <= GAP_MERGE_TOL => {
                // Weighted position update keeps the merged gap representative.
                last.gap = (last.gap + gap) / 2.0;
                last.weight += weight;
            }
            _ => merged.push(GapWeight { gap, weight }),
        }
    }
    merged.retain(|p| p.weight.abs() >= weight_floor);
    merged
}
