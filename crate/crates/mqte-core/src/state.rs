//! Dense state-vector register and the gate/Pauli primitives everything else
//! is built from.
//!
//! Conventions, fixed across the crate:
//! - qubit 0 is the leftmost character of a bitstring and the most
//!   significant bit of a basis index; spin-up maps to bit 0;
//! - registers are dense `Vec<Complex64>` and capped at 16 qubits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{MqteError, Result};

pub const MAX_QUBITS: usize = 16;

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PauliAxis::X => write!(f, "X"),
            PauliAxis::Y => write!(f, "Y"),
            PauliAxis::Z => write!(f, "Z"),
        }
    }
}

/// One Pauli product term `coeff * P_{q1} P_{q2} ...`; identity factors are
/// implicit. Factors are kept sorted by qubit and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub coeff: f64,
    factors: Vec<(usize, PauliAxis)>,
}

impl PauliString {
    pub fn new(coeff: f64, mut factors: Vec<(usize, PauliAxis)>) -> Result<Self> {
        factors.sort_by_key(|&(q, _)| q);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(MqteError::invalid(
                "pauli string repeats a qubit; multiply the factors first",
            ));
        }
        Ok(PauliString { coeff, factors })
    }

    pub fn factors(&self) -> &[(usize, PauliAxis)] {
        &self.factors
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.last().map(|&(q, _)| q)
    }

    /// Text form used in config files and term listings: `1.5 * X0 Z3`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} *", fmt_coeff(self.coeff));
        for &(q, ax) in &self.factors {
            s.push_str(&format!(" {ax}{q}"));
        }
        s
    }

    /// Parses `COEFF * LETTERqubit ...`, e.g. `1.0 * X0 X1`.
    pub fn parse(text: &str) -> Result<Self> {
        let (coeff_part, ops_part) = text
            .split_once('*')
            .ok_or_else(|| MqteError::parse(format!("term `{text}` is missing `*`")))?;
        let coeff: f64 = coeff_part
            .trim()
            .parse()
            .map_err(|_| MqteError::parse(format!("bad coefficient in `{text}`")))?;
        let mut factors = Vec::new();
        for tok in ops_part.split_whitespace() {
            let mut chars = tok.chars();
            let letter = chars.next().unwrap();
            let axis = match letter {
                'X' | 'x' => PauliAxis::X,
                'Y' | 'y' => PauliAxis::Y,
                'Z' | 'z' => PauliAxis::Z,
                _ => {
                    return Err(MqteError::parse(format!(
                        "bad factor `{tok}` in `{text}`: expected X/Y/Z followed by a qubit index"
                    )))
                }
            };
            let qubit: usize = chars
                .as_str()
                .parse()
                .map_err(|_| MqteError::parse(format!("bad qubit index in `{tok}`")))?;
            factors.push((qubit, axis));
        }
        if factors.is_empty() {
            return Err(MqteError::parse(format!("term `{text}` has no factors")));
        }
        PauliString::new(coeff, factors)
    }
}

fn fmt_coeff(c: f64) -> String {
    if c == c.trunc() && c.abs() < 1e15 {
        format!("{c:.1}")
    } else {
        format!("{c}")
    }
}

/// Computational-basis label; leftmost character is qubit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    n_qubits: usize,
    index: u64,
}

impl BitString {
    pub fn new(n_qubits: usize, index: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(MqteError::TooLarge {
                what: "bit string qubits",
                cap: MAX_QUBITS,
                got: n_qubits,
            });
        }
        if index >> n_qubits != 0 {
            return Err(MqteError::invalid(format!(
                "index {index} does not fit in {n_qubits} bits"
            )));
        }
        Ok(BitString { n_qubits, index })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Bit of the given qubit (0 = spin up).
    pub fn bit(&self, qubit: usize) -> u8 {
        ((self.index >> (self.n_qubits - 1 - qubit)) & 1) as u8
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.bit(q))?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = MqteError;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(MqteError::invalid(format!(
                "bit string length {n} outside 1..={MAX_QUBITS}"
            )));
        }
        let mut index = 0u64;
        for ch in s.chars() {
            index = (index << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => {
                        return Err(MqteError::invalid(format!(
                            "bit string `{s}` contains `{ch}`; only 0/1 allowed"
                        )))
                    }
                };
        }
        Ok(BitString { n_qubits: n, index })
    }
}

/// Dense state vector over `2^n_qubits` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl QuantumState {
    /// Computational basis state |bits⟩.
    pub fn basis_state(bits: &BitString) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << bits.n_qubits()];
        amps[bits.index() as usize] = C64::new(1.0, 0.0);
        QuantumState {
            n_qubits: bits.n_qubits(),
            amps,
        }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(MqteError::TooLarge {
                what: "state register qubits",
                cap: MAX_QUBITS,
                got: n_qubits,
            });
        }
        if amps.len() != 1 << n_qubits {
            return Err(MqteError::invalid(format!(
                "amplitude count {} does not match 2^{n_qubits}",
                amps.len()
            )));
        }
        Ok(QuantumState { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    fn mask(&self, qubit: usize) -> usize {
        debug_assert!(qubit < self.n_qubits);
        1 << (self.n_qubits - 1 - qubit)
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &QuantumState) -> C64 {
        assert_eq!(self.n_qubits, other.n_qubits, "register size mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Measurement distribution over all basis configurations.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probability_of(&self, bits: &BitString) -> f64 {
        assert_eq!(self.n_qubits, bits.n_qubits(), "register size mismatch");
        self.amps[bits.index() as usize].norm_sqr()
    }

    /// Applies one Pauli letter in place (no coefficient).
    pub fn apply_pauli_axis(&mut self, qubit: usize, axis: PauliAxis) {
        let m = self.mask(qubit);
        match axis {
            PauliAxis::X => {
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
            PauliAxis::Y => {
                let im = C64::new(0.0, 1.0);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let a0 = self.amps[i];
                        let a1 = self.amps[i | m];
                        self.amps[i] = -im * a1;
                        self.amps[i | m] = im * a0;
                    }
                }
            }
            PauliAxis::Z => {
                for i in 0..self.amps.len() {
                    if i & m != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
        }
    }

    /// Applies `coeff * P` for a full Pauli product term. The result is no
    /// longer normalized unless |coeff| = 1.
    pub fn apply_pauli_string(&mut self, term: &PauliString) -> Result<()> {
        if let Some(q) = term.max_qubit() {
            if q >= self.n_qubits {
                return Err(MqteError::invalid(format!(
                    "term {} touches qubit {q} but register has {} qubits",
                    term.to_text(),
                    self.n_qubits
                )));
            }
        }
        for &(q, ax) in term.factors() {
            self.apply_pauli_axis(q, ax);
        }
        if term.coeff != 1.0 {
            let c = C64::new(term.coeff, 0.0);
            for a in &mut self.amps {
                *a *= c;
            }
        }
        Ok(())
    }

    /// exp(-i theta P) |self⟩ where P is the (coefficient-free) Pauli product
    /// of `factors`. Exact for any Pauli string since P^2 = I.
    pub fn apply_pauli_rotation(&mut self, factors: &[(usize, PauliAxis)], theta: f64) {
        let mut rotated = self.clone();
        for &(q, ax) in factors {
            rotated.apply_pauli_axis(q, ax);
        }
        let c = C64::new(theta.cos(), 0.0);
        let s = C64::new(0.0, -theta.sin());
        for (a, p) in self.amps.iter_mut().zip(&rotated.amps) {
            *a = c * *a + s * p;
        }
    }

    pub fn apply_single_qubit(&mut self, qubit: usize, m: &[[C64; 2]; 2]) {
        let mask = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies a 4x4 unitary on (q1, q2). Local basis order is
    /// |b1 b2⟩ with b1 the bit of `q1`, so row/col index = 2*b1 + b2.
    pub fn apply_two_qubit(&mut self, q1: usize, q2: usize, m: &[[C64; 4]; 4]) {
        assert_ne!(q1, q2, "two-qubit gate needs distinct qubits");
        let m1 = self.mask(q1);
        let m2 = self.mask(q2);
        let both = m1 | m2;
        for i in 0..self.amps.len() {
            if i & both == 0 {
                let idx = [i, i | m2, i | m1, i | both];
                let a = [
                    self.amps[idx[0]],
                    self.amps[idx[1]],
                    self.amps[idx[2]],
                    self.amps[idx[3]],
                ];
                for (r, &j) in idx.iter().enumerate() {
                    self.amps[j] =
                        m[r][0] * a[0] + m[r][1] * a[1] + m[r][2] * a[2] + m[r][3] * a[3];
                }
            }
        }
    }

    /// R_axis(angle) = exp(-i angle/2 * P_axis) on one qubit.
    pub fn apply_rotation(&mut self, qubit: usize, axis: PauliAxis, angle: f64) {
        let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        let m = match axis {
            PauliAxis::X => [
                [C64::new(c, 0.0), C64::new(0.0, -s)],
                [C64::new(0.0, -s), C64::new(c, 0.0)],
            ],
            PauliAxis::Y => [
                [C64::new(c, 0.0), C64::new(-s, 0.0)],
                [C64::new(s, 0.0), C64::new(c, 0.0)],
            ],
            PauliAxis::Z => [
                [C64::new(c, -s), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::new(c, s)],
            ],
        };
        self.apply_single_qubit(qubit, &m);
    }

    /// Controlled-Z: symmetric, diagonal, maximally entangling.
    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let both = self.mask(a) | self.mask(b);
        for i in 0..self.amps.len() {
            if i & both == both {
                self.amps[i] = -self.amps[i];
            }
        }
    }

    /// exp(-i angle/2 * Z_a Z_b): diagonal phase by parity of the two bits.
    pub fn apply_zz_rotation(&mut self, a: usize, b: usize, angle: f64) {
        let ma = self.mask(a);
        let mb = self.mask(b);
        let minus = C64::from_polar(1.0, -angle / 2.0);
        let plus = C64::from_polar(1.0, angle / 2.0);
        for i in 0..self.amps.len() {
            let parity = ((i & ma != 0) as u8) ^ ((i & mb != 0) as u8);
            self.amps[i] *= if parity == 0 { minus } else { plus };
        }
    }
}
