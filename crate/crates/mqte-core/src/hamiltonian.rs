//! Spin Hamiltonians as sums of Pauli product terms.
//!
//! The built-in family is the XXZ-type Heisenberg model on open chains and
//! rectangular grids: per bond, XX and YY with coupling `j` plus ZZ with
//! coupling `h`. Arbitrary term lists are accepted for custom models.

use num_complex::Complex64;

use crate::error::{MqteError, Result};
use crate::state::{BitString, PauliAxis, PauliString, C64, MAX_QUBITS};

/// Lattice the model lives on. `Custom` carries no bond structure, which
/// restricts it to exact evolution or per-term Trotterization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Geometry {
    Chain { sites: usize },
    Grid { rows: usize, cols: usize },
    Custom,
}

/// Undirected nearest-neighbor bond (site pair).
pub type Bond = (usize, usize);

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<PauliString>,
    geometry: Geometry,
    /// Bond list with per-bond (xx, yy, zz) coefficients; present only for
    /// geometries with a bond structure. Drives joint bond exponentials.
    bonds: Vec<(Bond, f64, f64, f64)>,
}

impl Hamiltonian {
    /// Open-boundary chain: for each bond (j, j+1), terms XX*j, YY*j, ZZ*h.
    /// Zero-coefficient terms are dropped.
    pub fn heisenberg_1d(sites: usize, j: f64, h: f64) -> Result<Self> {
        if sites < 2 {
            return Err(MqteError::invalid("chain needs at least 2 sites"));
        }
        check_register(sites)?;
        let bonds: Vec<Bond> = (0..sites - 1).map(|s| (s, s + 1)).collect();
        Ok(Self::from_bonds(
            sites,
            Geometry::Chain { sites },
            &bonds,
            j,
            h,
        ))
    }

    /// Open-boundary rectangular grid, sites indexed row-major
    /// (site = r*cols + c). Bonds: rows*(cols-1) horizontal plus
    /// cols*(rows-1) vertical.
    pub fn heisenberg_2d(rows: usize, cols: usize, j: f64, h: f64) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols < 2 {
            return Err(MqteError::invalid("grid needs at least 2 sites"));
        }
        let sites = rows * cols;
        check_register(sites)?;
        let mut bonds = Vec::new();
        for r in 0..rows {
            for c in 0..cols - 1 {
                bonds.push((r * cols + c, r * cols + c + 1));
            }
        }
        for r in 0..rows - 1 {
            for c in 0..cols {
                bonds.push((r * cols + c, (r + 1) * cols + c));
            }
        }
        Ok(Self::from_bonds(
            sites,
            Geometry::Grid { rows, cols },
            &bonds,
            j,
            h,
        ))
    }

    fn from_bonds(
        n_qubits: usize,
        geometry: Geometry,
        bonds: &[Bond],
        j: f64,
        h: f64,
    ) -> Self {
        let mut terms = Vec::new();
        for &(a, b) in bonds {
            for (axis, coeff) in [
                (PauliAxis::X, j),
                (PauliAxis::Y, j),
                (PauliAxis::Z, h),
            ] {
                if coeff != 0.0 {
                    terms.push(
                        PauliString::new(coeff, vec![(a, axis), (b, axis)])
                            .expect("distinct sites"),
                    );
                }
            }
        }
        let bonds = bonds.iter().map(|&b| (b, j, j, h)).collect();
        Hamiltonian {
            n_qubits,
            terms,
            geometry,
            bonds,
        }
    }

    /// Custom model from explicit terms. Zero-coefficient terms are dropped.
    pub fn from_terms(n_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        check_register(n_qubits)?;
        for t in &terms {
            if let Some(q) = t.max_qubit() {
                if q >= n_qubits {
                    return Err(MqteError::invalid(format!(
                        "term {} touches qubit {q} but register has {n_qubits} qubits",
                        t.to_text()
                    )));
                }
            }
        }
        let terms = terms.into_iter().filter(|t| t.coeff != 0.0).collect();
        Ok(Hamiltonian {
            n_qubits,
            terms,
            geometry: Geometry::Custom,
            bonds: Vec::new(),
        })
    }

    /// Parses one term per line / list entry in the `1.0 * X0 X1` syntax.
    pub fn from_term_texts(n_qubits: usize, texts: &[String]) -> Result<Self> {
        let terms = texts
            .iter()
            .map(|t| PauliString::parse(t))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n_qubits, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn bonds(&self) -> &[(Bond, f64, f64, f64)] {
        &self.bonds
    }

    /// Dense matrix, row/column index = basis index. Complex in general;
    /// real-symmetry is checked by the diagonalizer.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for term in &self.terms {
            // Column-by-column action of the term on basis states: for basis
            // |col⟩, each X/Y flips the bit, Z keeps it; phases multiply.
            for col in 0..dim {
                let mut row = col;
                let mut phase = C64::new(term.coeff, 0.0);
                for &(q, axis) in term.factors() {
                    let mask = 1usize << (self.n_qubits - 1 - q);
                    let bit = row & mask != 0;
                    match axis {
                        PauliAxis::X => row ^= mask,
                        PauliAxis::Y => {
                            // Y|0> = i|1>, Y|1> = -i|0>
                            phase *= if bit {
                                Complex64::new(0.0, -1.0)
                            } else {
                                Complex64::new(0.0, 1.0)
                            };
                            row ^= mask;
                        }
                        PauliAxis::Z => {
                            if bit {
                                phase = -phase;
                            }
                        }
                    }
                }
                m[row][col] += phase;
            }
        }
        m
    }
}

fn check_register(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(MqteError::TooLarge {
            what: "spin register qubits",
            cap: MAX_QUBITS,
            got: n,
        })
    } else {
        Ok(())
    }
}

/// Alternating spin reference state for a geometry: "0101..." on chains;
/// on grids, site (r, c) gets (r + c) mod 2, read out row-major.
pub fn neel_state(geometry: &Geometry) -> Result<BitString> {
    match *geometry {
        Geometry::Chain { sites } => {
            let mut index = 0u64;
            for s in 0..sites {
                index = (index << 1) | (s as u64 & 1);
            }
            BitString::new(sites, index)
        }
        Geometry::Grid { rows, cols } => {
            let mut index = 0u64;
            for r in 0..rows {
                for c in 0..cols {
                    index = (index << 1) | ((r + c) as u64 & 1);
                }
            }
            BitString::new(rows * cols, index)
        }
        Geometry::Custom => Err(MqteError::invalid(
            "alternating reference needs a chain or grid geometry",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_chain_has_three_terms() {
        let h = Hamiltonian::heisenberg_1d(2, 1.0, 2.0).unwrap();
        let texts: Vec<String> = h.terms().iter().map(|t| t.to_text()).collect();
        assert_eq!(texts, vec!["1.0 * X0 X1", "1.0 * Y0 Y1", "2.0 * Z0 Z1"]);
        assert_eq!(h.bonds().len(), 1);
    }

    #[test]
    fn ten_site_chain_has_27_terms() {
        let h = Hamiltonian::heisenberg_1d(10, 1.0, 2.0).unwrap();
        assert_eq!(h.terms().len(), 27);
        assert_eq!(h.bonds().len(), 9);
    }

    #[test]
    fn three_by_three_grid_has_12_bonds_36_terms() {
        let h = Hamiltonian::heisenberg_2d(3, 3, 1.0, 2.0).unwrap();
        assert_eq!(h.bonds().len(), 12);
        assert_eq!(h.terms().len(), 36);
    }

    #[test]
    fn one_row_grid_matches_chain() {
        let grid = Hamiltonian::heisenberg_2d(1, 5, 0.7, 1.3).unwrap();
        let chain = Hamiltonian::heisenberg_1d(5, 0.7, 1.3).unwrap();
        let gt: Vec<String> = grid.terms().iter().map(|t| t.to_text()).collect();
        let ct: Vec<String> = chain.terms().iter().map(|t| t.to_text()).collect();
        assert_eq!(gt, ct);
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let h = Hamiltonian::heisenberg_2d(2, 2, 1.0, 0.0).unwrap();
        assert_eq!(h.bonds().len(), 4);
        assert_eq!(h.terms().len(), 8);
    }

    #[test]
    fn neel_layouts() {
        assert_eq!(
            neel_state(&Geometry::Chain { sites: 4 }).unwrap().to_string(),
            "0101"
        );
        assert_eq!(
            neel_state(&Geometry::Grid { rows: 2, cols: 2 }).unwrap().to_string(),
            "0110"
        );
        assert_eq!(
            neel_state(&Geometry::Chain { sites: 1 }).unwrap().to_string(),
            "0"
        );
        assert_eq!(
            neel_state(&Geometry::Grid { rows: 3, cols: 3 }).unwrap().to_string(),
            "010101010"
        );
    }

    #[test]
    fn custom_terms_validate_register() {
        let t = PauliString::parse("1.0 * X0 X4").unwrap();
        assert!(Hamiltonian::from_terms(4, vec![t.clone()]).is_err());
        assert!(Hamiltonian::from_terms(5, vec![t]).is_ok());
    }

    #[test]
    fn dense_matrix_of_two_site_model() {
        // J(XX + YY) couples |01> and |10> with strength 2J; ZZ is diagonal
        // (+h, -h, -h, +h).
        let h = Hamiltonian::heisenberg_1d(2, 1.0, 2.0).unwrap();
        let m = h.to_dense();
        let expect = [
            [2.0, 0.0, 0.0, 0.0],
            [0.0, -2.0, 2.0, 0.0],
            [0.0, 2.0, -2.0, 0.0],
            [0.0, 0.0, 0.0, 2.0],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert!(
                    (m[r][c] - C64::new(expect[r][c], 0.0)).norm() < 1e-14,
                    "entry ({r},{c}) = {}",
                    m[r][c]
                );
            }
        }
    }

    #[test]
    fn dense_matrix_is_hermitian_with_y_terms() {
        let h = Hamiltonian::from_term_texts(
            3,
            &[
                "0.5 * Y0 Y2".to_string(),
                "1.0 * X1".to_string(),
                "-0.7 * Z0 Z1".to_string(),
            ],
        )
        .unwrap();
        let m = h.to_dense();
        for r in 0..8 {
            for c in 0..8 {
                assert!((m[r][c] - m[c][r].conj()).norm() < 1e-14);
            }
        }
    }
}
