//! Dense matrices for small circuits. Used by tests and verification
//! batteries; simulation never builds these.

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::state::Statevector;

pub const MAX_UNITARY_QUBITS: usize = 12;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            m.data[r * dim..(r + 1) * dim].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.data[c * self.dim + r] = self.get(r, c).conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    m.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entry deviation after removing the best global phase between the two.
    pub fn max_abs_diff_up_to_phase(&self, other: &Matrix) -> f64 {
        let (idx, _) = self
            .data
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("non-empty matrix");
        let (a, b) = (self.data[idx], other.data[idx]);
        if b.norm() == 0.0 {
            return self.max_abs_diff(other).max(a.norm());
        }
        let phase = (b / a) / (b / a).norm();
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x * phase - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Ordered product of the circuit's gate unitaries. Probes and measurements
/// are ignored.
pub fn to_unitary(circuit: &Circuit) -> Result<Matrix> {
    let n = circuit.num_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::Capability(format!(
            "to_unitary supports at most {MAX_UNITARY_QUBITS} qubits, circuit has {n}"
        )));
    }
    let dim = 1 << n;
    let mut m = Matrix::zeros(dim);
    for col in 0..dim {
        let mut s = Statevector::basis(n, col)?;
        for g in circuit.gates() {
            s.apply_unchecked(g);
        }
        for (row, a) in s.amplitudes().iter().enumerate() {
            m.set(row, col, *a);
        }
    }
    Ok(m)
}
