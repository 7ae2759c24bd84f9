//! Dense reference propagators for small systems (n <= 8).
//!
//! These exist to cross-check the gate-based engine: the full Hamiltonian
//! `w_B H_B + H_C` is exponentiated as a dense matrix (scaling-and-squaring
//! Taylor series) and applied directly. Everything here trades speed for
//! being an independent code path.

use num_complex::Complex64;

use crate::ising::IsingHamiltonian;
use crate::statevector::Statevector;
use crate::{Error, Result};

pub const MAX_DENSE_QUBITS: usize = 8;

/// Row-major square complex matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut out = Self::zeros(dim);
        for r in 0..dim {
            for k in 0..dim {
                let a = self.at(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    out.data[r * dim + c] += a * other.at(k, c);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }

    pub fn scale(&mut self, s: Complex64) {
        for x in &mut self.data {
            *x *= s;
        }
    }

    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self.at(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// `w_B H_B + H_C` as a dense matrix, offset included on the diagonal.
pub fn hamiltonian_matrix(h_c: &IsingHamiltonian, driver_weight: f64) -> Result<DenseMatrix> {
    if h_c.n > MAX_DENSE_QUBITS {
        return Err(Error::QubitRange(h_c.n, 1, MAX_DENSE_QUBITS));
    }
    let dim = 1usize << h_c.n;
    let mut m = DenseMatrix::zeros(dim);
    for (idx, &e) in h_c.energy_table().iter().enumerate() {
        *m.at_mut(idx, idx) = Complex64::new(e, 0.0);
    }
    if driver_weight != 0.0 {
        for idx in 0..dim {
            for q in 0..h_c.n {
                *m.at_mut(idx, idx ^ (1 << q)) += Complex64::new(driver_weight, 0.0);
            }
        }
    }
    Ok(m)
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(m: &DenseMatrix) -> DenseMatrix {
    let norm = m.one_norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let mut scaled = m.clone();
    scaled.scale(Complex64::new(1.0 / 2f64.powi(squarings as i32), 0.0));

    let mut result = DenseMatrix::identity(m.dim);
    let mut term = DenseMatrix::identity(m.dim);
    for k in 1..=24u64 {
        term = term.matmul(&scaled);
        term.scale(Complex64::new(1.0 / k as f64, 0.0));
        for (r, t) in result.data.iter_mut().zip(&term.data) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// Exact evolution `exp(-i t (w_B H_B + H_C)) |psi>` via dense
/// exponentiation. Reference implementation, n <= 8.
pub fn exact_evolution(
    sv: &Statevector,
    h_c: &IsingHamiltonian,
    driver_weight: f64,
    t: f64,
) -> Result<Statevector> {
    if sv.n() != h_c.n {
        return Err(Error::Circuit(format!(
            "state has {} qubits but Hamiltonian has {}",
            sv.n(),
            h_c.n
        )));
    }
    let mut m = hamiltonian_matrix(h_c, driver_weight)?;
    m.scale(Complex64::new(0.0, -t));
    let u = expm(&m);
    let amps = u.matvec(sv.amps());
    let mut out = sv.clone();
    out.amps_mut().copy_from_slice(&amps);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    #[test]
    fn expm_of_zero_is_identity() {
        let u = expm(&DenseMatrix::zeros(4));
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(u.at(r, c).re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(u.at(r, c).im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn expm_matches_single_qubit_rotation() {
        // exp(-i t X) = cos(t) I - i sin(t) X.
        let h = IsingHamiltonian { n: 1, h: BTreeMap::new(), j: BTreeMap::new(), offset: 0.0 };
        let mut m = hamiltonian_matrix(&h, 1.0).unwrap();
        let t = 0.8;
        m.scale(Complex64::new(0.0, -t));
        let u = expm(&m);
        assert_abs_diff_eq!(u.at(0, 0).re, t.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(u.at(0, 1).im, -t.sin(), epsilon = 1e-12);
    }

    #[test]
    fn evolution_is_unitary() {
        let h = IsingHamiltonian {
            n: 3,
            h: [(0, 0.4), (2, -0.7)].into_iter().collect(),
            j: [((0, 1), 0.9), ((1, 2), -0.3)].into_iter().collect(),
            offset: 0.2,
        };
        let sv = Statevector::plus_state(3).unwrap();
        let out = exact_evolution(&sv, &h, 0.6, 1.7).unwrap();
        assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_large_systems() {
        let h = IsingHamiltonian { n: 9, h: BTreeMap::new(), j: BTreeMap::new(), offset: 0.0 };
        assert!(hamiltonian_matrix(&h, 1.0).is_err());
    }
}
