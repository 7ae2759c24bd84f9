//! Ising form of a QUBO under the bit/spin map `b = (1 - z) / 2`.
//!
//! `H_C = sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j + offset`, acting
//! diagonally in the computational basis with spin `z = +1` for bit 0.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::qubo::Qubo;
use crate::Result;

/// Diagonal cost Hamiltonian in spin variables.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingHamiltonian {
    pub n: usize,
    pub h: BTreeMap<usize, f64>,
    /// Coupling terms, keys ordered `i < j`.
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingHamiltonian {
    /// Energy of a classical spin configuration (offset included).
    pub fn cost(&self, bits: Bits) -> f64 {
        let mut total = self.offset;
        for (&i, &hi) in &self.h {
            total += hi * bits.spin(i) as f64;
        }
        for (&(a, b), &jab) in &self.j {
            total += jab * (bits.spin(a) * bits.spin(b)) as f64;
        }
        total
    }

    /// All diagonal terms as (bit mask, coefficient), offset excluded.
    /// The sign of a term on basis state `idx` is `(-1)^popcount(idx & mask)`.
    pub fn terms(&self) -> Vec<(u64, f64)> {
        let mut out = Vec::with_capacity(self.h.len() + self.j.len());
        for (&i, &hi) in &self.h {
            out.push((1u64 << i, hi));
        }
        for (&(a, b), &jab) in &self.j {
            out.push(((1u64 << a) | (1u64 << b), jab));
        }
        out
    }

    /// Dense table of energies over all `2^n` basis states.
    pub fn energy_table(&self) -> Vec<f64> {
        let terms = self.terms();
        let dim = 1usize << self.n;
        let mut table = vec![self.offset; dim];
        for (mask, coeff) in terms {
            for (idx, e) in table.iter_mut().enumerate() {
                let sign = 1.0 - 2.0 * ((idx as u64 & mask).count_ones() & 1) as f64;
                *e += coeff * sign;
            }
        }
        table
    }

    pub fn to_json(&self) -> Result<String> {
        let dto = IsingJson {
            n: self.n,
            h: self.h.iter().map(|(&i, &v)| (i, v)).collect(),
            j: self.j.iter().map(|(&(a, b), &v)| (a, b, v)).collect(),
            offset: self.offset,
        };
        Ok(serde_json::to_string_pretty(&dto)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let dto: IsingJson = serde_json::from_str(s)?;
        Ok(IsingHamiltonian {
            n: dto.n,
            h: dto.h.into_iter().collect(),
            j: dto.j.into_iter().map(|(a, b, v)| ((a, b), v)).collect(),
            offset: dto.offset,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct IsingJson {
    n: usize,
    h: Vec<(usize, f64)>,
    #[serde(rename = "J")]
    j: Vec<(usize, usize, f64)>,
    offset: f64,
}

/// Converts a QUBO to Ising form. Linear terms map as
/// `c b -> c/2 - (c/2) Z`, quadratic as
/// `c b b' -> c/4 (1 - Z - Z' + Z Z')`.
pub fn qubo_to_ising(q: &Qubo) -> IsingHamiltonian {
    let mut h: BTreeMap<usize, f64> = BTreeMap::new();
    let mut j: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut offset = 0.0;

    for (&(a, b), &c) in &q.coeffs {
        if a == b {
            *h.entry(a).or_insert(0.0) -= c / 2.0;
            offset += c / 2.0;
        } else {
            *j.entry((a, b)).or_insert(0.0) += c / 4.0;
            *h.entry(a).or_insert(0.0) -= c / 4.0;
            *h.entry(b).or_insert(0.0) -= c / 4.0;
            offset += c / 4.0;
        }
    }
    offset += q.offset;

    h.retain(|_, v| *v != 0.0);
    j.retain(|_, v| *v != 0.0);
    IsingHamiltonian { n: q.num_vars, h, j, offset }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::encode_vrp;
    use crate::instances::VrpInstance;
    use crate::qubo::to_qubo;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn qubo_from(coeffs: &[((usize, usize), f64)], num_vars: usize) -> Qubo {
        Qubo {
            num_vars,
            coeffs: coeffs.iter().cloned().collect(),
            offset: 0.0,
            penalty_weight: 0.0,
            norm_factor: 1.0,
        }
    }

    #[test]
    fn linear_term_maps_to_field_and_offset() {
        let ising = qubo_to_ising(&qubo_from(&[((0, 0), 1.0)], 1));
        assert_abs_diff_eq!(ising.h[&0], -0.5);
        assert_abs_diff_eq!(ising.offset, 0.5);
        assert!(ising.j.is_empty());
    }

    #[test]
    fn quadratic_term_maps_to_coupling() {
        let ising = qubo_to_ising(&qubo_from(&[((0, 1), 4.0)], 2));
        assert_abs_diff_eq!(ising.j[&(0, 1)], 1.0);
        assert_abs_diff_eq!(ising.h[&0], -1.0);
        assert_abs_diff_eq!(ising.h[&1], -1.0);
        assert_abs_diff_eq!(ising.offset, 1.0);
    }

    #[test]
    fn ising_cost_equals_qubo_cost_everywhere() {
        let q = to_qubo(&encode_vrp(&VrpInstance::random_grid(3, 1, 31)).unwrap()).unwrap();
        let ising = qubo_to_ising(&q);
        for raw in 0u64..1 << q.num_vars {
            let bits = Bits::new(raw, q.num_vars);
            assert_abs_diff_eq!(ising.cost(bits), q.cost(bits), epsilon = 1e-10);
        }
    }

    /// Dense-diagonal oracle: builds the Hamiltonian diagonal from Kronecker
    /// products of Z and compares all 64 entries of a seeded 6-qubit case.
    #[test]
    fn matches_kronecker_diagonal_construction() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(40);
        let n = 6;
        let mut h = BTreeMap::new();
        let mut j = BTreeMap::new();
        for i in 0..n {
            h.insert(i, rng.gen::<f64>() - 0.5);
        }
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen::<f64>() < 0.5 {
                    j.insert((a, b), rng.gen::<f64>() - 0.5);
                }
            }
        }
        let ising = IsingHamiltonian { n, h: h.clone(), j: j.clone(), offset: 0.3 };

        // Kronecker product over qubit axes: diag(Z on qubit i) at basis
        // index idx is (-1)^bit_i(idx).
        let z_diag = |qubits: &[usize]| -> Vec<f64> {
            let mut d = vec![1.0f64; 1 << n];
            for (idx, v) in d.iter_mut().enumerate() {
                for &q in qubits {
                    *v *= if (idx >> q) & 1 == 1 { -1.0 } else { 1.0 };
                }
            }
            d
        };
        let mut expected = vec![0.3f64; 1 << n];
        for (&i, &hi) in &h {
            for (idx, e) in expected.iter_mut().enumerate() {
                *e += hi * z_diag(&[i])[idx];
            }
        }
        for (&(a, b), &jab) in &j {
            for (idx, e) in expected.iter_mut().enumerate() {
                *e += jab * z_diag(&[a, b])[idx];
            }
        }

        let table = ising.energy_table();
        for idx in 0..1usize << n {
            assert_abs_diff_eq!(table[idx], expected[idx], epsilon = 1e-12);
            assert_abs_diff_eq!(
                ising.cost(Bits::new(idx as u64, n)),
                expected[idx],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn json_roundtrip() {
        let q = to_qubo(&encode_vrp(&VrpInstance::random_grid(3, 1, 31)).unwrap()).unwrap();
        let ising = qubo_to_ising(&q);
        let s = ising.to_json().unwrap();
        assert!(s.contains("\"J\""));
        let back = IsingHamiltonian::from_json(&s).unwrap();
        assert_eq!(back, ising);
    }
}
