//! Dense statevector simulation.
//!
//! Amplitudes are stored for all `2^n` basis states with qubit 0 as the
//! least significant index bit. Rotation conventions:
//! `RX(t) = exp(-i t X / 2)`, `RZ(t) = exp(-i t Z / 2)`,
//! `RZZ(t) = exp(-i t Z x Z / 2)`; the diagonal cost evolution
//! `exp(-i t H_C)` is applied exactly as a per-basis-state phase.

use num_complex::Complex64;

use crate::ising::IsingHamiltonian;
use crate::sample::SampleSet;
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 20;

/// Observables with dedicated exact expectation paths.
#[derive(Clone, Copy)]
pub enum Observable<'a> {
    /// The diagonal cost Hamiltonian (offset included).
    Cost(&'a IsingHamiltonian),
    /// The transverse-field driver `H_B = sum_i X_i`.
    Driver,
    /// `H_B^2`.
    DriverSquared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Uniform superposition `|+>^n`.
    pub fn plus_state(n: usize) -> Result<Self> {
        Self::check_qubits(n)?;
        let dim = 1usize << n;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Statevector { n, amps: vec![amp; dim] })
    }

    /// Computational basis state `|idx>`.
    pub fn basis_state(n: usize, idx: u64) -> Result<Self> {
        Self::check_qubits(n)?;
        let dim = 1usize << n;
        if idx >= dim as u64 {
            return Err(Error::Circuit(format!("basis index {idx} out of range for n={n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[idx as usize] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n, amps })
    }

    fn check_qubits(n: usize) -> Result<()> {
        if n < 1 || n > MAX_QUBITS {
            return Err(Error::QubitRange(n, 1, MAX_QUBITS));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    // --- gates ---------------------------------------------------------

    /// Iterates all amplitude pairs split by `qubit`, applying `f(a0, a1)`.
    #[inline]
    fn pairwise<F: FnMut(Complex64, Complex64) -> (Complex64, Complex64)>(
        &mut self,
        qubit: usize,
        mut f: F,
    ) {
        let stride = 1usize << qubit;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for off in base..base + stride {
                let i1 = off + stride;
                let (a0, a1) = (self.amps[off], self.amps[i1]);
                let (b0, b1) = f(a0, a1);
                self.amps[off] = b0;
                self.amps[i1] = b1;
            }
            base += 2 * stride;
        }
    }

    pub fn rx(&mut self, theta: f64, qubit: usize) {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let is = Complex64::new(0.0, -s);
        self.pairwise(qubit, |a0, a1| (c * a0 + is * a1, is * a0 + c * a1));
    }

    pub fn hadamard(&mut self, qubit: usize) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        self.pairwise(qubit, |a0, a1| (r * (a0 + a1), r * (a0 - a1)));
    }

    pub fn rz(&mut self, theta: f64, qubit: usize) {
        self.phase_terms(&[(1u64 << qubit, theta / 2.0)]);
    }

    pub fn rzz(&mut self, theta: f64, a: usize, b: usize) {
        debug_assert_ne!(a, b);
        self.phase_terms(&[((1u64 << a) | (1u64 << b), theta / 2.0)]);
    }

    /// Fused diagonal rotation: multiplies each amplitude by
    /// `exp(-i sum_t half_angle_t * sign_t(idx))` where the sign is the Z
    /// parity of `idx & mask`.
    pub fn phase_terms(&mut self, terms: &[(u64, f64)]) {
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            let mut angle = 0.0;
            for &(mask, half) in terms {
                let sign = 1.0 - 2.0 * ((idx as u64 & mask).count_ones() & 1) as f64;
                angle += half * sign;
            }
            *amp *= Complex64::new(angle.cos(), -angle.sin());
        }
    }

    /// Multiplies amplitude `idx` by `exp(-i scale * table[idx])`.
    pub fn phase_table(&mut self, table: &[f64], scale: f64) {
        debug_assert_eq!(table.len(), self.amps.len());
        for (amp, &e) in self.amps.iter_mut().zip(table) {
            let angle = scale * e;
            *amp *= Complex64::new(angle.cos(), -angle.sin());
        }
    }

    // --- evolutions ------------------------------------------------------

    /// Exact `exp(-i t H_C)` (diagonal, offset included as a global phase).
    pub fn apply_cost_evolution(&mut self, h_c: &IsingHamiltonian, t: f64) {
        let terms = h_c.terms();
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            let mut e = h_c.offset;
            for &(mask, coeff) in &terms {
                let sign = 1.0 - 2.0 * ((idx as u64 & mask).count_ones() & 1) as f64;
                e += coeff * sign;
            }
            let angle = t * e;
            *amp *= Complex64::new(angle.cos(), -angle.sin());
        }
    }

    /// Exact `exp(-i t H_B)` with `H_B = sum_i X_i`: an `RX(2t)` per qubit.
    pub fn apply_driver_evolution(&mut self, t: f64) {
        for q in 0..self.n {
            self.rx(2.0 * t, q);
        }
    }

    // --- measurement-free readout ---------------------------------------

    pub fn expectation(&self, obs: Observable) -> f64 {
        match obs {
            Observable::Cost(h_c) => {
                let terms = h_c.terms();
                let mut total = 0.0;
                for (idx, amp) in self.amps.iter().enumerate() {
                    let p = amp.norm_sqr();
                    if p == 0.0 {
                        continue;
                    }
                    let mut e = h_c.offset;
                    for &(mask, coeff) in &terms {
                        let sign = 1.0 - 2.0 * ((idx as u64 & mask).count_ones() & 1) as f64;
                        e += coeff * sign;
                    }
                    total += p * e;
                }
                total
            }
            Observable::Driver => {
                let mut total = 0.0;
                for q in 0..self.n {
                    let bit = 1usize << q;
                    for idx in 0..self.amps.len() {
                        total += (self.amps[idx].conj() * self.amps[idx ^ bit]).re;
                    }
                }
                total
            }
            Observable::DriverSquared => {
                // |phi> = H_B |psi>; <H_B^2> = <phi|phi>.
                let mut phi = vec![Complex64::new(0.0, 0.0); self.amps.len()];
                for q in 0..self.n {
                    let bit = 1usize << q;
                    for (idx, p) in phi.iter_mut().enumerate() {
                        *p += self.amps[idx ^ bit];
                    }
                }
                phi.iter().map(|a| a.norm_sqr()).sum()
            }
        }
    }

    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::Circuit(format!(
                "qubit count mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Squared overlap `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Statevector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Phase-invariant distance `sqrt(1 - fidelity)`.
    pub fn distance(&self, other: &Statevector) -> Result<f64> {
        Ok((1.0 - self.fidelity(other)?).max(0.0).sqrt())
    }

    /// Multinomial sampling in the computational basis.
    pub fn sample(&self, shots: u64, seed: u64) -> SampleSet {
        crate::sample::sample(self, shots, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::exact_evolution;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeMap;

    fn two_qubit_coupling() -> IsingHamiltonian {
        IsingHamiltonian {
            n: 2,
            h: BTreeMap::new(),
            j: [((0, 1), 1.0)].into_iter().collect(),
            offset: 0.0,
        }
    }

    #[test]
    fn plus_state_is_uniform() {
        let sv = Statevector::plus_state(3).unwrap();
        for a in sv.amps() {
            assert_abs_diff_eq!(a.re, 1.0 / 8.0f64.sqrt(), epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0);
        }
        assert_abs_diff_eq!(sv.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit_range_is_enforced() {
        assert!(Statevector::plus_state(0).is_err());
        assert!(Statevector::plus_state(21).is_err());
    }

    #[test]
    fn driver_on_basis_state_splits_evenly() {
        let mut sv = Statevector::basis_state(1, 0).unwrap();
        sv.apply_driver_evolution(std::f64::consts::FRAC_PI_4);
        let p = sv.probabilities();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cost_evolution_matches_dense_expm() {
        let h = two_qubit_coupling();
        let mut sv = Statevector::plus_state(2).unwrap();
        sv.apply_cost_evolution(&h, std::f64::consts::FRAC_PI_4);
        let reference =
            exact_evolution(&Statevector::plus_state(2).unwrap(), &h, 0.0, std::f64::consts::FRAC_PI_4)
                .unwrap();
        for (a, b) in sv.amps().iter().zip(reference.amps()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-10);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn driver_evolution_matches_dense_expm() {
        let h = IsingHamiltonian { n: 2, h: BTreeMap::new(), j: BTreeMap::new(), offset: 0.0 };
        let mut sv = Statevector::plus_state(2).unwrap();
        sv.rz(0.7, 0); // dephase so the test is not trivial
        let mut evolved = sv.clone();
        evolved.apply_driver_evolution(0.9);
        let reference = exact_evolution(&sv, &h, 1.0, 0.9).unwrap();
        for (a, b) in evolved.amps().iter().zip(reference.amps()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-10);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn evolutions_compose_additively() {
        let h = two_qubit_coupling();
        let mut a = Statevector::plus_state(2).unwrap();
        a.apply_cost_evolution(&h, 0.3);
        a.apply_cost_evolution(&h, 0.5);
        let mut b = Statevector::plus_state(2).unwrap();
        b.apply_cost_evolution(&h, 0.8);
        assert_abs_diff_eq!(a.fidelity(&b).unwrap(), 1.0, epsilon = 1e-12);

        let mut a = Statevector::plus_state(2).unwrap();
        a.apply_driver_evolution(0.3);
        a.apply_driver_evolution(0.5);
        let mut b = Statevector::plus_state(2).unwrap();
        b.apply_driver_evolution(0.8);
        for (x, y) in a.amps().iter().zip(b.amps()) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = 1e-12);
            assert_abs_diff_eq!(x.im, y.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn norm_is_preserved_over_many_layers() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut sv = Statevector::plus_state(4).unwrap();
        for _ in 0..10_000 {
            let theta = rng.gen::<f64>() * 6.0 - 3.0;
            match rng.gen_range(0..3) {
                0 => sv.rx(theta, rng.gen_range(0..4)),
                1 => sv.rz(theta, rng.gen_range(0..4)),
                _ => {
                    let a = rng.gen_range(0..4);
                    let b = (a + 1 + rng.gen_range(0..3)) % 4;
                    sv.rzz(theta, a, b);
                }
            }
        }
        assert_abs_diff_eq!(sv.norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn driver_expectation_on_plus_state_is_n() {
        let sv = Statevector::plus_state(5).unwrap();
        assert_abs_diff_eq!(sv.expectation(Observable::Driver), 5.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sv.expectation(Observable::DriverSquared), 25.0, epsilon = 1e-9);
    }

    #[test]
    fn cost_expectation_on_basis_state_is_classical_energy() {
        let h = two_qubit_coupling();
        for idx in 0..4u64 {
            let sv = Statevector::basis_state(2, idx).unwrap();
            let expected = h.cost(crate::bits::Bits::new(idx, 2));
            assert_abs_diff_eq!(sv.expectation(Observable::Cost(&h)), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn rz_convention_phases_bit_zero_negatively() {
        let mut sv = Statevector::plus_state(1).unwrap();
        sv.rz(std::f64::consts::PI, 0);
        // exp(-i pi/2) / exp(+i pi/2) on the two amplitudes.
        assert_abs_diff_eq!(sv.amps()[0].im, -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(sv.amps()[1].im, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn fused_phase_terms_equal_individual_gates() {
        let mut a = Statevector::plus_state(3).unwrap();
        a.rx(0.4, 1);
        let mut b = a.clone();
        a.rz(0.3, 0);
        a.rzz(0.7, 0, 2);
        a.rz(-0.2, 2);
        b.phase_terms(&[(0b001, 0.15), (0b101, 0.35), (0b100, -0.1)]);
        for (x, y) in a.amps().iter().zip(b.amps()) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = 1e-12);
            assert_abs_diff_eq!(x.im, y.im, epsilon = 1e-12);
        }
    }
}
