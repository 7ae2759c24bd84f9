//! Conditional value at risk over measured samples.
//!
//! `cvar_alpha` averages the best `ceil(alpha * shots)` energies of a
//! sample set, so `alpha = 1` recovers the plain expectation and small
//! `alpha` focuses the objective on the low-energy tail. The adaptive rule
//! ties `alpha` to circuit quality: a two-qubit depth `D` at per-gate
//! fidelity `f` gives an error weight `gamma = D / f^2` and
//! `alpha = min(1, 1 / sqrt(gamma))`.

use serde::{Deserialize, Serialize};

use crate::ising::IsingHamiltonian;
use crate::sample::SampleSet;
use crate::{Error, Result};

/// How the optimizer chooses its CVaR tail fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaMode {
    Fixed(f64),
    Adaptive(AdaptiveWord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdaptiveWord {
    Adaptive,
}

impl Default for AlphaMode {
    fn default() -> Self {
        AlphaMode::Adaptive(AdaptiveWord::Adaptive)
    }
}

/// Mean of the lowest `ceil(alpha * shots)` sampled energies, offset
/// included. At least one sample always contributes.
pub fn cvar_alpha(samples: &SampleSet, h_c: &IsingHamiltonian, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::Config(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if samples.shots == 0 {
        return Err(Error::Config("cannot take CVaR of an empty sample set".into()));
    }
    let mut k = ((alpha * samples.shots as f64).ceil() as u64).max(1);
    let mut ranked: Vec<(f64, u64)> =
        samples.iter().map(|(bits, count)| (h_c.cost(bits), count)).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = k;
    let mut sum = 0.0;
    for (cost, count) in ranked {
        let take = k.min(count);
        sum += cost * take as f64;
        k -= take;
        if k == 0 {
            break;
        }
    }
    Ok(sum / total as f64)
}

/// Adaptive tail fraction from a directly known two-qubit gate fidelity.
pub fn adaptive_alpha_from_fidelity(fid_cx: f64, two_qubit_depth: usize) -> f64 {
    if two_qubit_depth == 0 {
        return 1.0;
    }
    let gamma = two_qubit_depth as f64 / (fid_cx * fid_cx);
    (1.0 / gamma.sqrt()).min(1.0)
}

/// Adaptive tail fraction from a layer fidelity: a layer spreads over the
/// `n - 1` couplers of a line, so the per-gate fidelity is
/// `lf^(1 / (n - 1))`.
pub fn adaptive_alpha(layer_fidelity: f64, n: usize, two_qubit_depth: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Config(format!(
            "adaptive alpha needs at least 2 qubits, got {n}"
        )));
    }
    if !(layer_fidelity > 0.0 && layer_fidelity <= 1.0) {
        return Err(Error::Config(format!(
            "layer fidelity must lie in (0, 1], got {layer_fidelity}"
        )));
    }
    let fid_cx = layer_fidelity.powf(1.0 / (n as f64 - 1.0));
    Ok(adaptive_alpha_from_fidelity(fid_cx, two_qubit_depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn single_z() -> IsingHamiltonian {
        IsingHamiltonian {
            n: 1,
            h: [(0, 1.0)].into_iter().collect(),
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    fn counts(pairs: &[(u64, u64)]) -> SampleSet {
        let counts: BTreeMap<u64, u64> = pairs.iter().copied().collect();
        let shots = counts.values().sum();
        SampleSet { n: 1, shots, counts }
    }

    #[test]
    fn tail_mean_on_split_distribution() {
        // Energies: |0> -> +1, |1> -> -1, five shots each.
        let s = counts(&[(0, 5), (1, 5)]);
        let h = single_z();
        assert_abs_diff_eq!(cvar_alpha(&s, &h, 0.3).unwrap(), -1.0, epsilon = 1e-12);
        // ceil(0.8 * 10) = 8: five at -1 and three at +1.
        assert_abs_diff_eq!(cvar_alpha(&s, &h, 0.8).unwrap(), -0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(cvar_alpha(&s, &h, 1.0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tiny_alpha_still_takes_one_sample() {
        let s = counts(&[(0, 9999), (1, 1)]);
        let h = single_z();
        assert_abs_diff_eq!(cvar_alpha(&s, &h, 1e-9).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn offset_flows_through() {
        let mut h = single_z();
        h.offset = 10.0;
        let s = counts(&[(1, 4)]);
        assert_abs_diff_eq!(cvar_alpha(&s, &h, 0.5).unwrap(), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        let s = counts(&[(0, 1)]);
        let h = single_z();
        assert!(cvar_alpha(&s, &h, 0.0).is_err());
        assert!(cvar_alpha(&s, &h, 1.5).is_err());
        assert!(cvar_alpha(&s, &h, f64::NAN).is_err());
    }

    #[test]
    fn perfect_layer_fidelity_at_depth_100() {
        let alpha = adaptive_alpha(1.0, 16, 100).unwrap();
        assert_abs_diff_eq!(alpha, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn finite_gate_fidelity_at_depth_209() {
        let alpha = adaptive_alpha_from_fidelity(0.994, 209);
        assert_abs_diff_eq!(alpha, 0.994 / 209.0f64.sqrt(), epsilon = 1e-12);
        assert!((alpha - 0.0688).abs() < 1e-3);
    }

    #[test]
    fn shallow_circuits_clamp_to_one() {
        assert_abs_diff_eq!(adaptive_alpha_from_fidelity(1.0, 0), 1.0);
        assert_abs_diff_eq!(adaptive_alpha_from_fidelity(1.0, 1), 1.0);
        assert_abs_diff_eq!(adaptive_alpha_from_fidelity(0.999, 1), 0.999, epsilon = 1e-12);
    }

    #[test]
    fn alpha_mode_json_forms() {
        let fixed: AlphaMode = serde_json::from_str("0.25").unwrap();
        assert_eq!(fixed, AlphaMode::Fixed(0.25));
        let adaptive: AlphaMode = serde_json::from_str("\"adaptive\"").unwrap();
        assert_eq!(adaptive, AlphaMode::default());
        assert_eq!(serde_json::to_string(&adaptive).unwrap(), "\"adaptive\"");
    }

    fn sample_strategy() -> impl Strategy<Value = SampleSet> {
        prop::collection::btree_map(0u64..4, 1u64..50, 1..4).prop_map(|counts| {
            let shots = counts.values().sum();
            SampleSet { n: 2, shots, counts }
        })
    }

    proptest! {
        #[test]
        fn cvar_is_monotone_in_alpha(
            s in sample_strategy(),
            lo in 0.05f64..0.5,
            hi in 0.5f64..1.0,
        ) {
            let h = IsingHamiltonian {
                n: 2,
                h: [(0, 0.7), (1, -0.4)].into_iter().collect(),
                j: [((0, 1), 0.3)].into_iter().collect(),
                offset: 0.1,
            };
            let a = cvar_alpha(&s, &h, lo).unwrap();
            let b = cvar_alpha(&s, &h, hi).unwrap();
            prop_assert!(a <= b + 1e-12);

            let costs: Vec<f64> = s.iter().map(|(bits, _)| h.cost(bits)).collect();
            let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
            let mean = s
                .iter()
                .map(|(bits, c)| h.cost(bits) * c as f64)
                .sum::<f64>()
                / s.shots as f64;
            prop_assert!(a >= min - 1e-12 && b <= mean + 1e-12);
            let full = cvar_alpha(&s, &h, 1.0).unwrap();
            prop_assert!((full - mean).abs() < 1e-9);
        }
    }
}
