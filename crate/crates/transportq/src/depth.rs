//! Two-qubit depth accounting under a hardware topology.
//!
//! Gates are scheduled greedily as soon as both wires are free (ASAP). On
//! the linear topology a non-adjacent pair is routed first: a chain of
//! SWAPs moves the qubit at the lower physical position up until the pair
//! is adjacent. Each SWAP counts as one two-qubit gate and the layout
//! change persists, so later gates see the moved qubits.

use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    AllToAll,
    Linear,
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Topology::AllToAll => write!(f, "all-to-all"),
            Topology::Linear => write!(f, "linear"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepthReport {
    pub two_qubit_depth: usize,
    pub two_qubit_count: usize,
    pub topology: Topology,
}

struct Scheduler {
    finish: Vec<usize>,
    count: usize,
}

impl Scheduler {
    fn new(n: usize) -> Self {
        Scheduler { finish: vec![0; n], count: 0 }
    }

    fn place(&mut self, a: usize, b: usize) {
        let t = 1 + self.finish[a].max(self.finish[b]);
        self.finish[a] = t;
        self.finish[b] = t;
        self.count += 1;
    }

    fn depth(&self) -> usize {
        self.finish.iter().copied().max().unwrap_or(0)
    }
}

pub fn depth_report(circuit: &ParamCircuit, topology: Topology) -> DepthReport {
    depth_of_pairs(circuit.n, &circuit.two_qubit_pairs(), topology)
}

pub fn depth_of_pairs(n: usize, pairs: &[(usize, usize)], topology: Topology) -> DepthReport {
    let mut sched = Scheduler::new(n);
    match topology {
        Topology::AllToAll => {
            for &(a, b) in pairs {
                sched.place(a, b);
            }
        }
        Topology::Linear => {
            // pos[logical] = physical wire, wire[physical] = logical qubit.
            let mut pos: Vec<usize> = (0..n).collect();
            let mut wire: Vec<usize> = (0..n).collect();
            for &(a, b) in pairs {
                let mut lo = pos[a].min(pos[b]);
                let hi = pos[a].max(pos[b]);
                while hi - lo > 1 {
                    sched.place(lo, lo + 1);
                    wire.swap(lo, lo + 1);
                    pos[wire[lo]] = lo;
                    pos[wire[lo + 1]] = lo + 1;
                    lo += 1;
                }
                sched.place(lo, hi);
            }
        }
    }
    DepthReport { two_qubit_depth: sched.depth(), two_qubit_count: sched.count, topology }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_to_all(n: usize, pairs: &[(usize, usize)]) -> DepthReport {
        depth_of_pairs(n, pairs, Topology::AllToAll)
    }

    fn linear(n: usize, pairs: &[(usize, usize)]) -> DepthReport {
        depth_of_pairs(n, pairs, Topology::Linear)
    }

    #[test]
    fn triangle_serializes_to_depth_three() {
        let r = all_to_all(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(r.two_qubit_depth, 3);
        assert_eq!(r.two_qubit_count, 3);
    }

    #[test]
    fn disjoint_pairs_run_in_one_slice() {
        let r = all_to_all(4, &[(0, 1), (2, 3)]);
        assert_eq!(r.two_qubit_depth, 1);
    }

    #[test]
    fn interleaved_chain_has_depth_two() {
        // Even pairs then odd pairs, the linear-chain cost layer shape.
        let r = all_to_all(5, &[(0, 1), (2, 3), (1, 2), (3, 4)]);
        assert_eq!(r.two_qubit_depth, 2);
        assert_eq!(r.two_qubit_count, 4);
    }

    #[test]
    fn sequential_chain_has_full_depth() {
        let r = all_to_all(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(r.two_qubit_depth, 3);
    }

    #[test]
    fn empty_circuit_has_zero_depth() {
        let r = all_to_all(4, &[]);
        assert_eq!(r.two_qubit_depth, 0);
        assert_eq!(r.two_qubit_count, 0);
    }

    #[test]
    fn linear_routing_inserts_swaps() {
        // (0, 2) on a line: one swap to make them adjacent, then the gate.
        let r = linear(3, &[(0, 2)]);
        assert_eq!(r.two_qubit_count, 2);
        assert_eq!(r.two_qubit_depth, 2);
        // Adjacent pair needs no routing.
        let r = linear(3, &[(1, 2)]);
        assert_eq!(r.two_qubit_count, 1);
    }

    #[test]
    fn linear_layout_persists_between_gates() {
        // First (0, 2) drags qubit 0 next to 2; the repeat is then free of
        // swaps.
        let r = linear(3, &[(0, 2), (0, 2)]);
        assert_eq!(r.two_qubit_count, 3);

        // Without persistence the second gate would need a swap again.
        let fresh = linear(3, &[(0, 2)]);
        assert_eq!(fresh.two_qubit_count, 2);
    }

    #[test]
    fn linear_distant_pair_swap_count() {
        // Distance d needs d-1 swaps plus the gate itself.
        let r = linear(6, &[(0, 5)]);
        assert_eq!(r.two_qubit_count, 5);
        assert_eq!(r.two_qubit_depth, 5);
    }

    fn pair_strategy(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
        prop::collection::vec(
            (0..n, 0..n).prop_filter_map("distinct", |(a, b)| {
                (a != b).then_some((a.min(b), a.max(b)))
            }),
            0..40,
        )
    }

    proptest! {
        #[test]
        fn depth_bounds_hold(n in 3usize..8, pairs in pair_strategy(7)) {
            let pairs: Vec<_> = pairs
                .into_iter()
                .filter(|&(_, b)| b < n)
                .collect();
            for topology in [Topology::AllToAll, Topology::Linear] {
                let r = depth_of_pairs(n, &pairs, topology);
                prop_assert!(r.two_qubit_depth <= r.two_qubit_count);
                let per_slice = n / 2;
                let lower = r.two_qubit_count.div_ceil(per_slice);
                prop_assert!(r.two_qubit_depth >= lower);
            }
        }

        #[test]
        fn depth_is_monotone_under_append(
            n in 3usize..8,
            head in pair_strategy(7),
            tail in pair_strategy(7),
        ) {
            let head: Vec<_> = head.into_iter().filter(|&(_, b)| b < n).collect();
            let tail: Vec<_> = tail.into_iter().filter(|&(_, b)| b < n).collect();
            let mut both = head.clone();
            both.extend(&tail);
            for topology in [Topology::AllToAll, Topology::Linear] {
                let a = depth_of_pairs(n, &head, topology);
                let b = depth_of_pairs(n, &both, topology);
                prop_assert!(b.two_qubit_depth >= a.two_qubit_depth);
                prop_assert!(b.two_qubit_count >= a.two_qubit_count);
            }
        }
    }
}
