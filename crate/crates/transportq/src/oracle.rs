//! Exhaustive enumeration oracle for small programs (n <= 24).
//!
//! The enumeration range is partitioned across worker threads; partial
//! results merge deterministically (lowest cost wins, ties broken by lowest
//! basis index), so the outcome is independent of thread scheduling.

use rayon::prelude::*;

use crate::bits::Bits;
use crate::{Error, Result};

pub const MAX_ORACLE_QUBITS: usize = 24;

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Best feasible bitstring and its cost; `None` when nothing is feasible.
    pub best: Option<(Bits, f64)>,
    pub feasible_count: u64,
    /// Full cost table over all basis states, when requested.
    pub cost_table: Option<Vec<f64>>,
}

pub fn brute_force<C, F>(
    n: usize,
    cost: C,
    feasible: F,
    with_table: bool,
) -> Result<OracleResult>
where
    C: Fn(Bits) -> f64 + Sync,
    F: Fn(Bits) -> bool + Sync,
{
    if n == 0 || n > MAX_ORACLE_QUBITS {
        return Err(Error::QubitRange(n, 1, MAX_ORACLE_QUBITS));
    }
    let dim = 1u64 << n;

    let (best, feasible_count) = (0..dim)
        .into_par_iter()
        .fold(
            || (None::<(u64, f64)>, 0u64),
            |(mut best, mut count), raw| {
                let bits = Bits::new(raw, n);
                if feasible(bits) {
                    count += 1;
                    let c = cost(bits);
                    best = match best {
                        Some((bi, bc)) if bc < c || (bc == c && bi < raw) => Some((bi, bc)),
                        _ => Some((raw, c)),
                    };
                }
                (best, count)
            },
        )
        .reduce(
            || (None, 0),
            |(a, ca), (b, cb)| {
                let best = match (a, b) {
                    (Some((ai, ac)), Some((bi, bc))) => {
                        if bc < ac || (bc == ac && bi < ai) {
                            Some((bi, bc))
                        } else {
                            Some((ai, ac))
                        }
                    }
                    (x, None) => x,
                    (None, y) => y,
                };
                (best, ca + cb)
            },
        );

    let cost_table = with_table.then(|| {
        (0..dim).into_par_iter().map(|raw| cost(Bits::new(raw, n))).collect()
    });

    Ok(OracleResult {
        best: best.map(|(raw, c)| (Bits::new(raw, n), c)),
        feasible_count,
        cost_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_known_minimum() {
        // cost = number of set bits, minimized at 0.
        let r = brute_force(4, |b| b.ones().count() as f64, |_| true, true).unwrap();
        let (best, cost) = r.best.unwrap();
        assert_eq!(best.value, 0);
        assert_eq!(cost, 0.0);
        assert_eq!(r.feasible_count, 16);
        assert_eq!(r.cost_table.unwrap().len(), 16);
    }

    #[test]
    fn respects_feasibility_filter() {
        // Only odd indices feasible; cheapest odd index under -value is 15.
        let r = brute_force(4, |b| -(b.value as f64), |b| b.value % 2 == 1, false).unwrap();
        let (best, cost) = r.best.unwrap();
        assert_eq!(best.value, 15);
        assert_eq!(cost, -15.0);
        assert_eq!(r.feasible_count, 8);
    }

    #[test]
    fn ties_break_toward_lower_index() {
        let r = brute_force(6, |_| 1.0, |_| true, false).unwrap();
        assert_eq!(r.best.unwrap().0.value, 0);
    }

    #[test]
    fn no_feasible_gives_none() {
        let r = brute_force(3, |_| 0.0, |_| false, false).unwrap();
        assert!(r.best.is_none());
        assert_eq!(r.feasible_count, 0);
    }

    #[test]
    fn deterministic_across_runs() {
        let cost = |b: Bits| ((b.value * 2654435761) % 97) as f64;
        let a = brute_force(12, cost, |_| true, false).unwrap();
        let b = brute_force(12, cost, |_| true, false).unwrap();
        assert_eq!(a.best.unwrap().0, b.best.unwrap().0);
    }

    #[test]
    fn rejects_oversized_problems() {
        assert!(brute_force(25, |_| 0.0, |_| true, false).is_err());
    }
}
