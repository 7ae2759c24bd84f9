//! Feasibility checking of sampled bitstrings against a binary program.
//!
//! A bitstring is feasible iff every equality constraint holds, every
//! `x <= y` pair holds, and (when the program carries a cycle-cover tag)
//! the selected edges contain no cycle that avoids the depot.

use crate::bits::Bits;
use crate::program::{BinaryProgram, CycleCover};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// Classical (un-penalized, un-normalized) objective; present only for
    /// feasible bitstrings.
    pub objective: Option<f64>,
}

/// Fast feasibility test without report allocation.
pub fn is_feasible(bp: &BinaryProgram, bits: Bits) -> bool {
    if bp.eq_constraints.iter().any(|c| c.residual(bits) != 0.0) {
        return false;
    }
    if bp.leq_pairs.iter().any(|p| bits.bit(p.x) == 1 && bits.bit(p.y) == 0) {
        return false;
    }
    match &bp.cycle_cover {
        Some(cover) => depot_free_cycle(cover, bits).is_none(),
        None => true,
    }
}

/// Full feasibility report with per-constraint violations.
pub fn decode_and_check(bp: &BinaryProgram, bits: Bits) -> Result<FeasibilityReport> {
    if bits.len != bp.num_vars {
        return Err(Error::BitLength { expected: bp.num_vars, got: bits.len });
    }

    let mut violations = Vec::new();
    for c in &bp.eq_constraints {
        let r = c.residual(bits);
        if r != 0.0 {
            violations.push(Violation {
                constraint: c.label.clone(),
                detail: format!("residual {r}"),
            });
        }
    }
    for p in &bp.leq_pairs {
        if bits.bit(p.x) == 1 && bits.bit(p.y) == 0 {
            violations.push(Violation {
                constraint: p.label.clone(),
                detail: "assigned to a closed facility".into(),
            });
        }
    }
    if let Some(cover) = &bp.cycle_cover {
        if let Some(cycle) = depot_free_cycle(cover, bits) {
            violations.push(Violation {
                constraint: "subtour".into(),
                detail: format!("cycle avoiding depot: {cycle:?}"),
            });
        }
    }

    let feasible = violations.is_empty();
    let objective = feasible.then(|| bp.objective(bits));
    Ok(FeasibilityReport { feasible, violations, objective })
}

/// Returns some cycle through non-depot nodes only, if one exists in the
/// selected edge set. Peels nodes with zero in-degree (Kahn); any remaining
/// edge structure contains a cycle, which is then walked out.
fn depot_free_cycle(cover: &CycleCover, bits: Bits) -> Option<Vec<usize>> {
    let n = cover.n_nodes;
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for (k, &(i, j)) in cover.edges.iter().enumerate() {
        if bits.bit(k) == 1 && i != 0 && j != 0 {
            out[i].push(j);
            indeg[j] += 1;
        }
    }

    let mut stack: Vec<usize> = (1..n).filter(|&v| indeg[v] == 0).collect();
    let mut alive = vec![true; n];
    while let Some(v) = stack.pop() {
        alive[v] = false;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }

    let start = (1..n).find(|&v| alive[v] && !out[v].is_empty())?;
    let mut cycle = vec![start];
    let mut cur = start;
    loop {
        let next = *out[cur].iter().find(|&&w| alive[w])?;
        if next == start {
            return Some(cycle);
        }
        if cycle.contains(&next) {
            let pos = cycle.iter().position(|&v| v == next).unwrap();
            return Some(cycle[pos..].to_vec());
        }
        cycle.push(next);
        cur = next;
    }
}
