//! Penalized binary programs: a sparse polynomial objective over 0/1
//! variables plus the constraint structure the encoders emit.
//!
//! Equality constraints and `x <= y` pairs are turned into exact quadratic
//! penalties by [`crate::qubo::to_qubo`]; the cycle-cover tag is enforced by
//! the decoder only and never penalized.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;

/// Linear equality constraint `sum(coef * x_var) = rhs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
    pub label: String,
}

impl LinearConstraint {
    /// Signed residual `sum(coef * x_var) - rhs`.
    pub fn residual(&self, bits: Bits) -> f64 {
        let lhs: f64 =
            self.terms.iter().map(|&(v, c)| c * bits.bit(v) as f64).sum();
        lhs - self.rhs
    }
}

/// `x <= y` on binary variables, penalized exactly as `x (1 - y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeqPair {
    pub x: usize,
    pub y: usize,
    pub label: String,
}

/// Decoder-side tag: every directed cycle in the selected edge set must pass
/// through node 0 (the depot). Edge `edges[k]` is selected by variable `k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleCover {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

/// A binary program with a quadratic objective and explicit constraints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinaryProgram {
    pub num_vars: usize,
    /// Objective linear terms, variable index -> coefficient.
    pub linear: BTreeMap<usize, f64>,
    /// Objective quadratic terms, keys ordered `i < j`.
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub eq_constraints: Vec<LinearConstraint>,
    pub leq_pairs: Vec<LeqPair>,
    pub cycle_cover: Option<CycleCover>,
    pub var_labels: Vec<String>,
    /// Sum of absolute pairwise cost coefficients of the source instance;
    /// basis for the penalty weight.
    pub pairwise_abs_cost: f64,
}

impl BinaryProgram {
    pub fn new(num_vars: usize, var_labels: Vec<String>) -> Self {
        debug_assert_eq!(var_labels.len(), num_vars);
        BinaryProgram {
            num_vars,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            eq_constraints: Vec::new(),
            leq_pairs: Vec::new(),
            cycle_cover: None,
            var_labels,
            pairwise_abs_cost: 0.0,
        }
    }

    pub fn add_linear(&mut self, var: usize, coef: f64) {
        if coef != 0.0 {
            *self.linear.entry(var).or_insert(0.0) += coef;
        }
    }

    pub fn add_quadratic(&mut self, a: usize, b: usize, coef: f64) {
        assert_ne!(a, b, "quadratic terms need distinct variables");
        if coef != 0.0 {
            let key = (a.min(b), a.max(b));
            *self.quadratic.entry(key).or_insert(0.0) += coef;
        }
    }

    /// Classical objective value of a bitstring (no penalties).
    pub fn objective(&self, bits: Bits) -> f64 {
        let mut total = 0.0;
        for (&v, &c) in &self.linear {
            total += c * bits.bit(v) as f64;
        }
        for (&(a, b), &c) in &self.quadratic {
            total += c * (bits.bit(a) * bits.bit(b)) as f64;
        }
        total
    }

    /// Penalty measure: sum of squared equality residuals plus `x (1 - y)`
    /// over the `<=` pairs. Zero iff all penalized constraints hold.
    pub fn violation(&self, bits: Bits) -> f64 {
        let mut total = 0.0;
        for c in &self.eq_constraints {
            let r = c.residual(bits);
            total += r * r;
        }
        for p in &self.leq_pairs {
            total += (bits.bit(p.x) * (1 - bits.bit(p.y))) as f64;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_keys_are_ordered_and_accumulate() {
        let mut bp = BinaryProgram::new(3, vec!["a".into(), "b".into(), "c".into()]);
        bp.add_quadratic(2, 0, 1.5);
        bp.add_quadratic(0, 2, 0.5);
        assert_eq!(bp.quadratic.len(), 1);
        assert_eq!(bp.quadratic[&(0, 2)], 2.0);
    }

    #[test]
    fn objective_and_violation() {
        let mut bp = BinaryProgram::new(2, vec!["x".into(), "y".into()]);
        bp.add_linear(0, 2.0);
        bp.add_quadratic(0, 1, 3.0);
        bp.eq_constraints.push(LinearConstraint {
            terms: vec![(0, 1.0), (1, 1.0)],
            rhs: 1.0,
            label: "one-hot".into(),
        });
        let b11 = Bits::new(0b11, 2);
        assert_eq!(bp.objective(b11), 5.0);
        assert_eq!(bp.violation(b11), 1.0);
        let b01 = Bits::new(0b01, 2);
        assert_eq!(bp.objective(b01), 2.0);
        assert_eq!(bp.violation(b01), 0.0);
    }
}
