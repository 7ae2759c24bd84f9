//! Penalized, normalized QUBO form of a binary program.
//!
//! The penalty weight is `lambda = 2 * sum(|pairwise costs|)` of the source
//! instance. Each equality constraint `a.x = b` enters as
//! `lambda (a.x - b)^2`; each `x <= y` pair as `lambda x (1 - y)`. After
//! assembly every coefficient and the offset are divided by the maximum
//! absolute coefficient, so the spectrum is scale-normalized while the
//! argmin is unchanged.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::program::BinaryProgram;
use crate::{Error, Result};

/// Sparse symmetric QUBO. Diagonal keys `(i, i)` hold linear coefficients;
/// off-diagonal keys are ordered `i < j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Qubo {
    pub num_vars: usize,
    pub coeffs: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    /// Constraint penalty weight used during assembly (pre-normalization).
    pub penalty_weight: f64,
    /// Divisor applied to all coefficients and the offset.
    pub norm_factor: f64,
}

impl Qubo {
    /// Normalized QUBO cost of a bitstring (offset included).
    pub fn cost(&self, bits: Bits) -> f64 {
        let mut total = self.offset;
        for (&(i, j), &c) in &self.coeffs {
            if i == j {
                total += c * bits.bit(i) as f64;
            } else {
                total += c * (bits.bit(i) * bits.bit(j)) as f64;
            }
        }
        total
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Builds the normalized QUBO for a binary program.
///
/// Fails if the assembled matrix has no nonzero coefficient (e.g. an
/// all-zero cost instance, where the penalty weight is also zero).
pub fn to_qubo(bp: &BinaryProgram) -> Result<Qubo> {
    let lambda = 2.0 * bp.pairwise_abs_cost;
    let mut coeffs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut offset = 0.0;

    let mut add = |i: usize, j: usize, v: f64| {
        if v != 0.0 {
            let key = (i.min(j), i.max(j));
            *coeffs.entry(key).or_insert(0.0) += v;
        }
    };

    for (&v, &c) in &bp.linear {
        add(v, v, c);
    }
    for (&(a, b), &c) in &bp.quadratic {
        add(a, b, c);
    }
    for cons in &bp.eq_constraints {
        // lambda * (sum_i a_i x_i - b)^2, using x^2 = x.
        for &(i, a) in &cons.terms {
            add(i, i, lambda * (a * a - 2.0 * cons.rhs * a));
        }
        for (k, &(i, a)) in cons.terms.iter().enumerate() {
            for &(j, b) in &cons.terms[k + 1..] {
                add(i, j, 2.0 * lambda * a * b);
            }
        }
        offset += lambda * cons.rhs * cons.rhs;
    }
    for pair in &bp.leq_pairs {
        // lambda * x (1 - y)
        add(pair.x, pair.x, lambda);
        add(pair.x, pair.y, -lambda);
    }

    coeffs.retain(|_, v| *v != 0.0);
    let max_abs = coeffs.values().fold(0.0f64, |m, c| m.max(c.abs()));
    if max_abs == 0.0 {
        return Err(Error::Encoding(
            "all QUBO coefficients are zero after assembly".into(),
        ));
    }
    for v in coeffs.values_mut() {
        *v /= max_abs;
    }
    offset /= max_abs;

    Ok(Qubo {
        num_vars: bp.num_vars,
        coeffs,
        offset,
        penalty_weight: lambda,
        norm_factor: max_abs,
    })
}
