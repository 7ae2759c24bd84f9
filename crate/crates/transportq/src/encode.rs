//! Encoders from problem instances to penalized binary programs.
//!
//! All three encoders follow the same recipe: a linear or quadratic cost
//! objective over 0/1 assignment variables plus equality one-hot / degree
//! constraints. Constraints are stored symbolically on the program; the
//! QUBO stage turns them into squared penalties.

use crate::instances::{FlpInstance, Instance, TspInstance, VrpInstance};
use crate::program::{BinaryProgram, CycleCover, LeqPair, LinearConstraint};
use crate::Result;

/// Encodes any instance through the matching problem encoder.
pub fn encode(instance: &Instance) -> Result<BinaryProgram> {
    match instance {
        Instance::Tsp(t) => encode_tsp(t),
        Instance::Vrp(v) => encode_vrp(v),
        Instance::Flp(f) => encode_flp(f),
    }
}

/// Position-based TSP encoding.
///
/// Variable `x[r][c]` assigns city `c` to tour position `r`. With
/// `fixed_depot`, city 0 is pinned to position 0 and only positions and
/// cities `1..n` are encoded, giving `(n-1)^2` variables; otherwise the full
/// `n^2` grid is used. Row and column one-hot constraints make the
/// assignment a permutation; the objective sums distances between cities at
/// cyclically adjacent positions.
pub fn encode_tsp(inst: &TspInstance) -> Result<BinaryProgram> {
    inst.validate()?;
    let n = inst.n_cities();
    let d = &inst.dist;

    let pairwise_abs: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| d[i][j].abs())
        .sum();

    let bp = if inst.fixed_depot {
        let k = n - 1;
        let var = |r: usize, c: usize| (r - 1) * k + (c - 1);
        let labels = (1..n)
            .flat_map(|r| (1..n).map(move |c| format!("x[{r}][{c}]")))
            .collect();
        let mut bp = BinaryProgram::new(k * k, labels);

        // Depot links: position 0 is city 0.
        for c in 1..n {
            bp.add_linear(var(1, c), d[0][c]);
            bp.add_linear(var(n - 1, c), d[c][0]);
        }
        // Free adjacent positions.
        for r in 1..n - 1 {
            for c1 in 1..n {
                for c2 in 1..n {
                    if c1 != c2 {
                        bp.add_quadratic(var(r, c1), var(r + 1, c2), d[c1][c2]);
                    }
                }
            }
        }
        for r in 1..n {
            bp.eq_constraints.push(LinearConstraint {
                terms: (1..n).map(|c| (var(r, c), 1.0)).collect(),
                rhs: 1.0,
                label: format!("position {r} one-hot"),
            });
        }
        for c in 1..n {
            bp.eq_constraints.push(LinearConstraint {
                terms: (1..n).map(|r| (var(r, c), 1.0)).collect(),
                rhs: 1.0,
                label: format!("city {c} one-hot"),
            });
        }
        bp
    } else {
        let var = |r: usize, c: usize| r * n + c;
        let labels = (0..n)
            .flat_map(|r| (0..n).map(move |c| format!("x[{r}][{c}]")))
            .collect();
        let mut bp = BinaryProgram::new(n * n, labels);

        for r in 0..n {
            let rn = (r + 1) % n;
            for c1 in 0..n {
                for c2 in 0..n {
                    if c1 != c2 {
                        bp.add_quadratic(var(r, c1), var(rn, c2), d[c1][c2]);
                    }
                }
            }
        }
        for r in 0..n {
            bp.eq_constraints.push(LinearConstraint {
                terms: (0..n).map(|c| (var(r, c), 1.0)).collect(),
                rhs: 1.0,
                label: format!("position {r} one-hot"),
            });
        }
        for c in 0..n {
            bp.eq_constraints.push(LinearConstraint {
                terms: (0..n).map(|r| (var(r, c), 1.0)).collect(),
                rhs: 1.0,
                label: format!("city {c} one-hot"),
            });
        }
        bp
    };

    let mut bp = bp;
    bp.pairwise_abs_cost = pairwise_abs;
    Ok(bp)
}

/// Directed-edge VRP encoding.
///
/// Variable `e[i][j]` selects the directed edge `i -> j`, giving `n (n-1)`
/// variables. Constraints: out-degree 1 for every customer, flow
/// conservation at every node, and depot in/out degree equal to the fleet
/// size. Subtour exclusion is not penalized; it is recorded as a
/// decoder-side cycle-cover tag.
///
/// Edge variables are grouped by source node, with the edge to the
/// successor node `(i+1) mod n` last in each group. That ordering makes
/// index-adjacent variables always share a constraint, so the Ising form
/// carries a complete nearest-neighbor coupling chain for the linear-chain
/// ansatz.
pub fn encode_vrp(inst: &VrpInstance) -> Result<BinaryProgram> {
    inst.validate()?;
    let n = inst.n_nodes();
    let w = &inst.weights;
    let k = inst.fleet as f64;

    let mut edges = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        let succ = (i + 1) % n;
        for j in 0..n {
            if j != i && j != succ {
                edges.push((i, j));
            }
        }
        edges.push((i, succ));
    }

    let labels = edges.iter().map(|&(i, j)| format!("e[{i}][{j}]")).collect();
    let mut bp = BinaryProgram::new(edges.len(), labels);
    let var_of = |a: usize, b: usize| edges.iter().position(|&e| e == (a, b)).unwrap();

    for (v, &(i, j)) in edges.iter().enumerate() {
        bp.add_linear(v, w[i][j]);
    }

    for i in 1..n {
        bp.eq_constraints.push(LinearConstraint {
            terms: (0..n).filter(|&j| j != i).map(|j| (var_of(i, j), 1.0)).collect(),
            rhs: 1.0,
            label: format!("out-degree node {i}"),
        });
    }
    for i in 0..n {
        let mut terms: Vec<(usize, f64)> =
            (0..n).filter(|&j| j != i).map(|j| (var_of(i, j), 1.0)).collect();
        terms.extend((0..n).filter(|&j| j != i).map(|j| (var_of(j, i), -1.0)));
        bp.eq_constraints.push(LinearConstraint {
            terms,
            rhs: 0.0,
            label: format!("flow node {i}"),
        });
    }
    bp.eq_constraints.push(LinearConstraint {
        terms: (1..n).map(|j| (var_of(0, j), 1.0)).collect(),
        rhs: k,
        label: "depot out-degree".into(),
    });
    bp.eq_constraints.push(LinearConstraint {
        terms: (1..n).map(|j| (var_of(j, 0), 1.0)).collect(),
        rhs: k,
        label: "depot in-degree".into(),
    });

    bp.cycle_cover = Some(CycleCover { n_nodes: n, edges });
    bp.pairwise_abs_cost = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| w[i][j].abs())
        .sum();
    Ok(bp)
}

/// Uncapacitated facility location encoding.
///
/// Variables: `x[i][j]` assigns customer `i` to facility `j` (row-major,
/// first `N*M` indices), `y[j]` opens facility `j` (last `M` indices). Each
/// customer is one-hot assigned; `x[i][j] <= y[j]` ("open if assigned") is
/// an exact quadratic penalty, so no slack variables are needed.
pub fn encode_flp(inst: &FlpInstance) -> Result<BinaryProgram> {
    inst.validate()?;
    let nc = inst.n_customers();
    let nf = inst.n_facilities();
    let xvar = |i: usize, j: usize| i * nf + j;
    let yvar = |j: usize| nc * nf + j;

    let mut labels: Vec<String> = (0..nc)
        .flat_map(|i| (0..nf).map(move |j| format!("x[{i}][{j}]")))
        .collect();
    labels.extend((0..nf).map(|j| format!("y[{j}]")));
    let mut bp = BinaryProgram::new(nc * nf + nf, labels);

    for i in 0..nc {
        for j in 0..nf {
            bp.add_linear(xvar(i, j), inst.service[i][j]);
        }
    }
    for j in 0..nf {
        bp.add_linear(yvar(j), inst.setup[j]);
    }
    for i in 0..nc {
        bp.eq_constraints.push(LinearConstraint {
            terms: (0..nf).map(|j| (xvar(i, j), 1.0)).collect(),
            rhs: 1.0,
            label: format!("assignment customer {i}"),
        });
    }
    for i in 0..nc {
        for j in 0..nf {
            bp.leq_pairs.push(LeqPair {
                x: xvar(i, j),
                y: yvar(j),
                label: format!("open-if-assigned x[{i}][{j}]"),
            });
        }
    }

    bp.pairwise_abs_cost =
        inst.service.iter().flat_map(|row| row.iter()).map(|c| c.abs()).sum();
    Ok(bp)
}
