//! Problem instances: traveling salesman (TSP), capacitated-fleet vehicle
//! routing without capacities (VRP), and uncapacitated facility location
//! (FLP).
//!
//! Generators place points uniformly on the unit grid with a seeded RNG and
//! use Euclidean costs; explicit cost matrices can also be loaded from JSON.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Traveling salesman instance over a dense distance matrix.
///
/// With `fixed_depot` set (the default), city 0 is pinned to tour position 0
/// and only the remaining `(n-1)^2` assignment variables are encoded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TspInstance {
    pub dist: Vec<Vec<f64>>,
    #[serde(default = "default_true")]
    pub fixed_depot: bool,
}

/// Vehicle routing instance on directed edge weights; node 0 is the depot
/// and `fleet` vehicles leave and return to it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VrpInstance {
    pub weights: Vec<Vec<f64>>,
    pub fleet: usize,
}

/// Facility location instance: `setup[j]` is the cost of opening facility
/// `j`, `service[i][j]` the cost of serving customer `i` from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlpInstance {
    pub setup: Vec<f64>,
    pub service: Vec<Vec<f64>>,
}

fn default_true() -> bool {
    true
}

/// Any supported instance, tagged for JSON files (`"type": "tsp" | "vrp" |
/// "flp"`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Instance {
    Tsp(TspInstance),
    Vrp(VrpInstance),
    Flp(FlpInstance),
}

fn check_square(name: &str, m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{name} matrix is not square: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "{name}[{i}][{j}] = {v} is not finite and nonnegative"
                )));
            }
            if i == j && v != 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "{name} diagonal entry [{i}][{i}] = {v} must be zero"
                )));
            }
        }
    }
    Ok(())
}

impl TspInstance {
    pub fn n_cities(&self) -> usize {
        self.dist.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cities() < 3 {
            return Err(Error::InvalidInstance(format!(
                "tsp needs at least 3 cities, got {}",
                self.n_cities()
            )));
        }
        check_square("dist", &self.dist)
    }

    /// Seeded uniform placement on the unit grid, Euclidean distances.
    pub fn random_grid(n_cities: usize, seed: u64) -> Self {
        let pts = grid_points(n_cities, seed);
        TspInstance { dist: euclidean_matrix(&pts), fixed_depot: true }
    }
}

impl VrpInstance {
    pub fn n_nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_nodes();
        if n < 2 {
            return Err(Error::InvalidInstance(format!("vrp needs at least 2 nodes, got {n}")));
        }
        if self.fleet < 1 || self.fleet > n - 1 {
            return Err(Error::InvalidInstance(format!(
                "fleet size {} outside 1..={}",
                self.fleet,
                n - 1
            )));
        }
        check_square("weights", &self.weights)
    }

    pub fn random_grid(n_nodes: usize, fleet: usize, seed: u64) -> Self {
        let pts = grid_points(n_nodes, seed);
        VrpInstance { weights: euclidean_matrix(&pts), fleet }
    }
}

impl FlpInstance {
    pub fn n_customers(&self) -> usize {
        self.service.len()
    }

    pub fn n_facilities(&self) -> usize {
        self.setup.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_customers() == 0 || self.n_facilities() == 0 {
            return Err(Error::InvalidInstance(
                "flp needs at least one customer and one facility".into(),
            ));
        }
        for (j, &f) in self.setup.iter().enumerate() {
            if !f.is_finite() || f < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "setup[{j}] = {f} is not finite and nonnegative"
                )));
            }
        }
        for (i, row) in self.service.iter().enumerate() {
            if row.len() != self.n_facilities() {
                return Err(Error::InvalidInstance(format!(
                    "service row {i} has {} entries, expected {}",
                    row.len(),
                    self.n_facilities()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "service[{i}][{j}] = {c} is not finite and nonnegative"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Customers and facilities placed on the unit grid; service costs are
    /// Euclidean, setup costs uniform in [0.25, 0.75].
    pub fn random_grid(n_customers: usize, n_facilities: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let customers: Vec<(f64, f64)> =
            (0..n_customers).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let facilities: Vec<(f64, f64)> =
            (0..n_facilities).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let setup: Vec<f64> = (0..n_facilities).map(|_| 0.25 + 0.5 * rng.gen::<f64>()).collect();
        let service = customers
            .iter()
            .map(|&c| facilities.iter().map(|&f| dist(c, f)).collect())
            .collect();
        FlpInstance { setup, service }
    }
}

impl Instance {
    pub fn validate(&self) -> Result<()> {
        match self {
            Instance::Tsp(t) => t.validate(),
            Instance::Vrp(v) => v.validate(),
            Instance::Flp(f) => f.validate(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Tsp(_) => "tsp",
            Instance::Vrp(_) => "vrp",
            Instance::Flp(_) => "flp",
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(s)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Instance::from_json(&std::fs::read_to_string(path)?)
    }
}

fn grid_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect()
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn euclidean_matrix(pts: &[(f64, f64)]) -> Vec<Vec<f64>> {
    pts.iter().map(|&a| pts.iter().map(|&b| dist(a, b)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = TspInstance::random_grid(5, 11);
        let b = TspInstance::random_grid(5, 11);
        assert_eq!(a.dist, b.dist);
        let c = TspInstance::random_grid(5, 12);
        assert_ne!(a.dist, c.dist);
    }

    #[test]
    fn generated_instances_validate() {
        TspInstance::random_grid(5, 1).validate().unwrap();
        VrpInstance::random_grid(4, 2, 1).validate().unwrap();
        FlpInstance::random_grid(5, 2, 1).validate().unwrap();
    }

    #[test]
    fn rejects_bad_matrices() {
        let t = TspInstance { dist: vec![vec![0.0, 1.0], vec![1.0, 0.0]], fixed_depot: true };
        assert!(t.validate().is_err());

        let t = TspInstance {
            dist: vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 2.0], vec![2.0, 2.0, 0.0]],
            fixed_depot: true,
        };
        assert!(t.validate().is_err());

        let v = VrpInstance { weights: vec![vec![0.0, 1.0], vec![1.0, 0.0]], fleet: 2 };
        assert!(v.validate().is_err());
    }

    #[test]
    fn json_roundtrip_with_type_tag() {
        let inst = Instance::Vrp(VrpInstance::random_grid(4, 2, 3));
        let s = serde_json::to_string(&inst).unwrap();
        assert!(s.contains("\"type\":\"vrp\""));
        let back = Instance::from_json(&s).unwrap();
        assert_eq!(back.kind(), "vrp");
    }
}
