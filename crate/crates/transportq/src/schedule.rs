//! Discretized annealing schedules for `H(s) = (1-s) H_B + s H_C`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which point of each sub-interval the interpolation parameter is read at.
/// The default right-endpoint rule gives `s_k = (k+1)/N`, so the final step
/// applies the full cost Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EndpointRule {
    #[default]
    Right,
    Left,
    Mid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n_steps: usize,
    pub total_time: f64,
    pub rule: EndpointRule,
    /// Interpolation points `s_k`, one per step, in application order.
    pub points: Vec<f64>,
    /// Step duration `total_time / n_steps`.
    pub dt: f64,
}

/// Linear schedule with the default right-endpoint rule.
pub fn linear_schedule(n_steps: usize, total_time: f64) -> Result<Schedule> {
    linear_schedule_with_rule(n_steps, total_time, EndpointRule::Right)
}

pub fn linear_schedule_with_rule(
    n_steps: usize,
    total_time: f64,
    rule: EndpointRule,
) -> Result<Schedule> {
    if n_steps == 0 {
        return Err(Error::Config("schedule needs at least one step".into()));
    }
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(Error::Config(format!("total_time {total_time} must be positive")));
    }
    let n = n_steps as f64;
    let points = (0..n_steps)
        .map(|k| match rule {
            EndpointRule::Right => (k as f64 + 1.0) / n,
            EndpointRule::Left => k as f64 / n,
            EndpointRule::Mid => (k as f64 + 0.5) / n,
        })
        .collect();
    Ok(Schedule { n_steps, total_time, rule, points, dt: total_time / n })
}

impl Schedule {
    /// Same interpolation ramp sampled at `factor` times finer resolution;
    /// used to build compression targets at sub-step accuracy.
    pub fn refined(&self, factor: usize) -> Schedule {
        linear_schedule_with_rule(self.n_steps * factor, self.total_time, self.rule)
            .expect("refining a valid schedule cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_schedule_points() {
        let s = linear_schedule(10, 1.0).unwrap();
        assert_eq!(s.points.len(), 10);
        assert_abs_diff_eq!(s.points[0], 0.1);
        assert_abs_diff_eq!(s.points[9], 1.0);
        // dt * n_steps reproduces the total time exactly for the default.
        assert_eq!(s.dt * 10.0, 1.0);
    }

    #[test]
    fn endpoint_rules() {
        let l = linear_schedule_with_rule(4, 1.0, EndpointRule::Left).unwrap();
        assert_abs_diff_eq!(l.points[0], 0.0);
        assert_abs_diff_eq!(l.points[3], 0.75);
        let m = linear_schedule_with_rule(4, 1.0, EndpointRule::Mid).unwrap();
        assert_abs_diff_eq!(m.points[0], 0.125);
    }

    #[test]
    fn refined_covers_same_ramp() {
        let s = linear_schedule(10, 1.0).unwrap();
        let f = s.refined(2);
        assert_eq!(f.n_steps, 20);
        assert_abs_diff_eq!(f.dt, s.dt / 2.0);
        // After 2m fine steps the ramp has reached the same point as after
        // m coarse steps.
        assert_abs_diff_eq!(f.points[5], s.points[2]);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(linear_schedule(0, 1.0).is_err());
        assert!(linear_schedule(10, 0.0).is_err());
        assert!(linear_schedule(10, f64::NAN).is_err());
    }
}
