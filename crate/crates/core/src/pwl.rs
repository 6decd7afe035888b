use serde::{Deserialize, Serialize};

/// Breakpoints closer than this in `theta` are treated as the same point.
pub const BREAKPOINT_DEDUP: f64 = 1e-12;

/// Piecewise-linear overestimator of `exp` on `[theta_min, 0]`.
///
/// Built from chords of `exp` between consecutive breakpoints `(t, e^t)`, so it
/// is exact at every breakpoint, nondecreasing, and never below `exp` on its
/// domain. Inserting a breakpoint can only lower it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseUpperBound {
    points: Vec<(f64, f64)>,
}

impl PiecewiseUpperBound {
    /// Single secant from `(theta_min, e^theta_min)` to `(0, 1)`.
    pub fn new(theta_min: f64) -> Self {
        let mut points = vec![(0.0, 1.0)];
        if theta_min < -BREAKPOINT_DEDUP {
            points.insert(0, (theta_min, theta_min.exp()));
        }
        Self { points }
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn theta_min(&self) -> f64 {
        self.points[0].0
    }

    /// Adds `(theta, e^theta)`; returns false if an existing breakpoint is
    /// within [`BREAKPOINT_DEDUP`] or `theta` lies outside the domain.
    pub fn insert(&mut self, theta: f64) -> bool {
        let pos = self.points.partition_point(|&(t, _)| t < theta);
        let near = |k: usize| {
            self.points
                .get(k)
                .is_some_and(|&(t, _)| (t - theta).abs() <= BREAKPOINT_DEDUP)
        };
        if near(pos) || (pos > 0 && near(pos - 1)) || pos == 0 || pos == self.points.len() {
            return false;
        }
        self.points.insert(pos, (theta, theta.exp()));
        true
    }

    /// Value of the overestimator; clamps outside `[theta_min, 0]`.
    pub fn eval(&self, theta: f64) -> f64 {
        let pos = self.points.partition_point(|&(t, _)| t < theta);
        if pos == 0 {
            return self.points[0].1;
        }
        if pos == self.points.len() {
            return self.points[pos - 1].1;
        }
        let (t1, y1) = self.points[pos];
        if t1 == theta {
            return y1;
        }
        let (t0, y0) = self.points[pos - 1];
        y0 + (y1 - y0) * ((theta - t0) / (t1 - t0))
    }
}
