use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible leaving probability `eta * p0` at any top-priority position.
pub const MAX_LEAVE: f64 = 1.0 - 1e-12;

/// Feasible-set restriction on assortments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraint {
    Unconstrained,
    Cardinality { c_bar: usize },
    /// Each product `i` occupies `gamma[i - 1]` units of a shelf of size `mu`.
    Knapsack { gamma: Vec<f64>, mu: f64 },
}

impl Constraint {
    /// Whether `size` products using `load` shelf units fit.
    pub fn admits(&self, size: usize, load: f64) -> bool {
        match self {
            Constraint::Unconstrained => true,
            Constraint::Cardinality { c_bar } => size <= *c_bar,
            Constraint::Knapsack { mu, .. } => load <= *mu,
        }
    }

    /// Shelf units of product index `idx` (zero-based); zero unless knapsack.
    pub fn weight(&self, idx: usize) -> f64 {
        match self {
            Constraint::Knapsack { gamma, .. } => gamma[idx],
            _ => 0.0,
        }
    }

    pub fn is_constrained(&self) -> bool {
        !matches!(self, Constraint::Unconstrained)
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        match self {
            Constraint::Unconstrained => Ok(()),
            Constraint::Cardinality { c_bar } => {
                if *c_bar == 0 {
                    return Err(Error::Validation("c_bar must be positive".into()));
                }
                Ok(())
            }
            Constraint::Knapsack { gamma, mu } => {
                if gamma.len() != n {
                    return Err(Error::Validation(format!(
                        "knapsack gamma has {} entries, expected {n}",
                        gamma.len()
                    )));
                }
                if !(mu.is_finite() && *mu > 0.0) {
                    return Err(Error::Validation("knapsack mu must be positive".into()));
                }
                for (i, g) in gamma.iter().enumerate() {
                    if !(g.is_finite() && *g > 0.0 && g < mu) {
                        return Err(Error::Validation(format!(
                            "gamma of product {} must lie in (0, mu)",
                            i + 1
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// One customer population facing `n` products.
///
/// Product ids are `1..=n`; id 0 is the no-purchase option whose MNL weight
/// is fixed to 1. Vectors are stored zero-based (`revenue[i - 1]` for id `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    revenue: Vec<f64>,
    mnl_weight: Vec<f64>,
    leave_prob: Vec<f64>,
    eta: Vec<Vec<f64>>,
    u_bar: usize,
    constraint: Constraint,
    // ln(1 - eta[i][k] * p0[i]) laid out row-major, n x u_bar.
    log_stay: Vec<f64>,
}

impl Instance {
    pub fn new(
        revenue: Vec<f64>,
        mnl_weight: Vec<f64>,
        leave_prob: Vec<f64>,
        eta: Vec<Vec<f64>>,
        u_bar: usize,
        constraint: Constraint,
    ) -> Result<Self> {
        let n = revenue.len();
        if n == 0 {
            return Err(Error::Validation("instance needs at least one product".into()));
        }
        if mnl_weight.len() != n || leave_prob.len() != n || eta.len() != n {
            return Err(Error::Validation(format!(
                "parameter vectors disagree on n: revenue {}, mnl_weight {}, leave_prob {}, eta {}",
                n,
                mnl_weight.len(),
                leave_prob.len(),
                eta.len()
            )));
        }
        for i in 0..n {
            let id = i + 1;
            if !(revenue[i].is_finite() && revenue[i] >= 0.0) {
                return Err(Error::Validation(format!("revenue of product {id} must be nonnegative")));
            }
            if !(mnl_weight[i].is_finite() && mnl_weight[i] > 0.0) {
                return Err(Error::Validation(format!("mnl_weight of product {id} must be positive")));
            }
            if !(0.0..=1.0).contains(&leave_prob[i]) {
                return Err(Error::Validation(format!("leave_prob of product {id} must lie in [0, 1]")));
            }
            let row = &eta[i];
            if row.len() < u_bar {
                return Err(Error::Validation(format!(
                    "eta row of product {id} has {} columns but u_bar = {u_bar}",
                    row.len()
                )));
            }
            if let Some(first) = row.first() {
                if (first - 1.0).abs() > 1e-12 {
                    return Err(Error::Validation(format!("eta[{id}][1] must equal 1, got {first}")));
                }
            }
            for (k, e) in row.iter().enumerate() {
                if !(e.is_finite() && *e >= 0.0) {
                    return Err(Error::Validation(format!("eta[{id}][{}] must be nonnegative", k + 1)));
                }
                if k < u_bar && e * leave_prob[i] > MAX_LEAVE {
                    return Err(Error::Validation(format!(
                        "leaving probability eta*p0 of product {id} at position {} is {}, must stay below 1",
                        k + 1,
                        e * leave_prob[i]
                    )));
                }
            }
        }
        constraint.validate(n)?;
        let mut inst = Instance {
            revenue,
            mnl_weight,
            leave_prob,
            eta,
            u_bar,
            constraint,
            log_stay: Vec::new(),
        };
        inst.rebuild_costs();
        Ok(inst)
    }

    fn rebuild_costs(&mut self) {
        let (n, u) = (self.n(), self.u_bar);
        self.log_stay = Vec::with_capacity(n * u);
        for i in 0..n {
            for k in 0..u {
                self.log_stay.push((-(self.eta[i][k] * self.leave_prob[i])).ln_1p());
            }
        }
    }

    pub fn n(&self) -> usize {
        self.revenue.len()
    }
    pub fn revenue(&self) -> &[f64] {
        &self.revenue
    }
    pub fn mnl_weight(&self) -> &[f64] {
        &self.mnl_weight
    }
    pub fn leave_prob(&self) -> &[f64] {
        &self.leave_prob
    }
    pub fn eta(&self) -> &[Vec<f64>] {
        &self.eta
    }
    pub fn u_bar(&self) -> usize {
        self.u_bar
    }
    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    /// `ln(1 - eta_{ik} p0_i)` for zero-based product index and position.
    #[inline]
    pub fn log_stay(&self, idx: usize, pos: usize) -> f64 {
        self.log_stay[idx * self.u_bar + pos]
    }

    /// Copy with a different top-priority depth; fails if `eta` is too narrow.
    pub fn with_u_bar(&self, u_bar: usize) -> Result<Self> {
        Instance::new(
            self.revenue.clone(),
            self.mnl_weight.clone(),
            self.leave_prob.clone(),
            self.eta.clone(),
            u_bar,
            self.constraint.clone(),
        )
    }

    /// Copy with a different feasible set.
    pub fn with_constraint(&self, constraint: Constraint) -> Result<Self> {
        constraint.validate(self.n())?;
        let mut inst = self.clone();
        inst.constraint = constraint;
        Ok(inst)
    }

    /// Whether the zero-based membership mask satisfies the feasible set.
    pub fn is_feasible_mask(&self, offered: &[bool]) -> bool {
        let size = offered.iter().filter(|&&b| b).count();
        let load: f64 = offered
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.constraint.weight(i))
            .sum();
        self.constraint.admits(size, load)
    }
}
