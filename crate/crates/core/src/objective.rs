//! A weighted mixture of customer categories sharing products, revenues and
//! the feasible set. A single instance is the one-category mixture.

use crate::model::{revenue_mask, theta_mask, Constraint, Instance};

#[derive(Debug, Clone)]
pub(crate) struct Mixture<'a> {
    parts: Vec<(f64, &'a Instance)>,
}

impl<'a> Mixture<'a> {
    pub fn single(instance: &'a Instance) -> Self {
        Self { parts: vec![(1.0, instance)] }
    }

    pub fn new(parts: Vec<(f64, &'a Instance)>) -> Self {
        debug_assert!(!parts.is_empty());
        Self { parts }
    }

    pub fn parts(&self) -> &[(f64, &'a Instance)] {
        &self.parts
    }

    pub fn primary(&self) -> &'a Instance {
        self.parts[0].1
    }

    pub fn n(&self) -> usize {
        self.primary().n()
    }

    pub fn constraint(&self) -> &'a Constraint {
        self.primary().constraint()
    }

    pub fn revenue(&self, offered: &[bool]) -> f64 {
        if self.parts.len() == 1 {
            return revenue_mask(self.parts[0].1, offered);
        }
        self.parts
            .iter()
            .map(|&(w, inst)| w * revenue_mask(inst, offered))
            .sum()
    }

    pub fn thetas(&self, offered: &[bool]) -> Vec<f64> {
        self.parts.iter().map(|&(_, inst)| theta_mask(inst, offered)).collect()
    }

    /// Weighted attractiveness `sum_c w_c nu_ic r_i` used to order branching.
    pub fn attractiveness(&self, idx: usize) -> f64 {
        self.parts
            .iter()
            .map(|&(w, inst)| w * inst.mnl_weight()[idx] * inst.revenue()[idx])
            .sum()
    }
}
