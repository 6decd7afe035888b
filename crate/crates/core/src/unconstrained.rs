//! Exact O(n^2) ladder algorithm for the unconstrained problem with a single
//! top-priority position.
//!
//! Writing the revenue target as `lambda`, the best assortment for a fixed
//! `lambda` maximizes `sum_i nu_i (r_i pi(S) - lambda)`. As `lambda` grows,
//! products leave that assortment one at a time; the at most `n + 1` nested
//! assortments met along the way contain an optimal one.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{revenue_mask, theta_mask, Assortment, Instance};
use crate::solve::{SolveResult, SolveStatus, TracePoint};

/// Breakpoints `lambda_0 = 0 <= ... <= lambda_n` and the nested assortments
/// `S'(lambda_k)`, each one product smaller than the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaLadder {
    pub breakpoints: Vec<f64>,
    pub assortments: Vec<Assortment>,
}

impl LambdaLadder {
    /// Assortment at the largest breakpoint not exceeding `value`.
    pub fn assortment_at(&self, value: f64) -> &Assortment {
        let idx = self.breakpoints.partition_point(|&l| l <= value);
        &self.assortments[idx.saturating_sub(1)]
    }
}

fn require_single_position(instance: &Instance) -> Result<()> {
    if instance.u_bar() != 1 {
        return Err(Error::Unsupported(format!(
            "ladder algorithm needs u_bar = 1, instance has {}",
            instance.u_bar()
        )));
    }
    Ok(())
}

fn pi_of(instance: &Instance, offered: &[bool]) -> f64 {
    let pi = theta_mask(instance, offered).exp();
    debug_assert!({
        let direct = offered
            .iter()
            .zip(instance.leave_prob())
            .filter(|(&b, _)| !b)
            .map(|(_, p)| 1.0 - p)
            .fold(1.0, f64::min);
        (direct - pi).abs() <= 1e-12
    });
    pi
}

fn g_mask(instance: &Instance, offered: &mut [bool], j: usize, pi_s: f64, weighted_rev: f64) -> f64 {
    offered[j] = false;
    let pi_minus = pi_of(instance, offered);
    offered[j] = true;
    let nu = instance.mnl_weight()[j];
    (nu * instance.revenue()[j] * pi_minus + weighted_rev * (pi_s - pi_minus)) / nu
}

/// Threshold `g(S, j)`: removing `j` from `S` pays off exactly when the
/// revenue target `lambda` is at least this value.
pub fn g_value(instance: &Instance, assortment: &Assortment, j: usize) -> Result<f64> {
    require_single_position(instance)?;
    let mut offered = assortment.to_mask(instance.n())?;
    if j == 0 || !assortment.contains(j) {
        return Err(Error::Domain(format!("product {j} is not in {assortment}")));
    }
    let pi_s = pi_of(instance, &offered);
    let weighted_rev = weighted_revenue(instance, &offered);
    Ok(g_mask(instance, &mut offered, j - 1, pi_s, weighted_rev))
}

fn weighted_revenue(instance: &Instance, offered: &[bool]) -> f64 {
    offered
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| instance.mnl_weight()[i] * instance.revenue()[i])
        .sum()
}

/// Builds the ladder and tracks the best rung. Ignores the instance's
/// feasible set, which is what the elimination rule for constrained
/// instances needs.
pub fn lambda_ladder(instance: &Instance) -> Result<(LambdaLadder, Assortment, f64)> {
    require_single_position(instance)?;
    let n = instance.n();
    let mut current = vec![true; n];
    let mut best = current.clone();
    let mut best_value = revenue_mask(instance, &current);
    let mut breakpoints = vec![0.0];
    let mut assortments = vec![Assortment::from_mask(&current)];

    for _ in 1..=n {
        let pi_s = pi_of(instance, &current);
        let weighted_rev = weighted_revenue(instance, &current);
        let mut lambda = f64::INFINITY;
        let mut leaving = None;
        for j in 0..n {
            if !current[j] {
                continue;
            }
            let g = g_mask(instance, &mut current, j, pi_s, weighted_rev);
            if leaving.is_none() || g < lambda {
                lambda = g;
                leaving = Some(j);
            }
        }
        let prev = *breakpoints.last().expect("ladder starts at zero");
        if lambda <= prev {
            lambda = prev;
        }
        current[leaving.expect("current assortment is nonempty")] = false;
        let value = revenue_mask(instance, &current);
        if best_value <= value {
            best_value = value;
            best.copy_from_slice(&current);
        }
        breakpoints.push(lambda);
        assortments.push(Assortment::from_mask(&current));
    }
    Ok((LambdaLadder { breakpoints, assortments }, Assortment::from_mask(&best), best_value))
}

/// Optimal unconstrained assortment for `u_bar = 1`, with the ladder that certifies it.
pub fn solve_unconstrained_u1(instance: &Instance) -> Result<(SolveResult, LambdaLadder)> {
    if instance.constraint().is_constrained() {
        return Err(Error::Unsupported(
            "ladder algorithm solves unconstrained instances only".into(),
        ));
    }
    let start = Instant::now();
    let (ladder, assortment, objective) = lambda_ladder(instance)?;
    let result = SolveResult {
        assortment,
        objective,
        upper_bound: Some(objective),
        gap: Some(0.0),
        iterations: instance.n(),
        nodes: (instance.n() * (instance.n() + 1) / 2) as u64,
        wall_time: start.elapsed().as_secs_f64(),
        trace: vec![TracePoint { upper_bound: objective, incumbent: objective }],
        status: SolveStatus::Optimal,
    };
    Ok((result, ladder))
}
