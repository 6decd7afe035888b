//! Evaluation of the choice model: MNL shares, the adversarial top-priority
//! list, expected revenue and purchase distributions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assignment::{dual_certificate, min_cost_assignment};
use crate::error::{Error, Result};
use crate::model::{Assortment, Instance};

/// Certificate tolerance for strong duality and dual feasibility.
pub const DUAL_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;

/// Adversarial staying probability of an assortment with LP dual certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseResult {
    pub pi: f64,
    /// `ln(pi)`, always `<= 0`.
    pub theta: f64,
    /// Unavailable products in the order the adversarial customer tries them.
    pub worst_list: Vec<usize>,
    /// Position multipliers, one per position actually filled.
    pub alpha: Vec<f64>,
    /// Product multipliers keyed by unavailable product id.
    pub beta: BTreeMap<usize, f64>,
}

impl WorstCaseResult {
    /// `|(-sum(alpha) - sum(beta)) - theta|`.
    pub fn duality_residual(&self) -> f64 {
        let dual = -self.alpha.iter().sum::<f64>() - self.beta.values().sum::<f64>();
        (dual - self.theta).abs()
    }

    /// Largest violation of `alpha_k + beta_i >= -ln(1 - eta_ik p0_i)` or of
    /// nonnegativity, over every unavailable product and filled position.
    pub fn feasibility_violation(&self, instance: &Instance) -> f64 {
        let mut worst = 0.0f64;
        for &a in &self.alpha {
            worst = worst.max(-a);
        }
        for (&id, &b) in &self.beta {
            worst = worst.max(-b);
            for (k, &a) in self.alpha.iter().enumerate() {
                let need = -instance.log_stay(id - 1, k);
                worst = worst.max(need - a - b);
            }
        }
        worst
    }
}

/// A finite population of preference lists for the general (non-robust) model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceScenario {
    lists: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl PreferenceScenario {
    pub fn new(lists: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        if lists.len() != weights.len() {
            return Err(Error::Validation(format!(
                "{} preference lists but {} weights",
                lists.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Validation("scenario weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("scenario weights sum to {total}, expected 1")));
        }
        for list in &lists {
            let mut seen = list.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != list.len() {
                return Err(Error::Validation(format!("preference list {list:?} repeats a product")));
            }
            if seen.first() == Some(&0) {
                return Err(Error::Validation("preference lists cannot contain the no-purchase option".into()));
            }
        }
        Ok(Self { lists, weights })
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.lists
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// MNL share of `product` (0 for no-purchase) when `assortment` is offered.
pub fn mnl_probability(instance: &Instance, assortment: &Assortment, product: usize) -> Result<f64> {
    let mask = assortment.to_mask(instance.n())?;
    let denom = 1.0 + offered_weight(instance, &mask);
    if product == 0 {
        return Ok(1.0 / denom);
    }
    if product > instance.n() || !mask[product - 1] {
        return Err(Error::Domain(format!("product {product} is not offered in {assortment}")));
    }
    Ok(instance.mnl_weight()[product - 1] / denom)
}

fn offered_weight(instance: &Instance, offered: &[bool]) -> f64 {
    instance
        .mnl_weight()
        .iter()
        .zip(offered)
        .filter(|(_, &b)| b)
        .map(|(v, _)| v)
        .sum()
}

/// Expected MNL revenue `sum_i rho_i(S) r_i` of a membership mask.
pub fn mnl_revenue_mask(instance: &Instance, offered: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut den = 1.0;
    for (i, _) in offered.iter().enumerate().filter(|(_, &b)| b) {
        let v = instance.mnl_weight()[i];
        num += v * instance.revenue()[i];
        den += v;
    }
    num / den
}

fn unavailable(offered: &[bool]) -> Vec<usize> {
    offered
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| (!b).then_some(i))
        .collect()
}

fn cost_matrix(instance: &Instance, positions: std::ops::Range<usize>, products: &[usize]) -> Vec<Vec<f64>> {
    positions
        .map(|k| products.iter().map(|&i| instance.log_stay(i, k)).collect())
        .collect()
}

/// `theta(S)` for a zero-based membership mask, without certificates.
///
/// Sums the assigned costs in position order, which is also how
/// [`worst_case`] totals its list, so both agree bit-for-bit whenever they
/// select the same list.
pub fn theta_mask(instance: &Instance, offered: &[bool]) -> f64 {
    let u = instance.u_bar();
    if u == 0 {
        return 0.0;
    }
    if u == 1 {
        return offered
            .iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .map(|(i, _)| instance.log_stay(i, 0))
            .fold(0.0, f64::min);
    }
    let out = unavailable(offered);
    let m = u.min(out.len());
    if m == 0 {
        return 0.0;
    }
    let costs = cost_matrix(instance, 0..m, &out);
    let matching = min_cost_assignment(&costs);
    matching.iter().enumerate().map(|(k, &c)| costs[k][c]).sum()
}

fn completion_cost(instance: &Instance, from_pos: usize, to_pos: usize, products: &[usize]) -> f64 {
    if from_pos >= to_pos {
        return 0.0;
    }
    let costs = cost_matrix(instance, from_pos..to_pos, products);
    let matching = min_cost_assignment(&costs);
    matching.iter().enumerate().map(|(k, &c)| costs[k][c]).sum()
}

/// Adversarial top-priority list for `assortment` and its staying probability.
///
/// Fills `min(u_bar, |unavailable|)` positions. Among optimal lists the
/// lexicographically smallest (position by position, lowest id first) is
/// returned. `pi` is 1 when `u_bar = 0` or every product is offered.
pub fn worst_case(instance: &Instance, assortment: &Assortment) -> Result<WorstCaseResult> {
    let mask = assortment.to_mask(instance.n())?;
    Ok(worst_case_mask(instance, &mask))
}

pub(crate) fn worst_case_mask(instance: &Instance, offered: &[bool]) -> WorstCaseResult {
    let out = unavailable(offered);
    let m = instance.u_bar().min(out.len());
    if m == 0 {
        return WorstCaseResult {
            pi: 1.0,
            theta: 0.0,
            worst_list: Vec::new(),
            alpha: Vec::new(),
            beta: out.iter().map(|&i| (i + 1, 0.0)).collect(),
        };
    }

    let target = theta_mask(instance, offered);
    let slack = TIE_TOL * target.abs().max(1.0);
    let mut remaining = out.clone();
    let mut list_idx = Vec::with_capacity(m);
    let mut prefix = 0.0;
    for k in 0..m {
        let mut chosen = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let head = prefix + instance.log_stay(i, k);
            let rest: Vec<usize> = remaining.iter().copied().filter(|&j| j != i).collect();
            let total = head + completion_cost(instance, k + 1, m, &rest);
            if total <= target + slack {
                chosen = Some((pos, head));
                break;
            }
        }
        // The optimum itself always qualifies; fall back to it on pathological rounding.
        let (pos, head) = chosen.unwrap_or_else(|| {
            let (pos, &i) = remaining
                .iter()
                .enumerate()
                .min_by(|a, b| instance.log_stay(*a.1, k).total_cmp(&instance.log_stay(*b.1, k)))
                .expect("remaining products cover all positions");
            (pos, prefix + instance.log_stay(i, k))
        });
        prefix = head;
        list_idx.push(remaining.remove(pos));
    }
    let theta = list_idx
        .iter()
        .enumerate()
        .map(|(k, &i)| instance.log_stay(i, k))
        .sum::<f64>();

    let costs = cost_matrix(instance, 0..m, &out);
    let matching: Vec<usize> = list_idx
        .iter()
        .map(|i| out.binary_search(i).expect("listed product is unavailable"))
        .collect();
    let (alpha, col_dual) = dual_certificate(&costs, &matching);
    let beta = out.iter().zip(col_dual).map(|(&i, b)| (i + 1, b)).collect();

    let result = WorstCaseResult {
        pi: theta.exp(),
        theta,
        worst_list: list_idx.iter().map(|i| i + 1).collect(),
        alpha,
        beta,
    };
    debug_assert!(result.duality_residual() <= DUAL_TOL, "strong duality residual");
    debug_assert!(result.feasibility_violation(instance) <= DUAL_TOL, "dual infeasible");
    result
}

/// Robust expected revenue `pi(S) * sum_{i in S} rho_i(S) r_i`.
pub fn expected_revenue(instance: &Instance, assortment: &Assortment) -> Result<f64> {
    let mask = assortment.to_mask(instance.n())?;
    Ok(revenue_mask(instance, &mask))
}

pub(crate) fn revenue_mask(instance: &Instance, offered: &[bool]) -> f64 {
    if !offered.iter().any(|&b| b) {
        return 0.0;
    }
    theta_mask(instance, offered).exp() * mnl_revenue_mask(instance, offered)
}

/// Purchase probabilities under the adversarial top-priority list.
///
/// Keys are offered product ids plus 0 for no-purchase.
pub fn purchase_distribution_robust(
    instance: &Instance,
    assortment: &Assortment,
) -> Result<BTreeMap<usize, f64>> {
    let mask = assortment.to_mask(instance.n())?;
    let pi = theta_mask(instance, &mask).exp();
    let denom = 1.0 + offered_weight(instance, &mask);
    let mut dist = BTreeMap::new();
    let mut bought = 0.0;
    for id in assortment.iter() {
        let p = pi * instance.mnl_weight()[id - 1] / denom;
        bought += p;
        dist.insert(id, p);
    }
    dist.insert(0, (1.0 - bought).clamp(0.0, 1.0));
    Ok(dist)
}

/// Purchase probabilities when customers follow the lists of `scenario`.
///
/// The first `u_bar` entries of each list are top priority: every unavailable
/// one there makes the customer leave with probability `eta_{ik} p0_i`.
/// Unavailable low-priority entries are skipped without leaving. A list with
/// no offered product yields no purchase.
pub fn purchase_distribution_general(
    instance: &Instance,
    scenario: &PreferenceScenario,
    u_bar: usize,
    assortment: &Assortment,
) -> Result<BTreeMap<usize, f64>> {
    let n = instance.n();
    let mask = assortment.to_mask(n)?;
    if instance.eta().iter().any(|row| row.len() < u_bar) {
        return Err(Error::Domain(format!("eta has fewer than u_bar = {u_bar} columns")));
    }
    let mut dist: BTreeMap<usize, f64> = assortment.iter().map(|id| (id, 0.0)).collect();
    for (list, &w) in scenario.lists().iter().zip(scenario.weights()) {
        if let Some(&bad) = list.iter().find(|&&id| id == 0 || id > n) {
            return Err(Error::Domain(format!("preference list product {bad} out of range 1..={n}")));
        }
        let mut stay = 1.0;
        for (pos, &id) in list.iter().enumerate() {
            let idx = id - 1;
            if mask[idx] {
                *dist.get_mut(&id).expect("offered product has an entry") += w * stay;
                break;
            }
            if pos < u_bar {
                stay *= 1.0 - instance.eta()[idx][pos] * instance.leave_prob()[idx];
            }
        }
    }
    let bought: f64 = dist.values().sum();
    dist.insert(0, (1.0 - bought).clamp(0.0, 1.0));
    Ok(dist)
}
