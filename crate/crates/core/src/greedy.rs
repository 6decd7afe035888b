//! Constructive heuristic: grow one assortment from every single-product seed,
//! adding the best product while revenue strictly improves.

use std::time::Instant;

use crate::error::Result;
use crate::model::{Assortment, Instance};
use crate::objective::Mixture;
use crate::solve::{SolveResult, SolveStatus};

pub(crate) fn greedy_engine(mix: &Mixture<'_>) -> Result<SolveResult> {
    let start = Instant::now();
    let n = mix.n();
    let constraint = mix.constraint();
    let mut evaluations = 0u64;
    let mut best: Option<(Vec<bool>, f64)> = None;

    for seed in 0..n {
        let mut set = vec![false; n];
        set[seed] = true;
        let mut size = 1;
        let mut load = constraint.weight(seed);
        let mut lower = mix.revenue(&set);
        evaluations += 1;
        loop {
            let mut pick = None;
            for k in 0..n {
                if set[k] || !constraint.admits(size + 1, load + constraint.weight(k)) {
                    continue;
                }
                set[k] = true;
                let z = mix.revenue(&set);
                set[k] = false;
                evaluations += 1;
                if z > lower {
                    lower = z;
                    pick = Some(k);
                }
            }
            let Some(k) = pick else { break };
            set[k] = true;
            size += 1;
            load += constraint.weight(k);
        }
        if best.as_ref().map_or(true, |(_, v)| lower > *v) {
            best = Some((set, lower));
        }
    }

    let (mask, objective) = best.unwrap_or((vec![false; n], 0.0));
    Ok(SolveResult {
        assortment: Assortment::from_mask(&mask),
        objective,
        upper_bound: None,
        gap: None,
        iterations: n,
        nodes: evaluations,
        wall_time: start.elapsed().as_secs_f64(),
        trace: Vec::new(),
        status: SolveStatus::Heuristic,
    })
}

/// Greedy heuristic for any feasible set and any `u_bar`.
///
/// The returned objective is the exact expected revenue of the returned
/// assortment. Additions that would break the constraint are never tried.
pub fn greedy_solve(instance: &Instance) -> Result<SolveResult> {
    greedy_engine(&Mixture::single(instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{expected_revenue, Constraint};

    #[test]
    fn single_product() {
        let inst = Instance::new(vec![2.0], vec![1.0], vec![0.2], vec![vec![1.0]], 1, Constraint::Cardinality { c_bar: 1 }).unwrap();
        let res = greedy_solve(&inst).unwrap();
        assert_eq!(res.assortment.ids(), &[1]);
        assert_eq!(res.objective, 1.0);
    }

    #[test]
    fn respects_knapsack() {
        let inst = Instance::new(
            vec![4.0, 3.0, 5.0],
            vec![1.0, 1.0, 1.0],
            vec![0.1, 0.1, 0.1],
            vec![vec![1.0]; 3],
            1,
            Constraint::Knapsack { gamma: vec![2.0, 2.0, 3.0], mu: 4.0 },
        )
        .unwrap();
        let res = greedy_solve(&inst).unwrap();
        let mask = res.assortment.to_mask(3).unwrap();
        assert!(inst.is_feasible_mask(&mask));
        assert_eq!(res.objective, expected_revenue(&inst, &res.assortment).unwrap());
    }
}
