//! Fixtures shared by the criterion benchmarks.

use assortment_core::{generate_instance, greedy_solve, Assortment, Constraint, Instance};

/// The n = 20, c̄ = 6 cell used throughout the benches.
pub fn cell(seed: u64, u_bar: usize) -> Instance {
    generate_instance(seed, 20, Constraint::Cardinality { c_bar: 6 }, u_bar).expect("valid cell")
}

/// A realistic assortment to evaluate: whatever greedy picks.
pub fn greedy_pick(instance: &Instance) -> Assortment {
    greedy_solve(instance).expect("greedy").assortment
}
