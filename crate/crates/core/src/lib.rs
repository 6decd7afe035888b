//! Assortment optimization when customers who meet unavailable favourites may
//! leave the store.
//!
//! Customers first scan a short list of top-priority products; each missing
//! one makes them leave with some probability, and the survivors choose among
//! the offered products by multinomial logit. The retailer maximizes expected
//! revenue against the worst such list. The crate provides model evaluation
//! with dual certificates, an `O(n^2)` solver for the one-position
//! unconstrained case, an exact cutting-plane solver for cardinality and
//! knapsack constraints, a greedy heuristic, multi-category variants, seeded
//! instance generation and an experiment harness.

pub mod analysis;
pub mod assignment;
pub mod error;
pub mod greedy;
pub mod instances;
pub mod model;
pub mod multicat;
mod objective;
pub mod plub;
pub mod pwl;
pub mod solve;
pub mod unconstrained;

pub use error::{Error, Result};
pub use greedy::greedy_solve;
pub use instances::{
    brute_force_solve, generate_category_instance, generate_instance, generate_multicat_instance, CategoryTag,
    InstanceFile, LoadedInstance, SolutionFile,
};
pub use model::{
    expected_revenue, mnl_probability, purchase_distribution_general, purchase_distribution_robust, worst_case,
    Assortment, Constraint, Instance, PreferenceScenario, WorstCaseResult,
};
pub use multicat::{
    expected_revenue_multicat, greedy_solve_multicat, plub_solve_multicat, Category, MultiCategoryInstance,
};
pub use plub::{plub_solve, PlubOptions};
pub use pwl::PiecewiseUpperBound;
pub use solve::{SolveResult, SolveStatus, TracePoint};
pub use unconstrained::{solve_unconstrained_u1, LambdaLadder};
