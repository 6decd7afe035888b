//! Domain types and evaluation of the choice model.

mod assortment;
mod choice;
mod instance;

pub use assortment::Assortment;
pub use choice::{
    expected_revenue, mnl_probability, mnl_revenue_mask, purchase_distribution_general,
    purchase_distribution_robust, theta_mask, worst_case, PreferenceScenario, WorstCaseResult,
    DUAL_TOL,
};
pub(crate) use choice::revenue_mask;
pub use instance::{Constraint, Instance, MAX_LEAVE};
