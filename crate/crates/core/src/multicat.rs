//! Several customer categories with their own choice parameters facing the
//! same products, revenues and feasible set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::greedy_engine;
use crate::model::{Assortment, Instance};
use crate::objective::Mixture;
use crate::plub::{plub_engine, PlubOptions};
use crate::solve::SolveResult;

#[derive(Debug, Clone, PartialEq)]
pub struct Category {
    pub weight: f64,
    pub instance: Instance,
}

/// Serialized shape of one category: the per-category choice parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorySpec {
    pub weight: f64,
    pub mnl_weight: Vec<f64>,
    pub leave_prob: Vec<f64>,
    pub eta: Vec<Vec<f64>>,
    pub u_bar: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiCategoryInstance {
    categories: Vec<Category>,
}

impl MultiCategoryInstance {
    /// Categories must share `n`, revenues and constraint; weights must be in
    /// `[0, 1]` and sum to 1 within 1e-12.
    pub fn new(categories: Vec<Category>) -> Result<Self> {
        let first = categories
            .first()
            .ok_or_else(|| Error::Validation("at least one category is required".into()))?;
        for (c, cat) in categories.iter().enumerate() {
            let inst = &cat.instance;
            if !(0.0..=1.0).contains(&cat.weight) {
                return Err(Error::Validation(format!("category {} weight must lie in [0, 1]", c + 1)));
            }
            if inst.n() != first.instance.n() {
                return Err(Error::Validation(format!("category {} has a different product count", c + 1)));
            }
            if inst.revenue() != first.instance.revenue() {
                return Err(Error::Validation(format!(
                    "category {} has its own revenues; revenues must be shared",
                    c + 1
                )));
            }
            if inst.constraint() != first.instance.constraint() {
                return Err(Error::Validation(format!("category {} has a different constraint", c + 1)));
            }
        }
        let total: f64 = categories.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("category weights sum to {total}, expected 1")));
        }
        Ok(Self { categories })
    }

    /// Builds categories from shared data plus per-category parameters.
    pub fn from_specs(
        revenue: Vec<f64>,
        constraint: crate::model::Constraint,
        specs: Vec<CategorySpec>,
    ) -> Result<Self> {
        let categories = specs
            .into_iter()
            .map(|s| {
                Ok(Category {
                    weight: s.weight,
                    instance: Instance::new(revenue.clone(), s.mnl_weight, s.leave_prob, s.eta, s.u_bar, constraint.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(categories)
    }

    pub fn single(instance: Instance) -> Self {
        Self {
            categories: vec![Category { weight: 1.0, instance }],
        }
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn n(&self) -> usize {
        self.categories[0].instance.n()
    }

    pub fn specs(&self) -> Vec<CategorySpec> {
        self.categories
            .iter()
            .map(|c| CategorySpec {
                weight: c.weight,
                mnl_weight: c.instance.mnl_weight().to_vec(),
                leave_prob: c.instance.leave_prob().to_vec(),
                eta: c.instance.eta().to_vec(),
                u_bar: c.instance.u_bar(),
            })
            .collect()
    }

    pub(crate) fn mixture(&self) -> Mixture<'_> {
        Mixture::new(self.categories.iter().map(|c| (c.weight, &c.instance)).collect())
    }
}

/// Weighted expected revenue over categories.
pub fn expected_revenue_multicat(mci: &MultiCategoryInstance, assortment: &Assortment) -> Result<f64> {
    let mask = assortment.to_mask(mci.n())?;
    Ok(mci.mixture().revenue(&mask))
}

/// Exact solve with one piecewise bound per category. Product elimination is
/// a single-category device and is ignored here.
pub fn plub_solve_multicat(mci: &MultiCategoryInstance, options: &PlubOptions) -> Result<SolveResult> {
    plub_engine(&mci.mixture(), options)
}

pub fn greedy_solve_multicat(mci: &MultiCategoryInstance) -> Result<SolveResult> {
    greedy_engine(&mci.mixture())
}
