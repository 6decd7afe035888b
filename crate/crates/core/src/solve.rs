use serde::{Deserialize, Serialize};

use crate::model::Assortment;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Proven optimal within the requested tolerance.
    Optimal,
    /// Stopped by the time limit; `gap` bounds the remaining suboptimality.
    TimeLimit,
    /// Heuristic answer with no optimality certificate.
    Heuristic,
}

/// One iteration of an exact solver: the master bound and the incumbent after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub upper_bound: f64,
    pub incumbent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub assortment: Assortment,
    /// Exact expected revenue of `assortment`.
    pub objective: f64,
    /// Proven upper bound on the optimum; `None` for heuristics.
    pub upper_bound: Option<f64>,
    /// `(upper_bound - objective) / max(objective, eps)`, clamped at zero.
    pub gap: Option<f64>,
    pub iterations: usize,
    /// Search nodes, or revenue evaluations for enumerative methods.
    pub nodes: u64,
    pub wall_time: f64,
    pub trace: Vec<TracePoint>,
    pub status: SolveStatus,
}

pub(crate) const GAP_EPS: f64 = 1e-12;

pub(crate) fn relative_gap(upper: f64, objective: f64) -> f64 {
    ((upper - objective) / objective.max(GAP_EPS)).max(0.0)
}
