//! Exact solver for constrained instances.
//!
//! The staying probability `pi(S) = exp(theta(S))` is replaced by a
//! piecewise-linear overestimator `h` of `exp`, giving a master problem whose
//! optimum bounds the true optimum from above. Each master solution is
//! evaluated exactly; its `theta` becomes a new breakpoint of `h`, and the loop
//! stops once the bound meets the best exact revenue found.
//!
//! Because `theta(S)` is attained by the inner LP at any master optimum, the
//! master reduces to maximizing `h(theta(S)) * R_mnl(S)` over feasible `S`,
//! solved here by depth-first branch-and-bound.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{theta_mask, Assortment, Constraint, Instance};
use crate::objective::Mixture;
use crate::pwl::PiecewiseUpperBound;
use crate::solve::{relative_gap, SolveResult, SolveStatus, TracePoint};
use crate::unconstrained::{lambda_ladder, LambdaLadder};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PlubOptions {
    /// Cap the master's staying probability with per-product bounds.
    pub use_pi_bounds: bool,
    /// Remove products excluded by the unconstrained ladder (`u_bar = 1` only).
    pub use_supervalid: bool,
    /// Assortment whose breakpoint and revenue seed the loop.
    pub warm_start: Option<Assortment>,
    /// Relative optimality tolerance.
    pub tol: f64,
    pub time_limit: Option<Duration>,
}

impl Default for PlubOptions {
    fn default() -> Self {
        Self {
            use_pi_bounds: false,
            use_supervalid: false,
            warm_start: None,
            tol: DEFAULT_TOL,
            time_limit: None,
        }
    }
}

/// `(theta_min, theta_max)`: `theta` of the empty assortment, and 0.
pub fn theta_bounds(instance: &Instance) -> (f64, f64) {
    (theta_mask(instance, &vec![false; instance.n()]), 0.0)
}

/// Largest staying probability over feasible assortments that include
/// (`with_product`) or exclude (`without_product`) each product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiBounds {
    with_product: Vec<f64>,
    without_product: Vec<f64>,
}

impl PiBounds {
    /// Bound over feasible assortments containing product `id`.
    pub fn with(&self, id: usize) -> f64 {
        self.with_product[id - 1]
    }
    /// Bound over feasible assortments not containing product `id`.
    pub fn without(&self, id: usize) -> f64 {
        self.without_product[id - 1]
    }

    fn cap(&self, in_set: &[bool], out_set: &[bool]) -> f64 {
        let mut cap = 1.0f64;
        for i in 0..in_set.len() {
            if in_set[i] {
                cap = cap.min(self.with_product[i]);
            } else if out_set[i] {
                cap = cap.min(self.without_product[i]);
            }
        }
        cap
    }

    fn cap_exact(&self, in_set: &[bool]) -> f64 {
        let mut cap = 1.0f64;
        for (i, &b) in in_set.iter().enumerate() {
            cap = cap.min(if b { self.with_product[i] } else { self.without_product[i] });
        }
        cap
    }
}

/// Maximizes `pi(S)` over feasible `S` with `forced_in` offered and
/// `forced_out` not offered. `pi` is monotone in `S`, so `pi(S_in + Free)`
/// bounds every completion.
struct PiSearch<'a> {
    instance: &'a Instance,
    order: Vec<usize>,
    in_set: Vec<bool>,
    avail: Vec<bool>,
    size: usize,
    load: f64,
    best: f64,
}

impl PiSearch<'_> {
    fn visit(&mut self, depth: usize) {
        let bound = theta_mask(self.instance, &self.avail);
        if bound <= self.best {
            return;
        }
        let constraint = self.instance.constraint();
        // A set that cannot grow is a leaf.
        let can_grow = self.order[depth..].iter().any(|&i| {
            self.avail[i] && constraint.admits(self.size + 1, self.load + constraint.weight(i))
        });
        if !can_grow {
            let value = theta_mask(self.instance, &self.in_set);
            if value > self.best {
                self.best = value;
            }
            return;
        }
        let i = self.order[depth];
        let w = constraint.weight(i);
        if constraint.admits(self.size + 1, self.load + w) {
            self.in_set[i] = true;
            self.size += 1;
            self.load += w;
            self.visit(depth + 1);
            self.in_set[i] = false;
            self.size -= 1;
            self.load -= w;
        }
        self.avail[i] = false;
        self.visit(depth + 1);
        self.avail[i] = true;
    }
}

fn max_pi(instance: &Instance, fixed: usize, include: bool) -> f64 {
    let n = instance.n();
    let mut in_set = vec![false; n];
    let mut avail = vec![true; n];
    let (mut size, mut load) = (0, 0.0);
    if include {
        in_set[fixed] = true;
        size = 1;
        load = instance.constraint().weight(fixed);
    } else {
        avail[fixed] = false;
    }
    // Try products that hurt most when missing first.
    let mut order: Vec<usize> = (0..n).filter(|&i| i != fixed).collect();
    if instance.u_bar() > 0 {
        order.sort_by(|&a, &b| instance.log_stay(a, 0).total_cmp(&instance.log_stay(b, 0)));
    }
    let mut search = PiSearch {
        instance,
        order,
        in_set,
        avail,
        size,
        load,
        best: f64::NEG_INFINITY,
    };
    search.visit(0);
    search.best.exp()
}

/// Exact per-product staying-probability bounds, by branch-and-bound.
pub fn pi_bounds_per_product(instance: &Instance) -> PiBounds {
    let n = instance.n();
    if instance.u_bar() == 0 {
        return PiBounds {
            with_product: vec![1.0; n],
            without_product: vec![1.0; n],
        };
    }
    PiBounds {
        with_product: (0..n).map(|i| max_pi(instance, i, true)).collect(),
        without_product: (0..n).map(|i| max_pi(instance, i, false)).collect(),
    }
}

/// Products outside the ladder rung at the largest breakpoint not above
/// `lower_bound`; no optimal constrained assortment contains them.
pub fn eliminate_products_supervalid(
    instance: &Instance,
    ladder: &LambdaLadder,
    lower_bound: f64,
) -> Result<BTreeSet<usize>> {
    if instance.u_bar() != 1 {
        return Err(Error::Unsupported(format!(
            "product elimination needs u_bar = 1, instance has {}",
            instance.u_bar()
        )));
    }
    let keep = ladder.assortment_at(lower_bound);
    Ok((1..=instance.n()).filter(|&id| !keep.contains(id)).collect())
}

/// Result of one master solve.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterOutcome {
    /// Best assortment with master value above the incumbent, if any.
    pub best: Option<(Assortment, f64)>,
    pub nodes: u64,
    /// False when the deadline interrupted the search.
    pub complete: bool,
}

/// Upper bound on `max R_mnl(S)` over `in_set <= S <= in_set + free` with at
/// most `room` extra products, by Dinkelbach iteration on the ratio.
fn mnl_ratio_bound(instance: &Instance, in_set: &[bool], free: &[usize], room: Option<usize>, scratch: &mut Vec<(f64, usize)>) -> f64 {
    let (nu, r) = (instance.mnl_weight(), instance.revenue());
    let (mut num, mut den) = (0.0, 1.0);
    for (i, _) in in_set.iter().enumerate().filter(|(_, &b)| b) {
        num += nu[i] * r[i];
        den += nu[i];
    }
    let mut lambda = num / den;
    for _ in 0..64 {
        scratch.clear();
        scratch.extend(
            free.iter()
                .map(|&i| (nu[i] * (r[i] - lambda), i))
                .filter(|&(s, _)| s > 0.0),
        );
        if let Some(room) = room {
            if scratch.len() > room {
                scratch.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
                scratch.truncate(room);
            }
        }
        let (mut n2, mut d2) = (num, den);
        for &(_, i) in scratch.iter() {
            n2 += nu[i] * r[i];
            d2 += nu[i];
        }
        let next = n2 / d2;
        if next <= lambda {
            return lambda * (1.0 + 1e-12);
        }
        // F(lambda) = d2 * (next - lambda) and F has slope at most -1, so
        // lambda + F(lambda) bounds the optimum even if we stop here.
        if next - lambda <= 1e-15 * lambda.abs().max(1.0) {
            return (lambda + d2 * (next - lambda)) * (1.0 + 1e-12);
        }
        lambda = next;
    }
    f64::INFINITY
}

pub(crate) struct MasterSearch<'a, 'm> {
    mix: &'m Mixture<'a>,
    pwls: &'m [PiecewiseUpperBound],
    caps: Option<&'m [PiBounds]>,
    prune: bool,
    deadline: Option<Instant>,
    order: Vec<usize>,
    in_set: Vec<bool>,
    out_set: Vec<bool>,
    size: usize,
    load: f64,
    best_value: f64,
    best: Option<Vec<bool>>,
    nodes: u64,
    timed_out: bool,
    scratch: Vec<(f64, usize)>,
    free: Vec<usize>,
    avail: Vec<bool>,
}

impl<'a, 'm> MasterSearch<'a, 'm> {
    pub(crate) fn new(
        mix: &'m Mixture<'a>,
        pwls: &'m [PiecewiseUpperBound],
        eliminated: &[bool],
        caps: Option<&'m [PiBounds]>,
        incumbent: f64,
        prune: bool,
        deadline: Option<Instant>,
    ) -> Self {
        let n = mix.n();
        let mut order: Vec<usize> = (0..n).filter(|&i| !eliminated[i]).collect();
        order.sort_by(|&a, &b| mix.attractiveness(b).total_cmp(&mix.attractiveness(a)).then(a.cmp(&b)));
        Self {
            mix,
            pwls,
            caps,
            prune,
            deadline,
            order,
            in_set: vec![false; n],
            out_set: eliminated.to_vec(),
            size: 0,
            load: 0.0,
            best_value: incumbent,
            best: None,
            nodes: 0,
            timed_out: false,
            scratch: Vec::new(),
            free: Vec::new(),
            avail: vec![false; n],
        }
    }

    fn value(&self) -> f64 {
        let mut total = 0.0;
        for (c, &(w, inst)) in self.mix.parts().iter().enumerate() {
            let mut pi = self.pwls[c].eval(theta_mask(inst, &self.in_set));
            if let Some(caps) = self.caps {
                pi = pi.min(caps[c].cap_exact(&self.in_set));
            }
            total += w * pi * crate::model::mnl_revenue_mask(inst, &self.in_set);
        }
        total
    }

    fn bound(&mut self, depth: usize) -> f64 {
        let n = self.mix.n();
        self.free.clear();
        self.free.extend(self.order[depth..].iter().copied());
        for i in 0..n {
            self.avail[i] = self.in_set[i];
        }
        for &i in &self.free {
            self.avail[i] = true;
        }
        let room = match self.mix.constraint() {
            Constraint::Cardinality { c_bar } => Some(c_bar.saturating_sub(self.size)),
            _ => None,
        };
        let max_r = (0..n)
            .filter(|&i| self.avail[i])
            .map(|i| self.mix.primary().revenue()[i])
            .fold(0.0, f64::max);
        let mut total = 0.0;
        for (c, &(w, inst)) in self.mix.parts().iter().enumerate() {
            let mut pi = self.pwls[c].eval(theta_mask(inst, &self.avail));
            if let Some(caps) = self.caps {
                pi = pi.min(caps[c].cap(&self.in_set, &self.out_set));
            }
            let ratio = mnl_ratio_bound(inst, &self.in_set, &self.free, room, &mut self.scratch);
            total += w * pi * max_r.min(ratio);
        }
        total
    }

    pub(crate) fn run(&mut self) {
        self.visit(0);
    }

    fn visit(&mut self, depth: usize) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                    return;
                }
            }
        }
        if depth == self.order.len() {
            return;
        }
        let constraint = self.mix.constraint();
        if let Constraint::Cardinality { c_bar } = constraint {
            if self.size >= *c_bar {
                return;
            }
        }
        if self.prune && self.bound(depth) <= self.best_value {
            return;
        }
        let i = self.order[depth];
        let w = constraint.weight(i);
        if constraint.admits(self.size + 1, self.load + w) {
            self.in_set[i] = true;
            self.size += 1;
            self.load += w;
            let v = self.value();
            if v > self.best_value {
                self.best_value = v;
                self.best = Some(self.in_set.clone());
            }
            self.visit(depth + 1);
            self.in_set[i] = false;
            self.size -= 1;
            self.load -= w;
        }
        self.out_set[i] = true;
        self.visit(depth + 1);
        self.out_set[i] = false;
    }

    pub(crate) fn outcome(self) -> MasterOutcome {
        MasterOutcome {
            best: self.best.map(|m| (Assortment::from_mask(&m), self.best_value)),
            nodes: self.nodes,
            complete: !self.timed_out,
        }
    }
}

fn eliminated_mask(n: usize, eliminated: &BTreeSet<usize>) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &id in eliminated {
        if id == 0 || id > n {
            return Err(Error::Domain(format!("eliminated product {id} out of range 1..={n}")));
        }
        mask[id - 1] = true;
    }
    Ok(mask)
}

/// Maximizes `min(h(theta(S)), caps) * R_mnl(S)` over feasible assortments
/// avoiding `eliminated`, returning only solutions strictly above `incumbent`.
pub fn solve_master(
    instance: &Instance,
    pwl: &PiecewiseUpperBound,
    eliminated: &BTreeSet<usize>,
    pi_bounds: Option<&PiBounds>,
    incumbent: f64,
) -> Result<MasterOutcome> {
    solve_master_with(instance, pwl, eliminated, pi_bounds, incumbent, true)
}

/// [`solve_master`] with pruning optionally disabled (full enumeration of the tree).
pub fn solve_master_with(
    instance: &Instance,
    pwl: &PiecewiseUpperBound,
    eliminated: &BTreeSet<usize>,
    pi_bounds: Option<&PiBounds>,
    incumbent: f64,
    prune: bool,
) -> Result<MasterOutcome> {
    let n = instance.n();
    let mask = eliminated_mask(n, eliminated)?;
    if mask.iter().all(|&b| b) {
        return Err(Error::Infeasible("every product has been eliminated".into()));
    }
    let mix = Mixture::single(instance);
    let pwls = std::slice::from_ref(pwl);
    let caps = pi_bounds.map(std::slice::from_ref);
    let mut search = MasterSearch::new(&mix, pwls, &mask, caps, incumbent, prune, None);
    search.run();
    Ok(search.outcome())
}

/// Cutting-plane loop shared by the single- and multi-category solvers.
pub(crate) fn plub_engine(mix: &Mixture<'_>, options: &PlubOptions) -> Result<SolveResult> {
    let start = Instant::now();
    let deadline = options.time_limit.map(|t| start + t);
    let n = mix.n();
    let tol = options.tol;

    let mut pwls: Vec<PiecewiseUpperBound> = mix
        .parts()
        .iter()
        .map(|&(_, inst)| PiecewiseUpperBound::new(theta_bounds(inst).0))
        .collect();
    let caps: Option<Vec<PiBounds>> = options
        .use_pi_bounds
        .then(|| mix.parts().iter().map(|&(_, inst)| pi_bounds_per_product(inst)).collect());

    let mut incumbent_mask = vec![false; n];
    let mut incumbent = 0.0;
    if let Some(ws) = &options.warm_start {
        let mask = ws.to_mask(n)?;
        if !mix.primary().is_feasible_mask(&mask) {
            return Err(Error::Validation(format!("warm start {ws} violates the feasible set")));
        }
        for (c, theta) in mix.thetas(&mask).into_iter().enumerate() {
            pwls[c].insert(theta);
        }
        let value = mix.revenue(&mask);
        if value > incumbent {
            incumbent = value;
            incumbent_mask = mask;
        }
    }

    let ladder = if options.use_supervalid && mix.parts().len() == 1 && mix.primary().u_bar() == 1 {
        Some(lambda_ladder(mix.primary())?.0)
    } else {
        None
    };
    let eliminate = |value: f64| -> Vec<bool> {
        match &ladder {
            Some(l) => {
                let keep = l.assortment_at(value);
                let mask: Vec<bool> = (1..=n).map(|id| !keep.contains(id)).collect();
                // Never starve the master; an empty rung only arises with zero revenue.
                if mask.iter().all(|&b| b) {
                    vec![false; n]
                } else {
                    mask
                }
            }
            None => vec![false; n],
        }
    };
    let mut eliminated = eliminate(incumbent);

    let trivial_bound = mix.primary().revenue().iter().cloned().fold(0.0, f64::max);
    let mut upper = trivial_bound;
    let mut trace = Vec::new();
    let mut nodes = 0u64;
    let mut iterations = 0usize;
    let mut status = SolveStatus::Optimal;

    loop {
        iterations += 1;
        let mut search = MasterSearch::new(mix, &pwls, &eliminated, caps.as_deref(), incumbent, true, deadline);
        search.run();
        let outcome = search.outcome();
        nodes += outcome.nodes;
        if !outcome.complete {
            // The interrupted search may still have found a better assortment.
            if let Some((candidate, _)) = outcome.best {
                let mask = candidate.to_mask(n)?;
                let exact = mix.revenue(&mask);
                if exact > incumbent {
                    incumbent = exact;
                    incumbent_mask = mask;
                }
            }
            status = SolveStatus::TimeLimit;
            break;
        }
        let Some((candidate, zbar)) = outcome.best else {
            upper = incumbent;
            trace.push(TracePoint { upper_bound: upper, incumbent });
            break;
        };
        upper = zbar;
        let mask = candidate.to_mask(n)?;
        let exact = mix.revenue(&mask);
        if exact > incumbent {
            incumbent = exact;
            incumbent_mask = mask.clone();
            eliminated = eliminate(incumbent);
        }
        trace.push(TracePoint { upper_bound: upper, incumbent });
        if zbar - incumbent <= tol * incumbent.max(crate::solve::GAP_EPS) {
            break;
        }
        let mut refined = false;
        for (c, theta) in mix.thetas(&mask).into_iter().enumerate() {
            if pwls[c].eval(theta) > theta.exp() {
                refined |= pwls[c].insert(theta);
            }
        }
        if !refined {
            // Bound and exact value differ only by rounding at existing breakpoints.
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            status = SolveStatus::TimeLimit;
            break;
        }
    }

    Ok(SolveResult {
        assortment: Assortment::from_mask(&incumbent_mask),
        objective: incumbent,
        upper_bound: Some(upper.max(incumbent)),
        gap: Some(relative_gap(upper, incumbent)),
        iterations,
        nodes,
        wall_time: start.elapsed().as_secs_f64(),
        trace,
        status,
    })
}

/// Exact constrained solve by piecewise-linear upper bounding.
pub fn plub_solve(instance: &Instance, options: &PlubOptions) -> Result<SolveResult> {
    plub_engine(&Mixture::single(instance), options)
}
