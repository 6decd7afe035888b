//! Experiment helpers: assortment variation, comparison against an MNL-only
//! plan, category-mix comparison and the benchmark harness.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::greedy_solve;
use crate::instances::{brute_force_solve, generate_category_instance, generate_instance, CategoryTag};
use crate::model::{expected_revenue, Assortment, Constraint, Instance};
use crate::multicat::{expected_revenue_multicat, greedy_solve_multicat, plub_solve_multicat, MultiCategoryInstance};
use crate::plub::{plub_solve, PlubOptions};
use crate::solve::{SolveResult, SolveStatus};
use crate::unconstrained::solve_unconstrained_u1;

fn pair_term(a: &Assortment, b: &Assortment) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 0.0;
    }
    a.symmetric_difference_len(b) as f64 / total as f64
}

/// Mean over ordered pairs of `|S △ S'| / (|S| + |S'|)`. A pair of empty
/// assortments contributes 0; one empty and one nonempty contributes 1.
pub fn assortment_variation(assortments: &[Assortment]) -> Result<f64> {
    let t = assortments.len();
    if t < 2 {
        return Err(Error::Validation(format!("assortment variation needs at least 2 assortments, got {t}")));
    }
    let mut sum = 0.0;
    for (i, a) in assortments.iter().enumerate() {
        for (j, b) in assortments.iter().enumerate() {
            if i != j {
                sum += pair_term(a, b);
            }
        }
    }
    Ok(sum / (t * (t - 1)) as f64)
}

/// Percentage revenue loss of `value` relative to `best`; 0 when `best` is 0.
pub fn gap_percent(best: f64, value: f64) -> f64 {
    if best <= 0.0 {
        0.0
    } else {
        100.0 * (best - value) / best
    }
}

/// Exact solve choosing the ladder algorithm when it applies.
pub fn solve_exact(instance: &Instance) -> Result<SolveResult> {
    if instance.u_bar() == 1 && !instance.constraint().is_constrained() {
        return Ok(solve_unconstrained_u1(instance)?.0);
    }
    plub_solve(instance, &PlubOptions::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnlComparison {
    pub s_opt: Assortment,
    pub z_opt: f64,
    /// Optimal plan when unavailability is ignored (`u_bar = 0`).
    pub s_mnl: Assortment,
    /// Revenue of `s_mnl` under the true model.
    pub z_mnl: f64,
    pub av: f64,
    pub gap: f64,
}

/// Solves the instance with and without the unavailability effect and
/// measures what ignoring it costs.
pub fn compare_mnl(instance: &Instance) -> Result<MnlComparison> {
    let exact = solve_exact(instance)?;
    let mnl = solve_exact(&instance.with_u_bar(0)?)?;
    let z_mnl = expected_revenue(instance, &mnl.assortment)?;
    Ok(MnlComparison {
        av: assortment_variation(&[exact.assortment.clone(), mnl.assortment.clone()])?,
        gap: gap_percent(exact.objective, z_mnl),
        s_opt: exact.assortment,
        z_opt: exact.objective,
        s_mnl: mnl.assortment,
        z_mnl,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryPlan {
    /// Optimal assortment for this category alone.
    pub assortment: Assortment,
    /// Its revenue under the full mixture.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticatComparison {
    pub s_opt: Assortment,
    pub z_opt: f64,
    pub per_category: Vec<CategoryPlan>,
    /// Mean over categories of the pairwise variation between `s_opt` and the category plan.
    pub mean_av: f64,
    /// Mean over categories of the percentage revenue loss.
    pub mean_gap: f64,
}

/// Compares the mixture optimum against planning for each single category.
pub fn compare_multicat(mci: &MultiCategoryInstance) -> Result<MulticatComparison> {
    let exact = plub_solve_multicat(mci, &PlubOptions::default())?;
    let mut per_category = Vec::new();
    let (mut av_sum, mut gap_sum) = (0.0, 0.0);
    for cat in mci.categories() {
        let own = solve_exact(&cat.instance)?;
        let value = expected_revenue_multicat(mci, &own.assortment)?;
        av_sum += assortment_variation(&[exact.assortment.clone(), own.assortment.clone()])?;
        gap_sum += gap_percent(exact.objective, value);
        per_category.push(CategoryPlan { assortment: own.assortment, value });
    }
    let c = per_category.len() as f64;
    Ok(MulticatComparison {
        s_opt: exact.assortment,
        z_opt: exact.objective,
        per_category,
        mean_av: av_sum / c,
        mean_gap: gap_sum / c,
    })
}

/// Solution method selectable from the CLI and bench suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Plub,
    /// Plub warm-started from the greedy assortment.
    GPlub,
    Greedy,
    UnconU1,
    Brute,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Plub => "plub",
            Method::GPlub => "g-plub",
            Method::Greedy => "greedy",
            Method::UnconU1 => "uncon-u1",
            Method::Brute => "brute",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plub" => Ok(Method::Plub),
            "g-plub" => Ok(Method::GPlub),
            "greedy" => Ok(Method::Greedy),
            "uncon-u1" => Ok(Method::UnconU1),
            "brute" => Ok(Method::Brute),
            other => Err(Error::Validation(format!("unknown method {other:?}"))),
        }
    }
}

/// Runs `method`; `options` only affects the plub variants.
pub fn solve_with(method: Method, instance: &Instance, options: &PlubOptions) -> Result<SolveResult> {
    match method {
        Method::Plub => plub_solve(instance, options),
        Method::GPlub => {
            let warm = greedy_solve(instance)?;
            let opts = PlubOptions {
                warm_start: Some(warm.assortment),
                ..options.clone()
            };
            plub_solve(instance, &opts)
        }
        Method::Greedy => greedy_solve(instance),
        Method::UnconU1 => Ok(solve_unconstrained_u1(instance)?.0),
        Method::Brute => brute_force_solve(instance),
    }
}

/// Multi-category counterpart of [`solve_with`].
pub fn solve_multicat_with(method: Method, mci: &MultiCategoryInstance, options: &PlubOptions) -> Result<SolveResult> {
    match method {
        Method::Plub => plub_solve_multicat(mci, options),
        Method::GPlub => {
            let warm = greedy_solve_multicat(mci)?;
            let opts = PlubOptions {
                warm_start: Some(warm.assortment),
                ..options.clone()
            };
            plub_solve_multicat(mci, &opts)
        }
        Method::Greedy => greedy_solve_multicat(mci),
        Method::Brute => crate::instances::brute_force_solve_multicat(mci),
        Method::UnconU1 => Err(Error::Unsupported("uncon-u1 handles a single category only".into())),
    }
}

fn one() -> usize {
    1
}
fn yes() -> bool {
    true
}

/// A grid cell: every seed gives one generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub n: usize,
    /// Cardinality limit; `None` leaves the cell unconstrained.
    #[serde(default)]
    pub c_bar: Option<usize>,
    pub u_bar: usize,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub category: Option<CategoryTag>,
}

impl CellSpec {
    fn instance(&self, seed: u64) -> Result<Instance> {
        let constraint = match self.c_bar {
            Some(c_bar) => Constraint::Cardinality { c_bar },
            None => Constraint::Unconstrained,
        };
        match &self.category {
            Some(tag) => generate_category_instance(seed, self.n, constraint, self.u_bar, tag),
            None => generate_instance(seed, self.n, constraint, self.u_bar),
        }
    }

    fn category_label(&self) -> String {
        self.category.as_ref().map_or_else(|| "all".to_string(), |t| t.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub cells: Vec<CellSpec>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub time_limit_s: Option<f64>,
    #[serde(default)]
    pub pi_bounds: bool,
    #[serde(default)]
    pub supervalid: bool,
    /// Worker threads; solves are independent.
    #[serde(default = "one")]
    pub workers: usize,
    /// When false, timing columns are left empty so reruns are byte-identical.
    #[serde(default = "yes")]
    pub record_timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub n: usize,
    pub c_bar: Option<usize>,
    pub u_bar: usize,
    pub category: String,
    pub method: Method,
    pub instances: usize,
    /// Runs that finished (proven optimal for exact methods).
    pub solved: usize,
    /// Mean wall time over solved runs.
    pub mean_runtime_s: Option<f64>,
    /// Mean percentage gap to the best proven optimum, over instances that have one.
    pub mean_gap_pct: Option<f64>,
    pub max_gap_pct: Option<f64>,
}

/// Variation of one method's assortments across the `u_bar` values of the
/// suite, for a fixed instance seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationRow {
    pub n: usize,
    pub c_bar: Option<usize>,
    pub category: String,
    pub seed: u64,
    pub method: Method,
    pub u_bars: String,
    pub av: f64,
}

/// One run, for cumulative performance profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub method: Method,
    pub n: usize,
    pub c_bar: Option<usize>,
    pub u_bar: usize,
    pub category: String,
    pub seed: u64,
    pub solved: bool,
    pub time_s: Option<f64>,
    pub objective: f64,
    /// `log10` of the absolute gap to the best known bound, floored at -16.
    pub log10_abs_gap: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub cells: Vec<CellRow>,
    pub variation: Vec<VariationRow>,
    pub profile: Vec<ProfileRow>,
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Validation(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Validation(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

impl BenchReport {
    pub fn cells_csv(&self) -> Result<String> {
        to_csv(&self.cells)
    }
    pub fn variation_csv(&self) -> Result<String> {
        to_csv(&self.variation)
    }
    pub fn profile_csv(&self) -> Result<String> {
        to_csv(&self.profile)
    }
}

struct Run {
    cell: usize,
    seed: u64,
    method: Method,
    result: SolveResult,
}

fn is_solved(result: &SolveResult) -> bool {
    result.status != SolveStatus::TimeLimit
}

/// Runs every method on every instance of the suite.
pub fn bench(spec: &SuiteSpec) -> Result<BenchReport> {
    let options = PlubOptions {
        use_pi_bounds: spec.pi_bounds,
        use_supervalid: spec.supervalid,
        time_limit: spec.time_limit_s.map(Duration::from_secs_f64),
        ..PlubOptions::default()
    };
    let jobs: Vec<(usize, u64, Method)> = spec
        .cells
        .iter()
        .enumerate()
        .flat_map(|(c, cell)| {
            cell.seeds
                .iter()
                .flat_map(move |&seed| spec.methods.iter().map(move |&m| (c, seed, m)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("worker pool: {e}")))?;
    let runs: Vec<Run> = pool.install(|| {
        jobs.par_iter()
            .map(|&(cell, seed, method)| {
                let inst = spec.cells[cell].instance(seed)?;
                let result = solve_with(method, &inst, &options)?;
                Ok(Run { cell, seed, method, result })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let timing = |r: &SolveResult| spec.record_timing.then_some(r.wall_time);
    // Best proven optimum and best bound per instance.
    let reference = |cell: usize, seed: u64| -> (Option<f64>, f64) {
        let same = runs.iter().filter(|r| r.cell == cell && r.seed == seed);
        let optimum = same
            .clone()
            .filter(|r| r.result.status == SolveStatus::Optimal)
            .map(|r| r.result.objective)
            .fold(None, |acc: Option<f64>, z| Some(acc.map_or(z, |a| a.max(z))));
        let bound = same
            .filter_map(|r| r.result.upper_bound)
            .fold(f64::INFINITY, f64::min);
        (optimum, bound)
    };

    let mut report = BenchReport::default();
    for run in &runs {
        let cell = &spec.cells[run.cell];
        let (optimum, bound) = reference(run.cell, run.seed);
        let best = optimum.unwrap_or(bound);
        let abs_gap = if best.is_finite() { (best - run.result.objective).max(0.0) } else { 0.0 };
        report.profile.push(ProfileRow {
            method: run.method,
            n: cell.n,
            c_bar: cell.c_bar,
            u_bar: cell.u_bar,
            category: cell.category_label(),
            seed: run.seed,
            solved: is_solved(&run.result),
            time_s: timing(&run.result),
            objective: run.result.objective,
            log10_abs_gap: abs_gap.max(1e-16).log10(),
        });
    }

    for (c, cell) in spec.cells.iter().enumerate() {
        for &method in &spec.methods {
            let mine: Vec<&Run> = runs.iter().filter(|r| r.cell == c && r.method == method).collect();
            let solved: Vec<&&Run> = mine.iter().filter(|r| is_solved(&r.result)).collect();
            let gaps: Vec<f64> = mine
                .iter()
                .filter_map(|r| reference(c, r.seed).0.map(|opt| gap_percent(opt, r.result.objective)))
                .collect();
            let mean_runtime_s = (spec.record_timing && !solved.is_empty())
                .then(|| solved.iter().map(|r| r.result.wall_time).sum::<f64>() / solved.len() as f64);
            report.cells.push(CellRow {
                n: cell.n,
                c_bar: cell.c_bar,
                u_bar: cell.u_bar,
                category: cell.category_label(),
                method,
                instances: mine.len(),
                solved: solved.len(),
                mean_runtime_s,
                mean_gap_pct: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
                max_gap_pct: gaps.iter().cloned().reduce(f64::max),
            });
        }
    }

    // Group cells that differ only in u_bar.
    type Group = (usize, Option<usize>, Option<CategoryTag>, Vec<usize>);
    let mut groups: Vec<Group> = Vec::new();
    for (c, cell) in spec.cells.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| g.0 == cell.n && g.1 == cell.c_bar && g.2 == cell.category)
        {
            Some(g) => g.3.push(c),
            None => groups.push((cell.n, cell.c_bar, cell.category.clone(), vec![c])),
        }
    }
    for (n, c_bar, _, members) in groups {
        if members.len() < 2 {
            continue;
        }
        let label = spec.cells[members[0]].category_label();
        let u_bars: Vec<String> = members.iter().map(|&c| spec.cells[c].u_bar.to_string()).collect();
        let mut seeds: Vec<u64> = members.iter().flat_map(|&c| spec.cells[c].seeds.iter().copied()).collect();
        seeds.sort_unstable();
        seeds.dedup();
        for seed in seeds {
            for &method in &spec.methods {
                let plans: Vec<Assortment> = members
                    .iter()
                    .filter_map(|&c| {
                        runs.iter()
                            .find(|r| r.cell == c && r.seed == seed && r.method == method)
                            .map(|r| r.result.assortment.clone())
                    })
                    .collect();
                if plans.len() == members.len() {
                    report.variation.push(VariationRow {
                        n,
                        c_bar,
                        category: label.clone(),
                        seed,
                        method,
                        u_bars: u_bars.join(" "),
                        av: assortment_variation(&plans)?,
                    });
                }
            }
        }
    }
    Ok(report)
}
