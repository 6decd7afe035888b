//! Seeded instance generation, JSON file formats and the enumeration oracle.
//!
//! Random streams come from ChaCha8 seeded with `seed_from_u64`, whose output
//! is fixed across platforms. Uniform draws are `lo + (hi - lo) * u` with
//! `u` the standard `[0, 1)` double, so generated files are reproducible.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{Assortment, Constraint, Instance, PreferenceScenario};
use crate::multicat::{CategorySpec, MultiCategoryInstance};
use crate::objective::Mixture;
use crate::solve::{SolveResult, SolveStatus};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 20;

/// Ranges of the product position `o` for the three base customer categories.
const CATEGORY_RANGES: [(f64, f64); 3] = [(0.0, 0.2), (0.4, 0.6), (0.8, 1.0)];

/// A base category or a mix of base categories, written `1`, `2`, `3`, `1,2`,
/// `1,3`, `2,3` or `1,2,3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CategoryTag(Vec<u8>);

impl CategoryTag {
    pub fn new(mut bases: Vec<u8>) -> Result<Self> {
        bases.sort_unstable();
        bases.dedup();
        if bases.is_empty() || bases.iter().any(|b| !(1..=3).contains(b)) {
            return Err(Error::Validation(format!("unknown category tag {bases:?}")));
        }
        Ok(Self(bases))
    }

    pub fn bases(&self) -> &[u8] {
        &self.0
    }

    /// All seven tags in the order 1, 2, 3, 1-2, 1-3, 2-3, 1-2-3.
    pub fn all() -> Vec<CategoryTag> {
        [vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]]
            .into_iter()
            .map(CategoryTag)
            .collect()
    }
}

impl FromStr for CategoryTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bases = s
            .split([',', '-', '+'])
            .map(|p| {
                p.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::Validation(format!("unknown category tag {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        CategoryTag::new(bases)
    }
}

impl fmt::Display for CategoryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for CategoryTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CategoryTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

struct Product {
    revenue: f64,
    mnl_weight: f64,
    leave_prob: f64,
    eta: Vec<f64>,
}

fn draw_product(rng: &mut ChaCha8Rng, range: (f64, f64), columns: usize) -> Product {
    let o = uniform(rng, range.0, range.1);
    let a = uniform(rng, 0.75, 1.25);
    let b = uniform(rng, 0.75, 1.25);
    let d = uniform(rng, 0.75, 1.25);
    Product {
        revenue: 10.0 * o * o * a,
        mnl_weight: 10.0 * (1.0 - o) * b,
        // eta < 2 and d <= 1.25 give eta * p0 < 1 - o.
        leave_prob: 0.4 * (1.0 - o) * d,
        eta: (0..columns)
            .map(|k| 2.0 / (1.0 + (-(k as f64) * (1.0 - o)).exp()))
            .collect(),
    }
}

fn assemble(products: Vec<Product>, u_bar: usize, constraint: Constraint) -> Result<Instance> {
    let mut revenue = Vec::with_capacity(products.len());
    let mut mnl_weight = Vec::with_capacity(products.len());
    let mut leave_prob = Vec::with_capacity(products.len());
    let mut eta = Vec::with_capacity(products.len());
    for p in products {
        revenue.push(p.revenue);
        mnl_weight.push(p.mnl_weight);
        leave_prob.push(p.leave_prob);
        eta.push(p.eta);
    }
    Instance::new(revenue, mnl_weight, leave_prob, eta, u_bar, constraint)
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    Ok(())
}

/// Random instance with `o ~ U[0, 1]`. `eta` gets `max(u_bar, 1)` columns.
pub fn generate_instance(seed: u64, n: usize, constraint: Constraint, u_bar: usize) -> Result<Instance> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = u_bar.max(1);
    let products = (0..n).map(|_| draw_product(&mut rng, (0.0, 1.0), columns)).collect();
    assemble(products, u_bar, constraint)
}

/// Random instance whose `o` values come from the ranges of `tag`; for a mix
/// each product picks one of the listed ranges uniformly.
pub fn generate_category_instance(
    seed: u64,
    n: usize,
    constraint: Constraint,
    u_bar: usize,
    tag: &CategoryTag,
) -> Result<Instance> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = u_bar.max(1);
    let bases = tag.bases();
    let products = (0..n)
        .map(|_| {
            let base = if bases.len() == 1 { bases[0] } else { bases[rng.gen_range(0..bases.len())] };
            draw_product(&mut rng, CATEGORY_RANGES[usize::from(base) - 1], columns)
        })
        .collect();
    assemble(products, u_bar, constraint)
}

/// One category per tag with weights `weights`.
///
/// Each category is generated from its own stream (`seed`, `seed + 1`, ...);
/// the revenues of category 1 are then imposed on all categories, since
/// revenue is a product attribute.
pub fn generate_multicat_instance(
    seed: u64,
    n: usize,
    constraint: Constraint,
    u_bar: usize,
    tags: &[CategoryTag],
    weights: &[f64],
) -> Result<MultiCategoryInstance> {
    if tags.len() != weights.len() || tags.is_empty() {
        return Err(Error::Validation("need one weight per category tag".into()));
    }
    let generated = tags
        .iter()
        .enumerate()
        .map(|(c, tag)| generate_category_instance(seed.wrapping_add(c as u64), n, constraint.clone(), u_bar, tag))
        .collect::<Result<Vec<_>>>()?;
    let revenue = generated[0].revenue().to_vec();
    let specs = generated
        .iter()
        .zip(weights)
        .map(|(inst, &weight)| CategorySpec {
            weight,
            mnl_weight: inst.mnl_weight().to_vec(),
            leave_prob: inst.leave_prob().to_vec(),
            eta: inst.eta().to_vec(),
            u_bar,
        })
        .collect();
    MultiCategoryInstance::from_specs(revenue, constraint, specs)
}

/// Serialized preference scenario for the general purchase model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub lists: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
}

/// Versioned on-disk instance. A multi-category file carries `categories`
/// instead of the top-level choice parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    pub n: usize,
    pub revenue: Vec<f64>,
    pub constraint: Constraint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_bar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mnl_weight: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leave_prob: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<CategorySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
}

/// Parsed contents of an [`InstanceFile`].
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedInstance {
    Single {
        instance: Instance,
        scenario: Option<PreferenceScenario>,
    },
    Multi(MultiCategoryInstance),
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            n: instance.n(),
            revenue: instance.revenue().to_vec(),
            constraint: instance.constraint().clone(),
            u_bar: Some(instance.u_bar()),
            mnl_weight: Some(instance.mnl_weight().to_vec()),
            leave_prob: Some(instance.leave_prob().to_vec()),
            eta: Some(instance.eta().to_vec()),
            categories: None,
            scenario: None,
        }
    }

    pub fn from_multicat(mci: &MultiCategoryInstance) -> Self {
        let first = &mci.categories()[0].instance;
        Self {
            format_version: FORMAT_VERSION,
            n: mci.n(),
            revenue: first.revenue().to_vec(),
            constraint: first.constraint().clone(),
            u_bar: None,
            mnl_weight: None,
            leave_prob: None,
            eta: None,
            categories: Some(mci.specs()),
            scenario: None,
        }
    }

    /// Validates the file and builds the instance it describes.
    pub fn load(&self) -> Result<LoadedInstance> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported format_version {}, expected {FORMAT_VERSION}",
                self.format_version
            )));
        }
        if self.revenue.len() != self.n {
            return Err(Error::Validation(format!(
                "revenue has {} entries but n = {}",
                self.revenue.len(),
                self.n
            )));
        }
        if let Some(specs) = &self.categories {
            if self.mnl_weight.is_some() || self.leave_prob.is_some() || self.eta.is_some() || self.u_bar.is_some() {
                return Err(Error::Validation(
                    "a multi-category file keeps choice parameters inside categories only".into(),
                ));
            }
            if self.scenario.is_some() {
                return Err(Error::Validation("scenarios apply to single-category files only".into()));
            }
            let mci = MultiCategoryInstance::from_specs(self.revenue.clone(), self.constraint.clone(), specs.clone())?;
            return Ok(LoadedInstance::Multi(mci));
        }
        let missing = |field: &str| Error::Validation(format!("missing field {field}"));
        let instance = Instance::new(
            self.revenue.clone(),
            self.mnl_weight.clone().ok_or_else(|| missing("mnl_weight"))?,
            self.leave_prob.clone().ok_or_else(|| missing("leave_prob"))?,
            self.eta.clone().ok_or_else(|| missing("eta"))?,
            self.u_bar.ok_or_else(|| missing("u_bar"))?,
            self.constraint.clone(),
        )?;
        let scenario = self
            .scenario
            .as_ref()
            .map(|s| PreferenceScenario::new(s.lists.clone(), s.weights.clone()))
            .transpose()?;
        Ok(LoadedInstance::Single { instance, scenario })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Hex SHA-256 of the compact JSON encoding, independent of file layout.
    pub fn digest(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)?;
        let hash = Sha256::digest(&bytes);
        Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Solver output written next to an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    /// Digest of the instance this solution belongs to.
    pub instance_ref: String,
    pub method: String,
    pub assortment: Assortment,
    pub objective: f64,
    pub upper_bound: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: u64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub status: SolveStatus,
}

impl SolutionFile {
    pub fn new(instance_ref: String, method: &str, result: &SolveResult) -> Self {
        Self {
            instance_ref,
            method: method.to_string(),
            assortment: result.assortment.clone(),
            objective: result.objective,
            upper_bound: result.upper_bound,
            gap: result.gap,
            nodes: result.nodes,
            iterations: result.iterations,
            wall_time_s: result.wall_time,
            status: result.status,
        }
    }
}

fn lex_less(a: &[bool], b: &[bool]) -> bool {
    let ids = |m: &[bool]| m.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect::<Vec<_>>();
    ids(a) < ids(b)
}

pub(crate) fn brute_force_engine(mix: &Mixture<'_>, limit: usize) -> Result<SolveResult> {
    let start = Instant::now();
    let n = mix.n();
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    let primary = mix.primary();
    let mut best_mask = vec![false; n];
    let mut best = 0.0;
    let mut evaluations = 0u64;
    let mut mask = vec![false; n];
    for bits in 1u64..(1u64 << n) {
        for (i, m) in mask.iter_mut().enumerate() {
            *m = bits >> i & 1 == 1;
        }
        if !primary.is_feasible_mask(&mask) {
            continue;
        }
        evaluations += 1;
        let z = mix.revenue(&mask);
        if z > best || (z == best && lex_less(&mask, &best_mask)) {
            best = z;
            best_mask.clone_from(&mask);
        }
    }
    Ok(SolveResult {
        assortment: Assortment::from_mask(&best_mask),
        objective: best,
        upper_bound: Some(best),
        gap: Some(0.0),
        iterations: 1,
        nodes: evaluations,
        wall_time: start.elapsed().as_secs_f64(),
        trace: Vec::new(),
        status: SolveStatus::Optimal,
    })
}

/// Exhaustive search over feasible assortments; refuses `n > 20`.
/// Ties go to the lexicographically smallest id list.
pub fn brute_force_solve(instance: &Instance) -> Result<SolveResult> {
    brute_force_engine(&Mixture::single(instance), DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn brute_force_solve_with_limit(instance: &Instance, limit: usize) -> Result<SolveResult> {
    brute_force_engine(&Mixture::single(instance), limit)
}

pub fn brute_force_solve_multicat(mci: &MultiCategoryInstance) -> Result<SolveResult> {
    brute_force_engine(&mci.mixture(), DEFAULT_BRUTE_FORCE_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_parsing() {
        assert_eq!("1,3".parse::<CategoryTag>().unwrap().bases(), &[1, 3]);
        assert_eq!("3-2".parse::<CategoryTag>().unwrap().to_string(), "2,3");
        assert!("4".parse::<CategoryTag>().is_err());
        assert!("".parse::<CategoryTag>().is_err());
        assert_eq!(CategoryTag::all().len(), 7);
    }

    #[test]
    fn generated_instances_are_valid_and_deterministic() {
        let c = Constraint::Cardinality { c_bar: 3 };
        let a = generate_instance(9, 12, c.clone(), 4).unwrap();
        let b = generate_instance(9, 12, c.clone(), 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_instance(10, 12, c, 4).unwrap());
        for row in a.eta() {
            assert_eq!(row[0], 1.0);
        }
    }

    #[test]
    fn file_round_trip() {
        let inst = generate_instance(3, 4, Constraint::Knapsack { gamma: vec![1.0; 4], mu: 2.5 }, 2).unwrap();
        let file = InstanceFile::from_instance(&inst);
        let back = InstanceFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.digest().unwrap(), file.digest().unwrap());
        match back.load().unwrap() {
            LoadedInstance::Single { instance, scenario } => {
                assert_eq!(instance, inst);
                assert!(scenario.is_none());
            }
            LoadedInstance::Multi(_) => panic!("expected a single-category file"),
        }
    }

    #[test]
    fn wrong_version_rejected() {
        let inst = generate_instance(3, 2, Constraint::Unconstrained, 1).unwrap();
        let mut file = InstanceFile::from_instance(&inst);
        file.format_version = 99;
        assert!(matches!(file.load(), Err(Error::Validation(_))));
    }

    #[test]
    fn brute_force_guard() {
        let inst = generate_instance(1, 5, Constraint::Unconstrained, 1).unwrap();
        assert!(matches!(
            brute_force_solve_with_limit(&inst, 4),
            Err(Error::TooLarge { n: 5, limit: 4 })
        ));
    }
}
