#![allow(dead_code)]

use assortment_core::{Assortment, Constraint, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance with parameters drawn independently of the crate generator.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, u_bar: usize, constraint: Constraint) -> Instance {
    let cols = u_bar.max(1);
    let revenue = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
    let nu = (0..n).map(|_| rng.gen_range(0.05..5.0)).collect();
    let p0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.45)).collect();
    let eta = p0
        .iter()
        .map(|p| {
            let mut row = vec![1.0];
            for _ in 1..cols {
                let cap = 0.99 / p.max(1e-9);
                row.push(rng.gen_range(0.5..2.0f64).min(cap));
            }
            row
        })
        .collect();
    Instance::new(revenue, nu, p0, eta, u_bar, constraint).unwrap()
}

pub fn random_mask(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(0.5)).collect()
}

pub fn mask_of(a: &Assortment, n: usize) -> Vec<bool> {
    a.to_mask(n).unwrap()
}

fn permutations(pool: &[usize], len: usize, prefix: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if prefix.len() == len {
        visit(prefix);
        return;
    }
    for &p in pool {
        if !prefix.contains(&p) {
            prefix.push(p);
            permutations(pool, len, prefix, visit);
            prefix.pop();
        }
    }
}

/// Staying probability by enumerating every ordered list of unavailable products.
pub fn oracle_pi(inst: &Instance, offered: &[bool]) -> f64 {
    let out: Vec<usize> = (0..inst.n()).filter(|&i| !offered[i]).collect();
    let m = inst.u_bar().min(out.len());
    let mut best = f64::INFINITY;
    permutations(&out, m, &mut Vec::new(), &mut |list| {
        let stay: f64 = list
            .iter()
            .enumerate()
            .map(|(k, &i)| 1.0 - inst.eta()[i][k] * inst.leave_prob()[i])
            .product();
        best = best.min(stay);
    });
    best
}

/// Staying probability through the log costs, summed in position order.
pub fn oracle_theta(inst: &Instance, offered: &[bool]) -> f64 {
    let out: Vec<usize> = (0..inst.n()).filter(|&i| !offered[i]).collect();
    let m = inst.u_bar().min(out.len());
    let mut best = 0.0f64;
    let mut first = true;
    permutations(&out, m, &mut Vec::new(), &mut |list| {
        let t: f64 = list
            .iter()
            .enumerate()
            .map(|(k, &i)| (-(inst.eta()[i][k] * inst.leave_prob()[i])).ln_1p())
            .fold(0.0, |a, c| a + c);
        if first || t < best {
            best = t;
            first = false;
        }
    });
    best
}

pub fn oracle_mnl_revenue(inst: &Instance, offered: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut den = 1.0;
    for i in 0..inst.n() {
        if offered[i] {
            num += inst.mnl_weight()[i] * inst.revenue()[i];
            den += inst.mnl_weight()[i];
        }
    }
    num / den
}

pub fn oracle_revenue(inst: &Instance, offered: &[bool]) -> f64 {
    if !offered.iter().any(|&b| b) {
        return 0.0;
    }
    oracle_pi(inst, offered) * oracle_mnl_revenue(inst, offered)
}

pub fn feasible(inst: &Instance, offered: &[bool]) -> bool {
    let size = offered.iter().filter(|&&b| b).count();
    match inst.constraint() {
        Constraint::Unconstrained => true,
        Constraint::Cardinality { c_bar } => size <= *c_bar,
        Constraint::Knapsack { gamma, mu } => {
            offered.iter().zip(gamma).filter(|(&b, _)| b).map(|(_, g)| g).sum::<f64>() <= *mu
        }
    }
}

/// Every feasible membership mask, including the empty one.
pub fn feasible_masks(inst: &Instance) -> Vec<Vec<bool>> {
    let n = inst.n();
    (0u32..1 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|m| feasible(inst, m))
        .collect()
}

/// Optimal revenue and the set of optimal masks, within `tol`.
pub fn oracle_optima(inst: &Instance, tol: f64) -> (f64, Vec<Vec<bool>>) {
    let scored: Vec<(Vec<bool>, f64)> = feasible_masks(inst)
        .into_iter()
        .map(|m| {
            let z = oracle_revenue(inst, &m);
            (m, z)
        })
        .collect();
    let best = scored.iter().map(|(_, z)| *z).fold(0.0, f64::max);
    let optimal = scored.into_iter().filter(|(_, z)| *z >= best - tol).map(|(m, _)| m).collect();
    (best, optimal)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
