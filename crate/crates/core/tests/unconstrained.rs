mod common;

use assortment_core::instances::brute_force_solve;
use assortment_core::unconstrained::{g_value, lambda_ladder};
use assortment_core::{solve_unconstrained_u1, Assortment, Constraint, Instance};
use common::*;
use rand::Rng;

fn f_sum(inst: &Instance, offered: &[bool], lambda: f64) -> f64 {
    let pi = oracle_pi(inst, offered);
    (0..inst.n())
        .filter(|&i| offered[i])
        .map(|i| inst.mnl_weight()[i] * (inst.revenue()[i] * pi - lambda))
        .sum()
}

#[test]
fn g_value_predicts_removal() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 8, 1, Constraint::Unconstrained);
        let mut m = random_mask(&mut r, 8);
        m[0] = true;
        let s = Assortment::from_mask(&m);
        for j in s.iter() {
            let g = g_value(&inst, &s, j).unwrap();
            let mut without = m.clone();
            without[j - 1] = false;
            for step in 0..=40 {
                let lambda = 0.25 * step as f64;
                let delta = f_sum(&inst, &without, lambda) - f_sum(&inst, &m, lambda);
                if (lambda - g).abs() > 1e-9 {
                    assert_eq!(g <= lambda, delta >= 0.0, "seed {seed} j {j} lambda {lambda}");
                }
            }
        }
    }
}

#[test]
fn g_value_without_leaving_is_revenue() {
    let mut r = rng(1);
    let inst = random_instance(&mut r, 6, 1, Constraint::Unconstrained);
    let calm = Instance::new(
        inst.revenue().to_vec(),
        inst.mnl_weight().to_vec(),
        vec![0.0; 6],
        vec![vec![1.0]; 6],
        1,
        Constraint::Unconstrained,
    )
    .unwrap();
    let s = Assortment::new([2, 3, 5]).unwrap();
    for j in s.iter() {
        assert!((g_value(&calm, &s, j).unwrap() - calm.revenue()[j - 1]).abs() < 1e-12);
    }
}

#[test]
fn ladder_structure() {
    for seed in 0..50 {
        let mut r = rng(100 + seed);
        let n = r.gen_range(1..=12);
        let inst = random_instance(&mut r, n, 1, Constraint::Unconstrained);
        let (ladder, best, z) = lambda_ladder(&inst).unwrap();
        assert_eq!(ladder.breakpoints.len(), n + 1);
        assert_eq!(ladder.breakpoints[0], 0.0);
        assert_eq!(ladder.assortments[0], Assortment::full(n));
        for k in 1..=n {
            assert!(ladder.breakpoints[k] >= ladder.breakpoints[k - 1]);
            let (big, small) = (&ladder.assortments[k - 1], &ladder.assortments[k]);
            assert_eq!(small.len() + 1, big.len());
            assert!(small.iter().all(|id| big.contains(id)));
        }
        assert!(ladder.assortments.contains(&best));
        assert!(z >= 0.0);
    }
}

#[test]
fn calm_customers_remove_by_weighted_revenue() {
    let mut r = rng(3);
    for _ in 0..20 {
        let n = r.gen_range(2..=10);
        let base = random_instance(&mut r, n, 1, Constraint::Unconstrained);
        let inst = Instance::new(
            base.revenue().to_vec(),
            base.mnl_weight().to_vec(),
            vec![0.0; n],
            vec![vec![1.0]; n],
            1,
            Constraint::Unconstrained,
        )
        .unwrap();
        let (ladder, _, _) = lambda_ladder(&inst).unwrap();
        // With pi = 1, g = r_j, so products leave in ascending revenue.
        let mut order: Vec<usize> = (1..=n).collect();
        order.sort_by(|&a, &b| inst.revenue()[a - 1].total_cmp(&inst.revenue()[b - 1]).then(a.cmp(&b)));
        for k in 1..=n {
            let gone: Vec<usize> = ladder.assortments[k - 1]
                .iter()
                .filter(|&id| !ladder.assortments[k].contains(id))
                .collect();
            assert_eq!(gone, vec![order[k - 1]]);
        }
        let (res, _) = solve_unconstrained_u1(&inst).unwrap();
        assert!(close(res.objective, oracle_optima(&inst, 0.0).0, 1e-12));
    }
}

#[test]
fn optimal_against_enumeration() {
    for seed in 0..200 {
        let mut r = rng(1000 + seed);
        let n = r.gen_range(1..=12);
        let inst = random_instance(&mut r, n, 1, Constraint::Unconstrained);
        let (res, _) = solve_unconstrained_u1(&inst).unwrap();
        let brute = brute_force_solve(&inst).unwrap();
        assert_eq!(res.objective, brute.objective, "seed {seed}");
    }
}

#[test]
fn constrained_instances_are_rejected() {
    let mut r = rng(4);
    let inst = random_instance(&mut r, 4, 1, Constraint::Cardinality { c_bar: 2 });
    assert!(solve_unconstrained_u1(&inst).is_err());
}
