mod common;

use assortment_core::instances::{brute_force_solve_multicat, brute_force_solve_with_limit, LoadedInstance};
use assortment_core::{
    brute_force_solve, generate_category_instance, generate_instance, generate_multicat_instance, greedy_solve,
    plub_solve, CategoryTag, Constraint, InstanceFile, PlubOptions,
};
use common::*;

#[test]
fn golden_seed_42() {
    let inst = generate_instance(42, 5, Constraint::Cardinality { c_bar: 2 }, 2).unwrap();
    let text = InstanceFile::from_instance(&inst).to_json().unwrap();
    assert_eq!(text, include_str!("data/seed42_n5.json"));
}

#[test]
fn generated_parameters_follow_the_recipe() {
    for seed in 0..50 {
        let inst = generate_instance(seed, 30, Constraint::Unconstrained, 5).unwrap();
        for i in 0..30 {
            let (r, nu, p0) = (inst.revenue()[i], inst.mnl_weight()[i], inst.leave_prob()[i]);
            assert_eq!(inst.eta()[i][0], 1.0);
            assert!((0.0..=12.5).contains(&r));
            assert!((0.0..=12.5).contains(&nu));
            assert!((0.0..=0.5).contains(&p0));
            // nu = 10 (1 - o) b with b >= 0.75 bounds 1 - o, which bounds eta * p0.
            for k in 0..5 {
                assert!(inst.eta()[i][k] * p0 <= nu / 7.5 + 1e-12);
                assert!(inst.eta()[i][k] * p0 < 1.0);
            }
            assert!(inst.eta()[i].windows(2).all(|w| w[1] >= w[0]));
        }
    }
}

#[test]
fn category_ranges() {
    let three = CategoryTag::new(vec![3]).unwrap();
    let one = CategoryTag::new(vec![1]).unwrap();
    let (mut mean1, mut mean3) = (0.0, 0.0);
    for seed in 0..20 {
        let a = generate_category_instance(seed, 40, Constraint::Unconstrained, 1, &three).unwrap();
        assert!(a.leave_prob().iter().all(|&p| p <= 0.1 + 1e-15));
        let b = generate_category_instance(seed, 40, Constraint::Unconstrained, 1, &one).unwrap();
        mean3 += a.leave_prob().iter().sum::<f64>();
        mean1 += b.leave_prob().iter().sum::<f64>();
    }
    assert!(mean1 > mean3);
}

#[test]
fn mixed_category_fraction() {
    // With o in [0, 0.2], r = 10 o^2 a <= 0.5; the other range gives r >= 1.2.
    let tag = CategoryTag::new(vec![1, 2]).unwrap();
    let inst = generate_category_instance(5, 4000, Constraint::Unconstrained, 1, &tag).unwrap();
    let low = inst.revenue().iter().filter(|&&r| r <= 0.5).count() as f64 / 4000.0;
    let se = (0.25f64 / 4000.0).sqrt();
    assert!((low - 0.5).abs() < 4.0 * se, "fraction {low}");
}

#[test]
fn multicat_generation_shares_revenue() {
    let tags: Vec<CategoryTag> = CategoryTag::all().into_iter().take(3).collect();
    let mci = generate_multicat_instance(8, 6, Constraint::Cardinality { c_bar: 2 }, 2, &tags, &[0.2, 0.3, 0.5]).unwrap();
    let r = mci.categories()[0].instance.revenue().to_vec();
    assert!(mci.categories().iter().all(|c| c.instance.revenue() == r.as_slice()));
    let file = InstanceFile::from_multicat(&mci);
    match InstanceFile::from_json(&file.to_json().unwrap()).unwrap().load().unwrap() {
        LoadedInstance::Multi(back) => assert_eq!(back, mci),
        LoadedInstance::Single { .. } => panic!("expected categories"),
    }
}

#[test]
fn brute_force_small_cases() {
    let inst = generate_instance(1, 1, Constraint::Unconstrained, 1).unwrap();
    let res = brute_force_solve(&inst).unwrap();
    assert_eq!(res.nodes, 1);
    assert_eq!(res.assortment.ids(), &[1]);
    assert!(brute_force_solve_with_limit(&inst, 0).is_err());
}

/// Second enumerator for constrained MNL: try every size and, for each, every subset.
#[test]
fn brute_force_double_entry_u0() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 9, 0, Constraint::Cardinality { c_bar: 3 });
        let brute = brute_force_solve(&inst).unwrap();
        let mut best = 0.0f64;
        for a in 0..9 {
            for b in a..9 {
                for c in b..9 {
                    let mut m = vec![false; 9];
                    m[a] = true;
                    m[b] = true;
                    m[c] = true;
                    best = best.max(oracle_mnl_revenue(&inst, &m));
                }
            }
        }
        assert!(close(brute.objective, best, 1e-12));
    }
}

#[test]
fn brute_force_dominates() {
    for seed in 0..20 {
        let inst = generate_instance(seed, 9, Constraint::Cardinality { c_bar: 3 }, 2).unwrap();
        let brute = brute_force_solve(&inst).unwrap();
        assert!(brute.objective >= greedy_solve(&inst).unwrap().objective);
        let res = plub_solve(&inst, &PlubOptions::default()).unwrap();
        for t in &res.trace {
            assert!(brute.objective >= t.incumbent);
            assert!(t.upper_bound >= brute.objective - 1e-12);
        }
    }
}

#[test]
fn brute_force_ties_pick_smallest_ids() {
    let inst = assortment_core::Instance::new(
        vec![1.0; 3],
        vec![1.0; 3],
        vec![0.0; 3],
        vec![vec![1.0]; 3],
        1,
        Constraint::Cardinality { c_bar: 1 },
    )
    .unwrap();
    assert_eq!(brute_force_solve(&inst).unwrap().assortment.ids(), &[1]);
}

#[test]
fn multicat_brute_force_is_single_for_one_category() {
    let inst = generate_instance(3, 7, Constraint::Cardinality { c_bar: 3 }, 2).unwrap();
    let mci = assortment_core::MultiCategoryInstance::single(inst.clone());
    assert_eq!(brute_force_solve_multicat(&mci).unwrap().objective, brute_force_solve(&inst).unwrap().objective);
}
