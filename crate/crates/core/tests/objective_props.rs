mod common;

use hierrev::algorithm::random_tree;
use hierrev::objective::{
    brute_force_opt, ckmm_value, dasgupta_cost, evaluate, high_revenue_stats, pair_revenue, revenue_total,
    revenue_upper_bound, split_revenue, tree_revenue, triangle_decompose, triangle_revenues, Instance,
    ObjectiveKind, RevenueMode,
};
use hierrev::tree::enumerate_trees;
use hierrev::{PointSet, RngStream};
use proptest::prelude::*;

use common::{clumpy_points, rel_close, uniform_points};

fn instance(seed: u64, max_n: usize) -> (PointSet, hierrev::HierTree) {
    let mut rng = RngStream::new(seed);
    let n = 2 + rng.index(max_n - 1);
    let dim = 1 + rng.index(4);
    let points = if seed % 2 == 0 { uniform_points(&mut rng, n, dim) } else { clumpy_points(&mut rng, n, dim) };
    let tree = random_tree(n, &mut rng);
    (points, tree)
}

proptest! {
    #[test]
    fn revenue_modes_agree(seed in any::<u64>()) {
        let (points, tree) = instance(seed, 30);
        let a = tree_revenue(&points, &tree, RevenueMode::SplitSum).unwrap();
        let b = tree_revenue(&points, &tree, RevenueMode::PairSum).unwrap();
        prop_assert!(rel_close(a.total, b.total, 1e-9));
        prop_assert!(rel_close(a.total, revenue_total(&points, &tree).unwrap(), 1e-12));
    }

    #[test]
    fn revenue_is_bounded_by_pair_count(seed in any::<u64>()) {
        let (points, tree) = instance(seed, 30);
        let report = tree_revenue(&points, &tree, RevenueMode::SplitSum).unwrap();
        prop_assert!(report.total >= 0.0);
        prop_assert!(report.total <= revenue_upper_bound(points.len()) + 1e-9);
        prop_assert_eq!(report.upper_bound, revenue_upper_bound(points.len()));
        for (s, v) in &report.per_split {
            prop_assert!(*v >= 0.0 && *v <= s.cross_pairs() as f64 + 1e-9);
        }
    }

    #[test]
    fn pair_revenue_lies_in_unit_interval(seed in any::<u64>()) {
        let (points, tree) = instance(seed, 12);
        for s in tree.splits() {
            let mut sum = 0.0;
            for &i in &s.left {
                for &j in &s.right {
                    let r = pair_revenue(&points, &s.left, &s.right, i, j).unwrap();
                    prop_assert!((0.0..=1.0).contains(&r));
                    sum += r;
                }
            }
            prop_assert!(rel_close(sum, split_revenue(&points, &s.left, &s.right).unwrap(), 1e-12));
        }
    }

    #[test]
    fn revenue_is_scale_invariant(seed in any::<u64>(), scale in 0.01..100.0f64) {
        let (points, tree) = instance(seed, 20);
        let scaled = points.map_coords(|_, x| x * scale).unwrap();
        let a = revenue_total(&points, &tree).unwrap();
        let b = revenue_total(&scaled, &tree).unwrap();
        prop_assert!(rel_close(a, b, 1e-9), "{} vs {}", a, b);
    }

    #[test]
    fn triangle_decomposition_reconstructs_both_objectives(seed in any::<u64>()) {
        let (points, tree) = instance(seed, 25);
        let d = points.pairwise_distances();
        if points.len() < 3 {
            prop_assert!(triangle_decompose(&d, &tree).is_err());
            return Ok(());
        }
        let tri = triangle_decompose(&d, &tree).unwrap();
        prop_assert!(rel_close(tri.reconstructed_total, ckmm_value(&d, &tree).unwrap().total, 1e-9));
        prop_assert!(rel_close(tri.reconstructed_total, dasgupta_cost(&d, &tree).unwrap().total, 1e-9));
        prop_assert!(rel_close(tri.pair_term, 2.0 * d.pair_sum(), 1e-12));
    }

    #[test]
    fn triangle_revenue_is_at_least_half_the_perimeter_share(seed in any::<u64>()) {
        // the two retained sides of a metric triangle are at least half its perimeter
        let (points, tree) = instance(seed, 10);
        prop_assume!(points.len() >= 3);
        let d = points.pairwise_distances();
        for ((i, j, k), r) in triangle_revenues(&d, &tree).unwrap() {
            let perimeter = d.get(i, j) + d.get(j, k) + d.get(i, k);
            prop_assert!(r >= 0.5 * perimeter - 1e-9);
            prop_assert!(r <= perimeter + 1e-9);
        }
    }

    #[test]
    fn ckmm_and_dasgupta_respect_their_bound_fields(seed in any::<u64>()) {
        let (points, tree) = instance(seed, 25);
        let d = points.pairwise_distances();
        let ck = ckmm_value(&d, &tree).unwrap();
        prop_assert!(ck.total <= ck.upper_bound + 1e-9);
        let dg = dasgupta_cost(&d, &tree).unwrap();
        prop_assert!(dg.total >= dg.upper_bound - 1e-9);
    }
}

#[test]
fn every_tree_approximates_ckmm_and_dasgupta() {
    let mut rng = RngStream::new(5);
    let trees: Vec<_> = enumerate_trees(5).unwrap().collect();
    for _ in 0..20 {
        let points = uniform_points(&mut rng, 5, 3);
        let d = points.pairwise_distances();
        let (best, opt) = brute_force_opt(Instance::Matrix(&d), ObjectiveKind::Ckmm).unwrap();
        assert!(rel_close(ckmm_value(&d, &best).unwrap().total, opt, 1e-12));
        let (_, min_cost) = brute_force_opt(Instance::Matrix(&d), ObjectiveKind::Dasgupta).unwrap();
        for t in &trees {
            let ck = ckmm_value(&d, t).unwrap().total;
            assert!(ck <= opt + 1e-9 && ck >= 0.5 * opt - 1e-9);
            let dg = dasgupta_cost(&d, t).unwrap().total;
            assert!(dg >= min_cost - 1e-9 && dg <= 2.0 * min_cost + 1e-9);
        }
    }
}

#[test]
fn brute_force_revenue_dominates_every_tree() {
    let mut rng = RngStream::new(6);
    for _ in 0..10 {
        let points = uniform_points(&mut rng, 5, 2);
        let (_, best) = brute_force_opt(Instance::Points(&points), ObjectiveKind::Revenue).unwrap();
        for t in enumerate_trees(5).unwrap() {
            assert!(revenue_total(&points, &t).unwrap() <= best + 1e-9);
        }
    }
}

#[test]
fn evaluate_dispatches_by_kind() {
    let points = PointSet::from_line(&[0.0, 1.0, 5.0]).unwrap();
    let tree = "((0,1),2)".parse().unwrap();
    let rev = evaluate(Instance::Points(&points), &tree, ObjectiveKind::Revenue).unwrap();
    assert_eq!(rev.total, 3.0);
    // ckmm: d(0,1)*2 + (5 + 4)*3
    let ck = evaluate(Instance::Points(&points), &tree, ObjectiveKind::Ckmm).unwrap();
    assert_eq!(ck.total, 29.0);
    let d = points.pairwise_distances();
    assert!(evaluate(Instance::Matrix(&d), &tree, ObjectiveKind::Revenue).is_err());
}

#[test]
fn high_revenue_fraction_for_well_separated_split() {
    let points = PointSet::from_line(&[0.0, 0.1, 0.2, 10.0, 10.1]).unwrap();
    let stats = high_revenue_stats(&points, &[0, 1, 2], &[3, 4]).unwrap();
    assert_eq!(stats.side_a, vec![0, 1, 2]);
    assert_eq!(stats.fraction, 1.0);
}
