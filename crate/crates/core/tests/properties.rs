//! Invariants of the metric kernel, welfare, mechanisms and checkers on random inputs.

use num_rational::Ratio;
use proptest::prelude::*;
use rand::Rng;

use ofl_core::experiments::{
    consistency_bound, corpus, evaluate_instance, fuzz_bounds, item_rng, robustness_bound, witness, ApproximationRatio,
    FuzzConfig, GeneratorConfig, Setting, WitnessTarget,
};
use ofl_core::game_checks::{check_coalition, CoalitionSearch, MisreportSet};
use ofl_core::mechanisms::{DualRule, Instance, MechanismConfig, Prediction, VoteCounts};
use ofl_core::spaces::{Point, Space, SpaceKind, TreeGraph, TreePoint};
use ofl_core::welfare::{grid_oracle, optimal_location, social_welfare, LocationProfile, Preference, WelfareModel};
use ofl_core::Scalar;

type Q = Ratio<i128>;

fn random_tree<R: Rng>(rng: &mut R, max_vertices: usize) -> TreeGraph<f64> {
    let n = rng.gen_range(2..=max_vertices);
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v, rng.gen_range(0.1..=2.0))).collect();
    TreeGraph::new(n, edges).unwrap()
}

fn random_tree_point<R: Rng>(rng: &mut R, tree: &TreeGraph<f64>) -> TreePoint<f64> {
    if rng.gen_bool(0.3) {
        TreePoint::Vertex(rng.gen_range(0..tree.vertex_count()))
    } else {
        let edge = rng.gen_range(0..tree.edges().len());
        let offset = tree.edges()[edge].length * rng.gen_range(0.01..0.99);
        TreePoint::Edge { edge, offset }
    }
}

fn random_point<R: Rng>(rng: &mut R, space: &Space<f64>) -> Point<f64> {
    match space {
        Space::Segment => Point::Segment(rng.gen()),
        Space::Square => Point::Square([rng.gen(), rng.gen()]),
        Space::Circle => Point::Circle(rng.gen()),
        Space::Tree(tree) => Point::Tree(random_tree_point(rng, tree)),
    }
}

#[test]
fn metric_axioms_on_random_triples() {
    let mut rng = item_rng(1, 0);
    let mut tree = random_tree(&mut rng, 20);
    for (index, space) in [Space::Segment, Space::Square, Space::Circle, Space::Tree(tree.clone())]
        .into_iter()
        .enumerate()
    {
        let mut space = space;
        for round in 0..100_000 {
            if index == 3 && round % 1000 == 0 {
                tree = random_tree(&mut rng, 20);
                space = Space::Tree(tree.clone());
            }
            let [x, y, z] = [0; 3].map(|_| random_point(&mut rng, &space));
            let d = |p: &Point<f64>, q: &Point<f64>| space.distance(p, q).unwrap();
            assert!(d(&x, &y) + d(&y, &z) >= d(&x, &z) - 1e-12, "{x} {y} {z}");
            assert_eq!(d(&x, &y), d(&y, &x));
            assert_eq!(d(&x, &x), 0.0);
            let cap = match space {
                Space::Segment => 1.0,
                Space::Square => 2f64.sqrt(),
                Space::Circle => 0.5,
                Space::Tree(_) => f64::INFINITY,
            };
            assert!(d(&x, &y) <= cap);
        }
    }
}

#[test]
fn path_points_sit_at_the_requested_fraction() {
    let mut rng = item_rng(2, 0);
    for _ in 0..200 {
        let tree = random_tree(&mut rng, 20);
        for _ in 0..50 {
            let a = random_tree_point(&mut rng, &tree);
            let b = random_tree_point(&mut rng, &tree);
            let t: f64 = rng.gen();
            let p = tree.path_point(&a, &b, t).unwrap();
            let total = tree.distance(&a, &b).unwrap();
            assert!((tree.distance(&a, &p).unwrap() - t * total).abs() <= 1e-12, "{a} {b} {t}");
            assert!((tree.distance(&p, &b).unwrap() - (1.0 - t) * total).abs() <= 1e-12);
        }
    }
}

#[test]
fn augmentation_preserves_distances() {
    let mut rng = item_rng(3, 0);
    for _ in 0..300 {
        let tree = random_tree(&mut rng, 12);
        let points: Vec<_> = (0..8).map(|_| random_tree_point(&mut rng, &tree)).collect();
        let (augmented, ids) = tree.augment(&points).unwrap();
        for i in 0..points.len() {
            for j in 0..points.len() {
                let before = tree.distance(&points[i], &points[j]).unwrap();
                let after = augmented
                    .distance(&TreePoint::Vertex(ids[i]), &TreePoint::Vertex(ids[j]))
                    .unwrap();
                assert!((before - after).abs() <= 1e-12);
            }
        }
        for u in 0..tree.vertex_count() {
            for v in 0..tree.vertex_count() {
                let (u, v) = (TreePoint::Vertex(u), TreePoint::Vertex(v));
                assert!((tree.distance(&u, &v).unwrap() - augmented.distance(&u, &v).unwrap()).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn midpoint_split_partitions_the_agents() {
    let mut rng = item_rng(4, 0);
    for _ in 0..2000 {
        let tree = random_tree(&mut rng, 15);
        let agents: Vec<_> = (0..rng.gen_range(0..10)).map(|_| random_tree_point(&mut rng, &tree)).collect();
        let a = random_tree_point(&mut rng, &tree);
        let b = random_tree_point(&mut rng, &tree);
        if let Ok(split) = tree.split_at_midpoint(&agents, &a, &b) {
            assert_eq!(split.n_a + split.n_b, agents.len());
            assert_eq!(split.on_a_side.iter().filter(|&&s| s).count(), split.n_a);
        }
    }
}

fn oracle_step(space: &Space<f64>, m: usize) -> f64 {
    let base = 1.0 / m as f64;
    match space {
        Space::Tree(tree) => tree.edges().iter().map(|e| e.length).fold(0.0, f64::max) * base,
        Space::Square => base * 2f64.sqrt(),
        _ => base,
    }
}

#[test]
fn closed_form_optimum_dominates_the_grid_oracle() {
    let gen = GeneratorConfig::default();
    for setting in Setting::ALL {
        let m = 64;
        for inst in corpus(setting, 10_000, 5, &gen) {
            let (_, opt) = optimal_location(&inst.space, &inst.profile, inst.model).unwrap();
            let (_, grid) = grid_oracle(&inst.space, &inst.profile, inst.model, m).unwrap();
            let h = oracle_step(&inst.space, m);
            assert!(opt >= grid - 1e-9, "{setting}: {opt} < {grid}");
            assert!(opt - grid <= inst.profile.len() as f64 * h / 2.0 + 1e-9, "{setting}");
        }
    }
}

#[test]
fn dual_identity() {
    let mut rng = item_rng(6, 0);
    for _ in 0..10_000 {
        let x: f64 = rng.gen();
        let star = 1.0 - x;
        let d = |a: f64, b: f64| (a - b).abs();
        assert_eq!(d(0.0, x) + d(0.0, star), 1.0);
        assert_eq!(d(1.0, x) + d(1.0, star), 1.0);
        let y: f64 = rng.gen();
        assert!(d(y, x) + d(y, star) <= 1.0 + 1e-15);
    }
    let one = Q::from_integer(1);
    for k in 0..=64 {
        let x = Q::new(k, 64);
        let star = one - x;
        for y in [Q::from_integer(0), one] {
            let d = |a: Q, b: Q| Space::Segment.distance(&Point::Segment(a), &Point::Segment(b)).unwrap();
            assert_eq!(d(y, x) + d(y, star), one);
        }
    }
}

fn dyadic_profile(space: &Space<Q>, coords: &[(i128, i128)]) -> LocationProfile<Q> {
    let points = coords
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (Q::new(a, 64), Q::new(b, 64));
            match space {
                Space::Segment => Point::Segment(x),
                Space::Circle => Point::Circle(x),
                Space::Square => Point::Square([x, y]),
                Space::Tree(tree) => {
                    let edge = (a as usize) % tree.edges().len();
                    Point::Tree(TreePoint::Edge {
                        edge,
                        offset: tree.edges()[edge].length * Q::new(1 + b % 63, 64),
                    })
                }
            }
        })
        .collect();
    LocationProfile::new(points)
}

fn dyadic_spaces() -> Vec<Space<Q>> {
    let tree = TreeGraph::new(
        6,
        vec![
            (0, 1, Q::new(1, 2)),
            (1, 2, Q::new(3, 4)),
            (1, 3, Q::from_integer(2)),
            (3, 4, Q::new(1, 8)),
            (3, 5, Q::new(5, 4)),
        ],
    )
    .unwrap();
    vec![Space::Segment, Space::Circle, Space::Tree(tree)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn welfare_is_permutation_invariant(
        coords in prop::collection::vec((0i128..=64, 0i128..=64), 1..8),
        rotation in 0usize..8,
    ) {
        for space in dyadic_spaces() {
            let profile = dyadic_profile(&space, &coords);
            let mut permuted = profile.points.clone();
            let shift = rotation % permuted.len();
            permuted.rotate_left(shift);
            permuted.reverse();
            let permuted = LocationProfile::new(permuted);
            let (y, opt) = optimal_location(&space, &profile, WelfareModel::Obnoxious).unwrap();
            prop_assert_eq!(optimal_location(&space, &permuted, WelfareModel::Obnoxious).unwrap(), (y, opt));
            let probe = profile.points[0];
            prop_assert_eq!(
                social_welfare(&space, &profile, WelfareModel::Obnoxious, &probe).unwrap(),
                social_welfare(&space, &permuted, WelfareModel::Obnoxious, &probe).unwrap()
            );
        }
    }

    #[test]
    fn duplication_scales_welfare_exactly(
        coords in prop::collection::vec((0i128..=64, 0i128..=64), 1..6),
        k in 1usize..5,
    ) {
        for space in dyadic_spaces() {
            let profile = dyadic_profile(&space, &coords);
            let copies = LocationProfile::new(
                profile.points.iter().flat_map(|p| std::iter::repeat_n(*p, k)).collect(),
            );
            let (_, opt) = optimal_location(&space, &profile, WelfareModel::Obnoxious).unwrap();
            let (_, opt_k) = optimal_location(&space, &copies, WelfareModel::Obnoxious).unwrap();
            prop_assert_eq!(opt_k, opt * Q::from_integer(k as i128));
            for y in &profile.points {
                let w = social_welfare(&space, &profile, WelfareModel::Obnoxious, y).unwrap();
                let w_k = social_welfare(&space, &copies, WelfareModel::Obnoxious, y).unwrap();
                prop_assert_eq!(w_k, w * Q::from_integer(k as i128));
            }
        }
    }

    #[test]
    fn square_duplication_scales_welfare(
        coords in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..6),
        k in 1usize..5,
    ) {
        let points: Vec<_> = coords.iter().map(|&(x, y)| Point::Square([x, y])).collect();
        let profile = LocationProfile::new(points.clone());
        let copies = LocationProfile::new(points.iter().flat_map(|p| std::iter::repeat_n(*p, k)).collect());
        let (_, opt) = optimal_location(&Space::Square, &profile, WelfareModel::Obnoxious).unwrap();
        let (_, opt_k) = optimal_location(&Space::Square, &copies, WelfareModel::Obnoxious).unwrap();
        prop_assert!((opt_k - opt * k as f64).abs() <= 1e-12 * opt_k.max(1.0));
    }
}

fn output_set(inst: &Instance<f64>, counts: &VoteCounts<f64>) -> Vec<Point<f64>> {
    match (&inst.space, counts) {
        (Space::Segment, _) => vec![Point::Segment(0.0), Point::Segment(1.0)],
        (Space::Square, _) => [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
            .into_iter()
            .map(Point::Square)
            .collect(),
        (Space::Circle, VoteCounts::Circle { antipode, .. }) => vec![*inst.prediction.point(), Point::Circle(*antipode)],
        (Space::Tree(_), VoteCounts::Tree { a, b, .. }) => vec![Point::Tree(*a), Point::Tree(*b)],
        _ => unreachable!(),
    }
}

#[test]
fn traces_are_well_formed() {
    let gen = GeneratorConfig::default();
    for setting in Setting::ALL {
        for inst in corpus(setting, 2000, 7, &gen) {
            let n = inst.profile.len();
            for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let trace = inst.run(&MechanismConfig::new(lambda).unwrap()).unwrap();
                assert!(trace.counts.totals().iter().all(|&t| t == n), "{setting}");
                assert!(output_set(&inst, &trace.counts).contains(&trace.chosen), "{setting}");
                if lambda == 1.0 && matches!(setting, Setting::Segment | Setting::Square | Setting::Circle) {
                    assert_eq!(trace.chosen, *inst.prediction.point(), "{setting}");
                }
            }
        }
    }
}

fn coordinates(p: &Point<f64>) -> Vec<f64> {
    match p {
        Point::Segment(x) => vec![*x],
        Point::Square(xy) => xy.to_vec(),
        _ => unreachable!(),
    }
}

#[test]
fn hypercube_majority_properties() {
    let gen = GeneratorConfig::default();
    for setting in [Setting::Segment, Setting::Square] {
        for inst in corpus(setting, 3000, 8, &gen) {
            let predicted = coordinates(inst.prediction.point());
            let zero = inst.run(&MechanismConfig::new(0.0).unwrap()).unwrap();
            let VoteCounts::Coordinatewise(tallies) = &zero.counts else { panic!() };
            for (i, t) in tallies.iter().enumerate() {
                let (for_pred, against) = if predicted[i] == 1.0 {
                    (t.for_one, t.for_zero)
                } else {
                    (t.for_zero, t.for_one)
                };
                if against > for_pred {
                    assert_ne!(f64::from(t.output), predicted[i]);
                }
            }

            // The trust levels at which each coordinate follows the prediction form an up-set.
            let mut followed = vec![false; predicted.len()];
            for step in 0..=20 {
                let trace = inst.run(&MechanismConfig::new(f64::from(step) / 20.0).unwrap()).unwrap();
                let chosen = coordinates(&trace.chosen);
                for i in 0..predicted.len() {
                    let follows = chosen[i] == predicted[i];
                    assert!(follows || !followed[i], "coordinate {i} stopped following the prediction");
                    followed[i] = follows;
                }
            }

            // Mirroring every agent and the prediction mirrors the output when no agent sits at 1/2.
            let points = &inst.profile.points;
            if points.iter().all(|p| coordinates(p).iter().all(|&c| c != 0.5)) {
                let mirror = |p: &Point<f64>| match p {
                    Point::Segment(x) => Point::Segment(1.0 - x),
                    Point::Square([x, y]) => Point::Square([1.0 - x, 1.0 - y]),
                    _ => unreachable!(),
                };
                let mirrored = Instance::new(
                    inst.space.clone(),
                    LocationProfile::new(points.iter().map(mirror).collect()),
                    mirror(inst.prediction.point()),
                    inst.model,
                )
                .unwrap();
                for lambda in [0.0, 0.3, 0.6] {
                    let cfg = MechanismConfig::new(lambda).unwrap();
                    assert_eq!(mirrored.run(&cfg).unwrap().chosen, mirror(&inst.run(&cfg).unwrap().chosen));
                }
            }
        }
    }
}

#[test]
fn tree_predictions_report_peripherality() {
    let tree = TreeGraph::new(4, vec![(0, 1, 1.0), (1, 2, 1.0), (1, 3, 0.5)]).unwrap();
    let space = Space::Tree(tree);
    let p = |v| Prediction::new(&space, &Point::Tree(TreePoint::Vertex(v))).unwrap();
    assert_eq!(p(0).peripheral(), Some(true));
    assert_eq!(p(3).peripheral(), Some(false));
}

#[test]
fn coalition_checks_are_deterministic() {
    let gen = GeneratorConfig::default();
    for setting in [Setting::Square, Setting::Tree, Setting::Dual] {
        for inst in corpus(setting, 10, 9, &gen) {
            let cfg = MechanismConfig::new(0.25).unwrap();
            let search = CoalitionSearch {
                max_size: inst.profile.len().min(2),
                gamma: 1.0,
                budget: 40,
                seed: 3,
            };
            let set = MisreportSet::grid(9);
            let a = check_coalition(&inst, &cfg, &set, &search).unwrap();
            let b = check_coalition(&inst, &cfg, &set, &search).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn dual_types_flip_cleanly() {
    for t in [Preference::Averse, Preference::Attracted] {
        assert_eq!(t.flipped().flipped(), t);
        assert_eq!(Preference::from_bit(t.bit()).unwrap(), t);
    }
    assert!(f64::gain_tolerance() > 0.0);
}

#[test]
fn dual_prediction_favoring_rule_obeys_both_bounds() {
    let cfg = FuzzConfig {
        count: 2000,
        seed: 12,
        dual_rule: DualRule::PredictionFavoring,
        ..FuzzConfig::default()
    };
    for row in fuzz_bounds(Setting::Dual, &cfg).unwrap() {
        assert!(row.passed(), "{row:?}");
    }
}

#[test]
fn dual_as_written_rule_is_robust() {
    let cfg = FuzzConfig {
        count: 2000,
        seed: 12,
        ..FuzzConfig::default()
    };
    for row in fuzz_bounds(Setting::Dual, &cfg).unwrap() {
        assert_eq!(row.robustness_violations, 0, "{row:?}");
    }
}

#[test]
fn dual_as_written_rule_misses_consistency_on_a_correct_prediction() {
    let profile = LocationProfile::with_types(
        vec![Point::Segment(Q::from_integer(0)), Point::Segment(Q::new(1, 2))],
        vec![Preference::Averse, Preference::Averse],
    )
    .unwrap();
    let inst = Instance::new(Space::Segment, profile, Point::Segment(Q::from_integer(1)), WelfareModel::Dual).unwrap();
    let lambda = Q::new(1, 5);
    let cfg = MechanismConfig::new(lambda).unwrap();
    let report = evaluate_instance(&inst, &cfg).unwrap();
    assert_eq!(report.eta, Q::from_integer(0));
    assert_eq!(report.ratio, ApproximationRatio::Finite(Q::from_integer(3)));
    assert!(Q::from_integer(3) > consistency_bound(lambda));
    let favoring = evaluate_instance(&inst, &cfg.with_dual_rule(DualRule::PredictionFavoring)).unwrap();
    assert_eq!(favoring.ratio, ApproximationRatio::Finite(Q::from_integer(1)));
}

fn consistency_gap(lambda: Q, n: usize) -> f64 {
    let w = witness(SpaceKind::Segment, WitnessTarget::Consistency, lambda, n).unwrap();
    let report = evaluate_instance(&w.instance, &MechanismConfig::new(lambda).unwrap()).unwrap();
    assert_eq!(report.ratio, ApproximationRatio::Finite(w.expected_ratio));
    assert_eq!(report.eta, Q::from_integer(0));
    let bound = consistency_bound(lambda);
    ((bound - w.expected_ratio) / bound).as_f64()
}

#[test]
fn consistency_witnesses_come_within_one_percent_from_300_agents() {
    for lambda in [Q::from_integer(0), Q::new(1, 4), Q::new(1, 2), Q::new(3, 4)] {
        for n in [300, 301, 499, 1000] {
            let gap = consistency_gap(lambda, n);
            assert!((0.0..0.01).contains(&gap), "lambda {lambda}, n {n}: gap {gap}");
        }
    }
}

#[test]
fn consistency_witness_at_200_agents_is_just_over_one_percent() {
    let gap = consistency_gap(Q::from_integer(0), 200);
    assert!((0.01..0.015).contains(&gap), "{gap}");
}

#[test]
fn robustness_witnesses_are_exact() {
    for lambda in [Q::from_integer(0), Q::new(1, 4), Q::new(1, 2), Q::new(3, 4)] {
        for kind in [SpaceKind::Segment, SpaceKind::Circle, SpaceKind::Tree] {
            for n in [8, 16, 40] {
                let w = witness(kind, WitnessTarget::Robustness, lambda, n).unwrap();
                let report = evaluate_instance(&w.instance, &MechanismConfig::new(lambda).unwrap()).unwrap();
                assert_eq!(report.ratio, ApproximationRatio::Finite(w.expected_ratio), "{kind} {lambda} {n}");
                if w.tight {
                    assert_eq!(report.ratio, robustness_bound(lambda));
                }
            }
        }
    }
}
