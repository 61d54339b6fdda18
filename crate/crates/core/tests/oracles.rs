//! Experiment outputs checked against slow, direct recomputations.

mod common;

use common::duplicate_pairs;
use rbd_core::describe::{
    describe_nodes, expected_collisions, min_shared_names, rewrite_adjacency_for_depth, SelectionStrategy,
    SharedContext,
};
use rbd_core::experiments::{
    collision_experiment, noisy_view_sweep, overhead_experiment, read_knees_csv, read_points_csv, run_sweep,
    threshold_sweep, SweepConfig, SweepKind,
};
use rbd_core::graph::{
    generate_clique, generate_er_labeled, perturb_view, ChannelNoiseModel, LabelAlphabet, LabelDistribution,
};
use rbd_core::info::{analytic_label_entropy, analytic_mutual_information, joint_stats_of};
use rbd_core::protocol::{resolve_message, Confidence, Message, NodeRef, Triple};
use rbd_core::rng::{mix, trial_seed};

fn ctx_for(world: &rbd_core::graph::WorldGraph, k: usize, strategy: SelectionStrategy, ws: u64) -> SharedContext {
    strategy.select(world, k, mix(ws, 1)).unwrap()
}

/// Collisions over all nodes and unresolved unshared nodes, by hashing every
/// description string.
fn brute_force(world: &rbd_core::graph::WorldGraph, ctx: &SharedContext, depth: usize) -> (u64, usize) {
    let all: Vec<usize> = (0..world.n()).collect();
    let rows = describe_nodes(world, &all, ctx, depth).unwrap();
    let collisions = duplicate_pairs(rows.iter().cloned());
    let free: Vec<usize> = all.into_iter().filter(|&x| !ctx.contains(x)).collect();
    let mut groups = std::collections::HashMap::new();
    for &x in &free {
        *groups.entry(rows[x].clone()).or_insert(0usize) += 1;
    }
    let unresolved = free.iter().filter(|&&x| groups[&rows[x]] > 1).count();
    (collisions, unresolved)
}

#[test]
fn collision_sweep_matches_brute_force() {
    for (depth, strategy) in [
        (0, SelectionStrategy::Random),
        (1, SelectionStrategy::Random),
        (0, SelectionStrategy::GreedyEntropy),
    ] {
        let cfg = SweepConfig {
            n_values: vec![48],
            labels: vec![LabelDistribution::binary(0.3).unwrap()],
            k_values: vec![2, 4, 7],
            trials: 6,
            seed: 21,
            depth,
            strategy,
            ..SweepConfig::default()
        };
        let report = collision_experiment(&cfg).unwrap();
        for (p, t) in report.points.iter().zip(&report.trials) {
            for trial in 0..cfg.trials as u64 {
                let ws = trial_seed(cfg.seed, 0, trial);
                let world = generate_er_labeled(48, &cfg.labels[0], ws).unwrap();
                let longest = ctx_for(&world, 48, strategy, ws);
                let (c, u) = brute_force(&world, &longest.prefix(p.k), depth);
                assert_eq!(t.collisions[trial as usize], c, "depth {depth} K {} trial {trial}", p.k);
                assert_eq!(t.unresolved[trial as usize], u);
            }
        }
    }
}

#[test]
fn collision_law_fits_within_three_sigma() {
    let cfg = SweepConfig {
        n_values: vec![128],
        k_values: vec![8, 10, 12],
        trials: 150,
        seed: 99,
        ..SweepConfig::default()
    };
    let report = collision_experiment(&cfg).unwrap();
    for p in &report.points {
        let mean = p.collisions_mean.unwrap();
        let se = p.collisions_sd.unwrap() / (p.trials as f64).sqrt();
        let c = expected_collisions(128, 1.0, p.k);
        assert!((mean - c).abs() <= 3.0 * se, "K {}: {mean} vs {c} (se {se})", p.k);
    }
}

#[test]
fn clique_impossibility_by_brute_force() {
    let alphabet = LabelAlphabet::binary();
    for n in 3..=8usize {
        let world = generate_clique(n, &alphabet, 1).unwrap();
        for mask in 0u32..(1 << n) {
            let nodes: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if nodes.len() >= n - 1 {
                continue;
            }
            let ctx = SharedContext::new(nodes, n).unwrap();
            for depth in 0..=3 {
                let (collisions, _) = brute_force(&world, &ctx, depth);
                assert!(
                    collisions >= 1,
                    "clique({n}) separated by {:?} at depth {depth}",
                    ctx.nodes()
                );
            }
        }
    }
}

#[test]
fn resolution_is_monotone_in_k() {
    let dist = LabelDistribution::binary(0.5).unwrap();
    for seed in 0..20u64 {
        let world = generate_er_labeled(64, &dist, seed).unwrap();
        let ctx = ctx_for(&world, 20, SelectionStrategy::Random, seed);
        let mut last = 0.0;
        for k in 0..=20 {
            let (_, unresolved) = brute_force(&world, &ctx.prefix(k), 0);
            let rate = (64 - unresolved) as f64 / 64.0;
            assert!(rate >= last, "seed {seed} K {k}");
            last = rate;
        }
    }
}

#[test]
fn threshold_reports_are_monotone() {
    let cfg = SweepConfig {
        n_values: vec![64, 128],
        g_values: vec![1.0, 1.5, 2.0, 2.5],
        trials: 30,
        seed: 5,
        ..SweepConfig::default()
    };
    let report = threshold_sweep(&cfg).unwrap();
    for chunk in report.points.chunks(4) {
        for w in chunk.windows(2) {
            assert!(w[1].resolution_rate >= w[0].resolution_rate);
            assert!(w[1].unresolved_mean.unwrap() <= w[0].unresolved_mean.unwrap());
        }
    }
    for i in (0..report.points.len()).step_by(4) {
        let (t15, t25) = (&report.trials[i + 1], &report.trials[i + 3]);
        assert!(t25.unresolved.iter().zip(&t15.unresolved).all(|(a, b)| a <= b));
    }
}

#[test]
fn noisy_sweep_matches_message_resolution() {
    let n = 40;
    for depth in [0, 1] {
        let cfg = SweepConfig {
            n_values: vec![n],
            labels: vec![LabelDistribution::binary(0.5).unwrap()],
            eps_values: vec![0.0, 0.08],
            k_values: vec![4, 9, 14],
            redundancy: 2,
            trials: 4,
            seed: 3,
            depth,
            ..SweepConfig::default()
        };
        let report = noisy_view_sweep(&cfg).unwrap();
        for (ei, &eps) in cfg.eps_values.iter().enumerate() {
            let ch = ChannelNoiseModel::symmetric(2, eps).unwrap();
            for (ki, &k) in cfg.k_values.iter().enumerate() {
                let len = k + cfg.redundancy;
                let point = ei * cfg.k_values.len() + ki;
                assert_eq!(report.points[point].k, k);
                for trial in 0..cfg.trials as u64 {
                    let ws = trial_seed(cfg.seed, 0, trial);
                    let world = generate_er_labeled(n, &cfg.labels[0], ws).unwrap();
                    let ctx = ctx_for(&world, 14 + cfg.redundancy, cfg.strategy, ws).prefix(len);
                    let pair = perturb_view(&world, &ch, mix(ws, 2 + ei as u64)).unwrap();
                    let stats = if depth == 0 {
                        joint_stats_of(pair.sender(), pair.receiver()).unwrap()
                    } else {
                        joint_stats_of(
                            &rewrite_adjacency_for_depth(pair.sender(), depth).unwrap().0,
                            &rewrite_adjacency_for_depth(pair.receiver(), depth).unwrap().0,
                        )
                        .unwrap()
                    };
                    let free: Vec<usize> = (0..n).filter(|&x| !ctx.contains(x)).collect();
                    let triples = free
                        .iter()
                        .map(|&x| {
                            let r = NodeRef::describe(pair.sender(), x, &ctx, depth, k, cfg.redundancy).unwrap();
                            Triple::new(r, 1, NodeRef::SharedName(ctx.nodes()[0]))
                        })
                        .collect();
                    let resolved =
                        resolve_message(&Message::new(triples), pair.receiver(), &ctx, depth, Some(&stats)).unwrap();
                    let correct = resolved
                        .iter()
                        .zip(&free)
                        .filter(|(r, &x)| {
                            r.source.node == Some(x) && matches!(r.source.flag, Confidence::Exact | Confidence::Ml)
                        })
                        .count();
                    let rate = correct as f64 / free.len() as f64;
                    assert_eq!(
                        report.trials[point].resolution_rate[trial as usize], rate,
                        "depth {depth} eps {eps} K {k} trial {trial}"
                    );
                }
            }
        }
    }
}

#[test]
fn noiseless_rate_equals_collision_free_fraction() {
    let n = 96;
    let ks = vec![6, 8, 10, 12];
    let noisy = noisy_view_sweep(&SweepConfig {
        n_values: vec![n],
        k_values: ks.clone(),
        trials: 10,
        seed: 8,
        ..SweepConfig::default()
    })
    .unwrap();
    let collision = collision_experiment(&SweepConfig {
        n_values: vec![n],
        k_values: ks.clone(),
        trials: 10,
        seed: 8,
        ..SweepConfig::default()
    })
    .unwrap();
    for (i, &k) in ks.iter().enumerate() {
        for t in 0..10 {
            let unresolved = collision.trials[i].unresolved[t];
            let expected = (n - k - unresolved) as f64 / (n - k) as f64;
            assert_eq!(noisy.trials[i].resolution_rate[t], expected);
        }
    }
}

#[test]
fn predicted_columns_recompute_exactly() {
    let base = SweepConfig {
        n_values: vec![64, 100],
        labels: vec![
            LabelDistribution::binary(0.5).unwrap(),
            LabelDistribution::parse("P:0.25,Q:0.25,R:0.25").unwrap(),
        ],
        eps_values: vec![0.0, 0.05],
        k_values: vec![6, 9],
        g_values: vec![1.5, 2.0],
        trials: 3,
        pairs: 4,
        seed: 1,
        ..SweepConfig::default()
    };
    for kind in [
        SweepKind::Collision,
        SweepKind::Threshold,
        SweepKind::Noisy,
        SweepKind::Overhead,
    ] {
        let report = run_sweep(kind, &base).unwrap();
        let csv = report.to_csv().unwrap();
        let points = read_points_csv(&csv).unwrap();
        assert_eq!(points, report.points, "{kind:?}");
        assert_eq!(read_knees_csv(&report.knees_csv().unwrap()).unwrap(), report.knees);
        for p in &points {
            let dist = base.labels.iter().find(|d| d.describe() == p.labels).unwrap();
            let bits = match p.eps {
                Some(eps) => analytic_mutual_information(
                    dist,
                    &ChannelNoiseModel::symmetric(dist.alphabet().len(), eps).unwrap(),
                )
                .unwrap(),
                None => analytic_label_entropy(dist),
            };
            assert_eq!(p.bits_per_symbol, bits);
            assert_eq!(
                p.predicted_k_star,
                min_shared_names(p.n, bits, 2.0).unwrap().k().min(p.n)
            );
            if let Some(c) = p.predicted_collisions {
                assert_eq!(c, expected_collisions(p.n, bits, p.k));
                assert_eq!(
                    p.predicted_collisions_unshared.unwrap(),
                    expected_collisions(p.n - p.k, bits, p.k)
                );
            }
            if let Some(g) = p.g {
                assert_eq!(p.k, min_shared_names(p.n, bits, g).unwrap().k().min(p.n));
            }
            if let Some(f) = p.predicted_overhead_factor {
                let m_voc = dist.alphabet().len() as f64;
                assert_eq!(f, 2.0 * m_voc.log2());
            }
        }
        assert_eq!(
            run_sweep(kind, &base).unwrap().to_csv().unwrap(),
            csv,
            "{kind:?} not reproducible"
        );
    }
}

#[test]
fn seed_changes_the_report() {
    let cfg = SweepConfig {
        n_values: vec![64],
        k_values: vec![6],
        trials: 5,
        ..SweepConfig::default()
    };
    let a = collision_experiment(&cfg).unwrap();
    let b = collision_experiment(&SweepConfig {
        seed: cfg.seed + 1,
        ..cfg.clone()
    })
    .unwrap();
    assert_ne!(a.trials, b.trials);
}

#[test]
fn sharing_past_threshold_resolves_messages() {
    let dist = LabelDistribution::binary(0.5).unwrap();
    let n = 256;
    let k = min_shared_names(n, 1.0, 2.0).unwrap().k();
    let mut failures = Vec::new();
    for seed in 0..100u64 {
        let world = generate_er_labeled(n, &dist, seed).unwrap();
        let ctx = ctx_for(&world, k, SelectionStrategy::Random, seed);
        let free: Vec<usize> = (0..n).filter(|&x| !ctx.contains(x)).collect();
        let triples = free
            .chunks(2)
            .filter(|c| c.len() == 2)
            .map(|c| {
                let d = |x| NodeRef::describe(&world, x, &ctx, 0, k, 0).unwrap();
                Triple::new(d(c[0]), 1, d(c[1]))
            })
            .collect();
        let resolved = resolve_message(&Message::new(triples), &world, &ctx, 0, None).unwrap();
        let bad = resolved
            .iter()
            .flat_map(|r| [r.source, r.target])
            .filter(|r| r.flag != Confidence::Exact)
            .count();
        failures.push(bad);
    }
    let mean = failures.iter().sum::<usize>() as f64 / failures.len() as f64;
    assert!(mean <= 2.0, "mean unresolved refs {mean}: {failures:?}");
    assert!(failures.iter().all(|&f| f <= 12), "{failures:?}");
}

#[test]
fn overhead_factor_is_near_prediction() {
    let cfg = SweepConfig {
        n_values: vec![256, 1024],
        labels: vec![
            LabelDistribution::binary(0.5).unwrap(),
            LabelDistribution::binary(0.8).unwrap(),
        ],
        trials: 8,
        ..SweepConfig::default()
    };
    let report = overhead_experiment(&cfg).unwrap();
    for p in &report.points {
        let f = p.overhead_factor.unwrap();
        assert!((f / 2.0 - 1.0).abs() <= 0.15, "{} n={}: {f}", p.labels, p.n);
    }
}
