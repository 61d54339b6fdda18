#![allow(dead_code)]

use proptest::prelude::*;
use rbd_core::graph::{generate_er_labeled, LabelAlphabet, LabelDistribution, WorldGraph};

/// Label distribution over `m` real labels with random, strictly positive
/// weights (null included).
pub fn distribution(m: usize, weights: &[u32]) -> LabelDistribution {
    let w: Vec<f64> = weights.iter().take(m + 1).map(|&x| x as f64 + 1.0).collect();
    let total: f64 = w.iter().sum();
    let alphabet = LabelAlphabet::with_labels(m).unwrap();
    LabelDistribution::new(alphabet, w.iter().map(|x| x / total).collect()).unwrap()
}

/// (world, seed) for a random small ER world.
pub fn small_world(max_n: usize) -> impl Strategy<Value = WorldGraph> {
    (4..=max_n, 1usize..=3, prop::collection::vec(0u32..8, 4), any::<u64>())
        .prop_map(|(n, m, w, seed)| generate_er_labeled(n, &distribution(m, &w), seed).unwrap())
}

/// Brute-force count of unordered node pairs with equal description strings.
pub fn duplicate_pairs<T: Eq + std::hash::Hash>(rows: impl IntoIterator<Item = T>) -> u64 {
    let mut groups: std::collections::HashMap<T, u64> = std::collections::HashMap::new();
    for r in rows {
        *groups.entry(r).or_default() += 1;
    }
    groups.values().map(|&c| c * (c - 1) / 2).sum()
}
