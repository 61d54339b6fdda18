use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WorldGraph;
use crate::rng;

/// Ordered list of nodes whose names both parties know.
///
/// Slot `i` of every description refers to `nodes()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SharedContext {
    nodes: Vec<usize>,
}

impl SharedContext {
    pub fn new(nodes: Vec<usize>, n: usize) -> Result<Self> {
        for (i, &v) in nodes.iter().enumerate() {
            if v >= n {
                return Err(Error::invalid(format!("shared node {v} outside 0..{n}")));
            }
            if nodes[..i].contains(&v) {
                return Err(Error::invalid(format!("shared node {v} listed twice")));
            }
        }
        Ok(SharedContext { nodes })
    }

    pub fn empty() -> Self {
        SharedContext { nodes: Vec::new() }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.nodes.contains(&v)
    }

    /// First `k` anchors.
    pub fn prefix(&self, k: usize) -> SharedContext {
        SharedContext {
            nodes: self.nodes[..k.min(self.nodes.len())].to_vec(),
        }
    }

    /// Membership mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.nodes {
            m[v] = true;
        }
        m
    }
}

/// How shared nodes are picked in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionStrategy {
    /// Uniformly random prefix of a seeded permutation.
    Random,
    /// Greedily adds the node that maximizes the entropy of the partition of
    /// the remaining nodes by flat description.
    GreedyEntropy,
}

impl SelectionStrategy {
    pub fn name(self) -> &'static str {
        match self {
            SelectionStrategy::Random => "random",
            SelectionStrategy::GreedyEntropy => "greedy-entropy",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SelectionStrategy::Random),
            "greedy-entropy" | "greedy" => Ok(SelectionStrategy::GreedyEntropy),
            _ => Err(Error::invalid(format!("unknown selection strategy {s:?}"))),
        }
    }

    /// An ordering of `k` shared nodes; prefixes of it are nested contexts.
    pub fn select(self, world: &WorldGraph, k: usize, seed: u64) -> Result<SharedContext> {
        if k > world.n() {
            return Err(Error::invalid(format!("cannot share {k} of {} nodes", world.n())));
        }
        match self {
            SelectionStrategy::Random => {
                let mut order = random_order(world.n(), seed);
                order.truncate(k);
                SharedContext::new(order, world.n())
            }
            SelectionStrategy::GreedyEntropy => Ok(greedy_entropy(world, k)),
        }
    }
}

/// Seeded uniform permutation of `0..n`.
pub fn random_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::rng(seed));
    order
}

fn greedy_entropy(world: &WorldGraph, k: usize) -> SharedContext {
    let n = world.n();
    let mut chosen = Vec::with_capacity(k);
    let mut shared = vec![false; n];
    let mut class = vec![0u32; n];
    let mut scratch: Vec<(u32, u16)> = Vec::with_capacity(n);
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for s in (0..n).filter(|&s| !shared[s]) {
            scratch.clear();
            scratch.extend(
                (0..n)
                    .filter(|&x| !shared[x] && x != s)
                    .map(|x| (class[x], world.get(x, s))),
            );
            let h = partition_entropy(&mut scratch);
            if best.is_none_or(|(bh, _)| h > bh) {
                best = Some((h, s));
            }
        }
        let (_, s) = best.expect("k <= n leaves a candidate");
        shared[s] = true;
        chosen.push(s);
        let mut keys: Vec<(u32, u16)> = (0..n).map(|x| (class[x], world.get(x, s))).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        sorted.dedup();
        for (x, key) in keys.iter_mut().enumerate() {
            class[x] = sorted.binary_search(key).unwrap() as u32;
        }
    }
    SharedContext { nodes: chosen }
}

fn partition_entropy(keys: &mut [(u32, u16)]) -> f64 {
    keys.sort_unstable();
    let mut counts = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let j = keys[i..]
            .iter()
            .position(|k| *k != keys[i])
            .map_or(keys.len(), |p| i + p);
        counts.push((j - i) as u64);
        i = j;
    }
    crate::info::entropy_of_counts(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er_labeled, LabelDistribution};

    #[test]
    fn validation() {
        assert!(SharedContext::new(vec![0, 0], 3).is_err());
        assert!(SharedContext::new(vec![3], 3).is_err());
        assert_eq!(SharedContext::new(vec![2, 0], 3).unwrap().prefix(1).nodes(), &[2]);
    }

    #[test]
    fn strategies_are_deterministic() {
        let g = generate_er_labeled(40, &LabelDistribution::binary(0.5).unwrap(), 1).unwrap();
        for s in [SelectionStrategy::Random, SelectionStrategy::GreedyEntropy] {
            let a = s.select(&g, 6, 3).unwrap();
            assert_eq!(a, s.select(&g, 6, 3).unwrap());
            assert_eq!(a.len(), 6);
        }
        assert_eq!(
            SelectionStrategy::parse("greedy-entropy").unwrap(),
            SelectionStrategy::GreedyEntropy
        );
    }
}
