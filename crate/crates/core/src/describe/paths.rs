//! Connecting paths between a described node and a shared node.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Label, WorldGraph, NULL};

use super::vocab::{canonical_path, check_depth, IntermediateGraphCode, Symbol, Vocabulary};

pub(crate) const UNREACHED: u8 = u8::MAX;

/// Hop distances from `source`, explored up to `max_edges` hops.
pub(crate) fn distances_from(world: &WorldGraph, source: usize, max_edges: usize) -> Vec<u8> {
    let n = world.n();
    let mut dist = vec![UNREACHED; n];
    dist[source] = 0;
    let mut frontier = vec![source];
    for hop in 1..=max_edges {
        let mut next = Vec::new();
        for &u in &frontier {
            for (v, &l) in world.row(u).iter().enumerate() {
                if l != NULL && dist[v] == UNREACHED {
                    dist[v] = hop as u8;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    dist
}

/// Most-preferred connecting path between `x` and `s` with at least one
/// intermediate node and at most `max_edges` arcs, as a canonical label
/// sequence. `dist_s` must come from [`distances_from`] rooted at `s`.
///
/// Preference is fewest intermediates first; the shortest paths form a
/// layered DAG, and the lexicographically least reading in each direction
/// falls out of a greedy walk over it.
pub(crate) fn preferred_path(
    world: &WorldGraph,
    x: usize,
    s: usize,
    dist_s: &[u8],
    max_edges: usize,
) -> Option<Vec<Label>> {
    let len = dist_s[x];
    if len == UNREACHED || len < 2 || len as usize > max_edges {
        return None;
    }
    let len = len as usize;
    let n = world.n();
    // layer[t]: nodes t hops from x on some shortest x-s path
    let mut layers: Vec<Vec<usize>> = vec![vec![x]];
    let mut in_layer = vec![false; n];
    for t in 1..=len {
        let want = (len - t) as u8;
        let mut next = Vec::new();
        for &u in &layers[t - 1] {
            for (v, &l) in world.row(u).iter().enumerate() {
                if l != NULL && dist_s[v] == want && !in_layer[v] {
                    in_layer[v] = true;
                    next.push(v);
                }
            }
        }
        layers.push(next);
    }
    debug_assert_eq!(layers[len], vec![s]);

    let forward_order: Vec<usize> = (0..=len).collect();
    let backward_order: Vec<usize> = (0..=len).rev().collect();
    let forward = lexmin_walk(world, &layers, &forward_order);
    let backward = lexmin_walk(world, &layers, &backward_order);
    Some(if backward < forward { backward } else { forward })
}

/// Least label sequence over walks visiting `layers[order[0]]`,
/// `layers[order[1]]`, ... in turn.
fn lexmin_walk(world: &WorldGraph, layers: &[Vec<usize>], order: &[usize]) -> Vec<Label> {
    let mut seq = Vec::with_capacity(order.len() - 1);
    let mut frontier = layers[order[0]].clone();
    for &to in &order[1..] {
        let targets = &layers[to];
        let mut best = Label::MAX;
        for &u in &frontier {
            for &v in targets {
                let l = world.get(u, v);
                if l != NULL && l < best {
                    best = l;
                }
            }
        }
        frontier = targets
            .iter()
            .copied()
            .filter(|&v| frontier.iter().any(|&u| world.get(u, v) == best))
            .collect();
        seq.push(best);
    }
    seq
}

/// All connecting structures between `x` and `s` that use between 1 and `d`
/// intermediate nodes, deduplicated by canonical code and sorted by the
/// vocabulary's total order. The direct arc, if any, is not included.
///
/// Exhaustive over simple paths; cost grows like `n^d`.
pub fn enumerate_intermediate_graphs(
    world: &WorldGraph,
    x: usize,
    s: usize,
    d: usize,
) -> Result<Vec<IntermediateGraphCode>> {
    if d == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    check_depth(d)?;
    if x >= world.n() || s >= world.n() || x == s {
        return Err(Error::invalid(format!("bad endpoints ({x}, {s})")));
    }
    let vocab = Vocabulary::new(world.alphabet(), d)?;
    let mut found: BTreeSet<(usize, Vec<Label>)> = BTreeSet::new();
    let mut on_path = vec![false; world.n()];
    on_path[x] = true;
    let mut labels = Vec::new();
    dfs(world, x, s, d + 1, &mut on_path, &mut labels, &mut found);
    Ok(found
        .into_iter()
        .map(|(_, seq)| IntermediateGraphCode {
            rank: vocab.path_symbol(&seq).expect("path within depth"),
            labels: seq,
        })
        .collect())
}

fn dfs(
    world: &WorldGraph,
    at: usize,
    target: usize,
    max_edges: usize,
    on_path: &mut [bool],
    labels: &mut Vec<Label>,
    found: &mut BTreeSet<(usize, Vec<Label>)>,
) {
    if labels.len() == max_edges {
        return;
    }
    for (v, &l) in world.row(at).iter().enumerate() {
        if l == NULL || on_path[v] {
            continue;
        }
        if v == target {
            if !labels.is_empty() {
                labels.push(l);
                let seq = canonical_path(labels);
                found.insert((seq.len(), seq));
                labels.pop();
            }
            continue;
        }
        on_path[v] = true;
        labels.push(l);
        dfs(world, v, target, max_edges, on_path, labels, found);
        labels.pop();
        on_path[v] = false;
    }
}

/// Replaces every null cell by the most-preferred connecting code of at most
/// `d` intermediates. The result's alphabet is the depth-`d` vocabulary.
pub fn rewrite_adjacency_for_depth(world: &WorldGraph, d: usize) -> Result<(WorldGraph, Vocabulary)> {
    let vocab = Vocabulary::new(world.alphabet(), d)?;
    let mut out = WorldGraph::empty(world.n(), vocab.as_alphabet())?;
    for s in 0..world.n() {
        let dist = if d > 0 {
            distances_from(world, s, d + 1)
        } else {
            Vec::new()
        };
        for x in 0..s {
            let sym = slot_symbol(world, &vocab, x, s, &dist);
            if sym != NULL {
                out.set(x, s, sym);
            }
        }
    }
    Ok((out, vocab))
}

/// Slot value for `(x, s)`: direct label, else preferred path code, else null.
pub(crate) fn slot_symbol(world: &WorldGraph, vocab: &Vocabulary, x: usize, s: usize, dist_s: &[u8]) -> Symbol {
    let direct = world.get(x, s);
    if direct != NULL || x == s || vocab.depth() == 0 {
        return direct;
    }
    preferred_path(world, x, s, dist_s, vocab.depth() + 1)
        .map_or(NULL, |p| vocab.path_symbol(&p).expect("path within depth"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_path, generate_ring_regular, LabelAlphabet};

    #[test]
    fn path_through_middle_node() {
        let g = generate_path(3, &LabelAlphabet::binary(), 1).unwrap();
        let codes = enumerate_intermediate_graphs(&g, 0, 2, 1).unwrap();
        assert_eq!(codes.len(), 1);
        assert_eq!(codes[0].labels, vec![1, 1]);
        assert_eq!(codes[0].intermediates(), 1);
    }

    #[test]
    fn direct_only_yields_nothing() {
        let g = generate_path(2, &LabelAlphabet::binary(), 1).unwrap();
        assert!(enumerate_intermediate_graphs(&g, 0, 1, 1).unwrap().is_empty());
        let e = WorldGraph::empty(4, LabelAlphabet::binary()).unwrap();
        assert!(enumerate_intermediate_graphs(&e, 0, 3, 3).unwrap().is_empty());
        assert!(enumerate_intermediate_graphs(&e, 0, 3, 4).is_err());
        assert!(enumerate_intermediate_graphs(&e, 0, 3, 0).is_err());
    }

    #[test]
    fn ring_enumerates_both_ways_round() {
        let g = generate_ring_regular(6, &LabelAlphabet::binary(), 1).unwrap();
        // 0 to 3: two 2-intermediate paths, same code
        let codes = enumerate_intermediate_graphs(&g, 0, 3, 2).unwrap();
        assert_eq!(codes.len(), 1);
        assert_eq!(codes[0].labels.len(), 3);
        // 0 to 2 with d = 3: one 1-intermediate path and one 3-intermediate path
        let codes = enumerate_intermediate_graphs(&g, 0, 2, 3).unwrap();
        assert_eq!(codes.iter().map(|c| c.intermediates()).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn mixed_labels_pick_least_canonical() {
        let a = LabelAlphabet::new(["P", "Q"]).unwrap();
        // x=0, s=3; 0-1-3 labeled (Q, Q), 0-2-3 labeled (Q, P)
        let g = WorldGraph::from_arcs(4, a, [(0, 1, 2), (1, 3, 2), (0, 2, 2), (2, 3, 1)]).unwrap();
        let dist = distances_from(&g, 3, 3);
        assert_eq!(preferred_path(&g, 0, 3, &dist, 3), Some(vec![1, 2]));
        let codes = enumerate_intermediate_graphs(&g, 0, 3, 1).unwrap();
        assert_eq!(codes[0].labels, vec![1, 2]);
    }

    #[test]
    fn rewrite_empty_and_clique_unchanged() {
        let e = WorldGraph::empty(5, LabelAlphabet::binary()).unwrap();
        let (r, _) = rewrite_adjacency_for_depth(&e, 2).unwrap();
        assert_eq!(r.arc_count(), 0);
        let c = crate::graph::generate_clique(5, &LabelAlphabet::binary(), 1).unwrap();
        let (r, v) = rewrite_adjacency_for_depth(&c, 3).unwrap();
        assert_eq!(r.label_counts()[1], 10);
        assert_eq!(v.len(), 5);
    }
}
