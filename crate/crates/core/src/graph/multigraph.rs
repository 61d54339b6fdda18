//! Reduction of directed multi-labeled graphs to the undirected simple form.
//!
//! Each unordered node pair `{a, b}` (`a < b`) gets one combined label naming
//! the set of `(label, direction)` pairs present between them: `P>` is an arc
//! from the smaller id to the larger, `P<` the reverse, `P<>` both. Parts are
//! joined with `+` in label order, e.g. `P<>+Q>`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::alphabet::{Label, LabelAlphabet, NULL};
use super::world::WorldGraph;

/// Largest original label count accepted (two direction bits per label).
pub const MAX_MULTIGRAPH_LABELS: usize = 16;

/// One directed arc `label(from, to)` over original labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedArc {
    pub label: Label,
    pub from: usize,
    pub to: usize,
}

/// Reduced graph plus the decoding table for its combined labels.
#[derive(Debug, Clone)]
pub struct ReducedGraph {
    pub world: WorldGraph,
    original: LabelAlphabet,
    masks: Vec<u32>,
}

impl ReducedGraph {
    pub fn original_alphabet(&self) -> &LabelAlphabet {
        &self.original
    }

    /// Arcs between `a` and `b` recovered from the combined label.
    pub fn arcs_between(&self, a: usize, b: usize) -> Vec<DirectedArc> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mask = self.masks[self.world.get(lo, hi) as usize];
        let mut out = Vec::new();
        for l in 0..self.original.real_count() {
            let label = (l + 1) as Label;
            if mask & (1 << (2 * l)) != 0 {
                out.push(DirectedArc {
                    label,
                    from: lo,
                    to: hi,
                });
            }
            if mask & (1 << (2 * l + 1)) != 0 {
                out.push(DirectedArc {
                    label,
                    from: hi,
                    to: lo,
                });
            }
        }
        out
    }

    /// Full arc set recovered from the reduced graph.
    pub fn expand(&self) -> BTreeSet<DirectedArc> {
        self.world
            .arcs()
            .flat_map(|(i, j, _)| self.arcs_between(i, j))
            .collect()
    }
}

/// Maps a directed multigraph on `n` nodes to one undirected arc per pair.
///
/// Repeated identical arcs collapse: the graph model carries at most one arc
/// per label and direction.
pub fn reduce_multigraph(n: usize, original: &LabelAlphabet, arcs: &[DirectedArc]) -> Result<ReducedGraph> {
    let m = original.real_count();
    if m > MAX_MULTIGRAPH_LABELS {
        return Err(Error::invalid(format!(
            "{m} original labels exceed the bound of {MAX_MULTIGRAPH_LABELS}"
        )));
    }
    let mut pair_mask = vec![0u32; n * n];
    for arc in arcs {
        if arc.from >= n || arc.to >= n {
            return Err(Error::invalid(format!("arc ({}, {}) outside 0..{n}", arc.from, arc.to)));
        }
        if arc.from == arc.to {
            return Err(Error::invalid(format!("self-loop on node {}", arc.from)));
        }
        if arc.label == NULL || !original.contains(arc.label) {
            return Err(Error::invalid(format!("label index {} is not a real label", arc.label)));
        }
        let (lo, hi, dir) = if arc.from < arc.to {
            (arc.from, arc.to, 0)
        } else {
            (arc.to, arc.from, 1)
        };
        pair_mask[lo * n + hi] |= 1 << (2 * (arc.label as usize - 1) + dir);
    }

    let present: BTreeSet<u32> = pair_mask.iter().copied().filter(|&m| m != 0).collect();
    let mut masks = vec![0u32];
    masks.extend(present.iter().copied());
    let mut symbols = vec![super::alphabet::NULL_SYMBOL.to_string()];
    symbols.extend(present.iter().map(|&mask| combined_name(original, mask)));
    if present.is_empty() {
        // alphabets need at least one real symbol; keep an unused placeholder
        symbols.push("none".to_string());
        masks.push(0);
    }
    let alphabet = LabelAlphabet::from_symbols(symbols)?;

    let mut world = WorldGraph::empty(n, alphabet)?;
    for lo in 0..n {
        for hi in lo + 1..n {
            let mask = pair_mask[lo * n + hi];
            if mask != 0 {
                let idx = masks.iter().position(|&m| m == mask).expect("mask registered");
                world.set(lo, hi, idx as Label);
            }
        }
    }
    Ok(ReducedGraph {
        world,
        original: original.clone(),
        masks,
    })
}

fn combined_name(original: &LabelAlphabet, mask: u32) -> String {
    let mut parts = Vec::new();
    for l in 0..original.real_count() {
        let fwd = mask & (1 << (2 * l)) != 0;
        let back = mask & (1 << (2 * l + 1)) != 0;
        let dir = match (fwd, back) {
            (true, true) => "<>",
            (true, false) => ">",
            (false, true) => "<",
            (false, false) => continue,
        };
        parts.push(format!("{}{dir}", original.symbol((l + 1) as Label)));
    }
    parts.join("+")
}
