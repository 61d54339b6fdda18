//! Descriptions of nodes relative to a shared context, their decoding, and
//! the entropy and sharing-threshold formulas built on them.
//!
//! A flat description of `x` is the row of `x` restricted to the shared
//! columns. A depth-`d` description additionally replaces each null slot with
//! the code of the most-preferred simple path of at most `d` intermediate
//! nodes (see [`vocab`] for the order). Depth 0 is the flat case.

mod context;
mod decode;
mod paths;
mod theory;
pub mod vocab;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WorldGraph;

pub use context::{random_order, SelectionStrategy, SharedContext};
pub use decode::{
    decode_exact, decode_max_likelihood, DescriptionIndex, LikelihoodTable, MlDecision, SMOOTHING, TIE_TOLERANCE,
};
pub use paths::{enumerate_intermediate_graphs, rewrite_adjacency_for_depth};
pub use theory::{
    description_length_bounds, expected_collisions, extended_description_entropy, identifiability_report,
    min_shared_names, Identifiability, IdentifiabilityReport, LengthBounds, SharingRequirement, ThresholdPrediction,
    DIRECT_SUM_LIMIT,
};
pub use vocab::{IntermediateGraphCode, Symbol, SymbolKind, Vocabulary, MAX_DEPTH};

/// A node reference payload: one vocabulary symbol per shared anchor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Description {
    pub symbols: Vec<Symbol>,
}

impl Description {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Description { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Display form: symbols joined by `.`.
    pub fn render(&self, vocab: &Vocabulary) -> String {
        self.symbols
            .iter()
            .map(|&s| vocab.render(s))
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn check_node(world: &WorldGraph, x: usize) -> Result<()> {
    if x >= world.n() {
        return Err(Error::invalid(format!("node {x} outside 0..{}", world.n())));
    }
    Ok(())
}

fn check_context(world: &WorldGraph, ctx: &SharedContext) -> Result<()> {
    match ctx.nodes().iter().find(|&&s| s >= world.n()) {
        Some(s) => Err(Error::invalid(format!("shared node {s} outside 0..{}", world.n()))),
        None => Ok(()),
    }
}

/// Labels between `x` and each shared node, null where there is no arc.
pub fn build_flat_description(world: &WorldGraph, x: usize, ctx: &SharedContext) -> Result<Description> {
    check_node(world, x)?;
    check_context(world, ctx)?;
    Ok(Description::new(ctx.nodes().iter().map(|&s| world.get(x, s)).collect()))
}

/// Flat description with null slots refined by connecting-path codes of at
/// most `depth` intermediates. `depth == 0` gives the flat description.
pub fn build_extended_description(
    world: &WorldGraph,
    x: usize,
    ctx: &SharedContext,
    depth: usize,
) -> Result<Description> {
    check_node(world, x)?;
    Ok(describe_nodes(world, &[x], ctx, depth)?.pop().unwrap())
}

/// Depth-`depth` descriptions of several nodes, sharing per-anchor work.
pub fn describe_nodes(
    world: &WorldGraph,
    nodes: &[usize],
    ctx: &SharedContext,
    depth: usize,
) -> Result<Vec<Description>> {
    check_context(world, ctx)?;
    if let Some(&x) = nodes.iter().find(|&&x| x >= world.n()) {
        return Err(Error::invalid(format!("node {x} outside 0..{}", world.n())));
    }
    let mut out: Vec<Vec<Symbol>> = vec![Vec::with_capacity(ctx.len()); nodes.len()];
    if depth == 0 {
        for (row, &x) in out.iter_mut().zip(nodes) {
            row.extend(ctx.nodes().iter().map(|&s| world.get(x, s)));
        }
    } else {
        let vocab = Vocabulary::new(world.alphabet(), depth)?;
        for &s in ctx.nodes() {
            let dist = paths::distances_from(world, s, depth + 1);
            for (row, &x) in out.iter_mut().zip(nodes) {
                row.push(paths::slot_symbol(world, &vocab, x, s, &dist));
            }
        }
    }
    Ok(out.into_iter().map(Description::new).collect())
}

/// Slot symbols of every node against each anchor: `columns[i][x]` is slot
/// `i` of the description of `x`.
pub fn anchor_columns(world: &WorldGraph, anchors: &[usize], depth: usize) -> Result<Vec<Vec<Symbol>>> {
    if let Some(&s) = anchors.iter().find(|&&s| s >= world.n()) {
        return Err(Error::invalid(format!("shared node {s} outside 0..{}", world.n())));
    }
    if depth == 0 {
        return Ok(anchors.iter().map(|&s| world.row(s).to_vec()).collect());
    }
    let vocab = Vocabulary::new(world.alphabet(), depth)?;
    Ok(anchors
        .iter()
        .map(|&s| {
            let dist = paths::distances_from(world, s, depth + 1);
            (0..world.n())
                .map(|x| paths::slot_symbol(world, &vocab, x, s, &dist))
                .collect()
        })
        .collect())
}
