use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WorldGraph;
use crate::info::JointLabelStats;

use super::vocab::Symbol;
use super::{describe_nodes, Description, SharedContext};

/// Score gap under which the top two candidates count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Receiver-side descriptions of every unshared node, indexed for lookup.
///
/// Shared nodes are never candidates: a reference to one would have been
/// sent by name.
#[derive(Debug, Clone)]
pub struct DescriptionIndex {
    len: usize,
    candidates: Vec<usize>,
    rows: Vec<Vec<Symbol>>,
    exact: HashMap<Vec<Symbol>, Vec<usize>>,
}

impl DescriptionIndex {
    pub fn build(view: &WorldGraph, ctx: &SharedContext, depth: usize) -> Result<Self> {
        let shared = ctx.mask(view.n());
        let candidates: Vec<usize> = (0..view.n()).filter(|&v| !shared[v]).collect();
        let rows: Vec<Vec<Symbol>> = describe_nodes(view, &candidates, ctx, depth)?
            .into_iter()
            .map(|d| d.symbols)
            .collect();
        let mut exact: HashMap<Vec<Symbol>, Vec<usize>> = HashMap::new();
        for (row, &v) in rows.iter().zip(&candidates) {
            exact.entry(row.clone()).or_default().push(v);
        }
        Ok(DescriptionIndex {
            len: ctx.len(),
            candidates,
            rows,
            exact,
        })
    }

    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    /// Receiver description of each candidate, aligned with `candidates()`.
    pub fn rows(&self) -> &[Vec<Symbol>] {
        &self.rows
    }

    fn check(&self, desc: &Description) -> Result<()> {
        if desc.len() != self.len {
            return Err(Error::invalid(format!(
                "description has {} symbols, context has {}",
                desc.len(),
                self.len
            )));
        }
        Ok(())
    }

    /// Candidates whose description equals `desc`, ascending.
    pub fn exact(&self, desc: &Description) -> Result<Vec<usize>> {
        self.check(desc)?;
        Ok(self.exact.get(&desc.symbols).cloned().unwrap_or_default())
    }

    /// Highest-likelihood candidate; `None` when there are no candidates.
    pub fn max_likelihood(&self, desc: &Description, table: &LikelihoodTable) -> Result<Option<MlDecision>> {
        self.check(desc)?;
        if let Some(s) = desc.symbols.iter().find(|&&s| s as usize >= table.size) {
            return Err(Error::invalid(format!("symbol {s} outside the channel statistics")));
        }
        if self.rows.iter().any(|r| r.iter().any(|&s| s as usize >= table.size)) {
            return Err(Error::invalid(
                "receiver view has symbols outside the channel statistics",
            ));
        }
        if self.candidates.is_empty() {
            return Ok(None);
        }
        let best = self.rank(desc, &table.log_p);
        if best.log_likelihood.is_finite() {
            return Ok(Some(best));
        }
        let mut fallback = self.rank(desc, &table.smoothed);
        fallback.smoothed = true;
        Ok(Some(fallback))
    }

    fn rank(&self, desc: &Description, log_p: &[Vec<f64>]) -> MlDecision {
        let mut best = (f64::NEG_INFINITY, self.candidates[0]);
        let mut second = f64::NEG_INFINITY;
        for (row, &v) in self.rows.iter().zip(&self.candidates) {
            let score: f64 = desc
                .symbols
                .iter()
                .zip(row)
                .map(|(&s, &r)| log_p[s as usize][r as usize])
                .sum();
            if score > best.0 {
                second = best.0;
                best = (score, v);
            } else if score > second {
                second = score;
            }
        }
        let ambiguous =
            self.candidates.len() > 1 && (best.0 == second || (best.0.is_finite() && best.0 - second <= TIE_TOLERANCE));
        MlDecision {
            node: best.1,
            log_likelihood: best.0,
            ambiguous,
            smoothed: false,
        }
    }
}

/// `log2 P(sender symbol | receiver symbol)` from a joint table, raw and with
/// add-one smoothing.
#[derive(Debug, Clone)]
pub struct LikelihoodTable {
    size: usize,
    log_p: Vec<Vec<f64>>,
    smoothed: Vec<Vec<f64>>,
}

/// Pseudo-count added to every cell of the joint table in the smoothed model.
pub const SMOOTHING: u64 = 1;

impl LikelihoodTable {
    pub fn from_stats(stats: &JointLabelStats) -> Result<Self> {
        if stats.total() == 0 {
            return Err(Error::invalid("channel statistics are empty"));
        }
        let size = stats.dimension();
        let col = stats.receiver_marginal();
        let mut log_p = vec![vec![f64::NEG_INFINITY; size]; size];
        let mut smoothed = vec![vec![0.0; size]; size];
        for s in 0..size {
            for r in 0..size {
                let c = stats.count(s, r);
                if c > 0 {
                    log_p[s][r] = (c as f64 / col[r] as f64).log2();
                }
                smoothed[s][r] = ((c + SMOOTHING) as f64 / (col[r] + SMOOTHING * size as u64) as f64).log2();
            }
        }
        Ok(LikelihoodTable { size, log_p, smoothed })
    }

    pub fn dimension(&self) -> usize {
        self.size
    }

    pub fn log_p(&self, sender: Symbol, receiver: Symbol) -> f64 {
        self.log_p[sender as usize][receiver as usize]
    }

    pub fn smoothed_log_p(&self, sender: Symbol, receiver: Symbol) -> f64 {
        self.smoothed[sender as usize][receiver as usize]
    }
}

/// Outcome of maximum-likelihood decoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlDecision {
    /// Best candidate; ties go to the smallest node id.
    pub node: usize,
    /// Score of `node` in bits (`-inf` never escapes: see `smoothed`).
    pub log_likelihood: f64,
    /// Top two scores within [`TIE_TOLERANCE`].
    pub ambiguous: bool,
    /// Every candidate had probability zero under the raw table, so the
    /// add-one smoothed table was used.
    pub smoothed: bool,
}

/// Nodes of `view` whose description equals `desc` exactly.
pub fn decode_exact(view: &WorldGraph, desc: &Description, ctx: &SharedContext, depth: usize) -> Result<Vec<usize>> {
    if desc.len() != ctx.len() {
        return Err(Error::invalid("description length differs from context size"));
    }
    DescriptionIndex::build(view, ctx, depth)?.exact(desc)
}

/// Candidate maximizing `Σ log2 P(desc_i | receiver symbol at (y, S_i))`.
pub fn decode_max_likelihood(
    view: &WorldGraph,
    desc: &Description,
    ctx: &SharedContext,
    depth: usize,
    stats: &JointLabelStats,
) -> Result<MlDecision> {
    if desc.len() != ctx.len() {
        return Err(Error::invalid("description length differs from context size"));
    }
    let table = LikelihoodTable::from_stats(stats)?;
    DescriptionIndex::build(view, ctx, depth)?
        .max_likelihood(desc, &table)?
        .ok_or_else(|| Error::invalid("every node is shared; nothing to decode"))
}
