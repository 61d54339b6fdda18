//! Stochastic and deterministic graph constructors, and the view channel.
//!
//! Draw order is part of the reproducibility contract: cells are visited in
//! row-major upper-triangle order (`i` ascending, then `j > i` ascending) and
//! each consumes exactly one `next_u64` from the generator.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng;

use super::alphabet::{Label, LabelAlphabet, LabelDistribution, NULL};
use super::channel::ChannelNoiseModel;
use super::world::WorldGraph;

/// Inverse-CDF sampler over a finite distribution driven by one `u64` per draw.
#[derive(Debug, Clone)]
pub(crate) struct CategoricalSampler {
    thresholds: Vec<u64>,
    fallback: Label,
}

impl CategoricalSampler {
    pub(crate) fn new(probs: &[f64]) -> Self {
        let scale = 2f64.powi(64);
        let mut acc = 0.0;
        let thresholds = probs
            .iter()
            .map(|p| {
                acc += p;
                // `as` saturates at u64::MAX
                (acc * scale) as u64
            })
            .collect();
        let fallback = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as Label;
        CategoricalSampler { thresholds, fallback }
    }

    #[inline]
    pub(crate) fn sample(&self, u: u64) -> Label {
        self.thresholds
            .iter()
            .position(|&t| u < t)
            .map_or(self.fallback, |i| i as Label)
    }
}

/// Labeled Erdős–Rényi graph: each unordered pair draws its label
/// independently from `dist`.
pub fn generate_er_labeled(n: usize, dist: &LabelDistribution, seed: u64) -> Result<WorldGraph> {
    if n < 2 {
        return Err(Error::invalid("generate_er_labeled needs n >= 2"));
    }
    dist.validate()?;
    let mut g = WorldGraph::empty(n, dist.alphabet().clone())?;
    let sampler = CategoricalSampler::new(dist.probs());
    let mut r = rng::rng(seed);
    for i in 0..n {
        for j in i + 1..n {
            let l = sampler.sample(r.next_u64());
            if l != NULL {
                g.set(i, j, l);
            }
        }
    }
    Ok(g.with_seed(seed))
}

/// Complete graph with every arc labeled `label`.
pub fn generate_clique(n: usize, alphabet: &LabelAlphabet, label: Label) -> Result<WorldGraph> {
    if n < 2 {
        return Err(Error::invalid("clique needs n >= 2"));
    }
    check_real_label(alphabet, label)?;
    let mut g = WorldGraph::empty(n, alphabet.clone())?;
    for i in 0..n {
        for j in i + 1..n {
            g.set(i, j, label);
        }
    }
    Ok(g)
}

/// Cycle `0 - 1 - ... - (n-1) - 0` labeled `label`.
pub fn generate_ring_regular(n: usize, alphabet: &LabelAlphabet, label: Label) -> Result<WorldGraph> {
    if n < 3 {
        return Err(Error::invalid("ring needs n >= 3"));
    }
    check_real_label(alphabet, label)?;
    let mut g = WorldGraph::empty(n, alphabet.clone())?;
    for i in 0..n {
        g.set(i, (i + 1) % n, label);
    }
    Ok(g)
}

/// Path `0 - 1 - ... - (n-1)` labeled `label`.
pub fn generate_path(n: usize, alphabet: &LabelAlphabet, label: Label) -> Result<WorldGraph> {
    if n < 2 {
        return Err(Error::invalid("path needs n >= 2"));
    }
    check_real_label(alphabet, label)?;
    let mut g = WorldGraph::empty(n, alphabet.clone())?;
    for i in 0..n - 1 {
        g.set(i, i + 1, label);
    }
    Ok(g)
}

fn check_real_label(alphabet: &LabelAlphabet, label: Label) -> Result<()> {
    if label == NULL {
        return Err(Error::invalid("the null label cannot label an arc"));
    }
    if !alphabet.contains(label) {
        return Err(Error::invalid(format!("label index {label} outside alphabet")));
    }
    Ok(())
}

/// Sender and receiver views of one world.
///
/// Immutable once built; the receiver was sampled cell by cell from the
/// channel row of the sender's label.
#[derive(Debug, Clone)]
pub struct ViewPair {
    sender: WorldGraph,
    receiver: WorldGraph,
    channel: ChannelNoiseModel,
    seed: u64,
}

impl ViewPair {
    /// Pairs two hand-built views (fixtures). The channel is recorded as
    /// given; no sampling takes place.
    pub fn from_views(sender: WorldGraph, receiver: WorldGraph, channel: ChannelNoiseModel) -> Result<Self> {
        if !sender.same_shape(&receiver) {
            return Err(Error::invalid("views differ in node count or alphabet"));
        }
        if channel.dimension() != sender.alphabet().len() {
            return Err(Error::invalid("channel dimension does not match alphabet"));
        }
        Ok(ViewPair {
            sender,
            receiver,
            channel,
            seed: 0,
        })
    }

    pub fn sender(&self) -> &WorldGraph {
        &self.sender
    }

    pub fn receiver(&self) -> &WorldGraph {
        &self.receiver
    }

    pub fn channel(&self) -> &ChannelNoiseModel {
        &self.channel
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Produces the receiver's view by passing every cell of `world` through
/// `channel`. The sender view is `world` itself.
pub fn perturb_view(world: &WorldGraph, channel: &ChannelNoiseModel, seed: u64) -> Result<ViewPair> {
    let k = world.alphabet().len();
    if channel.dimension() != k {
        return Err(Error::invalid(format!(
            "channel has {} symbols, alphabet has {k}",
            channel.dimension()
        )));
    }
    let samplers: Vec<CategoricalSampler> = (0..k)
        .map(|a| CategoricalSampler::new(channel.row(a as Label)))
        .collect();
    let mut receiver = WorldGraph::empty(world.n(), world.alphabet().clone())?.with_seed(seed);
    let mut r = rng::rng(seed);
    for i in 0..world.n() {
        for j in i + 1..world.n() {
            let l = samplers[world.get(i, j) as usize].sample(r.next_u64());
            if l != NULL {
                receiver.set(i, j, l);
            }
        }
    }
    Ok(ViewPair {
        sender: world.clone(),
        receiver,
        channel: channel.clone(),
        seed,
    })
}
