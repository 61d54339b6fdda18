//! Seeded Monte-Carlo sweeps over generated worlds, plus the hand-built
//! reference scenarios.
//!
//! Every trial derives its seed from `(config seed, point group, trial)`, so
//! reports do not depend on thread scheduling. Points that differ only in
//! `K`, `G` or the noise level reuse the same worlds and nested shared
//! prefixes.

mod engine;
mod fixtures;
mod report;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::describe::{
    anchor_columns, expected_collisions, min_shared_names, rewrite_adjacency_for_depth, DescriptionIndex,
    LikelihoodTable, SelectionStrategy, Vocabulary, MAX_DEPTH,
};
use crate::error::{Error, Result};
use crate::graph::{generate_er_labeled, perturb_view, ChannelNoiseModel, LabelDistribution, WorldGraph};
use crate::info::{
    analytic_label_entropy, analytic_mutual_information, empirical_label_entropy, joint_stats_of, mutual_information,
    JointLabelStats,
};
use crate::protocol::{encode_message, measure_overhead, Message, NodeRef, Triple};
use crate::rng::{self, mix, trial_seed, RNG_ID};

pub use fixtures::{figure_fixtures, fixtures, Fixture, FixtureOutcome};
pub use report::{read_knees_csv, read_points_csv, COLUMNS};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_PAIRS: usize = 16;
/// Unresolved nodes still counted as "a constant number".
pub const CONSTANT_UNRESOLVED: f64 = 2.0;
/// Resolution rate a noisy point must exceed to count as past the knee.
pub const KNEE_RATE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Collision,
    Threshold,
    Noisy,
    Overhead,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Collision => "collision",
            SweepKind::Threshold => "threshold",
            SweepKind::Noisy => "noisy",
            SweepKind::Overhead => "overhead",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "collision" => Ok(SweepKind::Collision),
            "threshold" => Ok(SweepKind::Threshold),
            "noisy" => Ok(SweepKind::Noisy),
            "overhead" => Ok(SweepKind::Overhead),
            _ => Err(Error::invalid(format!("unknown sweep kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub labels: Vec<LabelDistribution>,
    /// Symmetric flip probabilities (noisy sweeps).
    pub eps_values: Vec<f64>,
    /// Shared-name counts (collision and noisy sweeps).
    pub k_values: Vec<usize>,
    /// Sharing multipliers (threshold sweeps).
    pub g_values: Vec<f64>,
    /// Redundant anchors appended to each noisy description.
    pub redundancy: usize,
    pub depth: usize,
    pub trials: usize,
    pub seed: u64,
    pub strategy: SelectionStrategy,
    /// Messages encoded per trial (overhead sweeps).
    pub pairs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_values: vec![256],
            labels: vec![LabelDistribution::binary(0.5).expect("valid")],
            eps_values: vec![0.0],
            k_values: Vec::new(),
            g_values: Vec::new(),
            redundancy: 0,
            depth: 0,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            strategy: SelectionStrategy::Random,
            pairs: DEFAULT_PAIRS,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self, kind: SweepKind) -> Result<()> {
        let fail = |m: String| Err(Error::invalid(m));
        if self.trials == 0 {
            return fail("trials must be ≥ 1".into());
        }
        if self.n_values.is_empty() || self.labels.is_empty() {
            return fail("need at least one n and one label distribution".into());
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 4) {
            return fail(format!("n = {n} is too small (need ≥ 4)"));
        }
        if self.depth > MAX_DEPTH {
            return fail(format!("depth {} exceeds {MAX_DEPTH}", self.depth));
        }
        for d in &self.labels {
            d.validate()?;
        }
        let n_min = *self.n_values.iter().min().unwrap();
        match kind {
            SweepKind::Collision => {
                if self.k_values.is_empty() {
                    return fail("collision sweep needs K values".into());
                }
                if let Some(k) = self.k_values.iter().find(|&&k| k >= n_min) {
                    return fail(format!("K = {k} leaves no unshared node at n = {n_min}"));
                }
            }
            SweepKind::Threshold => {
                if self.g_values.is_empty() {
                    return fail("threshold sweep needs G values".into());
                }
                if let Some(g) = self.g_values.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
                    return fail(format!("G = {g} must be positive"));
                }
            }
            SweepKind::Noisy => {
                if self.k_values.is_empty() || self.eps_values.is_empty() {
                    return fail("noisy sweep needs K and ε values".into());
                }
                if let Some(e) = self.eps_values.iter().find(|e| !(0.0..=1.0).contains(*e)) {
                    return fail(format!("ε = {e} out of [0,1]"));
                }
                if let Some(k) = self
                    .k_values
                    .iter()
                    .find(|&&k| k == 0 || k + self.redundancy + 2 > n_min)
                {
                    return fail(format!(
                        "K = {k} with redundancy {} does not fit n = {n_min}",
                        self.redundancy
                    ));
                }
            }
            SweepKind::Overhead => {
                if self.pairs == 0 {
                    return fail("overhead sweep needs pairs ≥ 1".into());
                }
            }
        }
        Ok(())
    }
}

/// Where the bits-per-symbol figure used for predictions came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitsSource {
    /// Closed form from the configured label distribution and channel.
    Analytic,
    /// Measured on one depth-rewritten pilot world drawn from the config seed.
    Pilot,
}

/// One report row. Fields that do not apply to a sweep kind are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub kind: SweepKind,
    pub labels: String,
    pub n: usize,
    pub eps: Option<f64>,
    pub g: Option<f64>,
    pub k: usize,
    pub redundancy: usize,
    pub depth: usize,
    pub trials: usize,
    pub bits_source: BitsSource,
    /// `H_D` (or `M_D` for noisy sweeps) behind every predicted column.
    pub bits_per_symbol: f64,
    pub h_measured: f64,
    pub m_measured: Option<f64>,
    pub collisions_mean: Option<f64>,
    pub collisions_sd: Option<f64>,
    pub unshared_collisions_mean: Option<f64>,
    pub unresolved_mean: Option<f64>,
    pub unresolved_sd: Option<f64>,
    pub promotions_mean: Option<f64>,
    pub resolution_rate: f64,
    pub resolution_rate_sd: f64,
    pub predicted_collisions: Option<f64>,
    pub predicted_collisions_unshared: Option<f64>,
    pub predicted_k_star: usize,
    pub coded_bits_mean: Option<f64>,
    pub predicted_coded_bits: Option<f64>,
    pub overhead_factor: Option<f64>,
    pub overhead_factor_sd: Option<f64>,
    pub predicted_overhead_factor: Option<f64>,
    pub threshold_k: Option<usize>,
    pub threshold_overhead_factor: Option<f64>,
}

impl SweepPoint {
    fn new(kind: SweepKind, cfg: &SweepConfig, dist: &LabelDistribution, n: usize, k: usize) -> Self {
        SweepPoint {
            kind,
            labels: dist.describe(),
            n,
            eps: None,
            g: None,
            k,
            redundancy: 0,
            depth: cfg.depth,
            trials: cfg.trials,
            bits_source: BitsSource::Analytic,
            bits_per_symbol: 0.0,
            h_measured: 0.0,
            m_measured: None,
            collisions_mean: None,
            collisions_sd: None,
            unshared_collisions_mean: None,
            unresolved_mean: None,
            unresolved_sd: None,
            promotions_mean: None,
            resolution_rate: 0.0,
            resolution_rate_sd: 0.0,
            predicted_collisions: None,
            predicted_collisions_unshared: None,
            predicted_k_star: 0,
            coded_bits_mean: None,
            predicted_coded_bits: None,
            overhead_factor: None,
            overhead_factor_sd: None,
            predicted_overhead_factor: None,
            threshold_k: None,
            threshold_overhead_factor: None,
        }
    }
}

/// Per-trial values behind one point, in trial order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointTrials {
    pub point: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub collisions: Vec<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub unresolved: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub resolution_rate: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub bits_measured: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub overhead_factor: Vec<f64>,
}

/// Smallest shared-name count past which references resolve, compared with
/// the prediction at `G = 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knee {
    pub labels: String,
    pub n: usize,
    pub eps: Option<f64>,
    pub bits_per_symbol: f64,
    pub empirical_k: Option<usize>,
    pub predicted_k: usize,
    /// `empirical_k · bits / log2 n`, the multiplier actually needed.
    pub empirical_g: Option<f64>,
}

impl Knee {
    fn new(dist: &LabelDistribution, n: usize, eps: Option<f64>, bits: f64, empirical_k: Option<usize>) -> Self {
        Knee {
            labels: dist.describe(),
            n,
            eps,
            bits_per_symbol: bits,
            empirical_k,
            predicted_k: predicted_k_star(n, bits),
            empirical_g: empirical_k.map(|k| k as f64 * bits / (n as f64).log2()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: SweepKind,
    pub rng: String,
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
    pub knees: Vec<Knee>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trials: Vec<PointTrials>,
}

impl ExperimentReport {
    fn new(kind: SweepKind, cfg: &SweepConfig) -> Self {
        ExperimentReport {
            kind,
            rng: RNG_ID.to_string(),
            config: cfg.clone(),
            points: Vec::new(),
            knees: Vec::new(),
            trials: Vec::new(),
        }
    }

    fn push(&mut self, point: SweepPoint, mut trials: PointTrials) {
        trials.point = self.points.len();
        self.points.push(point);
        self.trials.push(trials);
    }
}

pub fn run_sweep(kind: SweepKind, cfg: &SweepConfig) -> Result<ExperimentReport> {
    match kind {
        SweepKind::Collision => collision_experiment(cfg),
        SweepKind::Threshold => threshold_sweep(cfg),
        SweepKind::Noisy => noisy_view_sweep(cfg),
        SweepKind::Overhead => overhead_experiment(cfg),
    }
}

fn group_key(dist: usize, n: usize) -> u64 {
    ((dist as u64) << 32) | n as u64
}

fn mean_sd(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.into_iter().collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (mean, var.sqrt())
}

fn predicted_k_star(n: usize, bits: f64) -> usize {
    min_shared_names(n, bits, 2.0).map_or(n, |r| r.k().min(n))
}

fn pilot_seed(cfg: &SweepConfig, key: u64) -> u64 {
    trial_seed(cfg.seed, key, u64::MAX)
}

fn depth_matrix(world: &WorldGraph, depth: usize) -> Result<WorldGraph> {
    Ok(rewrite_adjacency_for_depth(world, depth)?.0)
}

/// `H_D` behind the predictions of identical-view sweeps.
fn description_bits(cfg: &SweepConfig, dist: &LabelDistribution, n: usize, key: u64) -> Result<(BitsSource, f64)> {
    if cfg.depth == 0 {
        return Ok((BitsSource::Analytic, analytic_label_entropy(dist)));
    }
    let pilot = generate_er_labeled(n, dist, pilot_seed(cfg, key))?;
    Ok((
        BitsSource::Pilot,
        empirical_label_entropy(&depth_matrix(&pilot, cfg.depth)?),
    ))
}

struct PartitionTrial {
    curve: Vec<engine::PrefixStats>,
    entropy_at: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn partition_trials(
    dist: &LabelDistribution,
    n: usize,
    depth: usize,
    strategy: SelectionStrategy,
    trials: usize,
    seed: u64,
    key: u64,
    max_k: usize,
    entropy_ks: &[usize],
) -> Result<Vec<PartitionTrial>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let ws = trial_seed(seed, key, t);
            let world = generate_er_labeled(n, dist, ws)?;
            let ctx = strategy.select(&world, max_k, mix(ws, 1))?;
            let columns = anchor_columns(&world, ctx.nodes(), depth)?;
            Ok(PartitionTrial {
                curve: engine::partition_curve(&columns, ctx.nodes(), n),
                entropy_at: entropy_ks
                    .iter()
                    .map(|&k| engine::pooled_entropy(&columns, ctx.nodes(), k, n))
                    .collect(),
            })
        })
        .collect()
}

fn knee_from_curves(runs: &[PartitionTrial]) -> (Vec<f64>, Option<usize>) {
    let len = runs[0].curve.len();
    let mean: Vec<f64> = (0..len)
        .map(|k| runs.iter().map(|r| r.curve[k].unresolved as f64).sum::<f64>() / runs.len() as f64)
        .collect();
    let knee = mean.iter().position(|&u| u <= CONSTANT_UNRESOLVED);
    (mean, knee)
}

fn curve_limit(n: usize, bits: f64, largest: usize) -> usize {
    let reach = if bits > 0.0 {
        (3.0 * (n as f64).log2() / bits).ceil() as usize
    } else {
        n
    };
    reach.max(largest).min(n)
}

#[allow(clippy::too_many_arguments)]
fn partition_point(
    kind: SweepKind,
    cfg: &SweepConfig,
    dist: &LabelDistribution,
    n: usize,
    k: usize,
    bits: (BitsSource, f64),
    runs: &[PartitionTrial],
    entropy_slot: usize,
) -> (SweepPoint, PointTrials) {
    let stats: Vec<engine::PrefixStats> = runs.iter().map(|r| r.curve[k]).collect();
    let mut p = SweepPoint::new(kind, cfg, dist, n, k);
    p.bits_source = bits.0;
    p.bits_per_symbol = bits.1;
    p.h_measured = mean_sd(runs.iter().map(|r| r.entropy_at[entropy_slot])).0;
    let (cm, csd) = mean_sd(stats.iter().map(|s| s.collisions as f64));
    let (um, usd) = mean_sd(stats.iter().map(|s| s.unresolved as f64));
    let rates: Vec<f64> = stats.iter().map(|s| (n - s.unresolved) as f64 / n as f64).collect();
    let (rm, rsd) = mean_sd(rates.iter().copied());
    p.collisions_mean = Some(cm);
    p.collisions_sd = Some(csd);
    p.unshared_collisions_mean = Some(mean_sd(stats.iter().map(|s| s.unshared_collisions as f64)).0);
    p.unresolved_mean = Some(um);
    p.unresolved_sd = Some(usd);
    p.promotions_mean = Some(mean_sd(stats.iter().map(|s| s.promotions as f64)).0);
    p.resolution_rate = rm;
    p.resolution_rate_sd = rsd;
    p.predicted_collisions = Some(expected_collisions(n, bits.1, k));
    p.predicted_collisions_unshared = Some(expected_collisions(n - k, bits.1, k));
    p.predicted_k_star = predicted_k_star(n, bits.1);
    let trials = PointTrials {
        collisions: stats.iter().map(|s| s.collisions).collect(),
        unresolved: stats.iter().map(|s| s.unresolved).collect(),
        resolution_rate: rates,
        bits_measured: runs.iter().map(|r| r.entropy_at[entropy_slot]).collect(),
        ..Default::default()
    };
    (p, trials)
}

/// Duplicate-description counts at each configured `K`, against
/// `C = n²/2^(H_D·K+1)`.
pub fn collision_experiment(cfg: &SweepConfig) -> Result<ExperimentReport> {
    cfg.validate(SweepKind::Collision)?;
    let mut report = ExperimentReport::new(SweepKind::Collision, cfg);
    for (di, dist) in cfg.labels.iter().enumerate() {
        for (ni, &n) in cfg.n_values.iter().enumerate() {
            let key = group_key(di, ni);
            let bits = description_bits(cfg, dist, n, key)?;
            let largest = *cfg.k_values.iter().max().unwrap();
            let limit = curve_limit(n, bits.1, largest);
            let runs = partition_trials(
                dist,
                n,
                cfg.depth,
                cfg.strategy,
                cfg.trials,
                cfg.seed,
                key,
                limit,
                &cfg.k_values,
            )?;
            for (slot, &k) in cfg.k_values.iter().enumerate() {
                let (p, t) = partition_point(SweepKind::Collision, cfg, dist, n, k, bits, &runs, slot);
                report.push(p, t);
            }
            report
                .knees
                .push(Knee::new(dist, n, None, bits.1, knee_from_curves(&runs).1));
        }
    }
    Ok(report)
}

/// Unresolved nodes at `K = ceil(G·log2 n / H_D)` for each configured `G`.
pub fn threshold_sweep(cfg: &SweepConfig) -> Result<ExperimentReport> {
    cfg.validate(SweepKind::Threshold)?;
    let mut report = ExperimentReport::new(SweepKind::Threshold, cfg);
    for (di, dist) in cfg.labels.iter().enumerate() {
        for (ni, &n) in cfg.n_values.iter().enumerate() {
            let key = group_key(di, ni);
            let bits = description_bits(cfg, dist, n, key)?;
            let ks: Vec<usize> = cfg
                .g_values
                .iter()
                .map(|&g| min_shared_names(n, bits.1, g).map(|r| r.k().min(n)))
                .collect::<Result<_>>()?;
            let limit = curve_limit(n, bits.1, *ks.iter().max().unwrap());
            let runs = partition_trials(dist, n, cfg.depth, cfg.strategy, cfg.trials, cfg.seed, key, limit, &ks)?;
            for (slot, (&g, &k)) in cfg.g_values.iter().zip(&ks).enumerate() {
                let (mut p, t) = partition_point(SweepKind::Threshold, cfg, dist, n, k, bits, &runs, slot);
                p.g = Some(g);
                report.push(p, t);
            }
            report
                .knees
                .push(Knee::new(dist, n, None, bits.1, knee_from_curves(&runs).1));
        }
    }
    Ok(report)
}

/// Mean unresolved count at every `K` in `0..=max_k`, and the first `K`
/// where it drops to [`CONSTANT_UNRESOLVED`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub mean_unresolved: Vec<f64>,
    pub threshold: Option<usize>,
}

pub fn empirical_threshold_k(
    dist: &LabelDistribution,
    n: usize,
    depth: usize,
    strategy: SelectionStrategy,
    trials: usize,
    seed: u64,
    max_k: usize,
) -> Result<ThresholdCurve> {
    if trials == 0 || max_k > n {
        return Err(Error::invalid(format!(
            "need trials ≥ 1 and max K ≤ n (got {trials}, {max_k})"
        )));
    }
    let runs = partition_trials(dist, n, depth, strategy, trials, seed, 0, max_k, &[])?;
    let (mean_unresolved, threshold) = knee_from_curves(&runs);
    Ok(ThresholdCurve {
        mean_unresolved,
        threshold,
    })
}

fn channel_bits(
    cfg: &SweepConfig,
    dist: &LabelDistribution,
    channel: &ChannelNoiseModel,
    n: usize,
    key: u64,
) -> Result<(BitsSource, f64)> {
    if cfg.depth == 0 {
        return Ok((BitsSource::Analytic, analytic_mutual_information(dist, channel)?));
    }
    let pilot = generate_er_labeled(n, dist, pilot_seed(cfg, key))?;
    let pair = perturb_view(&pilot, channel, mix(pilot_seed(cfg, key), 2))?;
    let stats = joint_stats_of(
        &depth_matrix(pair.sender(), cfg.depth)?,
        &depth_matrix(pair.receiver(), cfg.depth)?,
    )?;
    Ok((BitsSource::Pilot, mutual_information(&stats)))
}

struct NoisyRun {
    correct: Vec<usize>,
    m: f64,
    h: f64,
}

/// Maximum-likelihood resolution rate of every unshared node in a perturbed
/// receiver view, against `K ≈ 2·log2 n / M_D`.
pub fn noisy_view_sweep(cfg: &SweepConfig) -> Result<ExperimentReport> {
    cfg.validate(SweepKind::Noisy)?;
    let mut report = ExperimentReport::new(SweepKind::Noisy, cfg);
    let mut ks = cfg.k_values.clone();
    ks.sort_unstable();
    ks.dedup();
    let lengths: Vec<usize> = ks.iter().map(|k| k + cfg.redundancy).collect();
    let longest = *lengths.last().unwrap();
    for (di, dist) in cfg.labels.iter().enumerate() {
        let channels: Vec<ChannelNoiseModel> = cfg
            .eps_values
            .iter()
            .map(|&e| ChannelNoiseModel::symmetric(dist.alphabet().len(), e))
            .collect::<Result<_>>()?;
        for (ni, &n) in cfg.n_values.iter().enumerate() {
            let key = group_key(di, ni);
            let runs: Vec<Vec<NoisyRun>> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let ws = trial_seed(cfg.seed, key, t);
                    let world = generate_er_labeled(n, dist, ws)?;
                    let ctx = cfg.strategy.select(&world, longest, mix(ws, 1))?;
                    channels
                        .iter()
                        .enumerate()
                        .map(|(ei, ch)| {
                            let pair = perturb_view(&world, ch, mix(ws, 2 + ei as u64))?;
                            let stats = view_stats(pair.sender(), pair.receiver(), cfg.depth)?;
                            let table = LikelihoodTable::from_stats(&stats)?;
                            let s_cols = anchor_columns(pair.sender(), ctx.nodes(), cfg.depth)?;
                            let r_cols = anchor_columns(pair.receiver(), ctx.nodes(), cfg.depth)?;
                            Ok(NoisyRun {
                                correct: engine::noisy_curve(&s_cols, &r_cols, ctx.nodes(), n, &table, &lengths),
                                m: mutual_information(&stats),
                                h: stats.sender_entropy(),
                            })
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            for (ei, (&eps, ch)) in cfg.eps_values.iter().zip(&channels).enumerate() {
                let bits = channel_bits(cfg, dist, ch, n, key | (ei as u64) << 48)?;
                let mut knee = None;
                for (li, (&k, &len)) in ks.iter().zip(&lengths).enumerate() {
                    let rates: Vec<f64> = runs
                        .iter()
                        .map(|r| r[ei].correct[li] as f64 / (n - len) as f64)
                        .collect();
                    let (rm, rsd) = mean_sd(rates.iter().copied());
                    if knee.is_none() && rm > KNEE_RATE {
                        knee = Some(k);
                    }
                    let mut p = SweepPoint::new(SweepKind::Noisy, cfg, dist, n, k);
                    p.eps = Some(eps);
                    p.redundancy = cfg.redundancy;
                    p.bits_source = bits.0;
                    p.bits_per_symbol = bits.1;
                    p.h_measured = mean_sd(runs.iter().map(|r| r[ei].h)).0;
                    p.m_measured = Some(mean_sd(runs.iter().map(|r| r[ei].m)).0);
                    p.resolution_rate = rm;
                    p.resolution_rate_sd = rsd;
                    p.predicted_k_star = predicted_k_star(n, bits.1);
                    let trials = PointTrials {
                        resolution_rate: rates,
                        bits_measured: runs.iter().map(|r| r[ei].m).collect(),
                        ..Default::default()
                    };
                    report.push(p, trials);
                }
                report.knees.push(Knee::new(dist, n, Some(eps), bits.1, knee));
            }
        }
    }
    Ok(report)
}

fn view_stats(sender: &WorldGraph, receiver: &WorldGraph, depth: usize) -> Result<JointLabelStats> {
    if depth == 0 {
        joint_stats_of(sender, receiver)
    } else {
        joint_stats_of(&depth_matrix(sender, depth)?, &depth_matrix(receiver, depth)?)
    }
}

/// `ceil(2·log2(m_voc)·log2(n)/H_D)`: the description length the overhead
/// prediction assumes.
pub fn overhead_description_length(n: usize, m_voc: usize, h_d: f64) -> Result<usize> {
    let p = measure_overhead(n, m_voc, h_d)?;
    Ok((p.description_symbols * (1.0 - 1e-12)).ceil() as usize)
}

struct OverheadRun {
    factor: f64,
    coded_bits: f64,
    threshold_factor: f64,
    resolved: f64,
    h: f64,
}

/// Entropy-coded size of described triples relative to naming both ends.
pub fn overhead_experiment(cfg: &SweepConfig) -> Result<ExperimentReport> {
    cfg.validate(SweepKind::Overhead)?;
    let mut report = ExperimentReport::new(SweepKind::Overhead, cfg);
    for (di, dist) in cfg.labels.iter().enumerate() {
        let m_voc = Vocabulary::new(dist.alphabet(), cfg.depth)?.len();
        for (ni, &n) in cfg.n_values.iter().enumerate() {
            let key = group_key(di, ni);
            let bits = description_bits(cfg, dist, n, key)?;
            if bits.1 <= 0.0 {
                return Err(Error::invalid(format!(
                    "labels {} carry no information; every name must be shared",
                    dist.describe()
                )));
            }
            let prediction = measure_overhead(n, m_voc, bits.1)?;
            let k = overhead_description_length(n, m_voc, bits.1)?.min(n - 2);
            let k_thr = predicted_k_star(n, bits.1).min(n - 2);
            let longest = k.max(k_thr);
            let runs: Vec<OverheadRun> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let ws = trial_seed(cfg.seed, key, t);
                    let world = generate_er_labeled(n, dist, ws)?;
                    let ctx = cfg.strategy.select(&world, longest, mix(ws, 1))?;
                    let shared = ctx.mask(n);
                    let free: Vec<usize> = (0..n).filter(|&x| !shared[x]).collect();
                    let mut rng = rng::rng(mix(ws, 3));
                    let pairs: Vec<(usize, usize)> = (0..cfg.pairs)
                        .map(|_| {
                            let a = rng.random_range(0..free.len());
                            let b = (a + 1 + rng.random_range(0..free.len() - 1)) % free.len();
                            (free[a], free[b])
                        })
                        .collect();
                    let measure = |len: usize| -> Result<(f64, f64, f64)> {
                        let prefix = ctx.prefix(len);
                        let index = DescriptionIndex::build(&world, &prefix, cfg.depth)?;
                        let (mut factor, mut bits, mut ok) = (0.0, 0.0, 0usize);
                        for &(x, y) in &pairs {
                            let sx = NodeRef::describe(&world, x, &prefix, cfg.depth, len, 0)?;
                            let sy = NodeRef::describe(&world, y, &prefix, cfg.depth, len, 0)?;
                            for (node, r) in [(x, &sx), (y, &sy)] {
                                ok += (index.exact(&r.full_description().unwrap())? == [node]) as usize;
                            }
                            let msg = Message::new(vec![Triple::new(sx, 1, sy)]);
                            let (_, stats) = encode_message(&msg, n, &prefix, m_voc)?;
                            factor += stats.overhead_factor;
                            bits += stats.entropy_coded_bits as f64;
                        }
                        let m = cfg.pairs as f64;
                        Ok((factor / m, bits / m, ok as f64 / (2.0 * m)))
                    };
                    let (factor, coded_bits, resolved) = measure(k)?;
                    let threshold_factor = measure(k_thr)?.0;
                    Ok(OverheadRun {
                        factor,
                        coded_bits,
                        threshold_factor,
                        resolved,
                        h: empirical_label_entropy(&world),
                    })
                })
                .collect::<Result<_>>()?;
            let mut p = SweepPoint::new(SweepKind::Overhead, cfg, dist, n, k);
            p.bits_source = bits.0;
            p.bits_per_symbol = bits.1;
            p.h_measured = mean_sd(runs.iter().map(|r| r.h)).0;
            let (fm, fsd) = mean_sd(runs.iter().map(|r| r.factor));
            let (rm, rsd) = mean_sd(runs.iter().map(|r| r.resolved));
            p.resolution_rate = rm;
            p.resolution_rate_sd = rsd;
            p.predicted_k_star = predicted_k_star(n, bits.1);
            p.coded_bits_mean = Some(mean_sd(runs.iter().map(|r| r.coded_bits)).0);
            p.predicted_coded_bits = Some(prediction.entropy_coded_bits);
            p.overhead_factor = Some(fm);
            p.overhead_factor_sd = Some(fsd);
            p.predicted_overhead_factor = Some(prediction.overhead_factor);
            p.threshold_k = Some(k_thr);
            p.threshold_overhead_factor = Some(mean_sd(runs.iter().map(|r| r.threshold_factor)).0);
            let trials = PointTrials {
                resolution_rate: runs.iter().map(|r| r.resolved).collect(),
                overhead_factor: runs.iter().map(|r| r.factor).collect(),
                ..Default::default()
            };
            report.push(p, trials);
        }
    }
    Ok(report)
}
