//! Plug-in entropy and mutual-information estimators over adjacency-cell
//! labels. All quantities are in bits.
//!
//! Estimators work from integer counts and convert to floating point once per
//! term, so `H(S) - H(S|R)` and `H(R) - H(R|S)` come out of the same joint
//! table and agree to rounding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ChannelNoiseModel, Label, LabelDistribution, ViewPair, WorldGraph};
use crate::scalar::Scalar;

/// Co-occurrence counts of (sender label, receiver label) over aligned cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointLabelStats {
    size: usize,
    /// Row-major `[sender][receiver]`.
    counts: Vec<u64>,
    total: u64,
}

impl JointLabelStats {
    pub fn new(size: usize) -> Self {
        JointLabelStats {
            size,
            counts: vec![0; size * size],
            total: 0,
        }
    }

    /// From a row-major `size × size` table indexed `[sender][receiver]`.
    pub fn from_counts(size: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != size * size {
            return Err(Error::invalid("count table is not size × size"));
        }
        let total = counts.iter().sum();
        Ok(JointLabelStats { size, counts, total })
    }

    pub fn record(&mut self, sender: usize, receiver: usize) {
        self.counts[sender * self.size + receiver] += 1;
        self.total += 1;
    }

    pub fn dimension(&self) -> usize {
        self.size
    }

    pub fn count(&self, sender: usize, receiver: usize) -> u64 {
        self.counts[sender * self.size + receiver]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn sender_marginal(&self) -> Vec<u64> {
        (0..self.size)
            .map(|s| (0..self.size).map(|r| self.count(s, r)).sum())
            .collect()
    }

    pub fn receiver_marginal(&self) -> Vec<u64> {
        (0..self.size)
            .map(|r| (0..self.size).map(|s| self.count(s, r)).sum())
            .collect()
    }

    pub fn sender_entropy<T: Scalar>(&self) -> T {
        entropy_of_counts(self.sender_marginal())
    }

    pub fn receiver_entropy<T: Scalar>(&self) -> T {
        entropy_of_counts(self.receiver_marginal())
    }

    pub fn joint_entropy<T: Scalar>(&self) -> T {
        entropy_of_counts(self.counts.iter().copied())
    }
}

/// Plug-in entropy of a histogram; `0` for an empty histogram.
pub fn entropy_of_counts<T: Scalar>(counts: impl IntoIterator<Item = u64>) -> T {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return T::zero();
    }
    let total = T::of(total);
    counts
        .into_iter()
        .fold(T::zero(), |h, c| h - (T::of(c) / total).xlog2x())
}

/// `-Σ p log2 p` with `0 log 0 = 0`.
pub fn analytic_entropy<T: Scalar>(probs: &[T]) -> T {
    probs.iter().fold(T::zero(), |h, &p| h - p.xlog2x())
}

/// Entropy of a label distribution, null included.
pub fn analytic_label_entropy(dist: &LabelDistribution) -> f64 {
    analytic_entropy(dist.probs())
}

/// Entropy of the empirical label frequencies over a graph's unordered cells.
pub fn empirical_label_entropy<T: Scalar>(g: &WorldGraph) -> T {
    entropy_of_counts(g.label_counts())
}

/// Per-symbol plug-in entropy of pooled symbols from equal-length strings.
pub fn empirical_description_entropy<T, K, S>(samples: &[S]) -> Result<T>
where
    T: Scalar,
    K: Ord + Copy,
    S: AsRef<[K]>,
{
    let first = samples
        .first()
        .ok_or_else(|| Error::invalid("no samples"))?
        .as_ref()
        .len();
    if first == 0 {
        return Err(Error::invalid("samples are empty strings"));
    }
    let mut hist: BTreeMap<K, u64> = BTreeMap::new();
    for s in samples {
        let s = s.as_ref();
        if s.len() != first {
            return Err(Error::invalid("samples differ in length"));
        }
        for &k in s {
            *hist.entry(k).or_default() += 1;
        }
    }
    Ok(entropy_of_counts(hist.into_values()))
}

/// Joint label statistics over all unordered off-diagonal cells of a view pair.
pub fn joint_stats(pair: &ViewPair) -> Result<JointLabelStats> {
    joint_stats_of(pair.sender(), pair.receiver())
}

/// Joint statistics of two aligned matrices (e.g. depth-rewritten views).
pub fn joint_stats_of(sender: &WorldGraph, receiver: &WorldGraph) -> Result<JointLabelStats> {
    if !sender.same_shape(receiver) {
        return Err(Error::invalid("views are not aligned"));
    }
    let mut stats = JointLabelStats::new(sender.alphabet().len());
    for (i, j, s) in sender.cells() {
        stats.record(s as usize, receiver.get(i, j) as usize);
    }
    Ok(stats)
}

/// `H(S) + H(R) - H(S,R)`, clamped into `[0, min(H(S), H(R))]` against
/// rounding. Zero for an empty table.
pub fn mutual_information<T: Scalar>(stats: &JointLabelStats) -> T {
    if stats.total() == 0 {
        return T::zero();
    }
    let hs: T = stats.sender_entropy();
    let hr: T = stats.receiver_entropy();
    let hsr: T = stats.joint_entropy();
    (hs + hr - hsr).max(T::zero()).min(hs.min(hr))
}

/// `I(S;R)` when sender cells follow `dist` and the receiver sees them
/// through `channel`.
pub fn analytic_mutual_information(dist: &LabelDistribution, channel: &ChannelNoiseModel) -> Result<f64> {
    let m = dist.probs().len();
    if channel.dimension() != m {
        return Err(Error::invalid(format!(
            "channel has {} symbols, distribution {m}",
            channel.dimension()
        )));
    }
    let mut joint = Vec::with_capacity(m * m);
    let mut receiver = vec![0.0; m];
    for (s, &p) in dist.probs().iter().enumerate() {
        for (r, &c) in channel.row(s as Label).iter().enumerate() {
            joint.push(p * c);
            receiver[r] += p * c;
        }
    }
    let hs: f64 = analytic_entropy(dist.probs());
    let hr: f64 = analytic_entropy(&receiver);
    let hsr: f64 = analytic_entropy(&joint);
    Ok((hs + hr - hsr).max(0.0).min(hs.min(hr)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conditioning {
    SenderGivenReceiver,
    ReceiverGivenSender,
}

/// `H(S|R) = H(S,R) - H(R)` or `H(R|S) = H(S,R) - H(S)`.
pub fn conditional_entropy<T: Scalar>(stats: &JointLabelStats, direction: Conditioning) -> T {
    let hsr: T = stats.joint_entropy();
    match direction {
        Conditioning::SenderGivenReceiver => hsr - stats.receiver_entropy(),
        Conditioning::ReceiverGivenSender => hsr - stats.sender_entropy(),
    }
}

/// log2 of the typical-set size for strings of `length` symbols.
pub fn typical_set_size<T: Scalar>(entropy: T, length: usize) -> T {
    entropy * T::of(length)
}

/// Binary entropy `H2(p)`.
pub fn binary_entropy<T: Scalar>(p: T) -> T {
    analytic_entropy(&[p, T::one() - p])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er_labeled, perturb_view, ChannelNoiseModel, LabelAlphabet};

    #[test]
    fn analytic_examples() {
        assert_eq!(analytic_entropy(&[0.5f64, 0.5]), 1.0);
        assert_eq!(analytic_entropy(&[1.0f64, 0.0]), 0.0);
        assert_eq!(analytic_entropy(&[0.5f64, 0.25, 0.25]), 1.5);
        assert_eq!(analytic_entropy(&[0.5f32, 0.25, 0.25]), 1.5f32);
    }

    #[test]
    fn typical_set_examples() {
        assert_eq!(typical_set_size(1.0f64, 20), 20.0);
        assert_eq!(typical_set_size(0.0f64, 7), 0.0);
        assert_eq!(typical_set_size(1.5f64, 10), 15.0);
    }

    #[test]
    fn empirical_entropy_edges() {
        let same = vec![vec![1u16, 1, 1]; 5];
        assert_eq!(empirical_description_entropy::<f64, _, _>(&same).unwrap(), 0.0);
        let empty: Vec<Vec<u16>> = vec![];
        assert!(empirical_description_entropy::<f64, _, _>(&empty).is_err());
        assert!(empirical_description_entropy::<f64, _, _>(&[vec![1u16], vec![1, 2]]).is_err());
    }

    #[test]
    fn empirical_entropy_of_fair_bits() {
        use rand::RngCore;
        let mut r = crate::rng::rng(17);
        let samples: Vec<Vec<u8>> = (0..10_000)
            .map(|_| (0..16).map(|_| (r.next_u64() >> 63) as u8).collect())
            .collect();
        let h: f64 = empirical_description_entropy(&samples).unwrap();
        assert!((h - 1.0).abs() < 0.01, "{h}");
    }

    #[test]
    fn hand_built_pair_with_one_flip() {
        let a = LabelAlphabet::binary();
        let s = WorldGraph::from_arcs(4, a.clone(), [(0, 1, 1), (2, 3, 1)]).unwrap();
        let r = WorldGraph::from_arcs(4, a, [(0, 1, 1), (2, 3, 1), (1, 2, 1)]).unwrap();
        let pair = ViewPair::from_views(s, r, ChannelNoiseModel::identity(2)).unwrap();
        let st = joint_stats(&pair).unwrap();
        assert_eq!(st.total(), 6);
        assert_eq!(st.count(0, 1), 1);
        assert_eq!(st.count(1, 0), 0);
        assert_eq!(st.count(0, 0), 3);
        assert_eq!(st.count(1, 1), 2);
    }

    #[test]
    fn all_null_world_mass_in_row_zero() {
        let g = WorldGraph::empty(6, LabelAlphabet::binary()).unwrap();
        let pair = perturb_view(&g, &ChannelNoiseModel::symmetric(2, 0.3).unwrap(), 2).unwrap();
        let st = joint_stats(&pair).unwrap();
        assert_eq!(st.sender_marginal(), vec![15, 0]);
    }

    #[test]
    fn identity_channel_mi_equals_entropy_exactly() {
        let d = LabelDistribution::binary(0.5).unwrap();
        let g = generate_er_labeled(1000, &d, 3).unwrap();
        let pair = perturb_view(&g, &ChannelNoiseModel::identity(2), 4).unwrap();
        let st = joint_stats(&pair).unwrap();
        assert!((0..2).all(|s| (0..2).all(|r| s == r || st.count(s, r) == 0)));
        let mi: f64 = mutual_information(&st);
        assert_eq!(mi, empirical_label_entropy::<f64>(&g));
        assert!((mi - 1.0).abs() < 0.02);
        assert_eq!(conditional_entropy::<f64>(&st, Conditioning::SenderGivenReceiver), 0.0);
    }

    #[test]
    fn bsc_mutual_information() {
        let d = LabelDistribution::binary(0.5).unwrap();
        let g = generate_er_labeled(1000, &d, 8).unwrap();
        for (eps, want) in [(0.5, 0.0), (0.11, 1.0 - binary_entropy(0.11f64))] {
            let pair = perturb_view(&g, &ChannelNoiseModel::symmetric(2, eps).unwrap(), 9).unwrap();
            let st = joint_stats(&pair).unwrap();
            let mi: f64 = mutual_information(&st);
            assert!((mi - want).abs() < 0.02, "eps {eps}: {mi} vs {want}");
        }
        // 1 - H2(0.11) sits at 0.50
        assert!((1.0 - binary_entropy(0.11f64) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn independent_views_conditional_equals_marginal() {
        let d = LabelDistribution::binary(0.5).unwrap();
        let g = generate_er_labeled(600, &d, 1).unwrap();
        let pair = perturb_view(&g, &ChannelNoiseModel::symmetric(2, 0.5).unwrap(), 2).unwrap();
        let st = joint_stats(&pair).unwrap();
        let h: f64 = conditional_entropy(&st, Conditioning::SenderGivenReceiver);
        assert!((h - st.sender_entropy::<f64>()).abs() < 0.02);
        let hrs: f64 = conditional_entropy(&st, Conditioning::ReceiverGivenSender);
        assert_eq!(hrs, st.joint_entropy::<f64>() - st.sender_entropy::<f64>());
    }
}
