use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::alphabet::Label;

/// Row-stochastic label confusion matrix: `confusion[a][b]` is the probability
/// the receiver records label `b` where the sender's world holds `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelNoiseModel {
    confusion: Vec<Vec<f64>>,
}

impl ChannelNoiseModel {
    pub fn new(confusion: Vec<Vec<f64>>) -> Result<Self> {
        let k = confusion.len();
        if k < 2 {
            return Err(Error::invalid("channel needs at least two symbols"));
        }
        for (a, row) in confusion.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid(format!(
                    "confusion row {a} has {} entries, want {k}",
                    row.len()
                )));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::invalid(format!("confusion row {a} has an entry outside [0,1]")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("confusion row {a} sums to {s}")));
            }
        }
        Ok(ChannelNoiseModel { confusion })
    }

    /// Noiseless channel.
    pub fn identity(size: usize) -> Self {
        let confusion = (0..size)
            .map(|a| (0..size).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
            .collect();
        ChannelNoiseModel { confusion }
    }

    /// Keeps a label with probability `1 - eps`, otherwise substitutes one of
    /// the other `size - 1` symbols uniformly. For `size == 2` this is the
    /// binary symmetric channel with crossover `eps`.
    pub fn symmetric(size: usize, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::invalid(format!("flip probability {eps} out of [0,1]")));
        }
        if size < 2 {
            return Err(Error::invalid("channel needs at least two symbols"));
        }
        let off = eps / (size - 1) as f64;
        let confusion = (0..size)
            .map(|a| (0..size).map(|b| if a == b { 1.0 - eps } else { off }).collect())
            .collect();
        ChannelNoiseModel::new(confusion)
    }

    /// Number of symbols (`m + 1`).
    pub fn dimension(&self) -> usize {
        self.confusion.len()
    }

    pub fn row(&self, from: Label) -> &[f64] {
        &self.confusion[from as usize]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.confusion
    }

    pub fn is_identity(&self) -> bool {
        self.confusion.iter().enumerate().all(|(a, row)| {
            row.iter()
                .enumerate()
                .all(|(b, &p)| p == if a == b { 1.0 } else { 0.0 })
        })
    }
}
