use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a symbol in a [`LabelAlphabet`].
pub type Label = u16;

/// The null label: absence of an arc.
pub const NULL: Label = 0;

/// Display form of the null label.
pub const NULL_SYMBOL: &str = "∅";

/// Ordered arc-label vocabulary. Index 0 is always the null label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelAlphabet {
    symbols: Vec<String>,
}

impl LabelAlphabet {
    /// Builds an alphabet from the real (non-null) labels; null is prepended.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut symbols = vec![NULL_SYMBOL.to_string()];
        symbols.extend(labels.into_iter().map(Into::into));
        Self::from_symbols(symbols)
    }

    /// Builds an alphabet from the full symbol list, null first.
    pub fn from_symbols(symbols: Vec<String>) -> Result<Self> {
        if symbols.len() < 2 {
            return Err(Error::invalid("alphabet needs the null symbol and at least one label"));
        }
        if symbols.len() > Label::MAX as usize + 1 {
            return Err(Error::invalid(format!(
                "alphabet of {} symbols is too large",
                symbols.len()
            )));
        }
        if symbols[0] != NULL_SYMBOL {
            return Err(Error::invalid(format!("first symbol must be {NULL_SYMBOL}")));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.contains(',') || s.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!("bad label symbol {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::invalid(format!("duplicate label symbol {s:?}")));
            }
        }
        Ok(LabelAlphabet { symbols })
    }

    /// `{∅, P}`, the single-relation alphabet used throughout the examples.
    pub fn binary() -> Self {
        Self::new(["P"]).unwrap()
    }

    /// Alphabet with `m` real labels named `L1..Lm`, or `P` when `m == 1`.
    pub fn with_labels(m: usize) -> Result<Self> {
        if m == 1 {
            return Ok(Self::binary());
        }
        Self::new((1..=m).map(|i| format!("L{i}")))
    }

    /// Total size including null (`m + 1`).
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of real arc labels (`m`).
    pub fn real_count(&self) -> usize {
        self.symbols.len() - 1
    }

    pub fn symbol(&self, label: Label) -> &str {
        &self.symbols[label as usize]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, symbol: &str) -> Option<Label> {
        self.symbols.iter().position(|s| s == symbol).map(|i| i as Label)
    }

    pub fn contains(&self, label: Label) -> bool {
        (label as usize) < self.symbols.len()
    }
}

/// Per-cell label probabilities, null included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelDistribution {
    alphabet: LabelAlphabet,
    probs: Vec<f64>,
}

impl LabelDistribution {
    pub fn new(alphabet: LabelAlphabet, probs: Vec<f64>) -> Result<Self> {
        let dist = LabelDistribution { alphabet, probs };
        dist.validate()?;
        Ok(dist)
    }

    /// Uniform over every symbol, null included.
    pub fn uniform(alphabet: LabelAlphabet) -> Self {
        let p = 1.0 / alphabet.len() as f64;
        let probs = vec![p; alphabet.len()];
        LabelDistribution { alphabet, probs }
    }

    /// Binary `{∅, P}` with `P(P) = p`.
    pub fn binary(p: f64) -> Result<Self> {
        Self::new(LabelAlphabet::binary(), vec![1.0 - p, p])
    }

    /// Parses `P:0.5,Q:0.2` style specs; null takes the remaining mass.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut names = Vec::new();
        let mut probs = vec![0.0];
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, p) = part
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("label spec {part:?} is not NAME:PROB")))?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad probability in {part:?}")))?;
            if p.is_nan() || p < 0.0 {
                return Err(Error::invalid(format!("probability {p} is negative")));
            }
            names.push(name.trim().to_string());
            probs.push(p);
        }
        let used: f64 = probs.iter().sum();
        if used > 1.0 + 1e-9 {
            return Err(Error::invalid(format!("probabilities must sum to ≤ 1 (got {used})")));
        }
        probs[0] = (1.0 - used).max(0.0);
        Self::new(LabelAlphabet::new(names)?, probs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.len() != self.alphabet.len() {
            return Err(Error::invalid("distribution length differs from alphabet"));
        }
        if let Some(p) = self.probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("probability {p} out of [0,1]")));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &LabelAlphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Short display form, e.g. `∅:0.5,P:0.5`.
    pub fn describe(&self) -> String {
        self.alphabet
            .symbols()
            .iter()
            .zip(&self.probs)
            .map(|(s, p)| format!("{s}:{p}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}
