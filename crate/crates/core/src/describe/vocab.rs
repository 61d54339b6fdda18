//! The enlarged description vocabulary for depth-`d` descriptions.
//!
//! Symbols are ranked in one agreed total order:
//!
//! 1. the null label, then the direct labels in alphabet order;
//! 2. path codes with 1 intermediate node, then 2, up to `d`;
//! 3. within one length, canonical label sequences lexicographically.
//!
//! A path code is the label sequence along a simple path between the
//! described node and a shared node. A path and its reversal are the same
//! connecting structure, so the canonical sequence is the lexicographically
//! smaller of the two readings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Label, LabelAlphabet, NULL};

/// Index of a symbol in a [`Vocabulary`]; labels keep their alphabet index.
pub type Symbol = Label;

/// Largest supported number of intermediate nodes.
pub const MAX_DEPTH: usize = 3;

/// A canonical connecting-structure code and its rank in the total order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntermediateGraphCode {
    pub rank: Symbol,
    /// Canonical arc labels along the path; `labels.len() - 1` intermediates.
    pub labels: Vec<Label>,
}

impl IntermediateGraphCode {
    pub fn intermediates(&self) -> usize {
        self.labels.len() - 1
    }
}

/// What a vocabulary symbol stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolKind<'a> {
    Null,
    Direct(Label),
    Path(&'a [Label]),
}

/// Canonical orientation of a path label sequence.
pub fn canonical_path(labels: &[Label]) -> Vec<Label> {
    let rev: Vec<Label> = labels.iter().rev().copied().collect();
    if rev.as_slice() < labels {
        rev
    } else {
        labels.to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    alphabet: LabelAlphabet,
    depth: usize,
    paths: Vec<Vec<Label>>,
    ranks: HashMap<Vec<Label>, Symbol>,
}

impl Vocabulary {
    pub fn new(alphabet: &LabelAlphabet, depth: usize) -> Result<Self> {
        check_depth(depth)?;
        let m = alphabet.real_count();
        let mut paths = Vec::new();
        for edges in 2..=depth + 1 {
            let total = m
                .checked_pow(edges as u32)
                .filter(|&t| t <= Symbol::MAX as usize)
                .ok_or_else(|| Error::invalid("vocabulary too large for this alphabet and depth"))?;
            for mut code in 0..total {
                let mut seq = vec![0 as Label; edges];
                for slot in seq.iter_mut().rev() {
                    *slot = (code % m + 1) as Label;
                    code /= m;
                }
                if canonical_path(&seq) == seq {
                    paths.push(seq);
                }
            }
        }
        let base = alphabet.len();
        if base + paths.len() > Symbol::MAX as usize + 1 {
            return Err(Error::invalid("vocabulary too large for this alphabet and depth"));
        }
        let ranks = paths
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), (base + i) as Symbol))
            .collect();
        Ok(Vocabulary {
            alphabet: alphabet.clone(),
            depth,
            paths,
            ranks,
        })
    }

    pub fn alphabet(&self) -> &LabelAlphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of symbols (`m_voc`).
    pub fn len(&self) -> usize {
        self.alphabet.len() + self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Symbol for a path label sequence (either orientation).
    pub fn path_symbol(&self, labels: &[Label]) -> Option<Symbol> {
        self.ranks.get(&canonical_path(labels)).copied()
    }

    pub fn kind(&self, s: Symbol) -> SymbolKind<'_> {
        let base = self.alphabet.len();
        match s as usize {
            0 => SymbolKind::Null,
            i if i < base => SymbolKind::Direct(s),
            i => SymbolKind::Path(&self.paths[i - base]),
        }
    }

    pub fn code(&self, s: Symbol) -> Option<IntermediateGraphCode> {
        match self.kind(s) {
            SymbolKind::Path(labels) => Some(IntermediateGraphCode {
                rank: s,
                labels: labels.to_vec(),
            }),
            _ => None,
        }
    }

    /// Display form: `∅`, a label name, or `[p:P.Q]` for a path code.
    pub fn render(&self, s: Symbol) -> String {
        match self.kind(s) {
            SymbolKind::Null => self.alphabet.symbol(NULL).to_string(),
            SymbolKind::Direct(l) => self.alphabet.symbol(l).to_string(),
            SymbolKind::Path(labels) => {
                let inner: Vec<&str> = labels.iter().map(|&l| self.alphabet.symbol(l)).collect();
                format!("[p:{}]", inner.join("."))
            }
        }
    }

    /// Every symbol's display form, in rank order.
    pub fn rendered_symbols(&self) -> Vec<String> {
        (0..self.len()).map(|s| self.render(s as Symbol)).collect()
    }

    /// The vocabulary as a label alphabet (for depth-rewritten graphs).
    pub fn as_alphabet(&self) -> LabelAlphabet {
        LabelAlphabet::from_symbols(self.rendered_symbols()).expect("rendered symbols are distinct")
    }
}

pub(crate) fn check_depth(depth: usize) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::invalid(format!(
            "depth {depth} exceeds the supported maximum of {MAX_DEPTH}"
        )));
    }
    Ok(())
}
