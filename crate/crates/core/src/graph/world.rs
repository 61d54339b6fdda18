use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

use super::alphabet::{Label, LabelAlphabet, NULL};

/// Default upper bound on node count; the adjacency matrix is stored densely.
pub const DEFAULT_MAX_NODES: usize = 4096;

static MAX_NODES: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_NODES);

/// Current node-count cap applied by every constructor.
pub fn max_nodes() -> usize {
    MAX_NODES.load(Ordering::Relaxed)
}

/// Overrides the node-count cap for this process.
pub fn set_max_nodes(cap: usize) {
    MAX_NODES.store(cap.max(2), Ordering::Relaxed);
}

/// Undirected simple labeled graph stored as a symmetric adjacency matrix.
///
/// The diagonal is always null and `adj[i][j] == adj[j][i]`; both hold by
/// construction since the only mutator writes cells in symmetric pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldGraph {
    n: usize,
    alphabet: LabelAlphabet,
    adj: Vec<Label>,
    seed: u64,
}

impl WorldGraph {
    /// All-null graph on `n` nodes.
    pub fn empty(n: usize, alphabet: LabelAlphabet) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one node"));
        }
        if n > max_nodes() {
            return Err(Error::invalid(format!("n = {n} exceeds the node cap {}", max_nodes())));
        }
        Ok(WorldGraph {
            n,
            alphabet,
            adj: vec![NULL; n * n],
            seed: 0,
        })
    }

    /// Builds a graph from undirected arcs `(i, j, label)`.
    pub fn from_arcs(
        n: usize,
        alphabet: LabelAlphabet,
        arcs: impl IntoIterator<Item = (usize, usize, Label)>,
    ) -> Result<Self> {
        let mut g = Self::empty(n, alphabet)?;
        for (i, j, l) in arcs {
            g.try_set(i, j, l)?;
        }
        Ok(g)
    }

    /// Like [`from_arcs`](Self::from_arcs) with labels given by symbol.
    pub fn from_named_arcs(n: usize, alphabet: LabelAlphabet, arcs: &[(usize, usize, &str)]) -> Result<Self> {
        let mut resolved = Vec::with_capacity(arcs.len());
        for &(i, j, name) in arcs {
            let l = alphabet
                .index_of(name)
                .ok_or_else(|| Error::invalid(format!("unknown label {name:?}")))?;
            resolved.push((i, j, l));
        }
        Self::from_arcs(n, alphabet, resolved)
    }

    pub(crate) fn try_set(&mut self, i: usize, j: usize, label: Label) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::invalid(format!("arc ({i}, {j}) outside 0..{}", self.n)));
        }
        if i == j {
            if label != NULL {
                return Err(Error::invalid(format!("self-loop on node {i}")));
            }
            return Ok(());
        }
        if !self.alphabet.contains(label) {
            return Err(Error::invalid(format!("label index {label} outside alphabet")));
        }
        self.set(i, j, label);
        Ok(())
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, label: Label) {
        debug_assert!(i != j || label == NULL);
        self.adj[i * self.n + j] = label;
        self.adj[j * self.n + i] = label;
    }

    pub(crate) fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> &LabelAlphabet {
        &self.alphabet
    }

    /// Seed the graph was generated from (0 for deterministic constructions).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Label {
        self.adj[i * self.n + j]
    }

    /// Row `i` of the adjacency matrix.
    pub fn row(&self, i: usize) -> &[Label] {
        &self.adj[i * self.n..(i + 1) * self.n]
    }

    /// Unordered off-diagonal cells `(i, j, label)` with `i < j`, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    /// Non-null unordered cells.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        self.cells().filter(|&(_, _, l)| l != NULL)
    }

    pub fn arc_count(&self) -> usize {
        self.arcs().count()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().filter(|&&l| l != NULL).count()
    }

    /// Label occurrence counts over the `n(n-1)/2` unordered cells.
    pub fn label_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.alphabet.len()];
        for (_, _, l) in self.cells() {
            counts[l as usize] += 1;
        }
        counts
    }

    pub fn same_shape(&self, other: &WorldGraph) -> bool {
        self.n == other.n && self.alphabet == other.alphabet
    }

    /// Checks the structural invariants; cheap enough for tests.
    pub fn check_invariants(&self) -> bool {
        (0..self.n).all(|i| {
            self.get(i, i) == NULL
                && (0..self.n).all(|j| self.get(i, j) == self.get(j, i) && self.alphabet.contains(self.get(i, j)))
        })
    }
}

/// Optional human-readable names for node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeNames {
    names: Vec<String>,
}

impl NodeNames {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        NodeNames {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn name(&self, id: usize) -> String {
        self.names.get(id).cloned().unwrap_or_else(|| id.to_string())
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}
