//! Incremental per-K statistics over nested shared prefixes.

use std::collections::HashMap;

use crate::describe::{LikelihoodTable, Symbol, TIE_TOLERANCE};

/// Description-equivalence statistics at one prefix length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct PrefixStats {
    /// Colliding pairs among all nodes, shared ones included.
    pub collisions: u64,
    /// Colliding pairs among unshared nodes.
    pub unshared_collisions: u64,
    /// Unshared nodes whose description another unshared node also has.
    pub unresolved: usize,
    /// Promotions to shared needed to make every remaining description
    /// unique: one less than each colliding group.
    pub promotions: usize,
}

fn pairs(c: u64) -> u64 {
    c * c.saturating_sub(1) / 2
}

/// Stats for every prefix length `0..=columns.len()`; `columns[i][x]` is
/// the slot symbol of `x` against `order[i]`.
pub(crate) fn partition_curve(columns: &[Vec<Symbol>], order: &[usize], n: usize) -> Vec<PrefixStats> {
    let mut class = vec![0u32; n];
    let mut classes = 1usize;
    let mut shared = vec![false; n];
    let mut curve = Vec::with_capacity(columns.len() + 1);
    let mut all = Vec::new();
    let mut unshared = Vec::new();
    let mut ids: HashMap<(u32, Symbol), u32> = HashMap::with_capacity(n);
    for k in 0..=columns.len() {
        if k > 0 {
            shared[order[k - 1]] = true;
            ids.clear();
            for (x, c) in class.iter_mut().enumerate() {
                let next = ids.len() as u32;
                *c = *ids.entry((*c, columns[k - 1][x])).or_insert(next);
            }
            classes = ids.len();
        }
        all.clear();
        all.resize(classes, 0u64);
        unshared.clear();
        unshared.resize(classes, 0u64);
        for x in 0..n {
            all[class[x] as usize] += 1;
            if !shared[x] {
                unshared[class[x] as usize] += 1;
            }
        }
        let mut s = PrefixStats::default();
        for (&a, &u) in all.iter().zip(&unshared) {
            s.collisions += pairs(a);
            s.unshared_collisions += pairs(u);
            if u >= 2 {
                s.unresolved += u as usize;
                s.promotions += u as usize - 1;
            }
        }
        curve.push(s);
    }
    curve
}

/// Per-symbol entropy of the descriptions of unshared nodes at prefix `k`.
pub(crate) fn pooled_entropy(columns: &[Vec<Symbol>], order: &[usize], k: usize, n: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let mut shared = vec![false; n];
    for &s in &order[..k] {
        shared[s] = true;
    }
    let mut hist: HashMap<Symbol, u64> = HashMap::new();
    for col in &columns[..k] {
        for x in (0..n).filter(|&x| !shared[x]) {
            *hist.entry(col[x]).or_default() += 1;
        }
    }
    let mut counts: Vec<u64> = hist.into_values().collect();
    counts.sort_unstable();
    crate::info::entropy_of_counts(counts)
}

/// Correct decodes of every unshared node at each requested prefix length,
/// following the receiver-side rule: a unique exact match wins, otherwise
/// the unique maximum-likelihood candidate, otherwise the ref is ambiguous
/// and counted as wrong.
pub(crate) fn noisy_curve(
    sender: &[Vec<Symbol>],
    receiver: &[Vec<Symbol>],
    order: &[usize],
    n: usize,
    table: &LikelihoodTable,
    lengths: &[usize],
) -> Vec<usize> {
    let m = table.dimension();
    let log_p: Vec<f64> = (0..m * m)
        .map(|i| table.log_p((i / m) as Symbol, (i % m) as Symbol))
        .collect();
    let mut score = vec![0.0f64; n * n];
    let mut impossible = vec![0u16; n * n];
    let mut mismatch = vec![0u16; n * n];
    let mut shared = vec![false; n];
    let mut out = Vec::with_capacity(lengths.len());
    let mut done = 0;
    for &len in lengths {
        while done < len {
            let (s_col, r_col) = (&sender[done], &receiver[done]);
            for (x, &s) in s_col.iter().enumerate() {
                let base = s as usize * m;
                let row = x * n;
                for y in 0..n {
                    let r = r_col[y] as usize;
                    let lp = log_p[base + r];
                    if lp == f64::NEG_INFINITY {
                        impossible[row + y] += 1;
                    } else {
                        score[row + y] += lp;
                    }
                    mismatch[row + y] += (base / m != r) as u16;
                }
            }
            shared[order[done]] = true;
            done += 1;
        }
        let mut correct = 0;
        for x in (0..n).filter(|&x| !shared[x]) {
            let row = x * n;
            let candidates = || (0..n).filter(|&y| !shared[y]);
            let mut exact = candidates().filter(|&y| mismatch[row + y] == 0);
            if let (Some(y), None) = (exact.next(), exact.next()) {
                correct += (y == x) as usize;
                continue;
            }
            let raw = |y: usize| {
                if impossible[row + y] > 0 {
                    f64::NEG_INFINITY
                } else {
                    score[row + y]
                }
            };
            let (mut best, mut second) = rank(candidates().map(|y| (y, raw(y))));
            if best.1 == f64::NEG_INFINITY {
                let smoothed = |y: usize| -> f64 {
                    (0..len)
                        .map(|i| table.smoothed_log_p(sender[i][x], receiver[i][y]))
                        .sum()
                };
                (best, second) = rank(candidates().map(|y| (y, smoothed(y))));
            }
            let tied = best.1 == second || (best.1.is_finite() && best.1 - second <= TIE_TOLERANCE);
            correct += (!tied && best.0 == x) as usize;
        }
        out.push(correct);
    }
    out
}

fn rank(scores: impl Iterator<Item = (usize, f64)>) -> ((usize, f64), f64) {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    let mut second = f64::NEG_INFINITY;
    for (y, s) in scores {
        if best.0 == usize::MAX || s > best.1 {
            if best.0 != usize::MAX {
                second = best.1;
            }
            best = (y, s);
        } else if s > second {
            second = s;
        }
    }
    (best, second)
}
