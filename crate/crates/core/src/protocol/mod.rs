//! Messages of triples whose endpoints are shared names or descriptions:
//! wire format, size accounting and receiver-side resolution.
//!
//! Wire layout (all integers LEB128 varints):
//!
//! ```text
//! header  "RBD1" version n m_voc K freq[0..m_voc]
//! body    count (ref label ref)*
//! ref     0 id
//!       | 1 base_len ext_len payload_len payload
//! ```
//!
//! `payload` is the arithmetic-coded base and extension symbols under the
//! header's frequency table. A described ref with base length `b` and
//! extension length `r` speaks about anchors `ctx[0..b+r]`.

pub mod coder;
mod varint;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::describe::{
    build_extended_description, Description, DescriptionIndex, LikelihoodTable, SharedContext, Symbol,
};
use crate::error::{Error, Result};
use crate::graph::{Label, WorldGraph, NULL};
use crate::info::JointLabelStats;

pub use coder::{FrequencyTable, MAX_TOTAL};
pub use varint::write_varint;
use varint::Reader;

pub const MAGIC: &[u8; 4] = b"RBD1";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeRef {
    SharedName(usize),
    Described {
        base: Description,
        /// Redundant slots over the anchors following the base ones.
        extension: Description,
    },
}

impl NodeRef {
    pub fn described(base: Description) -> Self {
        NodeRef::Described {
            base,
            extension: Description::default(),
        }
    }

    /// Describes `x` against `ctx[0..base_len + ext_len]`.
    pub fn describe(
        world: &WorldGraph,
        x: usize,
        ctx: &SharedContext,
        depth: usize,
        base_len: usize,
        ext_len: usize,
    ) -> Result<Self> {
        if base_len == 0 || base_len + ext_len > ctx.len() {
            return Err(Error::invalid(format!(
                "base {base_len} + extension {ext_len} must be within 1..={}",
                ctx.len()
            )));
        }
        let mut full = build_extended_description(world, x, &ctx.prefix(base_len + ext_len), depth)?.symbols;
        let extension = full.split_off(base_len);
        Ok(NodeRef::Described {
            base: Description::new(full),
            extension: Description::new(extension),
        })
    }

    /// Base and extension joined.
    pub fn full_description(&self) -> Option<Description> {
        match self {
            NodeRef::SharedName(_) => None,
            NodeRef::Described { base, extension } => Some(Description::new(
                base.symbols.iter().chain(&extension.symbols).copied().collect(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub source: NodeRef,
    pub label: Label,
    pub target: NodeRef,
}

impl Triple {
    pub fn new(source: NodeRef, label: Label, target: NodeRef) -> Self {
        Triple { source, label, target }
    }

    fn refs(&self) -> [&NodeRef; 2] {
        [&self.source, &self.target]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub triples: Vec<Triple>,
}

impl Message {
    pub fn new(triples: Vec<Triple>) -> Self {
        Message { triples }
    }

    fn refs(&self) -> impl Iterator<Item = &NodeRef> {
        self.triples.iter().flat_map(|t| t.refs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireHeader {
    pub n: usize,
    pub m_voc: usize,
    pub k: usize,
    pub freqs: Vec<u32>,
}

/// Size accounting for one encoded message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireStats {
    /// Description symbols at `ceil(log2 m_voc)` bits each.
    pub raw_bits: u64,
    /// Significant arithmetic-coded payload bits, before byte padding.
    pub entropy_coded_bits: u64,
    /// `log2 n` for every ref, as if all names were shared.
    pub baseline_bits: f64,
    /// Coded description bits plus `log2 n` per shared-name ref, over
    /// `baseline_bits`.
    pub overhead_factor: f64,
    pub described_refs: usize,
    pub shared_refs: usize,
    pub wire_bytes: usize,
}

fn symbol_width(m_voc: usize) -> u64 {
    (usize::BITS - (m_voc.max(1) - 1).leading_zeros()) as u64
}

fn check_message(msg: &Message, n: usize, k: usize, m_voc: usize) -> Result<()> {
    if msg.triples.is_empty() {
        return Err(Error::invalid("message has no triples"));
    }
    for t in &msg.triples {
        if t.label == NULL || t.label as usize >= m_voc {
            return Err(Error::invalid(format!("label {} is not an arc label", t.label)));
        }
        for r in t.refs() {
            match r {
                NodeRef::SharedName(id) if *id >= n => {
                    return Err(Error::invalid(format!("shared name {id} outside 0..{n}")))
                }
                NodeRef::SharedName(_) => {}
                NodeRef::Described { base, extension } => {
                    if base.is_empty() {
                        return Err(Error::invalid(
                            "cannot reference an unnamed node with an empty description",
                        ));
                    }
                    if base.len() + extension.len() > k {
                        return Err(Error::invalid(format!(
                            "description of {} symbols exceeds the {k} shared anchors",
                            base.len() + extension.len()
                        )));
                    }
                    if let Some(s) = base
                        .symbols
                        .iter()
                        .chain(&extension.symbols)
                        .find(|&&s| s as usize >= m_voc)
                    {
                        return Err(Error::invalid(format!("unknown symbol {s} (vocabulary has {m_voc})")));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Serializes `msg` for a world of `n` nodes with anchors `ctx` and a
/// vocabulary of `m_voc` symbols.
pub fn encode_message(msg: &Message, n: usize, ctx: &SharedContext, m_voc: usize) -> Result<(Vec<u8>, WireStats)> {
    if m_voc < 2 || m_voc > Symbol::MAX as usize + 1 {
        return Err(Error::invalid(format!("vocabulary size {m_voc} out of range")));
    }
    if let Some(&s) = ctx.nodes().iter().find(|&&s| s >= n) {
        return Err(Error::invalid(format!("shared node {s} outside 0..{n}")));
    }
    let k = ctx.len();
    check_message(msg, n, k, m_voc)?;

    let mut counts = vec![0u64; m_voc];
    for d in msg.refs().filter_map(NodeRef::full_description) {
        for s in d.symbols {
            counts[s as usize] += 1;
        }
    }
    let table = FrequencyTable::from_counts(&counts);

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    for v in [n, m_voc, k] {
        write_varint(&mut out, v as u64);
    }
    for &f in table.freqs() {
        write_varint(&mut out, f as u64);
    }
    write_varint(&mut out, msg.triples.len() as u64);

    let (mut raw_bits, mut coded_bits, mut described, mut shared) = (0u64, 0u64, 0usize, 0usize);
    let mut write_ref = |out: &mut Vec<u8>, r: &NodeRef| -> Result<()> {
        match r {
            NodeRef::SharedName(id) => {
                shared += 1;
                out.push(0);
                write_varint(out, *id as u64);
            }
            NodeRef::Described { base, extension } => {
                described += 1;
                let symbols: Vec<usize> = base
                    .symbols
                    .iter()
                    .chain(&extension.symbols)
                    .map(|&s| s as usize)
                    .collect();
                let (payload, bits) = coder::encode(&symbols, &table)?;
                raw_bits += symbols.len() as u64 * symbol_width(m_voc);
                coded_bits += bits;
                out.push(1);
                write_varint(out, base.len() as u64);
                write_varint(out, extension.len() as u64);
                write_varint(out, payload.len() as u64);
                out.extend_from_slice(&payload);
            }
        }
        Ok(())
    };
    for t in &msg.triples {
        write_ref(&mut out, &t.source)?;
        write_varint(&mut out, t.label as u64);
        write_ref(&mut out, &t.target)?;
    }

    let name_bits = (n.max(1) as f64).log2();
    let baseline_bits = (described + shared) as f64 * name_bits;
    let overhead_factor = if baseline_bits > 0.0 {
        (coded_bits as f64 + shared as f64 * name_bits) / baseline_bits
    } else {
        0.0
    };
    let stats = WireStats {
        raw_bits,
        entropy_coded_bits: coded_bits,
        baseline_bits,
        overhead_factor,
        described_refs: described,
        shared_refs: shared,
        wire_bytes: out.len(),
    };
    Ok((out, stats))
}

/// Parses a message produced by [`encode_message`].
pub fn decode_message(bytes: &[u8]) -> Result<Message> {
    decode_wire(bytes).map(|(_, m)| m)
}

/// Parses header and message.
pub fn decode_wire(bytes: &[u8]) -> Result<(WireHeader, Message)> {
    let mut r = Reader::new(bytes);
    let magic = r.take(4, "magic")?;
    if magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:02x?}")));
    }
    let version = r.byte("version")?;
    if version != VERSION {
        return Err(Error::Format(format!("version {version}, expected {VERSION}")));
    }
    let limit = bytes.len() as u64 * 8 + 64;
    let n = r.bounded(u32::MAX as u64, "n")?;
    let m_voc_at = r.pos();
    let m_voc = r.bounded(Symbol::MAX as u64 + 1, "vocabulary size")?;
    if m_voc < 2 {
        return Err(Error::parse(m_voc_at, "vocabulary size below 2"));
    }
    let k = r.bounded(u32::MAX as u64, "K")?;
    let table_at = r.pos();
    let mut freqs = Vec::with_capacity(m_voc.min(r.remaining()));
    for _ in 0..m_voc {
        freqs.push(r.bounded(MAX_TOTAL as u64, "frequency")? as u32);
    }
    let table = FrequencyTable::new(freqs).map_err(|e| Error::parse(table_at, e.to_string()))?;
    let count_at = r.pos();
    let count = r.bounded(limit, "triple count")?;
    if count == 0 {
        return Err(Error::parse(count_at, "message has no triples"));
    }

    let read_ref = |r: &mut Reader| -> Result<NodeRef> {
        let at = r.pos();
        match r.byte("ref tag")? {
            0 => {
                let id_at = r.pos();
                let id = r.bounded(u32::MAX as u64, "node id")?;
                if id >= n {
                    return Err(Error::parse(id_at, format!("shared name {id} outside 0..{n}")));
                }
                Ok(NodeRef::SharedName(id))
            }
            1 => {
                let len_at = r.pos();
                let base = r.bounded(k as u64, "base length")?;
                let ext = r.bounded(k as u64, "extension length")?;
                if base == 0 || base + ext > k {
                    return Err(Error::parse(len_at, format!("lengths {base}+{ext} invalid for K={k}")));
                }
                let plen = r.bounded(limit, "payload length")?;
                let payload_at = r.pos();
                let payload = r.take(plen, "payload")?;
                let symbols =
                    coder::decode(payload, base + ext, &table).map_err(|e| Error::parse(payload_at, e.to_string()))?;
                let mut base_syms: Vec<Symbol> = symbols.into_iter().map(|s| s as Symbol).collect();
                let ext_syms = base_syms.split_off(base);
                Ok(NodeRef::Described {
                    base: Description::new(base_syms),
                    extension: Description::new(ext_syms),
                })
            }
            t => Err(Error::parse(at, format!("unknown ref tag {t}"))),
        }
    };

    let mut triples = Vec::with_capacity(count.min(r.remaining()));
    for _ in 0..count {
        let source = read_ref(&mut r)?;
        let label_at = r.pos();
        let label = r.bounded(m_voc as u64 - 1, "label")?;
        if label == NULL as usize {
            return Err(Error::parse(label_at, "null is not an arc label"));
        }
        let target = read_ref(&mut r)?;
        triples.push(Triple::new(source, label as Label, target));
    }
    if r.remaining() > 0 {
        return Err(Error::parse(r.pos(), format!("{} trailing bytes", r.remaining())));
    }
    let freqs = table.freqs().to_vec();
    Ok((WireHeader { n, m_voc, k, freqs }, Message::new(triples)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    /// Shared name, or exactly one node matches the description.
    Exact,
    /// Unique maximum-likelihood winner.
    Ml,
    /// Several nodes score equally; the smallest id is reported.
    Ambiguous,
    Failed,
}

impl Confidence {
    pub fn name(self) -> &'static str {
        match self {
            Confidence::Exact => "exact",
            Confidence::Ml => "ml",
            Confidence::Ambiguous => "ambiguous",
            Confidence::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub node: Option<usize>,
    pub flag: Confidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedTriple {
    pub triple: Triple,
    pub source: Resolution,
    pub target: Resolution,
}

/// Resolves every ref of `msg` in the receiver's `view`.
///
/// Descriptions are matched exactly first; when that does not give a single
/// node and `stats` is present, maximum likelihood decides. Per-ref problems
/// are reported through [`Confidence`]; only an inconsistent `view`, `ctx`
/// or `depth` is an error.
pub fn resolve_message(
    msg: &Message,
    view: &WorldGraph,
    ctx: &SharedContext,
    depth: usize,
    stats: Option<&JointLabelStats>,
) -> Result<Vec<ResolvedTriple>> {
    if let Some(&s) = ctx.nodes().iter().find(|&&s| s >= view.n()) {
        return Err(Error::invalid(format!("shared node {s} outside 0..{}", view.n())));
    }
    crate::describe::vocab::check_depth(depth)?;
    let table = stats.and_then(|s| LikelihoodTable::from_stats(s).ok());
    let mut indexes: HashMap<usize, DescriptionIndex> = HashMap::new();
    let mut resolve = |r: &NodeRef| -> Result<Resolution> {
        let failed = Resolution {
            node: None,
            flag: Confidence::Failed,
        };
        let desc = match r {
            NodeRef::SharedName(id) if *id < view.n() => {
                return Ok(Resolution {
                    node: Some(*id),
                    flag: Confidence::Exact,
                })
            }
            NodeRef::SharedName(_) => return Ok(failed),
            NodeRef::Described { .. } => r.full_description().unwrap(),
        };
        if desc.len() > ctx.len() || desc.is_empty() {
            return Ok(failed);
        }
        let index = match indexes.entry(desc.len()) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(DescriptionIndex::build(view, &ctx.prefix(desc.len()), depth)?)
            }
        };
        let exact = index.exact(&desc)?;
        if exact.len() == 1 {
            return Ok(Resolution {
                node: Some(exact[0]),
                flag: Confidence::Exact,
            });
        }
        let Some(table) = &table else {
            return Ok(match exact.first() {
                Some(&x) => Resolution {
                    node: Some(x),
                    flag: Confidence::Ambiguous,
                },
                None => failed,
            });
        };
        Ok(match index.max_likelihood(&desc, table) {
            Ok(Some(d)) if d.ambiguous => Resolution {
                node: Some(d.node),
                flag: Confidence::Ambiguous,
            },
            Ok(Some(d)) => Resolution {
                node: Some(d.node),
                flag: Confidence::Ml,
            },
            _ => failed,
        })
    };
    msg.triples
        .iter()
        .map(|t| {
            Ok(ResolvedTriple {
                triple: t.clone(),
                source: resolve(&t.source)?,
                target: resolve(&t.target)?,
            })
        })
        .collect()
}

/// Predicted sizes when each description is just long enough to single out
/// one of `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadPrediction {
    /// `2·log2(m_voc)·log2(n)/h_d` symbols per description.
    pub description_symbols: f64,
    /// Two descriptions at `ceil(log2 m_voc)` bits per symbol.
    pub raw_bits: f64,
    /// `4·log2(m_voc)·log2(n)`: two descriptions, entropy coded.
    pub entropy_coded_bits: f64,
    /// `2·log2(n)`: both endpoints by name.
    pub baseline_bits: f64,
    /// `2·log2(m_voc)`.
    pub overhead_factor: f64,
}

pub fn measure_overhead(n: usize, m_voc: usize, h_d: f64) -> Result<OverheadPrediction> {
    if n < 2 || m_voc < 2 || !h_d.is_finite() || h_d <= 0.0 {
        return Err(Error::invalid(format!(
            "need n ≥ 2, m_voc ≥ 2, h_d > 0 (got {n}, {m_voc}, {h_d})"
        )));
    }
    let log_n = (n as f64).log2();
    let log_m = (m_voc as f64).log2();
    let description_symbols = 2.0 * log_m * log_n / h_d;
    Ok(OverheadPrediction {
        description_symbols,
        raw_bits: 2.0 * description_symbols * symbol_width(m_voc) as f64,
        entropy_coded_bits: 4.0 * log_m * log_n,
        baseline_bits: 2.0 * log_n,
        overhead_factor: 2.0 * log_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn described(symbols: &[Symbol]) -> NodeRef {
        NodeRef::described(Description::new(symbols.to_vec()))
    }

    #[test]
    fn shared_only_message() {
        let ctx = SharedContext::new((0..10).collect(), 1024).unwrap();
        let msg = Message::new(vec![Triple::new(NodeRef::SharedName(3), 1, NodeRef::SharedName(700))]);
        let (bytes, stats) = encode_message(&msg, 1024, &ctx, 2).unwrap();
        assert_eq!(stats.baseline_bits, 20.0);
        assert_eq!(stats.overhead_factor, 1.0);
        assert_eq!(stats.entropy_coded_bits, 0);
        assert_eq!(&bytes[..5], b"RBD1\x01");
        assert_eq!(decode_message(&bytes).unwrap(), msg);
    }

    #[test]
    fn described_round_trip() {
        let ctx = SharedContext::new((0..6).collect(), 40).unwrap();
        let msg = Message::new(vec![
            Triple::new(described(&[1, 0, 1, 1]), 1, NodeRef::SharedName(5)),
            Triple::new(
                NodeRef::Described {
                    base: Description::new(vec![0, 0, 2]),
                    extension: Description::new(vec![1, 2, 0]),
                },
                2,
                described(&[2, 2, 2, 2, 2, 2]),
            ),
        ]);
        let (bytes, stats) = encode_message(&msg, 40, &ctx, 3).unwrap();
        assert_eq!(decode_message(&bytes).unwrap(), msg);
        assert_eq!(stats.described_refs, 3);
        assert_eq!(stats.raw_bits, 16 * 2);
        let (again, _) = encode_message(&msg, 40, &ctx, 3).unwrap();
        assert_eq!(bytes, again);
    }

    #[test]
    fn rejects_bad_messages() {
        let ctx = SharedContext::new(vec![0, 1], 8).unwrap();
        let empty = Message::new(vec![Triple::new(described(&[]), 1, NodeRef::SharedName(0))]);
        assert!(encode_message(&empty, 8, &ctx, 2).is_err());
        let unknown = Message::new(vec![Triple::new(described(&[1, 5]), 1, NodeRef::SharedName(0))]);
        assert!(encode_message(&unknown, 8, &ctx, 2).is_err());
        assert!(encode_message(&Message::new(vec![]), 8, &ctx, 2).is_err());
        let too_long = Message::new(vec![Triple::new(described(&[1, 1, 1]), 1, NodeRef::SharedName(0))]);
        assert!(encode_message(&too_long, 8, &ctx, 2).is_err());
    }

    #[test]
    fn malformed_streams() {
        let ctx = SharedContext::new(vec![0, 1], 8).unwrap();
        let msg = Message::new(vec![Triple::new(described(&[1, 0]), 1, NodeRef::SharedName(0))]);
        let (bytes, _) = encode_message(&msg, 8, &ctx, 2).unwrap();
        for cut in 0..bytes.len() {
            assert!(matches!(
                decode_message(&bytes[..cut]),
                Err(Error::Parse { .. }) | Err(Error::Format(_))
            ));
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_message(&bad), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(decode_message(&bad), Err(Error::Format(_))));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(decode_message(&long), Err(Error::Parse { .. })));
    }

    #[test]
    fn overhead_prediction() {
        let p = measure_overhead(1024, 2, 1.0).unwrap();
        assert_eq!((p.entropy_coded_bits, p.overhead_factor), (40.0, 2.0));
        assert_eq!(measure_overhead(1024, 4, 2.0).unwrap().overhead_factor, 4.0);
        assert!(measure_overhead(1024, 2, 0.0).is_err());
    }
}
