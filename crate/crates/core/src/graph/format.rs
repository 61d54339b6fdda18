//! Text graph file:
//!
//! ```text
//! n=4
//! alphabet=∅,P
//! seed=7
//! 0 1 P
//! 2 3 P
//! ```
//!
//! One line per non-null unordered cell with `i < j`, in row-major order.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::alphabet::LabelAlphabet;
use super::world::WorldGraph;

pub fn write_graph(g: &WorldGraph) -> String {
    let mut out = String::new();
    writeln!(out, "n={}", g.n()).unwrap();
    writeln!(out, "alphabet={}", g.alphabet().symbols().join(",")).unwrap();
    writeln!(out, "seed={}", g.seed()).unwrap();
    for (i, j, l) in g.arcs() {
        writeln!(out, "{i} {j} {}", g.alphabet().symbol(l)).unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<WorldGraph> {
    let mut offset = 0;
    let mut lines = text.split_inclusive('\n').map(|raw| {
        let start = offset;
        offset += raw.len();
        (start, raw.trim_end_matches(['\n', '\r']))
    });

    let mut header = |key: &str| -> Result<(usize, String)> {
        loop {
            let (at, line) = lines
                .next()
                .ok_or_else(|| Error::parse(text.len(), format!("missing `{key}=` header")))?;
            if line.trim().is_empty() {
                continue;
            }
            let value = line
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| Error::parse(at, format!("expected `{key}=`")))?;
            return Ok((at, value.to_string()));
        }
    };

    let (at, n) = header("n")?;
    let n: usize = n.trim().parse().map_err(|_| Error::parse(at, "bad node count"))?;
    let (at, symbols) = header("alphabet")?;
    let alphabet = LabelAlphabet::from_symbols(symbols.split(',').map(str::to_string).collect())
        .map_err(|e| Error::parse(at, e.to_string()))?;
    let (at, seed) = header("seed")?;
    let seed: u64 = seed.trim().parse().map_err(|_| Error::parse(at, "bad seed"))?;

    let mut g = WorldGraph::empty(n, alphabet).map_err(|e| Error::parse(0, e.to_string()))?;
    for (at, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(i), Some(j), Some(sym), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(at, "expected `i j label`"));
        };
        let i: usize = i.parse().map_err(|_| Error::parse(at, "bad node id"))?;
        let j: usize = j.parse().map_err(|_| Error::parse(at, "bad node id"))?;
        let l = g
            .alphabet()
            .index_of(sym)
            .ok_or_else(|| Error::parse(at, format!("unknown label {sym:?}")))?;
        if l == super::alphabet::NULL {
            return Err(Error::parse(at, "null cells are implicit"));
        }
        g.try_set(i, j, l).map_err(|e| Error::parse(at, e.to_string()))?;
    }
    Ok(g.with_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er_labeled, LabelDistribution};

    #[test]
    fn round_trip() {
        let d = LabelDistribution::parse("P:0.3,Q:0.2").unwrap();
        let g = generate_er_labeled(30, &d, 4).unwrap();
        let text = write_graph(&g);
        assert!(text.starts_with("n=30\nalphabet=∅,P,Q\nseed=4\n"));
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn errors_carry_offsets() {
        let err = parse_graph("n=3\nalphabet=∅,P\nseed=0\n0 1 Q\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                offset: 26,
                message: "unknown label \"Q\"".into()
            }
        );
        assert!(matches!(parse_graph("n=x\n"), Err(Error::Parse { offset: 0, .. })));
        assert!(parse_graph("n=3\nalphabet=∅,P\nseed=0\n1 1 P\n").is_err());
    }
}
