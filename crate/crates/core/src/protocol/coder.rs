//! Static binary arithmetic coder over 32-bit integer intervals.

use crate::error::{Error, Result};

const TOP: u64 = 0xffff_ffff;
const HALF: u64 = 1 << 31;
const QUARTER: u64 = 1 << 30;

/// Largest total frequency accepted by the coder.
pub const MAX_TOTAL: u32 = 1 << 16;

/// Cumulative symbol frequencies shared by encoder and decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    freqs: Vec<u32>,
    cum: Vec<u64>,
}

impl FrequencyTable {
    pub fn new(freqs: Vec<u32>) -> Result<Self> {
        let total: u64 = freqs.iter().map(|&f| f as u64).sum();
        if total > MAX_TOTAL as u64 {
            return Err(Error::invalid(format!("frequency total {total} exceeds {MAX_TOTAL}")));
        }
        let mut cum = Vec::with_capacity(freqs.len() + 1);
        cum.push(0);
        for &f in &freqs {
            cum.push(cum.last().unwrap() + f as u64);
        }
        Ok(FrequencyTable { freqs, cum })
    }

    /// Scales raw counts down to at most [`MAX_TOTAL`], keeping every
    /// nonzero count nonzero.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let limit = MAX_TOTAL as u64;
        let mut freqs: Vec<u32> = if total <= limit {
            counts.iter().map(|&c| c as u32).collect()
        } else {
            counts
                .iter()
                .map(|&c| {
                    if c == 0 {
                        0
                    } else {
                        ((c as u128 * limit as u128 / total as u128) as u32).max(1)
                    }
                })
                .collect()
        };
        while freqs.iter().map(|&f| f as u64).sum::<u64>() > limit {
            let i = (0..freqs.len())
                .max_by_key(|&i| (freqs[i], std::cmp::Reverse(i)))
                .unwrap();
            freqs[i] -= 1;
        }
        FrequencyTable::new(freqs).expect("scaled table within limit")
    }

    pub fn freqs(&self) -> &[u32] {
        &self.freqs
    }

    pub fn total(&self) -> u64 {
        *self.cum.last().unwrap()
    }

    fn check(&self, s: usize) -> Result<()> {
        if self.freqs.get(s).copied().unwrap_or(0) == 0 {
            return Err(Error::invalid(format!("symbol {s} has zero frequency")));
        }
        Ok(())
    }
}

struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    fn push(&mut self, bit: bool) {
        if self.bits.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.bits % 8);
        }
        self.bits += 1;
    }

    fn push_with_pending(&mut self, bit: bool, pending: &mut u64) {
        self.push(bit);
        for _ in 0..*pending {
            self.push(!bit);
        }
        *pending = 0;
    }
}

fn narrow(low: u64, high: u64, table: &FrequencyTable, s: usize) -> (u64, u64) {
    let range = high - low + 1;
    let total = table.total();
    (
        low + range * table.cum[s] / total,
        low + range * table.cum[s + 1] / total - 1,
    )
}

/// Encodes `symbols`; returns the byte-padded stream and the exact number of
/// significant bits. Trailing bits the decoder would read as zero are omitted.
pub fn encode(symbols: &[usize], table: &FrequencyTable) -> Result<(Vec<u8>, u64)> {
    let mut out = BitWriter {
        bytes: Vec::new(),
        bits: 0,
    };
    let (mut low, mut high, mut pending) = (0u64, TOP, 0u64);
    for &s in symbols {
        table.check(s)?;
        (low, high) = narrow(low, high, table, s);
        loop {
            if high < HALF {
                out.push_with_pending(false, &mut pending);
            } else if low >= HALF {
                out.push_with_pending(true, &mut pending);
                low -= HALF;
                high -= HALF;
            } else if low >= QUARTER && high < HALF + QUARTER {
                pending += 1;
                low -= QUARTER;
                high -= QUARTER;
            } else {
                break;
            }
            low *= 2;
            high = 2 * high + 1;
        }
    }
    // shortest prefix t with t·000… inside [low, high]
    let min_len = if pending > 0 { 1 } else { 0 };
    let (len, value) = (min_len..=32)
        .find_map(|len| {
            let unit = 1u64 << (32 - len);
            let v = low.div_ceil(unit) * unit;
            (v <= high).then_some((len, v))
        })
        .expect("full-precision value always fits");
    for i in 0..len {
        let bit = value & (HALF >> i) != 0;
        if i == 0 {
            out.push_with_pending(bit, &mut pending);
        } else {
            out.push(bit);
        }
    }
    Ok((out.bytes, out.bits))
}

/// Decodes `count` symbols, reading past the end of `bytes` as zeros.
pub fn decode(bytes: &[u8], count: usize, table: &FrequencyTable) -> Result<Vec<usize>> {
    if count > 0 && table.total() == 0 {
        return Err(Error::invalid("empty frequency table"));
    }
    let bit_at = |i: u64| -> u64 {
        bytes
            .get((i / 8) as usize)
            .map_or(0, |b| ((b >> (7 - i % 8)) & 1) as u64)
    };
    let mut value = 0u64;
    for i in 0..32 {
        value = (value << 1) | bit_at(i);
    }
    let mut next = 32u64;
    let (mut low, mut high) = (0u64, TOP);
    let total = table.total();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let range = high - low + 1;
        let scaled = ((value - low + 1) * total - 1) / range;
        let s = table.cum.partition_point(|&c| c <= scaled) - 1;
        out.push(s);
        (low, high) = narrow(low, high, table, s);
        loop {
            if high < HALF {
            } else if low >= HALF {
                value -= HALF;
                low -= HALF;
                high -= HALF;
            } else if low >= QUARTER && high < HALF + QUARTER {
                value -= QUARTER;
                low -= QUARTER;
                high -= QUARTER;
            } else {
                break;
            }
            low *= 2;
            high = 2 * high + 1;
            value = (value << 1) | bit_at(next);
            next += 1;
        }
    }
    Ok(out)
}
