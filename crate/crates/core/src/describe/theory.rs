use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest truncation point summed term by term in
/// [`extended_description_entropy`]; beyond it the closed form is used.
pub const DIRECT_SUM_LIMIT: u64 = 1 << 20;

/// Relative slack when rounding `g·log2(n)/bits` up, so exact quotients such
/// as `2·10/1` are not pushed to the next integer by rounding error.
const CEIL_SLACK: f64 = 1e-12;

/// Predicted number of shared names and the collisions expected there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPrediction<T> {
    pub n: usize,
    /// Bits per description symbol (`H_D` for identical views, `M_D` otherwise).
    pub h_or_m: T,
    pub g: T,
    pub k_star: usize,
    /// Collisions expected at `k_star`.
    pub expected_collisions: T,
}

impl<T: Scalar> ThresholdPrediction<T> {
    /// Expected collisions at some other `k` with the same `n` and bits.
    pub fn collisions_at(&self, k: usize) -> T {
        expected_collisions(self.n, self.h_or_m, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SharingRequirement<T> {
    Partial(ThresholdPrediction<T>),
    /// Descriptions carry no information: every name must be shared.
    ShareAll {
        n: usize,
    },
}

impl<T: Scalar> SharingRequirement<T> {
    /// Names to share; `n` in the share-all case.
    pub fn k(&self) -> usize {
        match self {
            SharingRequirement::Partial(p) => p.k_star,
            SharingRequirement::ShareAll { n } => *n,
        }
    }

    pub fn prediction(&self) -> Option<&ThresholdPrediction<T>> {
        match self {
            SharingRequirement::Partial(p) => Some(p),
            SharingRequirement::ShareAll { .. } => None,
        }
    }
}

fn check_finite<T: Scalar>(name: &str, v: T) -> Result<()> {
    if !v.is_finite() || v < T::zero() {
        return Err(Error::invalid(format!("{name} must be finite and ≥ 0 (got {v})")));
    }
    Ok(())
}

/// `C = n² / 2^(bits·k + 1)`, evaluated in log space.
pub fn expected_collisions<T: Scalar>(n: usize, bits: T, k: usize) -> T {
    let two = T::two();
    let exponent = two * T::of(n).log2() - bits * T::of(k) - T::one();
    two.powf(exponent)
}

/// `k* = ceil(g·log2(n)/bits)` shared names.
pub fn min_shared_names<T: Scalar>(n: usize, bits_per_symbol: T, g: T) -> Result<SharingRequirement<T>> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 nodes (got {n})")));
    }
    check_finite("bits per symbol", bits_per_symbol)?;
    check_finite("g", g)?;
    if g == T::zero() {
        return Err(Error::invalid("g must be positive"));
    }
    if bits_per_symbol == T::zero() {
        return Ok(SharingRequirement::ShareAll { n });
    }
    let exact = g * T::of(n).log2() / bits_per_symbol;
    let slack = exact * T::of(CEIL_SLACK);
    let k_star = (exact - slack)
        .ceil()
        .to_usize()
        .ok_or_else(|| Error::invalid("k* overflows"))?;
    Ok(SharingRequirement::Partial(ThresholdPrediction {
        n,
        h_or_m: bits_per_symbol,
        g,
        k_star,
        expected_collisions: expected_collisions(n, bits_per_symbol, k_star),
    }))
}

fn log2_binomial(n: usize, d: usize) -> f64 {
    let d = d.min(n - d);
    (0..d).map(|i| ((n - i) as f64 / (i + 1) as f64).log2()).sum()
}

/// `H_D` for depth `d` in a world of `n` nodes and per-cell entropy `h_g`.
///
/// The occurrence probability of a connecting structure is
/// `P = 1 - (1 - 2^(-h_g·d²))^C(n,d)`, and the preference-ordered structures
/// `j = 1..=floor(2^(h_g·d²))` are used with probability `P(1-P)^(j-1)`.
/// For `d == n` this is `h_g·n²` exactly.
pub fn extended_description_entropy<T: Scalar>(h_g: T, d: usize, n: usize) -> Result<T> {
    check_finite("h_g", h_g)?;
    if d == 0 || n < d {
        return Err(Error::invalid(format!("need 1 ≤ d ≤ n (got d={d}, n={n})")));
    }
    if d == n {
        return Ok(h_g * T::of(n) * T::of(n));
    }
    let h = h_g.to_f64().unwrap();
    let a = h * (d as f64) * (d as f64);
    // ln q = C(n,d) · ln(1 - 2^-a), kept in log space
    let per_trial = -(-(2f64.powf(-a))).ln_1p();
    let ln_q = -(log2_binomial(n, d) * std::f64::consts::LN_2 + per_trial.ln()).exp();
    let p = -ln_q.exp_m1();
    if p >= 1.0 {
        return Ok(T::zero());
    }
    let log2_p = p.log2();
    let log2_q = ln_q / std::f64::consts::LN_2;
    let terms = if a >= 64.0 {
        2f64.powf(a)
    } else {
        (2f64.powf(a).floor()).max(1.0)
    };
    let h_d = if terms <= DIRECT_SUM_LIMIT as f64 {
        (0..terms as u64)
            .map(|i| {
                let lp = log2_p + i as f64 * log2_q;
                -(lp.exp2()) * lp
            })
            .sum()
    } else {
        truncated_geometric_entropy(p, ln_q, terms)
    };
    Ok(T::of(h_d))
}

/// Closed-form entropy of `p_j = P q^(j-1)`, `j = 1..=J`.
fn truncated_geometric_entropy(p: f64, ln_q: f64, j: f64) -> f64 {
    let log2_p = p.log2();
    let log2_q = ln_q / std::f64::consts::LN_2;
    let mass = -(j * ln_q).exp_m1();
    // Σ_{i<J} i q^i, with a series when J·|ln q| is small
    let weighted = if j * ln_q.abs() < 1e-3 {
        let s1 = j * (j - 1.0) / 2.0;
        let s2 = (j - 1.0) * j * (2.0 * j - 1.0) / 6.0;
        let s3 = s1 * s1;
        p * (s1 + ln_q * s2 + ln_q * ln_q / 2.0 * s3)
    } else {
        let q = ln_q.exp();
        let q_j1 = ((j - 1.0) * ln_q).exp();
        q * (mass - j * q_j1 * p) / p
    };
    -log2_p * mass - log2_q * weighted
}

/// Minimum description length and information content needed to single out
/// one of `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBounds<T> {
    /// `2·log2(n)/m_d` symbols.
    pub symbols: T,
    /// `2·log2(n)·h_d/m_d` bits.
    pub bits: T,
}

/// Identical views are the case `m_d == h_d`.
pub fn description_length_bounds<T: Scalar>(n: usize, h_d: T, m_d: T) -> Result<LengthBounds<T>> {
    check_finite("h_d", h_d)?;
    if !m_d.is_finite() || m_d <= T::zero() {
        return Err(Error::invalid(format!("m_d must be positive (got {m_d})")));
    }
    if m_d > h_d * (T::one() + T::of(1e-9)) {
        return Err(Error::invalid(format!("m_d ({m_d}) cannot exceed h_d ({h_d})")));
    }
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 nodes (got {n})")));
    }
    let names = T::two() * T::of(n).log2();
    Ok(LengthBounds {
        symbols: names / m_d,
        bits: names * h_d / m_d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Identifiability {
    Identifiable,
    NotIdentifiable,
    /// Within one bit of the bound.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentifiabilityReport<T> {
    pub verdict: Identifiability,
    /// Revealed bits minus the bound.
    pub margin: T,
    pub bound: T,
}

/// Compares revealed information about an entity with the content needed to
/// identify it. With `m_d == 0` nothing identifies.
pub fn identifiability_report<T: Scalar>(revealed: T, n: usize, h_d: T, m_d: T) -> Result<IdentifiabilityReport<T>> {
    check_finite("revealed bits", revealed)?;
    check_finite("h_d", h_d)?;
    check_finite("m_d", m_d)?;
    let bound = if m_d == T::zero() {
        T::infinity()
    } else {
        description_length_bounds(n, h_d, m_d)?.bits
    };
    let margin = revealed - bound;
    let verdict = if margin.abs() <= T::one() {
        Identifiability::Marginal
    } else if margin > T::zero() {
        Identifiability::Identifiable
    } else {
        Identifiability::NotIdentifiable
    };
    Ok(IdentifiabilityReport { verdict, margin, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        let r = min_shared_names(1024, 1.0f64, 2.0).unwrap();
        let p = r.prediction().unwrap();
        assert_eq!(p.k_star, 20);
        assert_eq!(p.expected_collisions, 0.5);
        assert_eq!(min_shared_names(1024, 2.0f64, 2.0).unwrap().k(), 10);
        assert_eq!(
            min_shared_names(1024, 0.0f32, 2.0).unwrap(),
            SharingRequirement::ShareAll { n: 1024 }
        );
        assert_eq!(min_shared_names(1024, 1.0f32, 2.0).unwrap().k(), 20);
        assert!(min_shared_names(1, 1.0f64, 2.0).is_err());
        assert!(min_shared_names(8, -1.0f64, 2.0).is_err());
    }

    #[test]
    fn collisions_formula() {
        assert_eq!(expected_collisions(256, 1.0f64, 16), 0.5);
        assert_eq!(expected_collisions(256, 1.0f64, 8), 128.0);
    }

    #[test]
    fn full_depth_limit() {
        assert_eq!(extended_description_entropy(0.5f64, 4, 4).unwrap(), 8.0);
        assert_eq!(extended_description_entropy(0.0f64, 2, 10).unwrap(), 0.0);
        assert!(extended_description_entropy(1.0f64, 0, 4).is_err());
        assert!(extended_description_entropy(1.0f64, 5, 4).is_err());
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        for &(p, j) in &[(0.3f64, 50.0f64), (1e-4, 2000.0), (1e-7, 300.0), (0.9, 7.0)] {
            let ln_q = (-p).ln_1p();
            let direct: f64 = (0..j as u64)
                .map(|i| {
                    let pj = p * (1.0 - p).powi(i as i32);
                    -pj * pj.log2()
                })
                .sum();
            let closed = truncated_geometric_entropy(p, ln_q, j);
            assert!(
                (direct - closed).abs() < 1e-9 * direct.max(1.0),
                "{p} {j}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn length_bounds_examples() {
        let b = description_length_bounds(1024, 1.0f64, 1.0).unwrap();
        assert_eq!((b.symbols, b.bits), (20.0, 20.0));
        let b = description_length_bounds(1024, 1.0f64, 0.5).unwrap();
        assert_eq!((b.symbols, b.bits), (40.0, 40.0));
        let b = description_length_bounds(1024, 2.0f64, 1.0).unwrap();
        assert_eq!((b.symbols, b.bits), (20.0, 40.0));
        assert!(description_length_bounds(1024, 1.0f64, 0.0).is_err());
    }

    #[test]
    fn identifiability_examples() {
        let r = identifiability_report(10.0f64, 1024, 1.0, 1.0).unwrap();
        assert_eq!((r.verdict, r.margin), (Identifiability::NotIdentifiable, -10.0));
        let r = identifiability_report(40.0f64, 1024, 1.0, 1.0).unwrap();
        assert_eq!((r.verdict, r.margin), (Identifiability::Identifiable, 20.0));
        let r = identifiability_report(20.0f64, 1024, 1.0, 1.0).unwrap();
        assert_eq!(r.verdict, Identifiability::Marginal);
    }
}
