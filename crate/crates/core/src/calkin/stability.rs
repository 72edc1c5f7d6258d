use serde::{Deserialize, Serialize};

use super::profile::{profile, CalkinProfile};
use crate::seqkit::DecreasingSeq;
use crate::Result;

/// Ratios `M~_n / K~_{n+r}` for one shift `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub r: usize,
    /// `(n, ratio)` rows.
    pub rows: Vec<(usize, f64)>,
}

impl RatioTable {
    fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|&(_, v)| v).collect()
    }

    pub fn diverging(&self) -> bool {
        diverging(&self.values())
    }
}

fn tail_len(len: usize) -> usize {
    len.div_ceil(4).max(2)
}

/// Divergence heuristic: the last quarter of the table (at least two
/// points) strictly increases and the final value exceeds ten times the
/// first.
pub fn diverging(values: &[f64]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let tail = &values[values.len() - tail_len(values.len()).min(values.len())..];
    tail.windows(2).all(|w| w[1] > w[0]) && values[values.len() - 1] > 10.0 * values[0]
}

/// The last quarter (at least two points) is non-increasing.
fn settled(values: &[f64]) -> bool {
    if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let tail = &values[values.len() - tail_len(values.len()).min(values.len())..];
    tail.windows(2).all(|w| w[1] <= w[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StabilityCertificate {
    /// `M~_n <= c K~_{n+r}` at every checked `n`, with a settled ratio table.
    Condition3 { r: usize, c: f64 },
    /// `K_{n+j} >= c (K~_n)^2` at every checked pair, hence
    /// `M~_n <= K~_{n+r}` with `r = ceil(1/c)`.
    Remc { c: f64, r: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum StabilityDecision {
    StableCertified { certificate: StabilityCertificate },
    NotStableAtHorizon { tables: Vec<RatioTable> },
    Inconclusive { tables: Vec<RatioTable> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub decision: StabilityDecision,
    /// Profile depth the verdict was computed at.
    pub horizon: usize,
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self.decision, StabilityDecision::StableCertified { .. })
    }

    pub fn is_not_stable(&self) -> bool {
        matches!(self.decision, StabilityDecision::NotStableAtHorizon { .. })
    }
}

/// Ratio tables `M~_n / K~_{n+r}` for `r = 1..=r_max`, `n = 0..=depth-r`.
pub fn ratio_tables(p: &CalkinProfile, r_max: usize) -> Vec<RatioTable> {
    (1..=r_max.min(p.depth))
        .map(|r| RatioTable {
            r,
            rows: (0..=p.depth - r)
                .map(|n| (n, p.m_tilde[n] / p.k_tilde[n + r]))
                .collect(),
        })
        .collect()
}

/// Finite-horizon decider for stability of the principal Calkin space
/// generated by `a`, through the profile condition
/// `M~_n <= C K~_{n+r}`.
///
/// The profile is computed to `depth`; shift `r` is tested on
/// `n = 0..=depth-r`. A settled table certifies with `C` its maximum. If no
/// table settles, the band-growth sufficient condition is tried; when every
/// table diverges the verdict is `NotStableAtHorizon`.
pub fn stability_condition3(
    a: &DecreasingSeq,
    omega: f64,
    r_max: usize,
    depth: usize,
) -> Result<StabilityVerdict> {
    let p = profile(a, omega, depth)?;
    let tables = ratio_tables(&p, r_max);

    let certified = tables.iter().find(|t| settled(&t.values())).map(|t| {
        StabilityCertificate::Condition3 { r: t.r, c: t.values().into_iter().fold(0.0, f64::max) }
    });
    let certified = certified.or_else(|| match remc_from_profile(&p) {
        RemcVerdict::Holds { c, .. } => {
            let r = ((1.0 / c).ceil() as usize).max(1);
            // counts past 2^53 are rounded; compare with a relative slack
            let ok = (0..=p.depth)
                .filter(|n| n + r <= p.depth)
                .all(|n| p.m_tilde[n] <= p.k_tilde[n + r] * (1.0 + 1e-12));
            ok.then_some(StabilityCertificate::Remc { c, r })
        }
        _ => None,
    });

    let decision = match certified {
        Some(certificate) => StabilityDecision::StableCertified { certificate },
        None if !tables.is_empty()
            && tables.iter().filter(|t| t.rows.len() >= 2).all(|t| t.diverging()) =>
        {
            StabilityDecision::NotStableAtHorizon { tables }
        }
        None => StabilityDecision::Inconclusive { tables },
    };
    Ok(StabilityVerdict { decision, horizon: depth })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RemcVerdict {
    /// Largest `c > 0` with `K_{n+j} >= c (K~_n)^2` over all checked pairs.
    Holds { c: f64, horizon: usize },
    /// First pair with an empty band, or, when the per-`n` constants
    /// collapse, the first pair below a tenth of the initial constant.
    FailsAt { n: usize, j: usize, horizon: usize },
}

/// Tests the band-growth sufficient condition `K_{n+j} >= C (K~_n)^2`
/// for `n + j <= depth`, `j >= 1`.
pub fn remc_sufficient(a: &DecreasingSeq, omega: f64, depth: usize) -> Result<RemcVerdict> {
    Ok(remc_from_profile(&profile(a, omega, depth)?))
}

fn remc_from_profile(p: &CalkinProfile) -> RemcVerdict {
    let horizon = p.depth;
    // c_n = min_j K_{n+j} / K~_n^2, over n with K~_n > 0.
    let per_n: Vec<(usize, f64)> = (0..p.depth)
        .filter(|&n| p.k_tilde[n] > 0.0)
        .map(|n| {
            let sq = p.k_tilde[n] * p.k_tilde[n];
            let c = (n + 1..=p.depth).map(|i| p.k[i] / sq).fold(f64::INFINITY, f64::min);
            (n, c)
        })
        .collect();
    if per_n.is_empty() {
        return RemcVerdict::Holds { c: f64::INFINITY, horizon };
    }
    for &(n, c) in &per_n {
        if c == 0.0 {
            let i = (n + 1..=p.depth).find(|&i| p.k[i] == 0.0).expect("a zero constant comes from an empty band");
            return RemcVerdict::FailsAt { n, j: i - n, horizon };
        }
    }
    let reciprocal: Vec<f64> = per_n.iter().map(|&(_, c)| 1.0 / c).collect();
    if diverging(&reciprocal) {
        let floor = per_n[0].1 / 10.0;
        for &(n, _) in &per_n {
            let sq = p.k_tilde[n] * p.k_tilde[n];
            if let Some(i) = (n + 1..=p.depth).find(|&i| p.k[i] < floor * sq) {
                return RemcVerdict::FailsAt { n, j: i - n, horizon };
            }
        }
    }
    let c = per_n.iter().map(|&(_, c)| c).fold(f64::INFINITY, f64::min);
    RemcVerdict::Holds { c, horizon }
}
