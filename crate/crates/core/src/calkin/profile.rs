use serde::{Deserialize, Serialize};

use crate::seqkit::{dominates, pow_int, DecreasingSeq, Domination};
use crate::{Error, Result};

/// Band counts of a normalized decreasing sequence at base `omega`.
///
/// `k[n]` counts the terms in `(omega^(n+1), omega^n]`; `k_tilde`, `m`,
/// `m_tilde` are its running sum, self-convolution and the running sum of
/// the convolution. Counts are integers held in `f64`; they are exact when
/// `exact` is set, otherwise some band was counted from a generator's closed
/// form beyond the range of integer search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalkinProfile {
    pub omega: f64,
    pub k: Vec<f64>,
    pub k_tilde: Vec<f64>,
    pub m: Vec<f64>,
    pub m_tilde: Vec<f64>,
    pub depth: usize,
    pub exact: bool,
}

pub(crate) fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("omega = {omega} must lie in (0,1)")))
    }
}

fn check_normalized(a: &DecreasingSeq) -> Result<()> {
    match a.prefix().first() {
        Some(&a1) if a1 > 1.0 => Err(Error::NotNormalized(a1)),
        _ => Ok(()),
    }
}

/// Band counts `K_0..=K_depth` of `a` at base `omega`.
pub fn band_counts(a: &DecreasingSeq, omega: f64, depth: usize) -> Result<(Vec<f64>, bool)> {
    check_omega(omega)?;
    check_normalized(a)?;
    let mut exact = true;
    let mut prev = 0.0;
    let mut k = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let c = a.count_above(pow_int(omega, n as u64 + 1))?;
        if !c.value.is_finite() {
            return Err(Error::InsufficientPrefix(format!(
                "band {n} at omega = {omega} holds more terms than can be represented"
            )));
        }
        exact &= c.exact;
        k.push(c.value - prev);
        prev = c.value;
    }
    Ok((k, exact))
}

/// `out[n] = sum_{i+j=n} x_i y_j` for `n < len`.
fn convolve(x: &[f64], y: &[f64], len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| {
            (0..=n)
                .filter(|&i| i < x.len() && n - i < y.len())
                .map(|i| x[i] * y[n - i])
                .sum()
        })
        .collect()
}

fn running_sum(x: &[f64]) -> Vec<f64> {
    x.iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Counting profile of `a` (requires `a_1 <= 1`).
pub fn profile(a: &DecreasingSeq, omega: f64, depth: usize) -> Result<CalkinProfile> {
    let (k, exact) = band_counts(a, omega, depth)?;
    let k_tilde = running_sum(&k);
    let m = convolve(&k, &k, depth + 1);
    let m_tilde = running_sum(&m);
    Ok(CalkinProfile { omega, k, k_tilde, m, m_tilde, depth, exact })
}

impl CalkinProfile {
    /// Re-derives `K~`, `M`, `M~` from `K`; exact equality for exact
    /// profiles, relative `1e-12` otherwise.
    pub fn invariants_hold(&self) -> bool {
        let close = |x: f64, y: f64| {
            if self.exact {
                x == y
            } else {
                (x - y).abs() <= 1e-12 * x.abs().max(y.abs())
            }
        };
        let n = self.depth + 1;
        if [&self.k, &self.k_tilde, &self.m, &self.m_tilde].iter().any(|v| v.len() != n) {
            return false;
        }
        let kt = running_sum(&self.k);
        let m = convolve(&self.k, &self.k, n);
        let mt = running_sum(&self.m);
        self.k.iter().all(|&x| x >= 0.0)
            && self.k_tilde.windows(2).all(|w| w[0] <= w[1])
            && self.m_tilde.windows(2).all(|w| w[0] <= w[1])
            && kt.iter().zip(&self.k_tilde).all(|(x, y)| close(*x, *y))
            && m.iter().zip(&self.m).all(|(x, y)| close(*x, *y))
            && mt.iter().zip(&self.m_tilde).all(|(x, y)| close(*x, *y))
    }
}

/// Smallest `r <= r_max` with `K~_n(a) <= K~_{n+r}(b)` for all `n <= depth`.
pub fn shift_criterion(
    a: &DecreasingSeq,
    b: &DecreasingSeq,
    omega: f64,
    r_max: usize,
    depth: usize,
) -> Result<Option<usize>> {
    let pa = profile(a, omega, depth)?;
    let pb = profile(b, omega, depth + r_max)?;
    Ok((1..=r_max).find(|&r| (0..=depth).all(|n| pa.k_tilde[n] <= pb.k_tilde[n + r])))
}

/// Domination constant implied by a profile shift of `r`: `omega^(-r-1)`.
pub fn shift_domination_constant(omega: f64, r: usize) -> f64 {
    1.0 / pow_int(omega, r as u64 + 1)
}

/// Outcome of a principal-space membership search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    /// `b <= c (r (x) a)` on the horizon.
    Member { r: usize, c: f64, horizon: usize },
    /// For each tried `r`, the index where domination failed.
    NotAtHorizon { horizon: usize, failures: Vec<(usize, usize)> },
}

/// Searches `r <= r_max` with `b* ≲ r (x) a` at the horizon.
pub fn principal_membership(
    b: &DecreasingSeq,
    a: &DecreasingSeq,
    r_max: usize,
    horizon: usize,
    c_max: f64,
) -> Result<Membership> {
    check_normalized(a)?;
    check_normalized(b)?;
    let mut failures = Vec::new();
    for r in 1..=r_max {
        let ra = a.repeated(r, horizon)?;
        match dominates(b, &ra, horizon, c_max)? {
            Domination::Dominated { c, horizon } => return Ok(Membership::Member { r, c, horizon }),
            Domination::NotAtHorizon { index, .. } => failures.push((r, index)),
        }
    }
    Ok(Membership::NotAtHorizon { horizon, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_profile_closed_form() {
        let g = DecreasingSeq::geometric(0.5, 1).unwrap();
        let p = profile(&g, 0.5, 10).unwrap();
        assert!(p.exact && p.invariants_hold());
        for n in 0..=10 {
            let nf = n as f64;
            assert_eq!(p.k[n], 1.0);
            assert_eq!(p.k_tilde[n], nf + 1.0);
            assert_eq!(p.m[n], nf + 1.0);
            assert_eq!(p.m_tilde[n], (nf + 1.0) * (nf + 2.0) / 2.0);
        }
    }

    #[test]
    fn log_inverse_doubly_exponential_bands() {
        let a = DecreasingSeq::log_inverse(1).unwrap();
        let p = profile(&a, 0.5, 4).unwrap();
        assert!(p.exact);
        for n in 0..=4u32 {
            let expected = 2f64.powi(2i32.pow(n + 1)) - 2f64.powi(2i32.pow(n));
            assert_eq!(p.k[n as usize], expected, "band {n}");
        }
    }

    #[test]
    fn unnormalized_rejected() {
        let a = DecreasingSeq::finite(vec![2.0, 1.0]).unwrap();
        assert_eq!(profile(&a, 0.5, 3), Err(Error::NotNormalized(2.0)));
    }

    #[test]
    fn finite_sequence_profile() {
        let a = DecreasingSeq::finite(vec![1.0, 0.6, 0.5, 0.3, 0.0]).unwrap();
        let p = profile(&a, 0.5, 3).unwrap();
        // 0.5 sits on a band edge and belongs to (1/4, 1/2]
        assert_eq!(p.k, vec![2.0, 2.0, 0.0, 0.0]);
        assert!(p.invariants_hold());
    }

    #[test]
    fn membership_examples() {
        let g = DecreasingSeq::geometric(0.5, 1).unwrap();
        assert_eq!(
            principal_membership(&g, &g, 8, 100, 1e6).unwrap(),
            Membership::Member { r: 1, c: 1.0, horizon: 100 }
        );
        let tripled = g.repeated(3, 300).unwrap();
        assert_eq!(
            principal_membership(&tripled, &g, 8, 300, 1e6).unwrap(),
            Membership::Member { r: 3, c: 1.0, horizon: 300 }
        );
    }

    #[test]
    fn shift_criterion_for_geometric_pair() {
        // (1/4)^n ≲ (1/2)^n: the bands of the faster sequence are sparser.
        let a = DecreasingSeq::geometric(0.25, 1).unwrap();
        let b = DecreasingSeq::geometric(0.5, 1).unwrap();
        assert_eq!(shift_criterion(&a, &b, 0.5, 4, 20).unwrap(), Some(1));
        assert_eq!(shift_criterion(&b, &a, 0.5, 4, 20).unwrap(), None);
    }
}
