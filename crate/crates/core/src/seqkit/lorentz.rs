use serde::{Deserialize, Serialize};

use super::sequence::DecreasingSeq;
use super::tensor::tensor_prefix;
use crate::{Error, Result, INEQ_TOL};

/// Closed-form weight families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFamily {
    /// `w_n = n^(p/q - 1)`, the classical `l_{q,p}` weights.
    ClassicalLorentz { p: f64, q: f64 },
    /// `w_n = (1 + ln n)^gamma / n^alpha`.
    LogPower { alpha: f64, gamma: f64 },
    /// Only the stored prefix is known.
    Explicit,
}

/// A weight sequence: positive, non-increasing, `w_1 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSeq {
    prefix: Vec<f64>,
    family: WeightFamily,
}

impl WeightSeq {
    pub fn classical_lorentz(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p <= q && q.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "classical Lorentz weights need 0 < p <= q, got p={p}, q={q}"
            )));
        }
        Ok(WeightSeq { prefix: vec![], family: WeightFamily::ClassicalLorentz { p, q } })
    }

    /// Requires `0 < alpha <= 1` and `0 <= gamma <= alpha`; the last
    /// condition is what makes the sequence non-increasing from `n = 1`.
    pub fn log_power(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0 && gamma >= 0.0 && gamma <= alpha) {
            return Err(Error::InvalidWeight(format!(
                "log-power weights need 0 < alpha <= 1 and 0 <= gamma <= alpha, got alpha={alpha}, gamma={gamma}"
            )));
        }
        Ok(WeightSeq { prefix: vec![], family: WeightFamily::LogPower { alpha, gamma } })
    }

    pub fn explicit(prefix: Vec<f64>) -> Result<Self> {
        if prefix.first() != Some(&1.0) {
            return Err(Error::InvalidWeight("first weight must equal 1".into()));
        }
        for w in prefix.windows(2) {
            if !(w[1] > 0.0 && w[1] <= w[0]) {
                return Err(Error::InvalidWeight(format!(
                    "weights must be positive and non-increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(WeightSeq { prefix, family: WeightFamily::Explicit })
    }

    pub fn family(&self) -> WeightFamily {
        self.family
    }

    /// `w_n` (1-based), if known.
    pub fn weight(&self, n: usize) -> Option<f64> {
        assert!(n >= 1, "weights are 1-based");
        let x = n as f64;
        match self.family {
            WeightFamily::ClassicalLorentz { p, q } => Some(x.powf(p / q - 1.0)),
            WeightFamily::LogPower { alpha, gamma } => {
                Some((1.0 + x.ln()).powf(gamma) / x.powf(alpha))
            }
            WeightFamily::Explicit => self.prefix.get(n - 1).copied(),
        }
    }

    fn weight_or_err(&self, n: usize) -> Result<f64> {
        self.weight(n).ok_or_else(|| {
            Error::InsufficientPrefix(format!(
                "weight {n} requested from an explicit prefix of length {}",
                self.prefix.len()
            ))
        })
    }
}

/// `N`-term partial Lorentz norm `(sum_{n<=N} w_n a_n^p)^(1/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzNorm {
    pub value: f64,
    /// `w_N a_N^p`, the last summand, as a truncation indicator.
    pub last_term: f64,
    pub terms: usize,
}

pub fn lorentz_norm(a: &DecreasingSeq, w: &WeightSeq, p: f64, n: usize) -> Result<LorentzNorm> {
    let values = a.terms(n)?;
    lorentz_norm_slice(&values, w, p)
}

fn lorentz_norm_slice(values: &[f64], w: &WeightSeq, p: f64) -> Result<LorentzNorm> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("Lorentz exponent p = {p} must be >= 1")));
    }
    let mut sum = 0.0;
    let mut last_term = 0.0;
    for (i, &x) in values.iter().enumerate() {
        last_term = w.weight_or_err(i + 1)? * x.powf(p);
        sum += last_term;
    }
    Ok(LorentzNorm { value: sum.powf(1.0 / p), last_term, terms: values.len() })
}

/// `max_{m,n <= horizon} w_{mn} / (w_m w_n)`.
///
/// Classical Lorentz weights are exactly multiplicative and return 1
/// without scanning.
pub fn weight_submult_constant(w: &WeightSeq, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    if let WeightFamily::ClassicalLorentz { .. } = w.family {
        return Ok(1.0);
    }
    let ws: Vec<f64> = (1..=horizon).map(|n| w.weight_or_err(n)).collect::<Result<_>>()?;
    let mut c = 0.0f64;
    for m in 1..=horizon {
        for n in m..=horizon {
            let ratio = w.weight_or_err(m * n)? / (ws[m - 1] * ws[n - 1]);
            c = c.max(ratio);
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzTensorReport {
    pub lhs: f64,
    pub rhs: f64,
    pub c: f64,
    pub holds: bool,
}

/// Checks `||a (x) b||_{w,p} <= C^(1/p) ||a||_{w,p} ||b||_{w,p}` on `n` terms.
///
/// The first `n` terms of `a (x) b` only involve `a_1..a_n` and `b_1..b_n`,
/// so the truncated inequality is the full inequality for the truncated
/// factors and the check is sound. `C` is scanned over `m, n <= n`.
pub fn lorentz_tensor_check(
    a: &DecreasingSeq,
    b: &DecreasingSeq,
    w: &WeightSeq,
    p: f64,
    n: usize,
) -> Result<LorentzTensorReport> {
    let c = weight_submult_constant(w, n)?;
    let ab = tensor_prefix(a, b, n)?;
    let lhs = lorentz_norm(&ab, w, p, n)?.value;
    let rhs = c.powf(1.0 / p) * lorentz_norm(a, w, p, n)?.value * lorentz_norm(b, w, p, n)?.value;
    Ok(LorentzTensorReport { lhs, rhs, c, holds: lhs <= rhs + INEQ_TOL })
}
