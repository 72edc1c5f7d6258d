use serde::{Deserialize, Serialize};

use super::sequence::DecreasingSeq;
use crate::Result;

/// Outcome of a finite-horizon test of `a <= C b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Domination {
    /// `a_n <= c * b_n` for every `n <= horizon`, with `c` the smallest such
    /// constant.
    Dominated { c: f64, horizon: usize },
    /// The running ratio first exceeds `c_max` (or `b_n = 0 < a_n`) at
    /// `index` (1-based).
    NotAtHorizon { index: usize, horizon: usize },
}

impl Domination {
    pub fn is_dominated(&self) -> bool {
        matches!(self, Domination::Dominated { .. })
    }
}

/// Semi-decides `a ≲ b` on the first `horizon` terms.
///
/// This can never prove asymptotic domination; the verdict carries the
/// horizon it was computed at.
pub fn dominates(
    a: &DecreasingSeq,
    b: &DecreasingSeq,
    horizon: usize,
    c_max: f64,
) -> Result<Domination> {
    let av = a.terms(horizon)?;
    let bv = b.terms(horizon)?;
    Ok(dominates_slices(&av, &bv, c_max))
}

fn dominates_slices(a: &[f64], b: &[f64], c_max: f64) -> Domination {
    let horizon = a.len().min(b.len());
    let mut sup = 0.0f64;
    for n in 0..horizon {
        if a[n] == 0.0 {
            continue;
        }
        if b[n] == 0.0 {
            return Domination::NotAtHorizon { index: n + 1, horizon };
        }
        sup = sup.max(a[n] / b[n]);
        if sup > c_max {
            return Domination::NotAtHorizon { index: n + 1, horizon };
        }
    }
    Domination::Dominated { c: sup, horizon }
}
