use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::sequence::{DecreasingSeq, Generator};
use crate::{Error, Result};

/// One entry of the product grid: `value = a_i * b_j` (0-based `i`, `j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorTerm {
    pub value: f64,
    pub i: usize,
    pub j: usize,
}

// Max-heap order: larger value first, then lexicographically smaller (i, j).
impl Eq for TensorTerm {}

impl Ord for TensorTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.i.cmp(&self.i))
            .then_with(|| other.j.cmp(&self.j))
    }
}

impl PartialOrd for TensorTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `n` largest products `a[i] * b[j]` of two non-increasing slices,
/// with their grid positions.
///
/// Frontier merge: row `i` enters the heap at column 0 once row `i - 1` has
/// been entered, and each pop pushes its right neighbour. The heap never
/// holds more than one cell per row, so the cost is `O(n log n)`.
pub fn top_products(a: &[f64], b: &[f64], n: usize) -> Vec<TensorTerm> {
    let mut out = Vec::with_capacity(n.min(a.len() * b.len()));
    if a.is_empty() || b.is_empty() {
        return out;
    }
    let mut heap = BinaryHeap::new();
    heap.push(TensorTerm { value: a[0] * b[0], i: 0, j: 0 });
    while out.len() < n {
        let Some(t) = heap.pop() else { break };
        out.push(t);
        if t.j + 1 < b.len() {
            heap.push(TensorTerm { value: a[t.i] * b[t.j + 1], i: t.i, j: t.j + 1 });
        }
        if t.j == 0 && t.i + 1 < a.len() {
            heap.push(TensorTerm { value: a[t.i + 1] * b[0], i: t.i + 1, j: 0 });
        }
    }
    out
}

/// First `n` terms of `a (x) b` together with their grid positions.
///
/// Only the first `n` terms of each factor can contribute to the `n`
/// largest products, so generated sequences are materialised to length `n`.
/// Explicit prefixes are certified by the monotone tail bound: every
/// product involving an unknown term is at most
/// `max(a_1 * sup b_tail, sup a_tail * b_1)`, and the `n`-th computed
/// product must dominate that.
pub fn tensor_prefix_indexed(
    a: &DecreasingSeq,
    b: &DecreasingSeq,
    n: usize,
) -> Result<Vec<TensorTerm>> {
    let la = a.available().map_or(n, |l| l.min(n));
    let lb = b.available().map_or(n, |l| l.min(n));
    let av = a.terms(la)?;
    let bv = b.terms(lb)?;
    let mut top = top_products(&av, &bv, n);

    let tail_a = if a.available().is_some() { a.sup_beyond(la) } else { Some(0.0) };
    let tail_b = if b.available().is_some() { b.sup_beyond(lb) } else { Some(0.0) };
    let a1 = av.first().copied().unwrap_or(0.0);
    let b1 = bv.first().copied().unwrap_or(0.0);
    let unknown = match (tail_a, tail_b) {
        (Some(ta), Some(tb)) => (a1 * tb).max(ta * b1).max(ta * tb),
        _ => f64::INFINITY,
    };
    if unknown > 0.0 {
        let certified = top.len() == n && top.last().is_some_and(|t| t.value >= unknown);
        if !certified {
            return Err(Error::InsufficientPrefix(format!(
                "product {n} is not certified: unknown products may reach {unknown:e}"
            )));
        }
    }
    while top.len() < n {
        // Remaining grid cells lie outside both supports.
        top.push(TensorTerm { value: 0.0, i: usize::MAX, j: usize::MAX });
    }
    Ok(top)
}

/// First `n` terms of the sequence tensor product `a (x) b`.
pub fn tensor_prefix(a: &DecreasingSeq, b: &DecreasingSeq, n: usize) -> Result<DecreasingSeq> {
    let values = tensor_prefix_indexed(a, b, n)?.into_iter().map(|t| t.value).collect();
    let finite = a.is_finitely_supported() && b.is_finitely_supported();
    DecreasingSeq::new(values, if finite { None } else { Some(Generator::Explicit) })
}
