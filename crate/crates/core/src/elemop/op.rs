use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{singular_values, ComplexMatrix};
use crate::seqkit::DecreasingSeq;
use crate::{Error, Result};

/// `X -> Σ_i A_i X B_i` on `k x k` matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOp", into = "RawOp")]
pub struct ElementaryOp {
    dim: usize,
    symbols: Vec<(ComplexMatrix, ComplexMatrix)>,
}

#[derive(Serialize, Deserialize)]
struct RawOp {
    symbols: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl TryFrom<RawOp> for ElementaryOp {
    type Error = Error;

    fn try_from(raw: RawOp) -> Result<Self> {
        ElementaryOp::new(raw.symbols)
    }
}

impl From<ElementaryOp> for RawOp {
    fn from(op: ElementaryOp) -> Self {
        RawOp { symbols: op.symbols }
    }
}

impl ElementaryOp {
    pub fn new(symbols: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let Some((a0, _)) = symbols.first() else {
            return Err(Error::InvalidArgument("an elementary operator needs at least one symbol pair".into()));
        };
        let dim = a0.rows();
        for (i, (a, b)) in symbols.iter().enumerate() {
            if a.shape() != (dim, dim) || b.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "symbol pair {i} has shapes {:?}, {:?}; expected {dim}x{dim}",
                    a.shape(),
                    b.shape()
                )));
            }
        }
        Ok(ElementaryOp { dim, symbols })
    }

    /// `M_{A,B}`.
    pub fn single(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> &[(ComplexMatrix, ComplexMatrix)] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!("argument {:?} for dim {}", x.shape(), self.dim)));
        }
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (a, b) in &self.symbols {
            out += a.as_dmatrix() * x.as_dmatrix() * b.as_dmatrix();
        }
        ComplexMatrix::from_dmatrix(out)
    }
}

/// `Σ_i B_i^T ⊗ A_i`, so that `hs_matrix(Φ) vec(X) = vec(Φ(X))` for
/// column-stacking `vec`.
pub fn hs_matrix(phi: &ElementaryOp) -> ComplexMatrix {
    let k2 = phi.dim * phi.dim;
    let mut out = DMatrix::zeros(k2, k2);
    for (a, b) in &phi.symbols {
        out += b.as_dmatrix().transpose().kronecker(a.as_dmatrix());
    }
    ComplexMatrix::from_dmatrix(out).expect("finite symbols give finite entries")
}

/// Singular numbers of `Φ` on the Hilbert-Schmidt class.
pub fn hs_singular_numbers(phi: &ElementaryOp) -> Result<DecreasingSeq> {
    DecreasingSeq::finite(singular_values(&hs_matrix(phi))?)
}

const DEPENDENCE_TOL: f64 = 1e-9;

/// Rewrites `Φ` with linearly independent `A`-symbols and linearly
/// independent `B`-symbols, never adding pairs.
pub fn minimal_representation(phi: &ElementaryOp) -> Result<ElementaryOp> {
    let k = phi.dim;
    let mut left: Vec<DVector<Complex64>> = phi.symbols.iter().map(|(a, _)| DVector::from_vec(a.vec())).collect();
    let mut right: Vec<DVector<Complex64>> = phi.symbols.iter().map(|(_, b)| DVector::from_vec(b.vec())).collect();
    let scale = left.iter().chain(&right).map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::ZeroOperator);
    }

    loop {
        let before = left.len();
        // A_i = Σ c_j A_j folds B_i into the B_j; then the same with sides swapped.
        eliminate(&mut left, &mut right, scale);
        eliminate(&mut right, &mut left, scale);
        if left.len() == before {
            break;
        }
    }
    if left.is_empty() {
        return Err(Error::ZeroOperator);
    }
    let symbols = left
        .iter()
        .zip(&right)
        .map(|(a, b)| {
            Ok((ComplexMatrix::from_vec(k, k, a.as_slice())?, ComplexMatrix::from_vec(k, k, b.as_slice())?))
        })
        .collect::<Result<Vec<_>>>()?;
    ElementaryOp::new(symbols)
}

/// Drops every pair whose `primary` vector depends on the ones kept before
/// it, folding its partner into the kept partners.
fn eliminate(primary: &mut Vec<DVector<Complex64>>, partner: &mut Vec<DVector<Complex64>>, scale: f64) {
    let mut kept: Vec<usize> = Vec::new();
    let mut dropped = vec![false; primary.len()];
    for i in 0..primary.len() {
        if primary[i].norm() <= DEPENDENCE_TOL * scale || partner[i].norm() <= DEPENDENCE_TOL * scale {
            dropped[i] = true;
            continue;
        }
        if let Some(coeffs) = express(primary, &kept, i, scale) {
            for (&j, c) in kept.iter().zip(coeffs.iter()) {
                let add = &partner[i] * *c;
                partner[j] += add;
            }
            dropped[i] = true;
        } else {
            kept.push(i);
        }
    }
    // folding can cancel a kept partner entirely
    for &j in &kept {
        if partner[j].norm() <= DEPENDENCE_TOL * scale {
            dropped[j] = true;
        }
    }
    let mut idx = 0;
    primary.retain(|_| {
        idx += 1;
        !dropped[idx - 1]
    });
    let mut idx = 0;
    partner.retain(|_| {
        idx += 1;
        !dropped[idx - 1]
    });
}

/// Least-squares coefficients of `vs[i]` over `vs[basis]`, if the residual
/// is negligible.
fn express(vs: &[DVector<Complex64>], basis: &[usize], i: usize, scale: f64) -> Option<DVector<Complex64>> {
    if basis.is_empty() {
        return None;
    }
    let cols: Vec<DVector<Complex64>> = basis.iter().map(|&j| vs[j].clone()).collect();
    let m = DMatrix::from_columns(&cols);
    let svd = m.clone().svd(true, true);
    let c = svd.solve(&vs[i], 1e-13 * scale).ok()?;
    let residual = (&m * &c - &vs[i]).norm();
    (residual <= DEPENDENCE_TOL * scale.max(vs[i].norm())).then_some(c)
}
