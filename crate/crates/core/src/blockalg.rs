//! Finite block algebras `M_{k_1} ⊕ ... ⊕ M_{k_r}`, the pinching onto them
//! and elementary operators restricted to them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elemop::{a_upper_bounds_grid, norm_lower_bound, sqrt_n_lower_bound};
use crate::linalg::{singular_values, ComplexMatrix};
use crate::seqkit::top_products;
use crate::{Error, Result, IDENTITY_TOL, INEQ_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgebra", into = "RawAlgebra")]
pub struct BlockAlgebra {
    blocks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawAlgebra {
    blocks: Vec<usize>,
}

impl TryFrom<RawAlgebra> for BlockAlgebra {
    type Error = Error;

    fn try_from(raw: RawAlgebra) -> Result<Self> {
        BlockAlgebra::new(raw.blocks)
    }
}

impl From<BlockAlgebra> for RawAlgebra {
    fn from(alg: BlockAlgebra) -> Self {
        RawAlgebra { blocks: alg.blocks }
    }
}

impl BlockAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidArgument(format!("block sizes must be positive and non-empty, got {blocks:?}")));
        }
        Ok(BlockAlgebra { blocks })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// `(offset, size)` of each block.
    pub fn ranges(&self) -> Vec<(usize, usize)> {
        let mut offset = 0;
        self.blocks
            .iter()
            .map(|&b| {
                offset += b;
                (offset - b, b)
            })
            .collect()
    }

    fn block_of(&self) -> Vec<usize> {
        self.blocks.iter().enumerate().flat_map(|(i, &b)| std::iter::repeat_n(i, b)).collect()
    }

    fn check_dim(&self, x: &ComplexMatrix) -> Result<()> {
        let k = self.dim();
        if x.shape() != (k, k) {
            return Err(Error::DimensionMismatch(format!("matrix {:?} for algebra of dimension {k}", x.shape())));
        }
        Ok(())
    }

    /// Largest entry outside the diagonal blocks.
    pub fn off_block_mass(&self, x: &ComplexMatrix) -> Result<f64> {
        self.check_dim(x)?;
        let owner = self.block_of();
        let mut mass: f64 = 0.0;
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                if owner[i] != owner[j] {
                    mass = mass.max(x.get(i, j).norm());
                }
            }
        }
        Ok(mass)
    }

    /// The `i`-th diagonal block of `x`.
    pub fn block(&self, x: &ComplexMatrix, i: usize) -> Result<ComplexMatrix> {
        self.check_dim(x)?;
        let &(offset, size) = self.ranges().get(i).ok_or(Error::IndexOutOfRange { index: i, max: self.blocks.len() - 1 })?;
        ComplexMatrix::from_dmatrix(x.as_dmatrix().view((offset, offset), (size, size)).into_owned())
    }
}

/// `Δ(X) = Σ_i P_i X P_i`.
pub fn pinch(alg: &BlockAlgebra, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    alg.check_dim(x)?;
    let owner = alg.block_of();
    let k = alg.dim();
    let m = DMatrix::from_fn(k, k, |i, j| if owner[i] == owner[j] { x.get(i, j) } else { Complex64::new(0.0, 0.0) });
    ComplexMatrix::from_dmatrix(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    /// `max |Δ(AXB) - A Δ(X) B|`.
    pub residual: f64,
    /// `max |Δ(A Δ(X) B) - A Δ(X) B|`: the restriction stays inside the
    /// algebra.
    pub closure_residual: f64,
    pub holds: bool,
}

fn check_support(alg: &BlockAlgebra, m: &ComplexMatrix) -> Result<()> {
    let mass = alg.off_block_mass(m)?;
    if mass > IDENTITY_TOL * m.max_abs().max(1.0) {
        return Err(Error::SupportViolation(mass));
    }
    Ok(())
}

/// Checks `Δ(A X B) = A Δ(X) B` for block-diagonal `A`, `B`, i.e. that the
/// restricted operator is the pinching of the full one composed with the
/// inclusion.
pub fn factorization_check(
    alg: &BlockAlgebra,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    x: &ComplexMatrix,
) -> Result<FactorizationReport> {
    check_support(alg, a)?;
    check_support(alg, b)?;
    let full = pinch(alg, &a.mul(x)?.mul(b)?)?;
    let restricted = a.mul(&pinch(alg, x)?)?.mul(b)?;
    let residual = full.sub(&restricted)?.max_abs();
    let closure_residual = pinch(alg, &restricted)?.sub(&restricted)?.max_abs();
    let scale = a.max_abs() * x.max_abs() * b.max_abs() * alg.dim() as f64;
    let tol = IDENTITY_TOL * scale.max(1.0);
    Ok(FactorizationReport { residual, closure_residual, holds: residual <= tol && closure_residual <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    /// Best lower bound on `h_n` of the restricted operator, from the
    /// blocks.
    pub lower: Vec<f64>,
    /// Certified upper bound on `a_n(M_{A,B})` on the full algebra.
    pub upper: Vec<f64>,
    pub violations: Vec<usize>,
    pub holds: bool,
}

/// Lower bounds from `M_{A_i,B_i}` on each block (compressions of the
/// restricted operator) against upper bounds for `M_{A,B}` on all `k x k`
/// matrices.
pub fn restriction_sandwich(
    alg: &BlockAlgebra,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    omega: f64,
) -> Result<SandwichReport> {
    check_support(alg, a)?;
    check_support(alg, b)?;
    let k = alg.dim();
    let upper: Vec<f64> = a_upper_bounds_grid(a, b, &[omega], k * k)?.iter().map(|u| u.value).collect();
    let mut lower = vec![0.0; k * k];
    for i in 0..alg.blocks.len() {
        let (ai, bi) = (alg.block(a, i)?, alg.block(b, i)?);
        let count = ai.rows() * bi.rows();
        let (sa, sb) = (singular_values(&ai)?, singular_values(&bi)?);
        let nonzero = top_products(&sa, &sb, count).iter().filter(|t| t.value > 0.0).count();
        lower[0] = f64::max(lower[0], norm_lower_bound(&ai, &bi)?.value);
        for n in 1..=nonzero {
            lower[n - 1] = f64::max(lower[n - 1], sqrt_n_lower_bound(&ai, &bi, n)?.value);
        }
    }
    let violations: Vec<usize> = (0..k * k).filter(|&n| lower[n] > upper[n] + INEQ_TOL).map(|n| n + 1).collect();
    Ok(SandwichReport { holds: violations.is_empty(), lower, upper, violations })
}
