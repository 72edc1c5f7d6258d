use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::op::ElementaryOp;
use crate::linalg::{singular_values, spectral_norm, ComplexMatrix};
use crate::sampling::{complex_gaussian_vector, seeded_rng};
use crate::{Error, Result, INEQ_TOL};

const DRAWS_PER_SYMBOL: usize = 50;
const SPAN_TOL: f64 = 1e-10;

/// Vectors `ξ_j, η_j` with `Σ_j ⟨B_i η_j, ξ_j⟩ = δ_{i,target}`, and the
/// maps `S_j = ψ_j Φ φ_j` they induce, `φ_j(x) = x ξ_j*`, `ψ_j(X) = X η_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    /// Zero-based symbol index.
    pub target: usize,
    pub r: usize,
    pub draws: usize,
    pub xi: Vec<Vec<Complex64>>,
    pub eta: Vec<Vec<Complex64>>,
    pub summands: Vec<ComplexMatrix>,
    /// `Σ_j S_j`.
    pub reconstructed: ComplexMatrix,
    /// `‖Σ_j S_j - A_target‖`.
    pub residual: f64,
    /// `(n, s_{rn-r+1}(A_target), Σ_j s_n(S_j))` for every admissible `n`.
    pub inequality: Vec<(usize, f64, f64)>,
    pub inequality_holds: bool,
}

fn evaluation(phi: &ElementaryOp, xi: &[Complex64], eta: &[Complex64]) -> DVector<Complex64> {
    let xi = DVector::from_column_slice(xi);
    let eta = DVector::from_column_slice(eta);
    DVector::from_iterator(phi.len(), phi.symbols().iter().map(|(_, b)| xi.dotc(&(b.as_dmatrix() * &eta))))
}

fn rank_of(cols: &[DVector<Complex64>]) -> usize {
    let m = DMatrix::from_columns(cols);
    let s = m.singular_values();
    let top = s.max();
    s.iter().filter(|&&x| x > SPAN_TOL * top.max(1.0)).count()
}

/// Recovers `A_target` from `Φ` alone by sandwiching it between rank-one
/// maps. The `B`-symbols must be linearly independent; sampling is seeded.
pub fn recover_first_symbol(phi: &ElementaryOp, target: usize, seed: u64) -> Result<Recovery> {
    let (m, k) = (phi.len(), phi.dim());
    if target >= m {
        return Err(Error::IndexOutOfRange { index: target, max: m - 1 });
    }
    let mut rng = seeded_rng(seed);
    let mut e_t = DVector::zeros(m);
    e_t[target] = Complex64::new(1.0, 0.0);

    let mut pairs: Vec<(Vec<Complex64>, Vec<Complex64>)> = Vec::new();
    let mut vecs: Vec<DVector<Complex64>> = Vec::new();
    let mut draws = 0;
    let coeffs = loop {
        if draws == DRAWS_PER_SYMBOL * m {
            return Err(Error::SpanFailure(draws));
        }
        draws += 1;
        let eta = complex_gaussian_vector(&mut rng, k);
        let xi = complex_gaussian_vector(&mut rng, k);
        let v = evaluation(phi, &xi, &eta);
        vecs.push(v);
        if rank_of(&vecs) < vecs.len() {
            vecs.pop();
            continue;
        }
        pairs.push((xi, eta));
        let mat = DMatrix::from_columns(&vecs);
        let c = mat.clone().svd(true, true).solve(&e_t, 1e-14).map_err(|_| Error::ConvergenceFailure)?;
        if (&mat * &c - &e_t).norm() <= SPAN_TOL {
            break c;
        }
    };

    // absorb the coefficients: ξ_j <- conj(c_j) ξ_j, so ξ_j* picks up c_j
    let xi: Vec<Vec<Complex64>> = pairs.iter().zip(coeffs.iter()).map(|((x, _), c)| x.iter().map(|z| c.conj() * z).collect()).collect();
    let eta: Vec<Vec<Complex64>> = pairs.into_iter().map(|(_, e)| e).collect();
    let r = xi.len();

    let mut summands = Vec::with_capacity(r);
    for (x, e) in xi.iter().zip(&eta) {
        let e_vec = DVector::from_column_slice(e);
        let mut cols = Vec::with_capacity(k);
        for l in 0..k {
            // φ_j(e_l) = e_l ξ_j*
            let mut rank_one = vec![Complex64::new(0.0, 0.0); k * k];
            for (col, z) in x.iter().enumerate() {
                rank_one[l * k + col] = z.conj();
            }
            let image = phi.apply(&ComplexMatrix::new(k, k, rank_one)?)?;
            cols.push(image.as_dmatrix() * &e_vec);
        }
        summands.push(ComplexMatrix::from_dmatrix(DMatrix::from_columns(&cols))?);
    }
    let mut total = DMatrix::zeros(k, k);
    for s in &summands {
        total += s.as_dmatrix();
    }
    let reconstructed = ComplexMatrix::from_dmatrix(total)?;
    let residual = spectral_norm(&reconstructed.sub(&phi.symbols()[target].0)?)?;

    let s_target = singular_values(&phi.symbols()[target].0)?;
    let s_parts = summands.iter().map(singular_values).collect::<Result<Vec<_>>>()?;
    let inequality: Vec<(usize, f64, f64)> = (1..)
        .take_while(|n| r * n - r < k)
        .map(|n| (n, s_target[r * n - r], s_parts.iter().map(|s| s[n - 1]).sum()))
        .collect();
    let inequality_holds = inequality.iter().all(|&(_, lhs, rhs)| lhs <= rhs + INEQ_TOL);
    Ok(Recovery { target, r, draws, xi, eta, summands, reconstructed, residual, inequality, inequality_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::complex_gaussian_matrix;

    #[test]
    fn single_symbol() {
        let mut rng = seeded_rng(1);
        let a = complex_gaussian_matrix(&mut rng, 3, 3);
        let b = complex_gaussian_matrix(&mut rng, 3, 3);
        let rec = recover_first_symbol(&ElementaryOp::single(a, b).unwrap(), 0, 7).unwrap();
        assert_eq!(rec.r, 1);
        assert!(rec.residual < 1e-10, "{}", rec.residual);
        assert!(rec.inequality_holds);
    }

    #[test]
    fn three_symbols() {
        let mut rng = seeded_rng(2);
        let symbols = (0..3).map(|_| (complex_gaussian_matrix(&mut rng, 5, 5), complex_gaussian_matrix(&mut rng, 5, 5))).collect();
        let phi = ElementaryOp::new(symbols).unwrap();
        for target in 0..3 {
            let rec = recover_first_symbol(&phi, target, 11).unwrap();
            assert!(rec.r <= 3);
            assert!(rec.residual < 1e-8, "{}", rec.residual);
            assert!(rec.inequality_holds, "{:?}", rec.inequality);
            assert_eq!(rec.inequality.len(), (5 - 1) / rec.r + 1);
        }
    }

    #[test]
    fn dependent_right_symbols_fail_to_span() {
        let mut rng = seeded_rng(3);
        let b = complex_gaussian_matrix(&mut rng, 3, 3);
        let phi = ElementaryOp::new(vec![
            (complex_gaussian_matrix(&mut rng, 3, 3), b.clone()),
            (complex_gaussian_matrix(&mut rng, 3, 3), b),
        ])
        .unwrap();
        assert_eq!(recover_first_symbol(&phi, 0, 5).unwrap_err(), Error::SpanFailure(100));
    }

    #[test]
    fn deterministic() {
        let mut rng = seeded_rng(4);
        let symbols = (0..2).map(|_| (complex_gaussian_matrix(&mut rng, 3, 3), complex_gaussian_matrix(&mut rng, 3, 3))).collect();
        let phi = ElementaryOp::new(symbols).unwrap();
        assert_eq!(recover_first_symbol(&phi, 1, 9).unwrap(), recover_first_symbol(&phi, 1, 9).unwrap());
    }
}
