//! Dense complex matrices: SVD, spectral norm, Kronecker products, Schmidt
//! truncation and singular-value inequality checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::seqkit::DecreasingSeq;
use crate::{Error, Result, INEQ_TOL};

/// Relative threshold below which singular values count as zero in rank
/// decisions.
pub const RANK_TOL: f64 = 1e-12;

const SVD_EPS: f64 = 1e-15;
const SVD_MAX_ITER: usize = 10_000;

/// A finite complex matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ComplexMatrix(DMatrix<Complex64>);

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let entries = raw.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(raw.rows, raw.cols, entries)
    }
}

impl From<ComplexMatrix> for RawMatrix {
    fn from(m: ComplexMatrix) -> Self {
        let (rows, cols) = m.0.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = m.0[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        RawMatrix { rows, cols, entries }
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!("empty shape {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for shape {rows}x{cols}",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!("empty shape {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        Ok(ComplexMatrix(m))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        Self::new(rows.len(), cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty shape");
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "empty shape");
        ComplexMatrix(DMatrix::identity(n, n))
    }

    /// Square diagonal matrix with the given real diagonal.
    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) });
        Self::from_dmatrix(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        ComplexMatrix(&self.0 * c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(ComplexMatrix(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(ComplexMatrix(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(ComplexMatrix(&self.0 - &other.0))
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "shapes {:?} and {:?} differ",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Column-stacking vectorization.
    pub fn vec(&self) -> Vec<Complex64> {
        self.0.as_slice().to_vec()
    }

    /// Inverse of [`ComplexMatrix::vec`].
    pub fn from_vec(rows: usize, cols: usize, v: &[Complex64]) -> Result<Self> {
        if v.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for {rows}x{cols}", v.len())));
        }
        Self::from_dmatrix(DMatrix::from_column_slice(rows, cols, v))
    }
}

/// `A = U diag(s) V*` with `U`, `V` having orthonormal columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub s: DecreasingSeq,
    pub v: ComplexMatrix,
}

impl SvdResult {
    /// Singular values with everything below `RANK_TOL * s_1` set to zero.
    pub fn clamped(&self) -> Vec<f64> {
        clamp_small(self.s.prefix())
    }

    pub fn rank(&self) -> usize {
        numerical_rank(self.s.prefix())
    }

    /// `U diag(s) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let s = self.s.prefix();
        let mut us = self.u.0.clone();
        for (j, mut col) in us.column_iter_mut().enumerate() {
            col *= Complex64::new(s[j], 0.0);
        }
        ComplexMatrix(us * self.v.0.adjoint())
    }
}

pub fn clamp_small(s: &[f64]) -> Vec<f64> {
    let cut = RANK_TOL * s.first().copied().unwrap_or(0.0);
    s.iter().map(|&x| if x < cut { 0.0 } else { x }).collect()
}

pub fn numerical_rank(s: &[f64]) -> usize {
    clamp_small(s).iter().filter(|&&x| x > 0.0).count()
}

pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    let svd = a
        .0
        .clone()
        .try_svd(true, true, SVD_EPS, SVD_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::ConvergenceFailure);
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s: Vec<f64> = order.iter().map(|&i| svd.singular_values[i].max(0.0)).collect();
    let v = v_t.adjoint();
    let u = u.select_columns(order.iter());
    let v = v.select_columns(order.iter());
    Ok(SvdResult { u: ComplexMatrix(u), s: DecreasingSeq::finite(s)?, v: ComplexMatrix(v) })
}

pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = a
        .0
        .clone()
        .try_svd(false, false, SVD_EPS, SVD_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?
        .singular_values
        .iter()
        .map(|x| x.max(0.0))
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?[0])
}

/// Entry `(i, j), (i', j')` lands at `(i rows(B) + i', j cols(B) + j')`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// `A P_S`, with `P_S` the projection onto the right singular vectors
/// indexed (from zero) by `band`.
pub fn schmidt_truncate(a: &ComplexMatrix, band: &[usize]) -> Result<ComplexMatrix> {
    let d = svd(a)?;
    schmidt_truncate_with(a, &d, band)
}

pub(crate) fn schmidt_truncate_with(a: &ComplexMatrix, d: &SvdResult, band: &[usize]) -> Result<ComplexMatrix> {
    let k = d.s.len();
    if let Some(&bad) = band.iter().find(|&&i| i >= k) {
        return Err(Error::IndexOutOfRange { index: bad, max: k - 1 });
    }
    a.mul(&right_projection(d, band))
}

/// Orthogonal projection onto the right singular vectors in `band`.
pub fn right_projection(d: &SvdResult, band: &[usize]) -> ComplexMatrix {
    let vs = d.v.0.select_columns(band.iter());
    ComplexMatrix(&vs * vs.adjoint())
}

/// Splits the (zero-based) singular indices of `s` into bands
/// `omega^(k+1) < s_i / scale <= omega^k`. Values clamped to zero belong to
/// no band.
pub fn band_indices(s: &[f64], scale: f64, omega: f64) -> Vec<Vec<usize>> {
    let clamped = clamp_small(s);
    let mut bands: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in clamped.iter().enumerate() {
        if x <= 0.0 || scale <= 0.0 {
            continue;
        }
        let k = band_of(x / scale, omega);
        if bands.len() <= k {
            bands.resize(k + 1, Vec::new());
        }
        bands[k].push(i);
    }
    bands
}

/// The `k` with `omega^(k+1) < x <= omega^k`, for `0 < x <= 1`.
pub(crate) fn band_of(x: f64, omega: f64) -> usize {
    let mut k = (x.ln() / omega.ln()).floor().max(0.0) as usize;
    while k > 0 && x > omega.powi(k as i32) {
        k -= 1;
    }
    while x <= omega.powi(k as i32 + 1) {
        k += 1;
    }
    k
}

/// Right projections onto the singular bands of `a` at `omega`, relative to
/// `‖a‖`.
pub fn singular_band_projections(a: &ComplexMatrix, omega: f64) -> Result<Vec<ComplexMatrix>> {
    let d = svd(a)?;
    let s = d.s.prefix();
    Ok(band_indices(s, s[0], omega).iter().map(|b| right_projection(&d, b)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub m: usize,
    pub n: usize,
    /// `s_{m+n-1}(S + T)`.
    pub lhs: f64,
    /// `s_m(S) + s_n(T)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `s_{m+n-1}(S+T) <= s_m(S) + s_n(T)` with one-based indices.
pub fn sv_additivity_check(s: &ComplexMatrix, t: &ComplexMatrix, m: usize, n: usize) -> Result<AdditivityReport> {
    s.same_shape(t)?;
    let k = s.rows().min(s.cols());
    if m == 0 || n == 0 || m + n - 1 > k {
        return Err(Error::IndexOutOfRange { index: (m + n).saturating_sub(1), max: k });
    }
    let sum = singular_values(&s.add(t)?)?;
    let lhs = sum[m + n - 2];
    let rhs = singular_values(s)?[m - 1] + singular_values(t)?[n - 1];
    Ok(AdditivityReport { m, n, lhs, rhs, holds: lhs <= rhs + INEQ_TOL })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoenigReport {
    /// `‖Σ_k (A P_k) ⊗ (B Q_k)‖`.
    pub lhs: f64,
    /// `max_k ‖A P_k‖ ‖B Q_k‖`.
    pub rhs: f64,
    pub band_products: Vec<f64>,
    pub holds: bool,
}

const ORTHO_TOL: f64 = 1e-9;

/// Compares `‖Σ_k (A P_k) ⊗ (B Q_k)‖` with `max_k ‖A P_k‖ ‖B Q_k‖`.
///
/// Only mutual orthogonality of each family is checked. With singular-band
/// projections the inequality is an equality-or-better; with arbitrary
/// orthogonal families it can fail (see the tests).
pub fn koenig_lemma_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    p: &[ComplexMatrix],
    q: &[ComplexMatrix],
) -> Result<KoenigReport> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::DimensionMismatch(format!("{} P-bands against {} Q-bands", p.len(), q.len())));
    }
    check_family(p, a.cols())?;
    check_family(q, b.cols())?;
    let mut total = DMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    let mut band_products = Vec::with_capacity(p.len());
    for (pk, qk) in p.iter().zip(q) {
        let ap = a.mul(pk)?;
        let bq = b.mul(qk)?;
        band_products.push(spectral_norm(&ap)? * spectral_norm(&bq)?);
        total += ap.0.kronecker(&bq.0);
    }
    let lhs = spectral_norm(&ComplexMatrix(total))?;
    let rhs = band_products.iter().copied().fold(0.0, f64::max);
    Ok(KoenigReport { lhs, rhs, band_products, holds: lhs <= rhs + INEQ_TOL })
}

fn check_family(family: &[ComplexMatrix], dim: usize) -> Result<()> {
    for pk in family {
        if pk.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!("projection of shape {:?}, expected {dim}x{dim}", pk.shape())));
        }
    }
    for k in 0..family.len() {
        for l in k + 1..family.len() {
            if family[k].mul(&family[l])?.max_abs() > ORTHO_TOL {
                return Err(Error::NonOrthogonalBands(k, l));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_gaussian_matrix, seeded_rng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(svd(&ComplexMatrix::identity(3)).unwrap().s.prefix(), &[1.0, 1.0, 1.0]);
        let d = ComplexMatrix::diagonal(&[3.0, 0.0, 4.0]).unwrap();
        let s = svd(&d).unwrap().s;
        assert!((s.prefix()[0] - 4.0).abs() < 1e-14 && (s.prefix()[1] - 3.0).abs() < 1e-14);
        assert!(s.prefix()[2].abs() < 1e-14);
    }

    #[test]
    fn random_svd_residuals() {
        let mut rng = seeded_rng(11);
        let a = complex_gaussian_matrix(&mut rng, 6, 4);
        let d = svd(&a).unwrap();
        assert_eq!(d.u.shape(), (6, 4));
        assert_eq!(d.v.shape(), (4, 4));
        let s1 = d.s.prefix()[0];
        assert!(spectral_norm(&a.sub(&d.reconstruct()).unwrap()).unwrap() <= 1e-9 * (1.0 + s1));
        let uu = d.u.adjoint().mul(&d.u).unwrap().sub(&ComplexMatrix::identity(4)).unwrap();
        let vv = d.v.adjoint().mul(&d.v).unwrap().sub(&ComplexMatrix::identity(4)).unwrap();
        assert!(uu.max_abs() < 1e-9 && vv.max_abs() < 1e-9);
    }

    #[test]
    fn json_is_row_major() {
        let m = ComplexMatrix::new(1, 2, vec![c(1.0), Complex64::new(0.0, 2.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[[1.0,0.0],[0.0,2.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#).is_err());
    }

    #[test]
    fn kron_index_order() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 5.0], &[6.0, 7.0], &[8.0, 9.0]]).unwrap();
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (6, 4));
        for i in 0..2 {
            for j in 0..2 {
                for ip in 0..3 {
                    for jp in 0..2 {
                        assert_eq!(k.get(i * 3 + ip, j * 2 + jp), a.get(i, j) * b.get(ip, jp));
                    }
                }
            }
        }
    }

    #[test]
    fn truncation() {
        let mut rng = seeded_rng(3);
        let a = complex_gaussian_matrix(&mut rng, 4, 5);
        let full = schmidt_truncate(&a, &[0, 1, 2, 3]).unwrap();
        assert!(full.sub(&a).unwrap().max_abs() < 1e-9);
        let s = singular_values(&a).unwrap();
        let t = singular_values(&schmidt_truncate(&a, &[1, 3]).unwrap()).unwrap();
        assert!((t[0] - s[1]).abs() < 1e-9 && (t[1] - s[3]).abs() < 1e-9 && t[2] < 1e-9);
        assert!(matches!(schmidt_truncate(&a, &[4]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn bands() {
        assert_eq!(band_of(1.0, 0.5), 0);
        assert_eq!(band_of(0.5, 0.5), 1);
        assert_eq!(band_of(0.26, 0.5), 1);
        assert_eq!(band_of(0.25, 0.5), 2);
        let b = band_indices(&[1.0, 0.5, 0.2, 0.0], 1.0, 0.5);
        assert_eq!(b, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn additivity() {
        let mut rng = seeded_rng(5);
        let s = complex_gaussian_matrix(&mut rng, 4, 4);
        let z = ComplexMatrix::zeros(4, 4);
        let r = sv_additivity_check(&s, &z, 2, 1).unwrap();
        assert!(r.holds && (r.lhs - r.rhs).abs() < 1e-12);
        let t = complex_gaussian_matrix(&mut rng, 4, 4);
        assert!(sv_additivity_check(&s, &t, 1, 1).unwrap().holds);
        assert!(sv_additivity_check(&s, &t, 3, 3).is_err());
        assert!(sv_additivity_check(&s, &t, 0, 1).is_err());
    }

    #[test]
    fn koenig_single_band_is_equality() {
        let mut rng = seeded_rng(8);
        let a = complex_gaussian_matrix(&mut rng, 3, 3);
        let b = complex_gaussian_matrix(&mut rng, 3, 3);
        let i3 = ComplexMatrix::identity(3);
        let r = koenig_lemma_check(&a, &b, &[i3.clone()], &[i3]).unwrap();
        assert!(r.holds && (r.lhs - r.rhs).abs() < 1e-9 * r.rhs);
    }

    #[test]
    fn koenig_rank_disjoint_diagonals() {
        let a = ComplexMatrix::diagonal(&[1.0, 0.0, 0.5, 0.0]).unwrap();
        let b = ComplexMatrix::diagonal(&[0.0, 0.8, 0.0, 0.3]).unwrap();
        let p = [ComplexMatrix::diagonal(&[1.0, 1.0, 0.0, 0.0]).unwrap(), ComplexMatrix::diagonal(&[0.0, 0.0, 1.0, 1.0]).unwrap()];
        let r = koenig_lemma_check(&a, &b, &p, &p).unwrap();
        // bands: (1 * 0.8) and (0.5 * 0.3); the sum has disjoint supports
        assert!((r.lhs - 0.8).abs() < 1e-12 && (r.rhs - 0.8).abs() < 1e-12);
        // crossed pairing: products 0.3 and 0.4, supports still disjoint
        let q = [p[1].clone(), p[0].clone()];
        let r = koenig_lemma_check(&a, &b, &p, &q).unwrap();
        assert!(r.holds && (r.lhs - 0.4).abs() < 1e-12);
        assert_eq!(r.band_products.len(), 2);
        assert!((r.band_products[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn koenig_fails_for_unaligned_projections() {
        // A = B = [1 1] with coordinate projections: each band has norm 1
        // but the sum is [1 1] (x) [1 1] restricted to the diagonal blocks.
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0]]).unwrap();
        let p = [ComplexMatrix::diagonal(&[1.0, 0.0]).unwrap(), ComplexMatrix::diagonal(&[0.0, 1.0]).unwrap()];
        let r = koenig_lemma_check(&a, &a, &p, &p).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-12);
        assert!((r.lhs - 2f64.sqrt()).abs() < 1e-12);
        assert!(!r.holds);
    }

    #[test]
    fn koenig_singular_bands_hold() {
        let mut rng = seeded_rng(21);
        for _ in 0..5 {
            let a = complex_gaussian_matrix(&mut rng, 4, 4);
            let b = complex_gaussian_matrix(&mut rng, 4, 4);
            let mut p = singular_band_projections(&a, 0.5).unwrap();
            let mut q = singular_band_projections(&b, 0.5).unwrap();
            let len = p.len().max(q.len());
            p.resize(len, ComplexMatrix::zeros(4, 4));
            q.resize(len, ComplexMatrix::zeros(4, 4));
            assert!(koenig_lemma_check(&a, &b, &p, &q).unwrap().holds);
        }
    }

    #[test]
    fn non_orthogonal_bands_rejected() {
        let a = ComplexMatrix::identity(2);
        let p = ComplexMatrix::identity(2);
        assert_eq!(koenig_lemma_check(&a, &a, &[p.clone(), p.clone()], &[p.clone(), p]), Err(Error::NonOrthogonalBands(0, 1)));
    }
}
