use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calkin::check_omega;
use crate::linalg::{
    band_indices, clamp_small, kron, numerical_rank, schmidt_truncate_with, singular_values, spectral_norm, svd,
    ComplexMatrix, SvdResult,
};
use crate::seqkit::top_products;
use crate::{Error, Result, INEQ_TOL};

/// Best constant `min_w 1/(w^2 (1 - w))`, attained at `w = 2/3`.
pub const ENVELOPE: f64 = 6.75;

/// Default band ratios; `2/3` realises [`ENVELOPE`].
pub const DEFAULT_OMEGA_GRID: [f64; 5] = [0.5, 0.6, 2.0 / 3.0, 0.7, 0.75];

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    UpperOnApproxNumbers,
    LowerOnHilbertNumbers,
}

/// Contractions around `M_{A,B}` whose composite is the diagonal
/// multiplier `X -> D_λ S_A X S_B D_μ`: `F(X) = f_left X f_right` and
/// `G(Y) = g_left Y g_right`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFactors {
    pub f_left: ComplexMatrix,
    pub f_right: ComplexMatrix,
    pub g_left: ComplexMatrix,
    pub g_right: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `Σ_{k+l<=level} M_{A_k,B_l}` over singular bands at `omega` of the
    /// matrices divided by `scale_a`, `scale_b`. `level: None` is the zero
    /// approximant, whose residual is `‖A‖‖B‖` itself.
    BlockApproximant {
        omega: f64,
        level: Option<usize>,
        rank: usize,
        residual_terms: Vec<f64>,
        clamp_slack: f64,
        scale_a: f64,
        scale_b: f64,
    },
    TestFactorization { lambda: Vec<f64>, mu: Vec<f64>, factors: Box<TestFactors> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedBound {
    /// One-based.
    pub index: usize,
    pub value: f64,
    pub direction: Direction,
    pub witness: Witness,
}

struct Banding {
    norms: Vec<f64>,
    counts: Vec<usize>,
    bands: Vec<Vec<usize>>,
    dropped: f64,
    norm: f64,
}

fn banding(d: &SvdResult, omega: f64) -> Banding {
    let s = d.s.prefix();
    let clamped = clamp_small(s);
    let dropped = s.iter().zip(&clamped).filter(|(_, c)| **c == 0.0).map(|(x, _)| *x).fold(0.0, f64::max);
    let bands = band_indices(s, 1.0, omega);
    let norms = bands.iter().map(|b| b.first().map_or(0.0, |&i| s[i])).collect();
    let counts = bands.iter().map(Vec::len).collect();
    Banding { norms, counts, bands, dropped, norm: s[0] }
}

struct Level {
    rank: usize,
    terms: Vec<f64>,
}

/// Rank of `Φ_n` and residual terms `max_k ‖A_k‖‖B_{N-k}‖`, `N > n`, for
/// every level `n` with a nonzero residual plus the first exhausted one.
fn levels(ba: &Banding, bb: &Banding) -> Vec<Level> {
    let (la, lb) = (ba.norms.len(), bb.norms.len());
    if la == 0 || lb == 0 {
        return Vec::new();
    }
    let top = la + lb - 2;
    let diag_max: Vec<f64> = (0..=top)
        .map(|big_n| {
            (big_n.saturating_sub(lb - 1)..=big_n.min(la - 1))
                .map(|k| ba.norms[k] * bb.norms[big_n - k])
                .fold(0.0, f64::max)
        })
        .collect();
    let mut rank = 0;
    (0..=top)
        .map(|n| {
            for k in n.saturating_sub(lb - 1)..=n.min(la - 1) {
                rank += ba.counts[k] * bb.counts[n - k];
            }
            Level { rank, terms: diag_max[n + 1..].to_vec() }
        })
        .collect()
}

fn norm_checked(d: &SvdResult) -> Result<f64> {
    let norm = d.s.prefix()[0];
    if norm > 1.0 + NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(norm)
}

/// Upper bounds on `a_n(M_{A,B})`, `n = 1..=count`, from the banded block
/// approximant at `omega`. Requires `‖A‖, ‖B‖ <= 1`.
pub fn a_upper_bounds(a: &ComplexMatrix, b: &ComplexMatrix, omega: f64, count: usize) -> Result<Vec<CertifiedBound>> {
    check_omega(omega)?;
    let (da, db) = (svd(a)?, svd(b)?);
    norm_checked(&da)?;
    norm_checked(&db)?;
    Ok(upper_from_svd(&da, &db, omega, count, 1.0, 1.0))
}

fn upper_from_svd(
    da: &SvdResult,
    db: &SvdResult,
    omega: f64,
    count: usize,
    scale_a: f64,
    scale_b: f64,
) -> Vec<CertifiedBound> {
    let (ba, bb) = (banding(da, omega), banding(db, omega));
    let slack = ba.dropped * bb.norm + ba.norm * bb.dropped;
    let scale = scale_a * scale_b;
    // (level, rank, terms) candidates, including the zero approximant
    let mut candidates: Vec<(Option<usize>, usize, Vec<f64>, f64)> = vec![(None, 0, vec![ba.norm * bb.norm], 0.0)];
    for (n, level) in levels(&ba, &bb).into_iter().enumerate() {
        candidates.push((Some(n), level.rank, level.terms, slack));
    }
    let values: Vec<f64> = candidates.iter().map(|c| scale * (c.2.iter().sum::<f64>() + c.3)).collect();
    (1..=count)
        .map(|index| {
            let best = (0..candidates.len())
                .filter(|&c| candidates[c].1 < index)
                .min_by(|&x, &y| values[x].total_cmp(&values[y]))
                .expect("the zero approximant always qualifies");
            let (level, rank, terms, clamp_slack) = candidates[best].clone();
            CertifiedBound {
                index,
                value: values[best],
                direction: Direction::UpperOnApproxNumbers,
                witness: Witness::BlockApproximant {
                    omega,
                    level,
                    rank,
                    residual_terms: terms,
                    clamp_slack,
                    scale_a,
                    scale_b,
                },
            }
        })
        .collect()
}

/// Per-index minimum of [`a_upper_bounds`] over `grid`, for arbitrary
/// `A`, `B`: both are normalized first and the bounds rescaled.
pub fn a_upper_bounds_grid(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    grid: &[f64],
    count: usize,
) -> Result<Vec<CertifiedBound>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty omega grid".into()));
    }
    for &w in grid {
        check_omega(w)?;
    }
    let (na, nb) = (spectral_norm(a)?, spectral_norm(b)?);
    if na == 0.0 || nb == 0.0 {
        let zero = |index| CertifiedBound {
            index,
            value: 0.0,
            direction: Direction::UpperOnApproxNumbers,
            witness: Witness::BlockApproximant {
                omega: grid[0],
                level: None,
                rank: 0,
                residual_terms: vec![0.0],
                clamp_slack: 0.0,
                scale_a: na,
                scale_b: nb,
            },
        };
        return Ok((1..=count).map(zero).collect());
    }
    let da = svd(&a.scaled(Complex64::new(1.0 / na, 0.0)))?;
    let db = svd(&b.scaled(Complex64::new(1.0 / nb, 0.0)))?;
    let mut best = upper_from_svd(&da, &db, grid[0], count, na, nb);
    for &w in &grid[1..] {
        for (cur, new) in best.iter_mut().zip(upper_from_svd(&da, &db, w, count, na, nb)) {
            if new.value < cur.value {
                *cur = new;
            }
        }
    }
    Ok(best)
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    x.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().copied().fold(0.0, f64::max)
}

/// `‖λ‖_4 ‖μ‖_4 <= 1`, or the `ℓ_2 x ℓ_∞` variant in either order.
fn check_admissible(lambda: &[f64], mu: &[f64]) -> Result<()> {
    if lambda.iter().chain(mu).any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::NormViolation("weights must be finite and non-negative".into()));
    }
    let l4 = lp_norm(lambda, 4.0) * lp_norm(mu, 4.0);
    let l2_inf = (lp_norm(lambda, 2.0) * sup_norm(mu)).min(sup_norm(lambda) * lp_norm(mu, 2.0));
    if l4.min(l2_inf) > 1.0 + NORM_TOL {
        return Err(Error::NormViolation(format!(
            "‖λ‖_4‖μ‖_4 = {l4} and the ℓ_2 x ℓ_∞ product {l2_inf} both exceed 1"
        )));
    }
    Ok(())
}

fn diag_scaled_rows(d: &[f64], m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= Complex64::new(d[i], 0.0);
    }
    out
}

fn padded(x: &[f64], len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().copied().take(len).collect();
    v.resize(len, 0.0);
    v
}

/// Lower bounds `h_n(M_{A,B}) >= ((λ s(A)) ⊗ (μ s(B)))(n)`. `lambda[i]`
/// multiplies the `i`-th singular value of `A` (zero-based), `mu[j]` that
/// of `B`; missing entries are zero.
pub fn h_lower_bounds(a: &ComplexMatrix, b: &ComplexMatrix, lambda: &[f64], mu: &[f64]) -> Result<Vec<CertifiedBound>> {
    check_admissible(lambda, mu)?;
    let (da, db) = (svd(a)?, svd(b)?);
    let (ka, kb) = (da.s.len(), db.s.len());
    let (lambda, mu) = (padded(lambda, ka), padded(mu, kb));
    let factors = TestFactors {
        f_left: da.v.clone(),
        f_right: db.u.adjoint(),
        g_left: ComplexMatrix::from_dmatrix(diag_scaled_rows(&lambda, da.u.adjoint().as_dmatrix()))?,
        g_right: ComplexMatrix::from_dmatrix(diag_scaled_rows(&mu, db.v.adjoint().as_dmatrix()).adjoint())?,
    };
    let mut ls: Vec<f64> = lambda.iter().zip(da.s.prefix()).map(|(l, s)| l * s).collect();
    let mut ms: Vec<f64> = mu.iter().zip(db.s.prefix()).map(|(m, s)| m * s).collect();
    ls.sort_by(|x, y| y.total_cmp(x));
    ms.sort_by(|x, y| y.total_cmp(x));
    let mut values: Vec<f64> = top_products(&ls, &ms, ka * kb).iter().map(|t| t.value).collect();
    values.resize(ka * kb, 0.0);
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(n, value)| CertifiedBound {
            index: n + 1,
            value,
            direction: Direction::LowerOnHilbertNumbers,
            witness: Witness::TestFactorization {
                lambda: lambda.clone(),
                mu: mu.clone(),
                factors: Box::new(factors.clone()),
            },
        })
        .collect())
}

/// `h_n(M_{A,B}) >= (s(A) ⊗ s(B))(n) / √n`, with weights `n^(-1/4)` on the
/// rows and columns used by the top `n` products.
pub fn sqrt_n_lower_bound(a: &ComplexMatrix, b: &ComplexMatrix, n: usize) -> Result<CertifiedBound> {
    let (sa, sb) = (singular_values(a)?, singular_values(b)?);
    let max = sa.len() * sb.len();
    if n == 0 || n > max {
        return Err(Error::IndexOutOfRange { index: n, max });
    }
    let top = top_products(&sa, &sb, n);
    let rows = top.iter().map(|t| t.i + 1).max().unwrap_or(0);
    let cols = top.iter().map(|t| t.j + 1).max().unwrap_or(0);
    let w = (n as f64).powf(-0.25);
    let lambda: Vec<f64> = (0..sa.len()).map(|i| if i < rows { w } else { 0.0 }).collect();
    let mu: Vec<f64> = (0..sb.len()).map(|j| if j < cols { w } else { 0.0 }).collect();
    Ok(h_lower_bounds(a, b, &lambda, &mu)?.swap_remove(n - 1))
}

/// `λ = μ = e_1`: the lower bound at `n = 1` is `‖A‖‖B‖`.
pub fn norm_lower_bound(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<CertifiedBound> {
    Ok(h_lower_bounds(a, b, &[1.0], &[1.0])?.swap_remove(0))
}

/// Independent re-check of a witness against the matrices it was built
/// from. Returns whether every recorded claim reproduces.
pub fn verify_witness(bound: &CertifiedBound, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<bool> {
    match (&bound.witness, bound.direction) {
        (
            Witness::BlockApproximant { omega, level, rank, residual_terms, clamp_slack, scale_a, scale_b },
            Direction::UpperOnApproxNumbers,
        ) => verify_upper(bound, a, b, *omega, *level, *rank, residual_terms, *clamp_slack, *scale_a, *scale_b),
        (Witness::TestFactorization { lambda, mu, factors }, Direction::LowerOnHilbertNumbers) => {
            verify_lower(bound, a, b, lambda, mu, factors)
        }
        _ => Ok(false),
    }
}

#[allow(clippy::too_many_arguments)]
fn verify_upper(
    bound: &CertifiedBound,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    omega: f64,
    level: Option<usize>,
    rank: usize,
    terms: &[f64],
    slack: f64,
    scale_a: f64,
    scale_b: f64,
) -> Result<bool> {
    let scale = scale_a * scale_b;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()));
    if rank >= bound.index {
        return Ok(false);
    }
    if scale == 0.0 {
        return Ok(bound.value == 0.0 && (spectral_norm(a)? == 0.0 || spectral_norm(b)? == 0.0));
    }
    let an = a.scaled(Complex64::new(1.0 / scale_a, 0.0));
    let bn = b.scaled(Complex64::new(1.0 / scale_b, 0.0));
    let (da, db) = (svd(&an)?, svd(&bn)?);
    let Some(level) = level else {
        let norm = da.s.prefix()[0] * db.s.prefix()[0];
        return Ok(close(terms.iter().sum::<f64>(), norm) && bound.value >= scale * norm - INEQ_TOL);
    };
    let (ba, bb) = (banding(&da, omega), banding(&db, omega));
    let pieces_a = ba.bands.iter().map(|band| schmidt_truncate_with(&an, &da, band)).collect::<Result<Vec<_>>>()?;
    let pieces_b = bb.bands.iter().map(|band| schmidt_truncate_with(&bn, &db, band)).collect::<Result<Vec<_>>>()?;
    let norms_a = pieces_a.iter().map(spectral_norm).collect::<Result<Vec<_>>>()?;
    let norms_b = pieces_b.iter().map(spectral_norm).collect::<Result<Vec<_>>>()?;

    // the approximant itself, as a matrix on vec(X)
    let (rows, cols) = (an.rows() * bn.cols(), an.cols() * bn.rows());
    let mut approx = DMatrix::zeros(rows, cols);
    for (k, pa) in pieces_a.iter().enumerate() {
        for (l, pb) in pieces_b.iter().enumerate() {
            if k + l <= level {
                approx += kron(&pb.transpose(), pa).into_dmatrix();
            }
        }
    }
    let approx_rank = numerical_rank(&singular_values(&ComplexMatrix::from_dmatrix(approx)?)?);
    if approx_rank > rank {
        return Ok(false);
    }

    let top = norms_a.len() + norms_b.len() - 1;
    let recomputed: Vec<f64> = (level + 1..top)
        .map(|big_n| {
            (0..norms_a.len())
                .filter(|&k| big_n >= k && big_n - k < norms_b.len())
                .map(|k| norms_a[k] * norms_b[big_n - k])
                .fold(0.0, f64::max)
        })
        .collect();
    if recomputed.len() != terms.len() || recomputed.iter().zip(terms).any(|(x, y)| !close(*x, *y)) {
        return Ok(false);
    }
    Ok(bound.value >= scale * (recomputed.iter().sum::<f64>() + slack) - INEQ_TOL)
}

fn verify_lower(
    bound: &CertifiedBound,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    lambda: &[f64],
    mu: &[f64],
    f: &TestFactors,
) -> Result<bool> {
    if check_admissible(lambda, mu).is_err() {
        return Ok(false);
    }
    let near_identity = |m: ComplexMatrix| -> bool {
        let n = m.rows();
        m.is_square() && m.sub(&ComplexMatrix::identity(n)).is_ok_and(|d| d.max_abs() <= 1e-9)
    };
    // F is a contraction: both sides are isometric
    if !near_identity(f.f_left.adjoint().mul(&f.f_left)?) || !near_identity(f.f_right.mul(&f.f_right.adjoint())?) {
        return Ok(false);
    }
    // G(Y) = D_λ W Y W' D_μ with co-isometric W, W'
    let gl = f.g_left.mul(&f.g_left.adjoint())?;
    let gr = f.g_right.adjoint().mul(&f.g_right)?;
    let l2: Vec<f64> = lambda.iter().map(|x| x * x).collect();
    let m2: Vec<f64> = mu.iter().map(|x| x * x).collect();
    if gl.sub(&ComplexMatrix::diagonal(&l2)?)?.max_abs() > 1e-9 || gr.sub(&ComplexMatrix::diagonal(&m2)?)?.max_abs() > 1e-9 {
        return Ok(false);
    }
    let left = f.g_left.mul(a)?.mul(&f.f_left)?;
    let right = f.f_right.mul(b)?.mul(&f.g_right)?;
    let s = singular_values(&kron(&right.transpose(), &left))?;
    let Some(&sn) = s.get(bound.index - 1) else {
        return Ok(false);
    };
    Ok((sn - bound.value).abs() <= 1e-9 * (1.0 + sn))
}

/// One row of a bound report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    /// `ENVELOPE * (s(A) ⊗ s(B))(index)`.
    pub envelope: f64,
}

/// Best lower (norm and `√n` choices) and grid upper bounds for every index
/// of `M_{A,B}`.
pub fn bound_table(a: &ComplexMatrix, b: &ComplexMatrix, grid: &[f64]) -> Result<Vec<BoundRow>> {
    let (sa, sb) = (singular_values(a)?, singular_values(b)?);
    let count = sa.len() * sb.len();
    let upper = a_upper_bounds_grid(a, b, grid, count)?;
    let mut products: Vec<f64> = top_products(&sa, &sb, count).iter().map(|t| t.value).collect();
    products.resize(count, 0.0);
    (1..=count)
        .map(|n| {
            let mut lower = sqrt_n_lower_bound(a, b, n)?.value;
            if n == 1 {
                lower = lower.max(norm_lower_bound(a, b)?.value);
            }
            Ok(BoundRow { index: n, lower, upper: upper[n - 1].value, envelope: ENVELOPE * products[n - 1] })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_gaussian_matrix, normalized_matrix, seeded_rng};

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::diagonal(d).unwrap()
    }

    #[test]
    fn diagonal_closed_form() {
        let a = diag(&[1.0, 0.5, 0.25, 0.125]);
        let bounds = a_upper_bounds(&a, &a, 0.5, 17).unwrap();
        // bands hold one value each: ‖A_k‖ = 2^-k, K_k = 1, ranks M~_n = (n+1)(n+2)/2 for n <= 3
        let mut checked = 0;
        for bound in &bounds {
            if let Witness::BlockApproximant { level: Some(n), rank, residual_terms, .. } = &bound.witness {
                let exact: f64 = (n + 1..=6).map(|big_n| 0.5f64.powi(big_n as i32)).sum();
                assert!((bound.value - exact).abs() < 1e-15, "{bound:?}");
                assert!(bound.value <= 2.0 * 0.5f64.powi(*n as i32 + 1));
                assert_eq!(residual_terms.len(), 6 - n);
                if *n <= 3 {
                    assert_eq!(*rank, (n + 1) * (n + 2) / 2);
                }
                checked += 1;
            }
        }
        assert!(checked > 0);
        // past the last band the approximant is exact, of rank rank(A) rank(B)
        assert!(bounds[15].value > 0.0);
        assert_eq!(bounds[16].value, 0.0);
        assert!(matches!(bounds[16].witness, Witness::BlockApproximant { rank: 16, .. }));
    }

    #[test]
    fn exhausted_bands_give_zero() {
        let a = diag(&[1.0, 0.5, 0.0]);
        let b = diag(&[0.75, 0.0, 0.0]);
        let bounds = a_upper_bounds(&a, &b, 0.5, 9).unwrap();
        for bound in &bounds[2..] {
            assert_eq!(bound.value, 0.0);
            assert!(matches!(bound.witness, Witness::BlockApproximant { rank: 2, .. }));
        }
        for bound in &bounds {
            assert!(verify_witness(bound, &a, &b).unwrap(), "{bound:?}");
        }
    }

    #[test]
    fn unnormalized_rejected() {
        let a = diag(&[2.0, 0.0]);
        assert_eq!(a_upper_bounds(&a, &a, 0.5, 4).unwrap_err(), Error::NotNormalized(2.0));
    }

    #[test]
    fn envelope_after_grid() {
        let mut rng = seeded_rng(40);
        for _ in 0..5 {
            let a = complex_gaussian_matrix(&mut rng, 4, 4);
            let b = complex_gaussian_matrix(&mut rng, 4, 4);
            for row in bound_table(&a, &b, &DEFAULT_OMEGA_GRID).unwrap() {
                assert!(row.lower <= row.upper + INEQ_TOL, "{row:?}");
                assert!(row.upper <= row.envelope + INEQ_TOL, "{row:?}");
            }
        }
    }

    #[test]
    fn witnesses_reverify() {
        let mut rng = seeded_rng(41);
        let a = normalized_matrix(&mut rng, 3, 3);
        let b = normalized_matrix(&mut rng, 3, 3);
        for bound in a_upper_bounds_grid(&a, &b, &DEFAULT_OMEGA_GRID, 9).unwrap() {
            assert!(verify_witness(&bound, &a, &b).unwrap(), "{bound:?}");
        }
        for bound in h_lower_bounds(&a, &b, &[0.8, 0.5], &[0.9, 0.3, 0.2]).unwrap() {
            assert!(verify_witness(&bound, &a, &b).unwrap(), "{bound:?}");
        }
        let mut forged = norm_lower_bound(&a, &b).unwrap();
        forged.value *= 1.1;
        assert!(!verify_witness(&forged, &a, &b).unwrap());
    }

    #[test]
    fn norm_equality_case() {
        let mut rng = seeded_rng(42);
        let a = complex_gaussian_matrix(&mut rng, 4, 4);
        let b = complex_gaussian_matrix(&mut rng, 4, 4);
        let h1 = norm_lower_bound(&a, &b).unwrap();
        let expected = spectral_norm(&a).unwrap() * spectral_norm(&b).unwrap();
        assert!((h1.value - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn sqrt_n_bound_matches_product_over_root_n() {
        let mut rng = seeded_rng(43);
        let a = complex_gaussian_matrix(&mut rng, 3, 3);
        let b = complex_gaussian_matrix(&mut rng, 3, 3);
        let (sa, sb) = (singular_values(&a).unwrap(), singular_values(&b).unwrap());
        let mut products: Vec<f64> = sa.iter().flat_map(|x| sb.iter().map(move |y| x * y)).collect();
        products.sort_by(|x, y| y.total_cmp(x));
        for n in 1..=9 {
            let bound = sqrt_n_lower_bound(&a, &b, n).unwrap();
            let expected = products[n - 1] / (n as f64).sqrt();
            assert!((bound.value - expected).abs() < 1e-12 * (1.0 + expected), "n = {n}");
            assert!(verify_witness(&bound, &a, &b).unwrap());
        }
    }

    #[test]
    fn weights_must_be_admissible() {
        let a = diag(&[1.0, 1.0]);
        assert!(matches!(h_lower_bounds(&a, &a, &[1.0, 1.0], &[1.0, 1.0]), Err(Error::NormViolation(_))));
        // ℓ_2 x ℓ_∞ is accepted even though ‖λ‖_4 ‖μ‖_4 > 1
        let r = 0.5f64.sqrt();
        assert!(h_lower_bounds(&a, &a, &[r, r], &[1.0, 1.0]).is_ok());
        assert!(h_lower_bounds(&a, &a, &[-0.1], &[1.0]).is_err());
    }
}
