use calkin_core::blockalg::{factorization_check, pinch, restriction_sandwich, BlockAlgebra};
use calkin_core::elemop::{
    a_upper_bounds_grid, h_lower_bounds, hs_singular_numbers, minimal_representation, recover_first_symbol,
    sqrt_n_lower_bound, verify_witness, ElementaryOp, DEFAULT_OMEGA_GRID, ENVELOPE,
};
use calkin_core::linalg::{kron, singular_values, spectral_norm, sv_additivity_check, svd, ComplexMatrix};
use calkin_core::sampling::{block_diagonal, complex_gaussian_matrix, normalized_matrix, seeded_rng};
use calkin_core::seqkit::top_products;
use proptest::prelude::*;

fn sorted_products(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn svd_invariants(seed in any::<u64>(), rows in 1usize..7, cols in 1usize..7) {
        let a = complex_gaussian_matrix(&mut seeded_rng(seed), rows, cols);
        let d = svd(&a).unwrap();
        let k = rows.min(cols);
        let s = d.s.prefix();
        prop_assert_eq!(s.len(), k);
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]) && s[k - 1] >= 0.0);
        let err = spectral_norm(&a.sub(&d.reconstruct()).unwrap()).unwrap();
        prop_assert!(err <= 1e-9 * (1.0 + s[0]));
        let uu = d.u.adjoint().mul(&d.u).unwrap().sub(&ComplexMatrix::identity(k)).unwrap();
        let vv = d.v.adjoint().mul(&d.v).unwrap().sub(&ComplexMatrix::identity(k)).unwrap();
        prop_assert!(uu.max_abs() <= 1e-9 && vv.max_abs() <= 1e-9);
        prop_assert_eq!(svd(&a).unwrap(), d);
    }

    #[test]
    fn kronecker_product_law(seed in any::<u64>(), m in 2usize..6, n in 2usize..6) {
        let mut rng = seeded_rng(seed);
        let a = complex_gaussian_matrix(&mut rng, m, m);
        let b = complex_gaussian_matrix(&mut rng, n, n);
        let law = sorted_products(&singular_values(&a).unwrap(), &singular_values(&b).unwrap());
        let got = singular_values(&kron(&a, &b)).unwrap();
        for (x, y) in got.iter().zip(&law) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y));
        }
    }

    #[test]
    fn weyl_additivity(seed in any::<u64>(), k in 1usize..7, m in 1usize..7, n in 1usize..7) {
        prop_assume!(m + n - 1 <= k);
        let mut rng = seeded_rng(seed);
        let s = complex_gaussian_matrix(&mut rng, k, k);
        let t = complex_gaussian_matrix(&mut rng, k, k);
        prop_assert!(sv_additivity_check(&s, &t, m, n).unwrap().holds);
    }

    #[test]
    fn hs_numbers_follow_the_product_law(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = seeded_rng(seed);
        let a = complex_gaussian_matrix(&mut rng, k, k);
        let b = complex_gaussian_matrix(&mut rng, k, k);
        let s = hs_singular_numbers(&ElementaryOp::single(a.clone(), b.clone()).unwrap()).unwrap();
        let law = sorted_products(&singular_values(&a).unwrap(), &singular_values(&b).unwrap());
        for (x, y) in s.prefix().iter().zip(&law) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y));
        }
    }

    #[test]
    fn bounds_sandwich_and_envelope(seed in any::<u64>(), k in 1usize..6) {
        let mut rng = seeded_rng(seed);
        let a = normalized_matrix(&mut rng, k, k);
        let b = normalized_matrix(&mut rng, k, k);
        let count = k * k;
        let upper = a_upper_bounds_grid(&a, &b, &DEFAULT_OMEGA_GRID, count).unwrap();
        let products = {
            let mut v: Vec<f64> = top_products(&singular_values(&a).unwrap(), &singular_values(&b).unwrap(), count)
                .iter().map(|t| t.value).collect();
            v.resize(count, 0.0);
            v
        };
        for n in 1..=count {
            prop_assert!(upper[n - 1].value <= ENVELOPE * products[n - 1] + 1e-9);
            let lower = sqrt_n_lower_bound(&a, &b, n).unwrap();
            prop_assert!(lower.value <= upper[n - 1].value + 1e-9);
        }
        for bound in &upper {
            prop_assert!(verify_witness(bound, &a, &b).unwrap());
        }
    }

    #[test]
    fn random_admissible_weights(seed in any::<u64>(), w in prop::collection::vec(0.0..1.0f64, 4)) {
        let mut rng = seeded_rng(seed);
        let a = normalized_matrix(&mut rng, 4, 4);
        let b = normalized_matrix(&mut rng, 4, 4);
        let norm4 = w.iter().map(|x| x.powi(4)).sum::<f64>().powf(0.25);
        prop_assume!(norm4 > 0.0);
        let lambda: Vec<f64> = w.iter().map(|x| x / norm4).collect();
        let lower = h_lower_bounds(&a, &b, &lambda, &lambda).unwrap();
        let upper = a_upper_bounds_grid(&a, &b, &DEFAULT_OMEGA_GRID, 16).unwrap();
        for (l, u) in lower.iter().zip(&upper) {
            prop_assert!(l.value <= u.value + 1e-9);
        }
    }

    #[test]
    fn pinching_is_a_contractive_projection(seed in any::<u64>(), blocks in prop::collection::vec(1usize..4, 1..4)) {
        let alg = BlockAlgebra::new(blocks).unwrap();
        let mut rng = seeded_rng(seed);
        let k = alg.dim();
        let x = complex_gaussian_matrix(&mut rng, k, k);
        let p = pinch(&alg, &x).unwrap();
        prop_assert!(spectral_norm(&p).unwrap() <= spectral_norm(&x).unwrap() + 1e-12);
        prop_assert_eq!(pinch(&alg, &p).unwrap(), p);
        let a = block_diagonal(&mut rng, alg.blocks());
        let b = block_diagonal(&mut rng, alg.blocks());
        prop_assert!(factorization_check(&alg, &a, &b, &x).unwrap().holds);
        prop_assert!(restriction_sandwich(&alg, &a, &b, 2.0 / 3.0).unwrap().holds);
    }
}

#[test]
fn recovery_after_minimization() {
    let mut rng = seeded_rng(99);
    for _ in 0..5 {
        let symbols: Vec<_> =
            (0..3).map(|_| (complex_gaussian_matrix(&mut rng, 5, 5), complex_gaussian_matrix(&mut rng, 5, 5))).collect();
        let phi = minimal_representation(&ElementaryOp::new(symbols).unwrap()).unwrap();
        assert_eq!(phi.len(), 3);
        let rec = recover_first_symbol(&phi, 0, 7).unwrap();
        assert!(rec.residual < 1e-8);
        assert!(rec.inequality_holds);
    }
}
