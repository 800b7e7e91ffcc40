use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sjg_core::group::{act_extended, random_jacobi_point, random_symplectic};
use sjg_core::inverse::{schur_inverse, Partition2x2};
use sjg_core::matlib::{kron, lu_det, lu_inverse, mat_exp};
use sjg_core::{Chart, Mat, SymMat};

fn square(max: usize) -> impl Strategy<Value = Mat> {
    (1..=max).prop_flat_map(|d| {
        prop::collection::vec(-1.0f64..1.0, d * d)
            .prop_map(move |v| Mat::from_vec(d, d, v).unwrap())
    })
}

fn square_of(d: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-1.0f64..1.0, d * d).prop_map(move |v| Mat::from_vec(d, d, v).unwrap())
}

fn dominant(d: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-1.0f64..1.0, d * d).prop_map(move |v| {
        let mut m = Mat::from_vec(d, d, v).unwrap();
        for i in 0..d {
            m[(i, i)] += d as f64;
        }
        m
    })
}

proptest! {
    #[test]
    fn packed_index_roundtrip(n in 1usize..8, seed in any::<u64>()) {
        let len = n * (n + 1) / 2;
        let k = (seed % len as u64) as usize;
        let (i, j) = SymMat::unpack_index(n, k);
        prop_assert!(i <= j);
        prop_assert_eq!(SymMat::packed_index(n, i, j), k);
        prop_assert_eq!(SymMat::packed_index(n, j, i), k);
    }

    #[test]
    fn symmat_roundtrip(n in 1usize..6, seed in any::<u64>()) {
        let upper: Vec<f64> = (0..n * (n + 1) / 2).map(|k| (seed.wrapping_mul(k as u64 + 1) % 1000) as f64 / 7.0).collect();
        let s = SymMat::from_upper(n, upper).unwrap();
        prop_assert_eq!(SymMat::from_mat(&s.to_mat()).unwrap(), s);
    }

    #[test]
    fn det_is_multiplicative(a in dominant(4), b in dominant(4)) {
        let lhs = lu_det(&a.matmul(&b)).unwrap();
        let rhs = lu_det(&a).unwrap() * lu_det(&b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
    }

    #[test]
    fn inverse_is_two_sided(a in dominant(6)) {
        let inv = lu_inverse(&a).unwrap();
        prop_assert!(a.matmul(&inv).max_abs_diff(&Mat::identity(6)) < 1e-12);
        prop_assert!(inv.matmul(&a).max_abs_diff(&Mat::identity(6)) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(
        (a, c) in (1usize..=3).prop_flat_map(|d| (dominant(d), dominant(d))),
        (b, d) in (1usize..=3).prop_flat_map(|d| (square_of(d), square_of(d))),
    ) {
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn kron_inverse(a in dominant(3), b in dominant(2)) {
        let lhs = lu_inverse(&kron(&a, &b)).unwrap();
        let rhs = kron(&lu_inverse(&a).unwrap(), &lu_inverse(&b).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn schur_matches_lu(a in dominant(8), m in 1usize..8) {
        let schur = schur_inverse(&Partition2x2::split(&a, m).unwrap()).unwrap();
        prop_assert!(schur.max_abs_diff(&lu_inverse(&a).unwrap()) < 1e-10);
    }

    #[test]
    fn exp_of_negation_is_inverse(a in square(4)) {
        let e = mat_exp(&a).unwrap();
        let f = mat_exp(&a.scale(-1.0)).unwrap();
        prop_assert!(e.matmul(&f).max_abs_diff(&Mat::identity(a.rows())) < 1e-10);
    }

    #[test]
    fn det_of_exp_is_exp_of_trace(a in square(4)) {
        let det = lu_det(&mat_exp(&a).unwrap()).unwrap();
        prop_assert!((det / a.trace().exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn action_composes(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g1 = random_symplectic(n, 0.5, &mut rng).unwrap();
        let g2 = random_symplectic(n, 0.5, &mut rng).unwrap();
        let pt = random_jacobi_point(n, true, &mut rng);
        let chart = Chart::new(n, true);
        let twice = chart.coordinates(&act_extended(&g2, &act_extended(&g1, &pt).unwrap()).unwrap()).unwrap();
        let once = chart.coordinates(&act_extended(&g2.compose(&g1), &pt).unwrap()).unwrap();
        for (a, b) in twice.iter().zip(&once) {
            prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        }
    }
}
