use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sjg_core::group::random_jacobi_point;
use sjg_core::inverse::*;
use sjg_core::matlib::{lu_det, lu_inverse};
use sjg_core::metric::metric_matrix;
use sjg_core::{Chart, CrossConvention, Error, JacobiPoint, Mat, MetricParams};

fn random_params(rng: &mut ChaCha8Rng) -> MetricParams {
    MetricParams::new(
        rng.gen_range(0.1..10.0),
        rng.gen_range(0.1..10.0),
        rng.gen_range(0.1..10.0),
    )
    .unwrap()
}

fn residual(a: &Mat, b: &Mat) -> f64 {
    a.matmul(b).max_abs_diff(&Mat::identity(a.rows()))
}

#[test]
fn schur_matches_lu_on_random_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let d = rng.gen_range(2..=8);
        let m = rng.gen_range(1..d);
        let mut a = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
            }
            a[(i, i)] += d as f64;
        }
        let schur = schur_inverse(&Partition2x2::split(&a, m).unwrap()).unwrap();
        let lu = lu_inverse(&a).unwrap();
        assert!(schur.max_abs_diff(&lu) < 1e-10);
    }
}

#[test]
fn schur_on_spd_four_two_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut b = Mat::zeros(6, 6);
    for i in 0..6 {
        for j in 0..6 {
            b[(i, j)] = rng.gen_range(-1.0..1.0);
        }
    }
    let a = &b.matmul(&b.transpose()) + &Mat::identity(6);
    let schur = schur_inverse(&Partition2x2::split(&a, 4).unwrap()).unwrap();
    assert!(schur.max_abs_diff(&lu_inverse(&a).unwrap()) < 1e-10);
}

#[test]
fn xjn_closed_inverse_against_forward_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=3 {
        for _ in 0..300 {
            let params = random_params(&mut rng);
            let pt = random_jacobi_point(n, false, &mut rng);
            let inv = closed_inverse_xjn(params, &pt).unwrap();
            let fwd = qp_block(params, &pt).unwrap();
            assert!(residual(&fwd, &inv.qp_inverse()) < 1e-10);

            let chart = Chart::new(n, false);
            let g = metric_matrix(params, &pt, &chart).unwrap().to_mat();
            let closed = closed_chart_inverse(params, &pt, CrossConvention::QuadraticForm).unwrap();
            assert!(residual(&g, &closed) < 1e-9, "n = {n}");
        }
    }
}

#[test]
fn xjn_full_vec_siegel_block_is_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=3 {
        let params = random_params(&mut rng);
        let pt = random_jacobi_point(n, false, &mut rng);
        let y_inv = lu_inverse(&pt.y().to_mat()).unwrap();
        let fwd = sjg_core::matlib::kron(&y_inv, &y_inv).scale(params.alpha);
        let inv = closed_inverse_xjn(params, &pt).unwrap().siegel;
        assert!(residual(&fwd, &inv) < 1e-10);
    }
}

fn n1_scalars(pt: &JacobiPoint) -> (f64, f64, f64, f64) {
    (pt.x().get(0, 0), pt.y().get(0, 0), pt.p()[0], pt.q()[0])
}

#[test]
fn xj1_extended_block_against_forward() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let params = random_params(&mut rng);
        let pt = random_jacobi_point(1, true, &mut rng);
        let (x, y, p, q) = n1_scalars(&pt);
        let fwd = pqk_block(params, &pt, CrossConvention::QuadraticForm).unwrap();
        let a11 = fwd.block(0, 0, 2, 2);
        assert!(residual(&a11, &closed_inverse_xj1_extended(params, x, y, p, q)) < 1e-10);
        assert!(residual(&fwd, &closed_inverse_xj1_extended_qpk(params, x, y, p, q)) < 1e-10);
    }
}

#[test]
fn conventions_agree_for_n1() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let params = random_params(&mut rng);
        let pt = random_jacobi_point(1, true, &mut rng);
        let a = pqk_block(params, &pt, CrossConvention::QuadraticForm).unwrap();
        let b = pqk_block(params, &pt, CrossConvention::Transposed).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn quadratic_form_block_is_chart_block() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=3 {
        for _ in 0..50 {
            let params = random_params(&mut rng);
            let pt = random_jacobi_point(n, true, &mut rng);
            let chart = Chart::new(n, true);
            let g = metric_matrix(params, &pt, &chart).unwrap().to_mat();
            let r = chart.qpk_range();
            let sub = g.block(r.start, r.start, r.len(), r.len());
            let block = pqk_block(params, &pt, CrossConvention::QuadraticForm).unwrap();
            assert!(sub.max_abs_diff(&block) < 1e-12 * sub.max_abs().max(1.0));
        }
    }
}

#[test]
fn conventions_differ_by_antisymmetric_cross_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let params = random_params(&mut rng);
    let pt = random_jacobi_point(2, true, &mut rng);
    let form = pqk_block(params, &pt, CrossConvention::QuadraticForm).unwrap();
    let transposed = pqk_block(params, &pt, CrossConvention::Transposed).unwrap();
    let (p, q) = (pt.p(), pt.q());
    for i in 0..2 {
        for j in 0..2 {
            let expected = params.delta * (q[i] * p[j] - p[i] * q[j]);
            assert!((form[(i, 2 + j)] - transposed[(i, 2 + j)] - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn pqk_assembly_against_lu_both_conventions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for convention in [CrossConvention::Transposed, CrossConvention::QuadraticForm] {
        for n in 1..=2 {
            for _ in 0..300 {
                let params = random_params(&mut rng);
                let pt = random_jacobi_point(n, true, &mut rng);
                let fwd = pqk_block(params, &pt, convention).unwrap();
                let blocks = pqk_inverse_blocks(params, &pt, convention).unwrap();
                let lu = lu_inverse(&fwd).unwrap();
                let scale = lu.max_abs().max(1.0);
                assert!(blocks.assemble().max_abs_diff(&lu) < 1e-9 * scale);
                assert!(
                    (blocks.b22 - blocks.b22_explicit).abs() < 1e-9 * blocks.b22.abs().max(1.0)
                );
                let a_scale = blocks.a22.max_abs().max(1.0);
                assert!(
                    blocks.a22.max_abs_diff(&blocks.a22_simplified) < 1e-9 * a_scale,
                    "{convention:?}, n = {n}"
                );
            }
        }
    }
}

#[test]
fn a11_inverse_tends_to_xjn_inverse_as_delta_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 1..=2 {
        let mut params = random_params(&mut rng);
        params.delta = 1e-10;
        let pt = random_jacobi_point(n, true, &mut rng);
        let blocks = pqk_inverse_blocks(params, &pt, CrossConvention::Transposed).unwrap();
        let base = closed_inverse_xjn(params, &pt.without_kappa())
            .unwrap()
            .qp_inverse();
        assert!(blocks.a11_inverse().max_abs_diff(&base) < 1e-7);
    }
}

#[test]
fn det_n1_is_gamma_squared_delta() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let params = random_params(&mut rng);
        let expected = det_n1_extended_closed(params);
        for _ in 0..100 {
            let pt = random_jacobi_point(1, true, &mut rng);
            let (x, y, p, q) = n1_scalars(&pt);
            let det = det_n1_extended(params, x, y, p, q).unwrap();
            assert!((det / expected - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn f_matrix_is_transposed_block() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let params = random_params(&mut rng);
        let pt = random_jacobi_point(2, true, &mut rng);
        let f = assemble_f_n2(params, &pt).unwrap();
        let block = pqk_block(params, &pt, CrossConvention::Transposed).unwrap();
        assert!(f.max_abs_diff(&block) < 1e-12 * f.max_abs());
    }
}

#[test]
fn f_matrix_is_chart_block_when_translation_is_parallel() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..100 {
        let params = random_params(&mut rng);
        let pt = random_jacobi_point(2, true, &mut rng);
        let t: f64 = rng.gen_range(-2.0..2.0);
        let q = vec![t * pt.p()[0], t * pt.p()[1]];
        let pt = JacobiPoint::new(pt.base().clone(), pt.p().to_vec(), q, pt.kappa()).unwrap();
        let chart = Chart::new(2, true);
        let g = metric_matrix(params, &pt, &chart).unwrap().to_mat();
        let r = chart.qpk_range();
        let sub = g.block(r.start, r.start, r.len(), r.len());
        let f = assemble_f_n2(params, &pt).unwrap();
        assert!(f.max_abs_diff(&sub) < 1e-12 * f.max_abs());
    }
}

#[test]
fn det_n2_closed_against_lu() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for _ in 0..1000 {
        let params = random_params(&mut rng);
        let pt = random_jacobi_point(2, true, &mut rng);
        let closed = det_n2_closed(params, &pt).unwrap();
        let inv = n2_invariants(params, &pt).unwrap();
        if closed.abs() <= det_n2_threshold(params, inv.i2) {
            continue;
        }
        let lu = lu_det(&assemble_f_n2(params, &pt).unwrap()).unwrap();
        assert!((closed / lu - 1.0).abs() < 1e-9, "closed {closed}, lu {lu}");
        // the quadratic-form block has a point-independent determinant
        let form =
            lu_det(&pqk_block(params, &pt, CrossConvention::QuadraticForm).unwrap()).unwrap();
        assert!((form / (params.delta * params.gamma.powi(4)) - 1.0).abs() < 1e-9);
        checked += 1;
    }
    assert!(checked > 900);
}

#[test]
fn n2_inverse_product_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut checked = 0;
    for _ in 0..1000 {
        let params = random_params(&mut rng);
        let pt = random_jacobi_point(2, true, &mut rng);
        let inv = match n2_extended_inverse(params, &pt) {
            Ok(m) => m,
            Err(Error::NearSingular { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let f = assemble_f_n2(params, &pt).unwrap();
        assert!(residual(&inv, &f) < 1e-8);
        checked += 1;
    }
    assert!(checked > 900);
}

#[test]
fn n2_inverse_entry_13_matches_b11() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..100 {
        let params = random_params(&mut rng);
        let pt = random_jacobi_point(2, true, &mut rng);
        let inv = n2_extended_inverse(params, &pt).unwrap();
        let b11 = pqk_inverse_blocks(params, &pt, CrossConvention::Transposed)
            .unwrap()
            .b11;
        assert!((inv[(0, 2)] - b11[(0, 2)]).abs() < 1e-8 * inv.max_abs().max(1.0));
    }
}

#[test]
fn n2_ladder_is_polynomial_in_delta() {
    // Each entry is N times a fixed combination of the ladder weights, so
    // dividing by N must give the same ladder at any δ.
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..50 {
        let pt = random_jacobi_point(2, true, &mut rng);
        let gamma = rng.gen_range(0.5..3.0);
        let ladders = n2_ladders(&pt).unwrap();
        for delta in [0.3, 2.7] {
            let params = MetricParams::new(1.0, gamma, delta).unwrap();
            let f = assemble_f_n2(params, &pt).unwrap();
            let lu = lu_inverse(&f).unwrap();
            let inv = n2_invariants(params, &pt).unwrap();
            for (ladder, &(i, j)) in ladders.iter().zip(N2_ENTRIES.iter()) {
                let closed = inv.n * ladder_value(ladder, gamma, delta, inv.i2, inv.d);
                let oracle = lu[(i - 1, j - 1)];
                assert!(
                    (closed - oracle).abs() < 1e-10 * lu.max_abs().max(1.0),
                    "f^{i}{j} at δ = {delta}"
                );
            }
        }
    }
}

#[test]
fn every_single_sign_flip_breaks_the_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let params = random_params(&mut rng);
    let pt = random_jacobi_point(2, true, &mut rng);
    let f = assemble_f_n2(params, &pt).unwrap();
    for &entry in N2_ENTRIES.iter() {
        let inv = n2_extended_inverse_with_flip(params, &pt, Some(entry)).unwrap();
        assert!(residual(&inv, &f) > 1e-6, "{entry:?}");
    }
}

#[test]
fn closed_chart_inverse_dispatch() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let params = random_params(&mut rng);

    let pt = random_jacobi_point(1, true, &mut rng);
    let chart = Chart::new(1, true);
    let g = metric_matrix(params, &pt, &chart).unwrap().to_mat();
    let inv = closed_chart_inverse(params, &pt, CrossConvention::QuadraticForm).unwrap();
    assert!(residual(&g, &inv) < 1e-10);

    let pt = random_jacobi_point(2, true, &mut rng);
    assert!(matches!(
        closed_chart_inverse(params, &pt, CrossConvention::QuadraticForm),
        Err(Error::Unavailable(_))
    ));
    let inv = closed_chart_inverse(params, &pt, CrossConvention::Transposed).unwrap();
    let tail = inv.block(6, 6, 5, 5);
    assert!(residual(&assemble_f_n2(params, &pt).unwrap(), &tail) < 1e-8);

    let pt = random_jacobi_point(3, true, &mut rng);
    assert!(matches!(
        closed_chart_inverse(params, &pt, CrossConvention::Transposed),
        Err(Error::Unavailable(_))
    ));
}
