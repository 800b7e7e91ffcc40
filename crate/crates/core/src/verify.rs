//! The self-check suite behind `sjg verify`.
//!
//! Every check draws from its own seeded stream, so results depend only on
//! the configuration and adding a check never perturbs the others.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connection::{christoffels, christoffels_of, Difference, JacobiField, DEFAULT_STEP};
use crate::error::{Error, Result};
use crate::group::{act_extended, random_jacobi_point, random_symplectic};
use crate::inverse::{
    assemble_f_n2, closed_inverse_xj1_extended_qpk, closed_inverse_xjn, det_n1_extended,
    det_n1_extended_closed, det_n2_closed, det_n2_threshold, n2_extended_inverse_with_flip,
    n2_invariants, pqk_block, pqk_inverse_blocks, qp_block, schur_inverse, siegel_chart_inverse,
    CrossConvention, Partition2x2,
};
use crate::matlib::{is_positive_definite, kron, lu_det, lu_inverse, Mat};
use crate::metric::{
    ds2, lambda_r, metric_matrix, pushforward, Chart, MetricParams, PUSHFORWARD_STEP,
};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub ns: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Test hook: flip the sign of one closed-form n = 2 inverse entry.
    pub flip: Option<(usize, usize)>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            ns: vec![1, 2],
            samples: 100,
            seed: 0,
            flip: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    /// Points skipped by a documented guard (near-singular determinant).
    pub skipped: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when the check could not run to completion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub ns: Vec<usize>,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    /// Wall-clock seconds; kept out of the serialized report so that equal
    /// seeds give byte-identical output.
    #[serde(skip)]
    pub elapsed: f64,
}

impl VerifyReport {
    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Tally {
    samples: usize,
    skipped: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            samples: 0,
            skipped: 0,
            worst: 0.0,
        }
    }

    /// Counts one sample point with residual `r`.
    fn record(&mut self, r: f64) {
        self.samples += 1;
        self.observe(r);
    }

    /// A further residual at the point last recorded.
    fn observe(&mut self, r: f64) {
        // NaN must fail the check
        self.worst = if r.is_nan() || self.worst.is_nan() {
            f64::NAN
        } else {
            self.worst.max(r)
        };
    }
}

type CheckFn<'a> = Box<dyn Fn(&mut ChaCha8Rng, &mut Tally) -> Result<()> + 'a>;

struct Check<'a> {
    name: String,
    tolerance: f64,
    run: CheckFn<'a>,
}

fn random_params<R: Rng + ?Sized>(rng: &mut R) -> MetricParams {
    MetricParams {
        alpha: rng.gen_range(0.1..10.0),
        gamma: rng.gen_range(0.1..10.0),
        delta: rng.gen_range(0.1..10.0),
    }
}

fn identity_residual(a: &Mat, b: &Mat) -> f64 {
    a.matmul(b).max_abs_diff(&Mat::identity(a.rows()))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn checks(cfg: &VerifyConfig) -> Vec<Check<'_>> {
    let samples = cfg.samples;
    let mut out: Vec<Check> = Vec::new();
    let mut add = |name: String, tolerance: f64, run: CheckFn<'static>| {
        out.push(Check {
            name,
            tolerance,
            run,
        })
    };
    let flip = cfg.flip;

    for &n in &cfg.ns {
        let chart = Chart::new(n, true);
        add(
            format!("ds2_invariance_n{n}"),
            1e-6,
            Box::new(move |rng, t| {
                for _ in 0..samples {
                    let params = random_params(rng);
                    let g = random_symplectic(n, 0.5, rng)?;
                    let pt = random_jacobi_point(n, true, rng);
                    let comps: Vec<f64> =
                        (0..chart.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let v = chart.vector(&comps)?;
                    let w = pushforward(&g, &pt, &v, PUSHFORWARD_STEP)?;
                    let before = ds2(params, &pt, &v)?;
                    let after = ds2(params, &act_extended(&g, &pt)?, &w)?;
                    t.record(relative(after, before));
                }
                Ok(())
            }),
        );
        add(
            format!("lambda_invariance_n{n}"),
            1e-6,
            Box::new(move |rng, t| {
                for _ in 0..samples {
                    let g = random_symplectic(n, 0.5, rng)?;
                    let pt = random_jacobi_point(n, true, rng);
                    let comps: Vec<f64> =
                        (0..chart.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let v = chart.vector(&comps)?;
                    let w = pushforward(&g, &pt, &v, PUSHFORWARD_STEP)?;
                    let before = lambda_r(&pt, &v)?;
                    let after = lambda_r(&act_extended(&g, &pt)?, &w)?;
                    t.record(relative(after, before));
                }
                Ok(())
            }),
        );
        add(
            format!("metric_positive_definite_n{n}"),
            0.0,
            Box::new(move |rng, t| {
                for _ in 0..samples {
                    let pt = random_jacobi_point(n, true, rng);
                    let g = metric_matrix(random_params(rng), &pt, &chart)?;
                    t.record(if is_positive_definite(&g.to_mat()) {
                        0.0
                    } else {
                        1.0
                    });
                }
                Ok(())
            }),
        );
        add(
            format!("xjn_closed_inverse_n{n}"),
            1e-10,
            Box::new(move |rng, t| {
                for _ in 0..samples {
                    let params = random_params(rng);
                    let pt = random_jacobi_point(n, false, rng);
                    let inv = closed_inverse_xjn(params, &pt)?;
                    t.record(identity_residual(
                        &qp_block(params, &pt)?,
                        &inv.qp_inverse(),
                    ));
                    let y = pt.y().to_mat();
                    let y_inv = lu_inverse(&y)?;
                    let full = kron(&y_inv, &y_inv).scale(params.alpha);
                    t.observe(identity_residual(&full, &inv.siegel));
                    let chart = Chart::new(n, false);
                    let g = metric_matrix(params, &pt, &chart)?.to_mat();
                    let s = chart.x_range();
                    let block = g.block(s.start, s.start, s.len(), s.len());
                    t.observe(identity_residual(
                        &block,
                        &siegel_chart_inverse(params.alpha, &y),
                    ));
                }
                Ok(())
            }),
        );
        add(
            format!("block_inverse_vs_lu_n{n}"),
            1e-9,
            Box::new(move |rng, t| {
                for _ in 0..samples {
                    let params = random_params(rng);
                    let pt = random_jacobi_point(n, true, rng);
                    let fwd = pqk_block(params, &pt, CrossConvention::Transposed)?;
                    let blocks = pqk_inverse_blocks(params, &pt, CrossConvention::Transposed)?;
                    let lu = lu_inverse(&fwd)?;
                    t.record(blocks.assemble().max_abs_diff(&lu) / lu.max_abs().max(1.0));
                    t.observe(relative(blocks.b22_explicit, blocks.b22));
                }
                Ok(())
            }),
        );
        add(
            format!("a22_routes_n{n}"),
            1e-9,
            Box::new(move |rng, t| {
                for _ in 0..samples {
                    let params = random_params(rng);
                    let pt = random_jacobi_point(n, true, rng);
                    let b = pqk_inverse_blocks(params, &pt, CrossConvention::Transposed)?;
                    t.record(b.a22.max_abs_diff(&b.a22_simplified) / b.a22.max_abs().max(1.0));
                }
                Ok(())
            }),
        );
        add(
            format!("christoffel_compatibility_n{n}"),
            1e-5,
            Box::new(move |rng, t| {
                for _ in 0..samples.min(10) {
                    let params = random_params(rng);
                    let pt = random_jacobi_point(n, true, rng);
                    let table = christoffels(params, &pt, &chart, DEFAULT_STEP)?;
                    t.record(table.compatibility_residual());
                    t.observe(table.lowering_residual() / table.metric().max_abs().max(1.0));
                }
                Ok(())
            }),
        );

        if n == 1 {
            add(
                "det_n1_extended".into(),
                1e-10,
                Box::new(move |rng, t| {
                    for _ in 0..samples {
                        let params = random_params(rng);
                        let pt = random_jacobi_point(1, true, rng);
                        let (x, y, p, q) =
                            (pt.x().get(0, 0), pt.y().get(0, 0), pt.p()[0], pt.q()[0]);
                        let det = det_n1_extended(params, x, y, p, q)?;
                        t.record((det / det_n1_extended_closed(params) - 1.0).abs());
                    }
                    Ok(())
                }),
            );
            add(
                "xj1_extended_closed_inverse".into(),
                1e-10,
                Box::new(move |rng, t| {
                    for _ in 0..samples {
                        let params = random_params(rng);
                        let pt = random_jacobi_point(1, true, rng);
                        let (x, y, p, q) =
                            (pt.x().get(0, 0), pt.y().get(0, 0), pt.p()[0], pt.q()[0]);
                        let fwd = pqk_block(params, &pt, CrossConvention::QuadraticForm)?;
                        let inv = closed_inverse_xj1_extended_qpk(params, x, y, p, q);
                        t.record(identity_residual(&fwd, &inv));
                    }
                    Ok(())
                }),
            );
            add(
                "christoffel_golden".into(),
                1e-5,
                Box::new(move |rng, t| {
                    let (x, y, p) = (0, 1, chart.p_range().start);
                    for _ in 0..samples.min(20) {
                        let params = random_params(rng);
                        let pt = random_jacobi_point(1, true, rng);
                        let field = JacobiField::new(params, chart)?;
                        let table = christoffels_of(
                            &field,
                            &chart.coordinates(&pt)?,
                            DEFAULT_STEP,
                            Difference::Richardson,
                        )?;
                        let (xv, yv, qv) = (pt.x().get(0, 0), pt.y().get(0, 0), pt.q()[0]);
                        t.record((table.second(x, x, y) + 1.0 / yv).abs());
                        let expected = 2.0 * params.delta / params.gamma * xv / yv * qv;
                        t.observe((table.second(p, p, p) - expected).abs());
                    }
                    Ok(())
                }),
            );
        }

        if n == 2 {
            add(
                "det_n2_closed_vs_lu".into(),
                1e-9,
                Box::new(move |rng, t| {
                    for _ in 0..samples {
                        let params = random_params(rng);
                        let pt = random_jacobi_point(2, true, rng);
                        let closed = det_n2_closed(params, &pt)?;
                        if closed.abs() <= det_n2_threshold(params, n2_invariants(params, &pt)?.i2)
                        {
                            t.skipped += 1;
                            continue;
                        }
                        let lu = lu_det(&assemble_f_n2(params, &pt)?)?;
                        t.record((closed / lu - 1.0).abs());
                    }
                    Ok(())
                }),
            );
            add(
                "n2_inverse_product".into(),
                1e-8,
                Box::new(move |rng, t| {
                    for _ in 0..samples {
                        let params = random_params(rng);
                        let pt = random_jacobi_point(2, true, rng);
                        let inv = match n2_extended_inverse_with_flip(params, &pt, flip) {
                            Err(Error::NearSingular { .. }) => {
                                t.skipped += 1;
                                continue;
                            }
                            other => other?,
                        };
                        t.record(identity_residual(&inv, &assemble_f_n2(params, &pt)?));
                    }
                    Ok(())
                }),
            );
            add(
                "n2_inverse_entry_13_vs_blocks".into(),
                1e-8,
                Box::new(move |rng, t| {
                    for _ in 0..samples {
                        let params = random_params(rng);
                        let pt = random_jacobi_point(2, true, rng);
                        let inv = match n2_extended_inverse_with_flip(params, &pt, flip) {
                            Err(Error::NearSingular { .. }) => {
                                t.skipped += 1;
                                continue;
                            }
                            other => other?,
                        };
                        let b11 = pqk_inverse_blocks(params, &pt, CrossConvention::Transposed)?.b11;
                        t.record((inv[(0, 2)] - b11[(0, 2)]).abs() / inv.max_abs().max(1.0));
                    }
                    Ok(())
                }),
            );
        }
    }

    add(
        "schur_vs_lu".into(),
        1e-10,
        Box::new(move |rng, t| {
            for _ in 0..samples {
                let d = rng.gen_range(2..=8);
                let m = rng.gen_range(1..d);
                let mut a = Mat::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        a[(i, j)] = rng.gen_range(-1.0..1.0);
                    }
                    a[(i, i)] += d as f64;
                }
                let schur = schur_inverse(&Partition2x2::split(&a, m)?)?;
                t.record(schur.max_abs_diff(&lu_inverse(&a)?));
            }
            Ok(())
        }),
    );
    add(
        "kron_inverse".into(),
        1e-10,
        Box::new(move |rng, t| {
            let random_well_conditioned = |rng: &mut ChaCha8Rng, d: usize| {
                let mut a = Mat::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        a[(i, j)] = rng.gen_range(-1.0..1.0);
                    }
                    a[(i, i)] += d as f64;
                }
                a
            };
            for _ in 0..samples {
                let (da, db) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
                let a = random_well_conditioned(rng, da);
                let b = random_well_conditioned(rng, db);
                let lhs = lu_inverse(&kron(&a, &b))?;
                let rhs = kron(&lu_inverse(&a)?, &lu_inverse(&b)?);
                t.record(lhs.max_abs_diff(&rhs));
            }
            Ok(())
        }),
    );
    out
}

/// Runs every check for the configured degrees.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.ns.is_empty() || cfg.ns.iter().any(|n| !(1..=2).contains(n)) {
        return Err(Error::InvalidArgument(format!(
            "degrees must be drawn from {{1, 2}}, got {:?}",
            cfg.ns
        )));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let started = std::time::Instant::now();
    let mut results = Vec::new();
    for (stream, check) in checks(cfg).into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream as u64);
        let mut tally = Tally::new();
        let outcome = (check.run)(&mut rng, &mut tally);
        let passed = outcome.is_ok() && tally.samples > 0 && tally.worst <= check.tolerance;
        results.push(CheckResult {
            name: check.name,
            samples: tally.samples,
            skipped: tally.skipped,
            max_residual: tally.worst,
            tolerance: check.tolerance,
            passed,
            error: outcome.err().map(|e| e.to_string()),
        });
    }
    Ok(VerifyReport {
        seed: cfg.seed,
        samples: cfg.samples,
        ns: cfg.ns.clone(),
        passed: results.iter().all(|c| c.passed),
        checks: results,
        elapsed: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> VerifyConfig {
        VerifyConfig {
            samples: 5,
            seed,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn small_run_passes() {
        let report = run(&small(0)).unwrap();
        let failed: Vec<_> = report.failed().map(|c| c.name.clone()).collect();
        assert!(report.passed, "{failed:?}");
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = run(&small(3)).unwrap();
        let b = run(&small(3)).unwrap();
        assert_eq!(a.checks, b.checks);
    }

    #[test]
    fn sign_flip_is_caught() {
        let cfg = VerifyConfig {
            flip: Some((2, 4)),
            ..small(0)
        };
        let report = run(&cfg).unwrap();
        let failed: Vec<_> = report.failed().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["n2_inverse_product"]);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = VerifyConfig {
            ns: vec![3],
            ..VerifyConfig::default()
        };
        assert!(run(&cfg).is_err());
    }
}
