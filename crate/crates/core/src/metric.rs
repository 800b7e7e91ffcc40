//! Invariant metrics on X^J_n and the extended space, in a canonical chart.
//!
//! The quadratic form
//!
//! ```text
//! ds² = α tr[(y⁻¹dx)² + (y⁻¹dy)²]
//!     + γ [dp (xy⁻¹x + y) dpᵗ + dq y⁻¹ dqᵗ + 2 dp xy⁻¹ dqᵗ]
//!     + δ (dκ − p dqᵗ + q dpᵗ)²
//! ```
//!
//! is the only definition of the metric in this crate; the chart matrix is
//! obtained from it by polarization, so it always agrees with `ds²`
//! evaluated on chart components.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::group::{act_extended, dot, JacobiGroupElement, JacobiPoint, SiegelPoint};
use crate::matlib::{kron, lu_inverse, Mat, SymMat};

/// The three positive weights `(α, γ, δ)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetricParams {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl MetricParams {
    pub fn new(alpha: f64, gamma: f64, delta: f64) -> Result<Self> {
        let params = MetricParams {
            alpha,
            gamma,
            delta,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    pub fn unit() -> Self {
        MetricParams {
            alpha: 1.0,
            gamma: 1.0,
            delta: 1.0,
        }
    }
}

/// Tangent vector in the canonical chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartVector {
    pub dx: SymMat,
    pub dy: SymMat,
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub dkappa: Option<f64>,
}

impl ChartVector {
    pub fn zero(n: usize, extended: bool) -> Self {
        ChartVector {
            dx: SymMat::zeros(n),
            dy: SymMat::zeros(n),
            dq: vec![0.0; n],
            dp: vec![0.0; n],
            dkappa: extended.then_some(0.0),
        }
    }

    pub fn n(&self) -> usize {
        self.dx.n()
    }
}

/// Canonical chart on X^J_n (or the extended space).
///
/// Coordinates are ordered `x_ij (i ≤ j, row-major)`, `y_ij (i ≤ j)`,
/// `q_1..q_n`, `p_1..p_n`, then `κ` when extended. An off-diagonal `x_ij`
/// coordinate moves both the (i, j) and (j, i) entries of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chart {
    n: usize,
    extended: bool,
}

impl Chart {
    pub fn new(n: usize, extended: bool) -> Self {
        assert!(n > 0, "chart degree must be positive");
        Chart { n, extended }
    }

    pub fn for_point(pt: &JacobiPoint) -> Self {
        Chart::new(pt.n(), pt.is_extended())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    fn sym_len(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// `n(n + 3)`, plus one when extended.
    pub fn dim(&self) -> usize {
        2 * self.sym_len() + 2 * self.n + usize::from(self.extended)
    }

    pub fn x_range(&self) -> Range<usize> {
        0..self.sym_len()
    }

    pub fn y_range(&self) -> Range<usize> {
        self.sym_len()..2 * self.sym_len()
    }

    pub fn q_range(&self) -> Range<usize> {
        let s = 2 * self.sym_len();
        s..s + self.n
    }

    pub fn p_range(&self) -> Range<usize> {
        let s = 2 * self.sym_len() + self.n;
        s..s + self.n
    }

    pub fn kappa_index(&self) -> Option<usize> {
        self.extended.then(|| self.dim() - 1)
    }

    /// The `(q, p, κ)` tail of the chart.
    pub fn qpk_range(&self) -> Range<usize> {
        2 * self.sym_len()..self.dim()
    }

    /// Names such as `x11, x12, x22, y11, .., q1, q2, p1, p2, kappa`. For
    /// n = 1 the indices are dropped: `x, y, q, p, kappa`.
    pub fn coordinate_names(&self) -> Vec<String> {
        let n = self.n;
        let mut names = Vec::with_capacity(self.dim());
        for sym in ["x", "y"] {
            for k in 0..self.sym_len() {
                let (i, j) = SymMat::unpack_index(n, k);
                names.push(if n == 1 {
                    sym.to_string()
                } else {
                    format!("{sym}{}{}", i + 1, j + 1)
                });
            }
        }
        for vec in ["q", "p"] {
            for i in 0..n {
                names.push(if n == 1 {
                    vec.to_string()
                } else {
                    format!("{vec}{}", i + 1)
                });
            }
        }
        if self.extended {
            names.push("kappa".to_string());
        }
        names
    }

    fn check_point(&self, pt: &JacobiPoint) -> Result<()> {
        if pt.n() != self.n || pt.is_extended() != self.extended {
            return Err(Error::DimensionMismatch(format!(
                "point (n = {}, extended = {}) does not match chart (n = {}, extended = {})",
                pt.n(),
                pt.is_extended(),
                self.n,
                self.extended
            )));
        }
        Ok(())
    }

    pub fn coordinates(&self, pt: &JacobiPoint) -> Result<Vec<f64>> {
        self.check_point(pt)?;
        let mut c = Vec::with_capacity(self.dim());
        c.extend_from_slice(pt.x().upper());
        c.extend_from_slice(pt.y().upper());
        c.extend_from_slice(pt.q());
        c.extend_from_slice(pt.p());
        c.extend(pt.kappa());
        Ok(c)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{len} chart components, expected {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Decodes chart coordinates; fails with `NotPositiveDefinite` off the chart.
    pub fn point(&self, coords: &[f64]) -> Result<JacobiPoint> {
        self.check_len(coords.len())?;
        let x = SymMat::from_upper(self.n, coords[self.x_range()].to_vec())?;
        let y = SymMat::from_upper(self.n, coords[self.y_range()].to_vec())?;
        let base = SiegelPoint::new(x, y)?;
        JacobiPoint::new(
            base,
            coords[self.p_range()].to_vec(),
            coords[self.q_range()].to_vec(),
            self.kappa_index().map(|k| coords[k]),
        )
    }

    pub fn vector(&self, comps: &[f64]) -> Result<ChartVector> {
        self.check_len(comps.len())?;
        Ok(ChartVector {
            dx: SymMat::from_upper(self.n, comps[self.x_range()].to_vec())?,
            dy: SymMat::from_upper(self.n, comps[self.y_range()].to_vec())?,
            dq: comps[self.q_range()].to_vec(),
            dp: comps[self.p_range()].to_vec(),
            dkappa: self.kappa_index().map(|k| comps[k]),
        })
    }

    pub fn components(&self, v: &ChartVector) -> Result<Vec<f64>> {
        if v.n() != self.n || v.dkappa.is_some() != self.extended {
            return Err(Error::DimensionMismatch(
                "tangent vector does not match chart".into(),
            ));
        }
        let mut c = Vec::with_capacity(self.dim());
        c.extend_from_slice(v.dx.upper());
        c.extend_from_slice(v.dy.upper());
        c.extend_from_slice(&v.dq);
        c.extend_from_slice(&v.dp);
        c.extend(v.dkappa);
        Ok(c)
    }

    /// The k-th coordinate basis vector.
    pub fn basis(&self, k: usize) -> ChartVector {
        let mut e = vec![0.0; self.dim()];
        e[k] = 1.0;
        self.vector(&e).expect("basis length matches chart")
    }
}

/// Metric data at a fixed point, reused across many tangent vectors.
struct MetricAt<'a> {
    params: MetricParams,
    pt: &'a JacobiPoint,
    x: Mat,
    y: Mat,
    y_inv: Mat,
}

impl<'a> MetricAt<'a> {
    fn new(params: MetricParams, pt: &'a JacobiPoint) -> Result<Self> {
        params.validate()?;
        let y = pt.y().to_mat();
        let y_inv = lu_inverse(&y)?;
        Ok(MetricAt {
            params,
            pt,
            x: pt.x().to_mat(),
            y,
            y_inv,
        })
    }

    fn ds2(&self, v: &ChartVector) -> Result<f64> {
        let n = self.pt.n();
        if v.n() != n || v.dq.len() != n || v.dp.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "tangent vector of degree {} at point of degree {n}",
                v.n()
            )));
        }
        if v.dkappa.is_some() != self.pt.is_extended() {
            return Err(Error::DimensionMismatch(
                "dkappa must be present exactly when the point is extended".into(),
            ));
        }
        let MetricParams {
            alpha,
            gamma,
            delta,
        } = self.params;

        let yx = self.y_inv.matmul(&v.dx.to_mat());
        let yy = self.y_inv.matmul(&v.dy.to_mat());
        let siegel = alpha * (yx.matmul(&yx).trace() + yy.matmul(&yy).trace());

        let dp = Mat::row_vector(&v.dp);
        let dq = Mat::col_vector(&v.dq);
        let x_yinv = self.x.matmul(&self.y_inv);
        let pp = &x_yinv.matmul(&self.x) + &self.y;
        let heisenberg = dp.matmul(&pp).matmul(&dp.transpose())[(0, 0)]
            + dq.transpose().matmul(&self.y_inv).matmul(&dq)[(0, 0)]
            + 2.0 * dp.matmul(&x_yinv).matmul(&dq)[(0, 0)];

        let central = match v.dkappa {
            Some(dk) => {
                let l = dk - dot(self.pt.p(), &v.dq) + dot(self.pt.q(), &v.dp);
                delta * l * l
            }
            None => 0.0,
        };
        Ok(siegel + gamma * heisenberg + central)
    }
}

/// `ds²(pt)(v, v)`. The δ term is included iff the point and vector carry κ.
pub fn ds2(params: MetricParams, pt: &JacobiPoint, v: &ChartVector) -> Result<f64> {
    MetricAt::new(params, pt)?.ds2(v)
}

/// The invariant one-form `dκ − p dqᵗ + q dpᵗ` applied to `v`.
pub fn lambda_r(pt: &JacobiPoint, v: &ChartVector) -> Result<f64> {
    let dk = match (pt.kappa(), v.dkappa) {
        (Some(_), Some(dk)) => dk,
        _ => {
            return Err(Error::DimensionMismatch(
                "lambda_R needs an extended point and vector".into(),
            ))
        }
    };
    if v.dq.len() != pt.n() || v.dp.len() != pt.n() {
        return Err(Error::DimensionMismatch(
            "tangent vector does not match point".into(),
        ));
    }
    Ok(dk - dot(pt.p(), &v.dq) + dot(pt.q(), &v.dp))
}

/// Chart matrix of `ds²` by polarization:
/// `G[a,b] = ½[ds²(e_a + e_b) − ds²(e_a) − ds²(e_b)]`.
pub fn metric_matrix(params: MetricParams, pt: &JacobiPoint, chart: &Chart) -> Result<SymMat> {
    chart.check_point(pt)?;
    let at = MetricAt::new(params, pt)?;
    let d = chart.dim();
    let mut diag = Vec::with_capacity(d);
    for a in 0..d {
        diag.push(at.ds2(&chart.basis(a))?);
    }
    let mut g = SymMat::zeros(d);
    let mut e = vec![0.0; d];
    for a in 0..d {
        g.set(a, a, diag[a]);
        for b in a + 1..d {
            e[a] = 1.0;
            e[b] = 1.0;
            let both = at.ds2(&chart.vector(&e)?)?;
            e[a] = 0.0;
            e[b] = 0.0;
            g.set(a, b, 0.5 * (both - diag[a] - diag[b]));
        }
    }
    Ok(g)
}

/// Largest gap between `α·vec(dx)ᵗ(y⁻¹⊗y⁻¹)vec(dx)` and `α·tr[(y⁻¹dx)²]`
/// over `samples` pseudo-random symmetric `dx` (entries in [-1, 1]).
pub fn full_vec_block_check<R: rand::Rng + ?Sized>(
    params: MetricParams,
    pt: &JacobiPoint,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = pt.n();
    let y_inv = lu_inverse(&pt.y().to_mat())?;
    let block = kron(&y_inv, &y_inv).scale(params.alpha);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut dx = SymMat::zeros(n);
        for i in 0..n {
            for j in i..n {
                dx.set(i, j, rng.gen_range(-1.0..=1.0));
            }
        }
        let full = dx.to_mat();
        let vec_dx = Mat::row_vector(full.as_slice());
        let lhs = vec_dx.matmul(&block).matmul(&vec_dx.transpose())[(0, 0)];
        let t = y_inv.matmul(&full);
        let rhs = params.alpha * t.matmul(&t).trace();
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Default finite-difference step for [`pushforward`].
pub const PUSHFORWARD_STEP: f64 = 1e-6;

/// Differential of the group action applied to `v`, by central differences
/// in chart coordinates.
pub fn pushforward(
    g: &JacobiGroupElement,
    pt: &JacobiPoint,
    v: &ChartVector,
    h: f64,
) -> Result<ChartVector> {
    if !(1e-8..=1e-4).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {h:e} outside [1e-8, 1e-4]"
        )));
    }
    let chart = Chart::for_point(pt);
    let c = chart.coordinates(pt)?;
    let dv = chart.components(v)?;
    let image = |sign: f64| -> Result<Vec<f64>> {
        let shifted: Vec<f64> = c.iter().zip(&dv).map(|(a, b)| a + sign * h * b).collect();
        let moved = chart.point(&shifted).map_err(|e| match e {
            Error::NotPositiveDefinite => Error::PositivityLoss,
            other => other,
        })?;
        chart.coordinates(&act_extended(g, &moved)?)
    };
    let plus = image(1.0)?;
    let minus = image(-1.0)?;
    let comps: Vec<f64> = plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect();
    chart.vector(&comps)
}
