//! Inverses and determinants of the invariant metric matrices.
//!
//! Every closed form here has an LU counterpart in [`crate::matlib`]; the
//! tests and the verification suite compare the two routes.
//!
//! # Cross-term conventions
//!
//! For `n ≥ 2` the `(q, p)` coupling of the δ term can be written two ways.
//! Expanding `δ(dκ − p dqᵗ + q dpᵗ)²` puts `−δ p_i q_j` at chart entry
//! `(q_i, p_j)` ([`CrossConvention::QuadraticForm`], which is what
//! [`crate::metric::metric_matrix`] produces). The block formulas that the
//! `n = 2` determinant and the fifteen-entry inverse were derived from put
//! `−δ q_i p_j` there instead ([`CrossConvention::Transposed`]). The two agree
//! for `n = 1` and whenever `p` and `q` are parallel.

use crate::error::{Error, Result, SchurBlock};
use crate::group::JacobiPoint;
use crate::matlib::{kron, lu_det, lu_inverse, Mat};
use crate::metric::MetricParams;

/// Which matrix the `(q, p, κ)` block refers to. See the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossConvention {
    /// Polarization of the quadratic form; equals the chart metric.
    #[default]
    QuadraticForm,
    /// Literal block transcription, `δ q_i p_j` in the `(q_i, p_j)` slot.
    Transposed,
}

/// `h = [[h1, h2], [h3, h4]]` with h1 m×m and h4 k×k.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition2x2 {
    pub h1: Mat,
    pub h2: Mat,
    pub h3: Mat,
    pub h4: Mat,
}

impl Partition2x2 {
    pub fn new(h1: Mat, h2: Mat, h3: Mat, h4: Mat) -> Result<Self> {
        let (m, k) = (h1.rows(), h4.rows());
        let conformal =
            h1.is_square() && h4.is_square() && h2.shape() == (m, k) && h3.shape() == (k, m);
        if !conformal {
            return Err(Error::DimensionMismatch(format!(
                "non-conformal blocks {:?}, {:?}, {:?}, {:?}",
                h1.shape(),
                h2.shape(),
                h3.shape(),
                h4.shape()
            )));
        }
        Ok(Partition2x2 { h1, h2, h3, h4 })
    }

    /// Splits a square matrix after its first `m` rows and columns.
    pub fn split(h: &Mat, m: usize) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::NotSquare {
                rows: h.rows(),
                cols: h.cols(),
            });
        }
        let d = h.rows();
        if m == 0 || m >= d {
            return Err(Error::InvalidArgument(format!(
                "split point {m} outside 1..{d}"
            )));
        }
        let k = d - m;
        Partition2x2::new(
            h.block(0, 0, m, m),
            h.block(0, m, m, k),
            h.block(m, 0, k, m),
            h.block(m, m, k, k),
        )
    }

    pub fn assemble(&self) -> Mat {
        Mat::from_blocks(&self.h1, &self.h2, &self.h3, &self.h4)
    }
}

fn inv_block(m: &Mat, which: SchurBlock) -> Result<Mat> {
    lu_inverse(m).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularBlock(which),
        other => other,
    })
}

/// Partitioned inverse:
/// `h¹ = (h1 − h2 h4⁻¹ h3)⁻¹`, `h⁴ = (h4 − h3 h1⁻¹ h2)⁻¹`,
/// `h² = −h1⁻¹ h2 h⁴`, `h³ = −h⁴ h3 h1⁻¹`.
pub fn schur_inverse(h: &Partition2x2) -> Result<Mat> {
    let h1_inv = inv_block(&h.h1, SchurBlock::H1)?;
    let h4_inv = inv_block(&h.h4, SchurBlock::H4)?;
    let upper = inv_block(
        &(&h.h1 - &h.h2.matmul(&h4_inv).matmul(&h.h3)),
        SchurBlock::ComplementOfH4,
    )?;
    let lower = inv_block(
        &(&h.h4 - &h.h3.matmul(&h1_inv).matmul(&h.h2)),
        SchurBlock::ComplementOfH1,
    )?;
    let top_right = -&h1_inv.matmul(&h.h2).matmul(&lower);
    let bottom_left = -&lower.matmul(&h.h3).matmul(&h1_inv);
    Ok(Mat::from_blocks(&upper, &top_right, &bottom_left, &lower))
}

struct Blocks {
    x: Mat,
    y: Mat,
    y_inv: Mat,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl Blocks {
    fn of(pt: &JacobiPoint) -> Result<Self> {
        let y = pt.y().to_mat();
        Ok(Blocks {
            x: pt.x().to_mat(),
            y_inv: lu_inverse(&y)?,
            y,
            p: pt.p().to_vec(),
            q: pt.q().to_vec(),
        })
    }

    fn g_qq(&self, gamma: f64) -> Mat {
        self.y_inv.scale(gamma)
    }

    fn g_qp(&self, gamma: f64) -> Mat {
        self.y_inv.matmul(&self.x).scale(gamma)
    }

    fn g_pq(&self, gamma: f64) -> Mat {
        self.x.matmul(&self.y_inv).scale(gamma)
    }

    fn g_pp(&self, gamma: f64) -> Mat {
        (&self.y + &self.x.matmul(&self.y_inv).matmul(&self.x)).scale(gamma)
    }

    /// The rank-one couplings subtracted (times δ) from the qp and pq blocks.
    fn cross(&self, convention: CrossConvention) -> (Mat, Mat) {
        match convention {
            CrossConvention::QuadraticForm => {
                (Mat::outer(&self.p, &self.q), Mat::outer(&self.q, &self.p))
            }
            CrossConvention::Transposed => {
                (Mat::outer(&self.q, &self.p), Mat::outer(&self.p, &self.q))
            }
        }
    }
}

/// `[[g_qq, g_qp], [g_pq, g_pp]]` of the non-extended metric (2n×2n).
pub fn qp_block(params: MetricParams, pt: &JacobiPoint) -> Result<Mat> {
    let b = Blocks::of(pt)?;
    let g = params.gamma;
    Ok(Mat::from_blocks(
        &b.g_qq(g),
        &b.g_qp(g),
        &b.g_pq(g),
        &b.g_pp(g),
    ))
}

/// The `(q, p, κ)` block of the extended metric, `(2n+1)×(2n+1)`, ordered
/// `q_1..q_n, p_1..p_n, κ`.
pub fn pqk_block(
    params: MetricParams,
    pt: &JacobiPoint,
    convention: CrossConvention,
) -> Result<Mat> {
    let parts = a11_parts(params, pt, convention)?;
    let n = pt.n();
    let delta = params.delta;
    let mut m = Mat::zeros(2 * n + 1, 2 * n + 1);
    m.set_block(0, 0, &parts.assemble());
    for i in 0..n {
        m[(i, 2 * n)] = -delta * pt.p()[i];
        m[(2 * n, i)] = -delta * pt.p()[i];
        m[(n + i, 2 * n)] = delta * pt.q()[i];
        m[(2 * n, n + i)] = delta * pt.q()[i];
    }
    m[(2 * n, 2 * n)] = delta;
    Ok(m)
}

/// `A11 = [[g'_qq, g'_qp], [g'_pq, g'_pp]]` as a partition.
fn a11_parts(
    params: MetricParams,
    pt: &JacobiPoint,
    convention: CrossConvention,
) -> Result<Partition2x2> {
    params.validate()?;
    let b = Blocks::of(pt)?;
    let (gamma, delta) = (params.gamma, params.delta);
    let (cross_qp, cross_pq) = b.cross(convention);
    Partition2x2::new(
        &b.g_qq(gamma) + &Mat::outer(&b.p, &b.p).scale(delta),
        &b.g_qp(gamma) - &cross_qp.scale(delta),
        &b.g_pq(gamma) - &cross_pq.scale(delta),
        &b.g_pp(gamma) + &Mat::outer(&b.q, &b.q).scale(delta),
    )
}

/// Closed-form inverse of the non-extended metric, block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct XjnInverse {
    /// `α⁻¹ y⊗y`, acting on the full (redundant) `vec(dx)`; same for `dy`.
    pub siegel: Mat,
    pub qq: Mat,
    pub qp: Mat,
    pub pq: Mat,
    pub pp: Mat,
}

impl XjnInverse {
    /// `[[g^qq, g^qp], [g^pq, g^pp]]`.
    pub fn qp_inverse(&self) -> Mat {
        Mat::from_blocks(&self.qq, &self.qp, &self.pq, &self.pp)
    }
}

/// `α⁻¹ y⊗y` on both Siegel blocks and
/// `[[γ⁻¹(y + xy⁻¹x), −γ⁻¹xy⁻¹], [−γ⁻¹y⁻¹x, γ⁻¹y⁻¹]]` on `(q, p)`.
pub fn closed_inverse_xjn(params: MetricParams, pt: &JacobiPoint) -> Result<XjnInverse> {
    params.validate()?;
    let b = Blocks::of(pt)?;
    let inv_g = 1.0 / params.gamma;
    Ok(XjnInverse {
        siegel: kron(&b.y, &b.y).scale(1.0 / params.alpha),
        qq: (&b.y + &b.x.matmul(&b.y_inv).matmul(&b.x)).scale(inv_g),
        qp: b.x.matmul(&b.y_inv).scale(-inv_g),
        pq: b.y_inv.matmul(&b.x).scale(-inv_g),
        pp: b.y_inv.scale(inv_g),
    })
}

/// Duplication matrix: `vec(s) = D · upper(s)` for symmetric `s`, with
/// `vec` row-major and `upper` the packed upper triangle.
pub fn duplication_matrix(n: usize) -> Mat {
    let len = n * (n + 1) / 2;
    let mut d = Mat::zeros(n * n, len);
    for k in 0..len {
        let (i, j) = crate::matlib::SymMat::unpack_index(n, k);
        d[(i * n + j, k)] = 1.0;
        d[(j * n + i, k)] = 1.0;
    }
    d
}

/// Inverse of the chart (half-vectorized) Siegel block `α Dᵗ(y⁻¹⊗y⁻¹)D`,
/// namely `α⁻¹ D⁺ (y⊗y) D⁺ᵗ` with `D⁺ = (DᵗD)⁻¹Dᵗ`.
pub fn siegel_chart_inverse(alpha: f64, y: &Mat) -> Mat {
    let n = y.rows();
    let d = duplication_matrix(n);
    let len = n * (n + 1) / 2;
    let mut d_plus = d.transpose();
    for k in 0..len {
        let (i, j) = crate::matlib::SymMat::unpack_index(n, k);
        let w = if i == j { 1.0 } else { 0.5 };
        for c in 0..n * n {
            d_plus[(k, c)] *= w;
        }
    }
    d_plus
        .matmul(&kron(y, y))
        .matmul(&d_plus.transpose())
        .scale(1.0 / alpha)
}

/// `(1/(γy)) [[x² + y², −x], [−x, 1]]`, the inverse `(q, p)` block of X^J_1.
pub fn closed_inverse_xj1(params: MetricParams, x: f64, y: f64) -> Mat {
    Mat::from_rows(&[[x * x + y * y, -x], [-x, 1.0]]).scale(1.0 / (params.gamma * y))
}

/// Inverse of the extended `(q, p)` block `A11` for n = 1:
/// `(1/γ) / (γy + δ[(px + q)² + y²p²]) · [[γ(x² + y²) + δq²y, −γx + δpqy], [·, γ + δp²y]]`.
pub fn closed_inverse_xj1_extended(params: MetricParams, x: f64, y: f64, p: f64, q: f64) -> Mat {
    let MetricParams { gamma, delta, .. } = params;
    let den = gamma * y + delta * ((p * x + q).powi(2) + y * y * p * p);
    let off = -gamma * x + delta * p * q * y;
    Mat::from_rows(&[
        [gamma * (x * x + y * y) + delta * q * q * y, off],
        [off, gamma + delta * p * p * y],
    ])
    .scale(1.0 / (gamma * den))
}

/// Blocks of the extended `(q, p, κ)` inverse built from `A11⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct PqkInverseBlocks {
    pub a11: Mat,
    pub a12: Mat,
    pub a21: Mat,
    pub a22: Mat,
    /// `a22` through the rearranged rank-one expression.
    pub a22_simplified: Mat,
    /// Upper-left `2n×2n` block of the inverse.
    pub b11: Mat,
    pub b12: Mat,
    pub b21: Mat,
    pub b22: f64,
    /// `b22 = δ⁻¹[1 − δ(pa₁₁pᵗ − qa₂₁pᵗ − pa₁₂qᵗ + qa₂₂qᵗ)]⁻¹`.
    pub b22_explicit: f64,
}

impl PqkInverseBlocks {
    pub fn a11_inverse(&self) -> Mat {
        Mat::from_blocks(&self.a11, &self.a12, &self.a21, &self.a22)
    }

    /// `[[b11, b12], [b21, b22]]`.
    pub fn assemble(&self) -> Mat {
        Mat::from_blocks(
            &self.b11,
            &self.b12,
            &self.b21,
            &Mat::from_rows(&[[self.b22]]),
        )
    }
}

/// Partitioned inverse of the `(q, p, κ)` block for any n.
pub fn pqk_inverse_blocks(
    params: MetricParams,
    pt: &JacobiPoint,
    convention: CrossConvention,
) -> Result<PqkInverseBlocks> {
    let n = pt.n();
    let (gamma, delta) = (params.gamma, params.delta);
    let parts = a11_parts(params, pt, convention)?;
    let a11_inv = schur_inverse(&parts)?;
    let a11 = a11_inv.block(0, 0, n, n);
    let a12 = a11_inv.block(0, n, n, n);
    let a21 = a11_inv.block(n, 0, n, n);
    let a22 = a11_inv.block(n, n, n, n);

    let b = Blocks::of(pt)?;
    let (cross_qp, cross_pq) = b.cross(convention);
    let pp_outer = Mat::outer(&b.p, &b.p);
    let eye = Mat::identity(n);
    let pp_y = pp_outer.matmul(&b.y);
    let y_pp = b.y.matmul(&pp_outer);
    let shifted = inv_block(
        &(&eye.scale(gamma) + &pp_y.scale(delta)),
        SchurBlock::ComplementOfH1,
    )?;
    let shifted_left = inv_block(
        &(&eye.scale(gamma) + &y_pp.scale(delta)),
        SchurBlock::ComplementOfH1,
    )?;
    let damped = inv_block(
        &(&eye + &pp_y.scale(delta / gamma)),
        SchurBlock::ComplementOfH1,
    )?;
    let mut s = &b.y.scale(gamma) + &Mat::outer(&b.q, &b.q).scale(delta);
    s = &s
        + &b.x
            .matmul(&pp_y)
            .matmul(&damped)
            .matmul(&b.y_inv)
            .matmul(&b.x)
            .scale(delta);
    s = &s + &b.x.matmul(&shifted).matmul(&cross_qp).scale(gamma * delta);
    s = &s
        + &cross_pq
            .matmul(&shifted_left)
            .matmul(&b.x)
            .scale(gamma * delta);
    s = &s
        - &cross_pq
            .matmul(&b.y)
            .matmul(&shifted)
            .matmul(&cross_qp)
            .scale(delta * delta);
    let a22_simplified = inv_block(&s, SchurBlock::ComplementOfH1)?;

    // A12 = (−δpᵗ; δqᵗ), A21 = A12ᵗ, A22 = δ
    let w: Vec<f64> =
        b.p.iter()
            .map(|v| -delta * v)
            .chain(b.q.iter().map(|v| delta * v))
            .collect();
    let a12_col = Mat::col_vector(&w);
    let a21_row = Mat::row_vector(&w);
    let schur = delta - a21_row.matmul(&a11_inv).matmul(&a12_col)[(0, 0)];
    if schur.abs() < crate::matlib::PIVOT_THRESHOLD * delta {
        return Err(Error::SingularBlock(SchurBlock::ComplementOfH1));
    }
    let b22 = 1.0 / schur;
    let b11 = inv_block(
        &(&parts.assemble() - &a12_col.matmul(&a21_row).scale(1.0 / delta)),
        SchurBlock::ComplementOfH4,
    )?;
    let b12 = a11_inv.matmul(&a12_col).scale(-b22);
    let b21 = a21_row.matmul(&a11_inv).scale(-b22);

    let quad = |u: &[f64], m: &Mat, v: &[f64]| {
        Mat::row_vector(u).matmul(m).matmul(&Mat::col_vector(v))[(0, 0)]
    };
    let bracket = quad(&b.p, &a11, &b.p) - quad(&b.q, &a21, &b.p) - quad(&b.p, &a12, &b.q)
        + quad(&b.q, &a22, &b.q);
    let b22_explicit = 1.0 / (delta * (1.0 - delta * bracket));

    Ok(PqkInverseBlocks {
        a11,
        a12,
        a21,
        a22,
        a22_simplified,
        b11,
        b12,
        b21,
        b22,
        b22_explicit,
    })
}

/// Inverse of the n = 1 `(q, p, κ)` block from the closed `A11⁻¹` and the
/// scalar Schur step.
pub fn closed_inverse_xj1_extended_qpk(
    params: MetricParams,
    x: f64,
    y: f64,
    p: f64,
    q: f64,
) -> Mat {
    let delta = params.delta;
    let a = closed_inverse_xj1_extended(params, x, y, p, q);
    let w = Mat::col_vector(&[-delta * p, delta * q]);
    let b22 = 1.0 / (delta - w.transpose().matmul(&a).matmul(&w)[(0, 0)]);
    let b12 = a.matmul(&w).scale(-b22);
    let b11 = &a + &b12.matmul(&b12.transpose()).scale(1.0 / b22);
    Mat::from_blocks(&b11, &b12, &b12.transpose(), &Mat::from_rows(&[[b22]]))
}

fn n1_scalars(pt: &JacobiPoint) -> Result<(f64, f64, f64, f64)> {
    if pt.n() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected n = 1, got n = {}",
            pt.n()
        )));
    }
    Ok((pt.x().get(0, 0), pt.y().get(0, 0), pt.p()[0], pt.q()[0]))
}

/// LU determinant of the n = 1 `(q, p, κ)` block. Equals `γ²δ` everywhere.
pub fn det_n1_extended(params: MetricParams, x: f64, y: f64, p: f64, q: f64) -> Result<f64> {
    let base = crate::group::SiegelPoint::new(
        crate::matlib::SymMat::from_upper(1, vec![x])?,
        crate::matlib::SymMat::from_upper(1, vec![y])?,
    )?;
    let pt = JacobiPoint::new(base, vec![p], vec![q], Some(0.0))?;
    lu_det(&pqk_block(params, &pt, CrossConvention::Transposed)?)
}

pub fn det_n1_extended_closed(params: MetricParams) -> f64 {
    params.gamma * params.gamma * params.delta
}

/// Entries of a degree-2 point, named as in the n = 2 formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degree2 {
    pub x11: f64,
    pub x12: f64,
    pub x22: f64,
    pub y11: f64,
    pub y12: f64,
    pub y22: f64,
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
}

impl Degree2 {
    pub fn of(pt: &JacobiPoint) -> Result<Self> {
        if pt.n() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected n = 2, got n = {}",
                pt.n()
            )));
        }
        let (x, y) = (pt.x(), pt.y());
        Ok(Degree2 {
            x11: x.get(0, 0),
            x12: x.get(0, 1),
            x22: x.get(1, 1),
            y11: y.get(0, 0),
            y12: y.get(0, 1),
            y22: y.get(1, 1),
            p1: pt.p()[0],
            p2: pt.p()[1],
            q1: pt.q()[0],
            q2: pt.q()[1],
        })
    }

    /// `I₂ = p₂q₁ − p₁q₂`.
    pub fn i2(&self) -> f64 {
        self.p2 * self.q1 - self.p1 * self.q2
    }

    /// `D = det y`.
    pub fn det_y(&self) -> f64 {
        self.y11 * self.y22 - self.y12 * self.y12
    }

    /// `A = 2[(x₁₁ − x₂₂)y₁₂ − x₁₂(y₁₁ − y₂₂)]`.
    pub fn a(&self) -> f64 {
        2.0 * ((self.x11 - self.x22) * self.y12 - self.x12 * (self.y11 - self.y22))
    }

    /// `B = 4x₁₂² + (x₁₁ − x₂₂)² + y₁₁² + y₂₂² + 2y₁₂²`.
    pub fn b(&self) -> f64 {
        4.0 * self.x12 * self.x12
            + (self.x11 - self.x22).powi(2)
            + self.y11 * self.y11
            + self.y22 * self.y22
            + 2.0 * self.y12 * self.y12
    }
}

/// Scalar invariants of a degree-2 point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct N2Invariants {
    pub i2: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    /// `N = γδ / (det f · D)`.
    pub n: f64,
}

pub fn n2_invariants(params: MetricParams, pt: &JacobiPoint) -> Result<N2Invariants> {
    let e = Degree2::of(pt)?;
    let det = det_n2_closed(params, pt)?;
    let d = e.det_y();
    Ok(N2Invariants {
        i2: e.i2(),
        a: e.a(),
        b: e.b(),
        d,
        n: params.gamma * params.delta / (det * d),
    })
}

/// `δ[γ⁴ − γ³(δI₂/D)A − γ²((δI₂)²/D)B − γ((δI₂)³/D)A + (δI₂)⁴]`.
pub fn det_n2_closed(params: MetricParams, pt: &JacobiPoint) -> Result<f64> {
    params.validate()?;
    let e = Degree2::of(pt)?;
    let MetricParams { gamma, delta, .. } = params;
    let (a, b, d) = (e.a(), e.b(), e.det_y());
    let t = delta * e.i2();
    Ok(delta
        * (gamma.powi(4)
            - gamma.powi(3) * t / d * a
            - gamma * gamma * t * t / d * b
            - gamma * t.powi(3) / d * a
            + t.powi(4)))
}

/// Scale-aware singularity threshold `1e-12·(γ⁴δ + (δ|I₂|)⁴δ)` for the n = 2 determinant.
pub fn det_n2_threshold(params: MetricParams, i2: f64) -> f64 {
    let MetricParams { gamma, delta, .. } = params;
    1e-12 * (gamma.powi(4) * delta + (delta * i2.abs()).powi(4) * delta)
}

/// The 5×5 `(q₁, q₂, p₁, p₂, κ)` matrix `f`, entry by entry.
pub fn assemble_f_n2(params: MetricParams, pt: &JacobiPoint) -> Result<Mat> {
    params.validate()?;
    let e = Degree2::of(pt)?;
    let Degree2 {
        x11,
        x12,
        x22,
        y11,
        y12,
        y22,
        p1,
        p2,
        q1,
        q2,
    } = e;
    let MetricParams { gamma, delta, .. } = params;
    let g = gamma / e.det_y();
    let mut f = Mat::zeros(5, 5);
    let mut put = |i: usize, j: usize, v: f64| {
        f[(i - 1, j - 1)] = v;
        f[(j - 1, i - 1)] = v;
    };
    put(1, 1, g * y22 + delta * p1 * p1);
    put(1, 2, -g * y12 + delta * p1 * p2);
    put(1, 3, g * (y22 * x11 - y12 * x12) - delta * q1 * p1);
    put(1, 4, g * (y22 * x12 - y12 * x22) - delta * q1 * p2);
    put(1, 5, -delta * p1);
    put(2, 2, g * y11 + delta * p2 * p2);
    put(2, 3, g * (-y12 * x11 + y11 * x12) - delta * q2 * p1);
    put(2, 4, g * (-y12 * x12 + y11 * x22) - delta * q2 * p2);
    put(2, 5, -delta * p2);
    put(
        3,
        3,
        g * ((x11 * x11 + y11 * y11) * y22 + (x12 * x12 - y12 * y12) * y11 - 2.0 * x11 * x12 * y12)
            + delta * q1 * q1,
    );
    put(
        3,
        4,
        g * ((-x12 * x12 - x11 * x22 + y11 * y22 - y12 * y12) * y12
            + x11 * x12 * y22
            + x12 * x22 * y11)
            + delta * q1 * q2,
    );
    put(3, 5, delta * q1);
    put(
        4,
        4,
        g * ((x12 * x12 - y12 * y12) * y22 + (x22 * x22 + y22 * y22) * y11 - 2.0 * x12 * x22 * y12)
            + delta * q2 * q2,
    );
    put(4, 5, delta * q2);
    put(5, 5, delta);
    Ok(f)
}

/// Upper-triangle entry order of the n = 2 inverse: (1,1), (1,2), .., (5,5).
pub const N2_ENTRIES: [(usize, usize); 15] = [
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 2),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 3),
    (3, 4),
    (3, 5),
    (4, 4),
    (4, 5),
    (5, 5),
];

/// Coefficient polynomials `P₀..P₄` of one inverse entry, so that
/// `f^{ij} = N[Dγ³/δ·P₀ + γ²P₁ + γδI₂·P₂ + (δI₂)²P₃ + D(δI₂)³/γ·P₄]`.
pub type Ladder = [f64; 5];

/// The ladder of every entry in [`N2_ENTRIES`] order. Depends on the
/// point only, not on γ or δ.
pub fn n2_ladders(pt: &JacobiPoint) -> Result<[Ladder; 15]> {
    let e = Degree2::of(pt)?;
    let Degree2 {
        x11,
        x12,
        x22,
        y11,
        y12,
        y22,
        p1,
        p2,
        q1,
        q2,
    } = e;
    let i2 = e.i2();
    let sq = |v: f64| v * v;

    // recurring polynomials
    let d11 = y11 * (sq(x12) - sq(y12)) + y22 * (sq(x11) + sq(y11)) - 2.0 * x11 * x12 * y12;
    let d22 = y11 * (sq(x22) + sq(y22)) + y22 * (sq(x12) - sq(y12)) - 2.0 * x22 * x12 * y12;
    let d12 = x12 * (x22 * y11 + x11 * y22) - y12 * (sq(x12) + sq(y12) + x11 * x22 - y11 * y22);
    let s = x12 * (x11 + x22) + y12 * (y11 + y22);
    let c1 = x12 * (sq(x12) + sq(y12) - x11 * x22 + y11 * y22) - y12 * (x22 * y11 + x11 * y22);
    let c2 = x11 * (sq(x12) - sq(y12) + sq(x22) + sq(y22))
        - x22 * (sq(x12) - sq(y12) + sq(x11) + sq(y11))
        + 2.0 * x12 * y12 * (y11 - y22);
    let r1 = sq(x11) + 2.0 * sq(x12) - x11 * x22 + sq(y11) + sq(y12);
    let r2 = 2.0 * sq(x12) - x11 * x22 + sq(x22) + sq(y12) + sq(y22);
    let t1 = 2.0 * x11 * y12 - 2.0 * x12 * y11 - x22 * y12 + x12 * y22;
    let t2 = x12 * y11 - x11 * y12 + 2.0 * x22 * y12 - 2.0 * x12 * y22;

    let f11 = [0.0, d11, -2.0 * c1, -d22, 0.0];
    let f12 = [0.0, d12, c2, d12, 0.0];
    let f13 = [0.0, x12 * y12 - x11 * y22, -s, x22 * y11 - x12 * y12, 0.0];
    let f14 = [0.0, x11 * y12 - x12 * y11, r1, t1, -1.0];
    let f15 = [
        0.0,
        q1 * (x11 * y22 - x12 * y12) + q2 * (x12 * y11 - x11 * y12) + p1 * d11 + p2 * d12,
        q1 * s - q2 * r1 - 2.0 * p1 * c1 + p2 * c2,
        q1 * (x12 * y12 - x22 * y11) - q2 * t1 + p2 * d12 - p1 * d22,
        q2,
    ];
    let f22 = [0.0, d22, 2.0 * c1, -d11, 0.0];
    let f23 = [0.0, x22 * y12 - x12 * y22, -r2, t2, 1.0];
    let f24 = [0.0, x12 * y12 - x22 * y11, s, x11 * y22 - x12 * y12, 0.0];
    let f25 = [
        0.0,
        q1 * (x12 * y22 - x22 * y12) + q2 * (x22 * y11 - x12 * y12) + p1 * d12 + p2 * d22,
        q1 * r2 - q2 * s + 2.0 * p2 * c1 + p1 * c2,
        -(q1 * t2 + q2 * (x11 * y22 - x12 * y12) - p1 * d12 + p2 * d11),
        -q1,
    ];
    let f33 = [0.0, y22, 2.0 * x12, -y11, 0.0];
    let f34 = [0.0, -y12, -(x11 - x22), -y12, 0.0];
    let f35 = [
        0.0,
        -q1 * y22 + q2 * y12 - p1 * (x11 * y22 - x12 * y12) + p2 * (x22 * y12 - x12 * y22),
        -(2.0 * q1 * x12 - q2 * (x11 - x22) + p1 * s + p2 * r2),
        q1 * y11 + q2 * y12 + p1 * (x22 * y11 - x12 * y12) + p2 * t2,
        p2,
    ];
    let f44 = [0.0, y11, -2.0 * x12, -y22, 0.0];
    let f45 = [
        0.0,
        q1 * y12 - q2 * y11 + p1 * (x11 * y12 - x12 * y11) + p2 * (x12 * y12 - x22 * y11),
        q1 * (x11 - x22) + 2.0 * q2 * x12 + p1 * r1 + p2 * s,
        q1 * y12 + q2 * y22 + p1 * t1 + p2 * (x11 * y22 - x12 * y12),
        -p1,
    ];
    let f55 = [
        1.0,
        sq(q1) * y22 + sq(q2) * y11 - 2.0 * q1 * q2 * y12
            + sq(p1) * d11
            + sq(p2) * d22
            + 2.0 * p1 * p2 * d12
            + 2.0 * p1 * q1 * (x11 * y22 - x12 * y12)
            + 2.0 * p1 * q2 * (x12 * y22 - x22 * y12)
            + 2.0 * p2 * q1 * (x12 * y11 - x11 * y12)
            + 2.0 * p2 * q2 * (x22 * y11 - x12 * y12),
        2.0 * ((sq(q1) - sq(q2)) * x12 - q1 * q2 * (x11 - x22) - (sq(p1) - sq(p2)) * c1
            + (p1 * q1 - p2 * q2) * s
            - 0.5 * (p1 * q2 + p2 * q1) * (sq(x11) - sq(x22) + sq(y11) - sq(y22))
            + p1 * p2 * c2),
        -(sq(q1) * y11 + sq(q2) * y22 + 2.0 * q1 * q2 * y12 + sq(p1) * d22 + sq(p2) * d11
            - 2.0 * p1 * q1 * (x12 * y12 - x22 * y11)
            - 2.0 * p1 * q2 * (x12 * y11 - x11 * y12)
            - 2.0 * p2 * q1 * (x12 * y22 - x22 * y12)
            - 2.0 * p2 * q2 * (x12 * y12 - x11 * y22)
            - 2.0 * p1 * p2 * d12),
        -i2,
    ];
    Ok([
        f11, f12, f13, f14, f15, f22, f23, f24, f25, f33, f34, f35, f44, f45, f55,
    ])
}

/// Evaluates a ladder with the weights of the given γ, δ, I₂, D.
pub fn ladder_value(ladder: &Ladder, gamma: f64, delta: f64, i2: f64, d: f64) -> f64 {
    let t = delta * i2;
    d * gamma.powi(3) / delta * ladder[0]
        + gamma * gamma * ladder[1]
        + gamma * t * ladder[2]
        + t * t * ladder[3]
        + d * t.powi(3) / gamma * ladder[4]
}

/// Closed-form inverse of [`assemble_f_n2`].
pub fn n2_extended_inverse(params: MetricParams, pt: &JacobiPoint) -> Result<Mat> {
    n2_extended_inverse_with_flip(params, pt, None)
}

/// [`n2_extended_inverse`] with the sign of one entry `(i, j)` (1-based, either
/// order) flipped. Exists so the verification suite can prove it notices a
/// single transcription error.
#[doc(hidden)]
pub fn n2_extended_inverse_with_flip(
    params: MetricParams,
    pt: &JacobiPoint,
    flip: Option<(usize, usize)>,
) -> Result<Mat> {
    let e = Degree2::of(pt)?;
    let det = det_n2_closed(params, pt)?;
    let threshold = det_n2_threshold(params, e.i2());
    if !(det.abs() > threshold) {
        return Err(Error::NearSingular { det, threshold });
    }
    let d = e.det_y();
    let norm = params.gamma * params.delta / (det * d);
    let ladders = n2_ladders(pt)?;
    let flip = flip.map(|(i, j)| if i <= j { (i, j) } else { (j, i) });
    let mut inv = Mat::zeros(5, 5);
    for (ladder, &(i, j)) in ladders.iter().zip(N2_ENTRIES.iter()) {
        let mut v = norm * ladder_value(ladder, params.gamma, params.delta, e.i2(), d);
        if flip == Some((i, j)) {
            v = -v;
        }
        inv[(i - 1, j - 1)] = v;
        inv[(j - 1, i - 1)] = v;
    }
    Ok(inv)
}

/// Inverse of the full chart metric from closed forms only.
///
/// The Siegel and `(q, p[, κ])` blocks decouple, so this is block diagonal.
/// The extended case has a closed form for n = 1, and for n = 2 under
/// [`CrossConvention::Transposed`]; anything else is [`Error::Unavailable`].
pub fn closed_chart_inverse(
    params: MetricParams,
    pt: &JacobiPoint,
    convention: CrossConvention,
) -> Result<Mat> {
    params.validate()?;
    let n = pt.n();
    let y = pt.y().to_mat();
    let siegel = siegel_chart_inverse(params.alpha, &y);
    let tail = if !pt.is_extended() {
        closed_inverse_xjn(params, pt)?.qp_inverse()
    } else if n == 1 {
        let (x, y, p, q) = n1_scalars(pt)?;
        closed_inverse_xj1_extended_qpk(params, x, y, p, q)
    } else if n == 2 && convention == CrossConvention::Transposed {
        n2_extended_inverse(params, pt)?
    } else if n == 2 {
        return Err(Error::Unavailable(
            "the n = 2 extended closed form uses the transposed cross-term convention".into(),
        ));
    } else {
        return Err(Error::Unavailable(format!(
            "no closed extended inverse for n = {n}"
        )));
    };
    let s = siegel.rows();
    let dim = 2 * s + tail.rows();
    let mut out = Mat::zeros(dim, dim);
    out.set_block(0, 0, &siegel);
    out.set_block(s, s, &siegel);
    out.set_block(2 * s, 2 * s, &tail);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SiegelPoint;
    use crate::matlib::SymMat;

    fn point2(x: [f64; 3], y: [f64; 3], p: [f64; 2], q: [f64; 2]) -> JacobiPoint {
        let base = SiegelPoint::new(
            SymMat::from_upper(2, x.to_vec()).unwrap(),
            SymMat::from_upper(2, y.to_vec()).unwrap(),
        )
        .unwrap();
        JacobiPoint::new(base, p.to_vec(), q.to_vec(), Some(0.0)).unwrap()
    }

    fn point1(x: f64, y: f64, p: f64, q: f64) -> JacobiPoint {
        let base = SiegelPoint::new(
            SymMat::from_upper(1, vec![x]).unwrap(),
            SymMat::from_upper(1, vec![y]).unwrap(),
        )
        .unwrap();
        JacobiPoint::new(base, vec![p], vec![q], Some(0.0)).unwrap()
    }

    #[test]
    fn schur_block_diagonal() {
        let h1 = Mat::from_rows(&[[2.0, 0.5], [0.5, 1.0]]);
        let h4 = Mat::from_rows(&[[4.0]]);
        let h = Partition2x2::new(h1.clone(), Mat::zeros(2, 1), Mat::zeros(1, 2), h4).unwrap();
        let inv = schur_inverse(&h).unwrap();
        let expected = Mat::from_blocks(
            &lu_inverse(&h1).unwrap(),
            &Mat::zeros(2, 1),
            &Mat::zeros(1, 2),
            &Mat::from_rows(&[[0.25]]),
        );
        assert!(inv.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn schur_two_by_two() {
        let h = Partition2x2::split(&Mat::from_rows(&[[2.0, 1.0], [1.0, 1.0]]), 1).unwrap();
        let inv = schur_inverse(&h).unwrap();
        assert!(inv.max_abs_diff(&Mat::from_rows(&[[1.0, -1.0], [-1.0, 2.0]])) < 1e-15);
    }

    #[test]
    fn schur_reports_failing_block() {
        let h = Partition2x2::split(&Mat::from_rows(&[[0.0, 1.0], [1.0, 1.0]]), 1).unwrap();
        assert_eq!(schur_inverse(&h), Err(Error::SingularBlock(SchurBlock::H1)));
        let h = Partition2x2::split(&Mat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]), 1).unwrap();
        assert_eq!(
            schur_inverse(&h),
            Err(Error::SingularBlock(SchurBlock::ComplementOfH4))
        );
    }

    #[test]
    fn partition_rejects_nonconformal() {
        let r = Partition2x2::new(
            Mat::identity(2),
            Mat::zeros(2, 2),
            Mat::zeros(1, 2),
            Mat::identity(1),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn xjn_inverse_decoupled_at_origin() {
        let params = MetricParams::new(1.0, 2.5, 1.0).unwrap();
        let pt = point1(0.0, 1.0, 0.0, 0.0);
        let inv = closed_inverse_xjn(params, &pt).unwrap().qp_inverse();
        assert!(inv.max_abs_diff(&Mat::diag(&[0.4, 0.4])) < 1e-15);
    }

    #[test]
    fn xjn_inverse_n1_matches_closed_pair() {
        let params = MetricParams::new(1.0, 1.5, 1.0).unwrap();
        let pt = point1(1.0, 2.0, 0.0, 0.0);
        let inv = closed_inverse_xjn(params, &pt).unwrap().qp_inverse();
        let expected = Mat::from_rows(&[[5.0, -1.0], [-1.0, 1.0]]).scale(1.0 / (2.0 * 1.5));
        assert!(inv.max_abs_diff(&expected) < 1e-15);
        assert!(closed_inverse_xj1(params, 1.0, 2.0).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn xj1_extended_example() {
        let params = MetricParams::new(1.0, 2.0, 3.0).unwrap();
        let inv = closed_inverse_xj1_extended(params, 0.0, 1.0, 1.0, 0.0);
        assert!(inv.max_abs_diff(&Mat::diag(&[1.0 / 5.0, 0.5])) < 1e-15);
    }

    #[test]
    fn xj1_extended_small_delta_limit() {
        let params = MetricParams::new(1.0, 1.7, 1e-12).unwrap();
        let a = closed_inverse_xj1_extended(params, 1.0, 2.0, 0.3, -0.8);
        let b = closed_inverse_xj1(params, 1.0, 2.0);
        assert!(a.max_abs_diff(&b) < 1e-9);
    }

    #[test]
    fn pqk_blocks_trivial_translation() {
        let params = MetricParams::new(1.0, 1.3, 0.6).unwrap();
        let pt = point2([0.2, -0.1, 0.4], [2.0, 0.3, 1.0], [0.0, 0.0], [0.0, 0.0]);
        let blocks = pqk_inverse_blocks(params, &pt, CrossConvention::Transposed).unwrap();
        assert!((blocks.b22 - 1.0 / 0.6).abs() < 1e-14);
        assert!((blocks.b22_explicit - 1.0 / 0.6).abs() < 1e-14);
    }

    #[test]
    fn a22_simplified_at_x_zero() {
        let params = MetricParams::new(1.0, 1.7, 0.9).unwrap();
        let pt = point1(0.0, 1.0, 1.0, 0.0);
        let blocks = pqk_inverse_blocks(params, &pt, CrossConvention::Transposed).unwrap();
        assert!((blocks.a22_simplified[(0, 0)] - 1.0 / 1.7).abs() < 1e-15);
        assert!((blocks.a22[(0, 0)] - 1.0 / 1.7).abs() < 1e-15);
    }

    #[test]
    fn det_n1_examples() {
        let params = MetricParams::new(1.0, 2.0, 3.0).unwrap();
        assert!((det_n1_extended(params, 0.0, 1.0, 0.0, 0.0).unwrap() - 12.0).abs() < 1e-12);
        let unit = MetricParams::unit();
        let det = det_n1_extended(unit, 1.0, 2.0, 3.0, -1.0).unwrap();
        assert!((det - 1.0).abs() < 1e-10);
        assert_eq!(det_n1_extended_closed(params), 12.0);
    }

    #[test]
    fn n2_invariant_examples() {
        let unit = MetricParams::unit();
        let e = Degree2::of(&point2([0.0; 3], [1.0, 0.0, 1.0], [1.0, 0.0], [0.0, 1.0])).unwrap();
        assert_eq!(e.i2(), -1.0);
        assert_eq!((e.a(), e.b(), e.det_y()), (0.0, 2.0, 1.0));
        let e = Degree2::of(&point2([0.0; 3], [2.0, 1.0, 1.0], [0.0; 2], [0.0; 2])).unwrap();
        assert_eq!(e.det_y(), 1.0);
        let inv =
            n2_invariants(unit, &point2([0.0; 3], [1.0, 0.0, 1.0], [0.0; 2], [0.0; 2])).unwrap();
        assert_eq!(inv.n, 1.0);
    }

    #[test]
    fn det_n2_without_translation() {
        let params = MetricParams::new(1.0, 1.5, 0.7).unwrap();
        let pt = point2([0.3, 0.1, -0.2], [1.5, 0.2, 0.8], [0.0; 2], [0.0; 2]);
        let det = det_n2_closed(params, &pt).unwrap();
        assert!((det - 0.7 * 1.5f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn det_n2_vanishes_at_unit_example() {
        // γ = δ = 1, x = 0, y = I, p = (1, 0), q = (0, 1): I₂ = −1, A = 0,
        // B = 2, D = 1, so the bracket is 1 − 2 + 1 = 0. The LU route on the
        // assembled matrix agrees that it is singular.
        let unit = MetricParams::unit();
        let pt = point2([0.0; 3], [1.0, 0.0, 1.0], [1.0, 0.0], [0.0, 1.0]);
        assert_eq!(det_n2_closed(unit, &pt).unwrap(), 0.0);
        let f = assemble_f_n2(unit, &pt).unwrap();
        assert!(lu_det(&f).map_or(true, |d| d.abs() < 1e-12));
        assert!(matches!(
            n2_extended_inverse(unit, &pt),
            Err(Error::NearSingular { .. })
        ));
    }

    #[test]
    fn f_matrix_at_origin_is_diagonal() {
        let params = MetricParams::new(1.0, 1.3, 2.2).unwrap();
        let pt = point2([0.0; 3], [1.0, 0.0, 1.0], [0.0; 2], [0.0; 2]);
        let f = assemble_f_n2(params, &pt).unwrap();
        assert!(f.max_abs_diff(&Mat::diag(&[1.3, 1.3, 1.3, 1.3, 2.2])) < 1e-15);
    }

    #[test]
    fn f_matrix_kappa_entries() {
        let params = MetricParams::new(1.0, 1.3, 2.2).unwrap();
        let pt = point2([0.5, 0.1, -0.3], [1.2, 0.4, 0.9], [0.7, -0.2], [0.3, 0.8]);
        let f = assemble_f_n2(params, &pt).unwrap();
        assert_eq!(f[(4, 4)], 2.2);
        assert_eq!(f[(0, 4)], -2.2 * 0.7);
    }

    #[test]
    fn n2_inverse_at_origin() {
        let params = MetricParams::new(1.0, 1.3, 2.2).unwrap();
        let pt = point2([0.0; 3], [1.0, 0.0, 1.0], [0.0; 2], [0.0; 2]);
        let inv = n2_extended_inverse(params, &pt).unwrap();
        assert!((inv[(2, 2)] - 1.0 / 1.3).abs() < 1e-14);
        assert!((inv[(4, 4)] - 1.0 / 2.2).abs() < 1e-14);
    }

    #[test]
    fn chart_siegel_inverse_matches_lu() {
        let y = Mat::from_rows(&[[1.5, 0.3, -0.1], [0.3, 0.9, 0.2], [-0.1, 0.2, 1.1]]);
        let alpha = 0.8;
        let y_inv = lu_inverse(&y).unwrap();
        let d = duplication_matrix(3);
        let forward = d
            .transpose()
            .matmul(&kron(&y_inv, &y_inv))
            .matmul(&d)
            .scale(alpha);
        let inv = siegel_chart_inverse(alpha, &y);
        assert!(forward.matmul(&inv).max_abs_diff(&Mat::identity(6)) < 1e-12);
    }
}
