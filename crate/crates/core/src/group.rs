//! The real Jacobi group and its actions on the Siegel–Jacobi spaces.
//!
//! A group element is `(M, (λ, μ), κ)` with `M = [[a, b], [c, d]]` in
//! `Sp(n, ℝ)`. It acts on `v = x + iy` by the generalized Möbius map
//! `v₁ = (av + b)(cv + d)⁻¹`, on the row vectors `(p, q)` affinely through
//! `M⁻¹`, and on κ by a shift plus the symplectic pairing of `(λ, μ)` with
//! `(p, q)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matlib::{is_positive_definite, lu_inverse, mat_exp, Mat, SymMat};

/// `J = [[0, I], [-I, 0]]` of size 2n.
pub fn symplectic_form(n: usize) -> Mat {
    let mut j = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Complex matrix held as a pair of real matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMat {
    pub re: Mat,
    pub im: Mat,
}

impl ComplexMat {
    pub fn new(re: Mat, im: Mat) -> Self {
        assert_eq!(re.shape(), im.shape(), "re/im shape mismatch");
        ComplexMat { re, im }
    }

    pub fn real(re: Mat) -> Self {
        let im = Mat::zeros(re.rows(), re.cols());
        ComplexMat { re, im }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.re.shape()
    }

    pub fn add(&self, other: &ComplexMat) -> ComplexMat {
        ComplexMat::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn mul(&self, other: &ComplexMat) -> ComplexMat {
        let re = &self.re.matmul(&other.re) - &self.im.matmul(&other.im);
        let im = &self.re.matmul(&other.im) + &self.im.matmul(&other.re);
        ComplexMat::new(re, im)
    }

    /// Left multiplication by a real matrix.
    pub fn real_mul(m: &Mat, z: &ComplexMat) -> ComplexMat {
        ComplexMat::new(m.matmul(&z.re), m.matmul(&z.im))
    }

    /// Inverse through the real embedding `[[re, -im], [im, re]]`.
    pub fn inverse(&self) -> Result<ComplexMat> {
        let n = self.re.rows();
        let embed = Mat::from_blocks(&self.re, &(-&self.im), &self.im, &self.re);
        let inv = lu_inverse(&embed)?;
        Ok(ComplexMat::new(
            inv.block(0, 0, n, n),
            inv.block(n, 0, n, n),
        ))
    }

    pub fn max_abs_diff(&self, other: &ComplexMat) -> f64 {
        self.re
            .max_abs_diff(&other.re)
            .max(self.im.max_abs_diff(&other.im))
    }
}

/// A point `v = x + iy` of the Siegel upper half space.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    x: SymMat,
    y: SymMat,
}

impl SiegelPoint {
    pub fn new(x: SymMat, y: SymMat) -> Result<Self> {
        if x.n() != y.n() {
            return Err(Error::DimensionMismatch(format!(
                "x is {0}x{0} but y is {1}x{1}",
                x.n(),
                y.n()
            )));
        }
        if !is_positive_definite(&y.to_mat()) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(SiegelPoint { x, y })
    }

    /// `x = 0`, `y = I`.
    pub fn base_point(n: usize) -> Self {
        SiegelPoint {
            x: SymMat::zeros(n),
            y: SymMat::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn x(&self) -> &SymMat {
        &self.x
    }

    pub fn y(&self) -> &SymMat {
        &self.y
    }

    pub fn v(&self) -> ComplexMat {
        ComplexMat::new(self.x.to_mat(), self.y.to_mat())
    }
}

/// A point `(x, y, p, q)` of X^J_n, or `(x, y, p, q, κ)` of the extended
/// space when `kappa` is present.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPoint {
    base: SiegelPoint,
    p: Vec<f64>,
    q: Vec<f64>,
    kappa: Option<f64>,
}

impl JacobiPoint {
    pub fn new(base: SiegelPoint, p: Vec<f64>, q: Vec<f64>, kappa: Option<f64>) -> Result<Self> {
        let n = base.n();
        if p.len() != n || q.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "p, q have lengths {}, {} but n = {n}",
                p.len(),
                q.len()
            )));
        }
        if p.iter()
            .chain(&q)
            .chain(kappa.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("p, q or kappa"));
        }
        Ok(JacobiPoint { base, p, q, kappa })
    }

    pub fn base(&self) -> &SiegelPoint {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn x(&self) -> &SymMat {
        self.base.x()
    }

    pub fn y(&self) -> &SymMat {
        self.base.y()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn is_extended(&self) -> bool {
        self.kappa.is_some()
    }

    /// Same point with κ dropped.
    pub fn without_kappa(&self) -> JacobiPoint {
        JacobiPoint {
            kappa: None,
            ..self.clone()
        }
    }

    pub fn with_kappa(&self, kappa: f64) -> JacobiPoint {
        JacobiPoint {
            kappa: Some(kappa),
            ..self.clone()
        }
    }
}

/// `(M, (λ, μ), κ)` with `M = [[a, b], [c, d]] ∈ Sp(n, ℝ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiGroupElement {
    a: Mat,
    b: Mat,
    c: Mat,
    d: Mat,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    kappa: f64,
}

/// Relative tolerance on `MᵗJM = J` accepted by [`JacobiGroupElement::new`].
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-10;

impl JacobiGroupElement {
    pub fn new(m: Mat, lambda: Vec<f64>, mu: Vec<f64>, kappa: f64) -> Result<Self> {
        if !m.is_square() || m.rows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "M must be 2n x 2n, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows() / 2;
        if lambda.len() != n || mu.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "lambda, mu have lengths {}, {} but n = {n}",
                lambda.len(),
                mu.len()
            )));
        }
        let g = Self::from_parts_unchecked(m, lambda, mu, kappa);
        let scale = g.m().max_abs().powi(2).max(1.0);
        let residual = g.symplectic_residual();
        if residual > SYMPLECTIC_TOLERANCE * scale {
            return Err(Error::InvalidArgument(format!(
                "M is not symplectic: max |MtJM - J| = {residual:e}"
            )));
        }
        Ok(g)
    }

    fn from_parts_unchecked(m: Mat, lambda: Vec<f64>, mu: Vec<f64>, kappa: f64) -> Self {
        let n = m.rows() / 2;
        JacobiGroupElement {
            a: m.block(0, 0, n, n),
            b: m.block(0, n, n, n),
            c: m.block(n, 0, n, n),
            d: m.block(n, n, n, n),
            lambda,
            mu,
            kappa,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts_unchecked(Mat::identity(2 * n), vec![0.0; n], vec![0.0; n], 0.0)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn c(&self) -> &Mat {
        &self.c
    }

    pub fn d(&self) -> &Mat {
        &self.d
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn m(&self) -> Mat {
        Mat::from_blocks(&self.a, &self.b, &self.c, &self.d)
    }

    /// `max |MᵗJM − J|`.
    pub fn symplectic_residual(&self) -> f64 {
        let m = self.m();
        let j = symplectic_form(self.n());
        m.transpose().matmul(&j).matmul(&m).max_abs_diff(&j)
    }

    /// `M⁻¹ = J⁻¹MᵗJ`, exact for symplectic M up to rounding.
    pub fn m_inverse(&self) -> Mat {
        let j = symplectic_form(self.n());
        (-&j).matmul(&self.m().transpose()).matmul(&j)
    }

    /// The translation `(p, q) = (λ, μ)M⁻¹` carried by this element.
    pub fn translation(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let lm: Vec<f64> = self.lambda.iter().chain(&self.mu).copied().collect();
        let pq = Mat::row_vector(&lm).matmul(&self.m_inverse());
        let row = pq.row(0);
        (row[..n].to_vec(), row[n..].to_vec())
    }

    /// `self ∘ other`: acting with the result equals acting with `other`
    /// first and then with `self`.
    pub fn compose(&self, other: &JacobiGroupElement) -> JacobiGroupElement {
        let n = self.n();
        let m2 = self.m();
        let m1 = other.m();
        let x2: Vec<f64> = self.lambda.iter().chain(&self.mu).copied().collect();
        let x1: Vec<f64> = other.lambda.iter().chain(&other.mu).copied().collect();
        let x2m1 = Mat::row_vector(&x2).matmul(&m1);
        let x: Vec<f64> = x1.iter().zip(x2m1.row(0)).map(|(a, b)| a + b).collect();
        let pairing = x2m1
            .matmul(&symplectic_form(n))
            .matmul(&Mat::col_vector(&x1))[(0, 0)];
        JacobiGroupElement::from_parts_unchecked(
            m2.matmul(&m1),
            x[..n].to_vec(),
            x[n..].to_vec(),
            self.kappa + other.kappa + pairing,
        )
    }
}

/// Random element with `M = exp(J·S)`, `S` symmetric with entries uniform
/// in `[-scale, scale]`; λ, μ, κ uniform in the same range.
pub fn random_symplectic<R: Rng + ?Sized>(
    n: usize,
    scale: f64,
    rng: &mut R,
) -> Result<JacobiGroupElement> {
    if !(scale > 0.0 && scale <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "scale must lie in (0, 2], got {scale}"
        )));
    }
    let dim = 2 * n;
    let mut s = Mat::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = rng.gen_range(-scale..=scale);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let m = mat_exp(&symplectic_form(n).matmul(&s))?;
    let lambda = (0..n).map(|_| rng.gen_range(-scale..=scale)).collect();
    let mu = (0..n).map(|_| rng.gen_range(-scale..=scale)).collect();
    let kappa = rng.gen_range(-scale..=scale);
    Ok(JacobiGroupElement::from_parts_unchecked(
        m, lambda, mu, kappa,
    ))
}

/// [`random_symplectic`] driven by a fresh seeded generator.
pub fn random_symplectic_seeded(n: usize, scale: f64, seed: u64) -> Result<JacobiGroupElement> {
    random_symplectic(n, scale, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random symmetric x (entries in [-1, 1]) and `y = AAᵗ + 0.1·I`, A entries in [-1, 1].
pub fn random_siegel_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SiegelPoint {
    let mut x = SymMat::zeros(n);
    for i in 0..n {
        for j in i..n {
            x.set(i, j, rng.gen_range(-1.0..=1.0));
        }
    }
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = rng.gen_range(-1.0..=1.0);
        }
    }
    let y = &a.matmul(&a.transpose()) + &Mat::identity(n).scale(0.1);
    SiegelPoint::new(x, SymMat::from_mat(&y).expect("square"))
        .expect("AAt + 0.1 I is positive definite")
}

/// Random point with p, q (and κ when `extended`) uniform in [-1, 1].
pub fn random_jacobi_point<R: Rng + ?Sized>(n: usize, extended: bool, rng: &mut R) -> JacobiPoint {
    let base = random_siegel_point(n, rng);
    let p = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let q = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let kappa = extended.then(|| rng.gen_range(-1.0..=1.0));
    JacobiPoint::new(base, p, q, kappa).expect("consistent dimensions")
}

/// `v₁ = (av + b)(cv + d)⁻¹`, re-symmetrized.
pub fn act_siegel(g: &JacobiGroupElement, pt: &SiegelPoint) -> Result<SiegelPoint> {
    if g.n() != pt.n() {
        return Err(Error::DimensionMismatch(format!(
            "group element of degree {} acting on point of degree {}",
            g.n(),
            pt.n()
        )));
    }
    let v = pt.v();
    let num = ComplexMat::real_mul(g.a(), &v).add(&ComplexMat::real(g.b().clone()));
    let den = ComplexMat::real_mul(g.c(), &v).add(&ComplexMat::real(g.d().clone()));
    let den_inv = match den.inverse() {
        Ok(inv) => inv,
        Err(Error::SingularMatrix { .. }) => return Err(Error::SingularDenominator),
        Err(e) => return Err(e),
    };
    let v1 = num.mul(&den_inv);
    let x1 = SymMat::from_mat(&v1.re)?;
    let y1 = SymMat::from_mat(&v1.im)?;
    SiegelPoint::new(x1, y1)
}

/// Action on X^J_n (and on κ when the point carries it).
pub fn act_extended(g: &JacobiGroupElement, pt: &JacobiPoint) -> Result<JacobiPoint> {
    let base = act_siegel(g, pt.base())?;
    let n = g.n();
    let (pg, qg) = g.translation();
    let pq: Vec<f64> = pt.p().iter().chain(pt.q()).copied().collect();
    let moved = Mat::row_vector(&pq).matmul(&g.m_inverse());
    let moved = moved.row(0);
    let p1: Vec<f64> = (0..n).map(|i| pg[i] + moved[i]).collect();
    let q1: Vec<f64> = (0..n).map(|i| qg[i] + moved[n + i]).collect();
    let kappa1 = pt
        .kappa()
        .map(|k| g.kappa() + k + dot(g.lambda(), pt.q()) - dot(g.mu(), pt.p()));
    JacobiPoint::new(base, p1, q1, kappa1)
}

/// `v = x + iy` and `u = pv + q`; `u` is returned as a 1×n complex matrix.
pub fn complex_coords(pt: &JacobiPoint) -> (ComplexMat, ComplexMat) {
    let v = pt.base().v();
    let p = Mat::row_vector(pt.p());
    let u = ComplexMat::new(&p.matmul(&v.re) + &Mat::row_vector(pt.q()), p.matmul(&v.im));
    (v, u)
}

/// `u₁ = (u + λv + μ)(cv + d)⁻¹`, the direct transformation of `u`.
pub fn transform_u(g: &JacobiGroupElement, pt: &JacobiPoint) -> Result<ComplexMat> {
    let (v, u) = complex_coords(pt);
    let lambda = Mat::row_vector(g.lambda());
    let shifted = ComplexMat::new(
        &(&u.re + &lambda.matmul(&v.re)) + &Mat::row_vector(g.mu()),
        &u.im + &lambda.matmul(&v.im),
    );
    let den = ComplexMat::real_mul(g.c(), &v).add(&ComplexMat::real(g.d().clone()));
    let den_inv = den.inverse().map_err(|_| Error::SingularDenominator)?;
    Ok(shifted.mul(&den_inv))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
