//! Small dense real linear algebra.
//!
//! Everything here is row-major `f64`, sized for matrices of a few dozen
//! rows at most. The pivoted LU factorization is the numerical oracle the
//! rest of the crate checks its closed-form inverses and determinants
//! against, so it is kept deliberately plain.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Relative pivot magnitude below which a matrix is declared singular.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Mat { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Mat::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// 1×n matrix holding `v`.
    pub fn row_vector(v: &[f64]) -> Self {
        Mat {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    /// n×1 matrix holding `v`.
    pub fn col_vector(v: &[f64]) -> Self {
        Mat {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Rank-one matrix `u vᵗ`, i.e. entry (i, j) is `u[i] * v[j]`.
    pub fn outer(u: &[f64], v: &[f64]) -> Self {
        let mut m = Mat::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `max |self - other|` over all entries. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(
            self.cols,
            other.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            other.shape()
        );
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    /// Copy of the `rows`×`cols` sub-block starting at (`r0`, `c0`).
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        let mut b = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        b
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// `(self + selfᵗ) / 2`.
    pub fn symmetrized(&self) -> Mat {
        let t = self.transpose();
        (self + &t).scale(0.5)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Stacks `[[a, b], [c, d]]`. Block shapes must be conformal.
    pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = Mat::zeros(a.rows + c.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(0, a.cols, b);
        m.set_block(a.rows, 0, c);
        m.set_block(a.rows, a.cols, d);
        m
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;

    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;

    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;

    fn mul(self, rhs: &Mat) -> Mat {
        self.matmul(rhs)
    }
}

impl Neg for &Mat {
    type Output = Mat;

    fn neg(self) -> Mat {
        self.scale(-1.0)
    }
}

/// Real symmetric n×n matrix stored as its upper triangle, row-major.
#[derive(Clone, PartialEq)]
pub struct SymMat {
    n: usize,
    upper: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut s = SymMat::zeros(n);
        for i in 0..n {
            s.set(i, i, 1.0);
        }
        s
    }

    /// Builds from the row-major upper triangle `(0,0), (0,1), .., (1,1), ..`.
    pub fn from_upper(n: usize, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "{} upper-triangle entries for n = {n}",
                upper.len()
            )));
        }
        if upper.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("symmetric matrix"));
        }
        Ok(SymMat { n, upper })
    }

    /// Compresses a full matrix, averaging (i, j) and (j, i).
    pub fn from_mat(m: &Mat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let mut s = SymMat::zeros(n);
        for i in 0..n {
            for j in i..n {
                s.set(i, j, 0.5 * (m[(i, j)] + m[(j, i)]));
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries, `n(n+1)/2`.
    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Position of (i, j), i ≤ j, in the packed upper triangle.
    pub fn packed_index(n: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * n - i * (i + 1) / 2 + j
    }

    /// Inverse of [`SymMat::packed_index`].
    pub fn unpack_index(n: usize, k: usize) -> (usize, usize) {
        let mut k = k;
        for i in 0..n {
            let row_len = n - i;
            if k < row_len {
                return (i, i + k);
            }
            k -= row_len;
        }
        panic!("packed index out of range");
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[Self::packed_index(self.n, i, j)]
    }

    /// Sets both (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = Self::packed_index(self.n, i, j);
        self.upper[k] = v;
    }

    pub fn to_mat(&self) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }
}

impl fmt::Debug for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMat(n={}, upper={:?})", self.n, self.upper)
    }
}

/// Pivoted LU factors with `P·A = L·U`, L unit lower triangular.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Mat,
    perm: Vec<usize>,
    sign: f64,
    scale: f64,
}

impl LuFactors {
    /// Partial-pivoting factorization. Never fails: a zero column simply
    /// leaves a zero pivot behind.
    pub fn new(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (piv_row, piv_abs) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if piv_row != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, piv_row * n + j);
                }
                perm.swap(k, piv_row);
                sign = -sign;
            }
            if piv_abs == 0.0 {
                continue;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu.data[i * n + j] -= factor * lu.data[k * n + j];
                    }
                }
            }
        }
        Ok(LuFactors {
            lu,
            perm,
            sign,
            scale: a.max_abs(),
        })
    }

    pub fn n(&self) -> usize {
        self.lu.rows()
    }

    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.lu[(i, i)]).collect()
    }

    /// Row permutation: row `i` of `P·A` is row `perm()[i]` of `A`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn permutation_sign(&self) -> f64 {
        self.sign
    }

    pub fn lower(&self) -> Mat {
        let n = self.n();
        let mut l = Mat::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    pub fn upper(&self) -> Mat {
        let n = self.n();
        let mut u = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    pub fn det(&self) -> f64 {
        self.sign * self.pivots().iter().product::<f64>()
    }

    fn check_pivots(&self) -> Result<()> {
        let threshold = PIVOT_THRESHOLD * self.scale;
        for p in self.pivots() {
            if !(p.abs() >= threshold) || p == 0.0 {
                return Err(Error::SingularMatrix {
                    pivot: p.abs(),
                    threshold,
                });
            }
        }
        Ok(())
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs of length {} for {n}x{n} system",
                b.len()
            )));
        }
        self.check_pivots()?;
        Ok(self.solve_unchecked(b))
    }

    fn solve_unchecked(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Result<Mat> {
        self.check_pivots()?;
        let n = self.n();
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve_unchecked(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

/// Inverse via pivoted LU.
pub fn lu_inverse(a: &Mat) -> Result<Mat> {
    LuFactors::new(a)?.inverse()
}

/// Determinant via pivoted LU. Singular input gives (near) zero, not an error.
pub fn lu_det(a: &Mat) -> Result<f64> {
    Ok(LuFactors::new(a)?.det())
}

/// Kronecker product: `(a⊗b)[i·p + k, j·q + l] = a[i,j]·b[k,l]` for `b` of shape p×q.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (p, q) = b.shape();
    let mut out = Mat::zeros(a.rows() * p, a.cols() * q);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

const EXP_TAYLOR_ORDER: usize = 18;

/// Matrix exponential by scaling and squaring around a fixed-order Taylor series.
///
/// The argument is halved until its ∞-norm is at most 1/2, where the
/// truncation error of the order-18 series is below 1e-22.
pub fn mat_exp(a: &Mat) -> Result<Mat> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.norm_inf();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale(1.0 / 2f64.powi(squarings as i32));
    let n = a.rows();
    // Horner: I + A(I + A/2(I + A/3(...)))
    let mut acc = Mat::identity(n);
    for k in (1..=EXP_TAYLOR_ORDER).rev() {
        acc = &Mat::identity(n) + &scaled.matmul(&acc).scale(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    Ok(acc)
}

/// Positive definiteness of a symmetric matrix: every pivot of unpivoted
/// Gaussian elimination is strictly positive.
pub fn is_positive_definite(a: &Mat) -> bool {
    if !a.is_square() {
        return false;
    }
    let n = a.rows();
    let mut m = a.clone();
    for k in 0..n {
        let pivot = m[(k, k)];
        if !(pivot > 0.0) {
            return false;
        }
        for i in k + 1..n {
            let factor = m[(i, k)] / pivot;
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= factor * v;
            }
        }
    }
    true
}

/// Ratio of largest to smallest LU pivot magnitude; a cheap condition proxy.
pub fn pivot_ratio(a: &Mat) -> Result<f64> {
    let piv = LuFactors::new(a)?.pivots();
    let max = piv.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let min = piv.iter().fold(f64::INFINITY, |m, p| m.min(p.abs()));
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_index_roundtrip() {
        for n in 1..6 {
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    assert_eq!(SymMat::packed_index(n, i, j), k);
                    assert_eq!(SymMat::packed_index(n, j, i), k);
                    assert_eq!(SymMat::unpack_index(n, k), (i, j));
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn lu_inverse_identity() {
        let inv = lu_inverse(&Mat::identity(3)).unwrap();
        assert_eq!(inv, Mat::identity(3));
    }

    #[test]
    fn lu_inverse_2x2() {
        let a = Mat::from_rows(&[[2.0, 1.0], [1.0, 1.0]]);
        let inv = lu_inverse(&a).unwrap();
        let expected = Mat::from_rows(&[[1.0, -1.0], [-1.0, 2.0]]);
        assert!(inv.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn lu_inverse_rank_deficient() {
        let a = Mat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        assert!(matches!(lu_inverse(&a), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn lu_inverse_rejects_rectangular() {
        assert!(matches!(
            lu_inverse(&Mat::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn lu_det_examples() {
        assert_eq!(lu_det(&Mat::identity(4)).unwrap(), 1.0);
        assert_eq!(lu_det(&Mat::diag(&[2.0, 3.0])).unwrap(), 6.0);
        let swap = Mat::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(lu_det(&swap).unwrap(), -1.0);
        assert_eq!(lu_det(&Mat::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn lu_reconstructs_pa() {
        let a = Mat::from_rows(&[[0.0, 2.0, 1.0], [3.0, -1.0, 4.0], [1.0, 1.0, -2.0]]);
        let f = LuFactors::new(&a).unwrap();
        let lu = f.lower().matmul(&f.upper());
        let mut pa = Mat::zeros(3, 3);
        for (i, &src) in f.perm().iter().enumerate() {
            for j in 0..3 {
                pa[(i, j)] = a[(src, j)];
            }
        }
        assert!(lu.max_abs_diff(&pa) <= 1e-12 * a.max_abs());
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&Mat::identity(2), &Mat::identity(2)), Mat::identity(4));
        let b = Mat::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        assert_eq!(kron(&Mat::from_rows(&[[1.0]]), &b), b);
        let a = Mat::from_rows(&[[1.0, 2.0]]);
        let k = kron(&a, &Mat::from_rows(&[[3.0], [4.0]]));
        assert_eq!(k, Mat::from_rows(&[[3.0, 6.0], [4.0, 8.0]]));
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(mat_exp(&Mat::zeros(3, 3)).unwrap(), Mat::identity(3));
    }

    #[test]
    fn exp_of_diagonal() {
        let e = mat_exp(&Mat::diag(&[1.0, -1.0])).unwrap();
        let expected = Mat::diag(&[std::f64::consts::E, (-1.0f64).exp()]);
        assert!(e.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn exp_of_generator_is_rotation() {
        let t = std::f64::consts::FRAC_PI_2;
        let e = mat_exp(&Mat::from_rows(&[[0.0, t], [-t, 0.0]])).unwrap();
        let expected = Mat::from_rows(&[[t.cos(), t.sin()], [-t.sin(), t.cos()]]);
        assert!(e.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn positive_definite_probe() {
        assert!(is_positive_definite(&Mat::from_rows(&[
            [2.0, 1.0],
            [1.0, 1.0]
        ])));
        assert!(!is_positive_definite(&Mat::from_rows(&[
            [1.0, 2.0],
            [2.0, 1.0]
        ])));
        assert!(!is_positive_definite(&Mat::diag(&[1.0, 0.0])));
    }

    #[test]
    fn symmat_roundtrip() {
        let s = SymMat::from_upper(3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let m = s.to_mat();
        assert_eq!(m, m.transpose());
        assert_eq!(SymMat::from_mat(&m).unwrap(), s);
        assert!(SymMat::from_upper(3, vec![1.0; 5]).is_err());
    }
}
