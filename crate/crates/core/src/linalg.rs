//! Two-dimensional vectors, covectors and endomorphisms, plus small dense
//! matrices with rank, kernel and solve.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Column vector in `C²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector2<F>(pub [F; 2]);

/// Row vector in `(C²)*`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector2<F>(pub [F; 2]);

/// 2×2 matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix2<F>(pub [[F; 2]; 2]);

impl<F: Scalar> Vector2<F> {
    pub fn new(a: F, b: F) -> Self {
        Vector2([a, b])
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Vector2([F::from_i64(a), F::from_i64(b)])
    }

    pub fn zero() -> Self {
        Vector2([F::zero(), F::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, c: &F) -> Self {
        Vector2([c.clone() * self.0[0].clone(), c.clone() * self.0[1].clone()])
    }

    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .map(|x| x.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `a₀b₁ − a₁b₀`; zero iff the two vectors are proportional.
    pub fn wedge(&self, other: &Vector2<F>) -> F {
        self.0[0].clone() * other.0[1].clone() - self.0[1].clone() * other.0[0].clone()
    }

    /// Proportionality test, scale-relative in approximate mode.
    pub fn is_parallel(&self, other: &Vector2<F>) -> bool {
        self.wedge(other).is_negligible(self.norm() * other.norm())
    }

    /// A covector that annihilates `self`.
    pub fn annihilator(&self) -> Covector2<F> {
        Covector2([-self.0[1].clone(), self.0[0].clone()])
    }
}

impl<F: Scalar> Covector2<F> {
    pub fn new(a: F, b: F) -> Self {
        Covector2([a, b])
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Covector2([F::from_i64(a), F::from_i64(b)])
    }

    pub fn zero() -> Self {
        Covector2([F::zero(), F::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, c: &F) -> Self {
        Covector2([c.clone() * self.0[0].clone(), c.clone() * self.0[1].clone()])
    }

    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .map(|x| x.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Row vector times matrix.
    pub fn mul_mat(&self, m: &Matrix2<F>) -> Covector2<F> {
        let [a, b] = &self.0;
        Covector2([
            a.clone() * m.0[0][0].clone() + b.clone() * m.0[1][0].clone(),
            a.clone() * m.0[0][1].clone() + b.clone() * m.0[1][1].clone(),
        ])
    }
}

/// `w(v) = w₁v₁ + w₂v₂`.
pub fn pair<F: Scalar>(w: &Covector2<F>, v: &Vector2<F>) -> F {
    w.0[0].clone() * v.0[0].clone() + w.0[1].clone() * v.0[1].clone()
}

/// `v ⊗ w`, the rank-one endomorphism `x ↦ w(x) v`.
pub fn outer<F: Scalar>(v: &Vector2<F>, w: &Covector2<F>) -> Matrix2<F> {
    let e = |a: usize, b: usize| v.0[a].clone() * w.0[b].clone();
    Matrix2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
}

impl<F: Scalar> Matrix2<F> {
    pub fn new(a: F, b: F, c: F, d: F) -> Self {
        Matrix2([[a, b], [c, d]])
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Matrix2::new(
            F::from_i64(a),
            F::from_i64(b),
            F::from_i64(c),
            F::from_i64(d),
        )
    }

    pub fn zero() -> Self {
        Matrix2::from_ints(0, 0, 0, 0)
    }

    pub fn identity() -> Self {
        Matrix2::from_ints(1, 0, 0, 1)
    }

    pub fn entries(&self) -> [F; 4] {
        [
            self.0[0][0].clone(),
            self.0[0][1].clone(),
            self.0[1][0].clone(),
            self.0[1][1].clone(),
        ]
    }

    pub fn trace(&self) -> F {
        self.0[0][0].clone() + self.0[1][1].clone()
    }

    pub fn det(&self) -> F {
        self.0[0][0].clone() * self.0[1][1].clone() - self.0[0][1].clone() * self.0[1][0].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Scalar::is_zero)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|x| x.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Zero up to tolerance relative to `scale`.
    pub fn is_negligible(&self, scale: f64) -> bool {
        self.0.iter().flatten().all(|x| x.is_negligible(scale))
    }

    pub fn scale(&self, c: &F) -> Self {
        let [a, b, d, e] = self.entries();
        Matrix2::new(c.clone() * a, c.clone() * b, c.clone() * d, c.clone() * e)
    }

    pub fn adjugate(&self) -> Self {
        let [a, b, c, d] = self.entries();
        Matrix2::new(d, -b, -c, a)
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.is_negligible(self.norm().powi(2)) {
            return None;
        }
        Some(self.adjugate().scale(&det.recip()))
    }

    pub fn apply(&self, v: &Vector2<F>) -> Vector2<F> {
        let m = &self.0;
        Vector2([
            m[0][0].clone() * v.0[0].clone() + m[0][1].clone() * v.0[1].clone(),
            m[1][0].clone() * v.0[0].clone() + m[1][1].clone() * v.0[1].clone(),
        ])
    }

    pub fn column(&self, j: usize) -> Vector2<F> {
        Vector2([self.0[0][j].clone(), self.0[1][j].clone()])
    }
}

impl<F: Scalar> Add for Matrix2<F> {
    type Output = Matrix2<F>;
    fn add(self, rhs: Self) -> Self {
        let [a, b, c, d] = self.entries();
        let [e, f, g, h] = rhs.entries();
        Matrix2::new(a + e, b + f, c + g, d + h)
    }
}

impl<F: Scalar> Sub for Matrix2<F> {
    type Output = Matrix2<F>;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Scalar> Neg for Matrix2<F> {
    type Output = Matrix2<F>;
    fn neg(self) -> Self {
        let [a, b, c, d] = self.entries();
        Matrix2::new(-a, -b, -c, -d)
    }
}

impl<F: Scalar> Mul for Matrix2<F> {
    type Output = Matrix2<F>;
    fn mul(self, rhs: Self) -> Self {
        let e = |i: usize, j: usize| {
            self.0[i][0].clone() * rhs.0[0][j].clone() + self.0[i][1].clone() * rhs.0[1][j].clone()
        };
        Matrix2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

impl<F: Scalar> Add for Vector2<F> {
    type Output = Vector2<F>;
    fn add(self, rhs: Self) -> Self {
        let [a, b] = self.0;
        let [c, d] = rhs.0;
        Vector2([a + c, b + d])
    }
}

impl<F: Scalar> Sub for Vector2<F> {
    type Output = Vector2<F>;
    fn sub(self, rhs: Self) -> Self {
        let [a, b] = self.0;
        let [c, d] = rhs.0;
        Vector2([a - c, b - d])
    }
}

impl<F: Scalar> Add for Covector2<F> {
    type Output = Covector2<F>;
    fn add(self, rhs: Self) -> Self {
        let [a, b] = self.0;
        let [c, d] = rhs.0;
        Covector2([a + c, b + d])
    }
}

impl<F: Scalar> Sub for Covector2<F> {
    type Output = Covector2<F>;
    fn sub(self, rhs: Self) -> Self {
        let [a, b] = self.0;
        let [c, d] = rhs.0;
        Covector2([a - c, b - d])
    }
}

/// Rectangular matrix stored row major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> DenseMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        DenseMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| F::from_i64(x)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors (all of equal length).
    pub fn from_columns(cols: &[Vec<F>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::modulus).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// In-place Gauss–Jordan elimination to reduced row echelon form.
    /// Returns the pivot columns in order. Approximate mode uses partial
    /// pivoting and treats candidates below `τ·max|entry|` as zero.
    pub fn rref(&mut self) -> Vec<usize> {
        let scale = self.max_abs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let candidate = match F::MODE {
                crate::scalar::Mode::Exact => (r..self.rows).find(|&i| !self[(i, c)].is_zero()),
                crate::scalar::Mode::Approx => (r..self.rows)
                    .max_by(|&a, &b| self[(a, c)].modulus().total_cmp(&self[(b, c)].modulus()))
                    .filter(|&i| !self[(i, c)].is_negligible(scale)),
            };
            let Some(p) = candidate else {
                for i in r..self.rows {
                    self[(i, c)] = F::zero();
                }
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = self[(r, j)].clone() * inv.clone();
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let factor = self[(i, c)].clone();
                for j in c..self.cols {
                    let v = self[(i, j)].clone() - factor.clone() * self[(r, j)].clone();
                    self[(i, j)] = v;
                }
                self[(i, c)] = F::zero();
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

impl<F> std::ops::Index<(usize, usize)> for DenseMatrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for DenseMatrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Scalar> fmt::Debug for DenseMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn rank<F: Scalar>(m: &DenseMatrix<F>) -> usize {
    m.clone().rref().len()
}

/// Basis of the right kernel in reduced column echelon form: one vector per
/// free column, carrying a 1 there and zeros on the other free columns.
pub fn nullspace<F: Scalar>(m: &DenseMatrix<F>) -> Vec<Vec<F>> {
    let mut r = m.clone();
    let pivots = r.rref();
    let mut is_pivot = vec![None; m.cols()];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    (0..m.cols())
        .filter(|&c| is_pivot[c].is_none())
        .map(|free| {
            let mut v = vec![F::zero(); m.cols()];
            v[free] = F::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            v
        })
        .collect()
}

/// A particular solution of `M x = b`, or `None` when inconsistent.
pub fn solve_linear<F: Scalar>(m: &DenseMatrix<F>, b: &[F]) -> Option<Vec<F>> {
    assert_eq!(b.len(), m.rows(), "right-hand side length mismatch");
    let mut aug = DenseMatrix::zeros(m.rows(), m.cols() + 1);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols())] = b[i].clone();
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&m.cols()) {
        return None;
    }
    let mut x = vec![F::zero(); m.cols()];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug[(row, m.cols())].clone();
    }
    if F::MODE == crate::scalar::Mode::Exact {
        return Some(x);
    }
    // the rref pivot test is relative to the augmented scale; re-check the residual
    let residual: f64 = m
        .mul_vec(&x)
        .into_iter()
        .zip(b)
        .map(|(a, bi)| (a - bi.clone()).modulus().powi(2))
        .sum::<f64>()
        .sqrt();
    let bound = m.frobenius() * vec_norm(&x) + vec_norm(b);
    (residual <= crate::scalar::tolerance() * bound.max(f64::MIN_POSITIVE)).then_some(x)
}

/// Euclidean norm of a scalar slice.
pub fn vec_norm<F: Scalar>(x: &[F]) -> f64 {
    x.iter().map(|v| v.modulus().powi(2)).sum::<f64>().sqrt()
}

/// `‖M·x‖` as `f64`.
pub fn residual_norm<F: Scalar>(m: &DenseMatrix<F>, x: &[F]) -> f64 {
    vec_norm(&m.mul_vec(x))
}
