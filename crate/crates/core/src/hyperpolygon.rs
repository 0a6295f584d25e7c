//! Points of the complex moment-map level set
//! `𝒵 = { (y, z) : Σ zᵢ⊗yᵢ = 0, yᵢ(zᵢ) = 0 }`, the action of
//! `G = (SL(2,C) × (C*)ⁿ)/±1` on it, and the tangent and orbit spaces.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{nullspace, outer, pair, rank, Covector2, DenseMatrix, Matrix2, Vector2};
use crate::scalar::{RandomScalar, Scalar};

/// Parabolic weights `α₁..αₙ`, each strictly between 0 and 1, with `n ≥ 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector(Vec<BigRational>);

impl WeightVector {
    pub fn new(alpha: Vec<BigRational>) -> Result<Self> {
        if alpha.len() < 3 {
            return Err(Error::Invalid(format!(
                "need at least 3 weights, got {}",
                alpha.len()
            )));
        }
        if let Some(a) = alpha
            .iter()
            .find(|a| !(a.is_positive() && **a < BigRational::one()))
        {
            return Err(Error::Invalid(format!("weight {a} outside (0, 1)")));
        }
        Ok(WeightVector(alpha))
    }

    /// `n` copies of `num/den`.
    pub fn uniform(n: usize, num: i64, den: i64) -> Result<Self> {
        Self::new(vec![BigRational::new(num.into(), den.into()); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.0
    }

    pub fn total(&self) -> BigRational {
        self.0.iter().fold(BigRational::zero(), |acc, a| acc + a)
    }
}

/// `((y₁..yₙ), (z₁..zₙ))` with every `zᵢ ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperpolygonPoint<F> {
    y: Vec<Covector2<F>>,
    z: Vec<Vector2<F>>,
}

impl<F: Scalar> HyperpolygonPoint<F> {
    pub fn new(y: Vec<Covector2<F>>, z: Vec<Vector2<F>>) -> Result<Self> {
        if y.len() != z.len() {
            return Err(Error::Invalid(format!(
                "{} covectors but {} vectors",
                y.len(),
                z.len()
            )));
        }
        if z.is_empty() {
            return Err(Error::Invalid("empty hyperpolygon".into()));
        }
        if let Some(i) = z.iter().position(Vector2::is_zero) {
            return Err(Error::Invalid(format!("z[{i}] is zero")));
        }
        Ok(HyperpolygonPoint { y, z })
    }

    pub fn from_ints(y: &[[i64; 2]], z: &[[i64; 2]]) -> Result<Self> {
        Self::new(
            y.iter().map(|w| Covector2::from_ints(w[0], w[1])).collect(),
            z.iter().map(|v| Vector2::from_ints(v[0], v[1])).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// `ḡᵢ(y)`.
    pub fn y(&self, i: usize) -> &Covector2<F> {
        &self.y[i]
    }

    /// `f̄ᵢ(z)`.
    pub fn z(&self, i: usize) -> &Vector2<F> {
        &self.z[i]
    }

    pub fn ys(&self) -> &[Covector2<F>] {
        &self.y
    }

    pub fn zs(&self) -> &[Vector2<F>] {
        &self.z
    }

    /// Typical magnitude `Σ ‖zᵢ‖‖yᵢ‖`, used to scale approximate zero tests.
    pub fn scale(&self) -> f64 {
        self.z
            .iter()
            .zip(&self.y)
            .map(|(z, y)| z.norm() * y.norm())
            .sum::<f64>()
            .max(f64::MIN_POSITIVE)
    }

    /// Copy with `yᵢ` replaced.
    pub fn with_y(&self, i: usize, y: Covector2<F>) -> Self {
        let mut p = self.clone();
        p.y[i] = y;
        p
    }

    /// The point `p + t` of the ambient linear space.
    pub fn shifted(&self, t: &TangentVector<F>) -> Result<Self> {
        Self::new(
            self.y
                .iter()
                .zip(&t.u)
                .map(|(y, u)| y.clone() + u.clone())
                .collect(),
            self.z
                .iter()
                .zip(&t.v)
                .map(|(z, v)| z.clone() + v.clone())
                .collect(),
        )
    }
}

/// `((u₁..uₙ), (v₁..vₙ))`, a direction at a point of the ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<F> {
    pub u: Vec<Covector2<F>>,
    pub v: Vec<Vector2<F>>,
}

impl<F: Scalar> TangentVector<F> {
    pub fn zero(n: usize) -> Self {
        TangentVector {
            u: vec![Covector2::zero(); n],
            v: vec![Vector2::zero(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// Coordinates ordered `u₁, …, uₙ, v₁, …, vₙ`, two entries each.
    pub fn to_flat(&self) -> Vec<F> {
        self.u
            .iter()
            .flat_map(|c| c.0.iter().cloned())
            .chain(self.v.iter().flat_map(|c| c.0.iter().cloned()))
            .collect()
    }

    pub fn from_flat(x: &[F]) -> Self {
        assert_eq!(x.len() % 4, 0, "flat tangent vector length must be 4n");
        let n = x.len() / 4;
        let u = (0..n)
            .map(|i| Covector2::new(x[2 * i].clone(), x[2 * i + 1].clone()))
            .collect();
        let v = (0..n)
            .map(|i| Vector2::new(x[2 * n + 2 * i].clone(), x[2 * n + 2 * i + 1].clone()))
            .collect();
        TangentVector { u, v }
    }

    pub fn add(&self, other: &Self) -> Self {
        TangentVector {
            u: self
                .u
                .iter()
                .zip(&other.u)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
            v: self
                .v
                .iter()
                .zip(&other.v)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        TangentVector {
            u: self.u.iter().map(|a| a.scale(c)).collect(),
            v: self.v.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.u
            .iter()
            .map(|a| a.norm().powi(2))
            .chain(self.v.iter().map(|a| a.norm().powi(2)))
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ cₖ·basisₖ`.
    pub fn combination(basis: &[Self], coeffs: &[F], n: usize) -> Self {
        basis
            .iter()
            .zip(coeffs)
            .fold(Self::zero(n), |acc, (b, c)| acc.add(&b.scale(c)))
    }
}

/// A representative `(A, λ)` of an element of `G`; `(A, λ)` and `(−A, −λ)`
/// act identically.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<F> {
    a: Matrix2<F>,
    a_inv: Matrix2<F>,
    lambda: Vec<F>,
}

impl<F: Scalar> GroupElement<F> {
    pub fn new(a: Matrix2<F>, lambda: Vec<F>) -> Result<Self> {
        let det = a.det();
        if !(det.clone() - F::one()).is_negligible(1.0) {
            return Err(Error::Invalid(format!("det A = {det}, expected 1")));
        }
        if lambda.iter().any(|l| l.is_negligible(1.0)) {
            return Err(Error::Invalid("scaling factors must be nonzero".into()));
        }
        let a_inv = a.adjugate();
        Ok(GroupElement { a, a_inv, lambda })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement {
            a: Matrix2::identity(),
            a_inv: Matrix2::identity(),
            lambda: vec![F::one(); n],
        }
    }

    pub fn matrix(&self) -> &Matrix2<F> {
        &self.a
    }

    pub fn matrix_inverse(&self) -> &Matrix2<F> {
        &self.a_inv
    }

    pub fn lambda(&self) -> &[F] {
        &self.lambda
    }

    /// The other representative `(−A, −λ)` of the same group element.
    pub fn negated(&self) -> Self {
        GroupElement {
            a: -self.a.clone(),
            a_inv: -self.a_inv.clone(),
            lambda: self.lambda.iter().map(|l| -l.clone()).collect(),
        }
    }

    /// Whether two representatives act identically on a probe point.
    pub fn same_action(&self, other: &Self, probe: &HyperpolygonPoint<F>) -> bool {
        act(self, probe) == act(other, probe)
    }
}

/// Random element of `G`: `A` a product of integer shears (possibly with a
/// Gaussian entry) and `λ` small nonzero integers.
pub fn random_group_element<F: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupElement<F> {
    let mut a = Matrix2::identity();
    for _ in 0..3 {
        let s = F::from_i64(rng.gen_range(-3..=3));
        let t = F::from_i64(rng.gen_range(-3..=3));
        let upper = Matrix2::new(F::one(), s, F::zero(), F::one());
        let lower = Matrix2::new(F::one(), F::zero(), t, F::one());
        a = a * upper * lower;
    }
    if rng.gen_bool(0.3) {
        a = a * Matrix2::new(F::one(), F::imag_unit(), F::zero(), F::one());
    }
    let lambda = (0..n)
        .map(|_| {
            let mut v = 0;
            while v == 0 {
                v = rng.gen_range(-4..=4);
            }
            if rng.gen_bool(0.5) {
                F::from_i64(v)
            } else {
                F::one() / F::from_i64(v)
            }
        })
        .collect();
    GroupElement::new(a, lambda).expect("shears have determinant one")
}

/// `(a, s)` with `trace a = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraElement<F> {
    a: Matrix2<F>,
    s: Vec<F>,
}

impl<F: Scalar> LieAlgebraElement<F> {
    pub fn new(a: Matrix2<F>, s: Vec<F>) -> Result<Self> {
        if !a.trace().is_negligible(a.norm()) {
            return Err(Error::Invalid(
                "Lie algebra matrix must be traceless".into(),
            ));
        }
        Ok(LieAlgebraElement { a, s })
    }

    pub fn zero(n: usize) -> Self {
        LieAlgebraElement {
            a: Matrix2::zero(),
            s: vec![F::zero(); n],
        }
    }

    pub fn matrix(&self) -> &Matrix2<F> {
        &self.a
    }

    pub fn scalings(&self) -> &[F] {
        &self.s
    }

    /// `sl₂` basis `h, e, f` followed by the `n` scaling directions.
    pub fn basis(n: usize) -> Vec<Self> {
        let h = Matrix2::from_ints(1, 0, 0, -1);
        let e = Matrix2::from_ints(0, 1, 0, 0);
        let f = Matrix2::from_ints(0, 0, 1, 0);
        let mut out: Vec<Self> = [h, e, f]
            .into_iter()
            .map(|a| LieAlgebraElement {
                a,
                s: vec![F::zero(); n],
            })
            .collect();
        for k in 0..n {
            let mut s = vec![F::zero(); n];
            s[k] = F::one();
            out.push(LieAlgebraElement {
                a: Matrix2::zero(),
                s,
            });
        }
        out
    }
}

/// `Σᵢ zᵢ ⊗ yᵢ`.
pub fn moment_matrix<F: Scalar>(p: &HyperpolygonPoint<F>) -> Matrix2<F> {
    p.z.iter()
        .zip(&p.y)
        .fold(Matrix2::zero(), |acc, (z, y)| acc + outer(z, y))
}

/// `(yᵢ(zᵢ))ᵢ`.
pub fn pairings<F: Scalar>(p: &HyperpolygonPoint<F>) -> Vec<F> {
    p.z.iter().zip(&p.y).map(|(z, y)| pair(y, z)).collect()
}

pub fn is_in_level_set<F: Scalar>(p: &HyperpolygonPoint<F>) -> bool {
    let scale = p.scale();
    moment_matrix(p).is_negligible(scale) && pairings(p).iter().all(|c| c.is_negligible(scale))
}

/// `yᵢ ↦ λᵢ⁻¹ yᵢ A`, `zᵢ ↦ λᵢ A⁻¹ zᵢ`.
pub fn act<F: Scalar>(g: &GroupElement<F>, p: &HyperpolygonPoint<F>) -> HyperpolygonPoint<F> {
    assert_eq!(
        g.lambda.len(),
        p.n(),
        "group element and point disagree on n"
    );
    let y =
        p.y.iter()
            .zip(&g.lambda)
            .map(|(y, l)| y.mul_mat(&g.a).scale(&l.recip()))
            .collect();
    let z =
        p.z.iter()
            .zip(&g.lambda)
            .map(|(z, l)| g.a_inv.apply(z).scale(l))
            .collect();
    HyperpolygonPoint { y, z }
}

/// Derivative of the action at `g`, carrying tangent vectors at `p` to
/// tangent vectors at `act(g, p)`: `(uᵢ, vᵢ) ↦ (λᵢ⁻¹uᵢA, λᵢA⁻¹vᵢ)`.
pub fn act_tangent<F: Scalar>(g: &GroupElement<F>, t: &TangentVector<F>) -> TangentVector<F> {
    TangentVector {
        u: t.u
            .iter()
            .zip(&g.lambda)
            .map(|(u, l)| u.mul_mat(&g.a).scale(&l.recip()))
            .collect(),
        v: t.v
            .iter()
            .zip(&g.lambda)
            .map(|(v, l)| g.a_inv.apply(v).scale(l))
            .collect(),
    }
}

/// `uᵢ = yᵢ a − sᵢ yᵢ`, `vᵢ = sᵢ zᵢ − a zᵢ`.
pub fn infinitesimal_action<F: Scalar>(
    xi: &LieAlgebraElement<F>,
    p: &HyperpolygonPoint<F>,
) -> TangentVector<F> {
    let u =
        p.y.iter()
            .zip(&xi.s)
            .map(|(y, s)| y.mul_mat(&xi.a) - y.scale(s))
            .collect();
    let v =
        p.z.iter()
            .zip(&xi.s)
            .map(|(z, s)| z.scale(s) - xi.a.apply(z))
            .collect();
    TangentVector { u, v }
}

/// Linearized moment map: `(Σ vᵢ⊗yᵢ + zᵢ⊗uᵢ, (uᵢ(zᵢ) + yᵢ(vᵢ))ᵢ)`.
pub fn d_moment<F: Scalar>(p: &HyperpolygonPoint<F>, t: &TangentVector<F>) -> (Matrix2<F>, Vec<F>) {
    let mut m = Matrix2::zero();
    let mut pairs = Vec::with_capacity(p.n());
    for i in 0..p.n() {
        m = m + outer(&t.v[i], &p.y[i]) + outer(&p.z[i], &t.u[i]);
        pairs.push(pair(&t.u[i], &p.z[i]) + pair(&p.y[i], &t.v[i]));
    }
    (m, pairs)
}

/// Whether `t ∈ ker dμ` at `p`.
pub fn is_tangent<F: Scalar>(p: &HyperpolygonPoint<F>, t: &TangentVector<F>) -> bool {
    let scale = p.scale().max(1.0) * t.norm().max(1.0);
    let (m, pairs) = d_moment(p, t);
    m.is_negligible(scale) && pairs.iter().all(|c| c.is_negligible(scale))
}

/// The `(n+4) × 4n` matrix of `dμ` in the flat coordinates of
/// [`TangentVector::to_flat`]: four rows for the matrix entries `(a,b)`, then
/// one row per pairing.
pub fn linearization_matrix<F: Scalar>(p: &HyperpolygonPoint<F>) -> DenseMatrix<F> {
    let n = p.n();
    let mut m = DenseMatrix::zeros(n + 4, 4 * n);
    for i in 0..n {
        let (u0, v0) = (2 * i, 2 * n + 2 * i);
        for a in 0..2 {
            for b in 0..2 {
                let row = 2 * a + b;
                m[(row, u0 + b)] = p.z[i].0[a].clone();
                m[(row, v0 + a)] = p.y[i].0[b].clone();
            }
        }
        for c in 0..2 {
            m[(4 + i, u0 + c)] = p.z[i].0[c].clone();
            m[(4 + i, v0 + c)] = p.y[i].0[c].clone();
        }
    }
    m
}

/// The linear system in `y` cut out by the level-set equations at fixed `z`:
/// `4 + n` rows, `2n` columns.
pub fn covector_constraints<F: Scalar>(z: &[Vector2<F>]) -> DenseMatrix<F> {
    let n = z.len();
    let mut m = DenseMatrix::zeros(n + 4, 2 * n);
    for (i, zi) in z.iter().enumerate() {
        for a in 0..2 {
            for b in 0..2 {
                m[(2 * a + b, 2 * i + b)] = zi.0[a].clone();
            }
        }
        for c in 0..2 {
            m[(4 + i, 2 * i + c)] = zi.0[c].clone();
        }
    }
    m
}

const SAMPLE_ATTEMPTS: usize = 100;

/// Sample a point of `𝒵` with pairwise non-proportional `zᵢ` and `y ≠ 0`.
pub fn sample_level_set<F: RandomScalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<HyperpolygonPoint<F>> {
    if n < 4 {
        return Err(Error::Invalid(format!("sampling needs n >= 4, got {n}")));
    }
    for _ in 0..SAMPLE_ATTEMPTS {
        let z = loop {
            let z: Vec<Vector2<F>> = (0..n)
                .map(|_| Vector2::new(F::sample(rng), F::sample(rng)))
                .collect();
            if pairwise_independent(&z) {
                break z;
            }
        };
        if let Some(p) = random_covectors(z, rng) {
            return Ok(p);
        }
    }
    Err(Error::SamplingFailed(SAMPLE_ATTEMPTS))
}

/// Sample a point of `𝒵` whose `zᵢ` are all proportional to one vector.
/// Such points are never stable.
pub fn sample_collinear_level_set<F: RandomScalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<HyperpolygonPoint<F>> {
    if n < 3 {
        return Err(Error::Invalid(format!("sampling needs n >= 3, got {n}")));
    }
    for _ in 0..SAMPLE_ATTEMPTS {
        let d = Vector2::new(F::sample(rng), F::sample(rng));
        if d.is_zero() {
            continue;
        }
        let z: Vec<Vector2<F>> = (0..n)
            .map(|_| loop {
                let c = F::sample(rng);
                if !c.is_zero() {
                    break d.scale(&c);
                }
            })
            .collect();
        if let Some(p) = random_covectors(z, rng) {
            return Ok(p);
        }
    }
    Err(Error::SamplingFailed(SAMPLE_ATTEMPTS))
}

fn pairwise_independent<F: Scalar>(z: &[Vector2<F>]) -> bool {
    z.iter().all(|v| !v.is_zero())
        && (0..z.len()).all(|i| (i + 1..z.len()).all(|j| !z[i].is_parallel(&z[j])))
}

fn random_covectors<F: RandomScalar, R: Rng + ?Sized>(
    z: Vec<Vector2<F>>,
    rng: &mut R,
) -> Option<HyperpolygonPoint<F>> {
    let basis = nullspace(&covector_constraints(&z));
    if basis.is_empty() {
        return None;
    }
    let n = z.len();
    for _ in 0..16 {
        let coeffs: Vec<F> = basis.iter().map(|_| F::sample(rng)).collect();
        let y_flat = basis
            .iter()
            .zip(&coeffs)
            .fold(vec![F::zero(); 2 * n], |mut acc, (b, c)| {
                for (a, x) in acc.iter_mut().zip(b) {
                    *a = a.clone() + c.clone() * x.clone();
                }
                acc
            });
        if y_flat.iter().all(Scalar::is_zero) {
            continue;
        }
        let y = (0..n)
            .map(|i| Covector2::new(y_flat[2 * i].clone(), y_flat[2 * i + 1].clone()))
            .collect();
        let p = HyperpolygonPoint::new(y, z.clone()).ok()?;
        if is_in_level_set(&p) {
            return Some(p);
        }
    }
    None
}

/// Basis of `ker dμ` at `p`.
pub fn tangent_basis<F: Scalar>(p: &HyperpolygonPoint<F>) -> Vec<TangentVector<F>> {
    nullspace(&linearization_matrix(p))
        .iter()
        .map(|x| TangentVector::from_flat(x))
        .collect()
}

/// Images of the Lie algebra basis under the infinitesimal action.
pub fn orbit_basis<F: Scalar>(p: &HyperpolygonPoint<F>) -> Vec<TangentVector<F>> {
    LieAlgebraElement::basis(p.n())
        .iter()
        .map(|xi| infinitesimal_action(xi, p))
        .collect()
}

/// Rank of a family of tangent vectors.
pub fn span_rank<F: Scalar>(vectors: &[TangentVector<F>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank(&DenseMatrix::from_rows(
        vectors.iter().map(TangentVector::to_flat).collect(),
    ))
}
