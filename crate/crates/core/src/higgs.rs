//! The parabolic Higgs bundle attached to a point of the level set.
//!
//! The underlying bundle is trivial of rank two on `P¹`, the marked points
//! sit in the affine chart, the quasiparabolic line at `xᵢ` is `span(zᵢ)`,
//! and the Higgs field is `θ = M(x) dx` with
//! `M(x) = Σᵢ Rᵢ / (x − xᵢ)`, `Rᵢ = zᵢ ⊗ yᵢ`. The moment condition
//! `Σ Rᵢ = 0` is what makes `θ` regular at `∞`.
//!
//! Stability is the strict slope inequality over `θ`-invariant line
//! subbundles with weights `{αᵢ, 0}` at each `xᵢ`.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::hyperpolygon::{is_in_level_set, HyperpolygonPoint, WeightVector};
use crate::linalg::{outer, rank, DenseMatrix, Matrix2, Vector2};
use crate::poly::{pole_order, poly_gcd, rf_is_square, square_class, Polynomial, RationalFunction};
use crate::scalar::{Mode, Scalar};

/// Marked points `x₁..xₙ` in the affine chart, pairwise distinct, `n ≥ 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedPoints<F>(Vec<F>);

impl<F: Scalar> MarkedPoints<F> {
    pub fn new(points: Vec<F>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Invalid(format!(
                "need at least 3 marked points, got {}",
                points.len()
            )));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let scale = points[i].modulus() + points[j].modulus() + 1.0;
                if (points[i].clone() - points[j].clone()).is_negligible(scale) {
                    return Err(Error::Invalid(format!(
                        "marked points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(MarkedPoints(points))
    }

    /// `xᵢ = i − 1`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new((0..n as i64).map(F::from_i64).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[F] {
        &self.0
    }
}

/// `(points, weights, lines ℓᵢ, residues Rᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HiggsData<F> {
    points: MarkedPoints<F>,
    weights: WeightVector,
    lines: Vec<Vector2<F>>,
    residues: Vec<Matrix2<F>>,
}

impl<F: Scalar> HiggsData<F> {
    /// Shape checks only; the residue conditions are separate predicates.
    pub fn new(
        points: MarkedPoints<F>,
        weights: WeightVector,
        lines: Vec<Vector2<F>>,
        residues: Vec<Matrix2<F>>,
    ) -> Result<Self> {
        let n = points.len();
        if weights.len() != n || lines.len() != n || residues.len() != n {
            return Err(Error::Invalid(format!(
                "length mismatch: {} points, {} weights, {} lines, {} residues",
                n,
                weights.len(),
                lines.len(),
                residues.len()
            )));
        }
        if let Some(i) = lines.iter().position(Vector2::is_zero) {
            return Err(Error::ZeroLine(i));
        }
        Ok(HiggsData {
            points,
            weights,
            lines,
            residues,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn with_weights(&self, weights: WeightVector) -> Result<Self> {
        Self::new(
            self.points.clone(),
            weights,
            self.lines.clone(),
            self.residues.clone(),
        )
    }

    pub fn points(&self) -> &MarkedPoints<F> {
        &self.points
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn lines(&self) -> &[Vector2<F>] {
        &self.lines
    }

    pub fn residues(&self) -> &[Matrix2<F>] {
        &self.residues
    }

    pub fn residue_sum(&self) -> Matrix2<F> {
        self.residues
            .iter()
            .cloned()
            .fold(Matrix2::zero(), |a, b| a + b)
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(Matrix2::is_zero)
    }

    fn residue_scale(&self) -> f64 {
        self.residues
            .iter()
            .map(Matrix2::norm)
            .sum::<f64>()
            .max(f64::MIN_POSITIVE)
    }
}

/// The Higgs bundle of a level-set point: `ℓᵢ = span(zᵢ)`, `Rᵢ = zᵢ ⊗ yᵢ`.
pub fn to_higgs<F: Scalar>(
    p: &HyperpolygonPoint<F>,
    points: &MarkedPoints<F>,
    weights: &WeightVector,
) -> Result<HiggsData<F>> {
    if points.len() != p.n() || weights.len() != p.n() {
        return Err(Error::Invalid(format!(
            "point has n = {} but {} marked points and {} weights were given",
            p.n(),
            points.len(),
            weights.len()
        )));
    }
    if !is_in_level_set(p) {
        return Err(Error::NotOnLevelSet);
    }
    let lines = p.zs().to_vec();
    let residues = p
        .zs()
        .iter()
        .zip(p.ys())
        .map(|(z, y)| outer(z, y))
        .collect();
    HiggsData::new(points.clone(), weights.clone(), lines, residues)
}

/// `M(x₀) = Σ Rᵢ / (x₀ − xᵢ)`.
pub fn evaluate<F: Scalar>(h: &HiggsData<F>, x0: &F) -> Result<Matrix2<F>> {
    let mut m = Matrix2::zero();
    for (i, (xi, r)) in h.points.0.iter().zip(&h.residues).enumerate() {
        let d = x0.clone() - xi.clone();
        if d.is_negligible(x0.modulus() + xi.modulus() + 1.0) {
            return Err(Error::PoleOfHiggsField(i));
        }
        m = m + r.scale(&d.recip());
    }
    Ok(m)
}

/// `Rᵢ ℓᵢ = 0`, `Rᵢ(C²) ⊆ ℓᵢ` and `Rᵢ² = 0` at every marked point.
pub fn check_strong_parabolicity<F: Scalar>(h: &HiggsData<F>) -> bool {
    h.lines.iter().zip(&h.residues).all(|(line, r)| {
        let scale = r.norm() * line.norm() + f64::MIN_POSITIVE;
        let kills_line = r.apply(line).0.iter().all(|c| c.is_negligible(scale));
        // complete `line` to a basis with a vector off the line
        let w = if line.0[0].modulus() >= line.0[1].modulus() {
            Vector2::new(F::zero(), F::one())
        } else {
            Vector2::new(F::one(), F::zero())
        };
        let image_in_line = r.apply(&w).wedge(line).is_negligible(scale);
        let square_zero =
            (r.clone() * r.clone()).is_negligible(r.norm().powi(2) + f64::MIN_POSITIVE);
        kills_line && image_in_line && square_zero
    })
}

/// `Σ Rᵢ = 0` (no pole at infinity).
pub fn residues_sum_to_zero<F: Scalar>(h: &HiggsData<F>) -> bool {
    h.residue_sum().is_negligible(h.residue_scale())
}

/// Polynomial form of the Higgs field: `M(x) = N(x) / D(x)` with
/// `D = ∏ (x − xᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialHiggsField<F: Scalar> {
    pub entries: [[Polynomial<F>; 2]; 2],
    pub denominator: Polynomial<F>,
}

impl<F: Scalar> PolynomialHiggsField<F> {
    pub fn of(h: &HiggsData<F>) -> Self {
        let xs = &h.points.0;
        let cofactor = |i: usize| {
            Polynomial::from_roots(
                xs.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, x)| x),
            )
        };
        let mut entries: [[Polynomial<F>; 2]; 2] = Default::default();
        for (i, r) in h.residues.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let c = cofactor(i);
            for (a, row) in entries.iter_mut().enumerate() {
                for (b, e) in row.iter_mut().enumerate() {
                    *e = e.clone() + c.scale(&r.0[a][b]);
                }
            }
        }
        PolynomialHiggsField {
            entries,
            denominator: Polynomial::from_roots(xs),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Polynomial::is_zero)
    }

    pub fn trace(&self) -> Polynomial<F> {
        self.entries[0][0].clone() + self.entries[1][1].clone()
    }

    pub fn det(&self) -> Polynomial<F> {
        let [[a, b], [c, d]] = &self.entries;
        a.clone() * d.clone() - b.clone() * c.clone()
    }
}

/// `det M(x)` as a reduced rational function. Fails unless `trace M ≡ 0`
/// and `det M` has at most a simple pole at every marked point.
pub fn det_rational<F: Scalar>(h: &HiggsData<F>) -> Result<RationalFunction<F>> {
    if F::MODE == Mode::Approx {
        return Err(Error::ExactRequired("determinant of the Higgs field"));
    }
    let field = PolynomialHiggsField::of(h);
    if !field.trace().is_zero() {
        return Err(Error::NotStronglyParabolic);
    }
    let d = field.denominator.clone();
    let det = RationalFunction::new(field.det(), d.clone() * d);
    if !det.is_zero() {
        for x in &h.points.0 {
            if pole_order(&det, x)? > 1 {
                return Err(Error::NotStronglyParabolic);
            }
        }
    }
    Ok(det)
}

/// A saturated line subbundle `O(−k) → O²` given by a coprime polynomial
/// section `(p, q)` with `k = max(deg p, deg q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSubbundle<F: Scalar> {
    k: usize,
    p: Polynomial<F>,
    q: Polynomial<F>,
}

impl<F: Scalar> LineSubbundle<F> {
    /// Saturates `(p, q)`: divides out the common factor and scales so the
    /// component of higher degree (the first on ties) is monic.
    pub fn saturate(p: Polynomial<F>, q: Polynomial<F>) -> Result<Self> {
        let g = poly_gcd(&p, &q)?;
        let p = p.exact_div(&g).expect("gcd divides");
        let q = q.exact_div(&g).expect("gcd divides");
        let lead = match (p.degree(), q.degree()) {
            (Some(dp), Some(dq)) if dq > dp => q.leading().unwrap().clone(),
            (Some(_), _) => p.leading().unwrap().clone(),
            (None, _) => q.leading().unwrap().clone(),
        };
        let inv = lead.recip();
        let (p, q) = (p.scale(&inv), q.scale(&inv));
        let k = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));
        Ok(LineSubbundle { k, p, q })
    }

    /// The subbundle has degree `−k`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> i64 {
        -(self.k as i64)
    }

    pub fn section(&self) -> (&Polynomial<F>, &Polynomial<F>) {
        (&self.p, &self.q)
    }

    pub fn eval(&self, x: &F) -> Vector2<F> {
        Vector2::new(self.p.eval(x), self.q.eval(x))
    }

    /// Indices `i` with `section(xᵢ) ∈ ℓᵢ`.
    pub fn incidences(&self, h: &HiggsData<F>) -> Vec<usize> {
        h.points
            .0
            .iter()
            .zip(&h.lines)
            .enumerate()
            .filter(|(_, (x, line))| self.eval(x).is_parallel(line))
            .map(|(i, _)| i)
            .collect()
    }
}

/// `−k + Σ_{i ∈ S_L} αᵢ`.
pub fn parabolic_degree<F: Scalar>(l: &LineSubbundle<F>, h: &HiggsData<F>) -> BigRational {
    let alpha = h.weights.as_slice();
    l.incidences(h)
        .into_iter()
        .fold(BigRational::from_integer(l.degree().into()), |acc, i| {
            acc + &alpha[i]
        })
}

/// How the invariant lines of a traceless `M` arise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralCase {
    /// `−det M` is not a square: no invariant line.
    NonSquare,
    /// `det M ≡ 0`, `M ≢ 0`: the kernel line field.
    Nilpotent,
    /// `−det M = r² ≠ 0`: the two eigen-line fields.
    Split,
    /// `M ≡ 0`: every line is invariant.
    Zero,
}

impl SpectralCase {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralCase::NonSquare => "non-square",
            SpectralCase::Nilpotent => "nilpotent",
            SpectralCase::Split => "split",
            SpectralCase::Zero => "zero",
        }
    }
}

/// Result of the invariant-subbundle search.
#[derive(Clone, Debug, PartialEq)]
pub enum InvariantLines<F: Scalar> {
    /// `θ = 0`: every line subbundle is invariant.
    All,
    Lines {
        case: SpectralCase,
        lines: Vec<LineSubbundle<F>>,
    },
}

impl<F: Scalar> InvariantLines<F> {
    pub fn case(&self) -> SpectralCase {
        match self {
            InvariantLines::All => SpectralCase::Zero,
            InvariantLines::Lines { case, .. } => *case,
        }
    }
}

/// All `θ`-invariant saturated line subbundles of degree `≥ −k_max`.
pub fn invariant_line_subbundles<F: Scalar>(
    h: &HiggsData<F>,
    k_max: usize,
) -> Result<InvariantLines<F>> {
    let (case, lines) = match all_invariant_lines(h)? {
        InvariantLines::All => return Ok(InvariantLines::All),
        InvariantLines::Lines { case, lines } => (case, lines),
    };
    Ok(InvariantLines::Lines {
        case,
        lines: lines.into_iter().filter(|l| l.k <= k_max).collect(),
    })
}

/// Every invariant saturated line subbundle, with no degree cut-off. There
/// are at most two unless `θ = 0`.
pub fn all_invariant_lines<F: Scalar>(h: &HiggsData<F>) -> Result<InvariantLines<F>> {
    if F::MODE == Mode::Approx {
        return Err(Error::ExactRequired("invariant line subbundle search"));
    }
    let field = PolynomialHiggsField::of(h);
    if field.is_zero() {
        return Ok(InvariantLines::All);
    }
    if !field.trace().is_zero() {
        return Err(Error::Invalid("Higgs field is not traceless".into()));
    }
    let [[a, b], [c, _]] = field.entries.clone();
    let neg_det = -field.det();
    if neg_det.is_zero() {
        // image = kernel for a nonzero nilpotent; columns of adj N = −N
        let line = if !a.is_zero() || !c.is_zero() {
            LineSubbundle::saturate(-a, -c)?
        } else {
            LineSubbundle::saturate(-b, a)?
        };
        return Ok(InvariantLines::Lines {
            case: SpectralCase::Nilpotent,
            lines: vec![line],
        });
    }
    let neg_det_rf = RationalFunction::from_poly(neg_det);
    let (is_square, root) = rf_is_square(&neg_det_rf)?;
    if !is_square {
        if square_class(&neg_det_rf)?.is_some() {
            return Err(Error::Unsupported(
                "eigen-line fields are defined only over a quadratic extension of Q(i)".into(),
            ));
        }
        return Ok(InvariantLines::Lines {
            case: SpectralCase::NonSquare,
            lines: Vec::new(),
        });
    }
    let rho = root.expect("square root returned").numerator().clone();
    let mut lines = Vec::with_capacity(2);
    for r in [rho.clone(), -rho] {
        // ker(N − r) is spanned by a nonzero column of adj(N − r)
        let col0 = (-(a.clone()) - r.clone(), -(c.clone()));
        let col1 = (-(b.clone()), a.clone() - r.clone());
        let (p, q) = if !col0.0.is_zero() || !col0.1.is_zero() {
            col0
        } else {
            col1
        };
        lines.push(LineSubbundle::saturate(p, q)?);
    }
    Ok(InvariantLines::Lines {
        case: SpectralCase::Split,
        lines,
    })
}

/// `(k, S)`: degree `−k` and the incidence set of a destabilizing candidate.
pub type Witness = (usize, Vec<usize>);

/// Outcome of the stability test.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub semistable: bool,
    /// Largest parabolic degree of an invariant line subbundle, if any.
    pub max_pardeg: Option<BigRational>,
    /// `pardeg(E) / 2 = Σαᵢ / 2`.
    pub threshold: BigRational,
    pub k_max: usize,
    pub case: SpectralCase,
    /// Realizes `max_pardeg`.
    pub witness: Option<Witness>,
}

impl StabilityReport {
    pub fn strictly_semistable(&self) -> bool {
        self.semistable && !self.stable
    }
}

/// Largest `n` for which the `θ = 0` subset scan is attempted.
pub const MAX_ZERO_FIELD_N: usize = 10;

/// `floor(Σαᵢ / 2)`: invariant subbundles of degree below `−k_max` cannot
/// reach the slope threshold.
pub fn degree_bound(weights: &WeightVector) -> usize {
    let half = weights.total() / BigRational::from_integer(2.into());
    half.floor()
        .to_integer()
        .to_usize()
        .expect("weights are positive")
}

pub fn stability<F: Scalar>(h: &HiggsData<F>) -> Result<StabilityReport> {
    if F::MODE == Mode::Approx {
        return Err(Error::ExactRequired("stability"));
    }
    if !check_strong_parabolicity(h) {
        return Err(Error::NotStronglyParabolic);
    }
    stability_with_lines(h, &all_invariant_lines(h)?)
}

/// [`stability`] from a precomputed [`all_invariant_lines`] of the same
/// field; lets a caller vary the weights without redoing the line search.
pub fn stability_with_lines<F: Scalar>(
    h: &HiggsData<F>,
    invariant: &InvariantLines<F>,
) -> Result<StabilityReport> {
    if F::MODE == Mode::Approx {
        return Err(Error::ExactRequired("stability"));
    }
    let threshold = h.weights.total() / BigRational::from_integer(2.into());
    let k_max = degree_bound(&h.weights);
    let case = invariant.case();
    let best = match invariant {
        InvariantLines::All => zero_field_best(h, k_max)?,
        InvariantLines::Lines { lines, .. } => lines
            .iter()
            .filter(|l| l.k <= k_max)
            .map(|l| (parabolic_degree(l, h), (l.k, l.incidences(h))))
            .max_by(|a, b| a.0.cmp(&b.0)),
    };
    let (max_pardeg, witness) = match best {
        Some((d, w)) => (Some(d), Some(w)),
        None => (None, None),
    };
    let stable = max_pardeg.as_ref().is_none_or(|d| *d < threshold);
    let semistable = max_pardeg.as_ref().is_none_or(|d| *d <= threshold);
    Ok(StabilityReport {
        stable,
        semistable,
        max_pardeg,
        threshold,
        k_max,
        case,
        witness,
    })
}

pub fn is_stable<F: Scalar>(h: &HiggsData<F>) -> Result<bool> {
    stability(h).map(|r| r.stable)
}

/// For `θ = 0`: the largest `−k + Σ_S αᵢ` over `k ≤ k_max` and subsets `S`
/// for which some nonzero section of degree `≤ k` meets `ℓᵢ` at every
/// `i ∈ S`. Saturating such a section only raises its parabolic degree, so
/// this is the maximum over all line subbundles of degree `≥ −k_max`.
fn zero_field_best<F: Scalar>(
    h: &HiggsData<F>,
    k_max: usize,
) -> Result<Option<(BigRational, Witness)>> {
    let n = h.n();
    if n > MAX_ZERO_FIELD_N {
        return Err(Error::Unsupported(format!(
            "subset scan for the zero Higgs field is limited to n <= {MAX_ZERO_FIELD_N}"
        )));
    }
    let alpha = h.weights.as_slice();
    let mut best: Option<(BigRational, Witness)> = None;
    for k in 0..=k_max {
        for mask in 0u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let value = subset.iter().fold(
                BigRational::from_integer((-(k as i64)).into()),
                |acc, &i| acc + &alpha[i],
            );
            if best.as_ref().is_some_and(|(b, _)| *b >= value) {
                continue;
            }
            if interpolation_solvable(h, k, &subset) {
                best = Some((value, (k, subset)));
            }
        }
    }
    Ok(best)
}

/// Whether a nonzero `(p, q)` of degree `≤ k` satisfies
/// `(p(xᵢ), q(xᵢ)) ∥ ℓᵢ` for all `i ∈ subset`.
fn interpolation_solvable<F: Scalar>(h: &HiggsData<F>, k: usize, subset: &[usize]) -> bool {
    let unknowns = 2 * (k + 1);
    if subset.len() < unknowns {
        return true;
    }
    let mut m = DenseMatrix::zeros(subset.len(), unknowns);
    for (row, &i) in subset.iter().enumerate() {
        let x = &h.points.0[i];
        let line = &h.lines[i];
        let mut power = F::one();
        for j in 0..=k {
            // p(x)·ℓ₁ − q(x)·ℓ₀
            m[(row, j)] = power.clone() * line.0[1].clone();
            m[(row, k + 1 + j)] = -(power.clone() * line.0[0].clone());
            power = power * x.clone();
        }
    }
    rank(&m) < unknowns
}
