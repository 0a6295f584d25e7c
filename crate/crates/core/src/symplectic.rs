//! Liouville forms on the ambient space, the Higgs-side 1-form through the
//! residue trace pairing, and the reduced 2-form on the quotient.

use rand::Rng;

use crate::error::{Error, Result};
use crate::higgs::{is_stable, to_higgs, HiggsData, MarkedPoints};
use crate::hyperpolygon::{
    act_tangent, is_in_level_set, is_tangent, orbit_basis, span_rank, tangent_basis, GroupElement,
    HyperpolygonPoint, TangentVector, WeightVector,
};
use crate::linalg::{nullspace, outer, pair, rank, Covector2, DenseMatrix, Matrix2, Vector2};
use crate::scalar::{Mode, RandomScalar, Scalar};

/// Largest relative residual accepted in approximate mode.
pub const APPROX_RESIDUAL_BOUND: f64 = 1e-10;

/// `(v̄ᵢ, δRᵢ)`: the motion of each flag line and of each residue.
#[derive(Clone, Debug, PartialEq)]
pub struct HiggsDeformation<F> {
    pub line_motion: Vec<Vector2<F>>,
    pub residue_motion: Vec<Matrix2<F>>,
}

/// `λ′(t) = Σ yᵢ(vᵢ)`.
pub fn liouville_one_form<F: Scalar>(p: &HyperpolygonPoint<F>, t: &TangentVector<F>) -> F {
    p.ys()
        .iter()
        .zip(&t.v)
        .fold(F::zero(), |acc, (y, v)| acc + pair(y, v))
}

/// `ω₀(s, t) = Σ uᵢˢ(vᵢᵗ) − uᵢᵗ(vᵢˢ)`. Constant coefficients, so no base point.
pub fn liouville_two_form<F: Scalar>(s: &TangentVector<F>, t: &TangentVector<F>) -> F {
    (0..s.n()).fold(F::zero(), |acc, i| {
        acc + pair(&s.u[i], &t.v[i]) - pair(&t.u[i], &s.v[i])
    })
}

pub fn pushforward_deformation<F: Scalar>(
    p: &HyperpolygonPoint<F>,
    t: &TangentVector<F>,
) -> HiggsDeformation<F> {
    HiggsDeformation {
        line_motion: t.v.clone(),
        residue_motion: (0..p.n())
            .map(|i| outer(&t.v[i], p.y(i)) + outer(p.z(i), &t.u[i]))
            .collect(),
    }
}

fn lift_pool<F: Scalar>() -> [Covector2<F>; 4] {
    [
        Covector2::from_ints(1, 0),
        Covector2::from_ints(0, 1),
        Covector2::from_ints(1, 1),
        Covector2::from_ints(1, -1),
    ]
}

/// A matrix `Ṽ` with `Ṽ·line = motion`, namely `motion ⊗ ζ / ζ(line)` for
/// the pool covector `ζ` with the largest `|ζ(line)|`.
pub fn canonical_lift<F: Scalar>(line: &Vector2<F>, motion: &Vector2<F>) -> Result<Matrix2<F>> {
    if line.is_zero() {
        return Err(Error::Invalid(
            "cannot lift the motion of a zero line".into(),
        ));
    }
    let zeta = lift_pool::<F>()
        .into_iter()
        .map(|zeta| {
            let c = pair(&zeta, line);
            (c.modulus(), zeta, c)
        })
        .filter(|(m, _, c)| *m > 0.0 && !c.is_zero())
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, zeta, c)| zeta.scale(&c.recip()))
        .expect("one of e₁*, e₂* pairs nontrivially with a nonzero vector");
    Ok(outer(motion, &zeta))
}

/// Another lift of the same class: adds `line ⊗ η + w ⊗ ann(line)` with
/// random `η`, `w`.
pub fn random_lift<F: RandomScalar, R: Rng + ?Sized>(
    line: &Vector2<F>,
    motion: &Vector2<F>,
    rng: &mut R,
) -> Result<Matrix2<F>> {
    let base = canonical_lift(line, motion)?;
    let eta = Covector2::new(F::sample(rng), F::sample(rng));
    let w = Vector2::new(F::sample(rng), F::sample(rng));
    Ok(base + outer(line, &eta) + outer(&w, &line.annihilator()))
}

/// `trace(R·Ṽ)`.
pub fn trace_pairing<F: Scalar>(r: &Matrix2<F>, lift: &Matrix2<F>) -> F {
    (r.clone() * lift.clone()).trace()
}

/// The residue pairing of `R` with the deformation `motion` of `line`.
pub fn serre_pair<F: Scalar>(r: &Matrix2<F>, line: &Vector2<F>, motion: &Vector2<F>) -> Result<F> {
    Ok(trace_pairing(r, &canonical_lift(line, motion)?))
}

/// `Σ serre_pair(Rᵢ, ℓᵢ, v̄ᵢ)`.
pub fn higgs_one_form<F: Scalar>(h: &HiggsData<F>, d: &HiggsDeformation<F>) -> Result<F> {
    let mut total = F::zero();
    for ((r, line), motion) in h.residues().iter().zip(h.lines()).zip(&d.line_motion) {
        total = total + serre_pair(r, line, motion)?;
    }
    Ok(total)
}

/// Same value, with an independent random lift at every marked point.
pub fn higgs_one_form_random_lifts<F: RandomScalar, R: Rng + ?Sized>(
    h: &HiggsData<F>,
    d: &HiggsDeformation<F>,
    rng: &mut R,
) -> Result<F> {
    let mut total = F::zero();
    for ((r, line), motion) in h.residues().iter().zip(h.lines()).zip(&d.line_motion) {
        total = total + trace_pairing(r, &random_lift(line, motion, rng)?);
    }
    Ok(total)
}

fn default_higgs<F: Scalar>(p: &HyperpolygonPoint<F>) -> Result<HiggsData<F>> {
    // the 1-form does not see the marked points or the weights
    let n = p.n();
    to_higgs(
        p,
        &MarkedPoints::standard(n)?,
        &WeightVector::uniform(n, 1, 3)?,
    )
}

/// `(φ*λ)(t)`, evaluated on the Higgs side.
pub fn higgs_one_form_pullback<F: Scalar>(
    p: &HyperpolygonPoint<F>,
    t: &TangentVector<F>,
) -> Result<F> {
    higgs_one_form(&default_higgs(p)?, &pushforward_deformation(p, t))
}

/// `ω₀(s, t)` for `s, t ∈ ker dμ`.
pub fn reduced_two_form<F: Scalar>(
    p: &HyperpolygonPoint<F>,
    s: &TangentVector<F>,
    t: &TangentVector<F>,
) -> Result<F> {
    if !is_in_level_set(p) {
        return Err(Error::NotOnLevelSet);
    }
    if !is_tangent(p, s) || !is_tangent(p, t) {
        return Err(Error::NotTangent);
    }
    Ok(liouville_two_form(s, t))
}

/// `dλ′(s, t)` from the definition: `λ′` is linear in the base point, so
/// `s(λ′(t)) = λ′_{p+s}(t) − λ′_p(t)` with no truncation.
pub fn exterior_derivative_of_liouville<F: Scalar>(
    p: &HyperpolygonPoint<F>,
    s: &TangentVector<F>,
    t: &TangentVector<F>,
) -> F {
    let directional = |dir: &TangentVector<F>, arg: &TangentVector<F>| {
        let two = F::from_i64(2);
        match p.shifted(dir) {
            Ok(q) => liouville_one_form(&q, arg) - liouville_one_form(p, arg),
            // p + dir hit a zero zᵢ; step by 2·dir instead
            Err(_) => {
                let q = p
                    .shifted(&dir.scale(&two))
                    .expect("p + s and p + 2s cannot both have a zero z");
                (liouville_one_form(&q, arg) - liouville_one_form(p, arg)) / two
            }
        }
    };
    directional(s, t) - directional(t, s)
}

/// `ω₀(g·s, g·t) − ω₀(s, t)`.
pub fn invariance_defect<F: Scalar>(
    g: &GroupElement<F>,
    s: &TangentVector<F>,
    t: &TangentVector<F>,
) -> F {
    liouville_two_form(&act_tangent(g, s), &act_tangent(g, t)) - liouville_two_form(s, t)
}

/// Vectors of `ker dμ` orthogonal to every orbit direction under the
/// coordinatewise bilinear pairing `⟨a, b⟩ = Σ aₖbₖ`.
pub fn orbit_complement<F: Scalar>(p: &HyperpolygonPoint<F>) -> Vec<TangentVector<F>> {
    let tangent = tangent_basis(p);
    let orbit = orbit_basis(p);
    if tangent.is_empty() {
        return Vec::new();
    }
    let flat_t: Vec<Vec<F>> = tangent.iter().map(TangentVector::to_flat).collect();
    let rows = orbit
        .iter()
        .map(|o| {
            let o = o.to_flat();
            flat_t.iter().map(|t| bilinear(t, &o)).collect()
        })
        .collect();
    let n = p.n();
    nullspace(&DenseMatrix::from_rows(rows))
        .iter()
        .map(|c| TangentVector::combination(&tangent, c, n))
        .collect()
}

fn bilinear<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// `ω₀(cₖ, cₗ)` over a family of tangent vectors.
pub fn gram_matrix<F: Scalar>(vectors: &[TangentVector<F>]) -> DenseMatrix<F> {
    let m = vectors.len();
    let mut g = DenseMatrix::zeros(m, m);
    for k in 0..m {
        for l in 0..m {
            g[(k, l)] = liouville_two_form(&vectors[k], &vectors[l]);
        }
    }
    g
}

/// Ranks of the 2-form on the orbit complement and on all of `ker dμ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub expected: usize,
    pub complement_dim: usize,
    pub reduced: usize,
    pub full_tangent: usize,
}

impl RankReport {
    pub fn pass(&self) -> bool {
        self.reduced == self.expected && self.full_tangent == self.expected
    }
}

pub fn reduced_gram_rank<F: Scalar>(p: &HyperpolygonPoint<F>) -> RankReport {
    let complement = orbit_complement(p);
    RankReport {
        expected: 2 * p.n().saturating_sub(3),
        complement_dim: complement.len(),
        reduced: matrix_rank(&gram_matrix(&complement)),
        full_tangent: matrix_rank(&gram_matrix(&tangent_basis(p))),
    }
}

fn matrix_rank<F: Scalar>(m: &DenseMatrix<F>) -> usize {
    if m.rows() == 0 {
        0
    } else {
        rank(m)
    }
}

/// `dim ker dμ`, number of independent orbit directions, and their
/// difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionReport {
    pub n: usize,
    pub tangent: usize,
    pub orbit: usize,
}

impl DimensionReport {
    pub fn reduced(&self) -> isize {
        self.tangent as isize - self.orbit as isize
    }

    pub fn pass(&self) -> bool {
        self.tangent == 3 * self.n - 3
            && self.orbit == self.n + 3
            && self.reduced() == 2 * self.n as isize - 6
    }
}

pub fn dimension_counts<F: Scalar>(p: &HyperpolygonPoint<F>) -> DimensionReport {
    DimensionReport {
        n: p.n(),
        tangent: tangent_basis(p).len(),
        orbit: span_rank(&orbit_basis(p)),
    }
}

/// A maximum residual: exact zero in exact mode, relative size otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub mode: Mode,
    pub value: f64,
}

impl Residual {
    pub fn zero(mode: Mode) -> Self {
        Residual { mode, value: 0.0 }
    }

    pub fn record<F: Scalar>(&mut self, diff: &F, scale: f64) {
        let r = match self.mode {
            Mode::Exact if diff.is_zero() => 0.0,
            // any exact discrepancy counts, however small
            Mode::Exact => diff.modulus().max(f64::MIN_POSITIVE),
            Mode::Approx => diff.modulus() / scale.max(f64::MIN_POSITIVE),
        };
        if r > self.value || r.is_nan() {
            self.value = r;
        }
    }

    pub fn merge(self, other: Residual) -> Residual {
        if other.value > self.value || other.value.is_nan() {
            other
        } else {
            self
        }
    }

    pub fn pass(&self) -> bool {
        match self.mode {
            Mode::Exact => self.value == 0.0,
            Mode::Approx => self.value <= APPROX_RESIDUAL_BOUND,
        }
    }
}

impl std::fmt::Display for Residual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.value == 0.0 {
            write!(f, "0")
        } else {
            write!(f, "{:e}", self.value)
        }
    }
}

/// Outcome of [`verify_theorem1`].
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub trials: usize,
    /// `φ*λ − λ′` on random tangent vectors.
    pub one_form: Residual,
    /// `ω₀ − dλ′` on random pairs in `ker dμ`.
    pub two_form: Residual,
    /// `ω₀(orbit direction, ·)` on `ker dμ`.
    pub descent: Residual,
    /// `φ*λ` on orbit directions.
    pub gauge: Residual,
    /// Whether stability was decided (exact mode only).
    pub stability_checked: bool,
}

impl Theorem1Report {
    pub fn pass(&self) -> bool {
        self.one_form.pass() && self.two_form.pass() && self.descent.pass() && self.gauge.pass()
    }
}

pub fn random_tangent<F: RandomScalar, R: Rng + ?Sized>(
    basis: &[TangentVector<F>],
    n: usize,
    rng: &mut R,
) -> TangentVector<F> {
    let coeffs: Vec<F> = basis.iter().map(|_| F::sample(rng)).collect();
    TangentVector::combination(basis, &coeffs, n)
}

pub fn pair_scale<F: Scalar>(s: &TangentVector<F>, t: &TangentVector<F>) -> f64 {
    (0..s.n())
        .map(|i| s.u[i].norm() * t.v[i].norm() + t.u[i].norm() * s.v[i].norm())
        .sum()
}

/// Checks `φ*λ = λ′` on `trials` random tangent vectors and `ω₀ = dλ′` with
/// descent on `trials` random pairs in `ker dμ`. In exact mode `p` must be
/// stable for the given marked points and weights.
pub fn verify_theorem1<F: RandomScalar, R: Rng + ?Sized>(
    p: &HyperpolygonPoint<F>,
    points: &MarkedPoints<F>,
    weights: &WeightVector,
    trials: usize,
    rng: &mut R,
) -> Result<Theorem1Report> {
    let h = to_higgs(p, points, weights)?;
    let stability_checked = F::MODE == Mode::Exact;
    if stability_checked && !is_stable(&h)? {
        return Err(Error::StableLocusRequired);
    }
    let n = p.n();
    let mode = F::MODE;
    let tangent = tangent_basis(p);
    let orbit = orbit_basis(p);
    let mut report = Theorem1Report {
        trials,
        one_form: Residual::zero(mode),
        two_form: Residual::zero(mode),
        descent: Residual::zero(mode),
        gauge: Residual::zero(mode),
        stability_checked,
    };
    for _ in 0..trials {
        let t = random_tangent(&tangent, n, rng);
        let lhs = higgs_one_form_random_lifts(&h, &pushforward_deformation(p, &t), rng)?;
        let rhs = liouville_one_form(p, &t);
        let scale: f64 = p
            .ys()
            .iter()
            .zip(&t.v)
            .map(|(y, v)| y.norm() * v.norm())
            .sum();
        report.one_form.record(&(lhs - rhs), scale);

        let s = random_tangent(&tangent, n, rng);
        let omega = reduced_two_form(p, &s, &t)?;
        let d_lambda = exterior_derivative_of_liouville(p, &s, &t);
        report
            .two_form
            .record(&(omega - d_lambda), pair_scale(&s, &t));

        let o = &orbit[rng.gen_range(0..orbit.len())];
        report
            .descent
            .record(&liouville_two_form(o, &t), pair_scale(o, &t));
    }
    for o in &orbit {
        let value = higgs_one_form(&h, &pushforward_deformation(p, o))?;
        let scale: f64 = p
            .ys()
            .iter()
            .zip(&o.v)
            .map(|(y, v)| y.norm() * v.norm())
            .sum();
        report.gauge.record(&value, scale);
    }
    Ok(report)
}
