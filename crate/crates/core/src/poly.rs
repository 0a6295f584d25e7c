//! Univariate polynomials and rational functions in the affine coordinate `x`.
//!
//! Arithmetic and evaluation work in both modes. Structural queries (gcd,
//! square detection, pole orders) are discontinuous in the coefficients and
//! are refused in approximate mode.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

/// Coefficients lowest degree first, trailing zeros stripped.
#[derive(Clone, PartialEq)]
pub struct Polynomial<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> Polynomial<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        match F::MODE {
            Mode::Exact => {
                while coeffs.last().is_some_and(Scalar::is_zero) {
                    coeffs.pop();
                }
            }
            Mode::Approx => {
                let scale = coeffs.iter().map(Scalar::modulus).fold(0.0, f64::max);
                while coeffs.last().is_some_and(|c| c.is_negligible(scale)) {
                    coeffs.pop();
                }
            }
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| F::from_i64(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![F::zero(), F::one()])
    }

    /// `x − root`.
    pub fn linear_factor(root: &F) -> Self {
        Self::new(vec![-root.clone(), F::one()])
    }

    /// `∏ (x − r)` over the given roots.
    pub fn from_roots<'a, I: IntoIterator<Item = &'a F>>(roots: I) -> Self {
        roots
            .into_iter()
            .fold(Self::one(), |acc, r| acc * Self::linear_factor(r))
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` stands for the degree of the zero polynomial (−∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|a| c.clone() * a.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| F::from_i64(k as i64) * c.clone())
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self.clone())
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc_inv = d.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![F::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap().clone() * lc_inv.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                let v = rem[k + j].clone() - c.clone() * dc.clone();
                rem[k + j] = v;
            }
            quot[k] = c;
            rem.pop();
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Multiplicity of `root` as a zero.
    pub fn root_multiplicity(&self, root: &F) -> usize {
        let factor = Self::linear_factor(root);
        let mut p = self.clone();
        let mut m = 0;
        while !p.is_zero() {
            match p.exact_div(&factor) {
                Some(q) => {
                    p = q;
                    m += 1;
                }
                None => break,
            }
        }
        m
    }
}

fn require_exact(what: &'static str, mode: Mode) -> Result<()> {
    match mode {
        Mode::Exact => Ok(()),
        Mode::Approx => Err(Error::ExactRequired(what)),
    }
}

/// Monic greatest common divisor.
pub fn poly_gcd<F: Scalar>(a: &Polynomial<F>, b: &Polynomial<F>) -> Result<Polynomial<F>> {
    require_exact("polynomial gcd", F::MODE)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdUndefined);
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    Ok(a.monic())
}

/// Yun's squarefree decomposition of a monic polynomial: returns `a₁, a₂, …`
/// with `p = ∏ aᵢ^i`, each `aᵢ` monic squarefree and pairwise coprime.
pub fn squarefree_decomposition<F: Scalar>(p: &Polynomial<F>) -> Result<Vec<Polynomial<F>>> {
    require_exact("squarefree decomposition", F::MODE)?;
    let p = p.monic();
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let a0 = poly_gcd(&p, &dp)?;
    let mut b = p.exact_div(&a0).expect("gcd divides");
    let c = dp.exact_div(&a0).expect("gcd divides");
    let mut d = c - b.derivative();
    let mut factors = Vec::new();
    while b.degree().unwrap_or(0) > 0 {
        let a = poly_gcd(&b, &d)?;
        let next_b = b.exact_div(&a).expect("gcd divides");
        let next_c = d.exact_div(&a).expect("gcd divides");
        d = next_c - next_b.derivative();
        b = next_b;
        factors.push(a);
    }
    Ok(factors)
}

/// Square root of a monic polynomial, if it is a perfect square.
fn monic_sqrt<F: Scalar>(p: &Polynomial<F>) -> Result<Option<Polynomial<F>>> {
    let factors = squarefree_decomposition(p)?;
    let mut root = Polynomial::one();
    for (idx, a) in factors.iter().enumerate() {
        let mult = idx as u32 + 1;
        if mult % 2 == 1 && a.degree().unwrap_or(0) > 0 {
            return Ok(None);
        }
        root = root * a.pow(mult / 2);
    }
    Ok((root.clone() * root.clone() == p.monic()).then_some(root))
}

/// Quotient of polynomials with a monic denominator; gcd-reduced in exact mode.
#[derive(Clone, PartialEq)]
pub struct RationalFunction<F> {
    num: Polynomial<F>,
    den: Polynomial<F>,
}

impl<F: Scalar> RationalFunction<F> {
    /// Panics if `den` is zero.
    pub fn new(num: Polynomial<F>, den: Polynomial<F>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let (mut num, mut den) = (num, den);
        if F::MODE == Mode::Exact {
            if num.is_zero() {
                den = Polynomial::one();
            } else {
                let g = poly_gcd(&num, &den).expect("denominator is nonzero");
                num = num.exact_div(&g).expect("gcd divides");
                den = den.exact_div(&g).expect("gcd divides");
            }
        }
        let lc = den.leading().unwrap().recip();
        RationalFunction {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn from_poly(p: Polynomial<F>) -> Self {
        Self::new(p, Polynomial::one())
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn numerator(&self) -> &Polynomial<F> {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Self::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self.clone() * r)
    }
}

impl<F: Scalar> Add for RationalFunction<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.den == rhs.den {
            return Self::new(self.num + rhs.num, self.den);
        }
        Self::new(
            self.num * rhs.den.clone() + rhs.num * self.den.clone(),
            self.den * rhs.den,
        )
    }
}

impl<F: Scalar> Sub for RationalFunction<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Scalar> Neg for RationalFunction<F> {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFunction {
            num: -self.num,
            den: self.den,
        }
    }
}

impl<F: Scalar> Mul for RationalFunction<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl<F: Scalar> Default for Polynomial<F> {
    fn default() -> Self {
        Polynomial::zero()
    }
}

impl<F: Scalar> Add for Polynomial<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<F: Scalar> Sub for Polynomial<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Scalar> Neg for Polynomial<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Polynomial {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<F: Scalar> Mul for Polynomial<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl<F: Scalar> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<F: Scalar> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl<F: Scalar> fmt::Debug for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

/// `(true, r)` with `r² = f` when `f` is the square of a rational function
/// with coefficients in the scalar field.
pub fn rf_is_square<F: Scalar>(
    f: &RationalFunction<F>,
) -> Result<(bool, Option<RationalFunction<F>>)> {
    require_exact("square detection", F::MODE)?;
    let Some((c, g)) = square_class(f)? else {
        return Ok((false, None));
    };
    let Some(root_c) = c.to_exact().and_then(|c| c.sqrt()) else {
        return Ok((false, None));
    };
    let r = RationalFunction::constant(F::from_parts(&root_c.re, &root_c.im)) * g;
    if r.clone() * r.clone() != *f {
        return Ok((false, None));
    }
    Ok((true, Some(r)))
}

/// Writes `f = c·g²` with `c` a constant and `g` a quotient of monic
/// polynomials, when such a decomposition exists. Over an algebraically
/// closed field this is exactly the condition for `f` to be a square.
pub fn square_class<F: Scalar>(
    f: &RationalFunction<F>,
) -> Result<Option<(F, RationalFunction<F>)>> {
    require_exact("square detection", F::MODE)?;
    let Some(lc) = f.num.leading().cloned() else {
        return Ok(Some((F::zero(), RationalFunction::constant(F::one()))));
    };
    let (Some(n), Some(d)) = (monic_sqrt(&f.num.monic())?, monic_sqrt(&f.den)?) else {
        return Ok(None);
    };
    Ok(Some((lc, RationalFunction::new(n, d))))
}

pub fn rf_eval<F: Scalar>(f: &RationalFunction<F>, x0: &F) -> Result<F> {
    let d = f.den.eval(x0);
    let scale = f.den.coeffs.iter().map(Scalar::modulus).sum::<f64>()
        * (1.0 + x0.modulus()).powi(f.den.degree().unwrap_or(0) as i32);
    if d.is_negligible(scale) {
        return Err(Error::EvaluationAtPole);
    }
    Ok(f.num.eval(x0) / d)
}

/// Pole order at `x0`; negative values are zero orders.
pub fn pole_order<F: Scalar>(f: &RationalFunction<F>, x0: &F) -> Result<i64> {
    require_exact("pole order", F::MODE)?;
    if f.is_zero() {
        return Err(Error::OrderOfZero);
    }
    Ok(f.den.root_multiplicity(x0) as i64 - f.num.root_multiplicity(x0) as i64)
}
