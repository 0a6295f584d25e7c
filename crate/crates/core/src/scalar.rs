//! Scalar fields: exact Gaussian rationals `Q(i)` and complex `f64`.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Exact mode makes
//! zero tests decisive; approximate mode compares magnitudes against the
//! process-wide tolerance scaled by a caller-supplied magnitude.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default tolerance for approximate zero tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Current tolerance used by every approximate zero test.
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Replace the global tolerance. Non-positive or non-finite values are ignored.
pub fn set_tolerance(tol: f64) {
    if tol.is_finite() && tol > 0.0 {
        TOLERANCE_BITS.store(tol.to_bits(), Ordering::Relaxed);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Approx,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "approx" => Ok(Mode::Approx),
            other => Err(format!("unknown mode `{other}` (expected exact|approx)")),
        }
    }
}

/// A field element usable by the linear-algebra, polynomial and geometry code.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_parts(re: &BigRational, im: &BigRational) -> Self;
    fn imag_unit() -> Self;

    /// Exactly zero (approx mode: bitwise zero).
    fn is_zero(&self) -> bool;

    /// Zero up to tolerance relative to `scale` (exact mode ignores `scale`).
    fn is_negligible(&self, scale: f64) -> bool;

    /// Modulus as `f64`.
    fn modulus(&self) -> f64;

    fn to_complex(&self) -> Complex64;

    /// Exact value, when this scalar carries one.
    fn to_exact(&self) -> Option<GaussRat>;

    fn from_rational(r: &BigRational) -> Self {
        Self::from_parts(r, &BigRational::zero())
    }

    fn is_one(&self) -> bool {
        (self.clone() - Self::one()).is_zero()
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

/// An element `re + im·i` of the Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus, exactly.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Square root inside `Q(i)` when one exists.
    pub fn sqrt(&self) -> Option<GaussRat> {
        if self.is_zero_exact() {
            return Some(GaussRat::from_ints(0, 0));
        }
        let m = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let half_sum = (&m + &self.re) / &two;
        if half_sum.is_zero() {
            // purely negative real: sqrt(-m) = i sqrt(m)
            let y = rational_sqrt(&(-&self.re))?;
            return Some(GaussRat::new(BigRational::zero(), y));
        }
        let x = rational_sqrt(&half_sum)?;
        let y = &self.im / (&two * &x);
        let root = GaussRat::new(x, y);
        debug_assert!(root.clone() * root.clone() == *self);
        Some(root)
    }

    fn is_zero_exact(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

fn int_sqrt(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let s = v.sqrt();
    (&s * &s == *v).then_some(s)
}

/// Parse a rational from `p/q`, an integer, or a finite decimal such as
/// `-1.25e-3`. Decimals are converted exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| format!("bad exponent in `{s}`"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("bad number `{s}`"));
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(format!("bad number `{s}`"));
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().unwrap() / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(all);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators: fall back to a lossy division
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im.is_negative() => write!(f, "{}-{}i", self.re, -&self.im),
            (false, false) => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRat::new(self.re * rhs.re, BigRational::zero());
        }
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussRat::new(re, im)
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: GaussRat) -> GaussRat {
        assert!(!rhs.is_zero_exact(), "division by zero in Q(i)");
        if rhs.im.is_zero() {
            return GaussRat::new(self.re / &rhs.re, self.im / &rhs.re);
        }
        let n = rhs.norm_sqr();
        let num = self * rhs.conj();
        GaussRat::new(num.re / &n, num.im / &n)
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Scalar for GaussRat {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        GaussRat::from_ints(0, 0)
    }
    fn one() -> Self {
        GaussRat::from_ints(1, 0)
    }
    fn from_i64(v: i64) -> Self {
        GaussRat::from_ints(v, 0)
    }
    fn from_parts(re: &BigRational, im: &BigRational) -> Self {
        GaussRat::new(re.clone(), im.clone())
    }
    fn imag_unit() -> Self {
        GaussRat::from_ints(0, 1)
    }
    fn is_zero(&self) -> bool {
        self.is_zero_exact()
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero_exact()
    }
    fn modulus(&self) -> f64 {
        rational_to_f64(&self.norm_sqr()).sqrt()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn to_exact(&self) -> Option<GaussRat> {
        Some(self.clone())
    }
    fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }
}

impl Scalar for Complex64 {
    const MODE: Mode = Mode::Approx;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_parts(re: &BigRational, im: &BigRational) -> Self {
        Complex64::new(rational_to_f64(re), rational_to_f64(im))
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.norm() <= tolerance() * scale
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn to_exact(&self) -> Option<GaussRat> {
        None
    }
}

/// Random entries for the level-set sampler: small integers in exact mode,
/// standard complex Gaussians in approximate mode.
pub trait RandomScalar: Scalar {
    fn sample<R: rand::Rng + ?Sized>(rng: &mut R) -> Self;
}

/// Inclusive bound on sampled integer entries in exact mode.
pub const SAMPLE_BOUND: i64 = 9;

impl RandomScalar for GaussRat {
    fn sample<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        GaussRat::from_i64(rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND))
    }
}

impl RandomScalar for Complex64 {
    fn sample<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gaussian_arithmetic_is_exact() {
        let a = GaussRat::from_ints(1, 2);
        let b = GaussRat::from_ints(3, -1);
        assert_eq!(a.clone() * b.clone(), GaussRat::from_ints(5, 5));
        assert_eq!((a.clone() * b.clone()) / b, a);
        assert_eq!(GaussRat::imag_unit().square(), -GaussRat::one());
    }

    #[test]
    fn gaussian_sqrt() {
        // (1+2i)^2 = -3+4i
        let r = GaussRat::from_ints(-3, 4).sqrt().unwrap();
        assert_eq!(r.square(), GaussRat::from_ints(-3, 4));
        assert_eq!(
            GaussRat::from_ints(-4, 0).sqrt().unwrap().square(),
            GaussRat::from_ints(-4, 0)
        );
        assert!(GaussRat::from_ints(2, 0).sqrt().is_none());
        assert!(GaussRat::from_ints(0, 1).sqrt().is_none());
        let quarter = GaussRat::new(q(9, 4), q(0, 1)).sqrt().unwrap();
        assert_eq!(quarter, GaussRat::ratio(3, 2));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational("-4").unwrap(), q(-4, 1));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("2.5E2").unwrap(), q(250, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn approx_negligible_is_scale_relative() {
        let tiny = Complex64::new(1e-12, 0.0);
        assert!(tiny.is_negligible(1.0));
        assert!(!tiny.is_negligible(1e-6));
        assert!(!GaussRat::ratio(1, 1_000_000_000).is_negligible(1e12));
    }

    #[test]
    fn default_tolerance_bits() {
        assert_eq!(f64::from_bits(0x3E11_2E0B_E826_D695), DEFAULT_TOLERANCE);
    }
}
