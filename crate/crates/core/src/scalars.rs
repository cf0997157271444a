//! Exact coefficient arithmetic.
//!
//! The "real" field k₀ is the rationals and the "complex" field k₁ = k₀(i)
//! is the Gaussian rationals. p-adic numbers carry explicit precision, and
//! [`TruncatedPowerSeries`] houses the base ring k[[ξ]] mod ξ^M.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, the field k₀.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("p-adic result has no certified digits")]
    PrecisionExhausted,
    #[error("operands live over different fields: {0}")]
    FieldMismatch(String),
    #[error("series is not a unit (constant term is zero)")]
    NotAUnit,
    #[error("series needs a zero constant term and invertible linear term")]
    NotReversible,
    #[error("no exact {0}-th root of the leading coefficient in this field")]
    NoRoot(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Exact field arithmetic shared by the rationals and the Gaussian rationals.
pub trait Field:
    Clone
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Result<Self, ScalarError>;
    fn from_i64(n: i64) -> Self;
    /// Image under the inclusion into k₁.
    fn to_gaussian(&self) -> GaussianRational;
    /// An exact n-th root inside the field, when one is easy to certify.
    fn nth_root(&self, n: u32) -> Option<Self>;
    fn parse_scalar(s: &str) -> Result<Self, ScalarError>;

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self.clone() * &rhs.inv()?)
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.is_empty() {
        return Err(ScalarError::Parse("empty rational".into()));
    }
    let ok = t
        .chars()
        .enumerate()
        .all(|(k, c)| c.is_ascii_digit() || c == '/' || (k == 0 && c == '-'));
    if !ok {
        return Err(ScalarError::Parse(format!("invalid rational {t:?}")));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| ScalarError::Parse(format!("invalid numerator in {t:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| ScalarError::Parse(format!("invalid denominator in {t:?}")))?;
    if den.is_zero() {
        return Err(ScalarError::Parse(format!("zero denominator in {t:?}")));
    }
    Ok(Rational::new(num, den))
}

fn exact_int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k.is_multiple_of(2) {
            return None;
        }
        return exact_int_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

impl Field for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        if Zero::is_zero(self) {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn to_gaussian(&self) -> GaussianRational {
        GaussianRational::from_rational(self.clone())
    }
    fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        let num = exact_int_root(self.numer(), n)?;
        let den = exact_int_root(self.denom(), n)?;
        Some(Rational::new(num, den))
    }
    fn parse_scalar(s: &str) -> Result<Self, ScalarError> {
        parse_rational(s)
    }
}

/// Element re + im·i of k₁ = ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        Self { re, im: <Rational as Zero>::zero() }
    }

    pub fn i() -> Self {
        Self::new(<Rational as Zero>::zero(), <Rational as One>::one())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// re² + im², the squared modulus.
    pub fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}
impl<'a> Add<&'a GaussianRational> for GaussianRational {
    type Output = Self;
    fn add(self, rhs: &'a Self) -> Self {
        Self::new(self.re + &rhs.re, self.im + &rhs.im)
    }
}
impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}
impl<'a> Sub<&'a GaussianRational> for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: &'a Self) -> Self {
        Self::new(self.re - &rhs.re, self.im - &rhs.im)
    }
}
impl<'a> Mul<&'a GaussianRational> for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: &'a Self) -> Self {
        if Zero::is_zero(&self.im) {
            return Self::new(&self.re * &rhs.re, &self.re * &rhs.im);
        }
        if Zero::is_zero(&rhs.im) {
            return Self::new(self.re * &rhs.re, self.im * &rhs.re);
        }
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Self::new(re, im)
    }
}
impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self * &rhs
    }
}
impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Field for GaussianRational {
    fn zero() -> Self {
        Self::from_rational(<Rational as Zero>::zero())
    }
    fn one() -> Self {
        Self::from_rational(<Rational as One>::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        let n = self.norm();
        if Zero::is_zero(&n) {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::new(&self.re / &n, -(&self.im / &n)))
    }
    fn from_i64(n: i64) -> Self {
        Self::from_rational(<Rational as Field>::from_i64(n))
    }
    fn to_gaussian(&self) -> GaussianRational {
        self.clone()
    }
    fn nth_root(&self, n: u32) -> Option<Self> {
        if self.is_real() {
            self.re.nth_root(n).map(Self::from_rational)
        } else if n == 1 {
            Some(self.clone())
        } else {
            None
        }
    }
    fn parse_scalar(s: &str) -> Result<Self, ScalarError> {
        s.parse()
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            return write!(f, "{}", self.re);
        }
        if Zero::is_zero(&self.re) {
            return write!(f, "{}*i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

/// Coefficient of an imaginary term such as `i`, `-3i/4`, `3/4*i`, `i/2`.
fn parse_imaginary(term: &str) -> Result<Rational, ScalarError> {
    if term.matches('i').count() != 1 {
        return Err(ScalarError::Parse(format!("malformed imaginary term {term:?}")));
    }
    let (sign, body) = match term.strip_prefix('-') {
        Some(b) => ("-", b),
        None => ("", term.strip_prefix('+').unwrap_or(term)),
    };
    let body = body.replacen("*i", "", 1).replacen("i*", "", 1).replacen('i', "", 1);
    let body = if body.is_empty() || body.starts_with('/') { format!("1{body}") } else { body };
    parse_rational(&format!("{sign}{body}"))
}

impl FromStr for GaussianRational {
    type Err = ScalarError;

    /// Sums of rational and imaginary terms: `1/3`, `i/2`, `1/3-1/2*i`, `2+3i/4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(ScalarError::Parse("empty scalar".into()));
        }
        let mut cuts: Vec<usize> = t
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .collect();
        if cuts.len() > 1 {
            return Err(ScalarError::Parse(format!("too many terms in {t:?}")));
        }
        cuts.insert(0, 0);
        cuts.push(t.len());
        let (mut re, mut im) = (<Rational as Zero>::zero(), <Rational as Zero>::zero());
        for w in cuts.windows(2) {
            let term = &t[w[0]..w[1]];
            if term.contains('i') {
                im += parse_imaginary(term)?;
            } else {
                re += parse_rational(term)?;
            }
        }
        Ok(Self::new(re, im))
    }
}

/// The pair k₀ ⊂ k₁ with basis {1, i} of k₁ over k₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FieldPair;

impl FieldPair {
    /// Coordinates of a k₁ element over the basis {1, i}.
    pub fn split(z: &GaussianRational) -> (Rational, Rational) {
        (z.re.clone(), z.im.clone())
    }

    pub fn join(re: Rational, im: Rational) -> GaussianRational {
        GaussianRational::new(re, im)
    }
}

/// u·p^v known modulo p^(v+N).
///
/// A value with `prec == 0` is a zero known only modulo p^`val`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdic {
    p: u64,
    val: i64,
    unit: BigInt,
    prec: u32,
}

fn p_valuation(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    (v, n)
}

fn pow_p(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

impl PAdic {
    /// Zero known modulo p^abs_prec.
    pub fn zero(p: u64, abs_prec: i64) -> Self {
        Self { p, val: abs_prec, unit: BigInt::zero(), prec: 0 }
    }

    pub fn from_integer(n: &BigInt, p: u64, prec: u32) -> Self {
        Self::from_rational(&Rational::from_integer(n.clone()), p, prec)
    }

    /// The p-adic expansion of a rational to `prec` relative digits.
    pub fn from_rational(q: &Rational, p: u64, prec: u32) -> Self {
        assert!(p >= 2, "p-adic prime must be at least 2");
        let pb = BigInt::from(p);
        if Zero::is_zero(q) || prec == 0 {
            return Self::zero(p, prec as i64);
        }
        let (vn, un) = p_valuation(q.numer(), &pb);
        let (vd, ud) = p_valuation(q.denom(), &pb);
        let modulus = pow_p(p, prec);
        let inv = mod_inverse(&ud, &modulus).expect("denominator unit is invertible");
        let unit = (un * inv).mod_floor(&modulus);
        Self { p, val: vn as i64 - vd as i64, unit, prec }
    }

    /// Builds u·p^v from base-p digits of the unit, least significant first.
    pub fn from_digits(p: u64, val: i64, digits: &[u64]) -> Result<Self, ScalarError> {
        if p < 2 {
            return Err(ScalarError::Parse("p-adic prime must be at least 2".into()));
        }
        if digits.iter().any(|&d| d >= p) {
            return Err(ScalarError::Parse(format!("digit out of range for p = {p}")));
        }
        let mut n = BigInt::zero();
        for &d in digits.iter().rev() {
            n = n * p + d;
        }
        let prec = digits.len() as u32;
        if n.is_zero() {
            return Ok(Self::zero(p, val + prec as i64));
        }
        let (shift, unit) = p_valuation(&n, &BigInt::from(p));
        Ok(Self { p, val: val + shift as i64, unit, prec: prec - shift })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    /// Valuation; for a zero this is the absolute precision.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn relative_precision(&self) -> u32 {
        self.prec
    }

    /// Exponent e such that the value is known modulo p^e.
    pub fn absolute_precision(&self) -> i64 {
        self.val + self.prec as i64
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Base-p digits of the unit, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        let pb = BigInt::from(self.p);
        let mut n = self.unit.clone();
        (0..self.prec)
            .map(|_| {
                let (q, r) = n.div_mod_floor(&pb);
                n = q;
                r.to_u64().expect("digit fits")
            })
            .collect()
    }

    fn check_prime(&self, other: &Self) -> Result<(), ScalarError> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch(format!("{}-adic vs {}-adic", self.p, other.p)))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check_prime(other)?;
        let abs = self.absolute_precision().min(other.absolute_precision());
        let terms: Vec<&Self> = [self, other]
            .into_iter()
            .filter(|x| !x.is_zero() && x.val < abs)
            .collect();
        let Some(m) = terms.iter().map(|x| x.val).min() else {
            return Ok(Self::zero(self.p, abs));
        };
        let width = (abs - m) as u32;
        let modulus = pow_p(self.p, width);
        let mut s = BigInt::zero();
        for x in terms {
            s += &x.unit * pow_p(self.p, (x.val - m) as u32);
        }
        let s = s.mod_floor(&modulus);
        if s.is_zero() {
            return Ok(Self::zero(self.p, abs));
        }
        let (shift, unit) = p_valuation(&s, &BigInt::from(self.p));
        let prec = width - shift;
        Ok(Self { p: self.p, val: m + shift as i64, unit: unit.mod_floor(&pow_p(self.p, prec)), prec })
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let modulus = pow_p(self.p, self.prec);
        Self { unit: (-&self.unit).mod_floor(&modulus), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check_prime(other)?;
        Ok(match (self.is_zero(), other.is_zero()) {
            (true, true) => Self::zero(self.p, self.val + other.val),
            (true, false) => Self::zero(self.p, self.val + other.val),
            (false, true) => Self::zero(self.p, self.val + other.val),
            (false, false) => {
                let prec = self.prec.min(other.prec);
                let modulus = pow_p(self.p, prec);
                Self {
                    p: self.p,
                    val: self.val + other.val,
                    unit: (&self.unit * &other.unit).mod_floor(&modulus),
                    prec,
                }
            }
        })
    }

    /// Division keeps the smaller relative precision; absolute precision
    /// drops by the divisor's valuation.
    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check_prime(other)?;
        if other.is_zero() {
            return Err(ScalarError::PrecisionExhausted);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.p, self.val - other.val));
        }
        let prec = self.prec.min(other.prec);
        let modulus = pow_p(self.p, prec);
        let inv = mod_inverse(&other.unit, &modulus).expect("unit is invertible");
        Ok(Self {
            p: self.p,
            val: self.val - other.val,
            unit: (&self.unit * inv).mod_floor(&modulus),
            prec,
        })
    }

    /// The rational u·p^v with u the stored unit representative.
    pub fn to_rational(&self) -> Rational {
        if self.is_zero() {
            return <Rational as Zero>::zero();
        }
        let pb = Rational::from_integer(BigInt::from(self.p));
        Rational::from_integer(self.unit.clone()) * num_traits::pow::Pow::pow(&pb, self.val)
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 + O({}^{})", self.p, self.val);
        }
        let digits: Vec<String> = self.digits().iter().map(u64::to_string).collect();
        write!(
            f,
            "[{}] * {}^{} + O({}^{})",
            digits.join(", "),
            self.p,
            self.val,
            self.p,
            self.absolute_precision()
        )
    }
}

fn parse_power(s: &str) -> Result<(u64, i64), ScalarError> {
    let (b, e) = s
        .trim()
        .split_once('^')
        .ok_or_else(|| ScalarError::Parse(format!("expected p^e, got {s:?}")))?;
    let e = e.trim().trim_start_matches('(').trim_end_matches(')');
    let b: u64 = b.trim().parse().map_err(|_| ScalarError::Parse(format!("bad prime {b:?}")))?;
    let e: i64 = e.trim().parse().map_err(|_| ScalarError::Parse(format!("bad exponent {e:?}")))?;
    Ok((b, e))
}

impl FromStr for PAdic {
    type Err = ScalarError;

    /// Accepts the display form `[d0, d1, ...] * p^v + O(p^w)` or `0 + O(p^w)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (value, big_o) = s
            .rsplit_once("+ O(")
            .or_else(|| s.rsplit_once("+O("))
            .ok_or_else(|| ScalarError::Parse("missing O(p^e) term".into()))?;
        let big_o = big_o
            .trim()
            .strip_suffix(')')
            .ok_or_else(|| ScalarError::Parse("unclosed O(".into()))?;
        let (p, abs) = parse_power(big_o)?;
        if p < 2 {
            return Err(ScalarError::Parse("p-adic prime must be at least 2".into()));
        }
        let value = value.trim();
        if value == "0" {
            return Ok(Self::zero(p, abs));
        }
        let (digits, power) = value
            .split_once('*')
            .ok_or_else(|| ScalarError::Parse("expected [digits] * p^v".into()))?;
        let (q, v) = parse_power(power)?;
        if q != p {
            return Err(ScalarError::Parse("prime mismatch between value and O-term".into()));
        }
        let inner = digits
            .trim()
            .strip_prefix('[')
            .and_then(|d| d.strip_suffix(']'))
            .ok_or_else(|| ScalarError::Parse("digits must be bracketed".into()))?;
        let digits: Vec<u64> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|d| d.trim().parse::<u64>().map_err(|_| ScalarError::Parse(format!("bad digit {d:?}"))))
                .collect::<Result<_, _>>()?
        };
        if v.checked_add(digits.len() as i64) != Some(abs) {
            return Err(ScalarError::Parse("precision does not match digit count".into()));
        }
        Self::from_digits(p, v, &digits)
    }
}

/// Any scalar the library can print or parse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactScalar {
    Rational(Rational),
    Gaussian(GaussianRational),
    PAdic(PAdic),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn field_arith<F: Field>(x: F, y: &F, op: ArithOp) -> Result<F, ScalarError> {
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => x.div(y)?,
    })
}

/// Exact binary arithmetic; rationals are promoted into k₁ when mixed with
/// Gaussian rationals, p-adics only combine with p-adics of the same prime.
pub fn scalar_arith(x: &ExactScalar, y: &ExactScalar, op: ArithOp) -> Result<ExactScalar, ScalarError> {
    use ExactScalar as S;
    match (x, y) {
        (S::Rational(a), S::Rational(b)) => field_arith(a.clone(), b, op).map(S::Rational),
        (S::PAdic(a), S::PAdic(b)) => match op {
            ArithOp::Add => a.add(b),
            ArithOp::Sub => a.sub(b),
            ArithOp::Mul => a.mul(b),
            ArithOp::Div => a.div(b),
        }
        .map(S::PAdic),
        (S::PAdic(_), _) | (_, S::PAdic(_)) => {
            Err(ScalarError::FieldMismatch("p-adic mixed with an archimedean scalar".into()))
        }
        _ => {
            let a = x.to_gaussian().expect("not p-adic");
            let b = y.to_gaussian().expect("not p-adic");
            field_arith(a, &b, op).map(S::Gaussian)
        }
    }
}

impl ExactScalar {
    fn to_gaussian(&self) -> Option<GaussianRational> {
        match self {
            ExactScalar::Rational(q) => Some(GaussianRational::from_rational(q.clone())),
            ExactScalar::Gaussian(z) => Some(z.clone()),
            ExactScalar::PAdic(_) => None,
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(q) => write!(f, "{q}"),
            ExactScalar::Gaussian(z) => write!(f, "{z}"),
            ExactScalar::PAdic(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for ExactScalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains("O(") {
            s.parse().map(ExactScalar::PAdic)
        } else if s.trim_end().ends_with('i') {
            s.parse().map(ExactScalar::Gaussian)
        } else {
            parse_rational(s).map(ExactScalar::Rational)
        }
    }
}

/// Σ a_j ξ^j + O(ξ^M).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPowerSeries<F> {
    coeffs: Vec<F>,
}

impl<F: Field> TruncatedPowerSeries<F> {
    /// Coefficients beyond `order` are dropped, missing ones are zero.
    pub fn new(mut coeffs: Vec<F>, order: usize) -> Self {
        assert!(order > 0, "truncation order must be positive");
        coeffs.resize(order, F::zero());
        Self { coeffs }
    }

    pub fn constant(c: F, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// ξ itself.
    pub fn xi(order: usize) -> Self {
        Self::new(vec![F::zero(), F::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> F {
        self.coeffs.get(j).cloned().unwrap_or_else(F::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..order.min(self.order())].to_vec(), order.min(self.order()))
    }

    /// ξ-adic valuation, `None` when every known coefficient vanishes.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        Self::new((0..m).map(|j| self.coeffs[j].clone() + &other.coeffs[j]).collect(), m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        Self::new((0..m).map(|j| self.coeffs[j].clone() - &other.coeffs[j]).collect(), m)
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().cloned().map(Neg::neg).collect() }
    }

    pub fn scale(&self, c: &F) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a.clone() * c).collect() }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        let mut out = vec![F::zero(); m];
        for (i, a) in self.coeffs.iter().take(m).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(m - i).enumerate() {
                out[i + j] = out[i + j].clone() + &(a.clone() * b);
            }
        }
        Self { coeffs: out }
    }

    /// Multiplication by ξ^k; the known window grows by k.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Division by ξ^k for a series of valuation at least k.
    pub fn unshift(&self, k: usize) -> Option<Self> {
        if k >= self.order() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self { coeffs: self.coeffs[k..].to_vec() })
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(F::one(), self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        let a0_inv = self.coeffs[0].inv().map_err(|_| ScalarError::NotAUnit)?;
        let m = self.order();
        let mut out: Vec<F> = Vec::with_capacity(m);
        out.push(a0_inv.clone());
        for k in 1..m {
            let mut s = F::zero();
            for j in 1..=k {
                s = s + &(self.coeffs[j].clone() * &out[k - j]);
            }
            out.push(-(s * &a0_inv));
        }
        Ok(Self { coeffs: out })
    }

    /// The edge map ξ ↦ 0.
    pub fn theta(&self) -> F {
        self.coeffs[0].clone()
    }

    /// Polynomial evaluation of the known coefficients at a series `g`
    /// with zero constant term.
    pub fn compose(&self, g: &Self) -> Result<Self, ScalarError> {
        if !g.coeffs[0].is_zero() {
            return Err(ScalarError::NotReversible);
        }
        let m = self.order().min(g.order());
        let g = g.truncate(m);
        let mut acc = Self::constant(F::zero(), m);
        for c in self.coeffs[..m].iter().rev() {
            acc = acc.mul(&g).add(&Self::constant(c.clone(), m));
        }
        Ok(acc)
    }

    /// Compositional inverse: h with self(h(x)) = x.
    pub fn reversion(&self) -> Result<Self, ScalarError> {
        let m = self.order();
        if m < 2 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(ScalarError::NotReversible);
        }
        // self = x·w(x); iterate h ← x / w(h), gaining a coefficient per pass
        let w = self.unshift(1).expect("valuation one");
        let x = Self::xi(m);
        let mut h = x.scale(&self.coeffs[1].inv()?);
        for _ in 0..m {
            let wh = Self::new(w.coeffs.clone(), m).compose(&h)?;
            h = x.mul(&wh.inv()?);
        }
        Ok(h)
    }

    /// An n-th root with constant term a chosen root of a₀.
    pub fn nth_root(&self, n: u32) -> Result<Self, ScalarError> {
        if n == 1 {
            return Ok(self.clone());
        }
        let r0 = self.coeffs[0].nth_root(n).ok_or(ScalarError::NoRoot(n))?;
        if r0.is_zero() {
            return Err(ScalarError::NotAUnit);
        }
        let m = self.order();
        let mut root = Self::constant(r0.clone(), m);
        // n·r0^(n-1)·r_k is the only contribution of r_k to coefficient k of root^n
        let denom = (F::from_i64(n as i64) * &Self::constant(r0, 1).pow(n as usize - 1).coeffs[0]).inv()?;
        for k in 1..m {
            let current = root.pow(n as usize);
            let defect = self.coeffs[k].clone() - &current.coeffs[k];
            root.coeffs[k] = defect * &denom;
        }
        Ok(root)
    }
}

impl<F: Field> fmt::Display for TruncatedPowerSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}] + O(xi^{})", parts.join(", "), self.order())
    }
}

impl<F: Field> FromStr for TruncatedPowerSeries<F> {
    type Err = ScalarError;

    /// Parses `[a0, a1, ...] + O(xi^M)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (list, big_o) = s
            .rsplit_once('+')
            .ok_or_else(|| ScalarError::Parse("missing O(xi^M) marker".into()))?;
        let big_o = big_o.trim();
        let m = big_o
            .strip_prefix("O(xi^")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| ScalarError::Parse(format!("bad order marker {big_o:?}")))?;
        let m: usize = m.trim().parse().map_err(|_| ScalarError::Parse(format!("bad order {m:?}")))?;
        if m == 0 || m > 4096 {
            return Err(ScalarError::Parse("order must be in 1..=4096".into()));
        }
        let inner = list
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| ScalarError::Parse("coefficients must be bracketed".into()))?;
        let coeffs: Vec<F> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(F::parse_scalar).collect::<Result<_, _>>()?
        };
        if coeffs.len() > m {
            return Err(ScalarError::Parse("more coefficients than the truncation order".into()));
        }
        Ok(Self::new(coeffs, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = Rational;
    type Qi = GaussianRational;
    type Tps = TruncatedPowerSeries<Q>;

    fn q(n: i64, d: i64) -> Q {
        rational(n, d)
    }

    fn qi(a: (i64, i64), b: (i64, i64)) -> Qi {
        Qi::new(q(a.0, a.1), q(b.0, b.1))
    }

    fn tps(c: &[i64], m: usize) -> Tps {
        Tps::new(c.iter().map(|&x| <Q as Field>::from_i64(x)).collect(), m)
    }

    #[test]
    fn gaussian_norm_product() {
        let a = qi((1, 2), (1, 1));
        assert_eq!(a.clone() * a.conj(), Qi::from_rational(q(5, 4)));
    }

    #[test]
    fn five_adic_third() {
        let one = PAdic::from_integer(&BigInt::from(1), 5, 4);
        let three = PAdic::from_integer(&BigInt::from(3), 5, 4);
        let x = one.div(&three).unwrap();
        assert_eq!(x.digits(), vec![2, 3, 1, 3]);
        assert_eq!(x.valuation(), 0);
        // oracle: 3·x ≡ 1 mod 5^4
        assert_eq!((x.unit() * BigInt::from(3)).mod_floor(&BigInt::from(625)), BigInt::from(1));
    }

    #[test]
    fn padic_cancellation_keeps_absolute_precision() {
        let x = PAdic::from_rational(&q(7, 3), 5, 6);
        let z = x.sub(&x).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.absolute_precision(), 6);
        assert_eq!(z.to_string(), "0 + O(5^6)");
        // 26 - 1 = 25: valuation jumps, relative precision shrinks
        let a = PAdic::from_integer(&BigInt::from(26), 5, 4);
        let b = PAdic::from_integer(&BigInt::from(1), 5, 4);
        let d = a.sub(&b).unwrap();
        assert_eq!(d.valuation(), 2);
        assert_eq!(d.relative_precision(), 2);
    }

    #[test]
    fn padic_division_by_unknown_zero() {
        let x = PAdic::from_integer(&BigInt::from(3), 5, 4);
        assert_eq!(x.div(&PAdic::zero(5, 3)), Err(ScalarError::PrecisionExhausted));
        let y = PAdic::from_integer(&BigInt::from(3), 7, 4);
        assert!(matches!(x.add(&y), Err(ScalarError::FieldMismatch(_))));
    }

    #[test]
    fn padic_division_shifts_valuation() {
        let x = PAdic::from_integer(&BigInt::from(2), 5, 4);
        let y = PAdic::from_integer(&BigInt::from(50), 5, 4);
        let r = x.div(&y).unwrap();
        assert_eq!(r.valuation(), -2);
        assert_eq!(r.absolute_precision(), 2);
    }

    #[test]
    fn padic_text_round_trip() {
        let x = PAdic::from_rational(&q(-2, 15), 5, 5);
        let s = x.to_string();
        assert_eq!(s.parse::<PAdic>().unwrap(), x);
        assert!("[1, 7] * 5^0 + O(5^2)".parse::<PAdic>().is_err());
        assert!("[1, 2] * 5^0 + O(5^3)".parse::<PAdic>().is_err());
    }

    #[test]
    fn exact_scalar_dispatch() {
        let a: ExactScalar = "1/2+1*i".parse().unwrap();
        let b: ExactScalar = "1/2-1*i".parse().unwrap();
        let p = scalar_arith(&a, &b, ArithOp::Mul).unwrap();
        assert_eq!(p, ExactScalar::Gaussian(Qi::from_rational(q(5, 4))));
        let zero = scalar_arith(&a, &a, ArithOp::Sub).unwrap();
        assert_eq!(zero.to_string(), "0");
        let r: ExactScalar = "3".parse().unwrap();
        assert_eq!(
            scalar_arith(&r, &ExactScalar::Rational(q(0, 1)), ArithOp::Div),
            Err(ScalarError::DivisionByZero)
        );
        let pa: ExactScalar = "[1] * 5^0 + O(5^1)".parse().unwrap();
        assert!(matches!(scalar_arith(&pa, &r, ArithOp::Add), Err(ScalarError::FieldMismatch(_))));
    }

    #[test]
    fn gaussian_parse_forms() {
        assert_eq!("i".parse::<Qi>().unwrap(), Qi::i());
        assert_eq!("-i".parse::<Qi>().unwrap(), -Qi::i());
        assert_eq!("1/2*i".parse::<Qi>().unwrap(), qi((0, 1), (1, 2)));
        assert_eq!("-1/4+1/2*i".parse::<Qi>().unwrap(), qi((-1, 4), (1, 2)));
        assert_eq!("3-2*i".parse::<Qi>().unwrap(), qi((3, 1), (-2, 1)));
        assert_eq!("i/2".parse::<Qi>().unwrap(), qi((0, 1), (1, 2)));
        assert_eq!("1/3+3i/4".parse::<Qi>().unwrap(), qi((1, 3), (3, 4)));
        assert!("1+i+i".parse::<Qi>().is_err());
        assert!("ii".parse::<Qi>().is_err());
        assert!("1/0".parse::<Qi>().is_err());
        assert!("2*j".parse::<Qi>().is_err());
    }

    #[test]
    fn tps_products() {
        assert_eq!(tps(&[1, 1], 4).mul(&tps(&[1, -1], 4)), tps(&[1, 0, -1], 4));
        assert_eq!(tps(&[1, 1, 1, 1, 1], 5).mul(&tps(&[1, -1], 5)), tps(&[1], 5));
        let xi = Tps::xi(2);
        assert_eq!(xi.mul(&xi), tps(&[], 2));
        assert_eq!(tps(&[1, 2], 3).mul(&tps(&[1], 7)).order(), 3);
    }

    #[test]
    fn tps_inverses() {
        assert_eq!(tps(&[1, -1], 4).inv().unwrap(), tps(&[1, 1, 1, 1], 4));
        assert_eq!(tps(&[2], 3).inv().unwrap(), Tps::constant(q(1, 2), 3));
        assert_eq!(Tps::xi(4).inv(), Err(ScalarError::NotAUnit));
    }

    #[test]
    fn theta_values() {
        assert_eq!(tps(&[1, 3], 4).theta(), q(1, 1));
        assert_eq!(Tps::xi(4).theta(), q(0, 1));
    }

    #[test]
    fn reversion_of_xi_plus_xi_squared() {
        // ξ = τ − τ² + 2τ³ − 5τ⁴ + … (Catalan numbers with signs)
        let tau = tps(&[0, 1, 1], 8);
        let xi = tau.reversion().unwrap();
        assert_eq!(xi, tps(&[0, 1, -1, 2, -5, 14, -42, 132], 8));
        assert_eq!(tau.compose(&xi).unwrap(), Tps::xi(8));
    }

    #[test]
    fn square_root_of_one_plus_xi() {
        let w = tps(&[1, 1], 6);
        let r = w.nth_root(2).unwrap();
        assert_eq!(r.coeffs()[..3], [q(1, 1), q(1, 2), q(-1, 8)]);
        assert_eq!(r.mul(&r), w);
        assert_eq!(tps(&[2, 1], 3).nth_root(2), Err(ScalarError::NoRoot(2)));
    }

    #[test]
    fn tps_text_round_trip() {
        let f = TruncatedPowerSeries::<Qi>::new(vec![Qi::i(), Qi::from_rational(q(-3, 2))], 4);
        let s = f.to_string();
        assert_eq!(s, "[1*i, -3/2, 0, 0] + O(xi^4)");
        assert_eq!(s.parse::<TruncatedPowerSeries<Qi>>().unwrap(), f);
        assert!("[1, 2, 3] + O(xi^2)".parse::<Tps>().is_err());
    }

    fn small_q() -> impl Strategy<Value = Q> {
        (-20i64..20, 1i64..12).prop_map(|(n, d)| q(n, d))
    }

    fn small_qi() -> impl Strategy<Value = Qi> {
        (small_q(), small_q()).prop_map(|(a, b)| Qi::new(a, b))
    }

    proptest! {
        #[test]
        fn gaussian_field_axioms(a in small_qi(), b in small_qi(), c in small_qi()) {
            prop_assert_eq!((a.clone() * &b) * &c, a.clone() * &(b.clone() * &c));
            prop_assert_eq!(a.clone() * &(b.clone() + &c), a.clone() * &b + &(a.clone() * &c));
            prop_assert_eq!(a.clone() - &a, Qi::zero());
            if !a.is_zero() {
                prop_assert_eq!(a.clone() * &a.inv().unwrap(), Qi::one());
            }
            prop_assert_eq!(a.to_string().parse::<Qi>().unwrap(), a);
        }

        #[test]
        fn padic_matches_modular_integers(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            let p = 7u64;
            let n = 5u32;
            let pa = PAdic::from_integer(&BigInt::from(a), p, n + 6);
            let pb = PAdic::from_integer(&BigInt::from(b), p, n + 6);
            let modulus = BigInt::from(7i64.pow(n));
            for (r, expect) in [(pa.add(&pb).unwrap(), a + b), (pa.mul(&pb).unwrap(), a * b), (pa.sub(&pb).unwrap(), a - b)] {
                if r.absolute_precision() >= n as i64 {
                    let got = r.to_rational();
                    prop_assert!(got.is_integer());
                    prop_assert_eq!(got.to_integer().mod_floor(&modulus), BigInt::from(expect).mod_floor(&modulus));
                }
            }
        }

        #[test]
        fn theta_of_inverse(c in proptest::collection::vec(small_q(), 1..6)) {
            let f = Tps::new(c, 6);
            if f.is_unit() {
                prop_assert_eq!(f.inv().unwrap().theta(), f.theta().inv().unwrap());
            }
        }
    }
}
