//! Integer Laurent series converging on a disc of radius > r.
//!
//! Elements are rational functions T^s·num/den (den(0) = 1 after
//! normalization) or series with an explicit head and a geometric tail bound
//! |a_k| ≤ C·s^(−k) for k > K. Coefficients are rationals; each element
//! reports whether it actually has integer coefficients.
//!
//! Radii are compared through their squares so that complex-conjugate
//! pairs (|z|² = d₀/d₂) stay exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use thiserror::Error;

use crate::periodic::{BaseField, PeriodicError, Tps, TwoPeriodicPresentation};
use crate::scalars::{rational, Field, GaussianRational, Rational, ScalarError};

pub type Qi = GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarbaterError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("element has a pole at {0}")]
    PoleAtPoint(String),
    #[error("element is not certified to converge beyond radius {0}")]
    NotMember(String),
    #[error("point {0} lies outside the disc of radius {1}")]
    PointOutsideDisc(String, String),
    #[error("radius must satisfy 0 < r < 1, got {0}")]
    BadRadius(String),
    #[error("nonzero remainder dividing by {0}")]
    NotDivisible(String),
    #[error("cannot certify the radius of the quotient: {0}")]
    RadiusNotCertified(String),
    #[error("{0} is not a simple root of its kernel generator")]
    NotSimpleRoot(String),
    #[error("operation needs an exact rational function")]
    NeedsRationalFunction,
    #[error("tail bound does not converge at this point")]
    TailDiverges,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Periodic(#[from] PeriodicError),
}

// ---------------------------------------------------------------- polynomials

/// Dense polynomial over ℚ, ascending coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Self(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rational(x, 1)).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn t() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn one() -> Self {
        Self::from_ints(&[1])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Degree; −1 never occurs since callers check `is_zero`.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.0.iter().map(|c| c.clone() * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = out[i + j].clone() + &(a.clone() * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::zero(); k];
        c.extend(self.0.iter().cloned());
        Self(c)
    }

    /// Number of leading zero coefficients (the T-adic valuation).
    pub fn low_order(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut rem = self.0.clone();
        let dl = d.lead();
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = rem[k + dd].clone() / &dl;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    rem[k + i] = rem[k + i].clone() - &(c.clone() * dc);
                }
            }
            q[k] = c;
        }
        (Self::new(q), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &Qi) -> Qi {
        self.0.iter().rev().fold(Qi::zero(), |acc, c| acc * x + &Qi::from_rational(c.clone()))
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c.clone() * rational(k as i64, 1)).collect())
    }

    /// Coefficients of p(x + δ) as a polynomial in δ.
    pub fn taylor_shift(&self, x: &Qi) -> Vec<Qi> {
        let mut out: Vec<Qi> = self.0.iter().map(|c| Qi::from_rational(c.clone())).collect();
        let n = out.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                out[k] = out[k].clone() + &(out[k + 1].clone() * x);
            }
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    /// Primitive integer multiple with positive leading coefficient.
    pub fn primitive(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self.0.iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let content = ints.iter().fold(BigInt::from(0), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) { -1 } else { 1 };
        ints.into_iter().map(|c| c / &content * sign).collect()
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().map(|x| Rational::from_integer(x.clone())).collect())
    }
}

fn write_monomial(out: &mut String, c: &Rational, k: usize, var: &str) {
    let neg = c.is_negative();
    let a = c.abs();
    let body = match (k, a == Rational::one()) {
        (0, _) => a.to_string(),
        (_, true) if k == 1 => var.to_string(),
        (_, true) => format!("{var}^{k}"),
        (1, false) => format!("{a}*{var}"),
        _ => format!("{a}*{var}^{k}"),
    };
    if out.is_empty() {
        out.push_str(if neg { "-" } else { "" });
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    out.push_str(&body);
}

impl fmt::Display for Poly {
    /// Ascending powers: `1/2 - T + 3*T^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, c) in self.0.iter().enumerate() {
            if !c.is_zero() {
                write_monomial(&mut out, c, k, "T");
            }
        }
        write!(f, "{out}")
    }
}

// ------------------------------------------------------------ rational sqrt

/// Rational bounds lo ≤ √q ≤ hi with 2^(−bits) resolution (exact when q is a square).
pub fn sqrt_bounds(q: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!q.is_negative(), "square root of a negative number");
    let (n, d) = (q.numer(), q.denom());
    let nd = n * d;
    let r = nd.sqrt();
    if &r * &r == nd {
        let exact = Rational::new(r, d.clone());
        return (exact.clone(), exact);
    }
    let scale = BigInt::from(1) << bits;
    let s = (&nd * &scale * &scale).sqrt();
    let den = d * &scale;
    (Rational::new(s.clone(), den.clone()), Rational::new(s + 1, den))
}


// --------------------------------------------------------------- elements

/// T^shift·num/den. The denominator is kept as a list of factors with
/// constant term 1 so that certificates survive products.
#[derive(Debug, Clone)]
pub struct RationalFn {
    shift: i64,
    num: Poly,
    den: Poly,
    factors: Vec<Poly>,
}

impl PartialEq for RationalFn {
    fn eq(&self, o: &Self) -> bool {
        self.shift == o.shift && self.num == o.num && self.den == o.den
    }
}

impl Eq for RationalFn {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedSeries {
    /// a_{−1}, a_{−2}, …
    pub pole: Vec<Rational>,
    /// a_0, …, a_K
    pub head: Vec<Rational>,
    pub bound: Rational,
    pub s: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HarbaterElement {
    RationalFn(RationalFn),
    Series(CertifiedSeries),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientRing {
    Integer,
    Rational,
}

impl RationalFn {
    /// T^shift·num/den, reduced with den(0) = 1.
    pub fn new(num: Poly, den: Poly, shift: i64) -> Result<Self, HarbaterError> {
        Self::from_factors(num, vec![den], shift)
    }

    /// T^shift·num/∏factors, reduced.
    pub fn from_factors(num: Poly, factors: Vec<Poly>, shift: i64) -> Result<Self, HarbaterError> {
        if factors.iter().any(Poly::is_zero) {
            return Err(HarbaterError::Parse("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(Self { shift: 0, num: Poly::zero(), den: Poly::one(), factors: Vec::new() });
        }
        let (mut num, mut shift) = (num, shift);
        let mut fs = Vec::new();
        for f in factors {
            let low = f.low_order();
            shift -= low as i64;
            let f = Poly::new(f.0[low..].to_vec());
            let c = f.coeff(0);
            num = num.scale(&(Rational::one() / &c));
            if f.degree() > 0 {
                fs.push(f.scale(&(Rational::one() / c)));
            }
        }
        for f in fs.iter_mut() {
            let g = num.gcd(f);
            if g.degree() > 0 {
                let g = g.scale(&(Rational::one() / g.coeff(0)));
                num = num.divrem(&g).0;
                *f = f.divrem(&g).0;
            }
        }
        fs.retain(|f| f.degree() > 0);
        let low = num.low_order();
        num = Poly::new(num.0[low..].to_vec());
        shift += low as i64;
        let den = fs.iter().fold(Poly::one(), |acc, f| acc.mul(f));
        Ok(Self { shift, num, den, factors: fs })
    }

    pub fn polynomial(p: Poly) -> Self {
        Self::new(p, Poly::one(), 0).expect("nonzero denominator")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn den_factors(&self) -> &[Poly] {
        &self.factors
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn ring(&self) -> CoefficientRing {
        if self.num.is_integral() && self.den.is_integral() {
            CoefficientRing::Integer
        } else {
            CoefficientRing::Rational
        }
    }

    fn split_shift(a: &Self, b: &Self) -> (Poly, Poly, i64) {
        let s = a.shift.min(b.shift);
        (a.num.shift((a.shift - s) as usize), b.num.shift((b.shift - s) as usize), s)
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b, s) = Self::split_shift(self, o);
        // common denominator: multiset union of the factor lists
        let mut unmatched = self.factors.clone();
        let mut missing = Vec::new();
        for f in &o.factors {
            match unmatched.iter().position(|g| g == f) {
                Some(k) => {
                    unmatched.remove(k);
                }
                None => missing.push(f.clone()),
            }
        }
        let prod = |fs: &[Poly]| fs.iter().fold(Poly::one(), |acc, f| acc.mul(f));
        let num = a.mul(&prod(&missing)).add(&b.mul(&prod(&unmatched)));
        let mut factors = self.factors.clone();
        factors.extend(missing);
        Self::from_factors(num, factors, s).expect("nonzero denominator")
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), ..self.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let factors = self.factors.iter().chain(&o.factors).cloned().collect();
        Self::from_factors(self.num.mul(&o.num), factors, self.shift + o.shift).expect("nonzero denominator")
    }

    pub fn div(&self, o: &Self) -> Result<Self, HarbaterError> {
        if o.num.is_zero() {
            return Err(HarbaterError::Parse("division by zero".into()));
        }
        let mut factors = self.factors.clone();
        factors.push(o.num.clone());
        Self::from_factors(self.num.mul(&o.den), factors, self.shift - o.shift)
    }

    /// Per-factor certificates: exact roots up to degree 2, the classical bound above.
    fn factor_certificates(&self) -> Vec<(RadiusCertificate, Option<Witness>)> {
        self.factors
            .iter()
            .map(|f| if f.degree() <= 2 { small_roots(f) } else { (classical_bound(f), None) })
            .collect()
    }

    /// Laurent coefficients a_k for k = shift, shift+1, …, as (first exponent, values).
    pub fn coefficients(&self, count: usize) -> (i64, Vec<Rational>) {
        let q = self.den.0.len();
        let mut a: Vec<Rational> = Vec::with_capacity(count);
        for k in 0..count {
            let mut v = self.num.coeff(k);
            for i in 1..q.min(k + 1) {
                v -= self.den.0[i].clone() * &a[k - i];
            }
            a.push(v);
        }
        (self.shift, a)
    }

    /// Cauchy-type s: the largest dyadic s with Σ_{i≥1} |d_i|·s^i ≤ 1.
    fn recurrence_radius(&self) -> Option<Rational> {
        if self.den.degree() == 0 {
            return None;
        }
        let phi = |s: &Rational| -> Rational {
            self.den.0.iter().skip(1).rev().fold(Rational::zero(), |acc, c| (acc + c.abs()) * s)
        };
        let one = Rational::one();
        let mut hi = one.clone();
        while phi(&hi) <= one {
            hi *= rational(2, 1);
        }
        let mut lo = Rational::zero();
        for _ in 0..48 {
            let mid = (lo.clone() + &hi) / rational(2, 1);
            if phi(&mid) <= one {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    /// The same element as a certified series with head a_0..a_K (K ≥ `head`).
    pub fn to_series(&self, head: usize) -> CertifiedSeries {
        // T^shift·g with g = Σ b_m T^m; a_e = b_{e − shift}
        let window = self.num.degree().max(self.den.degree()) + 1;
        let count = (head as i64 + 1 - self.shift).max(window as i64) as usize;
        let (_, b) = self.coefficients(count);
        let at = |e: i64| -> Rational {
            let m = e - self.shift;
            if m < 0 {
                Rational::zero()
            } else {
                b.get(m as usize).cloned().unwrap_or_else(Rational::zero)
            }
        };
        let pole: Vec<Rational> = (1..=(-self.shift).max(0)).map(|k| at(-k)).collect();
        let top = (count as i64 + self.shift - 1).max(head as i64);
        let head: Vec<Rational> = (0..=top).map(at).collect();
        let Some(s) = self.recurrence_radius() else {
            return CertifiedSeries { pole, head, bound: Rational::zero(), s: Rational::one() };
        };
        // |b_m| ≤ C_g s^(−m) by induction once C_g covers a full recurrence window
        let cg = b
            .iter()
            .enumerate()
            .map(|(m, c)| c.abs() * num_traits::pow(s.clone(), m))
            .max()
            .unwrap_or_else(Rational::zero);
        let sp = num_traits::pow(s.clone(), self.shift.unsigned_abs() as usize);
        let bound = if self.shift >= 0 { cg * sp } else { cg / sp };
        CertifiedSeries { pole, head, bound, s }
    }
}

impl CertifiedSeries {
    pub fn ring(&self) -> CoefficientRing {
        if self.pole.iter().chain(&self.head).all(|c| c.is_integer()) {
            CoefficientRing::Integer
        } else {
            CoefficientRing::Rational
        }
    }

    fn top_index(&self) -> usize {
        self.head.len().saturating_sub(1)
    }

    /// A uniform bound A with |a_k| ≤ A·s^(−k) for all k ≥ 0, at radius `s` ≤ self.s.
    fn uniform_bound(&self, s: &Rational) -> Rational {
        let mut a = self.bound.clone();
        for (k, c) in self.head.iter().enumerate() {
            let w = c.abs() * num_traits::pow(s.clone(), k);
            if w > a {
                a = w;
            }
        }
        a
    }

    /// T^P·self as a power series (P = pole length): head and tail constant.
    fn unpoled(&self) -> (usize, Vec<Rational>, Rational) {
        let p = self.pole.len();
        let mut head: Vec<Rational> = self.pole.iter().rev().cloned().collect();
        head.extend(self.head.iter().cloned());
        // a_k ≤ C s^(−k) ⇒ b_{k+P} ≤ C s^P s^(−(k+P))
        (p, head, self.bound.clone() * num_traits::pow(self.s.clone(), p))
    }

    fn repoled(p: usize, head: Vec<Rational>, bound: Rational, s: Rational) -> Self {
        let split = p.min(head.len());
        let pole: Vec<Rational> = head[..split].iter().rev().cloned().collect();
        let rest = head[split..].to_vec();
        let bound = bound / num_traits::pow(s.clone(), p);
        Self { pole, head: rest, bound, s }
    }

    pub fn add(&self, o: &Self) -> Self {
        let s = self.s.clone().min(o.s.clone());
        let p = self.pole.len().max(o.pole.len());
        let pole: Vec<Rational> = (0..p)
            .map(|k| {
                self.pole.get(k).cloned().unwrap_or_else(Rational::zero) + o.pole.get(k).cloned().unwrap_or_else(Rational::zero)
            })
            .collect();
        let k = self.top_index().min(o.top_index());
        let head: Vec<Rational> = (0..=k).map(|i| self.head[i].clone() + &o.head[i]).collect();
        let bound = self.uniform_bound(&s) + o.uniform_bound(&s);
        Self { pole, head, bound, s }
    }

    pub fn neg(&self) -> Self {
        Self {
            pole: self.pole.iter().map(|c| -c.clone()).collect(),
            head: self.head.iter().map(|c| -c.clone()).collect(),
            bound: self.bound.clone(),
            s: self.s.clone(),
        }
    }

    /// Product; the radius shrinks by the slack factor 15/16 to absorb the
    /// (k+1) growth of convolutions.
    pub fn mul(&self, o: &Self) -> Self {
        let (pa, ha, ca) = self.unpoled();
        let (pb, hb, cb) = o.unpoled();
        let s = self.s.clone().min(o.s.clone());
        let a = Self { pole: Vec::new(), head: ha, bound: ca, s: self.s.clone() };
        let b = Self { pole: Vec::new(), head: hb, bound: cb, s: o.s.clone() };
        let k = a.top_index().min(b.top_index());
        let head: Vec<Rational> = (0..=k)
            .map(|n| (0..=n).fold(Rational::zero(), |acc, i| acc + a.head[i].clone() * &b.head[n - i]))
            .collect();
        let theta = rational(15, 16);
        let bound = a.uniform_bound(&s) * b.uniform_bound(&s) * convolution_constant(&theta);
        Self::repoled(pa + pb, head, bound, s * theta)
    }
}

/// max_k (k+1)·θ^k for 0 < θ < 1.
fn convolution_constant(theta: &Rational) -> Rational {
    let mut k = 0i64;
    let mut best = Rational::one();
    let mut power = Rational::one();
    loop {
        power *= theta;
        k += 1;
        let v = power.clone() * rational(k + 1, 1);
        if v < best {
            return best;
        }
        best = v;
    }
}

// ------------------------------------------------------------ certificates

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    ExactRoots,
    ClassicalBound,
    TailBound,
}

impl RadiusMethod {
    pub fn tag(self) -> &'static str {
        match self {
            RadiusMethod::ExactRoots => "exact-roots",
            RadiusMethod::ClassicalBound => "classical-bound",
            RadiusMethod::TailBound => "tail-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusCertificate {
    pub method: RadiusMethod,
    /// Square of the certified radius; `None` means infinite (no singularity).
    pub radius_sq: Option<Rational>,
    /// Whether `radius_sq` is the exact squared radius rather than a lower bound.
    pub exact: bool,
    /// Exact decision data for irrational real roots: the denominator itself.
    quadratic: Option<Poly>,
}

impl RadiusCertificate {
    /// A rational lower bound s on the radius.
    pub fn lower_bound(&self) -> Option<Rational> {
        self.radius_sq.as_ref().map(|q| sqrt_bounds(q, 40).0)
    }

    /// radius > r, decided exactly.
    pub fn exceeds(&self, r: &Rational) -> bool {
        if let Some(p) = &self.quadratic {
            return !real_root_in(p, r);
        }
        match &self.radius_sq {
            None => true,
            Some(q) => *q > r.clone() * r,
        }
    }
}

impl fmt::Display for RadiusCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(q) = &self.radius_sq else {
            return write!(f, "{}: radius = infinity", self.method.tag());
        };
        let (lo, hi) = sqrt_bounds(q, 40);
        let rel = if self.exact { "=" } else { ">=" };
        if lo == hi {
            write!(f, "{}: radius {rel} {lo}", self.method.tag())
        } else {
            write!(f, "{}: radius^2 {rel} {q}", self.method.tag())
        }
    }
}

/// Does the real quadratic p have a root in [−r, r]?
fn real_root_in(p: &Poly, r: &Rational) -> bool {
    let a = p.eval_rational(&-r.clone());
    let b = p.eval_rational(r);
    if (a.clone() * &b) <= Rational::zero() {
        return true;
    }
    let v = -p.coeff(1) / (rational(2, 1) * p.coeff(2));
    if v.abs() < *r {
        let pv = p.eval_rational(&v);
        return (pv * &b) <= Rational::zero();
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub root: Option<Qi>,
    pub description: String,
    pub modulus_sq: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(RadiusCertificate),
    NotMember(Witness),
    Unknown(RadiusCertificate),
}

/// Roots of a denominator of degree ≤ 2 together with the smallest modulus.
fn small_roots(d: &Poly) -> (RadiusCertificate, Option<Witness>) {
    match d.degree() {
        0 => (RadiusCertificate { method: RadiusMethod::ExactRoots, radius_sq: None, exact: true, quadratic: None }, None),
        1 => {
            let root = -d.coeff(0) / d.coeff(1);
            let m = root.clone() * &root;
            let w = Witness { root: Some(Qi::from_rational(root.clone())), description: root.to_string(), modulus_sq: Some(m.clone()) };
            (RadiusCertificate { method: RadiusMethod::ExactRoots, radius_sq: Some(m), exact: true, quadratic: None }, Some(w))
        }
        _ => {
            let (c0, c1, c2) = (d.coeff(0), d.coeff(1), d.coeff(2));
            let disc = c1.clone() * &c1 - rational(4, 1) * &c2 * &c0;
            let two_a = rational(2, 1) * &c2;
            if disc.is_negative() {
                // conjugate pair, |z|² = c0/c2
                let m = c0.clone() / &c2;
                let (lo, hi) = sqrt_bounds(&-disc.clone(), 8);
                let root = (lo == hi).then(|| Qi::new(-c1.clone() / &two_a, lo / &two_a));
                let description = match &root {
                    Some(z) => z.to_string(),
                    None => format!("({} + sqrt({})*i)/{}", -c1.clone(), -disc.clone(), two_a),
                };
                let w = Witness { root, description, modulus_sq: Some(m.clone()) };
                (RadiusCertificate { method: RadiusMethod::ExactRoots, radius_sq: Some(m), exact: true, quadratic: None }, Some(w))
            } else {
                let (lo, hi) = sqrt_bounds(&disc, 64);
                if lo == hi {
                    let r1 = (-c1.clone() + &lo) / &two_a;
                    let r2 = (-c1.clone() - &lo) / &two_a;
                    let small = if r1.abs() <= r2.abs() { r1 } else { r2 };
                    let m = small.clone() * &small;
                    let w = Witness { root: Some(Qi::from_rational(small.clone())), description: small.to_string(), modulus_sq: Some(m.clone()) };
                    (RadiusCertificate { method: RadiusMethod::ExactRoots, radius_sq: Some(m), exact: true, quadratic: None }, Some(w))
                } else {
                    // irrational real roots: bracket them, decide membership exactly
                    let cands = [(-c1.clone() + &lo) / &two_a, (-c1.clone() + &hi) / &two_a, (-c1.clone() - &lo) / &two_a, (-c1.clone() - &hi) / &two_a];
                    let bracket = |a: &Rational, b: &Rational| -> Rational {
                        if a.is_negative() != b.is_negative() {
                            Rational::zero()
                        } else {
                            a.abs().min(b.abs())
                        }
                    };
                    let low = bracket(&cands[0], &cands[1]).min(bracket(&cands[2], &cands[3]));
                    let w = Witness {
                        root: None,
                        description: format!("({} +- sqrt({}))/{}", -c1.clone(), disc, two_a),
                        modulus_sq: None,
                    };
                    (
                        RadiusCertificate {
                            method: RadiusMethod::ExactRoots,
                            radius_sq: Some(low.clone() * &low),
                            exact: false,
                            quadratic: Some(d.clone()),
                        },
                        Some(w),
                    )
                }
            }
        }
    }
}

/// |z| ≥ |d₀| / (|d₀| + max_{i≥1} |d_i|) for every root z of d.
fn classical_bound(d: &Poly) -> RadiusCertificate {
    let d0 = d.coeff(0).abs();
    let m = d.0.iter().skip(1).map(|c| c.abs()).max().unwrap_or_else(Rational::zero);
    let s = d0.clone() / (d0 + m);
    RadiusCertificate { method: RadiusMethod::ClassicalBound, radius_sq: Some(s.clone() * &s), exact: false, quadratic: None }
}

fn check_radius(r: &Rational) -> Result<(), HarbaterError> {
    if !r.is_positive() || *r >= Rational::one() {
        return Err(HarbaterError::BadRadius(r.to_string()));
    }
    Ok(())
}

// ------------------------------------------------------------ operations

impl HarbaterElement {
    pub fn rational_fn(num: Poly, den: Poly) -> Result<Self, HarbaterError> {
        Ok(Self::RationalFn(RationalFn::new(num, den, 0)?))
    }

    pub fn polynomial(p: Poly) -> Self {
        Self::RationalFn(RationalFn::polynomial(p))
    }

    pub fn ring(&self) -> CoefficientRing {
        match self {
            Self::RationalFn(f) => f.ring(),
            Self::Series(s) => s.ring(),
        }
    }

    pub fn as_rational_fn(&self) -> Option<&RationalFn> {
        match self {
            Self::RationalFn(f) => Some(f),
            Self::Series(_) => None,
        }
    }

    fn series(&self, head: usize) -> CertifiedSeries {
        match self {
            Self::RationalFn(f) => f.to_series(head),
            Self::Series(s) => s.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (Self::RationalFn(a), Self::RationalFn(b)) => Self::RationalFn(a.add(b)),
            _ => Self::Series(self.series(MIXED_HEAD).add(&o.series(MIXED_HEAD))),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Self::RationalFn(a) => Self::RationalFn(a.neg()),
            Self::Series(s) => Self::Series(s.neg()),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (Self::RationalFn(a), Self::RationalFn(b)) => Self::RationalFn(a.mul(b)),
            _ => Self::Series(self.series(MIXED_HEAD).mul(&o.series(MIXED_HEAD))),
        }
    }

    /// Laurent coefficients from exponent `start` on (`count` of them); for
    /// series only the head and pole part are available.
    pub fn coefficients(&self, count: usize) -> (i64, Vec<Rational>) {
        match self {
            Self::RationalFn(f) => f.coefficients(count),
            Self::Series(s) => {
                let mut c: Vec<Rational> = s.pole.iter().rev().cloned().collect();
                c.extend(s.head.iter().cloned());
                c.truncate(count);
                (-(s.pole.len() as i64), c)
            }
        }
    }
}

/// Head length used when a rational function meets a series.
const MIXED_HEAD: usize = 24;

pub fn radius_lower_bound(e: &HarbaterElement) -> RadiusCertificate {
    match e {
        HarbaterElement::RationalFn(f) => f
            .factor_certificates()
            .into_iter()
            .map(|(c, _)| c)
            .min_by(|a, b| match (&a.radius_sq, &b.radius_sq) {
                (None, None) => std::cmp::Ordering::Equal,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (Some(_), None) => std::cmp::Ordering::Less,
                (Some(x), Some(y)) => x.cmp(y),
            })
            .unwrap_or(RadiusCertificate { method: RadiusMethod::ExactRoots, radius_sq: None, exact: true, quadratic: None }),
        HarbaterElement::Series(s) => {
            let infinite = s.bound.is_zero();
            RadiusCertificate {
                method: RadiusMethod::TailBound,
                radius_sq: (!infinite).then(|| s.s.clone() * &s.s),
                exact: false,
                quadratic: None,
            }
        }
    }
}

pub fn membership(e: &HarbaterElement, r: &Rational) -> Result<Membership, HarbaterError> {
    check_radius(r)?;
    let cert = radius_lower_bound(e);
    if certified_beyond(e, r) {
        return Ok(Membership::Member(cert));
    }
    if let HarbaterElement::RationalFn(f) = e {
        for (c, w) in f.factor_certificates() {
            if c.method == RadiusMethod::ExactRoots && !c.exceeds(r) {
                return Ok(Membership::NotMember(w.expect("a root exists when the radius is finite")));
            }
        }
    }
    Ok(Membership::Unknown(cert))
}

/// Radius certified > r (every denominator factor, for rational functions).
fn certified_beyond(e: &HarbaterElement, r: &Rational) -> bool {
    match e {
        HarbaterElement::RationalFn(f) => f.factor_certificates().iter().all(|(c, _)| c.exceeds(r)),
        HarbaterElement::Series(_) => radius_lower_bound(e).exceeds(r),
    }
}

/// Exact value or a disc center ± radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub center: Qi,
    pub radius: Rational,
}

impl Evaluation {
    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    /// Product disc: |c₁|r₂ + |c₂|r₁ + r₁r₂ around c₁c₂.
    pub fn mul(&self, o: &Self) -> Self {
        let a = sqrt_bounds(&self.center.norm(), 40).1;
        let b = sqrt_bounds(&o.center.norm(), 40).1;
        Self {
            center: self.center.clone() * &o.center,
            radius: a * &o.radius + b * &self.radius + self.radius.clone() * &o.radius,
        }
    }

    /// Whether the two discs intersect.
    pub fn overlaps(&self, o: &Self) -> bool {
        let d = (self.center.clone() - &o.center).norm();
        let r = self.radius.clone() + &o.radius;
        d <= r.clone() * r
    }
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.center)
        } else {
            write!(f, "{} +- {}", self.center, self.radius)
        }
    }
}

fn qi_pow(x: &Qi, k: i64) -> Result<Qi, HarbaterError> {
    let base = if k < 0 { x.inv()? } else { x.clone() };
    Ok((0..k.unsigned_abs()).fold(Qi::one(), |acc, _| acc * &base))
}

pub fn evaluate(e: &HarbaterElement, x: &Qi, r: &Rational) -> Result<Evaluation, HarbaterError> {
    check_radius(r)?;
    if x.norm() > r.clone() * r {
        return Err(HarbaterError::PointOutsideDisc(x.to_string(), r.to_string()));
    }
    match e {
        HarbaterElement::RationalFn(f) => {
            let d = f.den.eval(x);
            if d.is_zero() || (x.is_zero() && f.shift < 0) {
                return Err(HarbaterError::PoleAtPoint(x.to_string()));
            }
            if !certified_beyond(e, r) {
                return Err(HarbaterError::NotMember(r.to_string()));
            }
            let v = f.num.eval(x) * &d.inv()? * &qi_pow(x, f.shift)?;
            Ok(Evaluation { center: v, radius: Rational::zero() })
        }
        HarbaterElement::Series(s) => {
            if x.is_zero() && s.pole.iter().any(|c| !c.is_zero()) {
                return Err(HarbaterError::PoleAtPoint(x.to_string()));
            }
            if !certified_beyond(e, r) {
                return Err(HarbaterError::NotMember(r.to_string()));
            }
            let mut v = Qi::zero();
            for (k, c) in s.pole.iter().enumerate() {
                v = v + &(qi_pow(x, -(k as i64) - 1)? * &Qi::from_rational(c.clone()));
            }
            for (k, c) in s.head.iter().enumerate() {
                v = v + &(qi_pow(x, k as i64)? * &Qi::from_rational(c.clone()));
            }
            if s.bound.is_zero() {
                return Ok(Evaluation { center: v, radius: Rational::zero() });
            }
            let rho = sqrt_bounds(&x.norm(), 48).1 / &s.s;
            if rho >= Rational::one() {
                return Err(HarbaterError::TailDiverges);
            }
            let k1 = s.head.len();
            let tail = s.bound.clone() * num_traits::pow(rho.clone(), k1) / (Rational::one() - rho);
            Ok(Evaluation { center: v, radius: tail })
        }
    }
}

/// Primitive integer polynomial (ascending) with root x.
pub fn kernel_generator(x: &Qi) -> Vec<BigInt> {
    if x.is_real() {
        let q = &x.re;
        return vec![-q.numer().clone(), q.denom().clone()];
    }
    // (T − x)(T − x̄) = T² − 2Re(x)·T + |x|²
    let p = Poly::new(vec![x.norm(), -(rational(2, 1) * &x.re), Rational::one()]);
    p.primitive()
}

pub fn divide_exact(f: &HarbaterElement, g: &[BigInt], r: &Rational) -> Result<HarbaterElement, HarbaterError> {
    check_radius(r)?;
    let gp = Poly::from_bigints(g);
    if gp.is_zero() {
        return Err(HarbaterError::NotDivisible("0".into()));
    }
    let HarbaterElement::RationalFn(rf) = f else {
        return Err(HarbaterError::RadiusNotCertified("series quotients need exact zeros".into()));
    };
    // T-factors of g come off the shift
    let low = gp.low_order();
    let core = Poly::new(gp.coeffs()[low..].to_vec());
    let (q, rem) = rf.num.divrem(&core);
    if !rem.is_zero() {
        return Err(HarbaterError::NotDivisible(gp.to_string()));
    }
    let quotient = RationalFn::from_factors(q, rf.factors.clone(), rf.shift - low as i64)?;
    let out = HarbaterElement::RationalFn(quotient);
    if !certified_beyond(&out, r) {
        return Err(HarbaterError::RadiusNotCertified(radius_lower_bound(&out).to_string()));
    }
    Ok(out)
}

/// k[[ξ]] at a point: ξ = g(T) for the kernel generator g of x.
#[derive(Debug, Clone)]
pub struct LocalCompletion {
    pub x: Qi,
    pub r: Rational,
    pub order: usize,
    pub generator: Vec<BigInt>,
    /// δ = T − x as a series in ξ.
    pub delta: Tps,
}

pub fn local_completion(x: &Qi, r: &Rational, order: usize) -> Result<LocalCompletion, HarbaterError> {
    check_radius(r)?;
    if x.norm() > r.clone() * r {
        return Err(HarbaterError::PointOutsideDisc(x.to_string(), r.to_string()));
    }
    if order < 2 {
        return Err(HarbaterError::Periodic(PeriodicError::OrderTooSmall));
    }
    let generator = kernel_generator(x);
    let g = Poly::from_bigints(&generator);
    if g.derivative().eval(x).is_zero() {
        return Err(HarbaterError::NotSimpleRoot(x.to_string()));
    }
    // ξ = g(x + δ) as a series in δ, then revert
    let shifted = g.taylor_shift(x);
    let xi_of_delta = Tps::new(shifted, order);
    let delta = xi_of_delta.reversion()?;
    Ok(LocalCompletion { x: x.clone(), r: r.clone(), order, generator, delta })
}

impl LocalCompletion {
    fn poly_at(&self, p: &Poly) -> Result<Tps, HarbaterError> {
        let in_delta = Tps::new(p.taylor_shift(&self.x), self.order);
        Ok(in_delta.compose(&self.delta)?)
    }

    /// Taylor expansion of a rational function regular at x, in powers of ξ.
    pub fn expansion(&self, e: &HarbaterElement) -> Result<Tps, HarbaterError> {
        let f = e.as_rational_fn().ok_or(HarbaterError::NeedsRationalFunction)?;
        if f.den.eval(&self.x).is_zero() || (self.x.is_zero() && f.shift < 0) {
            return Err(HarbaterError::PoleAtPoint(self.x.to_string()));
        }
        let num = self.poly_at(&f.num)?;
        let den = self.poly_at(&f.den)?;
        let mut out = num.mul(&den.inv()?);
        if f.shift != 0 {
            let t = self.poly_at(&Poly::t())?;
            let factor = if f.shift > 0 { t } else { t.inv()? };
            out = out.mul(&factor.pow(f.shift.unsigned_abs() as usize));
        }
        Ok(out)
    }

    /// θ: evaluation at x.
    pub fn theta(&self, s: &Tps) -> Qi {
        s.theta()
    }

    /// Two-periodic presentation over A = ℚ(i)[[ξ]]/ξ^M with Bott factor `f`
    /// (a unit at x; default 1).
    pub fn presentation(&self, f: Option<&HarbaterElement>) -> Result<TwoPeriodicPresentation, HarbaterError> {
        let series = match f {
            Some(e) => self.expansion(e)?,
            None => Tps::constant(Qi::one(), self.order),
        };
        Ok(TwoPeriodicPresentation::with_field(series, BaseField::Gaussian)?)
    }
}

// ------------------------------------------------------------ text form

impl fmt::Display for RationalFn {
    /// `1 + T`, `(1 + T) / (1 - 2*T)`, `T^-2 * (1 + T) / (1 - 2*T)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (prefix, num) = if self.shift >= 0 {
            (String::new(), self.num.shift(self.shift as usize))
        } else {
            (format!("T^{} * ", self.shift), self.num.clone())
        };
        let text = num.to_string();
        let single = num.0.iter().filter(|c| !c.is_zero()).count() <= 1 && !text.starts_with('-');
        let bare = self.den.degree() == 0 && prefix.is_empty();
        let head = if bare || single { text } else { format!("({text})") };
        if self.den.degree() == 0 {
            write!(f, "{prefix}{head}")
        } else {
            write!(f, "{prefix}{head} / ({})", self.den)
        }
    }
}

fn join_rationals(v: &[Rational]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for CertifiedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {} ; bound {} {}", join_rationals(&self.pole), join_rationals(&self.head), self.bound, self.s)
    }
}

impl fmt::Display for HarbaterElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RationalFn(r) => write!(f, "{r}"),
            Self::Series(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for HarbaterElement {
    type Err = HarbaterError;

    /// `1/(1-T) - 3/2` or `a_-1, a_-2 ; a_0, ..., a_K ; bound C s`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > 10_000 {
            return Err(HarbaterError::Parse("input too long".into()));
        }
        if s.contains(';') {
            return parse_series(s).map(Self::Series);
        }
        let tokens = tokenize(s)?;
        let mut p = FnParser { tokens, pos: 0, depth: 0 };
        let v = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(HarbaterError::Parse("trailing input".into()));
        }
        Ok(Self::RationalFn(v))
    }
}

fn parse_list(s: &str) -> Result<Vec<Rational>, HarbaterError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|c| crate::scalars::parse_rational(c).map_err(|e| HarbaterError::Parse(e.to_string()))).collect()
}

fn parse_series(s: &str) -> Result<CertifiedSeries, HarbaterError> {
    let parts: Vec<&str> = s.split(';').collect();
    let [pole, head, bound] = parts[..] else {
        return Err(HarbaterError::Parse("expected: pole ; head ; bound C s".into()));
    };
    let pole = parse_list(pole)?;
    let head = parse_list(head)?;
    if head.is_empty() {
        return Err(HarbaterError::Parse("head needs at least a_0".into()));
    }
    let words: Vec<&str> = bound.split_whitespace().collect();
    let ["bound", c, s] = words[..] else {
        return Err(HarbaterError::Parse("expected: bound C s".into()));
    };
    let parse = |t: &str| crate::scalars::parse_rational(t).map_err(|e| HarbaterError::Parse(e.to_string()));
    let (bound, s) = (parse(c)?, parse(s)?);
    if bound.is_negative() || !s.is_positive() {
        return Err(HarbaterError::Parse("bound must be ≥ 0 and s > 0".into()));
    }
    Ok(CertifiedSeries { pole, head, bound, s })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, HarbaterError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        match chars[k] {
            ' ' | '\t' => {}
            '+' => out.push(Tok::Plus),
            '-' | '−' => out.push(Tok::Minus),
            '*' | '·' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            'T' | 't' => out.push(Tok::T),
            c if c.is_ascii_digit() => {
                let start = k;
                while k + 1 < chars.len() && chars[k + 1].is_ascii_digit() {
                    k += 1;
                }
                if k - start > 200 {
                    return Err(HarbaterError::Parse("number too long".into()));
                }
                let digits: String = chars[start..=k].iter().collect();
                out.push(Tok::Num(digits.parse().map_err(|_| HarbaterError::Parse("bad number".into()))?));
            }
            c => return Err(HarbaterError::Parse(format!("unexpected character {c:?}"))),
        }
        k += 1;
    }
    Ok(out)
}

struct FnParser {
    tokens: Vec<Tok>,
    pos: usize,
    depth: usize,
}

impl FnParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<RationalFn, HarbaterError> {
        self.depth += 1;
        if self.depth > 64 {
            return Err(HarbaterError::Parse("nested too deeply".into()));
        }
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                self.term()?.neg()
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.neg());
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFn, HarbaterError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.power()?;
                    acc = acc.div(&d)?;
                }
                Some(Tok::T) | Some(Tok::LParen) => {
                    // implicit product: 3T, 2(1-T)
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<RationalFn, HarbaterError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let Some(Tok::Num(e)) = self.peek().cloned() else {
            return Err(HarbaterError::Parse("exponent must be an integer".into()));
        };
        self.pos += 1;
        let e: u32 = e.try_into().ok().filter(|&e| e <= 256).ok_or_else(|| HarbaterError::Parse("exponent too large".into()))?;
        let p = (0..e).fold(RationalFn::polynomial(Poly::one()), |acc, _| acc.mul(&base));
        if negative {
            RationalFn::polynomial(Poly::one()).div(&p)
        } else {
            Ok(p)
        }
    }

    fn atom(&mut self) -> Result<RationalFn, HarbaterError> {
        let tok = self.peek().cloned().ok_or_else(|| HarbaterError::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(RationalFn::polynomial(Poly::constant(Rational::from_integer(n)))),
            Tok::T => Ok(RationalFn::polynomial(Poly::t())),
            Tok::Minus => Ok(self.atom()?.neg()),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(HarbaterError::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            t => Err(HarbaterError::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> HarbaterElement {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    fn qi(re: (i64, i64), im: (i64, i64)) -> Qi {
        Qi::new(q(re.0, re.1), q(im.0, im.1))
    }

    #[test]
    fn radius_examples() {
        let c = radius_lower_bound(&h("1/(1-T)"));
        assert_eq!((c.method, c.radius_sq.clone(), c.exact), (RadiusMethod::ExactRoots, Some(q(1, 1)), true));
        assert_eq!(radius_lower_bound(&h("1/(1-2T)")).radius_sq, Some(q(1, 4)));
        let c = radius_lower_bound(&h("1/(1+4T^2)"));
        assert_eq!(c.radius_sq, Some(q(1, 4)));
        assert_eq!(c.to_string(), "exact-roots: radius = 1/2");
        let c = radius_lower_bound(&h("1/(1 - T + T^3 - 2T^4)"));
        assert_eq!(c.method, RadiusMethod::ClassicalBound);
        assert_eq!(c.radius_sq, Some(q(1, 9)));
    }

    #[test]
    fn membership_examples() {
        let half = q(1, 2);
        assert!(matches!(membership(&h("1/(1-T)"), &half).unwrap(), Membership::Member(_)));
        match membership(&h("1/(1-2T)"), &half).unwrap() {
            Membership::NotMember(w) => assert_eq!(w.root, Some(qi((1, 2), (0, 1)))),
            m => panic!("{m:?}"),
        }
        assert!(matches!(membership(&h("T^3 - 7"), &q(9, 10)).unwrap(), Membership::Member(_)));
        match membership(&h("1/(1+4T^2)"), &half).unwrap() {
            Membership::NotMember(w) => assert_eq!(w.modulus_sq, Some(q(1, 4))),
            m => panic!("{m:?}"),
        }
        // classical bound too weak → Unknown
        assert!(matches!(membership(&h("1/(1 - T + T^3 - 2T^4)"), &half).unwrap(), Membership::Unknown(_)));
        assert!(membership(&h("1"), &q(1, 1)).is_err());
    }

    #[test]
    fn products_keep_factor_certificates() {
        let a = h("1/(1 - T/2 + T^2/3)");
        let b = h("1/(1 + T^2/2)");
        let c = h("(1 + T)/(1 - 3T/4)");
        let ab = a.mul(&b).mul(&c);
        let min = [&a, &b, &c].iter().filter_map(|e| radius_lower_bound(e).radius_sq).min().unwrap();
        assert!(radius_lower_bound(&ab).radius_sq.unwrap() >= min);
        assert!(matches!(membership(&ab, &q(1, 2)).unwrap(), Membership::Member(_)));
        // the same denominator expanded into one quartic only gets the classical bound
        let flat = h(&format!("1/({})", ab.as_rational_fn().unwrap().den()));
        assert_eq!(radius_lower_bound(&flat).method, RadiusMethod::ClassicalBound);
        // sums use the union of the factor lists
        let s = a.add(&b);
        assert_eq!(s.as_rational_fn().unwrap().den_factors().len(), 2);
        assert!(matches!(membership(&a.sub(&a), &q(1, 2)).unwrap(), Membership::Member(_)));
    }

    #[test]
    fn irrational_real_roots_decided_exactly() {
        // 1 − 3T + T²: roots (3 ± √5)/2, smaller ≈ 0.382
        let e = h("1/(1 - 3T + T^2)");
        assert!(matches!(membership(&e, &q(3, 10)).unwrap(), Membership::Member(_)));
        assert!(matches!(membership(&e, &q(2, 5)).unwrap(), Membership::NotMember(_)));
    }

    #[test]
    fn evaluate_examples() {
        let half = q(1, 2);
        assert_eq!(evaluate(&h("1/(1-T)"), &qi((1, 3), (0, 1)), &half).unwrap().center, qi((3, 2), (0, 1)));
        assert!(matches!(evaluate(&h("1/(1+4T^2)"), &qi((0, 1), (1, 2)), &half), Err(HarbaterError::PoleAtPoint(_))));
        assert_eq!(evaluate(&h("T^2 + T"), &qi((0, 1), (1, 2)), &half).unwrap().center, qi((-1, 4), (1, 2)));
        assert!(matches!(evaluate(&h("T"), &qi((2, 1), (0, 1)), &half), Err(HarbaterError::PointOutsideDisc(..))));
    }

    #[test]
    fn kernel_generators() {
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(kernel_generator(&qi((1, 3), (0, 1))), big(&[-1, 3]));
        assert_eq!(kernel_generator(&qi((0, 1), (1, 2))), big(&[1, 0, 4]));
        assert_eq!(kernel_generator(&qi((1, 1), (0, 1))), big(&[-1, 1]));
        assert_eq!(kernel_generator(&qi((1, 2), (1, 3))), big(&[13, -36, 36]));
    }

    #[test]
    fn divide_examples() {
        let half = q(1, 2);
        let g = kernel_generator(&qi((1, 3), (0, 1)));
        let quo = divide_exact(&h("9T^2 - 1"), &g, &half).unwrap();
        assert_eq!(quo, h("3T + 1"));
        assert_eq!(quo.to_string(), "1 + 3*T");
        let quo = divide_exact(&h("1/(1-T) - 3/2"), &g, &half).unwrap();
        assert_eq!(quo, h("1/(2(1-T))"));
        assert_eq!(quo.ring(), CoefficientRing::Rational);
        assert_eq!(radius_lower_bound(&quo).radius_sq, Some(q(1, 1)));
        assert!(matches!(divide_exact(&h("1/(1-T)"), &g, &half), Err(HarbaterError::NotDivisible(_))));
    }

    #[test]
    fn local_completion_example() {
        let lc = local_completion(&qi((1, 3), (0, 1)), &q(1, 2), 4).unwrap();
        let e = lc.expansion(&h("1/(1-T)")).unwrap();
        assert_eq!(e.coeffs()[..3], [qi((3, 2), (0, 1)), qi((3, 4), (0, 1)), qi((3, 8), (0, 1))]);
        let lc = local_completion(&qi((0, 1), (1, 2)), &q(1, 2), 6).unwrap();
        // ξ = 4T² + 1 = 4iδ + 4δ², so δ = ξ/(4i) + …
        assert_eq!(lc.delta.coeff(1), qi((0, 1), (-1, 4)));
        let e = h("T^2 + T");
        assert_eq!(lc.theta(&lc.expansion(&e).unwrap()), evaluate(&e, &lc.x, &q(1, 2)).unwrap().center);
    }

    #[test]
    fn series_round_trip_and_parse() {
        let e = h("3 ; 1, 1, 1 ; bound 1 1/2");
        assert_eq!(e.to_string(), "3 ; 1, 1, 1 ; bound 1 1/2");
        assert!(matches!(membership(&e, &q(1, 3)).unwrap(), Membership::Member(_)));
        assert!(matches!(membership(&e, &q(1, 2)).unwrap(), Membership::Unknown(_)));
        for s in ["1/(1-T)", "T^-2 * (1 + T) / (1 - 2*T)", "3*T + 1", "-1/2 * T^2"] {
            let a = h(s);
            assert_eq!(h(&a.to_string()), a, "{s}");
        }
        assert!("1/(1-T".parse::<HarbaterElement>().is_err());
        assert!("1 ; ; bound 1 1".parse::<HarbaterElement>().is_err());
    }

    #[test]
    fn recurrence_matches_closed_forms() {
        let (_, a) = h("1/(1-2T)").as_rational_fn().unwrap().coefficients(200);
        for (k, c) in a.iter().enumerate() {
            assert_eq!(*c, Rational::from_integer(BigInt::from(2).pow(k as u32)));
        }
        let (_, a) = h("1/(1-T)^2").as_rational_fn().unwrap().coefficients(200);
        for (k, c) in a.iter().enumerate() {
            assert_eq!(*c, q(k as i64 + 1, 1));
        }
    }

    #[test]
    fn series_tail_bound_is_valid() {
        for s in ["1/(1-T)", "1/(1+4T^2)", "(2 + T)/(1 - T - T^2)", "T^-1/(1-3T)"] {
            let f = h(s);
            let rf = f.as_rational_fn().unwrap();
            let ser = rf.to_series(10);
            let (start, coeffs) = rf.coefficients(200);
            for (k, c) in coeffs.iter().enumerate() {
                let e = start + k as i64;
                if e > ser.head.len() as i64 - 1 {
                    let lhs = c.abs() * num_traits::pow(ser.s.clone(), e as usize);
                    assert!(lhs <= ser.bound, "{s} at {e}");
                }
            }
        }
    }

    #[test]
    fn series_evaluation_contains_exact_value() {
        let f = h("1/(1-T)");
        let ser = HarbaterElement::Series(f.as_rational_fn().unwrap().to_series(12));
        let x = qi((1, 3), (1, 5));
        let r = q(1, 2);
        let exact = evaluate(&f, &x, &r).unwrap();
        let approx = evaluate(&ser, &x, &r).unwrap();
        assert!(approx.overlaps(&exact));
        assert!(approx.radius < q(1, 100));
    }
}
