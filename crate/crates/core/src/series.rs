//! Laurent series in t⁻¹ known exactly on a window of t-exponents.
//!
//! Exponents are powers of t, so the pole order at ∞ is the top exponent and
//! `Fil_n` is "top exponent ≤ n". A window with a cutoff `c` knows every
//! coefficient at exponents ≥ c; the error is O(t^(c−1)). A window without a
//! cutoff is an exact Laurent polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{Field, GaussianRational, ScalarError, TruncatedPowerSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("cannot invert the zero series")]
    ZeroInverse,
    #[error("series vanishes down to its cutoff; the pole order is not determined")]
    IndeterminateTop,
    #[error("substitution needs a parameter of pole order one")]
    BadParameter,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Pole order at ∞; `MinusInfinity` only for the certified zero series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PoleOrder {
    MinusInfinity,
    Finite(i64),
}

impl PoleOrder {
    pub fn finite(self) -> Option<i64> {
        match self {
            PoleOrder::Finite(n) => Some(n),
            PoleOrder::MinusInfinity => None,
        }
    }
}

impl fmt::Display for PoleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoleOrder::MinusInfinity => write!(f, "-inf"),
            PoleOrder::Finite(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentWindow<F> {
    /// Nonzero coefficients only, all at exponents ≥ cutoff.
    coeffs: BTreeMap<i64, F>,
    cutoff: Option<i64>,
}

impl<F: Field> LaurentWindow<F> {
    /// The certified zero series.
    pub fn zero() -> Self {
        Self { coeffs: BTreeMap::new(), cutoff: None }
    }

    pub fn one() -> Self {
        Self::monomial(F::one(), 0)
    }

    /// c·t^k, exact.
    pub fn monomial(c: F, k: i64) -> Self {
        Self::exact([(k, c)])
    }

    /// An exact Laurent polynomial; repeated exponents are summed.
    pub fn exact<I: IntoIterator<Item = (i64, F)>>(terms: I) -> Self {
        Self::from_terms(terms, None)
    }

    /// Terms below `cutoff` are discarded.
    pub fn from_terms<I: IntoIterator<Item = (i64, F)>>(terms: I, cutoff: Option<i64>) -> Self {
        let mut coeffs: BTreeMap<i64, F> = BTreeMap::new();
        for (k, c) in terms {
            if cutoff.is_some_and(|cut| k < cut) {
                continue;
            }
            let entry = coeffs.entry(k).or_insert_with(F::zero);
            *entry = entry.clone() + &c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self { coeffs, cutoff }
    }

    /// Σ aⱼ ξʲ + O(ξ^M) read as a window in the variable ξ⁻¹: the coefficient
    /// of ξʲ sits at exponent −j and the cutoff is 1 − M.
    pub fn from_power_series(f: &TruncatedPowerSeries<F>) -> Self {
        let m = f.order() as i64;
        Self::from_terms(
            f.coeffs().iter().enumerate().map(|(j, c)| (-(j as i64), c.clone())),
            Some(1 - m),
        )
    }

    pub fn cutoff(&self) -> Option<i64> {
        self.cutoff
    }

    pub fn is_exact(&self) -> bool {
        self.cutoff.is_none()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &F)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Coefficient at t^k, `None` when k lies below the cutoff.
    pub fn coeff(&self, k: i64) -> Option<F> {
        if self.cutoff.is_some_and(|c| k < c) {
            return None;
        }
        Some(self.coeffs.get(&k).cloned().unwrap_or_else(F::zero))
    }

    /// Highest exponent with a nonzero known coefficient.
    pub fn top(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn leading_coefficient(&self) -> Option<&F> {
        self.coeffs.values().next_back()
    }

    pub fn is_certified_zero(&self) -> bool {
        self.cutoff.is_none() && self.coeffs.is_empty()
    }

    /// Raise the cutoff, forgetting coefficients below it.
    pub fn with_cutoff(&self, cutoff: i64) -> Self {
        let cut = self.cutoff.map_or(cutoff, |c| c.max(cutoff));
        Self::from_terms(self.coeffs.iter().map(|(k, c)| (*k, c.clone())), Some(cut))
    }

    /// Upper bound on the true top exponent; `None` for the certified zero.
    fn top_bound(&self) -> Option<i64> {
        self.top().or(self.cutoff.map(|c| c - 1))
    }

    fn join_cutoff(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let cutoff = Self::join_cutoff(self.cutoff, other.cutoff);
        let terms = self.terms().chain(other.terms()).map(|(k, c)| (k, c.clone()));
        Self::from_terms(terms, cutoff)
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &F) -> Self {
        if s.is_zero() && self.is_exact() {
            return Self::zero();
        }
        Self::from_terms(self.terms().map(|(k, c)| (k, c.clone() * s)), self.cutoff)
    }

    /// Multiplication by t^k.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            cutoff: self.cutoff.map(|c| c + k),
        }
    }

    /// Product; known down to max(cutoff_a + top_b, cutoff_b + top_a).
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_certified_zero() || other.is_certified_zero() {
            return Self::zero();
        }
        let mut cutoff = None;
        if let (Some(ca), Some(tb)) = (self.cutoff, other.top_bound()) {
            cutoff = Self::join_cutoff(cutoff, Some(ca + tb));
        }
        if let (Some(cb), Some(ta)) = (other.cutoff, self.top_bound()) {
            cutoff = Self::join_cutoff(cutoff, Some(cb + ta));
        }
        let mut out: BTreeMap<i64, F> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let k = i + j;
                if cutoff.is_some_and(|c| k < c) {
                    continue;
                }
                let entry = out.entry(k).or_insert_with(F::zero);
                *entry = entry.clone() + &(a.clone() * b);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { coeffs: out, cutoff }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse known down to exponent `prec`, or less when
    /// the input's own window limits it.
    pub fn inv(&self, prec: i64) -> Result<Self, SeriesError> {
        let Some(d) = self.top() else {
            return Err(if self.is_exact() { SeriesError::ZeroInverse } else { SeriesError::IndeterminateTop });
        };
        let lead_inv = self.coeffs[&d].inv()?;
        let cutoff = match self.cutoff {
            None => prec,
            Some(c) => prec.max(c - 2 * d),
        };
        let mut out: BTreeMap<i64, F> = BTreeMap::new();
        let mut k = -d;
        while k >= cutoff {
            let val = if k == -d {
                lead_inv.clone()
            } else {
                let mut s = F::zero();
                for (e, a) in self.coeffs.range(..d).rev() {
                    let j = d - e;
                    if k + j > -d {
                        break;
                    }
                    if let Some(b) = out.get(&(k + j)) {
                        s = s + &(a.clone() * b);
                    }
                }
                -(s * &lead_inv)
            };
            if !val.is_zero() {
                out.insert(k, val);
            }
            k -= 1;
        }
        Ok(Self { coeffs: out, cutoff: Some(cutoff) })
    }

    pub fn pole_order(&self) -> Result<PoleOrder, SeriesError> {
        match self.top() {
            Some(d) => Ok(PoleOrder::Finite(d)),
            None if self.is_exact() => Ok(PoleOrder::MinusInfinity),
            None => Err(SeriesError::IndeterminateTop),
        }
    }

    /// Membership in Fil_n = t^n F[[t⁻¹]].
    pub fn fil_member(&self, n: i64) -> Result<bool, SeriesError> {
        match self.top() {
            Some(d) => Ok(d <= n),
            None => match self.cutoff {
                None => Ok(true),
                // zero above the cutoff, so the true top is at most c − 1
                Some(c) if c - 1 <= n => Ok(true),
                Some(_) => Err(SeriesError::IndeterminateTop),
            },
        }
    }

    /// Equality on the common known window.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).coeffs.is_empty()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> LaurentWindow<G> {
        LaurentWindow::from_terms(self.terms().map(|(k, c)| (k, f(c))), self.cutoff)
    }

    /// Substitutes the variable: `self` is Σ c_k y^k for a variable y, and
    /// `y` is given as a window of pole order one in the new variable.
    /// Results are known down to `prec` at best.
    pub fn compose(&self, y: &Self, prec: i64) -> Result<Self, SeriesError> {
        if y.top() != Some(1) {
            return Err(SeriesError::BadParameter);
        }
        let Some(top) = self.top() else {
            return Ok(match self.cutoff {
                None => Self::zero(),
                Some(c) => Self::from_terms([], Some(c.max(prec))),
            });
        };
        let bottom = self.coeffs.keys().next().copied().unwrap_or(top);
        let y_inv = if bottom < 0 { Some(y.inv(prec)?) } else { None };
        let mut acc = Self::from_terms([], Some(self.cutoff.map_or(prec, |c| c.max(prec))));
        // running powers y^k (k ≥ 0) and y^(−k), built incrementally
        let mut pos = (0i64, Self::one());
        let mut neg = (0i64, Self::one());
        let order = self.coeffs.range(0..).chain(self.coeffs.range(..0).rev());
        for (k, c) in order {
            let power = if *k >= 0 {
                while pos.0 < *k {
                    pos = (pos.0 + 1, pos.1.mul(y));
                }
                &pos.1
            } else {
                let y_inv = y_inv.as_ref().expect("negative exponents present");
                while neg.0 < -k {
                    neg = (neg.0 + 1, neg.1.mul(y_inv));
                }
                &neg.1
            };
            acc = acc.add(&power.scale(c));
        }
        Ok(acc)
    }
}

impl LaurentWindow<GaussianRational> {
    pub fn from_rational_window(w: &LaurentWindow<crate::scalars::Rational>) -> Self {
        w.map(|c| GaussianRational::from_rational(c.clone()))
    }
}

/// Fil_n: sections with pole order at most n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiltrationLevel(pub i64);

impl FiltrationLevel {
    pub fn contains<F: Field>(&self, s: &LaurentWindow<F>) -> Result<bool, SeriesError> {
        s.fil_member(self.0)
    }
}

fn needs_parens(s: &str) -> bool {
    s.char_indices().any(|(k, c)| k > 0 && (c == '+' || c == '-'))
}

impl<F: Field> fmt::Display for LaurentWindow<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(k, c)| {
                let c = c.to_string();
                if needs_parens(&c) {
                    format!("({c})*t^{k}")
                } else {
                    format!("{c}*t^{k}")
                }
            })
            .collect();
        if let Some(c) = self.cutoff {
            parts.push(format!("O(t^({}))", c - 1));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Splits at top-level " + " / " - " separators, returning signed terms.
fn split_terms(s: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    let mut negative = false;
    let chars: Vec<char> = s.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0
            && c == ' '
            && k + 2 < chars.len()
            && (chars[k + 1] == '+' || chars[k + 1] == '-')
            && chars[k + 2] == ' '
        {
            out.push((negative, std::mem::take(&mut current)));
            negative = chars[k + 1] == '-';
            k += 3;
            continue;
        }
        current.push(c);
        k += 1;
    }
    out.push((negative, current));
    out
}

fn parse_exponent(s: &str) -> Result<i64, SeriesError> {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s);
    s.trim()
        .parse()
        .map_err(|_| SeriesError::Parse(format!("bad exponent {s:?}")))
}

impl<F: Field> FromStr for LaurentWindow<F> {
    type Err = SeriesError;

    /// Parses `c_k*t^k + ... + c_j*t^j + O(t^(j−1))`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(SeriesError::Parse("empty series".into()));
        }
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut terms = Vec::new();
        let mut cutoff = None;
        for (negative, raw) in split_terms(s) {
            let term = raw.trim();
            if term.is_empty() {
                return Err(SeriesError::Parse("empty term".into()));
            }
            if let Some(inner) = term.strip_prefix("O(t^").and_then(|r| r.strip_suffix(')')) {
                if cutoff.is_some() {
                    return Err(SeriesError::Parse("more than one O-term".into()));
                }
                let e = parse_exponent(inner)?;
                cutoff = Some(e.checked_add(1).ok_or_else(|| SeriesError::Parse("exponent overflow".into()))?);
                continue;
            }
            let (coef, exp) = match term.rsplit_once('t') {
                Some((c, _)) if !c.ends_with('*') && !c.is_empty() && c != "-" && c != "+" => {
                    return Err(SeriesError::Parse(format!("bad term {term:?} (expected c*t^k)")));
                }
                Some((c, e)) => {
                    let c = c.strip_suffix('*').unwrap_or(c);
                    let e = match e.strip_prefix('^') {
                        Some(e) => parse_exponent(e)?,
                        None if e.is_empty() => 1,
                        None => return Err(SeriesError::Parse(format!("bad term {term:?}"))),
                    };
                    (c, e)
                }
                None => (term, 0),
            };
            let coef = coef.trim();
            let coef = coef.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(coef);
            let value = match coef {
                "" | "+" => F::one(),
                "-" => -F::one(),
                _ => F::parse_scalar(coef)?,
            };
            terms.push((exp, if negative { -value } else { value }));
        }
        Ok(Self::from_terms(terms, cutoff))
    }
}

/// JSON form: exponent/coefficient pairs plus the cutoff (null when exact).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowJson {
    pub terms: Vec<(i64, String)>,
    pub cutoff: Option<i64>,
}

impl<F: Field> LaurentWindow<F> {
    pub fn to_json(&self) -> WindowJson {
        WindowJson {
            terms: self.coeffs.iter().rev().map(|(k, c)| (*k, c.to_string())).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn from_json(j: &WindowJson) -> Result<Self, SeriesError> {
        let terms = j
            .terms
            .iter()
            .map(|(k, c)| F::parse_scalar(c).map(|c| (*k, c)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_terms(terms, j.cutoff))
    }

    pub fn from_json_str(s: &str) -> Result<Self, SeriesError> {
        let j: WindowJson = serde_json::from_str(s).map_err(|e| SeriesError::Parse(e.to_string()))?;
        Self::from_json(&j)
    }
}
