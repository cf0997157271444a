//! Affine algebras of sections regular away from ∞, given by an explicit
//! graded k₀-basis, structure constants and an embedding into k₁((t⁻¹)).
//!
//! Two built-ins (the projective line and the twistor line) plus finite
//! user-supplied slices loaded from a small text format:
//!
//! ```text
//! presentation p1-slice
//! leading_exact
//! basis t 1
//! basis t2 2
//! mul t t = t2
//! embed t = t
//! embed t2 = t^2
//! ```
//!
//! The unit is always basis index 0 with symbol `1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg;
use crate::scalars::{parse_rational, rational, Field, FieldPair, GaussianRational, Rational};
use crate::series::{LaurentWindow, PoleOrder, SeriesError};

pub type Qi = GaussianRational;
pub type Window = LaurentWindow<Qi>;

/// Sparse k₀-combination of basis indices.
pub type Element = BTreeMap<usize, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown basis symbol {0:?}")]
    UnknownSymbol(String),
    #[error("no product rule for {0} * {1}")]
    MissingProduct(String, String),
    #[error("embedding is not multiplicative on {0} * {1}")]
    NotRingMap(String, String),
    #[error("leading terms fail in degree {0}")]
    LeadingNotExact(u32),
    #[error("product {0} * {1} is not degree-additive")]
    DegreeNotAdditive(String, String),
    #[error("basis index {0} out of range")]
    IndexOutOfRange(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Whether embedding coefficients live in k₀ or genuinely in k₁.
/// Determines how many k₀ coordinates one Laurent coefficient occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientField {
    Real,
    Complex,
}

impl CoefficientField {
    pub fn coordinates(self) -> usize {
        match self {
            CoefficientField::Real => 1,
            CoefficientField::Complex => 2,
        }
    }
}

#[derive(Debug, Clone)]
struct UserData {
    symbols: Vec<String>,
    degrees: Vec<u32>,
    products: HashMap<(usize, usize), Element>,
    embeds: Vec<Window>,
}

#[derive(Debug, Clone)]
enum Kind {
    P1,
    Twistor,
    User(UserData),
}

#[derive(Debug, Clone)]
pub struct AffinePresentation {
    name: String,
    kind: Kind,
    leading_exact: bool,
    field: CoefficientField,
}

/// Twistor basis: 0 ↦ 1, 2d−1 ↦ u^d, 2d ↦ u^(d−1)·v.
fn twistor_monomial(idx: usize) -> (usize, usize) {
    match idx {
        0 => (0, 0),
        k if k % 2 == 1 => (k.div_ceil(2), 0),
        k => (k / 2 - 1, 1),
    }
}

fn twistor_index(a: usize, e: usize) -> usize {
    match (a, e) {
        (0, 0) => 0,
        (a, 0) => 2 * a - 1,
        (a, _) => 2 * a + 2,
    }
}

pub fn p1_presentation() -> AffinePresentation {
    AffinePresentation { name: "p1".into(), kind: Kind::P1, leading_exact: true, field: CoefficientField::Real }
}

pub fn twistor_presentation() -> AffinePresentation {
    AffinePresentation {
        name: "twistor".into(),
        kind: Kind::Twistor,
        leading_exact: true,
        field: CoefficientField::Complex,
    }
}

/// embed(u) = (t − t⁻¹)/2
pub fn twistor_u() -> Window {
    let h = Qi::from_rational(rational(1, 2));
    Window::exact([(1, h.clone()), (-1, -h)])
}

/// embed(v) = −(i/2)(t + t⁻¹)
pub fn twistor_v() -> Window {
    let c = Qi::new(Rational::zero(), rational(-1, 2));
    Window::exact([(1, c.clone()), (-1, c)])
}

fn single(idx: usize, c: Rational) -> Element {
    let mut e = Element::new();
    if !c.is_zero() {
        e.insert(idx, c);
    }
    e
}

pub fn add_into(acc: &mut Element, other: &Element, scale: &Rational) {
    for (k, c) in other {
        let entry = acc.entry(*k).or_insert_with(Rational::zero);
        *entry = &*entry + c * scale;
        if entry.is_zero() {
            acc.remove(k);
        }
    }
}

impl AffinePresentation {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn leading_exact(&self) -> bool {
        self.leading_exact
    }

    pub fn field(&self) -> CoefficientField {
        self.field
    }

    /// Largest degree present in the basis; `None` for the infinite built-ins.
    pub fn max_degree(&self) -> Option<u32> {
        match &self.kind {
            Kind::User(u) => u.degrees.iter().copied().max(),
            _ => None,
        }
    }

    fn len(&self) -> Option<usize> {
        match &self.kind {
            Kind::User(u) => Some(u.symbols.len()),
            _ => None,
        }
    }

    fn check(&self, idx: usize) -> Result<(), PresentationError> {
        match self.len() {
            Some(n) if idx >= n => Err(PresentationError::IndexOutOfRange(idx)),
            _ => Ok(()),
        }
    }

    pub fn degree(&self, idx: usize) -> u32 {
        match &self.kind {
            Kind::P1 => idx as u32,
            Kind::Twistor => idx.div_ceil(2) as u32,
            Kind::User(u) => u.degrees[idx],
        }
    }

    pub fn symbol(&self, idx: usize) -> String {
        match &self.kind {
            Kind::P1 => match idx {
                0 => "1".into(),
                1 => "t".into(),
                k => format!("t^{k}"),
            },
            Kind::Twistor => {
                let (a, e) = twistor_monomial(idx);
                let u = match a {
                    0 => String::new(),
                    1 => "u".into(),
                    a => format!("u^{a}"),
                };
                match (u.is_empty(), e) {
                    (true, 0) => "1".into(),
                    (true, _) => "v".into(),
                    (false, 0) => u,
                    (false, _) => format!("{u}*v"),
                }
            }
            Kind::User(u) => u.symbols[idx].clone(),
        }
    }

    pub fn index_of(&self, symbol: &str) -> Result<usize, PresentationError> {
        let s = symbol.trim();
        let unknown = || PresentationError::UnknownSymbol(s.to_string());
        match &self.kind {
            Kind::User(u) => u.symbols.iter().position(|x| x == s).ok_or_else(unknown),
            Kind::P1 => match s {
                "1" => Ok(0),
                "t" => Ok(1),
                _ => s.strip_prefix("t^").and_then(|k| k.parse().ok()).ok_or_else(unknown),
            },
            Kind::Twistor => {
                let (upart, e) = match s {
                    "1" => return Ok(0),
                    "v" => return Ok(2),
                    _ => match s.strip_suffix("*v") {
                        Some(rest) => (rest, 1),
                        None => (s, 0),
                    },
                };
                let a = match upart {
                    "u" => 1,
                    _ => upart.strip_prefix("u^").and_then(|k| k.parse().ok()).filter(|&a| a >= 1).ok_or_else(unknown)?,
                };
                Ok(twistor_index(a, e))
            }
        }
    }

    /// All basis indices of degree ≤ `d`, ordered by (degree, index).
    pub fn basis_up_to(&self, d: u32) -> Vec<usize> {
        match &self.kind {
            Kind::P1 => (0..=d as usize).collect(),
            Kind::Twistor => (0..=2 * d as usize).collect(),
            Kind::User(u) => {
                let mut idx: Vec<usize> = (0..u.symbols.len()).filter(|&k| u.degrees[k] <= d).collect();
                idx.sort_by_key(|&k| (u.degrees[k], k));
                idx
            }
        }
    }

    pub fn embed(&self, idx: usize) -> Result<Window, PresentationError> {
        self.check(idx)?;
        Ok(match &self.kind {
            Kind::P1 => Window::monomial(Qi::one(), idx as i64),
            Kind::Twistor => {
                let (a, e) = twistor_monomial(idx);
                let w = twistor_u().pow(a as u32);
                if e == 1 {
                    w.mul(&twistor_v())
                } else {
                    w
                }
            }
            Kind::User(u) => u.embeds[idx].clone(),
        })
    }

    /// Product of two basis elements as a combination of basis elements.
    pub fn mul_basis(&self, i: usize, j: usize) -> Result<Element, PresentationError> {
        self.check(i)?;
        self.check(j)?;
        let one = Rational::one();
        Ok(match &self.kind {
            Kind::P1 => single(i + j, one),
            Kind::Twistor => {
                let (a, e) = twistor_monomial(i);
                let (b, f) = twistor_monomial(j);
                match e + f {
                    2 => {
                        // v² = −1 − u²
                        let mut out = single(twistor_index(a + b, 0), -one.clone());
                        out.insert(twistor_index(a + b + 2, 0), -one);
                        out
                    }
                    ef => single(twistor_index(a + b, ef), one),
                }
            }
            Kind::User(u) => {
                if i == 0 {
                    return Ok(single(j, one));
                }
                if j == 0 {
                    return Ok(single(i, one));
                }
                let key = (i.min(j), i.max(j));
                u.products
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| PresentationError::MissingProduct(u.symbols[i].clone(), u.symbols[j].clone()))?
            }
        })
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element, PresentationError> {
        let mut out = Element::new();
        for (i, x) in a {
            for (j, y) in b {
                let prod = self.mul_basis(*i, *j)?;
                add_into(&mut out, &prod, &(x * y));
            }
        }
        Ok(out)
    }

    /// k₀-linear extension of `embed`.
    pub fn embed_element(&self, coeffs: &Element) -> Result<Window, PresentationError> {
        let mut acc = Window::zero();
        for (idx, c) in coeffs {
            acc = acc.add(&self.embed(*idx)?.scale(&Qi::from_rational(c.clone())));
        }
        Ok(acc)
    }

    /// Parses `2*u - v + 1/2` style combinations of basis symbols.
    pub fn parse_element(&self, s: &str) -> Result<Element, PresentationError> {
        parse_combination(s, |sym| self.index_of(sym)).map_err(|e| match e {
            ComboError::Symbol(e) => e,
            ComboError::Syntax(msg) => PresentationError::Parse { line: 0, msg },
        })
    }

    pub fn format_element(&self, e: &Element) -> String {
        if e.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = e
            .iter()
            .rev()
            .map(|(k, c)| {
                let sym = self.symbol(*k);
                match (sym.as_str(), c) {
                    ("1", c) => c.to_string(),
                    (s, c) if *c == Rational::one() => s.to_string(),
                    (s, c) if -c == Rational::one() => format!("-{s}"),
                    (s, c) => format!("{c}*{s}"),
                }
            })
            .collect();
        parts.join(" + ").replace("+ -", "- ")
    }

    /// Checks embed(b_i)·embed(b_j) = embed(b_i·b_j) for all basis pairs up to degree `max_deg`.
    pub fn verify_ring_map(&self, max_deg: u32) -> Result<(), PresentationError> {
        let basis = self.basis_up_to(max_deg);
        for (p, &i) in basis.iter().enumerate() {
            for &j in &basis[p..] {
                let lhs = self.embed(i)?.mul(&self.embed(j)?);
                let prod = self.mul_basis(i, j)?;
                let rhs = self.embed_element(&prod)?;
                if !lhs.agrees_with(&rhs) {
                    return Err(PresentationError::NotRingMap(self.symbol(i), self.symbol(j)));
                }
                let top = prod.keys().map(|&k| self.degree(k)).max();
                let want = self.degree(i) + self.degree(j);
                if top.is_some_and(|t| t > want) {
                    return Err(PresentationError::DegreeNotAdditive(self.symbol(i), self.symbol(j)));
                }
            }
        }
        Ok(())
    }

    /// Checks pole_order(embed(b)) = degree(b) and k₀-independence of the leading
    /// coefficients within each degree, for degrees ≤ `max_deg`.
    pub fn verify_leading_exact(&self, max_deg: u32) -> Result<(), PresentationError> {
        let coords = self.field.coordinates();
        let mut by_degree: BTreeMap<u32, Vec<linalg::Vector>> = BTreeMap::new();
        for idx in self.basis_up_to(max_deg) {
            let d = self.degree(idx);
            let w = self.embed(idx)?;
            if w.pole_order()? != PoleOrder::Finite(d as i64) {
                return Err(PresentationError::LeadingNotExact(d));
            }
            let lead = w.leading_coefficient().cloned().unwrap_or_else(Qi::zero);
            let (re, im) = FieldPair::split(&lead);
            by_degree.entry(d).or_default().push(if coords == 2 { vec![re, im] } else { vec![re] });
        }
        for (d, rows) in by_degree {
            if linalg::rank(&rows) != rows.len() {
                return Err(PresentationError::LeadingNotExact(d));
            }
        }
        Ok(())
    }

    /// Loads a user presentation from its text form. Claimed properties are
    /// verified (ring map always, leading terms when `leading_exact` is set).
    pub fn from_text(text: &str) -> Result<Self, PresentationError> {
        parse_presentation(text)
    }
}

impl FromStr for AffinePresentation {
    type Err = PresentationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_presentation(s)
    }
}

impl fmt::Display for AffinePresentation {
    /// Text form of user presentations; built-ins print their name.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Kind::User(u) = &self.kind else {
            return write!(f, "presentation {}", self.name);
        };
        writeln!(f, "presentation {}", self.name)?;
        if self.leading_exact {
            writeln!(f, "leading_exact")?;
        }
        writeln!(f, "field {}", if self.field == CoefficientField::Real { "real" } else { "complex" })?;
        for k in 1..u.symbols.len() {
            writeln!(f, "basis {} {}", u.symbols[k], u.degrees[k])?;
        }
        let mut keys: Vec<_> = u.products.keys().copied().collect();
        keys.sort();
        for (i, j) in keys {
            writeln!(f, "mul {} {} = {}", u.symbols[i], u.symbols[j], self.format_element(&u.products[&(i, j)]))?;
        }
        for k in 1..u.symbols.len() {
            writeln!(f, "embed {} = {}", u.symbols[k], u.embeds[k])?;
        }
        Ok(())
    }
}

enum ComboError {
    Symbol(PresentationError),
    Syntax(String),
}

/// Signed terms `[coeff*]symbol` or bare coefficients, separated by + or −.
fn parse_combination(
    s: &str,
    lookup: impl Fn(&str) -> Result<usize, PresentationError>,
) -> Result<Element, ComboError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(ComboError::Syntax("empty combination".into()));
    }
    if compact == "0" {
        return Ok(Element::new());
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for c in compact.chars() {
        let splits = (c == '+' || c == '-') && !matches!(prev, None | Some('*') | Some('/') | Some('^'));
        if splits {
            terms.push((negative, std::mem::take(&mut current)));
            negative = c == '-';
        } else if (c == '+' || c == '-') && prev.is_none() {
            negative = c == '-';
        } else {
            current.push(c);
        }
        prev = Some(c);
    }
    terms.push((negative, current));
    let mut out = Element::new();
    for (negative, term) in terms {
        if term.is_empty() {
            return Err(ComboError::Syntax("empty term".into()));
        }
        let (coef, idx) = match parse_rational(&term) {
            Ok(q) => (q, 0),
            Err(_) => match term.split_once('*') {
                Some((c, sym)) if parse_rational(c).is_ok() => {
                    (parse_rational(c).unwrap_or_else(|_| Rational::one()), lookup(sym).map_err(ComboError::Symbol)?)
                }
                _ => (Rational::one(), lookup(&term).map_err(ComboError::Symbol)?),
            },
        };
        let coef = if negative { -coef } else { coef };
        add_into(&mut out, &single(idx, coef), &Rational::one());
    }
    Ok(out)
}

fn parse_presentation(text: &str) -> Result<AffinePresentation, PresentationError> {
    let mut name = None;
    let mut leading_exact = false;
    let mut field = None;
    let mut symbols = vec!["1".to_string()];
    let mut degrees = vec![0u32];
    let mut raw_products: Vec<(usize, String, String, String)> = Vec::new();
    let mut raw_embeds: Vec<(usize, String, String)> = Vec::new();
    let err = |line: usize, msg: &str| PresentationError::Parse { line, msg: msg.to_string() };

    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "presentation" => {
                if rest.is_empty() {
                    return Err(err(line_no, "missing presentation name"));
                }
                name = Some(rest.to_string());
            }
            "leading_exact" => leading_exact = true,
            "field" => {
                field = Some(match rest {
                    "real" => CoefficientField::Real,
                    "complex" => CoefficientField::Complex,
                    _ => return Err(err(line_no, "field must be real or complex")),
                })
            }
            "basis" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [sym, deg] = parts[..] else {
                    return Err(err(line_no, "expected: basis <symbol> <degree>"));
                };
                if sym == "1" || symbols.iter().any(|s| s == sym) {
                    return Err(err(line_no, "duplicate basis symbol"));
                }
                if sym.contains(['*', '+', '-', '/', '=']) || sym.parse::<f64>().is_ok() {
                    return Err(err(line_no, "basis symbols may not contain operators or be numbers"));
                }
                let deg: u32 = deg.parse().map_err(|_| err(line_no, "degree must be a non-negative integer"))?;
                if deg > 4096 {
                    return Err(err(line_no, "degree too large"));
                }
                symbols.push(sym.to_string());
                degrees.push(deg);
            }
            "mul" => {
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| err(line_no, "expected: mul a b = combination"))?;
                let parts: Vec<&str> = lhs.split_whitespace().collect();
                let [a, b] = parts[..] else {
                    return Err(err(line_no, "expected two factors"));
                };
                raw_products.push((line_no, a.to_string(), b.to_string(), rhs.trim().to_string()));
            }
            "embed" => {
                let (sym, series) = rest.split_once('=').ok_or_else(|| err(line_no, "expected: embed sym = series"))?;
                raw_embeds.push((line_no, sym.trim().to_string(), series.trim().to_string()));
            }
            _ => return Err(err(line_no, "unknown directive")),
        }
    }

    let name = name.ok_or_else(|| err(0, "missing presentation line"))?;
    let lookup = |s: &str| {
        symbols.iter().position(|x| x == s.trim()).ok_or_else(|| PresentationError::UnknownSymbol(s.trim().to_string()))
    };

    let mut products = HashMap::new();
    for (line_no, a, b, rhs) in raw_products {
        let i = lookup(&a)?;
        let j = lookup(&b)?;
        if i == 0 || j == 0 {
            return Err(err(line_no, "products with 1 are implicit"));
        }
        let value = parse_combination(&rhs, lookup).map_err(|e| match e {
            ComboError::Symbol(e) => e,
            ComboError::Syntax(msg) => err(line_no, &msg),
        })?;
        if products.insert((i.min(j), i.max(j)), value).is_some() {
            return Err(err(line_no, "duplicate product rule"));
        }
    }

    let mut embeds: Vec<Option<Window>> = vec![None; symbols.len()];
    embeds[0] = Some(Window::one());
    for (line_no, sym, series) in raw_embeds {
        let k = lookup(&sym)?;
        if k == 0 {
            return Err(err(line_no, "the unit embeds as 1"));
        }
        let w: Window = series.parse().map_err(|e: SeriesError| err(line_no, &e.to_string()))?;
        if embeds[k].replace(w).is_some() {
            return Err(err(line_no, "duplicate embedding"));
        }
    }
    let embeds = embeds
        .into_iter()
        .enumerate()
        .map(|(k, w)| w.ok_or_else(|| err(0, &format!("no embedding for {}", symbols[k]))))
        .collect::<Result<Vec<_>, _>>()?;

    let inferred = if embeds.iter().any(|w| w.terms().any(|(_, c)| !c.is_real())) {
        CoefficientField::Complex
    } else {
        CoefficientField::Real
    };
    let field = match field {
        Some(CoefficientField::Real) if inferred == CoefficientField::Complex => {
            return Err(err(0, "field declared real but an embedding has imaginary coefficients"));
        }
        Some(f) => f,
        None => inferred,
    };

    let max_deg = degrees.iter().copied().max().unwrap_or(0);
    let pres = AffinePresentation {
        name,
        kind: Kind::User(UserData { symbols, degrees, products, embeds }),
        leading_exact,
        field,
    };
    // products whose degree leaves the slice cannot be checked; only test pairs that stay inside
    pres.verify_ring_map_within_slice(max_deg)?;
    if leading_exact {
        pres.verify_leading_exact(max_deg)?;
    }
    Ok(pres)
}

impl AffinePresentation {
    fn verify_ring_map_within_slice(&self, max_deg: u32) -> Result<(), PresentationError> {
        let basis = self.basis_up_to(max_deg);
        for (p, &i) in basis.iter().enumerate() {
            for &j in &basis[p..] {
                if self.degree(i) + self.degree(j) > max_deg || i == 0 || j == 0 {
                    continue;
                }
                let prod = self.mul_basis(i, j)?;
                let lhs = self.embed(i)?.mul(&self.embed(j)?);
                if !lhs.agrees_with(&self.embed_element(&prod)?) {
                    return Err(PresentationError::NotRingMap(self.symbol(i), self.symbol(j)));
                }
                if prod.keys().any(|&k| self.degree(k) > self.degree(i) + self.degree(j)) {
                    return Err(PresentationError::DegreeNotAdditive(self.symbol(i), self.symbol(j)));
                }
            }
        }
        Ok(())
    }
}
