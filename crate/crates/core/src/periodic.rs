//! Degree-zero extraction on two-periodic graded rings.
//!
//! The hfp model is A[u,v]/(uv − ξ) and the tate model A[v^±1] with
//! A = k[[ξ]]/ξ^M, |u| = 2, |v| = −2 and Bott element β = f·u. After inverting
//! β, the degree-zero part is generated over A by βv = fξ (and f⁻¹); Nygaard
//! (v-adic, hence ξ-adic) completion gives k((ξ)). With f = ξ^a·w, w a unit,
//! the parameter τ = fξ has valuation j = a + 1 and σ = ξ·w^(1/j) satisfies
//! τ = σ^j, so the carrier is k((σ)). Carrier elements are windows in the
//! pole exponent t = σ⁻¹, and Fil_n = τ^(−n)·k[[ξ]] is "pole order ≤ j·n".
//!
//! Formal elements are ξ-windows: `LaurentWindow`s in the exponent of ξ⁻¹.

use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg;
use crate::scalars::{Field, GaussianRational, Rational, ScalarError, TruncatedPowerSeries};
use crate::series::{LaurentWindow, SeriesError};

pub type Qi = GaussianRational;
pub type Tps = TruncatedPowerSeries<Qi>;
pub type Window = LaurentWindow<Qi>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodicError {
    #[error("Bott element is zero (f = 0)")]
    ZeroBott,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("truncation order must be at least 2")]
    OrderTooSmall,
    #[error("leading coefficient of the unit part has no exact {0}-th root")]
    NoRoot(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseField {
    Rational,
    Gaussian,
}

impl BaseField {
    pub fn label(self) -> &'static str {
        match self {
            BaseField::Rational => "Q",
            BaseField::Gaussian => "Q(i)",
        }
    }

    fn of(s: &Tps) -> Self {
        if s.coeffs().iter().all(Qi::is_real) {
            BaseField::Rational
        } else {
            BaseField::Gaussian
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoPeriodicPresentation {
    f: Tps,
    field: BaseField,
    trivial: bool,
}

impl TwoPeriodicPresentation {
    /// Mixed model over A = k[[ξ]]/ξ^M with M = `f.order()`.
    pub fn new(f: Tps) -> Result<Self, PeriodicError> {
        if f.order() < 2 {
            return Err(PeriodicError::OrderTooSmall);
        }
        let field = BaseField::of(&f);
        Ok(Self { f, field, trivial: false })
    }

    /// Same, forcing the coefficient field label (e.g. ℚ(i) for a real f).
    pub fn with_field(f: Tps, field: BaseField) -> Result<Self, PeriodicError> {
        let mut p = Self::new(f)?;
        if field == BaseField::Gaussian {
            p.field = field;
        }
        Ok(p)
    }

    pub fn parse(f: &str, order: usize) -> Result<Self, PeriodicError> {
        Self::new(parse_xi_series(f, order)?)
    }

    pub fn order(&self) -> usize {
        self.f.order()
    }

    pub fn f(&self) -> &Tps {
        &self.f
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// The exponent a in f = ξ^a·unit.
    pub fn bott_valuation(&self) -> Option<usize> {
        self.f.valuation()
    }

    /// βv = f·uv = fξ.
    pub fn beta_v(&self) -> Tps {
        self.f.shift(1).truncate(self.order())
    }
}

/// Trivial action: homotopy is R0[[v]] and the only coordinate of the
/// degree-zero ring is βv itself, carried at `prec` digits.
pub fn trivial_action_model(field: BaseField, prec: usize) -> Result<TwoPeriodicPresentation, PeriodicError> {
    let mut p = TwoPeriodicPresentation::new(Tps::constant(Qi::one(), prec))?;
    p.field = field;
    p.trivial = true;
    Ok(p)
}

#[derive(Debug, Clone)]
pub struct FilteredRingModel {
    field: BaseField,
    order: usize,
    digits: usize,
    jump_index: u32,
    trivial: bool,
    f: Tps,
    tau: Tps,
    sigma: Tps,
    xi_of_sigma: Tps,
    xi_inv: Window,
    /// ξ^k and ξ^(−k) in the carrier, k = 0, 1, …
    xi_pow: Vec<Window>,
    xi_inv_pow: Vec<Window>,
    round_trip: usize,
}

/// Steps 1–3 on the tate model, done symbolically.
pub fn tate_degree_zero(pres: &TwoPeriodicPresentation, prec: usize) -> Result<FilteredRingModel, PeriodicError> {
    let m = pres.order();
    let a = pres.bott_valuation().ok_or(PeriodicError::ZeroBott)?;
    let j = a + 1;
    // invert β: degree zero is A[(fξ)⁻¹]; complete ξ-adically; rebase to σ
    let w = pres.f.unshift(a).ok_or(PeriodicError::ZeroBott)?;
    let root = w.nth_root(j as u32).map_err(|e| match e {
        ScalarError::NoRoot(n) => PeriodicError::NoRoot(n),
        e => e.into(),
    })?;
    let sigma = root.shift(1).truncate(m);
    let xi_of_sigma = sigma.reversion()?;
    let usable = sigma.order();
    if usable < prec {
        return Err(PeriodicError::PrecisionExhausted(format!(
            "rebasing needs {prec} digits but only {usable} are known"
        )));
    }
    let tau = pres.beta_v();
    let round_trip = agreement_order(&sigma.compose(&xi_of_sigma)?, &Tps::xi(usable))
        .min(agreement_order(&xi_of_sigma.compose(&sigma)?, &Tps::xi(usable)));
    let xi_window = Window::from_power_series(&xi_of_sigma);
    let xi_inv = xi_window.inv(-(m as i64))?;
    let xi_pow = powers(&xi_window, usable);
    let xi_inv_pow = powers(&xi_inv, POWER_TABLE);
    Ok(FilteredRingModel {
        field: pres.field,
        order: m,
        digits: usable,
        jump_index: j as u32,
        trivial: pres.trivial,
        f: pres.f.clone(),
        tau,
        sigma,
        xi_of_sigma,
        xi_inv,
        xi_pow,
        xi_inv_pow,
        round_trip,
    })
}

/// Digits the rebasing round trip must reach for A = k[[ξ]]/ξ^M.
pub fn default_rebasing_digits(order: usize) -> usize {
    order * 3 / 4
}

/// Size of the precomputed table of pole powers ξ^(−k).
const POWER_TABLE: usize = 40;

fn powers(w: &Window, count: usize) -> Vec<Window> {
    let mut out = vec![Window::one()];
    for k in 1..count {
        out.push(out[k - 1].mul(w));
    }
    out
}

/// First index where two series differ, capped by the shorter order.
fn agreement_order(a: &Tps, b: &Tps) -> usize {
    let m = a.order().min(b.order());
    (0..m).find(|&k| a.coeff(k) != b.coeff(k)).unwrap_or(m)
}

impl FilteredRingModel {
    pub fn jump_index(&self) -> u32 {
        self.jump_index
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// The factor f of β = f·u.
    pub fn bott_factor(&self) -> &Tps {
        &self.f
    }

    /// τ = fξ as a series in ξ.
    pub fn parameter_expression(&self) -> &Tps {
        &self.tau
    }

    /// σ as a series in ξ.
    pub fn uniformizer(&self) -> &Tps {
        &self.sigma
    }

    /// ξ as a series in σ.
    pub fn reversion(&self) -> &Tps {
        &self.xi_of_sigma
    }

    /// Order up to which ξ → σ → ξ and σ → ξ → σ are the identity.
    pub fn round_trip_order(&self) -> usize {
        self.round_trip
    }

    pub fn carrier_label(&self) -> String {
        let var = if self.jump_index == 1 { "tau" } else { "sigma" };
        format!("{}(({var}))", self.field.label())
    }

    /// Number of σ-adic digits the rebasing resolves.
    pub fn digits(&self) -> usize {
        self.digits
    }

    /// Lowest pole exponent the carrier resolves.
    pub fn lowest_exponent(&self) -> i64 {
        1 - self.digits as i64
    }

    /// Rewrites a ξ-window (exponents of ξ⁻¹) in the carrier coordinate.
    pub fn to_carrier(&self, x: &Window) -> Result<Window, PeriodicError> {
        let top = x.top().unwrap_or(0);
        let bottom = x.terms().next().map_or(0, |(k, _)| k);
        if top >= self.xi_inv_pow.len() as i64 || -bottom >= self.xi_pow.len() as i64 {
            return Ok(x.compose(&self.xi_inv, self.lowest_exponent() - self.order as i64)?);
        }
        let floor = self.lowest_exponent() - self.order as i64;
        let mut acc = Window::from_terms([], Some(x.cutoff().map_or(floor, |c| c.max(floor))));
        for (k, c) in x.terms() {
            let power = if k >= 0 { &self.xi_inv_pow[k as usize] } else { &self.xi_pow[(-k) as usize] };
            acc = acc.add(&power.scale(c));
        }
        Ok(acc)
    }

    pub fn series_to_carrier(&self, s: &Tps) -> Result<Window, PeriodicError> {
        self.to_carrier(&Window::from_power_series(s))
    }

    /// τ⁻¹ as a ξ-window; the coordinate t of a curve chart is sent here.
    pub fn tau_inverse(&self) -> Result<Window, PeriodicError> {
        Ok(Window::from_power_series(&self.tau).inv(-(2 * self.order as i64))?)
    }

    pub fn tau(&self) -> Window {
        Window::from_power_series(&self.tau)
    }

    pub fn fil(&self, n: i64) -> Result<NygaardFil, PeriodicError> {
        nygaard_fil(self, n)
    }

    /// The residue map Fil₀ → k, i.e. θ read through the carrier.
    pub fn residue(&self, w: &Window) -> Result<Qi, PeriodicError> {
        if !w.fil_member(0)? {
            return Err(PeriodicError::Parse("element is not in Fil_0".into()));
        }
        w.coeff(0).ok_or_else(|| PeriodicError::PrecisionExhausted("constant term unknown".into()))
    }
}

/// Fil_n inside the carrier: pole order ≤ j·n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NygaardFil {
    pub n: i64,
    pub pole_bound: i64,
    pub scale: u32,
}

impl NygaardFil {
    pub fn contains(&self, w: &Window) -> Result<bool, PeriodicError> {
        Ok(w.fil_member(self.pole_bound)?)
    }

    /// dim_k Fil_n / Fil_(n−1).
    pub fn graded_dim(&self) -> usize {
        self.scale as usize
    }
}

pub fn nygaard_fil(model: &FilteredRingModel, n: i64) -> Result<NygaardFil, PeriodicError> {
    let j = model.jump_index as i64;
    if j * n.abs() >= model.digits as i64 {
        return Err(PeriodicError::PrecisionExhausted(format!("|n| = {} exceeds the working window", n.abs())));
    }
    Ok(NygaardFil { n, pole_bound: j * n, scale: model.jump_index })
}

/// Rank over k of the restriction of `gens` to exponents `lo..=hi`.
fn window_rank(gens: &[Window], lo: i64, hi: i64) -> Result<usize, PeriodicError> {
    let rows = gens
        .iter()
        .map(|g| {
            (lo..=hi)
                .rev()
                .map(|e| g.coeff(e).ok_or_else(|| PeriodicError::PrecisionExhausted(format!("exponent {e} unknown"))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(linalg::rank(&rows))
}

/// Image of the hfp degree-zero ring, compared with Fil₀.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HfpImage {
    /// Number of carrier digits compared (window σ⁰..σ^(N−1)).
    pub digits: usize,
    pub rank: usize,
    pub contained_in_fil0: bool,
    pub equals_fil0: bool,
    pub injective: bool,
}

/// The hfp side in degree zero is spanned over k by ξ^i and (βv)^k = τ^k.
pub fn hfp_degree_zero(model: &FilteredRingModel) -> Result<HfpImage, PeriodicError> {
    let m = model.digits;
    let xi_powers: Vec<Window> = (0..m)
        .map(|i| model.to_carrier(&Window::monomial(Qi::one(), -(i as i64))))
        .collect::<Result<_, _>>()?;
    let tau = model.tau();
    let mut tau_powers = Vec::new();
    let mut acc = Window::one();
    for _ in 0..m {
        tau_powers.push(model.to_carrier(&acc)?);
        acc = acc.mul(&tau);
    }
    let all: Vec<Window> = xi_powers.iter().chain(&tau_powers).cloned().collect();
    let contained = all.iter().map(|g| g.fil_member(0)).collect::<Result<Vec<_>, _>>()?.into_iter().all(|b| b);
    let lo = 1 - m as i64;
    let rank = window_rank(&all, lo, 0)?;
    // injectivity of A/ξ^N → carrier mod σ^N for every N
    let mut injective = true;
    for n in 1..=m {
        if window_rank(&xi_powers[..n], 1 - n as i64, 0)? != n {
            injective = false;
        }
    }
    Ok(HfpImage { digits: m, rank, contained_in_fil0: contained, equals_fil0: contained && rank == m, injective })
}

/// dim_k gr_n for each n, from the ranks of τ^(−n)·ξ^i on the slice (j(n−1), jn].
pub fn fil_table(model: &FilteredRingModel, range: std::ops::RangeInclusive<i64>) -> Result<Vec<(i64, usize)>, PeriodicError> {
    let j = model.jump_index as i64;
    let tau_inv = model.tau_inverse()?;
    let tau = model.tau();
    let mut out = Vec::new();
    for n in range {
        let fil = nygaard_fil(model, n)?;
        let shift = if n >= 0 { tau_inv.pow(n as u32) } else { tau.pow((-n) as u32) };
        let gens: Vec<Window> = (0..j)
            .map(|i| model.to_carrier(&shift.mul(&Window::monomial(Qi::one(), -i))))
            .collect::<Result<_, _>>()?;
        for g in &gens {
            if !fil.contains(g)? {
                return Err(PeriodicError::PrecisionExhausted(format!("generator escapes Fil_{n}")));
            }
        }
        out.push((n, window_rank(&gens, j * (n - 1) + 1, j * n)?));
    }
    Ok(out)
}

/// Polynomial-style rendering: `1 + 2*xi - 1/2*xi^3 + O(xi^16)`.
pub fn format_series(s: &Tps, var: &str) -> String {
    let mut out = String::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let text = c.to_string();
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) if c.is_real() => (true, rest.to_string()),
            _ => (false, text.clone()),
        };
        let body = if !c.is_real() && !c.re.is_zero() { format!("({body})") } else { body };
        let mono = match k {
            0 => body,
            _ => {
                let v = if k == 1 { var.to_string() } else { format!("{var}^{k}") };
                if body == "1" {
                    v
                } else {
                    format!("{body}*{v}")
                }
            }
        };
        if out.is_empty() {
            out = if neg { format!("-{mono}") } else { mono };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&mono);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    format!("{out} + O({var}^{})", s.order())
}

/// JSON trace of the three steps for one presentation.
pub fn pipeline_trace(pres: &TwoPeriodicPresentation, prec: usize) -> Result<Value, PeriodicError> {
    let model = tate_degree_zero(pres, prec)?;
    let hfp = hfp_degree_zero(&model)?;
    let j = model.jump_index as i64;
    let reach = ((model.digits as i64 - 1) / j).min(3);
    let table = fil_table(&model, -reach..=reach)?;
    let var = if pres.trivial { "bv" } else { "xi" };
    Ok(json!({
        "input": {
            "f": format_series(&pres.f, var),
            "M": pres.order(),
            "field": pres.field.label(),
            "trivial_action": pres.trivial,
        },
        "steps": {
            "invert_bott": format!("beta*v = {}", format_series(&model.tau, var)),
            "complete": format!("Nygaard completion is the {var}-adic completion"),
            "degree_zero": model.carrier_label(),
        },
        "beta_v": format_series(&model.tau, var),
        "uniformizer": format_series(&model.sigma, var),
        "reversion": format_series(&model.xi_of_sigma, "sigma"),
        "jump_index": model.jump_index,
        "round_trip_order": model.round_trip,
        "round_trip": if model.round_trip >= prec { "PASS" } else { "FAIL" },
        "hfp_image_equals_fil0": hfp.equals_fil0,
        "injective": hfp.injective,
        "fil_table": table.iter().map(|(n, d)| json!({"n": n, "gr_dim": d})).collect::<Vec<_>>(),
    }))
}

/// Parses expressions like `1 + xi`, `xi*(1+xi)`, `2 - i/2*xi^3` into A = k[[ξ]]/ξ^M.
/// The variable may be written `xi`, `x` or `bv`.
pub fn parse_xi_series(text: &str, order: usize) -> Result<Tps, PeriodicError> {
    if order < 2 {
        return Err(PeriodicError::OrderTooSmall);
    }
    if order > 4096 {
        return Err(PeriodicError::Parse("truncation order too large".into()));
    }
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, order, depth: 0 };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(PeriodicError::Parse(format!("unexpected trailing input at token {}", p.pos)));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    I,
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Tok>, PeriodicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            ' ' | '\t' => {}
            '+' => out.push(Tok::Plus),
            '-' => out.push(Tok::Minus),
            '*' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            '0'..='9' => {
                let start = k;
                while k + 1 < chars.len() && chars[k + 1].is_ascii_digit() {
                    k += 1;
                }
                let digits: String = chars[start..=k].iter().collect();
                if digits.len() > 200 {
                    return Err(PeriodicError::Parse("number too long".into()));
                }
                out.push(Tok::Num(crate::scalars::parse_rational(&digits)?));
            }
            _ if c.is_alphabetic() || c == 'ξ' => {
                let start = k;
                while k + 1 < chars.len() && chars[k + 1].is_alphanumeric() {
                    k += 1;
                }
                let word: String = chars[start..=k].iter().collect();
                match word.as_str() {
                    "i" => out.push(Tok::I),
                    "xi" | "x" | "ξ" | "bv" => out.push(Tok::Var),
                    _ => return Err(PeriodicError::Parse(format!("unknown symbol {word:?}"))),
                }
            }
            _ => return Err(PeriodicError::Parse(format!("unexpected character {c:?}"))),
        }
        k += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    order: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn constant(&self, c: Qi) -> Tps {
        Tps::constant(c, self.order)
    }

    fn expr(&mut self) -> Result<Tps, PeriodicError> {
        self.depth += 1;
        if self.depth > 64 {
            return Err(PeriodicError::Parse("expression nested too deeply".into()));
        }
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Tps, PeriodicError> {
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
                    if d.coeffs()[1..].iter().any(|c| !c.is_zero()) {
                        return Err(PeriodicError::Parse("division only by constants".into()));
                    }
                    let inv = d.theta().inv()?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Tps, PeriodicError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let Some(Tok::Num(e)) = self.peek().cloned() else {
            return Err(PeriodicError::Parse("exponent must be a non-negative integer".into()));
        };
        self.pos += 1;
        if !e.is_integer() {
            return Err(PeriodicError::Parse("exponent must be an integer".into()));
        }
        let e: usize = e.to_integer().try_into().map_err(|_| PeriodicError::Parse("exponent too large".into()))?;
        if base.valuation().is_some_and(|v| v >= 1) && e >= self.order {
            return Ok(self.constant(Qi::zero()));
        }
        if e > 4096 {
            return Err(PeriodicError::Parse("exponent too large".into()));
        }
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<Tps, PeriodicError> {
        let tok = self.peek().cloned().ok_or_else(|| PeriodicError::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(q) => Ok(self.constant(Qi::from_rational(q))),
            Tok::I => Ok(self.constant(Qi::i())),
            Tok::Var => Ok(Tps::xi(self.order)),
            Tok::Minus => Ok(self.atom()?.neg()),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(PeriodicError::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            t => Err(PeriodicError::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational;

    const M: usize = 16;

    fn q(n: i64, d: i64) -> Qi {
        Qi::from_rational(rational(n, d))
    }

    fn model(f: &str) -> FilteredRingModel {
        tate_degree_zero(&TwoPeriodicPresentation::parse(f, M).unwrap(), 12).unwrap()
    }

    #[test]
    fn parser_reads_polynomials() {
        let f = parse_xi_series("xi*(1+xi) - 1/2*xi^3 + i", 6).unwrap();
        assert_eq!(f.coeffs(), &[Qi::i(), q(1, 1), q(1, 1), q(-1, 2), q(0, 1), q(0, 1)]);
        assert_eq!(parse_xi_series("xi^7", 4).unwrap(), Tps::constant(Qi::zero(), 4));
        assert!(parse_xi_series("xi +", 4).is_err());
        assert!(parse_xi_series("y", 4).is_err());
        assert!(parse_xi_series("(((1", 4).is_err());
        assert!(parse_xi_series("1/xi", 4).is_err());
        assert!(matches!(parse_xi_series("1", 1), Err(PeriodicError::OrderTooSmall)));
    }

    #[test]
    fn unit_bott_gives_tau_equal_xi() {
        let m = model("1");
        assert_eq!(m.jump_index(), 1);
        assert_eq!(m.parameter_expression(), &Tps::xi(M));
        assert_eq!(m.reversion(), &Tps::xi(M));
        assert_eq!(m.carrier_label(), "Q((tau))");
        assert_eq!(m.round_trip_order(), M);
        let hfp = hfp_degree_zero(&m).unwrap();
        assert!(hfp.equals_fil0 && hfp.injective);
        // τ⁻¹ is not in the image: pole order one
        let tau_inv = m.to_carrier(&m.tau_inverse().unwrap()).unwrap();
        assert!(!tau_inv.fil_member(0).unwrap());
    }

    #[test]
    fn reversion_for_one_plus_xi() {
        let m = model("1+xi");
        // ξ = τ − τ² + 2τ³ − 5τ⁴ + …  (signed Catalan numbers)
        let catalan = [0, 1, -1, 2, -5, 14, -42, 132];
        for (k, c) in catalan.iter().enumerate() {
            assert_eq!(m.reversion().coeff(k), q(*c, 1));
        }
        // back-substitution
        let back = m.parameter_expression().compose(m.reversion()).unwrap();
        assert_eq!(back, Tps::xi(M));
        assert!(m.round_trip_order() >= 12);
    }

    #[test]
    fn divided_bott_jump() {
        for (f, j) in [("xi", 2), ("xi*(1+xi)", 2), ("xi^2", 3), ("2", 1), ("xi^2*(3+xi)", 3)] {
            let pres = TwoPeriodicPresentation::parse(f, M).unwrap();
            match tate_degree_zero(&pres, 12) {
                Ok(m) => {
                    assert_eq!(m.jump_index(), j, "{f}");
                    let hfp = hfp_degree_zero(&m).unwrap();
                    assert!(hfp.equals_fil0 && hfp.injective, "{f}");
                }
                Err(PeriodicError::NoRoot(_)) => assert_eq!(f, "xi^2*(3+xi)"),
                Err(e) => panic!("{f}: {e}"),
            }
        }
        let m = model("xi");
        // τ = ξ², the carrier is still k((ξ)) with σ = ξ
        assert_eq!(m.parameter_expression().valuation(), Some(2));
        assert_eq!(m.uniformizer(), &Tps::xi(M));
    }

    #[test]
    fn zero_bott_rejected() {
        let pres = TwoPeriodicPresentation::parse("0", M).unwrap();
        assert!(matches!(tate_degree_zero(&pres, 12), Err(PeriodicError::ZeroBott)));
    }

    #[test]
    fn nygaard_levels() {
        let m = model("1");
        let f0 = nygaard_fil(&m, 0).unwrap();
        assert!(f0.contains(&Window::monomial(Qi::one(), -3)).unwrap());
        assert!(!f0.contains(&Window::monomial(Qi::one(), 1)).unwrap());
        let f2 = nygaard_fil(&m, 2).unwrap();
        // τ⁻² ∈ Fil_2, τ⁻³ ∉ Fil_2
        let ti = m.to_carrier(&m.tau_inverse().unwrap()).unwrap();
        assert!(f2.contains(&ti.pow(2)).unwrap());
        assert!(!f2.contains(&ti.pow(3)).unwrap());
        for (_, d) in fil_table(&m, -3..=3).unwrap() {
            assert_eq!(d, 1);
        }
        assert!(nygaard_fil(&m, 40).is_err());
    }

    #[test]
    fn reparametrization_invariance() {
        let base = fil_table(&model("xi"), -3..=3).unwrap();
        for f in ["xi*(1+xi)", "4*xi", "xi*(1 - xi + 3*xi^2)"] {
            assert_eq!(fil_table(&model(f), -3..=3).unwrap(), base, "{f}");
        }
        let unit = fil_table(&model("1"), -3..=3).unwrap();
        assert_eq!(fil_table(&model("1+xi"), -3..=3).unwrap(), unit);
    }

    #[test]
    fn residue_is_theta() {
        let m = model("1+xi");
        let s = parse_xi_series("3 + 2*xi - xi^5", M).unwrap();
        let w = m.series_to_carrier(&s).unwrap();
        assert_eq!(m.residue(&w).unwrap(), s.theta());
    }

    #[test]
    fn trivial_model() {
        let p = trivial_action_model(BaseField::Gaussian, 12).unwrap();
        let m = tate_degree_zero(&p, 12).unwrap();
        assert_eq!(m.jump_index(), 1);
        assert_eq!(m.carrier_label(), "Q(i)((tau))");
        let a = Window::exact([(1, Qi::i()), (0, q(2, 1))]);
        let b = Window::exact([(2, q(1, 3)), (-1, q(1, 1))]);
        assert!(a.mul(&b).fil_member(3).unwrap());
        let trace = pipeline_trace(&p, 12).unwrap();
        assert_eq!(trace["input"]["trivial_action"], true);
    }

    #[test]
    fn trace_fields() {
        let pres = TwoPeriodicPresentation::parse("1+xi", M).unwrap();
        let t = pipeline_trace(&pres, 12).unwrap();
        assert_eq!(t["jump_index"], 1);
        assert_eq!(t["round_trip"], "PASS");
        assert_eq!(t["hfp_image_equals_fil0"], true);
        assert!(t["reversion"].as_str().unwrap().starts_with("sigma - sigma^2 + 2*sigma^3"));
    }
}
