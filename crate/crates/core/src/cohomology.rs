//! H⁰ and H¹ of O(n) from an affine chart plus a formal neighborhood of ∞.
//!
//! H⁰ is the fiber product {a ∈ A : embed(a) ∈ Fil_n}, H¹ the cokernel of
//! A ⊕ Fil_n → K. Both are computed on the finite slice A_{≤D} by exact k₀
//! linear algebra on window coordinates; a k₁ coefficient contributes two
//! coordinates (re, im) when the chart is complex, one otherwise.
//!
//! Coordinates are ordered by decreasing exponent, re before im, so the
//! natural echelon form already has pivots at the highest exponents.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::linalg::{self, Echelon, Vector};
use crate::periodic::{FilteredRingModel, PeriodicError};
use crate::presentation::{AffinePresentation, CoefficientField, Element, PresentationError, Qi, Window};
use crate::scalars::{Field, FieldPair, Rational};
use crate::series::SeriesError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("cutoff {cutoff} too small for n = {n} (need at least {required})")]
    CutoffTooSmall { n: i64, cutoff: u32, required: u32 },
    #[error("H^1 dimension still changing at the cutoff for n = {n}: {dims:?}")]
    NotStabilized { n: i64, dims: Vec<usize> },
    #[error("window coefficient at exponent {0} is not known")]
    PrecisionExhausted(i64),
    #[error("real chart has a non-real coefficient at exponent {0}")]
    FieldMismatch(i64),
    #[error("window bottom {window_bottom} lies above n = {n}")]
    InvalidWindow { n: i64, window_bottom: i64 },
    #[error("result is not certified: {0}")]
    Uncertified(String),
    #[error("formal embedding is not multiplicative on {0} * {1}")]
    EmbeddingNotRingMap(String, String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Periodic(#[from] PeriodicError),
}

/// Affine basis together with its images in the local Laurent field.
pub trait LocalEmbedding {
    fn label(&self) -> String;
    fn leading_exact(&self) -> bool;
    fn field(&self) -> CoefficientField;
    fn basis_up_to(&self, d: u32) -> Vec<usize>;
    fn degree(&self, idx: usize) -> u32;
    fn symbol(&self, idx: usize) -> String;
    fn window(&self, idx: usize) -> Result<Window, CohomologyError>;
    /// Fil_n means pole order ≤ scale·n.
    fn filtration_scale(&self) -> i64 {
        1
    }
    /// Highest degree for which the basis is complete; `None` if unbounded.
    fn complete_up_to(&self) -> Option<u32> {
        None
    }
}

impl LocalEmbedding for AffinePresentation {
    fn label(&self) -> String {
        self.name().to_string()
    }
    fn leading_exact(&self) -> bool {
        AffinePresentation::leading_exact(self)
    }
    fn field(&self) -> CoefficientField {
        AffinePresentation::field(self)
    }
    fn basis_up_to(&self, d: u32) -> Vec<usize> {
        AffinePresentation::basis_up_to(self, d)
    }
    fn degree(&self, idx: usize) -> u32 {
        AffinePresentation::degree(self, idx)
    }
    fn symbol(&self, idx: usize) -> String {
        AffinePresentation::symbol(self, idx)
    }
    fn window(&self, idx: usize) -> Result<Window, CohomologyError> {
        Ok(self.embed(idx)?)
    }
    fn complete_up_to(&self) -> Option<u32> {
        self.max_degree()
    }
}

#[derive(Debug, Clone, Default)]
pub struct CohomologyOptions {
    /// Degree cutoff D; defaults to max(n, 0) + 4.
    pub cutoff: Option<u32>,
    /// Lowest exponent of the H¹ window; defaults to n.
    pub window_bottom: Option<i64>,
    /// Accept a cutoff below the default (results are then uncertified).
    pub allow_uncertified: bool,
}

pub fn default_cutoff(n: i64) -> u32 {
    n.max(0) as u32 + 4
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyResult {
    pub n: i64,
    pub label: String,
    pub h0_basis: Vec<Element>,
    /// `h0_basis` written in the chart's symbols.
    pub h0_text: Vec<String>,
    pub h1_basis: Vec<Window>,
    pub dims: (usize, usize),
    pub graded: BTreeMap<i64, (usize, usize)>,
    pub h0_certified: bool,
    pub h1_certified: bool,
    pub certified: bool,
    pub cutoff_used: u32,
    pub window_bottom: i64,
    pub scale: i64,
}

/// Windows of A_{≤D} in basis order.
struct Slice {
    basis: Vec<usize>,
    windows: Vec<Window>,
}

impl Slice {
    fn build(emb: &dyn LocalEmbedding, d: u32) -> Result<Self, CohomologyError> {
        let basis = emb.basis_up_to(d);
        let windows = basis.iter().map(|&k| emb.window(k)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { basis, windows })
    }

    fn prefix(&self, emb: &dyn LocalEmbedding, d: u32) -> Self {
        let count = self.basis.iter().take_while(|&&k| emb.degree(k) <= d).count();
        Self { basis: self.basis[..count].to_vec(), windows: self.windows[..count].to_vec() }
    }

    /// Highest pole order present, `None` if every window is zero.
    fn top(&self) -> Result<Option<i64>, CohomologyError> {
        let mut top = None;
        for w in &self.windows {
            if let Some(d) = w.pole_order()?.finite() {
                top = Some(top.map_or(d, |t: i64| t.max(d)));
            }
        }
        Ok(top)
    }
}

/// k₀ coordinates of `w` at exponents hi, hi−1, …, lo+1.
fn coordinates(w: &Window, lo: i64, hi: i64, field: CoefficientField) -> Result<Vector, CohomologyError> {
    let mut out = Vec::new();
    for e in (lo + 1..=hi).rev() {
        let c = w.coeff(e).ok_or(CohomologyError::PrecisionExhausted(e))?;
        let (re, im) = FieldPair::split(&c);
        match field {
            CoefficientField::Real => {
                if !im.is_zero() {
                    return Err(CohomologyError::FieldMismatch(e));
                }
                out.push(re);
            }
            CoefficientField::Complex => {
                out.push(re);
                out.push(im);
            }
        }
    }
    Ok(out)
}

/// Kernel of A_{≤D} → K/Fil_n, as coefficient vectors over the slice basis.
fn h0_kernel(slice: &Slice, bound: i64, field: CoefficientField) -> Result<Vec<Vector>, CohomologyError> {
    let hi = slice.top()?.unwrap_or(bound).max(bound);
    let columns =
        slice.windows.iter().map(|w| coordinates(w, bound, hi, field)).collect::<Result<Vec<_>, _>>()?;
    let height = field.coordinates() * (hi - bound) as usize;
    let priority: Vec<usize> = (0..slice.basis.len()).rev().collect();
    Ok(linalg::kernel(&columns, height, &priority))
}

/// Non-pivot coordinates (exponent, is_imaginary) of the image of A_{≤D}
/// in span{t^e : bound < e ≤ top}.
fn h1_cokernel(slice: &Slice, bound: i64, field: CoefficientField) -> Result<Vec<(i64, bool)>, CohomologyError> {
    let Some(hi) = slice.top()? else {
        return Ok(Vec::new());
    };
    if hi <= bound {
        return Ok(Vec::new());
    }
    let rows = slice.windows.iter().map(|w| coordinates(w, bound, hi, field)).collect::<Result<Vec<_>, _>>()?;
    let ech = Echelon::natural(&rows);
    let per = field.coordinates();
    let width = per * (hi - bound) as usize;
    Ok((0..width)
        .filter(|c| !ech.pivots.contains(c))
        .map(|c| (hi - (c / per) as i64, c % per == 1))
        .collect())
}

fn to_element(slice: &Slice, v: &Vector) -> Element {
    slice.basis.iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(&k, c)| (k, c.clone())).collect()
}

fn format_element(emb: &dyn LocalEmbedding, e: &Element) -> String {
    if e.is_empty() {
        return "0".into();
    }
    let one = <Rational as Field>::one();
    let parts: Vec<String> = e
        .iter()
        .rev()
        .map(|(k, c)| {
            let sym = emb.symbol(*k);
            if sym == "1" {
                c.to_string()
            } else if *c == one {
                sym
            } else if -c.clone() == one {
                format!("-{sym}")
            } else {
                format!("{c}*{sym}")
            }
        })
        .collect();
    parts.join(" + ").replace("+ -", "- ")
}

/// ceil(e / j) for j ≥ 1: the smallest m with e ≤ j·m.
fn level_of(e: i64, j: i64) -> i64 {
    e.div_euclid(j) + i64::from(e.rem_euclid(j) != 0)
}

/// H⁰ and H¹ of O(n) on the chart.
pub fn compute(emb: &dyn LocalEmbedding, n: i64, opts: &CohomologyOptions) -> Result<CohomologyResult, CohomologyError> {
    let required = n.max(0) as u32;
    let default = default_cutoff(n);
    let d = opts.cutoff.unwrap_or(default);
    if d < required || (d < default && !opts.allow_uncertified) {
        return Err(CohomologyError::CutoffTooSmall { n, cutoff: d, required: default });
    }
    let window_bottom = opts.window_bottom.unwrap_or(n);
    if window_bottom > n {
        return Err(CohomologyError::InvalidWindow { n, window_bottom });
    }
    let j = emb.filtration_scale();
    let field = emb.field();
    let full = Slice::build(emb, d + 2)?;
    let slice = full.prefix(emb, d);

    // H⁰ and its t-adic graded pieces
    let kernel = h0_kernel(&slice, j * n, field)?;
    let h0_basis: Vec<Element> = kernel.iter().map(|v| to_element(&slice, v)).collect();
    let mut graded: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    let mut upper = kernel.len();
    let mut m = n;
    while upper > 0 {
        let lower = h0_kernel(&slice, j * (m - 1), field)?.len();
        if upper > lower {
            graded.entry(m).or_default().0 = upper - lower;
        }
        upper = lower;
        m -= 1;
    }

    // H¹ with stabilization over D, D+1, D+2
    let reps = h1_cokernel(&slice, j * n, field)?;
    let mut dims = vec![reps.len()];
    for extra in 1..=2 {
        dims.push(h1_cokernel(&full.prefix(emb, d + extra), j * n, field)?.len());
    }
    if dims.iter().any(|&x| x != dims[0]) {
        return Err(CohomologyError::NotStabilized { n, dims });
    }
    for (e, _) in &reps {
        graded.entry(level_of(*e, j)).or_default().1 += 1;
    }
    let h1_basis: Vec<Window> =
        reps.iter().map(|&(e, imag)| Window::monomial(if imag { Qi::i() } else { Qi::one() }, e)).collect();

    let forced = d < default;
    let complete = emb.complete_up_to().is_none_or(|c| c >= required);
    let h0_certified = emb.leading_exact() && complete && !forced;
    let h1_certified = emb.leading_exact() && !forced;
    Ok(CohomologyResult {
        n,
        label: emb.label(),
        h0_text: h0_basis.iter().map(|e| format_element(emb, e)).collect(),
        dims: (h0_basis.len(), h1_basis.len()),
        h0_basis,
        h1_basis,
        graded,
        h0_certified,
        h1_certified,
        certified: h0_certified && h1_certified,
        cutoff_used: d,
        window_bottom,
        scale: j,
    })
}

/// H⁰ part at an explicit cutoff.
pub fn h0(emb: &dyn LocalEmbedding, n: i64, d: u32) -> Result<CohomologyResult, CohomologyError> {
    compute(emb, n, &CohomologyOptions { cutoff: Some(d), window_bottom: None, allow_uncertified: true })
}

/// H¹ part at an explicit cutoff and window bottom.
pub fn h1(emb: &dyn LocalEmbedding, n: i64, d: u32, window_bottom: i64) -> Result<CohomologyResult, CohomologyError> {
    compute(emb, n, &CohomologyOptions { cutoff: Some(d), window_bottom: Some(window_bottom), allow_uncertified: true })
}

/// m ↦ (dim gr_m H⁰, dim gr_m H¹) for a certified result.
pub fn graded_pieces(res: &CohomologyResult) -> Result<BTreeMap<i64, (usize, usize)>, CohomologyError> {
    if !res.certified {
        return Err(CohomologyError::Uncertified(format!("n = {}", res.n)));
    }
    Ok(res.graded.clone())
}

pub fn euler_characteristic(emb: &dyn LocalEmbedding, n: i64, cutoff: Option<u32>) -> Result<i64, CohomologyError> {
    let res = compute(emb, n, &CohomologyOptions { cutoff, ..Default::default() })?;
    if !res.certified {
        return Err(CohomologyError::Uncertified(format!("n = {n}")));
    }
    Ok(res.dims.0 as i64 - res.dims.1 as i64)
}

impl CohomologyResult {
    /// Canonical JSON (object keys sorted).
    pub fn to_json(&self) -> Value {
        let gr0: Map<String, Value> =
            self.graded.iter().filter(|(_, d)| d.0 > 0).map(|(m, d)| (m.to_string(), json!(d.0))).collect();
        let gr1: Map<String, Value> =
            self.graded.iter().filter(|(_, d)| d.1 > 0).map(|(m, d)| (m.to_string(), json!(d.1))).collect();
        json!({
            "curve": self.label,
            "n": self.n,
            "h0": self.dims.0,
            "h1": self.dims.1,
            "gr": gr0,
            "gr1": gr1,
            "certified": self.certified,
            "h0_certified": self.h0_certified,
            "h1_certified": self.h1_certified,
            "cutoff": self.cutoff_used,
            "window_bottom": self.window_bottom,
            "bases": {
                "h0": self.h0_text,
                "h1": self.h1_basis.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            },
        })
    }
}

/// A presentation glued to the degree-zero ring of a pipeline: basis
/// elements go to ξ-windows, then to the carrier k((σ)).
pub struct GluedChart<'a> {
    pres: &'a AffinePresentation,
    model: &'a FilteredRingModel,
    image: Box<dyn Fn(usize) -> Result<Window, CohomologyError> + 'a>,
}

impl LocalEmbedding for GluedChart<'_> {
    fn label(&self) -> String {
        format!("{} over {}", self.pres.name(), self.model.carrier_label())
    }
    fn leading_exact(&self) -> bool {
        self.pres.leading_exact()
    }
    fn field(&self) -> CoefficientField {
        self.pres.field()
    }
    fn basis_up_to(&self, d: u32) -> Vec<usize> {
        self.pres.basis_up_to(d)
    }
    fn degree(&self, idx: usize) -> u32 {
        self.pres.degree(idx)
    }
    fn symbol(&self, idx: usize) -> String {
        self.pres.symbol(idx)
    }
    fn window(&self, idx: usize) -> Result<Window, CohomologyError> {
        Ok(self.model.to_carrier(&(self.image)(idx)?)?)
    }
    fn filtration_scale(&self) -> i64 {
        self.model.jump_index() as i64
    }
    fn complete_up_to(&self) -> Option<u32> {
        self.pres.max_degree()
    }
}

/// The chart coordinate t goes to τ⁻¹ = (βv)⁻¹: each basis element's
/// Laurent polynomial is evaluated at t = τ⁻¹ in ξ-windows.
pub struct ChartEmbedding<'a> {
    pres: &'a AffinePresentation,
    tau_inv_pow: Vec<Window>,
    tau_pow: Vec<Window>,
}

const CHART_POWERS: usize = 24;

impl<'a> ChartEmbedding<'a> {
    pub fn new(pres: &'a AffinePresentation, model: &FilteredRingModel) -> Result<Self, CohomologyError> {
        let tau_inv = model.tau_inverse()?;
        let tau = model.tau();
        let mut tau_inv_pow = vec![Window::one()];
        let mut tau_pow = vec![Window::one()];
        for k in 1..CHART_POWERS {
            tau_inv_pow.push(tau_inv_pow[k - 1].mul(&tau_inv));
            tau_pow.push(tau_pow[k - 1].mul(&tau));
        }
        Ok(Self { pres, tau_inv_pow, tau_pow })
    }

    pub fn image(&self, idx: usize) -> Result<Window, CohomologyError> {
        let w = self.pres.embed(idx)?;
        let mut acc = Window::zero();
        for (e, c) in w.terms() {
            let table = if e >= 0 { &self.tau_inv_pow } else { &self.tau_pow };
            let k = e.unsigned_abs() as usize;
            let power = match table.get(k) {
                Some(p) => p.clone(),
                None => table[1].pow(k as u32),
            };
            acc = acc.add(&power.scale(c));
        }
        if let Some(c) = w.cutoff() {
            acc = acc.with_cutoff(c);
        }
        Ok(acc)
    }
}

/// Checks that `image` is multiplicative on basis pairs up to degree 4.
fn check_ring_map(
    pres: &AffinePresentation,
    image: &dyn Fn(usize) -> Result<Window, CohomologyError>,
) -> Result<(), CohomologyError> {
    let max = pres.max_degree().map_or(4, |m| m.min(4));
    let basis = pres.basis_up_to(max);
    let images = basis.iter().map(|&k| image(k)).collect::<Result<Vec<_>, _>>()?;
    let lookup = |k: usize| -> Result<Window, CohomologyError> {
        match basis.iter().position(|&b| b == k) {
            Some(p) => Ok(images[p].clone()),
            None => image(k),
        }
    };
    for (p, &i) in basis.iter().enumerate() {
        for (q, &j) in basis.iter().enumerate().skip(p) {
            if pres.degree(i) + pres.degree(j) > max {
                continue;
            }
            let prod = pres.mul_basis(i, j)?;
            let mut rhs = Window::zero();
            for (k, c) in &prod {
                rhs = rhs.add(&lookup(*k)?.scale(&Qi::from_rational(c.clone())));
            }
            if !images[p].mul(&images[q]).agrees_with(&rhs) {
                return Err(CohomologyError::EmbeddingNotRingMap(pres.symbol(i), pres.symbol(j)));
            }
        }
    }
    Ok(())
}

/// Glues `pres` to `formal` along `embedding` (basis index ↦ ξ-window),
/// verifying multiplicativity first.
pub fn glue<'a>(
    pres: &'a AffinePresentation,
    formal: &'a FilteredRingModel,
    embedding: Box<dyn Fn(usize) -> Result<Window, CohomologyError> + 'a>,
) -> Result<GluedChart<'a>, CohomologyError> {
    check_ring_map(pres, embedding.as_ref())?;
    Ok(GluedChart { pres, model: formal, image: embedding })
}

/// Standard gluing t = τ⁻¹.
pub fn standard_glue<'a>(pres: &'a AffinePresentation, formal: &'a FilteredRingModel) -> Result<GluedChart<'a>, CohomologyError> {
    let chart = ChartEmbedding::new(pres, formal)?;
    glue(pres, formal, Box::new(move |k| chart.image(k)))
}

/// Cohomology of the curve assembled from `pres` and the pipeline output.
pub fn curve_from_parts<'a>(
    pres: &'a AffinePresentation,
    formal: &'a FilteredRingModel,
    embedding: Box<dyn Fn(usize) -> Result<Window, CohomologyError> + 'a>,
    n: i64,
    opts: &CohomologyOptions,
) -> Result<CohomologyResult, CohomologyError> {
    let chart = glue(pres, formal, embedding)?;
    compute(&chart, n, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::{tate_degree_zero, TwoPeriodicPresentation};
    use crate::presentation::{p1_presentation, twistor_presentation};

    fn run(p: &AffinePresentation, n: i64) -> CohomologyResult {
        compute(p, n, &CohomologyOptions::default()).unwrap()
    }

    #[test]
    fn p1_examples() {
        let p = p1_presentation();
        let r = run(&p, 2);
        assert_eq!(r.dims, (3, 0));
        assert_eq!(r.h0_text, ["t^2", "t", "1"]);
        assert!(r.certified);
        assert_eq!(run(&p, -1).dims, (0, 0));
        let r = run(&p, -3);
        assert_eq!(r.dims, (0, 2));
        assert_eq!(r.h1_basis, [Window::monomial(Qi::one(), -1), Window::monomial(Qi::one(), -2)]);
        assert_eq!(run(&p, 0).dims.1, 0);
        let g = graded_pieces(&run(&p, 1)).unwrap();
        assert_eq!(g, BTreeMap::from([(0, (1, 0)), (1, (1, 0))]));
    }

    #[test]
    fn twistor_examples() {
        let p = twistor_presentation();
        let r = run(&p, 1);
        assert_eq!(r.dims, (3, 0));
        let r = run(&p, -1);
        assert_eq!(r.dims, (0, 1));
        assert_eq!(r.h1_basis, [Window::monomial(Qi::i(), 0)]);
        let g = graded_pieces(&run(&p, 2)).unwrap();
        assert_eq!(g, BTreeMap::from([(0, (1, 0)), (1, (2, 0)), (2, (2, 0))]));
        let g = graded_pieces(&run(&p, -2)).unwrap();
        assert_eq!(g, BTreeMap::from([(-1, (0, 2)), (0, (0, 1))]));
        assert_eq!(euler_characteristic(&p, 0, None).unwrap(), 1);
    }

    #[test]
    fn euler_characteristics_are_linear() {
        let p1 = p1_presentation();
        let tw = twistor_presentation();
        for n in -4..=4 {
            assert_eq!(euler_characteristic(&p1, n, None).unwrap(), n + 1);
            assert_eq!(euler_characteristic(&tw, n, None).unwrap(), 2 * n + 1);
        }
    }

    #[test]
    fn cutoff_policy() {
        let p = p1_presentation();
        let opts = CohomologyOptions { cutoff: Some(1), ..Default::default() };
        assert!(matches!(compute(&p, -8, &opts), Err(CohomologyError::CutoffTooSmall { .. })));
        let forced = CohomologyOptions { cutoff: Some(1), allow_uncertified: true, ..Default::default() };
        let r = compute(&p, -8, &forced).unwrap();
        assert_eq!(r.dims, (0, 7));
        assert!(!r.certified);
        assert!(matches!(h0(&p, 3, 2), Err(CohomologyError::CutoffTooSmall { .. })));
        assert!(matches!(h1(&p, -2, 4, 0), Err(CohomologyError::InvalidWindow { .. })));
    }

    #[test]
    fn cutoff_independence() {
        let tw = twistor_presentation();
        for n in -3..=3 {
            let a = run(&tw, n);
            let b = compute(&tw, n, &CohomologyOptions { cutoff: Some(default_cutoff(n) + 3), ..Default::default() }).unwrap();
            assert_eq!(a.h0_basis, b.h0_basis);
            assert_eq!(a.h1_basis, b.h1_basis);
        }
    }

    #[test]
    fn json_shape() {
        let v = run(&twistor_presentation(), 2).to_json();
        assert_eq!(v["h0"], 5);
        assert_eq!(v["h1"], 0);
        assert_eq!(v["gr"], json!({"0": 1, "1": 2, "2": 2}));
        let text = serde_json::to_string(&v).unwrap();
        let again: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), text);
    }

    #[test]
    fn glued_matches_direct() {
        let pres = TwoPeriodicPresentation::parse("1+xi", 16).unwrap();
        let model = tate_degree_zero(&pres, 12).unwrap();
        for p in [p1_presentation(), twistor_presentation()] {
            let chart = standard_glue(&p, &model).unwrap();
            for n in -3..=3 {
                let direct = run(&p, n);
                let glued = compute(&chart, n, &CohomologyOptions::default()).unwrap();
                assert_eq!(glued.dims, direct.dims, "{} n={n}", p.name());
                assert_eq!(glued.graded, direct.graded, "{} n={n}", p.name());
            }
        }
    }

    #[test]
    fn glue_rejects_non_ring_map() {
        let pres = TwoPeriodicPresentation::parse("1", 16).unwrap();
        let model = tate_degree_zero(&pres, 12).unwrap();
        let p = p1_presentation();
        // t ↦ τ⁻¹ but t² ↦ 2τ⁻²
        let chart = ChartEmbedding::new(&p, &model).unwrap();
        let bad = Box::new(move |k: usize| chart.image(k).map(|w| if k == 2 { w.scale(&Qi::from_i64(2)) } else { w }));
        assert!(matches!(
            curve_from_parts(&p, &model, bad, 1, &CohomologyOptions::default()),
            Err(CohomologyError::EmbeddingNotRingMap(..))
        ));
    }

    #[test]
    fn divided_bott_does_not_stabilize() {
        let pres = TwoPeriodicPresentation::parse("xi", 40).unwrap();
        let model = tate_degree_zero(&pres, 12).unwrap();
        let p = p1_presentation();
        let chart = standard_glue(&p, &model).unwrap();
        assert!(matches!(
            compute(&chart, 0, &CohomologyOptions::default()),
            Err(CohomologyError::NotStabilized { .. })
        ));
    }

    #[test]
    fn user_slice_matches_p1() {
        let text = "presentation slice\nleading_exact\nbasis t 1\nbasis t2 2\nbasis t3 3\nbasis t4 4\n\
                    mul t t = t2\nmul t t2 = t3\nmul t t3 = t4\nmul t2 t2 = t4\n\
                    embed t = t\nembed t2 = t^2\nembed t3 = t^3\nembed t4 = t^4\n";
        let slice: AffinePresentation = text.parse().unwrap();
        let p1 = p1_presentation();
        for n in -3..=4 {
            let opts = CohomologyOptions { cutoff: Some(4), allow_uncertified: true, ..Default::default() };
            let a = compute(&slice, n, &opts).unwrap();
            let b = run(&p1, n);
            assert_eq!(a.dims, b.dims, "n={n}");
        }
        // beyond the slice H⁰ is not certified
        let r = compute(&slice, 5, &CohomologyOptions::default()).unwrap();
        assert!(!r.h0_certified);
    }
}
