//! The graded ring P = ⊕_{n≥0} H⁰(X, O(n)) up to a degree bound.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cohomology::{compute, CohomologyError, CohomologyOptions};
use crate::linalg;
use crate::presentation::{AffinePresentation, Element, PresentationError};
use crate::scalars::{Field, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SectionRingError {
    #[error("product of degrees {0} and {1} is not a section of degree {2}")]
    NotInSpan(u32, u32, u32),
    #[error("H^0 in degree {0} is not certified")]
    Uncertified(u32),
    #[error("degree bound must be at least {0}")]
    DegreeTooSmall(u32),
    #[error("{0} is not associative or commutative on a basis triple")]
    LawFails(&'static str),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

#[derive(Debug, Clone)]
pub struct SectionRing {
    pres: AffinePresentation,
    /// P_n basis, ascending (lowest pole order first).
    bases: Vec<Vec<Element>>,
    labels: Vec<Vec<String>>,
    /// tables[m][n][i][j] = coordinates of b_i·b_j in P_{m+n}, for m ≤ n.
    tables: Vec<Vec<Vec<Vec<Vec<Rational>>>>>,
    max_degree: u32,
}

/// Flattens elements onto a shared list of basis indices.
fn dense(elements: &[Element]) -> (Vec<usize>, Vec<Vec<Rational>>) {
    let mut support: Vec<usize> = elements.iter().flat_map(|e| e.keys().copied()).collect();
    support.sort_unstable();
    support.dedup();
    let rows = elements
        .iter()
        .map(|e| support.iter().map(|k| e.get(k).cloned().unwrap_or_else(Rational::zero)).collect())
        .collect();
    (support, rows)
}

fn coordinates_in(basis: &[Element], x: &Element) -> Option<Vec<Rational>> {
    let mut all = basis.to_vec();
    all.push(x.clone());
    let (_, mut rows) = dense(&all);
    let target = rows.pop().expect("target row present");
    linalg::solve(&rows, &target)
}

pub fn build_section_ring(pres: &AffinePresentation, d: u32) -> Result<SectionRing, SectionRingError> {
    let mut bases = Vec::new();
    let mut labels = Vec::new();
    for n in 0..=d {
        let res = compute(pres, n as i64, &CohomologyOptions::default())?;
        if !res.h0_certified {
            return Err(SectionRingError::Uncertified(n));
        }
        bases.push(res.h0_basis.into_iter().rev().collect::<Vec<_>>());
        labels.push(res.h0_text.into_iter().rev().collect::<Vec<_>>());
    }
    let mut tables = vec![Vec::new(); d as usize + 1];
    for m in 0..=d {
        for n in 0..=d {
            if n < m || m + n > d {
                tables[m as usize].push(Vec::new());
                continue;
            }
            let target = &bases[(m + n) as usize];
            let mut table = Vec::new();
            for a in &bases[m as usize] {
                let mut row = Vec::new();
                for b in &bases[n as usize] {
                    let prod = pres.multiply(a, b)?;
                    row.push(coordinates_in(target, &prod).ok_or(SectionRingError::NotInSpan(m, n, m + n))?);
                }
                table.push(row);
            }
            tables[m as usize].push(table);
        }
    }
    Ok(SectionRing { pres: pres.clone(), bases, labels, tables, max_degree: d })
}

impl SectionRing {
    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn basis(&self, n: u32) -> &[Element] {
        &self.bases[n as usize]
    }

    pub fn labels(&self, n: u32) -> &[String] {
        &self.labels[n as usize]
    }

    /// Product of basis elements b_i ∈ P_m and b_j ∈ P_n, in P_{m+n} coordinates.
    pub fn product(&self, m: u32, i: usize, n: u32, j: usize) -> &[Rational] {
        if m <= n {
            &self.tables[m as usize][n as usize][i][j]
        } else {
            &self.tables[n as usize][m as usize][j][i]
        }
    }

    /// Bilinear extension of `product` to coordinate vectors.
    pub fn mul(&self, m: u32, x: &[Rational], n: u32, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.bases[(m + n) as usize].len()];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let s = a.clone() * b;
                for (o, c) in out.iter_mut().zip(self.product(m, i, n, j)) {
                    *o = o.clone() + &(s.clone() * c);
                }
            }
        }
        out
    }

    /// Associativity and commutativity on all basis triples of total degree ≤ D.
    pub fn check_laws(&self) -> Result<(), SectionRingError> {
        let d = self.max_degree;
        let unit = |n: u32, i: usize| {
            let mut v = vec![Rational::zero(); self.bases[n as usize].len()];
            v[i] = Rational::one();
            v
        };
        for m in 0..=d {
            for n in 0..=d - m {
                for i in 0..self.bases[m as usize].len() {
                    for j in 0..self.bases[n as usize].len() {
                        if self.product(m, i, n, j) != self.product(n, j, m, i) {
                            return Err(SectionRingError::LawFails("commutativity"));
                        }
                        let ab = self.product(m, i, n, j).to_vec();
                        for p in 0..=d - m - n {
                            for k in 0..self.bases[p as usize].len() {
                                let left = self.mul(m + n, &ab, p, &unit(p, k));
                                let bc = self.product(n, j, p, k).to_vec();
                                let right = self.mul(m, &unit(m, i), n + p, &bc);
                                if left != right {
                                    return Err(SectionRingError::LawFails("associativity"));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn hilbert_function(sr: &SectionRing) -> Vec<usize> {
    sr.bases.iter().map(Vec::len).collect()
}

/// [1, 2, …, D+1]: polynomial ring in two variables.
pub fn p1_reference(d: u32) -> Vec<usize> {
    (0..=d as usize).map(|n| n + 1).collect()
}

/// [1, 3, …, 2D+1].
pub fn twistor_reference(d: u32) -> Vec<usize> {
    (0..=d as usize).map(|n| 2 * n + 1).collect()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// dim of (three variables modulo one quadric) in degree n: C(n+2, 2) − C(n, 2).
pub fn quadric_quotient_dims(d: u32) -> Vec<usize> {
    (0..=d as usize).map(|n| binomial(n + 2, 2) - binomial(n, 2)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub n: u32,
    pub sym_dim: usize,
    pub dim: usize,
    pub rank: usize,
    pub surjective: bool,
    pub kernel_dim: usize,
    /// Kernel basis over the Sym^n monomials (recorded for n ≤ 3).
    pub kernel: Vec<Vec<Rational>>,
    pub kernel_text: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationReport {
    pub generators: Vec<String>,
    pub degrees: Vec<DegreeReport>,
}

impl GenerationReport {
    pub fn surjective(&self) -> bool {
        self.degrees.iter().all(|d| d.surjective)
    }
}

/// Multisets of size n from 0..k in lexicographic order.
pub fn monomials(k: usize, n: u32) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(k: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(k, n, i, cur, out);
            cur.pop();
        }
    }
    rec(k, n as usize, 0, &mut cur, &mut out);
    out
}

fn format_relation(coeffs: &[Rational], monos: &[Vec<usize>], labels: &[String]) -> String {
    let one = Rational::one();
    let parts: Vec<String> = coeffs
        .iter()
        .zip(monos)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, mono)| {
            let word = mono.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join("*");
            if *c == one {
                word
            } else if -c.clone() == one {
                format!("-{word}")
            } else {
                format!("{c}*{word}")
            }
        })
        .collect();
    parts.join(" + ").replace("+ -", "- ")
}

/// Sym^n(P₁) → P_n for 0 ≤ n ≤ D: surjectivity and relations.
pub fn degree_one_generation(sr: &SectionRing) -> Result<GenerationReport, SectionRingError> {
    if sr.max_degree < 2 {
        return Err(SectionRingError::DegreeTooSmall(2));
    }
    let gens = sr.bases[1].clone();
    let k = gens.len();
    let mut degrees = Vec::new();
    // products of monomials as affine elements, extended one factor at a time
    let mut previous: Vec<(Vec<usize>, Element)> = vec![(Vec::new(), Element::from([(0, Rational::one())]))];
    for n in 0..=sr.max_degree {
        let monos = monomials(k, n);
        let images: Vec<Element> = if n == 0 {
            vec![previous[0].1.clone()]
        } else {
            let mut next = Vec::new();
            for mono in &monos {
                let (head, last) = mono.split_at(mono.len() - 1);
                let base = &previous.iter().find(|(m, _)| m == head).expect("prefix monomial present").1;
                next.push((mono.clone(), sr.pres.multiply(base, &gens[last[0]])?));
            }
            previous = next;
            previous.iter().map(|(_, e)| e.clone()).collect()
        };
        let (_, rows) = dense(&images);
        let dim = sr.bases[n as usize].len();
        let rank = linalg::rank(&rows);
        let kernel = if n <= 3 {
            let height = rows.first().map_or(0, Vec::len);
            let priority: Vec<usize> = (0..monos.len()).collect();
            linalg::kernel(&rows, height, &priority)
        } else {
            Vec::new()
        };
        let kernel_text = kernel.iter().map(|v| format_relation(v, &monos, &sr.labels[1])).collect();
        // images are sections, so the image sits inside P_n
        for img in &images {
            if !img.is_empty() && coordinates_in(&sr.bases[n as usize], img).is_none() {
                return Err(SectionRingError::NotInSpan(1, n.saturating_sub(1), n));
            }
        }
        degrees.push(DegreeReport {
            n,
            sym_dim: monos.len(),
            dim,
            rank,
            surjective: rank == dim,
            kernel_dim: monos.len() - rank,
            kernel,
            kernel_text,
        });
    }
    Ok(GenerationReport { generators: sr.labels[1].clone(), degrees })
}

pub fn report_json(sr: &SectionRing, gen: &GenerationReport) -> Value {
    let relations: Map<String, Value> = gen
        .degrees
        .iter()
        .filter(|d| d.n <= 3 && !d.kernel_text.is_empty())
        .map(|d| (d.n.to_string(), json!(d.kernel_text)))
        .collect();
    json!({
        "curve": sr.pres.name(),
        "max_degree": sr.max_degree,
        "hilbert": hilbert_function(sr),
        "generators": gen.generators,
        "surjective": gen.surjective(),
        "degrees": gen.degrees.iter().map(|d| json!({
            "n": d.n,
            "sym_dim": d.sym_dim,
            "dim": d.dim,
            "surjective": d.surjective,
            "relations": d.kernel_dim,
        })).collect::<Vec<_>>(),
        "relations": relations,
        "certified": true,
    })
}
