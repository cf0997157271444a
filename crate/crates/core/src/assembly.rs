//! End-to-end route: local completion at a point, the periodic pipeline on
//! it, and the glued curve compared against the direct chart computation.

use serde_json::{json, Value};
use thiserror::Error;

use crate::cohomology::{compute, standard_glue, CohomologyError, CohomologyOptions, CohomologyResult};
use crate::harbater::{local_completion, HarbaterElement, HarbaterError, Qi};
use crate::periodic::{default_rebasing_digits, format_series, tate_degree_zero, PeriodicError};
use crate::presentation::AffinePresentation;
use crate::scalars::Rational;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Harbater(#[from] HarbaterError),
    #[error(transparent)]
    Periodic(#[from] PeriodicError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

#[derive(Debug, Clone)]
pub struct DreamRow {
    pub curve: String,
    pub n: i64,
    pub glued: CohomologyResult,
    pub direct: CohomologyResult,
}

impl DreamRow {
    pub fn agrees(&self) -> bool {
        self.glued.dims == self.direct.dims && self.glued.graded == self.direct.graded
    }
}

#[derive(Debug, Clone)]
pub struct DreamReport {
    pub x: Qi,
    pub r: Rational,
    pub order: usize,
    pub generator: String,
    pub bott_factor: String,
    pub jump_index: u32,
    pub carrier: String,
    pub rows: Vec<DreamRow>,
}

impl DreamReport {
    pub fn agrees(&self) -> bool {
        self.rows.iter().all(DreamRow::agrees)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                json!({
                    "curve": row.curve,
                    "n": row.n,
                    "glued": {"h0": row.glued.dims.0, "h1": row.glued.dims.1, "certified": row.glued.certified},
                    "direct": {"h0": row.direct.dims.0, "h1": row.direct.dims.1, "certified": row.direct.certified},
                    "agree": row.agrees(),
                })
            })
            .collect();
        json!({
            "x": self.x.to_string(),
            "r": self.r.to_string(),
            "M": self.order,
            "kernel_generator": self.generator,
            "bott_factor": self.bott_factor,
            "jump_index": self.jump_index,
            "carrier": self.carrier,
            "rows": rows,
            "result": if self.agrees() { "PASS" } else { "FAIL" },
        })
    }
}

/// Runs the full route at x for each curve and degree, comparing with the
/// direct chart computation.
pub fn dream(
    x: &Qi,
    r: &Rational,
    order: usize,
    f: Option<&HarbaterElement>,
    curves: &[&AffinePresentation],
    ns: &[i64],
    opts: &CohomologyOptions,
) -> Result<DreamReport, AssemblyError> {
    let local = local_completion(x, r, order)?;
    let pres = local.presentation(f)?;
    let model = tate_degree_zero(&pres, default_rebasing_digits(order))?;
    let mut rows = Vec::new();
    for curve in curves {
        let chart = standard_glue(curve, &model)?;
        for &n in ns {
            let glued = compute(&chart, n, opts)?;
            let direct = compute(*curve, n, opts)?;
            rows.push(DreamRow { curve: curve.name().to_string(), n, glued, direct });
        }
    }
    let generator = crate::harbater::Poly::from_bigints(&local.generator).to_string();
    Ok(DreamReport {
        x: x.clone(),
        r: r.clone(),
        order,
        generator,
        bott_factor: format_series(pres.f(), "xi"),
        jump_index: model.jump_index(),
        carrier: model.carrier_label(),
        rows,
    })
}
