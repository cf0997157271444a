//! Command implementations. Each returns a report with a JSON body and an
//! aligned text rendering.

use std::fmt::Debug;
use std::fs;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use recollement::assembly::{dream, AssemblyError};
use recollement::cohomology::{compute, CohomologyOptions, CohomologyResult};
use recollement::harbater::{
    divide_exact, evaluate, kernel_generator, local_completion, membership, radius_lower_bound, HarbaterElement,
    HarbaterError, Membership, Poly, Qi,
};
use recollement::periodic::{default_rebasing_digits, parse_xi_series, pipeline_trace, trivial_action_model, BaseField, TwoPeriodicPresentation};
use recollement::presentation::{p1_presentation, twistor_presentation, AffinePresentation};
use recollement::scalars::{parse_rational, Rational};
use recollement::section_ring::{build_section_ring, degree_one_generation, hilbert_function, report_json};

use crate::config::{Command, ConfigError, Format, HarbaterOp, RunConfig};

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Config(String),
    #[error("{op}: {msg} [{kind}]")]
    Compute { op: String, kind: String, msg: String },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Compute { .. } => 1,
        }
    }

    fn compute<E: Debug + std::fmt::Display>(op: impl Into<String>, e: E) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        AppError::Compute { op: op.into(), kind, msg: e.to_string() }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e.to_string())
    }
}

pub struct Report {
    pub json: Value,
    pub table: String,
    /// False when a reported check failed; the process then exits with 1.
    pub success: bool,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.json).expect("report serializes")),
            Format::Table => self.table.clone(),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, AppError> {
    cfg.validate()?;
    match cfg.command()? {
        Command::Cohomology => cmd_cohomology(cfg),
        Command::SectionRing => cmd_section_ring(cfg),
        Command::Pipeline => cmd_pipeline(cfg),
        Command::Dream => cmd_dream(cfg),
        Command::Harbater => cmd_harbater(cfg),
    }
}

/// `p1`, `twistor`, or a path to a presentation file.
pub fn load_curve(name: &str) -> Result<AffinePresentation, AppError> {
    match name {
        "p1" => Ok(p1_presentation()),
        "twistor" => Ok(twistor_presentation()),
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| AppError::Config(format!("unknown curve {path:?} (expected p1, twistor or a file): {e}")))?;
            text.parse().map_err(|e| AppError::Config(format!("presentation file {path}: {e}")))
        }
    }
}

fn gr_text(res: &CohomologyResult, h1: bool) -> String {
    let parts: Vec<String> = res
        .graded
        .iter()
        .map(|(m, d)| (m, if h1 { d.1 } else { d.0 }))
        .filter(|(_, d)| *d > 0)
        .map(|(m, d)| format!("{m}:{d}"))
        .collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(" ")
    }
}

pub fn cmd_cohomology(cfg: &RunConfig) -> Result<Report, AppError> {
    let curve = load_curve(cfg.curve.as_deref().unwrap_or_default())?;
    let degrees = cfg.degrees(None)?;
    let opts = CohomologyOptions { cutoff: cfg.cutoff, window_bottom: cfg.window_bottom, allow_uncertified: cfg.uncertified_ok };
    let results: Vec<CohomologyResult> = degrees
        .par_iter()
        .map(|&n| compute(&curve, n, &opts).map_err(|e| AppError::compute(format!("cohomology n={n}"), e)))
        .collect::<Result<_, _>>()?;

    let json = match &results[..] {
        [one] => one.to_json(),
        many => Value::Array(many.iter().map(CohomologyResult::to_json).collect()),
    };
    let cutoff_note = match cfg.cutoff {
        Some(d) => format!("forced {d}"),
        None => "default max(n,0)+4".into(),
    };
    let mut t = format!("curve {} | cutoff {cutoff_note}\n", curve.name());
    t += &format!("{:>4}  {:>4}  {:>4}  {:<24}  {:<14}  {:>6}  {:>6}  {}\n", "n", "h0", "h1", "gr H0", "gr H1", "cutoff", "bottom", "certified");
    for r in &results {
        let cert = if r.certified {
            "yes".to_string()
        } else {
            format!("NO (h0 {}, h1 {})", r.h0_certified, r.h1_certified)
        };
        t += &format!(
            "{:>4}  {:>4}  {:>4}  {:<24}  {:<14}  {:>6}  {:>6}  {}\n",
            r.n,
            r.dims.0,
            r.dims.1,
            gr_text(r, false),
            gr_text(r, true),
            r.cutoff_used,
            r.window_bottom,
            cert
        );
    }
    t += "bases\n";
    for r in &results {
        if !r.h0_text.is_empty() {
            t += &format!("  n={:<4} H0: {}\n", r.n, r.h0_text.join(", "));
        }
        if !r.h1_basis.is_empty() {
            let h1: Vec<String> = r.h1_basis.iter().map(|w| w.to_string()).collect();
            t += &format!("  n={:<4} H1: {}\n", r.n, h1.join(", "));
        }
    }
    Ok(Report { json, table: t, success: true })
}

pub fn cmd_section_ring(cfg: &RunConfig) -> Result<Report, AppError> {
    let curve = load_curve(cfg.curve.as_deref().unwrap_or_default())?;
    let d = cfg.max_degree.unwrap_or(4);
    let sr = build_section_ring(&curve, d).map_err(|e| AppError::compute("section-ring build", e))?;
    let laws = sr.check_laws();
    let gen = degree_one_generation(&sr).map_err(|e| AppError::compute("section-ring generation", e))?;
    let mut json = report_json(&sr, &gen);
    json["ring_laws"] = json!(if laws.is_ok() { "PASS" } else { "FAIL" });

    let hilbert: Vec<String> = hilbert_function(&sr).iter().map(|h| h.to_string()).collect();
    let mut t = format!("curve {} | max degree {d} | default cutoffs, certified\n", curve.name());
    t += &format!("hilbert     {}\n", hilbert.join(" "));
    t += &format!("generators  {}\n", gen.generators.join(" "));
    t += &format!("{:>4}  {:>6}  {:>4}  {:>4}  {:<10}  {}\n", "deg", "sym", "dim", "rank", "surjective", "relations");
    for r in &gen.degrees {
        t += &format!("{:>4}  {:>6}  {:>4}  {:>4}  {:<10}  {}\n", r.n, r.sym_dim, r.dim, r.rank, r.surjective, r.kernel_dim);
    }
    for r in gen.degrees.iter().filter(|r| !r.kernel_text.is_empty()) {
        t += &format!("relations in degree {}: {}\n", r.n, r.kernel_text.join("; "));
    }
    t += &format!("ring laws   {}\n", if laws.is_ok() { "PASS" } else { "FAIL" });
    Ok(Report { json, table: t, success: laws.is_ok() })
}

fn kv_table(v: &Value) -> String {
    let Some(obj) = v.as_object() else {
        return format!("{v}\n");
    };
    let width = obj.keys().map(|k| k.len()).max().unwrap_or(0);
    obj.iter()
        .map(|(k, v)| {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            format!("{k:<width$}  {shown}\n")
        })
        .collect()
}

pub fn cmd_pipeline(cfg: &RunConfig) -> Result<Report, AppError> {
    let m = cfg.order(16)?;
    let pres = if cfg.trivial_action {
        trivial_action_model(BaseField::Rational, m).map_err(|e| AppError::compute("pipeline", e))?
    } else {
        let f = parse_xi_series(cfg.f.as_deref().unwrap_or_default(), m).map_err(|e| AppError::Config(format!("--f: {e}")))?;
        TwoPeriodicPresentation::new(f).map_err(|e| AppError::compute("pipeline", e))?
    };
    let trace = pipeline_trace(&pres, default_rebasing_digits(m)).map_err(|e| AppError::compute("pipeline", e))?;
    let success = trace["round_trip"] == "PASS" && trace["hfp_image_equals_fil0"] == true && trace["injective"] == true;
    Ok(Report { table: kv_table(&trace), json: trace, success })
}

fn parse_point(text: &str) -> Result<Qi, AppError> {
    text.parse().map_err(|e| AppError::Config(format!("invalid point {text:?}: {e}")))
}

fn parse_radius(text: Option<&str>) -> Result<Rational, AppError> {
    let text = text.ok_or(AppError::Config("missing required setting `r`".into()))?;
    let r = parse_rational(text).map_err(|e| AppError::Config(format!("invalid radius {text:?}: {e}")))?;
    if r <= Rational::from_integer(0.into()) || r >= Rational::from_integer(1.into()) {
        return Err(AppError::Config(format!("radius must satisfy 0 < r < 1, got {r}")));
    }
    Ok(r)
}

fn parse_element(text: &str) -> Result<HarbaterElement, AppError> {
    text.parse().map_err(|e| AppError::Config(format!("invalid element {text:?}: {e}")))
}

pub fn cmd_dream(cfg: &RunConfig) -> Result<Report, AppError> {
    let x = parse_point(cfg.x.as_deref().unwrap_or_default())?;
    let r = parse_radius(cfg.r.as_deref())?;
    if x.norm() > r.clone() * &r {
        return Err(AppError::Config(format!("point {x} lies outside the disc of radius {r}")));
    }
    let m = cfg.order(16)?;
    let ns = cfg.degrees(Some("-3..3"))?;
    let f = cfg.f.as_deref().map(parse_element).transpose()?;
    let curves: Vec<AffinePresentation> = match cfg.curve.as_deref().unwrap_or("twistor") {
        "both" => vec![twistor_presentation(), p1_presentation()],
        name => vec![load_curve(name)?],
    };
    let refs: Vec<&AffinePresentation> = curves.iter().collect();
    let opts = CohomologyOptions { cutoff: cfg.cutoff, window_bottom: cfg.window_bottom, allow_uncertified: cfg.uncertified_ok };
    let report = dream(&x, &r, m, f.as_ref(), &refs, &ns, &opts).map_err(|e| match e {
        AssemblyError::Harbater(e) => AppError::compute("dream local completion", e),
        AssemblyError::Periodic(e) => AppError::compute("dream pipeline", e),
        AssemblyError::Cohomology(e) => AppError::compute("dream cohomology", e),
    })?;
    let mut t = format!(
        "point {} | r {} | M {} | kernel generator {} | jump {} | carrier {}\n",
        report.x, report.r, report.order, report.generator, report.jump_index, report.carrier
    );
    t += &format!("bott factor {}\n", report.bott_factor);
    t += &format!("{:<10}  {:>4}  {:>9}  {:>9}  {:<9}  {}\n", "curve", "n", "glued", "direct", "certified", "agree");
    for row in &report.rows {
        t += &format!(
            "{:<10}  {:>4}  {:>9}  {:>9}  {:<9}  {}\n",
            row.curve,
            row.n,
            format!("{}/{}", row.glued.dims.0, row.glued.dims.1),
            format!("{}/{}", row.direct.dims.0, row.direct.dims.1),
            row.glued.certified && row.direct.certified,
            if row.agrees() { "yes" } else { "NO" }
        );
    }
    t += &format!("result {}\n", if report.agrees() { "PASS" } else { "FAIL" });
    Ok(Report { json: report.to_json(), table: t, success: report.agrees() })
}

fn harbater_error(op: &str, e: HarbaterError) -> AppError {
    match e {
        HarbaterError::BadRadius(_) | HarbaterError::PointOutsideDisc(..) | HarbaterError::Parse(_) => AppError::Config(e.to_string()),
        e => AppError::compute(format!("harbater {op}"), e),
    }
}

pub fn cmd_harbater(cfg: &RunConfig) -> Result<Report, AppError> {
    let op = cfg.op.ok_or(AppError::Config("missing required setting `op`".into()))?;
    let e = parse_element(cfg.element.as_deref().unwrap_or_default())?;
    let mut out = Map::new();
    out.insert("element".into(), json!(e.to_string()));
    out.insert("ring".into(), json!(format!("{:?}", e.ring())));
    let need_x = || parse_point(cfg.x.as_deref().ok_or(AppError::Config("missing required setting `x`".into()))?);
    let mut success = true;
    match op {
        HarbaterOp::Radius => {
            let c = radius_lower_bound(&e);
            out.insert("certificate".into(), json!(c.to_string()));
            out.insert("method".into(), json!(c.method.tag()));
            out.insert("radius_sq".into(), json!(c.radius_sq.as_ref().map(|q| q.to_string())));
            out.insert("lower_bound".into(), json!(c.lower_bound().map(|q| q.to_string())));
            out.insert("exact".into(), json!(c.exact));
        }
        HarbaterOp::Membership => {
            let r = parse_radius(cfg.r.as_deref())?;
            out.insert("r".into(), json!(r.to_string()));
            match membership(&e, &r).map_err(|err| harbater_error("membership", err))? {
                Membership::Member(c) => {
                    out.insert("verdict".into(), json!("Member"));
                    out.insert("certificate".into(), json!(c.to_string()));
                }
                Membership::NotMember(w) => {
                    out.insert("verdict".into(), json!("NotMember"));
                    out.insert("witness".into(), json!(w.description));
                }
                Membership::Unknown(c) => {
                    out.insert("verdict".into(), json!("Unknown"));
                    out.insert("certificate".into(), json!(c.to_string()));
                }
            }
        }
        HarbaterOp::Evaluate => {
            let r = parse_radius(cfg.r.as_deref())?;
            let x = need_x()?;
            let v = evaluate(&e, &x, &r).map_err(|err| harbater_error("evaluate", err))?;
            out.insert("x".into(), json!(x.to_string()));
            out.insert("value".into(), json!(v.center.to_string()));
            out.insert("error_radius".into(), json!(v.radius.to_string()));
            out.insert("exact".into(), json!(v.is_exact()));
        }
        HarbaterOp::Divide => {
            let r = parse_radius(cfg.r.as_deref())?;
            let x = need_x()?;
            let g = kernel_generator(&x);
            let q = divide_exact(&e, &g, &r).map_err(|err| harbater_error("divide", err))?;
            let back = q.mul(&HarbaterElement::polynomial(Poly::from_bigints(&g)));
            let ok = back.coefficients(50) == e.coefficients(50);
            success = ok;
            out.insert("x".into(), json!(x.to_string()));
            out.insert("kernel_generator".into(), json!(Poly::from_bigints(&g).to_string()));
            out.insert("quotient".into(), json!(q.to_string()));
            out.insert("quotient_ring".into(), json!(format!("{:?}", q.ring())));
            out.insert("quotient_radius".into(), json!(radius_lower_bound(&q).to_string()));
            out.insert("round_trip_50".into(), json!(if ok { "PASS" } else { "FAIL" }));
        }
        HarbaterOp::Expand => {
            let r = parse_radius(cfg.r.as_deref())?;
            let x = need_x()?;
            let m = cfg.order(16)?;
            let lc = local_completion(&x, &r, m).map_err(|err| harbater_error("local completion", err))?;
            let s = lc.expansion(&e).map_err(|err| harbater_error("expand", err))?;
            let value = evaluate(&e, &x, &r).map_err(|err| harbater_error("evaluate", err))?;
            let ok = lc.theta(&s) == value.center;
            success = ok;
            out.insert("x".into(), json!(x.to_string()));
            out.insert("kernel_generator".into(), json!(Poly::from_bigints(&lc.generator).to_string()));
            out.insert("expansion".into(), json!(recollement::periodic::format_series(&s, "xi")));
            out.insert("theta".into(), json!(lc.theta(&s).to_string()));
            out.insert("theta_matches_evaluate".into(), json!(if ok { "PASS" } else { "FAIL" }));
        }
    }
    let json = Value::Object(out);
    Ok(Report { table: kv_table(&json), json, success })
}

#[cfg(test)]
mod tests {
    use super::*;
    use recollement::cohomology::default_cutoff;

    fn cfg(cmd: Command) -> RunConfig {
        RunConfig { command: Some(cmd), ..Default::default() }
    }

    #[test]
    fn twistor_json_shape() {
        let c = RunConfig { curve: Some("twistor".into()), n: Some("2".into()), ..cfg(Command::Cohomology) };
        let rep = run(&c).unwrap();
        assert_eq!(rep.json["h0"], 5);
        assert_eq!(rep.json["h1"], 0);
        assert_eq!(rep.json["gr"], json!({"0": 1, "1": 2, "2": 2}));
    }

    #[test]
    fn forced_cutoff_fails() {
        let c = RunConfig { curve: Some("p1".into()), n: Some("-8".into()), cutoff: Some(1), ..cfg(Command::Cohomology) };
        let err = run(&c).err().unwrap();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("CutoffTooSmall"), "{err}");
        assert!(default_cutoff(-8) > 1);
    }

    #[test]
    fn unknown_curve_is_config_error() {
        let c = RunConfig { curve: Some("no-such-curve".into()), n: Some("0".into()), ..cfg(Command::Cohomology) };
        assert_eq!(run(&c).err().unwrap().exit_code(), 2);
    }

    #[test]
    fn harbater_divide() {
        let c = RunConfig {
            op: Some(HarbaterOp::Divide),
            element: Some("9T^2 - 1".into()),
            x: Some("1/3".into()),
            r: Some("1/2".into()),
            ..cfg(Command::Harbater)
        };
        let rep = run(&c).unwrap();
        assert_eq!(rep.json["quotient"], "1 + 3*T");
        assert_eq!(rep.json["round_trip_50"], "PASS");
    }
}
