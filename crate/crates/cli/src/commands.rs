use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use geosubdiv::io::{diagnostics_doc, CylinderTraceDoc, DataDoc, TraceDoc};
use geosubdiv::karcher::default_tolerance;
use geosubdiv::mask::{format_rational, rational_to_f64, MaskDoc};
use geosubdiv::render::{render_svg, RenderOptions};
use geosubdiv::subdivision::{check_contractivity, check_displacement_safety, estimate_holder};
use geosubdiv::{covering, refine as refine_polygon, Error, Manifold, Mask, Polygon, Rational};
use num_traits::One;
use serde_json::json;

use crate::{AnalyzeArgs, RefineArgs, RenderArgs, VerifyArgs};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_NOT_AFFINE: u8 = 2;
pub const EXIT_TOO_SHORT: u8 = 3;
pub const EXIT_NOT_CERTIFIED: u8 = 4;
pub const EXIT_NOT_HYPERBOLIC: u8 = 5;
pub const EXIT_VERIFY_FAILED: u8 = 6;

/// Slack below the analytic Hölder exponent tolerated by `verify`.
const HOLDER_SLACK: f64 = 0.05;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotAffineInvariant { .. } => EXIT_NOT_AFFINE,
            Error::PolygonTooShort { .. } => EXIT_TOO_SHORT,
            Error::NotCertified { .. } => EXIT_NOT_CERTIFIED,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::new(EXIT_FAILURE, format!("{e:#}"))
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Built-in scheme name, or a JSON file holding `{dilation, offset, coeffs}`.
fn load_scheme(spec: &str) -> Result<Mask, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let doc: MaskDoc = serde_json::from_str(&read(path)?).map_err(Error::from)?;
        return Ok(Mask::try_from(doc)?);
    }
    Ok(Mask::named(spec)?)
}

pub fn analyze(args: &AnalyzeArgs) -> Outcome {
    let mask = load_scheme(&args.scheme)?;
    let analysis = mask.analyze(args.m_max)?;
    let text = if args.json {
        serde_json::to_string_pretty(&analysis.to_json()).map_err(Error::from)? + "\n"
    } else {
        let mut t = String::new();
        let _ = writeln!(t, "scheme {}  dilation {}", args.scheme, mask.dilation());
        let _ = writeln!(t, "{:>3}  {:>16}  {:>16}  {:>12}  verdict", "m", "norm", "gamma", "gamma~");
        for (k, gamma) in analysis.gammas.iter().enumerate() {
            let verdict = if gamma < &Rational::one() { "contractive" } else { "undecided" };
            let _ = writeln!(
                t,
                "{:>3}  {:>16}  {:>16}  {:>12.6}  {verdict}",
                k + 1,
                format_rational(&analysis.norm_values[k]),
                format_rational(gamma),
                rational_to_f64(gamma)
            );
        }
        match (analysis.witness, analysis.holder_exponent) {
            (Some(m), Some(iota)) => {
                let _ = writeln!(t, "converges (witness m = {m}), holder exponent {iota:.4}");
            }
            _ => {
                let _ = writeln!(t, "undecided up to m = {}", args.m_max);
            }
        }
        t
    };
    emit(args.out.as_deref(), &text)?;
    Ok(())
}

pub fn refine(args: &RefineArgs) -> Outcome {
    let mask = load_scheme(&args.scheme)?;
    mask.analyze(1)?;
    if let Some(t) = args.tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::new(EXIT_FAILURE, format!("--tol must be positive, got {t}")));
        }
    }
    let text = match DataDoc::from_json(&read(&args.data)?)? {
        DataDoc::Polygon(mut doc) => {
            doc.closed |= args.closed;
            let polygon = doc.to_polygon()?;
            let tol = args.tol.unwrap_or_else(|| default_tolerance(polygon.manifold()));
            let trace = refine_polygon(&mask, &polygon, args.levels, tol)?;
            TraceDoc::from_trace(&trace)?.to_json()?
        }
        DataDoc::Cylinder(doc) => {
            let path = doc.to_path()?;
            let tol = args.tol.unwrap_or_else(|| default_tolerance(Manifold::Euclidean(2)));
            let levels = covering::subdivide_on_cylinder(&mask, &path, args.levels, tol)?;
            let doc = CylinderTraceDoc::new(&mask, &path, &levels);
            serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(())
}

fn parse_selection(spec: Option<&str>, count: usize) -> Result<Vec<usize>, Failure> {
    let Some(spec) = spec else {
        return Ok((0..count).collect());
    };
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let k: usize = part
            .parse()
            .map_err(|_| Failure::new(EXIT_FAILURE, format!("bad level {part:?}")))?;
        if k >= count {
            return Err(Failure::new(EXIT_FAILURE, format!("level {k} not in trace (0..{count})")));
        }
        out.push(k);
    }
    Ok(out)
}

fn load_trace(path: &Path) -> Result<TraceDoc, Failure> {
    let doc: TraceDoc = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    Ok(doc)
}

pub fn render(args: &RenderArgs) -> Outcome {
    let doc = load_trace(&args.data)?;
    if doc.manifold != Manifold::Hyperbolic2.to_string() {
        return Err(Failure::new(
            EXIT_NOT_HYPERBOLIC,
            format!("render needs a hyperbolic2 trace, got {}", doc.manifold),
        ));
    }
    let trace = doc.to_trace()?;
    let selected = parse_selection(args.levels.as_deref(), trace.levels.len())?;
    let polygons: Vec<&Polygon> = selected.iter().map(|&k| &trace.levels[k]).collect();
    let options = RenderOptions {
        radius_px: args.radius,
        markers: !args.no_markers,
        geodesic_arcs: args.geodesic_arcs,
        ..RenderOptions::default()
    };
    let svg = render_svg(&polygons, &options)?;
    emit(args.out.as_deref(), &svg)?;
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let doc = load_trace(&args.data)?;
    let trace = doc.to_trace()?;
    let gamma = trace.gamma()?;
    let mut checks = Vec::new();
    let mut first_failure: Option<String> = None;
    let fail = |msg: String, first: &mut Option<String>| {
        if first.is_none() {
            *first = Some(msg);
        }
    };

    if gamma < Rational::one() {
        let report = check_contractivity(&trace, &gamma);
        if let Some(f) = report.failures.first() {
            fail(
                format!(
                    "contractivity: level {} edge {}: {:e} > {:e}",
                    f.level, f.index, f.value, f.bound
                ),
                &mut first_failure,
            );
        }
        checks.push(json!({
            "check": "contractivity",
            "gamma": format_rational(&gamma),
            "passed": report.passed,
            "worst_margin": report.worst_margin,
            "failures": report.failures.len(),
        }));
    } else {
        checks.push(json!({"check": "contractivity", "skipped": "gamma >= 1"}));
    }

    let disp = check_displacement_safety(&trace);
    if !disp.passed {
        fail("displacement: non-finite constant".into(), &mut first_failure);
    }
    checks.push(json!({"check": "displacement", "passed": disp.passed, "c_empirical": disp.c_empirical}));

    let analytic = trace.mask.analyze(geosubdiv::mask::DEFAULT_M_MAX)?.holder_exponent;
    match (trace.levels.len() >= 3, analytic) {
        (true, Some(iota)) => {
            let empirical = estimate_holder(&trace)?;
            let passed = empirical >= iota - HOLDER_SLACK;
            if !passed {
                fail(
                    format!("holder: empirical {empirical:.4} < analytic {iota:.4} - {HOLDER_SLACK}"),
                    &mut first_failure,
                );
            }
            checks.push(json!({"check": "holder", "passed": passed, "empirical": empirical, "analytic": iota}));
        }
        _ => checks.push(json!({"check": "holder", "skipped": "needs 3 levels and a convergent mask"})),
    }

    let recomputed = diagnostics_doc(&trace);
    let diag_ok = recomputed == doc.diagnostics;
    if !diag_ok {
        fail("stored diagnostics differ from the recomputed ones".into(), &mut first_failure);
    }
    checks.push(json!({"check": "diagnostics", "passed": diag_ok}));

    let passed = first_failure.is_none();
    let text = if args.json {
        serde_json::to_string_pretty(&json!({"passed": passed, "checks": checks})).map_err(Error::from)? + "\n"
    } else {
        let mut t = String::new();
        for c in &checks {
            let name = c["check"].as_str().unwrap_or("?");
            let status = match (c.get("passed").and_then(|p| p.as_bool()), c.get("skipped")) {
                (Some(true), _) => "ok".to_string(),
                (Some(false), _) => "FAILED".to_string(),
                (None, Some(s)) => format!("skipped ({})", s.as_str().unwrap_or("")),
                _ => "?".to_string(),
            };
            let _ = writeln!(t, "{name:<14} {status}");
        }
        t
    };
    print!("{text}");
    match first_failure {
        None => Ok(()),
        Some(msg) => Err(Failure::new(EXIT_VERIFY_FAILED, msg)),
    }
}
