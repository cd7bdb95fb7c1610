//! Command-line front end for the verification suites.
//!
//! Without `--input` each subcommand runs its seeded random suite. With an
//! input document (`"format": 1`) it checks that instance instead.
//! Exit status: 0 all checks pass, 1 a property is violated, 2 bad input.

#![allow(clippy::result_large_err)]

use std::io::Read as _;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use giry::codensity::{
    check_cone_naturality, reconstruct_from_cone, verify_codensity_bijection, ConeJson, DEFAULT_TRIANGLE_BOUND,
};
use giry::integrate::{check_integral_properties, i_integral, IntegralCheckConfig, SimpleFunctionJson};
use giry::lipmetric::{
    bl_distance_subsets_values, bl_distance_values, check_simplex_lipschitz, FiniteMetricSpace, MetricJson,
};
use giry::measure::{MeasureJson, Mode};
use giry::monad::{check_monad_laws, SimplexPoint};
use giry::rational::{format_rational, parse_rational, Rational};
use giry::report::{parse_document, Check, Format, Report, SuiteConfig};
use giry::represent::{
    caratheodory_extend, daniell_stone, reconstruct_charge, reconstruct_measure, reconstruct_witness,
    ExtensionError, FunctionalJson, LatticeJson, ReconstructError, SemiringJson,
};
use giry::setalg::{GroundSet, SetInstance};
use giry::{codensity, suite, Error};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "giry", version, about = "Exact checks for finite probability measures and the Giry monad")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 500)]
    cases: usize,
    /// Largest ground set drawn by the random suites.
    #[arg(long, global = true, default_value_t = 5)]
    size: usize,
    /// Largest denominator drawn by the random suites.
    #[arg(long, global = true, default_value_t = 12)]
    denominator: u32,
    #[arg(long, global = true, default_value = "sigma")]
    mode: Mode,
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    /// Input document; `-` reads standard input.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Monad laws.
    Laws,
    /// Measure/cone bijection and small-index determination.
    Codensity {
        /// Largest target size for the small-index check (all of 1..=3 if absent).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Bounded Lipschitz distances and Lipschitz maps into the simplex.
    Distance {
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Measures from functionals, directly or through the slab construction.
    Reconstruct,
    /// Extension from a semi-ring.
    Extend,
    /// Properties of the integral.
    Integrate,
    /// Every suite.
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Lp,
    Subsets,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = run(&cli);
    eprintln!("wall time: {:.3?}", start.elapsed());
    match outcome {
        Ok(report) => {
            let text = report.render(cli.common.format);
            if let Err(e) = emit(&cli.common.output, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn emit(path: &Option<String>, text: &str) -> std::io::Result<()> {
    match path.as_deref() {
        None | Some("-") => {
            print!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, text),
    }
}

fn read_input(path: &str) -> Result<String, Error> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(path)
    };
    text.map_err(|e| giry::FormatError::Schema { path: path.into(), message: e.to_string() }.into())
}

fn config(c: &Common) -> Result<SuiteConfig, Error> {
    let cfg = SuiteConfig {
        seed: c.seed,
        max_ground_size: c.size,
        max_denominator: c.denominator,
        cases: c.cases,
        mode: c.mode,
        format: c.format,
    };
    cfg.validate()
        .map_err(|message| giry::FormatError::Schema { path: "flags".into(), message })?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let cfg = config(&cli.common)?;
    let input = cli.common.input.as_deref().map(read_input).transpose()?;
    match (&cli.command, input) {
        (Command::Laws, None) => Ok(suite::monad_laws(&cfg)),
        (Command::Laws, Some(text)) => {
            let doc: AlgebraDoc = parse_document(&text)?;
            Ok(check_monad_laws(&Arc::new(doc.algebra.to_algebra()?), &cfg))
        }
        (Command::Codensity { k }, None) => Ok(codensity_random(&cfg, *k)),
        (Command::Codensity { k }, Some(text)) => codensity_input(&cfg, *k, &text),
        (Command::Distance { method }, None) => Ok(distance_random(&cfg, *method)),
        (Command::Distance { method }, Some(text)) => distance_input(*method, &text),
        (Command::Reconstruct, None) => {
            let mut r = Report::new("reconstruct");
            r.parts.push(suite::reconstruction(&cfg));
            r.parts.push(suite::appendix(&cfg));
            Ok(r)
        }
        (Command::Reconstruct, Some(text)) => reconstruct_input(&cfg, &text),
        (Command::Extend, None) => Ok(suite::appendix(&cfg)),
        (Command::Extend, Some(text)) => extend_input(&cfg, &text),
        (Command::Integrate, None) => Ok(suite::integrals(&cfg)),
        (Command::Integrate, Some(text)) => integrate_input(&text),
        (Command::All, None) => Ok(suite::run_all(&cfg)),
        (Command::All, Some(_)) => Err(giry::FormatError::Schema {
            path: "--input".into(),
            message: "`all` runs the seeded suites and takes no input".into(),
        }
        .into()),
    }
}

#[derive(Deserialize)]
struct AlgebraDoc {
    algebra: SetInstance,
    #[serde(default)]
    cone: Option<ConeJson>,
}

fn codensity_random(cfg: &SuiteConfig, k: Option<usize>) -> Report {
    let mut r = suite::codensity(cfg);
    match k {
        None => r.parts.push(suite::small_index(cfg)),
        Some(k) => {
            let c = cfg.with_cases(cfg.cases.div_ceil(10).max(1)).with_size(cfg.max_ground_size.min(4));
            r.parts.push(codensity::small_index_sufficiency(k, &c));
        }
    }
    r
}

fn codensity_input(cfg: &SuiteConfig, k: Option<usize>, text: &str) -> Result<Report, Error> {
    let doc: AlgebraDoc = parse_document(text)?;
    let Some(cone) = doc.cone else {
        let x = Arc::new(doc.algebra.to_algebra()?);
        let mut r = verify_codensity_bijection(&x, cfg);
        if let Some(k) = k {
            let family = codensity::standard_family(&x, &mut giry::gen::case_rng(cfg.seed, 0, 0), 2, cfg.max_denominator);
            let det = codensity::determination(&x, &family, k);
            r = r.value(format!("determined[k={k}]"), json!(det));
        }
        return Ok(r);
    };
    let cone = cone.to_cone(&doc.algebra)?;
    let nat = check_cone_naturality(&cone, DEFAULT_TRIANGLE_BOUND);
    let mut naturality = Check::new("cone_naturality");
    naturality.record(nat.holds, || json!(nat.witness));
    let mut r = Report::with_checks("cone", vec![naturality]).value("triangles", json!(nat.triangles));
    if nat.holds {
        let p = reconstruct_from_cone(&cone, cfg.mode)?;
        r = r.value("measure", json!(p.to_json()?));
    }
    Ok(r)
}

fn distance_random(cfg: &SuiteConfig, method: Method) -> Report {
    let mut r = Report::new(format!("distance[{}]", method_name(method)));
    r.parts.push(suite::bl_identity(cfg));
    r.parts.push(suite::lipschitz_criteria(cfg));
    r.parts.push(suite::nonexpansive(cfg));
    r
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Lp => "lp",
        Method::Subsets => "subsets",
        Method::Both => "both",
    }
}

#[derive(Deserialize)]
struct DistanceDoc {
    #[serde(default)]
    metric: Option<MetricJson>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    p: Option<Vec<String>>,
    #[serde(default)]
    q: Option<Vec<String>>,
    /// One probability vector over `labels` per point of `metric`.
    #[serde(default)]
    map: Option<Vec<Vec<String>>>,
}

fn parse_vec(v: &[String]) -> Result<Vec<Rational>, Error> {
    Ok(v.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?)
}

fn labels_or_range(labels: &Option<Vec<String>>, n: usize) -> Result<GroundSet, Error> {
    Ok(match labels {
        Some(l) => GroundSet::with_cap(l.iter().cloned(), usize::MAX)?,
        None => GroundSet::range(n),
    })
}

fn schema(path: &str, message: &str) -> Error {
    giry::FormatError::Schema { path: path.into(), message: message.into() }.into()
}

fn distance_input(method: Method, text: &str) -> Result<Report, Error> {
    let doc: DistanceDoc = parse_document(text)?;
    let metric = doc.metric.as_ref().map(MetricJson::to_metric).transpose()?;
    let mut r = Report::new(format!("distance[{}]", method_name(method)));
    if let Some(map) = &doc.map {
        let m = metric.as_ref().ok_or_else(|| schema("metric", "a map needs a metric on its domain"))?;
        let width = map.first().map_or(0, Vec::len);
        let labels = labels_or_range(&doc.labels, width)?;
        let points = map
            .iter()
            .map(|row| SimplexPoint::new(&labels, parse_vec(row)?).map_err(|e| schema("map", &e.to_string())))
            .collect::<Result<Vec<_>, Error>>()?;
        let v = check_simplex_lipschitz(&points, m)?;
        let mut agree = Check::new("criteria_agree");
        agree.record(v.agree(), || json!(v));
        r.checks.push(agree);
        r = r.value("lipschitz", json!(v));
    }
    match (&doc.p, &doc.q) {
        (Some(p), Some(q)) => {
            let (p, q) = (parse_vec(p)?, parse_vec(q)?);
            let labels = match &metric {
                Some(m) => m.points().clone(),
                None => labels_or_range(&doc.labels, p.len())?,
            };
            for (name, v) in [("p", &p), ("q", &q)] {
                SimplexPoint::new(&labels, v.clone()).map_err(|e| schema(name, &e.to_string()))?;
            }
            let discrete = FiniteMetricSpace::discrete(&labels);
            let is_discrete = metric.as_ref().is_none_or(|m| m == &discrete);
            let space = metric.unwrap_or(discrete);
            let lp = matches!(method, Method::Lp | Method::Both).then(|| bl_distance_values(&p, &q, &space)).transpose()?;
            let sub = matches!(method, Method::Subsets | Method::Both).then(|| bl_distance_subsets_values(&p, &q)).transpose()?;
            if let Some(d) = &lp {
                r = r.value("lp", json!(format_rational(d)));
            }
            if let Some(d) = &sub {
                r = r.value("subsets", json!(format_rational(d)));
                if !is_discrete {
                    r = r.note("the subset maximum is the distance under the discrete metric");
                }
            }
            if let (Some(a), Some(b), true) = (&lp, &sub, is_discrete) {
                let mut agree = Check::new("methods_agree");
                agree.record(a == b, || json!({"lp": format_rational(a), "subsets": format_rational(b)}));
                r.checks.push(agree);
            }
        }
        (None, None) if doc.map.is_some() => {}
        _ => return Err(schema("p", "expected both `p` and `q`, or a `map`")),
    }
    Ok(r)
}

#[derive(Deserialize)]
struct ReconstructDoc {
    #[serde(default)]
    functional: Option<FunctionalJson>,
    #[serde(default)]
    lattice: Option<LatticeJson>,
}

fn reconstruct_input(cfg: &SuiteConfig, text: &str) -> Result<Report, Error> {
    let doc: ReconstructDoc = parse_document(text)?;
    let mut r = Report::new("reconstruct");
    if let Some(fj) = &doc.functional {
        let f = fj.to_functional()?;
        let result = match cfg.mode {
            Mode::Sigma => reconstruct_measure(&f, &[]),
            Mode::FinitelyAdditive => reconstruct_charge(&f, &[]),
        };
        let mut check = Check::new("functional_represents_measure");
        match result {
            Ok(p) => {
                check.record(true, || Value::Null);
                r = r.value("measure", json!(p.to_json()?));
            }
            Err(e) if is_violation(&e) => check.record(false, || reconstruct_witness(&e)),
            Err(e) => return Err(e.into()),
        }
        r.checks.push(check);
    }
    if let Some(lj) = &doc.lattice {
        let (lattice, values) = lj.to_lattice()?;
        let mut check = Check::new("daniell_stone");
        match daniell_stone(&lattice, &values) {
            Ok(ds) => {
                check.record(true, || Value::Null);
                r = r
                    .value("slab_measure", json!(ds.measure.to_json()?))
                    .value("slabs", json!(ds.slabs))
                    .value("cells", json!(ds.cells))
                    .value("cross_checked", json!(ds.cross_checked));
            }
            Err(e) if !e.is_input_error() => check.record(false, || json!({"error": e.to_string()})),
            Err(e) => return Err(e.into()),
        }
        r.checks.push(check);
    }
    if doc.functional.is_none() && doc.lattice.is_none() {
        return Err(schema("functional", "expected a `functional` or a `lattice`"));
    }
    Ok(r)
}

fn is_violation(e: &ReconstructError) -> bool {
    !e.is_input_error()
}

fn extend_input(cfg: &SuiteConfig, text: &str) -> Result<Report, Error> {
    let doc: SemiringJson = parse_document(text)?;
    let (s, mu) = doc.to_semiring()?;
    let mut check = Check::new("extension");
    let mut r = Report::new("extend");
    match caratheodory_extend(&s, &mu) {
        Ok(ext) => {
            check.record(true, || Value::Null);
            let instance = ext.algebra.to_instance()?;
            r = r
                .value("algebra", json!(instance))
                .value("weights", json!(ext.weights.iter().map(format_rational).collect::<Vec<_>>()))
                .value("mass", json!(format_rational(&ext.mass)));
            if let Ok(p) = ext.to_probability(cfg.mode) {
                r = r.value("measure", json!(p.to_json()?));
            }
        }
        Err(e) if extension_violation(&e) => check.record(false, || json!({"error": e.to_string()})),
        Err(e) => return Err(e.into()),
    }
    r.checks.push(check);
    Ok(r)
}

fn extension_violation(e: &ExtensionError) -> bool {
    !e.is_input_error()
}

#[derive(Deserialize)]
struct IntegrateDoc {
    measure: MeasureJson,
    functions: Vec<SimpleFunctionJson>,
}

fn integrate_input(text: &str) -> Result<Report, Error> {
    let doc: IntegrateDoc = parse_document(text)?;
    let p = doc.measure.to_measure()?;
    let fns = doc
        .functions
        .iter()
        .map(|f| f.to_function(p.algebra()))
        .collect::<Result<Vec<_>, _>>()?;
    let report = check_integral_properties(&p, &fns, &IntegralCheckConfig::default())?;
    let integrals = fns
        .iter()
        .map(|f| i_integral(&p, f).map(|v| format_rational(&v)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(report.to_report().value("integrals", json!(integrals)))
}
