//! Command-line front end of the `qam` binary.
//!
//! Exit codes: 0 on success, 2 on a validation error, 3 on a numeric
//! failure that left no test completed.

pub mod config;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::comparison::{compare_generators, Relation};
use crate::constructions::{build_prop51_family, build_prop53_family, Construction};
use crate::diagnostics::{
    derivative_ratio_test, empirical_max_test, empirical_min_test, integral_test, lower_bounded_estimate, ratio_test,
    DiagnosticReport, NGrid,
};
use crate::error::{invalid, Error, Result};
use crate::generators::{GeneratorFamily, Interval};
use crate::means::{qa_mean, TwoPointQuery, WeightedSample};

use config::{ConstructKind, OutputFormat, QuadratureSettings, RunConfig, ThresholdSettings};
use report::{assign_ids, write_report, NSpec, ResolvedConfig};
use spec::PointSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Weight sums within this distance of 1 are rescaled silently.
const WEIGHT_NORMALIZE_TOL: f64 = 1e-9;
const C_HAT_GRID: usize = 33;
const TESTS: [&str; 5] = ["ratio", "deriv-ratio", "integral", "empirical", "empirical-min"];
const DEFAULT_TESTS: [&str; 4] = ["ratio", "deriv-ratio", "integral", "empirical"];

#[derive(Debug, Parser)]
#[command(name = "qam", version, about = "Quasi-arithmetic means and max-family diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weighted quasi-arithmetic mean of a list of entries.
    Mean(MeanArgs),
    /// Run max-family criteria over a range of indices.
    Diagnose(DiagnoseArgs),
    /// Build a counterexample family and optionally save it.
    Construct(ConstructArgs),
    /// Compare two generators through their Arrow operators.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct MeanArgs {
    /// identity | log | power:P | exp:T | affine(GEN,A,B), optionally @LO,HI
    #[arg(long)]
    pub generator: String,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub entries: Vec<f64>,
    /// Defaults to equal weights.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Vec<f64>,
    /// Reject weights that do not sum to 1 instead of rescaling them.
    #[arg(long)]
    pub strict_weights: bool,
}

#[derive(Debug, Args, Default)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub div_threshold: Option<f64>,
    #[arg(long)]
    pub zero_tol: Option<f64>,
    #[arg(long)]
    pub stability_tol: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct QuadArgs {
    /// adaptive-simpson | composite-simpson
    #[arg(long)]
    pub quad_method: Option<String>,
    #[arg(long)]
    pub quad_max_step: Option<f64>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
}

impl QuadArgs {
    fn settings(&self) -> QuadratureSettings {
        QuadratureSettings {
            method: self.quad_method.clone(),
            max_step: self.quad_max_step,
            abs_tol: self.quad_tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// kind[:p1[,p2]]@lo,hi or file:PATH
    #[arg(long)]
    pub family: Option<String>,
    /// Comma-separated subset of ratio, deriv-ratio, integral, empirical, empirical-min.
    #[arg(long, value_delimiter = ',')]
    pub tests: Vec<String>,
    /// pq=P,Q | xyz=X,Y,Z | query=X,Z,XI; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// A..B or A..B..STEP (default 1..64).
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Vec<u32>,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: Option<ConstructKind>,
    /// prop51: midpoint | points:V1,V2,... | cantor:DEPTH[@LO,HI]
    #[arg(long)]
    pub target: Option<String>,
    /// prop51: bound on the L1 norms.
    #[arg(long)]
    pub eps: Option<f64>,
    /// prop51: number of family members.
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Domain LO,HI (default 0,1).
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// prop53: number of family members.
    #[arg(long)]
    pub k_max: Option<u32>,
    /// prop53: how many rationals to enumerate (default k-max).
    #[arg(long)]
    pub rationals: Option<usize>,
    /// prop53: query interval X,Y for the integral certificate; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub query: Vec<String>,
    /// Write the family artifact here instead of standard output.
    #[arg(long)]
    pub emit_family: Option<PathBuf>,
    /// Include the construction certificate.
    #[arg(long)]
    pub certify: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long = "f")]
    pub f: String,
    #[arg(long = "g")]
    pub g: String,
    /// LO,HI,COUNT
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

/// Parses `args` (program name first) and runs the command, writing to
/// `out` and `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = if code == 0 { e.to_string() } else { e.render().to_string() };
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_VALIDATION;
    }
    let result = match cli.command {
        Command::Mean(a) => run_mean(&a, out, err),
        Command::Diagnose(a) => run_diagnose(&a, out, err),
        Command::Construct(a) => run_construct(&a, out),
        Command::Compare(a) => run_compare(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERIC
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("QAM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| invalid(format!("QAM_THREADS must be a positive integer, got `{v}`")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Internal(format!("cannot write output: {e}"))
}

/// Rounds to 15 significant digits.
fn sig15(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn run_mean(a: &MeanArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let entries = a.entries.clone();
    if let Some(e) = entries.iter().find(|e| !e.is_finite()) {
        return Err(invalid(format!("non-finite entry {e}")));
    }
    let weights = if a.weights.is_empty() {
        vec![1.0; entries.len()]
    } else {
        a.weights.clone()
    };
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(invalid(format!("weights must be positive, got {w}")));
    }
    let total: f64 = weights.iter().sum();
    let off = (total - 1.0).abs() > WEIGHT_NORMALIZE_TOL;
    if off && !a.weights.is_empty() {
        if a.strict_weights {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        writeln!(err, "warning: weights sum to {total}; rescaled to 1").map_err(io_err)?;
    }
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let sample = WeightedSample::new(entries, weights)?;
    let (lo, hi) = (sample.min(), sample.max());
    let domain = if lo < hi {
        Interval::new(lo, hi)?
    } else {
        Interval::new(lo, lo + lo.abs().max(1.0))?
    };
    let g = spec::parse_generator(&a.generator, Some(domain))?;
    let m = qa_mean(&g, &sample)?;
    writeln!(out, "{}", sig15(m)).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn canonical_points(p: &PointSet) -> String {
    let mut b = ryu::Buffer::new();
    let mut f = |x: f64| b.format_finite(x).to_string();
    match p {
        PointSet::Pq(p, q) => format!("pq={},{}", f(*p), f(*q)),
        PointSet::Xyz(x, y, z) => format!("xyz={},{},{}", f(*x), f(*y), f(*z)),
        PointSet::Query(q) => format!("query={},{},{}", f(q.x), f(q.z), f(q.xi)),
    }
}

struct DiagnosePlan {
    family: GeneratorFamily,
    ns: NGrid,
    config: ResolvedConfig,
    pq: Vec<(f64, f64)>,
    xyz: Vec<(f64, f64, f64)>,
    queries: Vec<TwoPointQuery>,
    output: Option<PathBuf>,
}

fn plan_diagnose(a: &DiagnoseArgs) -> Result<DiagnosePlan> {
    let file = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    file.expect_command("diagnose")?;

    let thresholds = ThresholdSettings {
        window: a.thresholds.window,
        div_threshold: a.thresholds.div_threshold,
        zero_tol: a.thresholds.zero_tol,
        stability_tol: a.thresholds.stability_tol,
    }
    .or(&file.thresholds)
    .resolve()?;
    let quad = a.quad.settings().or(&file.quadrature).resolve()?;

    let family_spec = a
        .family
        .clone()
        .or(file.family.clone())
        .ok_or_else(|| invalid("missing --family"))?;
    let family = spec::parse_family(&family_spec, &quad)?;
    let domain = family.domain();

    let tests: Vec<String> = if !a.tests.is_empty() {
        a.tests.clone()
    } else if let Some(t) = &file.tests {
        t.clone()
    } else {
        DEFAULT_TESTS.iter().map(|s| s.to_string()).collect()
    };
    if tests.is_empty() {
        return Err(invalid("no tests requested"));
    }
    for t in &tests {
        if !TESTS.contains(&t.as_str()) {
            return Err(invalid(format!("unknown test `{t}`; expected one of {}", TESTS.join(", "))));
        }
    }

    let (ns, n_spec) = if let Some(s) = &a.n {
        (spec::parse_ngrid(s)?, NSpec::Range(s.clone()))
    } else if !a.n_list.is_empty() {
        (NGrid::new(a.n_list.clone())?, NSpec::List(a.n_list.clone()))
    } else if let Some(s) = &file.n {
        if file.n_list.is_some() {
            return Err(invalid("config sets both `n` and `n_list`"));
        }
        (spec::parse_ngrid(s)?, NSpec::Range(s.clone()))
    } else if let Some(l) = &file.n_list {
        (NGrid::new(l.clone())?, NSpec::List(l.clone()))
    } else {
        (spec::parse_ngrid("1..64")?, NSpec::Range("1..64".into()))
    };

    let point_specs: Vec<String> = if !a.points.is_empty() {
        a.points.clone()
    } else {
        file.points.clone().unwrap_or_default()
    };
    let mut sets = point_specs
        .iter()
        .map(|s| spec::parse_points(s))
        .collect::<Result<Vec<_>>>()?;
    let mut pq: Vec<(f64, f64)> = Vec::new();
    let mut xyz = Vec::new();
    let mut queries = Vec::new();
    for s in &sets {
        match *s {
            PointSet::Pq(p, q) => pq.push((p, q)),
            PointSet::Xyz(x, y, z) => xyz.push((x, y, z)),
            PointSet::Query(q) => queries.push(q),
        }
    }
    let wants = |names: &[&str]| tests.iter().any(|t| names.contains(&t.as_str()));
    if pq.is_empty() && wants(&["deriv-ratio", "integral"]) {
        pq.push((domain.lo, domain.hi));
        sets.push(PointSet::Pq(domain.lo, domain.hi));
    }
    if xyz.is_empty() && wants(&["ratio"]) {
        xyz.push((domain.lo, domain.midpoint(), domain.hi));
        sets.push(PointSet::Xyz(domain.lo, domain.midpoint(), domain.hi));
    }
    if queries.is_empty() && wants(&["empirical", "empirical-min"]) {
        let q = TwoPointQuery::new(domain.lo, domain.hi, 0.5)?;
        queries.push(q);
        sets.push(PointSet::Query(q));
    }

    let format = a.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let config = ResolvedConfig {
        command: "diagnose",
        family: family_spec,
        tests,
        n: n_spec,
        points: sets.iter().map(canonical_points).collect(),
        thresholds,
        quadrature: quad,
        format,
    };
    Ok(DiagnosePlan {
        family,
        ns,
        config,
        pq,
        xyz,
        queries,
        output: a.output.clone().or(file.output.clone()),
    })
}

fn with_c_hat(mut r: DiagnosticReport, fam: &GeneratorFamily, p: f64, q: f64, ns: &NGrid) -> DiagnosticReport {
    if let Ok(grid) = Interval::new(p, q).map(|iv| iv.grid(C_HAT_GRID)) {
        r.c_hat = lower_bounded_estimate(fam, &grid, ns).ok().filter(|c| c.is_finite());
    }
    r
}

fn run_diagnose(a: &DiagnoseArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let plan = plan_diagnose(a)?;
    let (fam, ns, cfg) = (&plan.family, &plan.ns, &plan.config);
    let (trend, quad) = (&cfg.thresholds, &cfg.quadrature);

    let mut reports: Vec<DiagnosticReport> = Vec::new();
    let mut numeric_failures = 0;
    for test in &cfg.tests {
        let outcome: Result<Vec<DiagnosticReport>> = match test.as_str() {
            "ratio" => plan
                .xyz
                .iter()
                .map(|&(x, y, z)| ratio_test(fam, x, y, z, ns, trend))
                .collect(),
            "deriv-ratio" => plan
                .pq
                .iter()
                .map(|&(p, q)| derivative_ratio_test(fam, p, q, ns, trend).map(|r| with_c_hat(r, fam, p, q, ns)))
                .collect(),
            "integral" => plan
                .pq
                .iter()
                .map(|&(p, q)| integral_test(fam, p, q, ns, quad, trend).map(|r| with_c_hat(r, fam, p, q, ns)))
                .collect(),
            "empirical" => empirical_max_test(fam, &plan.queries, ns, trend),
            "empirical-min" => empirical_min_test(fam, &plan.queries, ns, trend),
            other => Err(Error::Internal(format!("unhandled test {other}"))),
        };
        match outcome {
            Ok(rs) => reports.extend(rs),
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => {
                numeric_failures += 1;
                writeln!(err, "warning: test {test} failed: {e}").map_err(io_err)?;
            }
        }
    }

    let records = assign_ids(reports);
    match &plan.output {
        Some(path) => {
            let mut buf = Vec::new();
            write_report(&mut buf, cfg, &records)?;
            std::fs::write(path, buf).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
        }
        None => write_report(out, cfg, &records)?,
    }
    let completed = records.iter().any(|r| r.report.completed());
    if !completed && (numeric_failures > 0 || !records.is_empty()) {
        writeln!(err, "error: no test completed").map_err(io_err)?;
        return Ok(EXIT_NUMERIC);
    }
    Ok(EXIT_OK)
}

fn parse_query(s: &str) -> Result<(f64, f64)> {
    match spec::parse_list(s)?.as_slice() {
        [x, y] => Ok((*x, *y)),
        _ => Err(invalid(format!("expected query `X,Y`, got `{s}`"))),
    }
}

fn run_construct(a: &ConstructArgs, out: &mut dyn Write) -> Result<i32> {
    let file = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    file.expect_command("construct")?;
    let c = &file.construct;
    let quad = a.quad.settings().or(&file.quadrature).resolve()?;
    let kind = a
        .kind
        .or(c.kind)
        .ok_or_else(|| invalid("missing construction kind (prop51 or prop53)"))?;
    let u = match a.interval.as_ref().or(c.interval.as_ref()) {
        Some(s) => spec::parse_interval(s)?,
        None => Interval::new(0.0, 1.0)?,
    };
    let built: Construction = match kind {
        ConstructKind::Prop51 => {
            let target = a.target.as_deref().or(c.target.as_deref()).unwrap_or("midpoint");
            let v = spec::parse_target(target, u)?;
            let eps = a.eps.or(c.eps).unwrap_or(0.1);
            let n_max = a.n_max.or(c.n_max).unwrap_or(64);
            build_prop51_family(&v, eps, u, n_max, &quad)?
        }
        ConstructKind::Prop53 => {
            let k_max = a.k_max.or(c.k_max).unwrap_or(32);
            let rationals = a.rationals.or(c.rationals).unwrap_or(k_max as usize);
            let query_specs: Vec<String> = if !a.query.is_empty() {
                a.query.clone()
            } else {
                c.queries.clone().unwrap_or_default()
            };
            let queries = query_specs
                .iter()
                .map(|s| parse_query(s))
                .collect::<Result<Vec<_>>>()?;
            build_prop53_family(u, k_max, rationals, &queries, &quad)?
        }
    };
    let certify = a.certify || c.certify.unwrap_or(false);
    let artifact = built.artifact(certify);
    match a.emit_family.as_ref().or(c.emit_family.as_ref()) {
        Some(path) => {
            artifact.save(path)?;
            let cert = &built.certificate;
            let sup = cert.per_n_l1.iter().copied().fold(0.0, f64::max);
            writeln!(
                out,
                "wrote {} members on {} to {} (anchor {}, sup L1 {})",
                artifact.profiles.len(),
                built.domain(),
                path.display(),
                built.anchor,
                sup
            )
            .map_err(io_err)?;
        }
        None => writeln!(out, "{}", artifact.to_json()?).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

fn run_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let parts = spec::parse_list(&a.grid)?;
    let [lo, hi, count] = parts.as_slice() else {
        return Err(invalid(format!("expected --grid LO,HI,COUNT, got `{}`", a.grid)));
    };
    if !(count.fract() == 0.0 && *count >= 2.0) {
        return Err(invalid(format!("grid count must be an integer >= 2, got {count}")));
    }
    let span = Interval::new(*lo, *hi)?;
    let f = spec::parse_generator(&a.f, Some(span))?;
    let g = spec::parse_generator(&a.g, Some(span))?;
    for (name, gen) in [("f", &f), ("g", &g)] {
        if !gen.domain().contains_interval(&span) {
            return Err(Error::Domain(format!(
                "grid {span} is not inside the domain {} of {name}",
                gen.domain()
            )));
        }
    }
    let verdict = compare_generators(&f, &g, &span.grid(*count as usize))?;
    match a.format {
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&verdict)
                .map_err(|e| Error::Internal(format!("cannot serialise verdict: {e}")))?;
            writeln!(out, "{text}").map_err(io_err)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "{}", verdict.relation.as_str()).map_err(io_err)?;
            if let (Relation::Incomparable, Some(w)) = (verdict.relation, verdict.witness) {
                writeln!(out, "witness f_above={} g_above={}", w.f_above, w.g_above).map_err(io_err)?;
            }
        }
    }
    Ok(EXIT_OK)
}
