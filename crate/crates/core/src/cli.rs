//! Command-line front end.
//!
//! Exit codes: 0 success (including inconclusive verdicts), 1 validation
//! failure or inconsistent verdict, 2 input error.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{default_lambdas, ProbeConfig, RunConfig};
use crate::diagnostics::{
    commutator_series, gap_series, generator_series, st1_verdict, st2_verdict, Classification, CommutatorSeries,
    GapProbe, GapSeries, ProbeFunction, Verdict, DEFAULT_GENERATORS_PER_LEVEL,
};
use crate::error::Error;
use crate::inductive::{realization_validate, realize, system_validate, InductiveSystem, Provenance, RealizationReport, SystemReport};
use crate::tolerance::Tolerances;
use crate::triple::{connes_distance, Distance};

/// Largest tolerated `|direct − eigen-formula|` gap discrepancy.
pub const CROSS_CHECK_TOL: f64 = 1e-9;
/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "SPECTRAL_LIMITS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "spectral-limits", version, about = "Finite spectral triples, inductive systems and ST1/ST2 diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a system from a JSON config and write it as JSON.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check morphism and realization identities of a system file.
    Validate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Resolvent and function gap series with ST1 verdicts.
    St1 {
        #[command(flatten)]
        source: Source,
        /// Non-real probe such as `0+1i`; repeatable.
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambdas: Vec<String>,
        /// lorentzian, gaussian or odd-lorentzian; repeatable.
        #[arg(long = "function")]
        functions: Vec<String>,
        /// Inclusive level range `a..b`.
        #[arg(long)]
        levels: Option<String>,
        /// Gap level counted as small [default: 1e-3].
        #[arg(long)]
        threshold: Option<f64>,
        /// Tail length used by the verdict [default: 5].
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Commutator-norm series with an ST2 verdict.
    St2 {
        #[command(flatten)]
        source: Source,
        /// `j:i` for the i-th Hermitian generator of A_j; repeatable.
        /// Defaults to the first generators of every probed level.
        #[arg(long = "element")]
        elements: Vec<String>,
        /// Inclusive range `a..b` of base levels.
        #[arg(long)]
        levels: Option<String>,
        /// Growing series that stay below this bound count as consistent.
        #[arg(long)]
        bound: Option<f64>,
        /// Tail length used by the verdict [default: 5].
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Spectral distance between two points of a commutative level.
    Distance {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        level: usize,
        /// Point coordinate (Cantor systems, e.g. `2/3`) or point index.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Validation, gap series, commutator series and verdicts in one JSON.
    Report {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Debug, Args)]
pub struct Source {
    /// Generator config (JSON).
    #[arg(long, conflicts_with = "system", required_unless_present = "system")]
    pub config: Option<PathBuf>,
    /// System file written by `build`.
    #[arg(long)]
    pub system: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Relative width for merging eigenvalues into one cluster.
    #[arg(long)]
    pub tol_group: Option<f64>,
    /// Residual `‖Q − P_j Q‖` up to which an eigencluster counts as inside `𝓗_j`.
    #[arg(long)]
    pub tol_contain: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; with CSV the verdicts go to `<out>.verdict.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    /// Exit code 2.
    Input(String),
    /// Exit code 1.
    Math(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Math(_) => 1,
        }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(m) => write!(f, "input error: {m}"),
            Self::Math(m) => write!(f, "{m}"),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input(e: impl Display) -> Failure {
    Failure::Input(e.to_string())
}

/// Library errors during computation: unsupported requests and bad
/// arguments are input errors, everything else is a mathematical failure.
fn compute(e: Error) -> Failure {
    match e {
        Error::Unsupported(_) | Error::Io(_) | Error::Json(_) => input(e),
        other => Failure::Math(other.to_string()),
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_entry() -> i32 {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialization (tests) is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Outcome<i32> {
    match command {
        Command::Build { config, out } => cmd_build(&config, out.as_deref()),
        Command::Validate { system, out, tol } => cmd_validate(&system, out.as_deref(), &tol),
        Command::St1 { source, lambdas, functions, levels, threshold, window, output, tol } => {
            let mut loaded = load(&source, &tol)?;
            override_probes(&mut loaded.probes, &lambdas, &functions, levels.as_deref(), threshold, window)?;
            cmd_st1(&loaded, &output)
        }
        Command::St2 { source, elements, levels, bound, window, output, tol } => {
            let mut loaded = load(&source, &tol)?;
            if let Some(l) = levels {
                let r = parse_levels(&l)?;
                loaded.probes.levels = Some([*r.start(), *r.end()]);
            }
            loaded.probes.bound = bound.or(loaded.probes.bound);
            loaded.probes.window = window.or(loaded.probes.window);
            cmd_st2(&loaded, &elements, &output)
        }
        Command::Distance { system, level, x, y, format } => cmd_distance(&system, level, &x, &y, format),
        Command::Report { source, out, tol } => cmd_report(&load(&source, &tol)?, out.as_deref()),
    }
}

/// A system together with the probes and tolerances to run on it.
struct Loaded {
    system: InductiveSystem,
    probes: ProbeConfig,
    tol: Tolerances,
    config: Option<RunConfig>,
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn apply_tol(mut tol: Tolerances, args: &TolArgs) -> Tolerances {
    if let Some(g) = args.tol_group {
        tol.group = g;
    }
    if let Some(c) = args.tol_contain {
        tol.contain = c;
    }
    tol
}

fn read_system(path: &Path) -> Outcome<InductiveSystem> {
    serde_json::from_str(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load(source: &Source, tol: &TolArgs) -> Outcome<Loaded> {
    match (&source.config, &source.system) {
        (Some(path), _) => {
            let config = RunConfig::from_json(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
            let tol = apply_tol(config.tolerances, tol);
            let system = config.system.build(&tol).map_err(|e| Failure::Math(format!("generator failed: {e}")))?;
            Ok(Loaded { system, probes: config.probes.clone(), tol, config: Some(config) })
        }
        (None, Some(path)) => Ok(Loaded {
            system: read_system(path)?,
            probes: ProbeConfig::default(),
            tol: apply_tol(Tolerances::default(), tol),
            config: None,
        }),
        (None, None) => Err(input("one of --config or --system is required")),
    }
}

/// Parses `a+bi`, `bi`, `a` style complex numbers; `i` alone means `0+1i`.
pub fn parse_lambda(s: &str) -> Outcome<Complex64> {
    let t = s.trim().replace(' ', "");
    let t = match t.as_str() {
        "i" | "+i" => "0+1i".to_string(),
        "-i" => "0-1i".to_string(),
        _ => t.replace("+i", "+1i").replace("-i", "-1i"),
    };
    let z = Complex64::from_str(&t).map_err(|_| input(format!("cannot parse λ = {s:?}; expected a+bi")))?;
    if !(z.re.is_finite() && z.im.is_finite()) || z.im == 0.0 {
        return Err(input(format!("λ = {s} must be finite and non-real")));
    }
    Ok(z)
}

/// `a..b` or `a..=b`, both inclusive.
pub fn parse_levels(s: &str) -> Outcome<RangeInclusive<usize>> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| input(format!("level range {s:?} must look like a..b")))?;
    let a: usize = a.trim().parse().map_err(|_| input(format!("bad level range {s:?}")))?;
    let b: usize = b.trim().parse().map_err(|_| input(format!("bad level range {s:?}")))?;
    if a > b {
        return Err(input(format!("level range {s:?} is empty")));
    }
    Ok(a..=b)
}

fn override_probes(
    probes: &mut ProbeConfig,
    lambdas: &[String],
    functions: &[String],
    levels: Option<&str>,
    threshold: Option<f64>,
    window: Option<usize>,
) -> Outcome<()> {
    if !lambdas.is_empty() || !functions.is_empty() {
        probes.lambdas = lambdas.iter().map(|s| parse_lambda(s).map(Into::into)).collect::<Outcome<_>>()?;
        probes.functions =
            functions.iter().map(|s| ProbeFunction::from_name(s).map_err(input)).collect::<Outcome<_>>()?;
    }
    if let Some(l) = levels {
        let r = parse_levels(l)?;
        probes.levels = Some([*r.start(), *r.end()]);
    }
    probes.threshold = threshold.or(probes.threshold);
    probes.window = window.or(probes.window);
    Ok(())
}

fn level_range(probes: &ProbeConfig, top: usize) -> Outcome<RangeInclusive<usize>> {
    let [a, b] = probes.levels.unwrap_or([0, top]);
    if a > b || b > top {
        return Err(input(format!("level range {a}..{b} must lie within 0..{top}")));
    }
    Ok(a..=b)
}

/// Resolvent probes first (explicit λ, or the defaults when neither λ nor
/// functions are given), then function probes.
fn gap_probes(probes: &ProbeConfig) -> Vec<GapProbe> {
    let lambdas = if probes.lambdas.is_empty() && probes.functions.is_empty() {
        default_lambdas()
    } else {
        probes.lambdas.iter().map(|&z| z.into()).collect()
    };
    lambdas
        .into_iter()
        .map(GapProbe::resolvent)
        .chain(probes.functions.iter().map(|&f| GapProbe::function(f)))
        .collect()
}

fn write_out(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(input)?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n").map_err(input)?;
            }
            Ok(())
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_build(config: &Path, out: Option<&Path>) -> Outcome<i32> {
    let config = RunConfig::from_json(&read(config)?).map_err(|e| input(format!("{}: {e}", config.display())))?;
    let system = config.system.build(&config.tolerances).map_err(|e| Failure::Math(format!("generator failed: {e}")))?;
    write_out(out, &serde_json::to_string(&system).map_err(input)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct ValidationOutput {
    passed: bool,
    system: SystemReport,
    realization: Option<RealizationReport>,
}

fn validation_output(system: &InductiveSystem, tol: &Tolerances) -> Outcome<ValidationOutput> {
    let report = system_validate(system, tol).map_err(compute)?;
    let realization = if report.passed {
        let r = realize(system, system.top_level(), tol).map_err(compute)?;
        Some(realization_validate(&r, tol).map_err(compute)?)
    } else {
        None
    };
    let passed = report.passed && realization.as_ref().is_some_and(|r| r.passed);
    Ok(ValidationOutput { passed, system: report, realization })
}

fn cmd_validate(path: &Path, out: Option<&Path>, tol: &TolArgs) -> Outcome<i32> {
    let system = read_system(path)?;
    let output = validation_output(&system, &apply_tol(Tolerances::default(), tol))?;
    write_out(out, &to_json(&output))?;
    if output.passed {
        return Ok(0);
    }
    for f in output.system.failures.iter().chain(output.realization.iter().flat_map(|r| r.failures.iter())) {
        eprintln!("validation failed: {f}");
    }
    Ok(1)
}

#[derive(Serialize)]
struct St1Output {
    series: Vec<GapSeries>,
    verdicts: Vec<Verdict>,
}

fn st1_results(loaded: &Loaded) -> Outcome<St1Output> {
    let top = loaded.system.top_level();
    let range = level_range(&loaded.probes, top)?;
    let r = realize(&loaded.system, top, &loaded.tol).map_err(compute)?;
    let mut series = Vec::new();
    for probe in gap_probes(&loaded.probes) {
        series.push(gap_series(&r, &probe, range.clone()).map_err(compute)?);
    }
    let verdicts =
        series.iter().map(|s| st1_verdict(s, loaded.probes.threshold(), loaded.probes.window())).collect();
    Ok(St1Output { series, verdicts })
}

fn st1_csv(series: &[GapSeries]) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "j", "lambda_re", "lambda_im", "f_name", "gap", "analytic_bound", "cross_check"])
        .map_err(input)?;
    for s in series {
        let (kind, re, im, name) = match s.probe {
            GapProbe::Resolvent { lambda } => ("resolvent", float(lambda.re), float(lambda.im), String::new()),
            GapProbe::Function { name } => ("function", String::new(), String::new(), name.name().to_string()),
        };
        for e in &s.entries {
            w.write_record([
                kind.to_string(),
                e.j.to_string(),
                re.clone(),
                im.clone(),
                name.clone(),
                float(e.gap),
                e.analytic_bound.map(float).unwrap_or_default(),
                float(e.cross_check),
            ])
            .map_err(input)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(input)?).map_err(input)
}

/// Writes the table and the verdicts: CSV plus `<out>.verdict.json` (or
/// verdicts on stderr without `--out`), or a single JSON document.
fn emit(output: &OutputArgs, csv: impl FnOnce() -> Outcome<String>, verdicts: &impl Serialize, all: &impl Serialize) -> Outcome<()> {
    match output.format {
        Format::Json => write_out(output.out.as_deref(), &to_json(all)),
        Format::Csv => {
            write_out(output.out.as_deref(), &csv()?)?;
            match &output.out {
                Some(p) => {
                    let mut name = p.as_os_str().to_owned();
                    name.push(".verdict.json");
                    write_out(Some(Path::new(&name)), &to_json(verdicts))
                }
                None => {
                    eprint!("{}", to_json(verdicts));
                    Ok(())
                }
            }
        }
    }
}

fn st1_failed(out: &St1Output) -> bool {
    out.verdicts.iter().any(|v| v.classification == Classification::Inconsistent)
        || out.series.iter().flat_map(|s| &s.entries).any(|e| e.cross_check > CROSS_CHECK_TOL)
}

fn cmd_st1(loaded: &Loaded, output: &OutputArgs) -> Outcome<i32> {
    let out = st1_results(loaded)?;
    emit(output, || st1_csv(&out.series), &out.verdicts, &out)?;
    Ok(if st1_failed(&out) { 1 } else { 0 })
}

#[derive(Serialize)]
struct St2Output {
    series: Vec<CommutatorSeries>,
    verdict: Verdict,
}

fn parse_element(s: &str, system: &InductiveSystem) -> Outcome<(usize, usize)> {
    let (j, i) = s.split_once(':').ok_or_else(|| input(format!("element {s:?} must look like j:i")))?;
    let j: usize = j.trim().parse().map_err(|_| input(format!("bad element level in {s:?}")))?;
    let i: usize = i.trim().parse().map_err(|_| input(format!("bad generator index in {s:?}")))?;
    if j > system.top_level() {
        return Err(input(format!("element {s}: level {j} exceeds the top level {}", system.top_level())));
    }
    let count = system.triple(j).algebra().hermitian_generators().len();
    if i >= count {
        return Err(input(format!("element {s}: A_{j} has {count} Hermitian generators")));
    }
    Ok((j, i))
}

fn st2_results(loaded: &Loaded, elements: &[String]) -> Outcome<St2Output> {
    let s = &loaded.system;
    let top = s.top_level();
    let series = if elements.is_empty() {
        let range = level_range(&loaded.probes, top)?;
        generator_series(s, range, top, DEFAULT_GENERATORS_PER_LEVEL).map_err(compute)?
    } else {
        let mut series = Vec::new();
        for e in elements {
            let (j, i) = parse_element(e, s)?;
            let a = s.triple(j).algebra().hermitian_generators().swap_remove(i);
            let mut c = commutator_series(s, j, &a, top).map_err(compute)?;
            c.generator = Some(i);
            series.push(c);
        }
        series
    };
    let verdict = st2_verdict(&series, loaded.probes.window(), loaded.probes.bound);
    Ok(St2Output { series, verdict })
}

fn st2_csv(series: &[CommutatorSeries]) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "base_level", "generator", "k", "norm", "monotone"]).map_err(input)?;
    for s in series {
        for e in &s.entries {
            w.write_record([
                "commutator".to_string(),
                s.base_level.to_string(),
                s.generator.map(|g| g.to_string()).unwrap_or_default(),
                e.k.to_string(),
                float(e.norm),
                s.monotone.to_string(),
            ])
            .map_err(input)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(input)?).map_err(input)
}

fn st2_failed(out: &St2Output) -> bool {
    out.verdict.classification == Classification::Inconsistent || out.series.iter().any(|s| !s.monotone)
}

fn cmd_st2(loaded: &Loaded, elements: &[String], output: &OutputArgs) -> Outcome<i32> {
    let out = st2_results(loaded, elements)?;
    emit(output, || st2_csv(&out.series), &out.verdict, &out)?;
    Ok(if st2_failed(&out) { 1 } else { 0 })
}

/// Parses a decimal or `p/q` coordinate.
fn parse_coordinate(s: &str) -> Outcome<f64> {
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| input(format!("bad coordinate {s:?}")))?;
            let q: f64 = q.trim().parse().map_err(|_| input(format!("bad coordinate {s:?}")))?;
            p / q
        }
        None => s.trim().parse().map_err(|_| input(format!("bad coordinate {s:?}")))?,
    };
    if !value.is_finite() {
        return Err(input(format!("bad coordinate {s:?}")));
    }
    Ok(value)
}

/// Point index of `s` at level `j`: a coordinate matched within `1e-9`
/// against `x_{m,+}` for Cantor systems, an index otherwise.
fn parse_point(s: &str, system: &InductiveSystem, j: usize) -> Outcome<usize> {
    let points = system.triple(j).algebra().dim();
    if let Provenance::Cantor { gaps } = system.provenance() {
        let x = parse_coordinate(s)?;
        return gaps
            .level_points(j)
            .iter()
            .position(|p| (p - x).abs() <= 1e-9)
            .ok_or_else(|| input(format!("{s} is not a point of level {j}; points are {:?}", gaps.level_points(j))));
    }
    let m: usize = s.trim().parse().map_err(|_| input(format!("bad point index {s:?}")))?;
    if m >= points {
        return Err(input(format!("point {m} out of range; level {j} has {points} points")));
    }
    Ok(m)
}

#[derive(Serialize)]
struct DistanceOutput {
    level: usize,
    x: usize,
    y: usize,
    infinite: bool,
    distance: Distance,
    /// Coordinates of the path points for Cantor systems.
    path_coordinates: Option<Vec<f64>>,
}

fn cmd_distance(path: &Path, level: usize, x: &str, y: &str, format: Format) -> Outcome<i32> {
    let system = read_system(path)?;
    if level > system.top_level() {
        return Err(input(format!("level {level} exceeds the top level {}", system.top_level())));
    }
    let (px, py) = (parse_point(x, &system, level)?, parse_point(y, &system, level)?);
    let d = connes_distance(system.triple(level), px, py).map_err(compute)?;
    let coords = match system.provenance() {
        Provenance::Cantor { gaps } => {
            let points = gaps.level_points(level);
            d.path.as_ref().map(|p| p.iter().map(|&m| points[m]).collect::<Vec<_>>())
        }
        _ => None,
    };
    match format {
        Format::Json => write_out(
            None,
            &to_json(&DistanceOutput {
                level,
                x: px,
                y: py,
                infinite: d.is_infinite(),
                distance: d,
                path_coordinates: coords,
            }),
        )?,
        Format::Csv => {
            let value = if d.is_infinite() { "infinite".to_string() } else { float(d.value) };
            let mut text = format!("distance,{value}\nmethod,{:?}\n", d.method);
            if let Some(path) = &d.path {
                let shown: Vec<String> = match &coords {
                    Some(c) => c.iter().map(|v| float(*v)).collect(),
                    None => path.iter().map(|m| m.to_string()).collect(),
                };
                text.push_str(&format!("path,{}\n", shown.join(" -> ")));
            }
            write_out(None, &text)?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct SystemSummary {
    levels: usize,
    dims: Vec<usize>,
    generator: String,
}

#[derive(Serialize)]
struct Report {
    tool_version: &'static str,
    config: Option<RunConfig>,
    system: SystemSummary,
    validation: ValidationOutput,
    gap_series: Vec<GapSeries>,
    st1: Vec<Verdict>,
    commutator_series: Vec<CommutatorSeries>,
    st2: Verdict,
}

fn cmd_report(loaded: &Loaded, out: Option<&Path>) -> Outcome<i32> {
    let s = &loaded.system;
    let validation = validation_output(s, &loaded.tol)?;
    let st1 = st1_results(loaded)?;
    let st2 = st2_results(loaded, &[])?;
    let generator = serde_json::to_value(s.provenance())
        .ok()
        .and_then(|v| v.get("type").and_then(|t| t.as_str()).map(str::to_string))
        .unwrap_or_else(|| "custom".to_string());
    let failed = !validation.passed || st1_failed(&st1) || st2_failed(&st2);
    let report = Report {
        tool_version: env!("CARGO_PKG_VERSION"),
        config: loaded.config.clone(),
        system: SystemSummary { levels: s.top_level(), dims: s.dims(), generator },
        validation,
        gap_series: st1.series,
        st1: st1.verdicts,
        commutator_series: st2.series,
        st2: st2.verdict,
    };
    write_out(out, &to_json(&report))?;
    Ok(if failed { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_forms() {
        assert_eq!(parse_lambda("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_lambda("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_lambda("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_lambda("1+i").unwrap(), Complex64::new(1.0, 1.0));
        assert_eq!(parse_lambda("-0.5-2i").unwrap(), Complex64::new(-0.5, -2.0));
        assert!(matches!(parse_lambda("3"), Err(Failure::Input(_))));
        assert!(parse_lambda("x").is_err());
    }

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("2..5").unwrap(), 2..=5);
        assert_eq!(parse_levels("0..=3").unwrap(), 0..=3);
        assert!(parse_levels("5..2").is_err());
        assert!(parse_levels("7").is_err());
    }

    #[test]
    fn fractional_coordinates() {
        assert!((parse_coordinate("2/3").unwrap() - 2.0 / 3.0).abs() < 1e-16);
        assert_eq!(parse_coordinate("0").unwrap(), 0.0);
        assert!(parse_coordinate("1/0").is_err());
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(float(1.0 / 3.0), "3.3333333333333331e-1");
    }
}
