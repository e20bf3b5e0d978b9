//! Argument parsing and subcommand dispatch for the `capq` binary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use capq::bounds::{beta0_check, k_between_levels, k_level, k_zero_level, BoundRequest};
use capq::capacitor::{presets, rasterize, CapacitorSpec};
use capq::chain::{build_chain, cauchy_riemann_residual, MapChain};
use capq::collar::CollarResult;
use capq::equipotential::{extract_level, validate_jordan, JordanDiagnostics};
use capq::io;
use capq::pipeline::{analyze_field, compare_levels, PipelineOptions};
use capq::solver::{solve_potential, PotentialField, DEFAULT_TOLERANCE};
use capq::special::{elliptic_k, groetzsch_mu, jacobi_sn};
use capq::turning::turning_constant_of;
use capq::Point;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const MIN_RESOLUTION: usize = 64;
pub const MAX_RESOLUTION: usize = 8192;

/// Bad command line or bad input file contents.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Some selftest identities did not hold.
#[derive(Debug)]
pub struct SelftestFailed(pub usize);

impl fmt::Display for SelftestFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} selftest check(s) failed", self.0)
    }
}

impl std::error::Error for SelftestFailed {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(name = "capq", version, about = "Capacity, equipotentials and quasicircle bounds for planar capacitors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// `0.5 < |z| < 2`
    Annulus,
    /// Unit discs at `∓2`
    TwoDiscs,
    /// The twisted Teichmüller domain of the chain with `r = 1/√2`
    TwistedTeichmuller,
    /// `[−1, −p] ∪ [p, 1]`, Möbius equivalent to the Teichmüller ring
    SymmetricSlits,
}

impl Preset {
    pub fn spec(self, resolution: usize) -> CapacitorSpec {
        match self {
            Preset::Annulus => presets::annulus(0.5, 2.0, resolution),
            Preset::TwoDiscs => presets::two_discs(resolution),
            Preset::TwistedTeichmuller => {
                let gap = build_chain(MapChain::default_radius())
                    .expect("default chain")
                    .gap;
                presets::twisted_teichmuller(gap, 4.0, resolution)
            }
            Preset::SymmetricSlits => {
                presets::symmetric_slits(presets::teichmuller_slit_parameter(), 1.25, resolution)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Capacitor spec (JSON, schema capq-spec/1)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in capacitor instead of a spec file
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: Source,
    /// Grid cells per side; a power of two in [64, 8192]
    #[arg(long, value_parser = parse_resolution)]
    pub resolution: Option<usize>,
    /// Relative residual of the linear solve
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, default_value = "capq-out")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct LevelArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Comma-separated potential levels in (-1, 1)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub levels: LevelArgs,
    /// Write an SVG overlay of continua and level curves
    #[arg(long)]
    pub svg: bool,
    /// Doubly connected subdomain whose capacity certifies a homotopy bound
    #[arg(long)]
    pub subdomain: Option<PathBuf>,
    /// Level pairs `a:b` for the between-levels bound
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_pair)]
    pub compare: Vec<(f64, f64)>,
    /// Vertices kept for the turning-constant scan
    #[arg(long, default_value_t = capq::pipeline::DEFAULT_MAX_TURNING_SAMPLES)]
    pub max_turning_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct BoundsArgs {
    /// Bound name, e.g. level, zero_level, geodesic
    #[arg(required_unless_present = "batch", conflicts_with = "batch")]
    pub kind: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub cap: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub cap_lower_bound: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub ell: Option<f64>,
    /// JSON array of bound requests
    #[arg(long)]
    pub batch: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
#[group(required = true, multiple = false)]
pub struct CollarArgs {
    /// Geodesic length
    #[arg(long)]
    pub length: Option<f64>,
    /// Inner radius `r` of the annulus `𝔸(r, 1/r)`
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ChainArgs {
    /// Inner radius `r` of the annulus `𝔸(r, 1/r)`
    #[arg(long, default_value_t = MapChain::default_radius())]
    pub radius: f64,
    /// Radii of the sampled circles; defaults to seven between r and 1/r
    #[arg(long, value_delimiter = ',')]
    pub circles: Vec<f64>,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[arg(long)]
    pub svg: bool,
    #[arg(long, default_value = "capq-out")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Solve for the extremal potential and capacity
    Solve(SolveArgs),
    /// Extract level curves as CSV
    Levels(LevelArgs),
    /// Full report: capacity, level curves, turning constants, bounds
    Analyze(AnalyzeArgs),
    /// Evaluate a closed-form distortion bound
    Bounds(BoundsArgs),
    /// Collar of a closed geodesic in an annulus
    Collar(CollarArgs),
    /// Sample the conformal chain onto the twisted Teichmüller domain
    Chain(ChainArgs),
    /// Check identities between the special functions and solvers
    Selftest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Worker threads, capped by `CAPQ_THREADS`.
    pub threads: usize,
}

pub fn parse_resolution(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("not an integer: {s:?}"))?;
    check_resolution(n)?;
    Ok(n)
}

fn check_resolution(n: usize) -> std::result::Result<(), String> {
    if n.is_power_of_two() && (MIN_RESOLUTION..=MAX_RESOLUTION).contains(&n) {
        Ok(())
    } else {
        Err(format!(
            "resolution must be a power of two in [{MIN_RESOLUTION}, {MAX_RESOLUTION}], got {n}"
        ))
    }
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("not a number: {x:?}"));
    Ok((num(a)?, num(b)?))
}

/// Thread count from an optional `CAPQ_THREADS` value.
pub fn threads_from(var: Option<&str>) -> Result<usize> {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match var {
        None => Ok(available),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n.min(available)),
            _ => Err(usage(format!("CAPQ_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

/// Parses `argv` (without the program name).
pub fn parse_args<I, S>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once("capq".into()).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args)?;
    let threads = threads_from(std::env::var("CAPQ_THREADS").ok().as_deref())?;
    Ok(RunConfig {
        command: cli.command,
        threads,
    })
}

/// Process exit status for an error.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<clap::Error>() {
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
        if cause.is::<SelftestFailed>() {
            return EXIT_NUMERICAL;
        }
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<capq::Error>() {
            return match e.root() {
                capq::Error::Io(_) => EXIT_IO,
                e if e.is_numerical() => EXIT_NUMERICAL,
                _ => EXIT_USAGE,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_NUMERICAL
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(config: &RunConfig, out: &mut dyn std::io::Write) -> Result<()> {
    match &config.command {
        Command::Solve(a) => solve_cmd(a, out),
        Command::Levels(a) => levels_cmd(a, out),
        Command::Analyze(a) => analyze_cmd(a, config.threads, out),
        Command::Bounds(a) => bounds_cmd(a, out),
        Command::Collar(a) => collar_cmd(a, out),
        Command::Chain(a) => chain_cmd(a, out),
        Command::Selftest => {
            let failures = selftest(out)?;
            if failures > 0 {
                return Err(SelftestFailed(failures).into());
            }
            Ok(())
        }
    }
}

fn print_json(out: &mut dyn std::io::Write, value: &impl Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn load_spec(a: &SolveArgs) -> Result<CapacitorSpec> {
    let spec = match (&a.source.input, a.source.preset) {
        (Some(path), _) => io::read_spec(path).map_err(|e| match e {
            capq::Error::Io(_) => anyhow::Error::new(e).context(format!("reading {}", path.display())),
            e => usage(format!("{}: {e}", path.display())),
        })?,
        (None, Some(p)) => p.spec(a.resolution.unwrap_or(256)),
        (None, None) => return Err(usage("one of --input or --preset is required")),
    };
    let spec = match a.resolution {
        Some(n) => spec.with_resolution(n),
        None => spec,
    };
    check_resolution(spec.grid.resolution).map_err(usage)?;
    Ok(spec)
}

fn solve_spec(spec: &CapacitorSpec, tolerance: f64) -> Result<PotentialField> {
    let valid = spec.clone().validate()?;
    let mask = rasterize(&valid)?;
    Ok(solve_potential(&mask, tolerance)?)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn solve_summary(field: &PotentialField) -> Value {
    json!({
        "capacity": field.capacity,
        "dirichlet_functional": field.dirichlet_functional,
        "residual": field.residual,
        "iterations": field.iterations,
        "reliable": field.reliable,
        "cells_per_side": field.mask.n,
    })
}

fn solve_cmd(a: &SolveArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let spec = load_spec(a)?;
    let field = solve_spec(&spec, a.tolerance)?;
    create_dir(&a.output)?;
    io::write_field(&field, &a.output)?;
    let summary = solve_summary(&field);
    fs::write(a.output.join("solve.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    print_json(out, &summary)
}

#[derive(Serialize)]
struct LevelSummary {
    level: f64,
    arc_length: f64,
    points: usize,
    separating_components: usize,
    jordan: JordanDiagnostics,
    csv: String,
}

fn levels_cmd(a: &LevelArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let levels = capq::pipeline::normalize_levels(&a.levels).map_err(|e| usage(e.to_string()))?;
    let spec = load_spec(&a.solve)?;
    let field = solve_spec(&spec, a.solve.tolerance)?;
    create_dir(&a.solve.output)?;
    let mut summary = Vec::new();
    for (k, &level) in levels.iter().enumerate() {
        let curve = extract_level(&field, level)?;
        let csv = format!("{}.csv", io::curve_stem(k));
        io::write_curve_csv(&curve, &a.solve.output.join(&csv))?;
        summary.push(LevelSummary {
            level,
            arc_length: curve.arc_length,
            points: curve.points.len(),
            separating_components: curve.separating_components,
            jordan: validate_jordan(&curve, field.mask.e_anchor),
            csv,
        });
    }
    let doc = json!({ "capacity": field.capacity, "levels": summary });
    fs::write(a.solve.output.join("levels.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    print_json(out, &doc)
}

fn analyze_cmd(a: &AnalyzeArgs, threads: usize, out: &mut dyn std::io::Write) -> Result<()> {
    let s = &a.levels.solve;
    let levels = capq::pipeline::normalize_levels(&a.levels.levels).map_err(|e| usage(e.to_string()))?;
    let spec = load_spec(s)?;
    let subdomain = match &a.subdomain {
        Some(p) => Some(io::read_spec(p).map_err(|e| match e {
            capq::Error::Io(_) => anyhow::Error::new(e),
            e => usage(format!("{}: {e}", p.display())),
        })?),
        None => None,
    };
    let options = PipelineOptions {
        tolerance: s.tolerance,
        max_turning_samples: a.max_turning_samples,
        threads,
        homotopy_subdomain: subdomain,
    };
    let start = Instant::now();
    let field = solve_spec(&spec, s.tolerance)?;
    let solved = start.elapsed();
    let mut report = analyze_field(&spec, &field, &levels, &options)?;
    for &(x, y) in &a.compare {
        compare_levels(&mut report, x, y)?;
    }
    let total = start.elapsed();

    create_dir(&s.output)?;
    io::write_report(&report, &s.output)?;
    if a.svg {
        io::emit_svg(&report, &spec, &s.output.join("levels.svg"))?;
    }
    let timing = json!({
        "solve_seconds": solved.as_secs_f64(),
        "total_seconds": total.as_secs_f64(),
        "threads": threads,
    });
    fs::write(s.output.join("timing.json"), serde_json::to_string_pretty(&timing)? + "\n")?;

    writeln!(out, "capacity {:.10}", report.capacity)?;
    for r in &report.levels {
        writeln!(
            out,
            "level {:+.4}  turning {:.6}  K_a {:.6}  jordan {}",
            r.level,
            r.turning.constant,
            r.k_level,
            r.curve.jordan.is_jordan()
        )?;
    }
    writeln!(out, "K_0 {:.6}", report.bounds[0].k)?;
    for c in &report.comparisons {
        writeln!(out, "K({}, {}) {:.6}", c.a, c.b, c.k)?;
    }
    writeln!(out, "wrote {}", s.output.display())?;
    Ok(())
}

fn bounds_cmd(a: &BoundsArgs, out: &mut dyn std::io::Write) -> Result<()> {
    if let Some(path) = &a.batch {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let requests: Vec<BoundRequest> =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let reports = requests
            .iter()
            .map(BoundRequest::evaluate)
            .collect::<capq::Result<Vec<_>>>()?;
        return print_json(out, &reports);
    }
    let kind = a.kind.as_deref().ok_or_else(|| usage("missing bound kind"))?;
    let mut obj = serde_json::Map::new();
    obj.insert("bound".into(), Value::from(kind));
    for (name, v) in [
        ("cap", a.cap),
        ("cap_lower_bound", a.cap_lower_bound),
        ("a", a.a),
        ("b", a.b),
        ("r", a.r),
        ("s", a.s),
        ("t", a.t),
        ("ell", a.ell),
    ] {
        if let Some(v) = v {
            obj.insert(name.into(), Value::from(v));
        }
    }
    let request: BoundRequest = serde_json::from_value(Value::Object(obj))
        .map_err(|e| usage(format!("bound {kind}: {e}")))?;
    print_json(out, &request.evaluate()?)
}

fn collar_cmd(a: &CollarArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let c = match (a.length, a.radius) {
        (Some(ell), _) => CollarResult::from_length(ell),
        (None, Some(r)) => CollarResult::from_radius(r),
        (None, None) => return Err(usage("one of --length or --radius is required")),
    }
    .map_err(|e| usage(e.to_string()))?;
    print_json(out, &c)
}

fn chain_cmd(a: &ChainArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let chain = build_chain(a.radius).map_err(|e| match e {
        e if e.is_numerical() => anyhow::Error::new(e),
        e => usage(e.to_string()),
    })?;
    if a.samples < 8 {
        return Err(usage("--samples must be at least 8"));
    }
    let circles: Vec<f64> = if a.circles.is_empty() {
        (-3..=3).map(|k| a.radius.powf(k as f64 / 4.0)).collect()
    } else {
        a.circles.clone()
    };
    let curves = circles
        .iter()
        .map(|&rho| Ok((rho, chain.circle_image(rho, a.samples)?)))
        .collect::<capq::Result<Vec<(f64, Vec<Point>)>>>()
        .map_err(|e| usage(e.to_string()))?;
    create_dir(&a.output)?;
    fs::write(a.output.join("chain.csv"), io::chain_csv(&curves))?;
    if a.svg {
        fs::write(a.output.join("chain.svg"), io::render_chain_svg(&curves)?)?;
    }
    let doc = json!({
        "chain": chain,
        "capacity": chain.capacity(),
        "diagnostics": chain.diagnostics(256)?,
        "circles": circles,
    });
    fs::write(a.output.join("chain.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    print_json(out, &doc)
}

struct Check {
    name: &'static str,
    value: f64,
    expected: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

/// Runs the identity suite; returns the number of failed checks.
pub fn selftest(out: &mut dyn std::io::Write) -> Result<usize> {
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
    let kk = elliptic_k(FRAC_1_SQRT_2)?;
    let sn_at_k = jacobi_sn(Point::new(kk, 0.0), FRAC_1_SQRT_2)?;
    let mu = groetzsch_mu(0.6)? * groetzsch_mu(0.8)?;
    let chain = build_chain(FRAC_1_SQRT_2)?;
    let cr = cauchy_riemann_residual(|z| chain.evaluate(z), Point::new(0.3, 0.95), 1e-5)?;
    let collar = CollarResult::from_length(PI)?;
    let circle: Vec<Point> = (0..256)
        .map(|k| Point::from_polar(1.0, std::f64::consts::TAU * k as f64 / 256.0))
        .collect();
    let annulus = solve_spec(&presets::annulus(0.5, 2.0, 256), DEFAULT_TOLERANCE)?;

    let checks = [
        Check { name: "K(1/sqrt 2) lemniscate value", value: kk, expected: 1.854_074_677_301_372, tolerance: 1e-13 },
        Check { name: "sn(K) = 1", value: sn_at_k.re, expected: 1.0, tolerance: 1e-12 },
        Check { name: "mu(k) mu(k') = pi^2/4", value: mu, expected: PI * PI / 4.0, tolerance: 1e-12 },
        Check { name: "chain capacity at r = 1/sqrt 2", value: chain.capacity(), expected: LN_2, tolerance: 1e-15 },
        Check { name: "chain Cauchy-Riemann residual", value: cr, expected: 0.0, tolerance: 1e-6 },
        Check { name: "collar delta0 from radii", value: collar.delta0_from_radii(), expected: collar.delta0, tolerance: 1e-12 },
        Check { name: "turning constant of a circle", value: turning_constant_of(&circle)?.constant, expected: 1.0, tolerance: 1e-12 },
        Check { name: "K_0 = K_a at a = 0", value: k_level(LN_2, 0.0)?, expected: k_zero_level(LN_2)?, tolerance: 1e-15 },
        Check { name: "K(a, a) = 1", value: k_between_levels(0.3, 0.3)?, expected: 1.0, tolerance: 0.0 },
        Check { name: "annulus capacity log 4 (res 256)", value: annulus.capacity, expected: 4f64.ln(), tolerance: 0.02 },
    ];
    let mut failures = 0;
    for c in &checks {
        let ok = c.passed();
        failures += usize::from(!ok);
        writeln!(
            out,
            "{} {:<36} {:.15} (expected {:.15})",
            if ok { "ok  " } else { "FAIL" },
            c.name,
            c.value,
            c.expected
        )?;
    }
    let b = beta0_check();
    writeln!(
        out,
        "info stored beta0 {} vs Teichmuller ring oracle {:.15}: difference {:.3e}{}",
        b.stored,
        b.oracle,
        b.difference,
        if b.agrees { "" } else { " (outside tolerance)" }
    )?;
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_validation() {
        assert_eq!(parse_resolution("64"), Ok(64));
        assert_eq!(parse_resolution("8192"), Ok(8192));
        for bad in ["32", "100", "16384", "0", "x"] {
            assert!(parse_resolution(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn level_pairs() {
        assert_eq!(parse_pair("-0.5:0.25"), Ok((-0.5, 0.25)));
        assert!(parse_pair("0.5").is_err());
    }

    #[test]
    fn thread_cap() {
        let max = threads_from(None).unwrap();
        assert!(max >= 1);
        assert_eq!(threads_from(Some("1")).unwrap(), 1);
        assert_eq!(threads_from(Some("100000")).unwrap(), max);
        for bad in ["0", "-2", "many"] {
            let err = threads_from(Some(bad)).unwrap_err();
            assert_eq!(exit_code(&err), EXIT_USAGE);
        }
    }

    #[test]
    fn exit_codes_by_error_kind() {
        let io = anyhow::Error::new(capq::Error::Io(std::io::Error::other("x")));
        assert_eq!(exit_code(&io), EXIT_IO);
        let num = anyhow::Error::new(capq::Error::LevelNotFound(0.0));
        assert_eq!(exit_code(&num), EXIT_NUMERICAL);
        let bad = anyhow::Error::new(capq::Error::InvalidSpec("x".into()));
        assert_eq!(exit_code(&bad), EXIT_USAGE);
        assert_eq!(exit_code(&SelftestFailed(1).into()), EXIT_NUMERICAL);
    }
}
