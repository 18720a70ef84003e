//! `trajrot`: integrate trajectories, measure their rotation and linking,
//! and check rotation bounds on built-in or user-supplied fields.
//!
//! Exit codes: 0 success, 2 bad input or unmet precondition, 3 numerical
//! failure. Errors go to standard error prefixed with the error variant.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod repro;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use trajrot_core::curve::spherical_blowup;
use trajrot_core::fields::parse_numbers;
use trajrot_core::io::{read_curve_file, to_json, write_curve, write_curve_file};
use trajrot_core::*;

use crate::config::Config;

#[derive(Parser, Debug)]
#[command(name = "trajrot", version, about = "Rotation of trajectories of Lipschitz vector fields")]
struct Cli {
    /// Seed for every stochastic step (Lipschitz sampling, Monte Carlo, witness trials) [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the parallel kernels; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat `key = value` file with defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Integrate a trajectory and write it as CSV.
    Integrate(IntegrateArgs),
    /// Rotation of a curve around a point, line or subspace.
    Rotate(RotateArgs),
    /// Mutual rotation (Gauss integral) of two curves, and their linking number when closed.
    Link(LinkArgs),
    /// Crofton constants, or a Monte Carlo length estimate of a spherical curve.
    Crofton(CroftonArgs),
    /// Search for a pair of points with opposite projected velocities.
    Witness(WitnessArgs),
    /// Check rotation bounds on a scenario.
    Verify(VerifyArgs),
    /// Recompute the reference tables and write them to a directory.
    PaperRepro(ReproArgs),
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    /// Field spec: spiral2d, twist3d, constant:v1,..., linear:a11,a12,..., affine:...
    #[arg(long)]
    field: Option<String>,
    /// Start point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
    #[arg(long)]
    max_samples: Option<usize>,
    /// Refine output so each segment subtends at most 0.05 rad from this point.
    #[arg(long, allow_hyphen_values = true)]
    observe_point: Option<String>,
    /// Integrate in cylindrical coordinates about a line `base,dir` (3-d);
    /// needed when the trajectory approaches the line faster than f64 resolves.
    #[arg(long, allow_hyphen_values = true)]
    polar_axis: Option<String>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RotateArgs {
    /// Curve CSV (`t,x1,...,xn`); treated as closed when its ends coincide.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Line as `base,dir` (2n numbers).
    #[arg(long, allow_hyphen_values = true)]
    line: Option<String>,
    /// Affine subspace as `base;dir1;dir2;...`.
    #[arg(long, allow_hyphen_values = true)]
    subspace: Option<String>,
    /// abs or signed [default: abs].
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LinkArgs {
    #[arg(long)]
    curve1: Option<PathBuf>,
    #[arg(long)]
    curve2: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CroftonArgs {
    /// Print the constants for this dimension.
    #[arg(long)]
    constants: Option<usize>,
    /// Curve CSV; must lie on the unit sphere unless `--center` is given.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Blow the curve up from this point first.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Number of random equators [default: 10000].
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long)]
    curve: Option<PathBuf>,
    /// circle (planar curve around the origin), equator (spherical curve) or euclidean [default: circle].
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    /// Candidate planes or directions to try [default: 200].
    #[arg(long)]
    trials: Option<usize>,
    /// For equator witnesses: blow the curve up from this point first.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// spiral, sink, sink-pair, twist-line, twist-pair or flyby.
    #[arg(long)]
    scenario: Option<String>,
    /// Theorem ids (prop3_1, prop3_2, thm3_4, thm3_8, thm3_9, cor3_10, thm3_10_log), comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    theorem: Vec<String>,
    /// Replace the scenario's field.
    #[arg(long)]
    field: Option<String>,
    /// Replace the start points: `x;y` for a pair.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    subspace: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproArgs {
    /// Output directory [default: paper-repro].
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn known_keys() -> BTreeSet<String> {
    let cmd = Cli::command();
    let mut keys: BTreeSet<String> = cmd.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect();
    for sub in cmd.get_subcommands() {
        keys.extend(sub.get_arguments().filter_map(|a| a.get_long().map(str::to_string)));
    }
    keys.remove("config");
    keys.remove("help");
    keys.remove("version");
    keys
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.check_keys(&known_keys())?;
    let seed = cfg.or(cli.seed, "seed", 42)?;
    if let Some(n) = cfg.pick(cli.threads, "threads")? {
        if n == 0 {
            return Err(Error::InvalidInput("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    match cli.cmd {
        Cmd::Integrate(a) => integrate(a, &cfg),
        Cmd::Rotate(a) => rotate(a, &cfg),
        Cmd::Link(a) => link(a, &cfg),
        Cmd::Crofton(a) => crofton(a, &cfg, seed),
        Cmd::Witness(a) => witness(a, &cfg, seed),
        Cmd::Verify(a) => verify_cmd(a, &cfg, seed),
        Cmd::PaperRepro(a) => repro::run(&cfg.or(a.out, "out", PathBuf::from("paper-repro"))?),
    }
}

fn emit<T: Serialize + ?Sized>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = to_json(value)?;
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads a curve, closed when its endpoints coincide.
fn load_curve(path: &Path) -> Result<Curve> {
    match read_curve_file(path, true) {
        Err(Error::NotClosed(_)) => read_curve_file(path, false),
        r => r,
    }
}

fn mode(s: Option<String>) -> Result<Mode> {
    match s.as_deref().unwrap_or("abs") {
        "abs" | "absolute" => Ok(Mode::Absolute),
        "signed" => Ok(Mode::Signed),
        other => Err(Error::InvalidInput(format!("unknown mode '{other}', expected abs or signed"))),
    }
}

fn line_from(s: &str) -> Result<AffineSubspace> {
    let v = parse_numbers(s)?;
    if v.len() < 4 || v.len() % 2 != 0 {
        return Err(Error::Parse(format!("line needs base,dir (2n numbers), got {}", v.len())));
    }
    let n = v.len() / 2;
    AffineSubspace::line(v[..n].to_vec(), v[n..].to_vec())
}

fn subspace_from(s: &str) -> Result<AffineSubspace> {
    let mut parts = s.split(';');
    let base = parse_numbers(parts.next().unwrap_or(""))?;
    let dirs = parts.map(parse_numbers).collect::<Result<Vec<_>>>()?;
    AffineSubspace::new(base, dirs)
}

fn integrate(a: IntegrateArgs, cfg: &Config) -> Result<()> {
    let field = FieldSpec::from_str(&cfg.require(a.field, "field")?)?;
    let x0 = parse_numbers(&cfg.require(a.x0, "x0")?)?;
    let t0 = cfg.or(a.t0, "t0", 0.0)?;
    let t1: f64 = cfg.require(a.t1, "t1")?;
    if !(t1 > t0) {
        return Err(Error::InvalidInput("t1 must exceed t0".into()));
    }
    let d = IntegratorConfig::default();
    let ic = IntegratorConfig {
        rel_tol: cfg.or(a.rel_tol, "rel-tol", d.rel_tol)?,
        abs_tol: cfg.or(a.abs_tol, "abs-tol", d.abs_tol)?,
        max_step: cfg.or(a.max_step, "max-step", d.max_step)?,
        max_samples: cfg.or(a.max_samples, "max-samples", d.max_samples)?,
    };
    ic.validate()?;
    let curve = match cfg.pick(a.polar_axis, "polar-axis")? {
        Some(axis) => {
            let axis = line_from(&axis)?;
            let start = PolarState::from_point(&axis, &x0)?;
            integrate_polar(&field, &axis, &start, t0, t1, &ic)?.to_curve()?
        }
        None => {
            let observers = match cfg.pick(a.observe_point, "observe-point")? {
                Some(p) => vec![Observer::Point(parse_numbers(&p)?)],
                None => Vec::new(),
            };
            integrate_observed(&field, &x0, t0, t1, &ic, &observers)?
        }
    };
    match cfg.pick(a.out, "out")? {
        Some(p) => write_curve_file(&curve, &p),
        None => write_curve(&curve, std::io::stdout().lock()),
    }
}

fn rotate(a: RotateArgs, cfg: &Config) -> Result<()> {
    let curve = load_curve(&cfg.require(a.curve, "curve")?)?;
    let mode = mode(cfg.pick(a.mode, "mode")?)?;
    let point = cfg.pick(a.point, "point")?;
    let line = cfg.pick(a.line, "line")?;
    let subspace = cfg.pick(a.subspace, "subspace")?;
    let r = match (point, line, subspace) {
        (Some(p), None, None) => {
            let p = parse_numbers(&p)?;
            match mode {
                Mode::Absolute => absolute_rotation_point(&curve, &p)?,
                Mode::Signed => signed_winding_plane(&curve, &p)?,
            }
        }
        (None, Some(l), None) => rotation_around_subspace(&curve, &line_from(&l)?, mode)?,
        (None, None, Some(s)) => rotation_around_subspace(&curve, &subspace_from(&s)?, mode)?,
        _ => return Err(Error::InvalidInput("give exactly one of --point, --line, --subspace".into())),
    };
    emit(&r, cfg.pick(a.out, "out")?.as_deref())
}

fn link(a: LinkArgs, cfg: &Config) -> Result<()> {
    let c1 = load_curve(&cfg.require(a.curve1, "curve1")?)?;
    let c2 = load_curve(&cfg.require(a.curve2, "curve2")?)?;
    let signed = gauss_rotation_pair(&c1, &c2, Mode::Signed)?;
    let absolute = gauss_rotation_pair(&c1, &c2, Mode::Absolute)?;
    let linking = if c1.is_closed() && c2.is_closed() { Some(linking_coefficient(&c1, &c2)?) } else { None };
    let report = json!({
        "signed": signed,
        "absolute": absolute,
        "closed": [c1.is_closed(), c2.is_closed()],
        "linking": linking,
    });
    emit(&report, cfg.pick(a.out, "out")?.as_deref())
}

fn spherical(curve: Curve, center: Option<String>) -> Result<SphericalCurve> {
    match center {
        Some(c) => spherical_blowup(&curve, &parse_numbers(&c)?),
        None => SphericalCurve::new(curve),
    }
}

fn crofton(a: CroftonArgs, cfg: &Config, seed: u64) -> Result<()> {
    let out = cfg.pick(a.out, "out")?;
    let curve = cfg.pick(a.curve, "curve")?;
    if let Some(n) = cfg.pick(a.constants, "constants")? {
        if curve.is_none() {
            return emit(&crofton_constants(n)?, out.as_deref());
        }
    }
    let path = curve.ok_or_else(|| Error::InvalidInput("give --constants or --curve".into()))?;
    let s = spherical(load_curve(&path)?, cfg.pick(a.center, "center")?)?;
    let m = cfg.or(a.samples, "samples", 10_000)?;
    let est = crofton_length_estimate(&s, m, seed)?;
    let report = json!({
        "length": s.length(),
        "estimate": est,
        "constants": crofton_constants(s.dim())?,
        "seed": seed,
    });
    emit(&report, out.as_deref())
}

fn witness(a: WitnessArgs, cfg: &Config, seed: u64) -> Result<()> {
    let curve = load_curve(&cfg.require(a.curve, "curve")?)?;
    let theta: f64 = cfg.require(a.theta, "theta")?;
    let trials = cfg.or(a.trials, "trials", 200)?;
    let out = cfg.pick(a.out, "out")?;
    match cfg.or(a.kind, "kind", "circle".to_string())?.as_str() {
        "circle" => emit(&find_circle_witness(&curve, theta)?, out.as_deref()),
        "equator" => {
            let s = spherical(curve, cfg.pick(a.center, "center")?)?;
            emit(&find_equator_witness(&s, theta, trials, seed)?, out.as_deref())
        }
        "euclidean" => emit(&find_euclidean_witness(&curve, theta, trials, seed)?, out.as_deref()),
        other => Err(Error::InvalidInput(format!("unknown witness kind '{other}'"))),
    }
}

fn verify_cmd(a: VerifyArgs, cfg: &Config, seed: u64) -> Result<()> {
    let name: ScenarioName = cfg.require(a.scenario, "scenario")?.parse()?;
    let mut ids = a.theorem;
    if ids.is_empty() {
        if let Some(t) = cfg.get::<String>("theorem")? {
            ids = t.split(',').map(|s| s.trim().to_string()).collect();
        }
    }
    if ids.is_empty() {
        return Err(Error::InvalidInput("missing --theorem".into()));
    }
    let ids: Vec<TheoremId> = ids.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let overridden = a.field.is_some() || a.x0.is_some() || a.t0.is_some() || a.t1.is_some();
    if name == ScenarioName::TwistLine && overridden {
        return Err(Error::InvalidInput(
            "twist-line follows the twist field's invariant curve; field, start and window are fixed".into(),
        ));
    }
    let mut s = Scenario::new(name);
    if let Some(f) = cfg.pick(a.field, "field")? {
        s.field = f.parse()?;
    }
    if let Some(x) = cfg.pick(a.x0, "x0")? {
        s.starts = x.split(';').map(parse_numbers).collect::<Result<_>>()?;
        if s.starts.is_empty() || s.starts.len() > 2 {
            return Err(Error::InvalidInput("--x0 takes one start point or a pair 'x;y'".into()));
        }
    }
    s.t0 = cfg.or(a.t0, "t0", s.t0)?;
    s.t1 = cfg.or(a.t1, "t1", s.t1)?;
    if !(s.t1 > s.t0) {
        return Err(Error::InvalidInput("t1 must exceed t0".into()));
    }
    if let Some(p) = cfg.pick(a.point, "point")? {
        s.point = parse_numbers(&p)?;
    }
    if let Some(l) = cfg.pick(a.subspace, "subspace")? {
        s.subspace = Some(subspace_from(&l)?);
    }
    for x in s.starts.iter().chain([&s.point]) {
        if x.len() != s.field.dim() {
            return Err(Error::DimensionMismatch { expected: s.field.dim(), found: x.len() });
        }
    }
    let reports = ids.into_iter().map(|id| verify(&s, id, seed)).collect::<Result<Vec<_>>>()?;
    emit(&reports, cfg.pick(a.out, "out")?.as_deref())
}
