//! `odeff` command-line front end.
//!
//! Every command renders its full output in memory first and then writes it
//! in one go, through a temporary file renamed into place, so a failing run
//! never leaves a partial file behind.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::efficiency::{score_sample, write_score_csv, Mode, ScoredObservation};
use crate::error::Error;
use crate::estimation::{fit, FitOptions};
use crate::files::{FileError, ModelFile, SampleTable};
use crate::model::InputSystem;
use crate::optimum::{find_optimum, OptimumResult, ProfitSpec};
use crate::region::{epsilon_region, FeasibleRegion, DEFAULT_EPSILON};
use crate::trajectory::{Trajectory, DEFAULT_NONNEG_TOLERANCE, DEFAULT_STEP};

pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate the input paths and write them as CSV.
    Solve,
    /// Find the profit-maximizing output and its input point.
    Optimum,
    /// Score the observations in --data.
    Score,
    /// Estimate a model from the paths in --data.
    Fit,
    /// Report region membership for each row of --data.
    RegionCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ModeArg {
    #[default]
    Strict,
    Clamp,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Clamp => Mode::Clamp,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "odeff", version, about = "Efficiency scores against an ODE-derived optimal input point")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Model file (JSON).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Sample CSV with columns y,x1..xn and optional label, segment.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Output path; `-` or absent writes to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    #[arg(long = "y-max", global = true, default_value_t = 10.0)]
    pub y_max: f64,
    /// Output price; overrides the model file.
    #[arg(long, global = true)]
    pub price: Option<f64>,
    /// Marginal cutoff used when the model file has no explicit region.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Strict)]
    pub mode: ModeArg,
    /// Ideal input point as x1,x2,…; replaces the computed optimum.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub anchor: Option<Vec<f64>>,
    /// Also write anchor, observation, worst-point and boundary coordinates.
    #[arg(long = "fig2-geometry", global = true)]
    pub fig2_geometry: Option<PathBuf>,
    /// Ridge penalty for `fit`.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub ridge: f64,
}

#[derive(Debug)]
pub enum CliError {
    Io { context: String, source: io::Error },
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn from_model(context: &str, e: Error) -> Self {
        let msg = format!("{context}: {e}");
        if e.is_numerical() {
            CliError::Numerical(msg)
        } else {
            CliError::Validation(msg)
        }
    }

    fn from_file(path: &Path, e: FileError) -> Self {
        match e {
            FileError::Io(source) => CliError::Io {
                context: path.display().to_string(),
                source,
            },
            other => CliError::Validation(format!("{}: {other}", path.display())),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::Validation(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

/// One file the run produces.
struct Artifact {
    path: Option<PathBuf>,
    bytes: Vec<u8>,
}

#[derive(Serialize)]
struct OptimumReport<'a> {
    price: f64,
    #[serde(flatten)]
    result: &'a OptimumResult,
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|source| CliError::Io {
        context: path.display().to_string(),
        source,
    })
}

fn require<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    p.as_deref()
        .ok_or_else(|| CliError::Validation(format!("missing required flag --{flag}")))
}

fn load_model(cfg: &RunConfig) -> Result<(ModelFile, InputSystem), CliError> {
    let path = require(&cfg.model, "model")?;
    let model = ModelFile::read(open(path)?).map_err(|e| CliError::from_file(path, e))?;
    let sys = model.system().map_err(|e| CliError::from_file(path, e))?;
    Ok((model, sys))
}

fn load_table(cfg: &RunConfig, dim: Option<usize>) -> Result<SampleTable, CliError> {
    let path = require(&cfg.data, "data")?;
    let table = SampleTable::read(open(path)?).map_err(|e| CliError::from_file(path, e))?;
    if let Some(n) = dim {
        if table.dim != n {
            return Err(CliError::Validation(format!(
                "{}: data has {} input columns but the model has {n}",
                path.display(),
                table.dim
            )));
        }
    }
    Ok(table)
}

fn price(cfg: &RunConfig, model: &ModelFile) -> Result<ProfitSpec, CliError> {
    let c = cfg.price.or(model.price).ok_or_else(|| {
        CliError::Validation("no price: pass --price or set `price` in the model file".into())
    })?;
    ProfitSpec::new(c).map_err(|e| CliError::from_model("price", e))
}

fn optimum(cfg: &RunConfig, model: &ModelFile, sys: &InputSystem) -> Result<OptimumResult, CliError> {
    let spec = price(cfg, model)?;
    find_optimum(sys, &spec, cfg.y_max, cfg.step)
        .map_err(|e| CliError::from_model("profit optimum (marginal cost = price)", e))
}

fn anchor(cfg: &RunConfig, model: &ModelFile, sys: &InputSystem) -> Result<Vec<f64>, CliError> {
    match &cfg.anchor {
        Some(a) => {
            if a.len() != sys.dim {
                return Err(CliError::Validation(format!(
                    "--anchor has {} components, model has {} inputs",
                    a.len(),
                    sys.dim
                )));
            }
            Ok(a.clone())
        }
        None => Ok(optimum(cfg, model, sys)?.x_star),
    }
}

fn region(
    cfg: &RunConfig,
    model: &ModelFile,
    sys: &InputSystem,
    anchor: &[f64],
) -> Result<FeasibleRegion, CliError> {
    match model.region(sys) {
        Some(r) => r.map_err(|e| CliError::Validation(format!("model region: {e}"))),
        None => epsilon_region(sys, anchor, cfg.epsilon)
            .map_err(|e| CliError::from_model("feasible region (marginal cutoff at the anchor)", e)),
    }
}

fn render<F: FnOnce(&mut Vec<u8>) -> io::Result<()>>(f: F) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn cmd_solve(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let (_, sys) = load_model(cfg)?;
    let traj = Trajectory::solve(&sys, cfg.y_max, cfg.step)
        .map_err(|e| CliError::from_model("input paths", e))?;
    let violations = traj.check_nonnegativity(DEFAULT_NONNEG_TOLERANCE);
    if let Some(&(k, i)) = violations.first() {
        eprintln!(
            "warning: non-negativity of inputs fails at {} grid points (first: x{} at y = {})",
            violations.len(),
            i + 1,
            traj.grid()[k]
        );
    }
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: render(|b| traj.write_csv(b)),
    }])
}

fn cmd_optimum(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let (model, sys) = load_model(cfg)?;
    let spec = price(cfg, &model)?;
    let result = optimum(cfg, &model, &sys)?;
    let report = OptimumReport {
        price: spec.price,
        result: &result,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: text.into_bytes(),
    }])
}

fn cmd_score(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let (model, sys) = load_model(cfg)?;
    let table = load_table(cfg, Some(sys.dim))?;
    let data_path = cfg.data.as_deref().unwrap_or(Path::new("data"));
    let sample = table.sample().map_err(|e| CliError::from_file(data_path, e))?;
    let x_star = anchor(cfg, &model, &sys)?;
    let region = region(cfg, &model, &sys, &x_star)?;
    if !region.contains(&x_star).unwrap_or(false) {
        return Err(CliError::Validation(
            "anchor lies outside the feasible region".into(),
        ));
    }
    let rows = score_sample(&region, &x_star, &sample, cfg.mode.into());
    for (k, row) in rows.iter().enumerate() {
        if let Err(e) = &row.result {
            eprintln!("warning: data row {}: {e}", k + 1);
        }
    }
    let mut out = vec![Artifact {
        path: cfg.out.clone(),
        bytes: render(|b| write_score_csv(&rows, b)),
    }];
    if let Some(path) = &cfg.fig2_geometry {
        out.push(Artifact {
            path: Some(path.clone()),
            bytes: render(|b| write_geometry(&region, &x_star, &sample_points(&table), &rows, b)),
        });
    }
    Ok(out)
}

fn sample_points(table: &SampleTable) -> Vec<Vec<f64>> {
    table.rows.iter().map(|r| r.inputs.clone()).collect()
}

/// Number of rays used to trace the region boundary in two dimensions.
const BOUNDARY_RAYS: usize = 720;

fn write_geometry<W: Write>(
    region: &FeasibleRegion,
    x_star: &[f64],
    points: &[Vec<f64>],
    rows: &[ScoredObservation],
    mut out: W,
) -> io::Result<()> {
    let n = x_star.len();
    let cols: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    writeln!(out, "kind,label,{}", cols.join(","))?;
    let line = |out: &mut W, kind: &str, label: &str, p: &[f64]| {
        let coords: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{kind},{label},{}", coords.join(","))
    };
    line(&mut out, "anchor", "", x_star)?;
    for (k, (row, p)) in rows.iter().zip(points).enumerate() {
        let label = row.label.clone().unwrap_or_else(|| format!("row{}", k + 1));
        line(&mut out, "observation", &label, p)?;
        if let Ok(s) = &row.result {
            line(&mut out, "worst", &label, &s.worst_point)?;
        }
    }
    if n == 2 {
        for k in 0..BOUNDARY_RAYS {
            let angle = std::f64::consts::TAU * k as f64 / BOUNDARY_RAYS as f64;
            let through = [x_star[0] + angle.cos(), x_star[1] + angle.sin()];
            if let Ok(exit) = region.ray_exit(x_star, &through) {
                if exit.t > 0.0 {
                    line(&mut out, "boundary", "", &exit.point)?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_fit(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let table = load_table(cfg, None)?;
    let data_path = cfg.data.as_deref().unwrap_or(Path::new("data"));
    let segments = table.segments().map_err(|e| CliError::from_file(data_path, e))?;
    let options = FitOptions {
        ridge: cfg.ridge,
        ..Default::default()
    };
    let result = fit(&segments, &options)
        .map_err(|e| CliError::from_model("parameter estimation (design matrix [1, x])", e))?;
    for (i, r) in result.residual_norms.iter().enumerate() {
        eprintln!("equation {}: rms residual {r:.6e}", i + 1);
    }
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: ModelFile::from_system(&result.system).to_json().into_bytes(),
    }])
}

fn cmd_region_check(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let (model, sys) = load_model(cfg)?;
    let table = load_table(cfg, Some(sys.dim))?;
    let region = match model.region(&sys) {
        Some(r) => r.map_err(|e| CliError::Validation(format!("model region: {e}")))?,
        None => {
            let a = anchor(cfg, &model, &sys)?;
            region(cfg, &model, &sys, &a)?
        }
    };
    let mut buf = Vec::new();
    writeln!(buf, "label,y,inside,violated").expect("memory write");
    for (k, row) in table.rows.iter().enumerate() {
        let violated = region
            .violated(&row.inputs)
            .map_err(|e| CliError::from_model(&format!("data row {}", k + 1), e))?;
        let names: Vec<String> = violated.iter().map(|&c| region.describe_constraint(c)).collect();
        let label = row.label.clone().unwrap_or_else(|| format!("row{}", k + 1));
        writeln!(
            buf,
            "{label},{},{},{}",
            row.output,
            violated.is_empty(),
            names.join(";")
        )
        .expect("memory write");
    }
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: buf,
    }])
}

fn commit(artifacts: Vec<Artifact>) -> Result<(), CliError> {
    for a in artifacts {
        match a.path {
            Some(p) if p.as_os_str() != "-" => write_atomic(&p, &a.bytes)?,
            _ => {
                let mut stdout = io::stdout().lock();
                stdout
                    .write_all(&a.bytes)
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Io {
                        context: "standard output".into(),
                        source,
                    })?;
            }
        }
    }
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        context: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Runs one command and writes its outputs.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let artifacts = match cfg.command {
        Command::Solve => cmd_solve(cfg),
        Command::Optimum => cmd_optimum(cfg),
        Command::Score => cmd_score(cfg),
        Command::Fit => cmd_fit(cfg),
        Command::RegionCheck => cmd_region_check(cfg),
    }?;
    commit(artifacts)
}

/// Parses `args`, runs, prints a one-line diagnostic on failure and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { 0 };
        }
    };
    match run(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
