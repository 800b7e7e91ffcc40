//! The `sjg` command line: evaluate metric quantities at a point and run
//! the verification suite. Output is one JSON document per run.

pub mod document;

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sjg_core::connection::{
    christoffels_of, geodesic_rk4_field, Difference, FlatField, GeodesicOptions, GeodesicState,
    JacobiField, MetricField, Trajectory, DEFAULT_STEP,
};
use sjg_core::inverse::{
    closed_chart_inverse, det_n1_extended_closed, det_n2_closed, pqk_block, schur_inverse,
    Partition2x2,
};
use sjg_core::matlib::{lu_det, lu_inverse};
use sjg_core::metric::{ds2, lambda_r, metric_matrix};
use sjg_core::verify::{self, VerifyConfig, VerifyReport};
use sjg_core::{CrossConvention, Error, Mat, SymMat};
use thiserror::Error;

use document::{Loaded, MetricModel, PointDocument};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// The documented exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                Error::NearSingular { .. }
                | Error::SingularMatrix { .. }
                | Error::SingularBlock(_)
                | Error::SingularDenominator => 3,
                Error::Unavailable(_) => 4,
                Error::PositivityLoss => 5,
                Error::StepRejected { .. } => 6,
                _ => 2,
            },
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "sjg", version, about = "Siegel-Jacobi space metric toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the result document here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chart metric matrix at a point.
    Metric(MetricArgs),
    /// Inverse of the chart metric (or of its (q,p,kappa) block).
    Inverse(InverseArgs),
    /// Determinant of the (q,p[,kappa]) block, LU and closed form.
    Det(DetArgs),
    /// Nonzero Christoffel symbols of the second kind.
    Christoffel(ChristoffelArgs),
    /// Integrate a geodesic from the document's point and velocity.
    Geodesic(GeodesicArgs),
    /// Run every self-check and report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Block {
    Full,
    Qpk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lu,
    Schur,
    Closed,
}

/// Cross-term convention of the n ≥ 2 (q, p) coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Polarized quadratic form; the chart metric itself.
    Form,
    /// The block transcription the n = 2 closed forms are built on.
    Transposed,
}

impl From<Convention> for CrossConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Form => CrossConvention::QuadraticForm,
            Convention::Transposed => CrossConvention::Transposed,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Point document (JSON); standard input when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "full")]
    pub block: Block,
    #[arg(long, value_enum, default_value = "form")]
    pub convention: Convention,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "lu")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "full")]
    pub block: Block,
    #[arg(long, value_enum, default_value = "form")]
    pub convention: Convention,
}

#[derive(Debug, Args)]
pub struct DetArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "form")]
    pub convention: Convention,
}

#[derive(Debug, Args)]
pub struct ChristoffelArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Central-difference step, in [1e-6, 1e-3].
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub h: f64,
    /// Richardson-extrapolate the metric derivatives.
    #[arg(long)]
    pub richardson: bool,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Emit every k-th state (the last state is always emitted).
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Difference step for the Christoffel symbols.
    #[arg(long, default_value_t = 2.5e-4)]
    pub h: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Degrees to check; repeat for several. Defaults to 1 and 2.
    #[arg(long = "n", value_parser = clap::value_parser!(usize))]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flip the sign of one n = 2 closed-form inverse entry, "i,j".
    #[arg(long, hide = true, value_parser = parse_entry)]
    pub inject_sign_flip: Option<(usize, usize)>,
}

fn parse_entry(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s
        .split_once(',')
        .ok_or_else(|| format!("expected i,j, got {s:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|v| (1..=5).contains(v))
            .ok_or_else(|| format!("entry index {t:?} outside 1..=5"))
    };
    Ok((parse(i)?, parse(j)?))
}

/// What a run produced: the document, human-readable notes for standard
/// error, and the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub document: String,
    pub notes: Vec<String>,
    pub code: i32,
}

fn emit<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn load(args: &InputArgs, stdin: &mut dyn Read) -> Result<Loaded, CliError> {
    let text = match &args.input {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
            s
        }
    };
    PointDocument::parse(&text)?.validate()
}

/// The chart metric; under the transposed convention the (q,p,κ) block is
/// replaced by its block transcription.
fn chart_matrix(doc: &Loaded, convention: Convention) -> Result<Mat, CliError> {
    if doc.model == MetricModel::Euclidean {
        return Ok(Mat::identity(doc.chart.dim()));
    }
    let mut g = metric_matrix(doc.params, &doc.point, &doc.chart)?.to_mat();
    if convention == Convention::Transposed && doc.point.is_extended() {
        let r = doc.chart.qpk_range();
        g.set_block(
            r.start,
            r.start,
            &pqk_block(doc.params, &doc.point, convention.into())?,
        );
    }
    Ok(g)
}

fn select(doc: &Loaded, g: &Mat, block: Block) -> (Mat, Vec<String>) {
    let names = doc.chart.coordinate_names();
    match block {
        Block::Full => (g.clone(), names),
        Block::Qpk => {
            let r = doc.chart.qpk_range();
            (
                g.block(r.start, r.start, r.len(), r.len()),
                names[r].to_vec(),
            )
        }
    }
}

fn block_name(b: Block) -> &'static str {
    match b {
        Block::Full => "full",
        Block::Qpk => "qpk",
    }
}

fn upper(m: &Mat) -> Vec<f64> {
    SymMat::from_mat(m).expect("square").upper().to_vec()
}

#[derive(Serialize)]
struct MetricOutput {
    n: usize,
    extended: bool,
    block: &'static str,
    convention: Convention,
    coordinates: Vec<String>,
    /// Row-major upper triangle.
    matrix: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ds2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_r: Option<f64>,
}

fn cmd_metric(args: &MetricArgs, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let doc = load(&args.input, stdin)?;
    let g = chart_matrix(&doc, args.convention)?;
    let (m, coordinates) = select(&doc, &g, args.block);
    let (mut speed, mut lambda) = (None, None);
    if let Some(v) = &doc.velocity {
        if doc.model == MetricModel::Invariant {
            let tangent = doc.chart.vector(v)?;
            speed = Some(ds2(doc.params, &doc.point, &tangent)?);
            if doc.point.is_extended() {
                lambda = Some(lambda_r(&doc.point, &tangent)?);
            }
        }
    }
    let out = MetricOutput {
        n: doc.point.n(),
        extended: doc.point.is_extended(),
        block: block_name(args.block),
        convention: args.convention,
        coordinates,
        matrix: upper(&m),
        ds2: speed,
        lambda_r: lambda,
    };
    Ok(Outcome {
        document: emit(&out),
        notes: Vec::new(),
        code: 0,
    })
}

#[derive(Serialize)]
struct InverseOutput {
    method: &'static str,
    block: &'static str,
    convention: Convention,
    coordinates: Vec<String>,
    inverse: Vec<f64>,
    /// `max |G·G⁻¹ − I|`.
    residual: f64,
}

fn cmd_inverse(args: &InverseArgs, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let doc = load(&args.input, stdin)?;
    let g = chart_matrix(&doc, args.convention)?;
    let (m, coordinates) = select(&doc, &g, args.block);
    let n = doc.point.n();
    let inv = match args.method {
        Method::Lu => lu_inverse(&m)?,
        Method::Schur => {
            let split = match args.block {
                Block::Full => n * (n + 1),
                Block::Qpk if doc.point.is_extended() => 2 * n,
                Block::Qpk => n,
            };
            schur_inverse(&Partition2x2::split(&m, split)?)?
        }
        Method::Closed => {
            if doc.model == MetricModel::Euclidean {
                return Err(
                    Error::Unavailable("no closed form for the flat fixture".into()).into(),
                );
            }
            let full = closed_chart_inverse(doc.params, &doc.point, args.convention.into())?;
            select(&doc, &full, args.block).0
        }
    };
    let residual = m.matmul(&inv).max_abs_diff(&Mat::identity(m.rows()));
    let out = InverseOutput {
        method: match args.method {
            Method::Lu => "lu",
            Method::Schur => "schur",
            Method::Closed => "closed",
        },
        block: block_name(args.block),
        convention: args.convention,
        coordinates,
        inverse: upper(&inv.symmetrized()),
        residual,
    };
    Ok(Outcome {
        document: emit(&out),
        notes: vec![format!("residual {residual:e}")],
        code: 0,
    })
}

#[derive(Serialize)]
struct DetOutput {
    block: &'static str,
    convention: Convention,
    lu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_difference: Option<f64>,
}

/// Closed-form determinant of the (q, p[, κ]) block, where one is known.
fn closed_det(doc: &Loaded, convention: Convention) -> Result<Option<f64>, CliError> {
    let n = doc.point.n() as i32;
    let p = doc.params;
    if doc.model == MetricModel::Euclidean {
        return Ok(Some(1.0));
    }
    Ok(match (doc.point.is_extended(), convention) {
        (false, _) => Some(p.gamma.powi(2 * n)),
        (true, Convention::Form) => Some(p.delta * p.gamma.powi(2 * n)),
        (true, Convention::Transposed) if n == 1 => Some(det_n1_extended_closed(p)),
        (true, Convention::Transposed) if n == 2 => Some(det_n2_closed(p, &doc.point)?),
        (true, Convention::Transposed) => None,
    })
}

fn cmd_det(args: &DetArgs, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let doc = load(&args.input, stdin)?;
    let g = chart_matrix(&doc, args.convention)?;
    let (m, _) = select(&doc, &g, Block::Qpk);
    let lu = lu_det(&m)?;
    let closed = closed_det(&doc, args.convention)?;
    let out = DetOutput {
        block: "qpk",
        convention: args.convention,
        lu,
        closed,
        relative_difference: closed.map(|c| (lu - c).abs() / c.abs()),
    };
    Ok(Outcome {
        document: emit(&out),
        notes: Vec::new(),
        code: 0,
    })
}

fn field(doc: &Loaded) -> Result<Box<dyn MetricField>, CliError> {
    Ok(match doc.model {
        MetricModel::Invariant => Box::new(JacobiField::new(doc.params, doc.chart)?),
        MetricModel::Euclidean => Box::new(FlatField::new(Mat::identity(doc.chart.dim()))?),
    })
}

#[derive(Serialize)]
struct ChristoffelOutput {
    h: f64,
    scheme: &'static str,
    coordinates: Vec<String>,
    /// `(m, i, j, Γ^m_ij)` with `i ≤ j` and `|Γ| > 1e-9`.
    symbols: Vec<(String, String, String, f64)>,
    compatibility_residual: f64,
}

fn cmd_christoffel(args: &ChristoffelArgs, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let doc = load(&args.input, stdin)?;
    let scheme = if args.richardson {
        Difference::Richardson
    } else {
        Difference::Central
    };
    let coords = doc.chart.coordinates(&doc.point)?;
    let table = christoffels_of(field(&doc)?.as_ref(), &coords, args.h, scheme)?;
    let names = doc.chart.coordinate_names();
    let symbols = table
        .nonzero(1e-9)
        .into_iter()
        .map(|(m, i, j, v)| (names[m].clone(), names[i].clone(), names[j].clone(), v))
        .collect();
    let out = ChristoffelOutput {
        h: args.h,
        scheme: if args.richardson {
            "richardson"
        } else {
            "central"
        },
        coordinates: names,
        symbols,
        compatibility_residual: table.compatibility_residual(),
    };
    Ok(Outcome {
        document: emit(&out),
        notes: Vec::new(),
        code: 0,
    })
}

#[derive(Serialize)]
struct Sample {
    t: f64,
    position: Vec<f64>,
    velocity: Vec<f64>,
    speed: f64,
}

#[derive(Serialize)]
struct GeodesicOutput {
    dt: f64,
    steps: usize,
    coordinates: Vec<String>,
    samples: Vec<Sample>,
    max_drift: f64,
}

fn sampled(traj: &Trajectory, every: usize) -> Vec<Sample> {
    let last = traj.states.len() - 1;
    traj.states
        .iter()
        .zip(&traj.speeds)
        .enumerate()
        .filter(|(k, _)| k % every == 0 || *k == last)
        .map(|(_, (s, &speed))| Sample {
            t: s.time,
            position: s.position.clone(),
            velocity: s.velocity.clone(),
            speed,
        })
        .collect()
}

fn cmd_geodesic(args: &GeodesicArgs, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let doc = load(&args.input, stdin)?;
    if args.every == 0 {
        return Err(CliError::Invalid("--every must be at least 1".into()));
    }
    let velocity = doc
        .velocity
        .clone()
        .ok_or_else(|| CliError::Invalid("geodesic needs a velocity".into()))?;
    let start = GeodesicState::new(doc.chart.coordinates(&doc.point)?, velocity)?;
    let mut opts = GeodesicOptions::new(args.dt, args.steps);
    opts.h = args.h;
    let traj = geodesic_rk4_field(field(&doc)?.as_ref(), start, opts)?;
    let drift = traj.max_drift();
    let out = GeodesicOutput {
        dt: args.dt,
        steps: args.steps,
        coordinates: doc.chart.coordinate_names(),
        samples: sampled(&traj, args.every),
        max_drift: drift,
    };
    Ok(Outcome {
        document: emit(&out),
        notes: vec![format!("max relative speed drift {drift:e}")],
        code: 0,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let cfg = VerifyConfig {
        ns: if args.ns.is_empty() {
            vec![1, 2]
        } else {
            args.ns.clone()
        },
        samples: args.samples,
        seed: args.seed,
        flip: args.inject_sign_flip,
    };
    let report: VerifyReport = verify::run(&cfg)?;
    let mut notes: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<34} {:>5} samples  max residual {:.3e}  (tol {:.0e})",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.samples,
                c.max_residual,
                c.tolerance
            )
        })
        .collect();
    notes.push(format!(
        "{} in {:.2}s",
        if report.passed {
            "all checks passed"
        } else {
            "verification failed"
        },
        report.elapsed
    ));
    Ok(Outcome {
        document: emit(&report),
        notes,
        code: if report.passed { 0 } else { 1 },
    })
}

/// Runs one parsed command line. `stdin` supplies the point document when
/// `--input` is absent.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Metric(a) => cmd_metric(a, stdin),
        Command::Inverse(a) => cmd_inverse(a, stdin),
        Command::Det(a) => cmd_det(a, stdin),
        Command::Christoffel(a) => cmd_christoffel(a, stdin),
        Command::Geodesic(a) => cmd_geodesic(a, stdin),
        Command::Verify(a) => cmd_verify(a),
    }
}
