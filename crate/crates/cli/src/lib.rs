//! Command-line front end: argument types, the commands, and CSV/JSON output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_fourier::error::Error;
use lattice_fourier::inversion::u_d_lambda;
use lattice_fourier::lattice::{
    delta0_d1_closed, delta_alpha, exponent_fit, mean_square, novak_constant_origin, DeltaSeries, ShellCache,
    G_MAX_POINTS, G_TOL,
};
use lattice_fourier::phenomena::{self, ProbeReport};
use lattice_fourier::radial::{RadialParams, TorusPoint};
use lattice_fourier::series::{hardy_circle_sum, hardy_circle_window_mean, hardy_decomposition_with, partial_sum};
use lattice_fourier::special::QuadratureConfig;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_ACCURACY: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(m) => CliError::Io(m),
            e => CliError::Core(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_FAILURE,
            CliError::Core(e) => match e {
                Error::Resource(_) | Error::Overflow(_) => EXIT_RESOURCE,
                Error::Accuracy(_) => EXIT_ACCURACY,
                Error::Io(_) => EXIT_FAILURE,
                _ => EXIT_USAGE,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Parser)]
#[command(name = "lattice-fourier", version, about = "Spherical partial sums of periodized radial profiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Directory for cached shell tables.
    #[arg(long, global = true, env = "SHELL_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long)]
    pub a: f64,
}

impl ProfileArgs {
    fn params(&self) -> CliResult<RadialParams> {
        Ok(RadialParams::new(self.dim, self.beta, self.a)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct LambdaArgs {
    /// Comma-separated cutoffs.
    #[arg(long, value_delimiter = ',', conflicts_with = "lambda_range")]
    pub lambda: Vec<f64>,
    /// `lo:hi:n`, `n` evenly spaced cutoffs.
    #[arg(long)]
    pub lambda_range: Option<String>,
}

impl LambdaArgs {
    fn values(&self) -> CliResult<Vec<f64>> {
        if let Some(r) = &self.lambda_range {
            let (lo, hi, n) = parse_range(r)?;
            return Ok(phenomena::linspace(lo, hi, n));
        }
        if self.lambda.is_empty() {
            return usage("give --lambda or --lambda-range");
        }
        Ok(self.lambda.clone())
    }
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Comma-separated coordinates; the base point of `--slice`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// `axis:lo:hi:n`, varying one coordinate (1-based axis).
    #[arg(long, conflicts_with = "grid")]
    pub slice: Option<String>,
    /// File with one point per line, coordinates separated by commas or spaces.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

impl PointArgs {
    fn points(&self, d: usize) -> CliResult<Vec<Vec<f64>>> {
        if let Some(path) = &self.grid {
            let text = std::fs::read_to_string(path)?;
            let mut pts = vec![];
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let c: Vec<f64> = line
                    .split(|ch: char| ch == ',' || ch.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| CliError::Usage(format!("grid line {}: {e}", i + 1)))?;
                if c.len() != d {
                    return usage(format!("grid line {} has {} coordinates, need {d}", i + 1, c.len()));
                }
                pts.push(c);
            }
            return Ok(pts);
        }
        let base = if self.x.is_empty() { vec![0.0; d] } else { self.x.clone() };
        if base.len() != d {
            return usage(format!("--x has {} coordinates, need {d}", base.len()));
        }
        if let Some(s) = &self.slice {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 4 {
                return usage(format!("--slice expects axis:lo:hi:n, got {s}"));
            }
            let axis: usize = parts[0].parse().map_err(|_| CliError::Usage(format!("bad axis in {s}")))?;
            if axis == 0 || axis > d {
                return usage(format!("slice axis must be in 1..={d}"));
            }
            let (lo, hi, n) = parse_range(&parts[1..].join(":"))?;
            return Ok(phenomena::linspace(lo, hi, n)
                .into_iter()
                .map(|v| {
                    let mut c = base.clone();
                    c[axis - 1] = v;
                    c
                })
                .collect());
        }
        Ok(vec![base])
    }
}

fn parse_f64(s: &str) -> CliResult<f64> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("not a number: {s}")))
}

/// `lo:hi:n`.
fn parse_range(s: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return usage(format!("expected lo:hi:n, got {s}"));
    }
    let n: usize = parts[2].trim().parse().map_err(|_| CliError::Usage(format!("bad count in {s}")))?;
    let (lo, hi) = (parse_f64(parts[0])?, parse_f64(parts[1])?);
    if n == 0 || hi < lo {
        return usage(format!("range {s} is empty"));
    }
    Ok((lo, hi, n))
}

/// `lo:hi`.
fn parse_pair(s: &str) -> CliResult<(f64, f64)> {
    match s.split_once(':') {
        Some((a, b)) => Ok((parse_f64(a)?, parse_f64(b)?)),
        None => usage(format!("expected lo:hi, got {s}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terms of the lattice decomposition of S_lambda at each (lambda, x).
    Eval {
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[command(flatten)]
        points: PointArgs,
        /// Truncation tolerance of the lattice correction term.
        #[arg(long, default_value_t = G_TOL)]
        tol: f64,
    },
    /// Hardy's circle identity for each radius.
    Hardy {
        /// Comma-separated radii.
        #[arg(long = "a", value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[command(flatten)]
        lambda: LambdaArgs,
        /// `lo:hi`; report the mean of the left side over this lambda window instead.
        #[arg(long)]
        window: Option<String>,
    },
    /// Oscillation of S_lambda at the origin.
    Pinsky {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value = "60:100:801")]
        lambda_range: String,
        #[arg(long, default_value_t = 0.15)]
        rel_tol: f64,
    },
    /// Overshoot next to the sphere along the ray through x.
    Gibbs {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "75,150,300")]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        abs_tol: f64,
        #[arg(long, default_value_t = 0.1)]
        rel_tol: f64,
    },
    /// Scaled lattice discrepancy on the windows [l_k^2, m_k^2].
    Third {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Defaults to the origin.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, default_value = "40:80")]
        k_range: String,
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long, default_value_t = 1e-3)]
        floor: f64,
        #[arg(long, default_value_t = -0.1, allow_negative_numbers = true)]
        tau_min: f64,
        /// Compare the origin with the irrational proxy instead of probing x.
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
    },
    /// sup |S_lambda - u| over a grid in an annulus.
    Scan {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value = "0.3:0.45")]
        r_range: String,
        #[arg(long, default_value_t = 31)]
        n_radii: usize,
        #[arg(long, default_value_t = 50)]
        n_dirs: usize,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100")]
        lambda: Vec<f64>,
    },
    /// Scaled limit of S_lambda on the sphere set.
    Sphere {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        rel_tol: f64,
    },
    /// Gaps S_lambda - sigma_lambda next to the discrepancy growth exponent.
    Equivalence {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        a: f64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5", allow_negative_numbers = true)]
        betas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 10_000_000)]
        s_max: u64,
    },
    /// Lattice-point discrepancy reports.
    Lattice {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = LatticeMode::Exponent)]
        mode: LatticeMode,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Vec<f64>,
        /// Largest s for the exponent report.
        #[arg(long, default_value_t = 10_000_000)]
        s_max: u64,
        /// Upper limit of the mean-square integral.
        #[arg(long, default_value_t = 1e4)]
        t: f64,
        /// Random samples for the closed-form check, or quadrature nodes per unit interval.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeMode {
    /// Per-block discrepancy maxima and the growth exponent fit.
    Exponent,
    /// d = 1 closed form against enumeration.
    D1Check,
    /// Mean square of the discrepancy against the origin constant.
    MeanSquare,
}

/// Formats a number with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// JSON formatter printing every float with 17 significant digits.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_num(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser).map_err(|e| CliError::Io(e.to_string()))?;
    buf.push(b'\n');
    Ok(buf)
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<RadialParams>,
}

impl Meta {
    fn new(command: &str, params: Option<RadialParams>) -> Self {
        Self { command: command.into(), version: env!("CARGO_PKG_VERSION").into(), params }
    }
}

/// A rectangular table of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: vec![] }
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|&v| fmt_num(v)))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    /// `{meta, rows}` with one object per row, keyed by column name.
    pub fn to_json(&self, meta: &Meta) -> CliResult<Vec<u8>> {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| {
                self.columns
                    .iter()
                    .zip(r)
                    .map(|(c, &v)| (c.clone(), serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, Into::into)))
                    .collect()
            })
            .collect();
        to_json(&serde_json::json!({ "meta": meta, "rows": rows }))
    }
}

fn report_table(r: &ProbeReport) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["t", "observed", "reference", "label"])?;
    for s in &r.samples {
        let reference = s.reference.map(fmt_num).unwrap_or_default();
        w.write_record([fmt_num(s.t), fmt_num(s.observed), reference, s.label.clone()])?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// What a command produces before it is written out.
pub enum Output {
    Rows(Meta, Table),
    Report(Meta, ProbeReport),
    /// A report and a table, for the lattice exponent mode.
    Mixed(Meta, serde_json::Value, Table),
}

fn write_bytes(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Writes `output`; JSON probe reports also get a `<stem>.samples.csv` next to the file.
pub fn emit(output: &Output, fmt: Format, out: Option<&Path>) -> CliResult<()> {
    match (output, fmt) {
        (Output::Rows(_, t), Format::Csv) | (Output::Mixed(_, _, t), Format::Csv) => write_bytes(out, &t.to_csv()?),
        (Output::Rows(m, t), Format::Json) => write_bytes(out, &t.to_json(m)?),
        (Output::Mixed(m, rep, _), Format::Json) => {
            write_bytes(out, &to_json(&serde_json::json!({ "meta": m, "report": rep }))?)
        }
        (Output::Report(_, r), Format::Csv) => write_bytes(out, &report_table(r)?),
        (Output::Report(m, r), Format::Json) => {
            write_bytes(out, &to_json(&serde_json::json!({ "meta": m, "report": r }))?)?;
            if let Some(p) = out {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
                write_bytes(Some(&p.with_file_name(format!("{stem}.samples.csv"))), &report_table(r)?)?;
            }
            Ok(())
        }
    }
}

fn point(c: &[f64], d: usize) -> CliResult<TorusPoint> {
    if c.len() != d {
        return usage(format!("point has {} coordinates, need {d}", c.len()));
    }
    Ok(TorusPoint::new(c)?)
}

fn cmd_eval(p: &RadialParams, lambdas: &[f64], pts: &[Vec<f64>], tol: f64) -> CliResult<Table> {
    if !(tol > 0.0) {
        return usage(format!("--tol must be > 0, got {tol}"));
    }
    let mut cols: Vec<String> = vec!["lambda".into()];
    cols.extend((1..=p.d).map(|i| format!("x{i}")));
    cols.extend(["S", "sigma", "u", "K", "G", "residual"].map(String::from));
    let mut t = Table::new(cols);
    let jobs: Vec<(f64, &Vec<f64>)> = lambdas.iter().flat_map(|&l| pts.iter().map(move |x| (l, x))).collect();
    let cfg = QuadratureConfig::default();
    let rows: Vec<CliResult<Vec<f64>>> = jobs
        .par_iter()
        .map(|&(lam, c)| {
            let x = point(c, p.d)?;
            let mut row = vec![lam];
            // coordinates as given, before reduction to the torus
            row.extend(c);
            match hardy_decomposition_with(p, &x, lam, tol, G_MAX_POINTS) {
                Ok(h) => {
                    let sigma = h.inversion_gap + lattice_fourier::radial::profile_phi(p, x.norm())?;
                    row.extend([h.s_lambda, sigma, h.u_val, h.k_term, h.g_term, h.residual]);
                }
                // on the sphere set with beta <= 0 only S and sigma are defined
                Err(Error::Singular(_)) => {
                    let s = partial_sum(p, &x, lam)?;
                    let sigma = u_d_lambda(p, x.norm(), lam, &cfg)?.value;
                    row.extend([s, sigma, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
                }
                Err(e) => return Err(e.into()),
            }
            Ok(row)
        })
        .collect();
    for r in rows {
        t.rows.push(r?);
    }
    Ok(t)
}

fn cmd_hardy(radii: &[f64], lambdas: Option<Vec<f64>>, window: Option<(f64, f64)>) -> CliResult<Table> {
    if let Some((lo, hi)) = window {
        let mut t = Table::new(["a", "lambda_lo", "lambda_hi", "lhs_mean", "rhs", "gap"].map(String::from).to_vec());
        for &a in radii {
            let (lhs, rhs) = hardy_circle_window_mean(a, lo, hi)?;
            t.rows.push(vec![a, lo, hi, lhs, rhs, lhs - rhs]);
        }
        return Ok(t);
    }
    let Some(lambdas) = lambdas else {
        return usage("hardy needs --lambda, --lambda-range or --window");
    };
    let mut t = Table::new(["a", "lambda", "lhs", "rhs", "gap"].map(String::from).to_vec());
    for &a in radii {
        for &l in &lambdas {
            let (lhs, rhs) = hardy_circle_sum(a, l)?;
            t.rows.push(vec![a, l, lhs, rhs, lhs - rhs]);
        }
    }
    Ok(t)
}

fn cmd_lattice(
    d: usize,
    mode: LatticeMode,
    x: &[f64],
    s_max: u64,
    t: f64,
    samples: usize,
    seed: u64,
    cache: Option<&Path>,
) -> CliResult<Output> {
    let meta = Meta::new("lattice", None);
    let x = if x.is_empty() { TorusPoint::origin(d) } else { point(x, d)? };
    match mode {
        LatticeMode::Exponent => {
            let series = match (x.is_origin(), cache) {
                (true, Some(dir)) => DeltaSeries::origin_block_suprema_from(&ShellCache::new(dir).load_or_build(d, s_max)?, s_max)?,
                _ => phenomena::block_suprema(&x, s_max)?,
            };
            let fit = exponent_fit(&series)?;
            let mut table = Table::new(["s", "delta0"].map(String::from).to_vec());
            table.rows = series.samples.iter().map(|&(s, v)| vec![s, v]).collect();
            let rep = serde_json::json!({ "dim": d, "x": x.coords(), "fit": fit, "samples": series.samples });
            Ok(Output::Mixed(meta, rep, table))
        }
        LatticeMode::D1Check => {
            if d != 1 {
                return usage("the closed-form check is for --dim 1");
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut table = Table::new(["s", "x", "closed", "direct", "diff"].map(String::from).to_vec());
            for _ in 0..samples {
                let s: f64 = rng.gen_range(0.5..1e4);
                let xv: f64 = rng.gen_range(0.01..0.5);
                let closed = delta0_d1_closed(s, xv)?;
                let direct = delta_alpha(0.0, s, &TorusPoint::new(&[xv])?)?;
                table.rows.push(vec![s, xv, closed, direct, closed - direct]);
            }
            Ok(Output::Rows(meta, table))
        }
        LatticeMode::MeanSquare => {
            let ms = mean_square(d, &x, t, samples.max(1))?;
            let k = if x.is_origin() { novak_constant_origin(d)? } else { f64::NAN };
            // int_0^t |Delta_0|^2 ds / t^(d-1)
            let normalized = ms * t.powi(2 - d as i32);
            let mut table =
                Table::new(["dim", "t", "mean_square", "normalized", "novak_constant", "ratio"].map(String::from).to_vec());
            table.rows.push(vec![d as f64, t, ms, normalized, k, normalized / k]);
            Ok(Output::Rows(meta, table))
        }
    }
}

fn parse_k_range(s: &str) -> CliResult<(u64, u64)> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| CliError::Usage(format!("expected lo:hi, got {s}")))?;
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("bad k in {s}")));
    Ok((parse(lo)?, parse(hi)?))
}

/// Runs one parsed command and returns its output.
pub fn execute(cli: &Cli) -> CliResult<Output> {
    let cache = cli.output.cache_dir.as_deref();
    Ok(match &cli.command {
        Command::Eval { profile, lambda, points, tol } => {
            let p = profile.params()?;
            let t = cmd_eval(&p, &lambda.values()?, &points.points(p.d)?, *tol)?;
            Output::Rows(Meta::new("eval", Some(p)), t)
        }
        Command::Hardy { radii, lambda, window } => {
            let lambdas = if lambda.lambda.is_empty() && lambda.lambda_range.is_none() { None } else { Some(lambda.values()?) };
            let window = window.as_deref().map(parse_pair).transpose()?;
            Output::Rows(Meta::new("hardy", None), cmd_hardy(radii, lambdas, window)?)
        }
        Command::Pinsky { profile, lambda_range, rel_tol } => {
            let p = profile.params()?;
            let (lo, hi, n) = parse_range(lambda_range)?;
            let o = phenomena::PinskyOptions { lambda_lo: lo, lambda_hi: hi, n_samples: n, rel_tol: *rel_tol };
            Output::Report(Meta::new("pinsky", Some(p)), phenomena::pinsky_probe(&p, &o)?)
        }
        Command::Gibbs { profile, x, lambda, abs_tol, rel_tol } => {
            let p = profile.params()?;
            let o = phenomena::GibbsOptions { lambdas: lambda.clone(), abs_tol: *abs_tol, rel_tol: *rel_tol };
            Output::Report(Meta::new("gibbs", Some(p)), phenomena::gibbs_probe(&p, &point(x, p.d)?, &o)?)
        }
        Command::Third { profile, x, k_range, window, floor, tau_min, compare, ratio } => {
            let p = profile.params()?;
            let (k_lo, k_hi) = parse_k_range(k_range)?;
            let o = phenomena::ThirdOptions { k_lo, k_hi, window: *window, floor: *floor, tau_min: *tau_min };
            let r = if *compare {
                phenomena::third_phenomenon_compare(&p, &o, *ratio)?
            } else {
                let x = if x.is_empty() { TorusPoint::origin(p.d) } else { point(x, p.d)? };
                phenomena::third_phenomenon_probe(&p, &x, &o)?
            };
            Output::Report(Meta::new("third", Some(p)), r)
        }
        Command::Scan { profile, r_range, n_radii, n_dirs, lambda } => {
            let p = profile.params()?;
            let (r_min, r_max) = parse_pair(r_range)?;
            let o = phenomena::ScanOptions { r_min, r_max, n_radii: *n_radii, n_dirs: *n_dirs, lambdas: lambda.clone() };
            Output::Report(Meta::new("scan", Some(p)), phenomena::convergence_scan(&p, &o)?)
        }
        Command::Sphere { profile, x, lambda, rel_tol } => {
            let p = profile.params()?;
            let o = phenomena::SphereOptions { lambdas: lambda.clone(), rel_tol: *rel_tol };
            Output::Report(Meta::new("sphere", Some(p)), phenomena::sphere_limit_probe(&p, &point(x, p.d)?, &o)?)
        }
        Command::Equivalence { dim, a, x, betas, lambda, s_max } => {
            let x0 = if x.is_empty() { TorusPoint::origin(*dim) } else { point(x, *dim)? };
            let o = phenomena::EquivalenceOptions { betas: betas.clone(), lambdas: lambda.clone(), s_max: *s_max, theta_hi: None };
            let r = phenomena::equivalence_probe(*dim, *a, &x0, &o)?;
            Output::Report(Meta::new("equivalence", Some(r.params)), r)
        }
        Command::Lattice { dim, mode, x, s_max, t, samples, seed } => {
            cmd_lattice(*dim, *mode, x, *s_max, *t, *samples, *seed, cache)?
        }
    })
}

/// Parses `args`, runs the command on a pool of `--threads` workers and writes the output.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.output.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    let result = pool.install(|| execute(&cli)).and_then(|o| emit(&o, cli.output.format, cli.output.out.as_deref()));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
