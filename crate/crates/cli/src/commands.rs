//! The subcommands. Each returns an [`Outcome`]: a report for printing plus
//! the process exit code.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use hhfactor::dictlearn::{recover_with, DEFAULT_ENUMERATION_CAP};
use hhfactor::{
    error_bound, greedy_decompose, recover, DMatrix, DataMatrix, DenseOrthogonal, Distribution,
    GeneratorSpec, Termination,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::format::{self, ErrorTraceRow};
use crate::timing::{normalized_scaling, time_apply, ApplyTiming};
use crate::{exit, CliError, Result};

/// Accepted range for `t(m_hi)/t(m_lo) / (m_hi/m_lo)`: a 32-vs-8 time ratio
/// between 2.5 and 5.5.
pub const LINEAR_SCALING_RANGE: (f64, f64) = (2.5 / 4.0, 5.5 / 4.0);

pub const DEFAULT_SWEEP_M: [usize; 8] = [1, 5, 10, 25, 50, 100, 200, 400];

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// gaussian, sparse[:fraction], correlated, bernoulli, exponential, symmetric
    #[arg(long, default_value = "gaussian")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 25)]
    pub m: usize,
    /// Dense matrix output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Factored (HPROD) output.
    #[arg(long)]
    pub factors: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    pub input: PathBuf,
    /// Factor cap; defaults to n.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Per-iteration CSV output.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Factored (HPROD) output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub from: usize,
    /// Last m; defaults to n.
    #[arg(long)]
    pub to: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ApplyArgs {
    /// Factored (HPROD) file.
    pub factors: PathBuf,
    /// Matrix file whose columns are the vectors.
    pub input: PathBuf,
    /// Apply the transpose `Hₘ…H₁` instead.
    #[arg(long)]
    pub transpose: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RecoverArgs {
    pub input: PathBuf,
    /// Largest n for which guesses are enumerated.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub max_n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![8, 16, 32])]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 15)]
    pub trials: usize,
    /// Exit nonzero when scaling in m is not close to linear.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = Distribution::all().to_vec())]
    pub dist: Vec<Distribution>,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SWEEP_M.to_vec())]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Directory receiving one `<dist>_m<m>.csv` per cell.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthReport {
    pub distribution: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub factors: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeReport {
    pub n: usize,
    pub factors: usize,
    pub final_residual: f64,
    pub termination: String,
    pub trace: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub m: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub rows: Vec<BoundRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApplyReport {
    pub result: Vec<Vec<f64>>,
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoverReport {
    pub u: Vec<f64>,
    pub x: Vec<Vec<u8>>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub n: usize,
    pub trials: usize,
    pub timings: Vec<ApplyTiming>,
    /// `t(m_max)/t(m_min)` over `m_max/m_min`.
    pub normalized_scaling: Option<f64>,
    pub linear: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub distribution: String,
    pub m: usize,
    pub factors: usize,
    pub final_residual: f64,
    pub termination: String,
    pub trace: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub eps: f64,
    pub cells: Vec<SweepCell>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Report {
    Synth(SynthReport),
    Decompose(DecomposeReport),
    Bound(BoundReport),
    Apply(ApplyReport),
    Recover(RecoverReport),
    Bench(BenchReport),
    Sweep(SweepReport),
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub code: u8,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self {
            report,
            code: exit::SUCCESS,
        }
    }
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "converged",
        Termination::FactorCap => "factor-cap",
        Termination::DimensionCap => "dimension-cap",
    }
}

fn load_orthogonal(path: &Path) -> Result<DenseOrthogonal> {
    let m = format::load_matrix(path)?;
    DenseOrthogonal::new(m).map_err(|e| CliError::from(e).in_file(path))
}

pub fn synth(args: &SynthArgs, seed: u64) -> Result<Outcome> {
    if args.out.is_none() && args.factors.is_none() {
        return Err(CliError::Usage("synth needs --out and/or --factors".into()));
    }
    let spec = GeneratorSpec::new(args.dist, args.n, args.m, seed)?;
    let inst = spec.generate()?;
    if let Some(path) = &args.out {
        format::save_matrix(path, inst.matrix.matrix())?;
    }
    if let Some(path) = &args.factors {
        format::save_factored(path, &inst.factors)?;
    }
    Ok(Outcome::ok(Report::Synth(SynthReport {
        distribution: args.dist.to_string(),
        n: args.n,
        m: args.m,
        seed,
        out: args.out.clone(),
        factors: args.factors.clone(),
    })))
}

pub fn decompose(args: &DecomposeArgs) -> Result<Outcome> {
    let v = load_orthogonal(&args.input)?;
    let cap = args.m.unwrap_or(v.n());
    let (product, trace) = greedy_decompose(&v, cap, args.eps)?;
    if let Some(path) = &args.trace {
        format::save_trace(path, &ErrorTraceRow::rows(&trace))?;
    }
    if let Some(path) = &args.out {
        format::save_factored(path, &product)?;
    }
    let code = match trace.termination {
        Termination::Converged => exit::SUCCESS,
        _ => exit::CAP_REACHED,
    };
    Ok(Outcome {
        report: Report::Decompose(DecomposeReport {
            n: v.n(),
            factors: product.len(),
            final_residual: trace.final_residual,
            termination: termination_name(trace.termination).into(),
            trace: args.trace.clone(),
            out: args.out.clone(),
        }),
        code,
    })
}

pub fn bound(args: &BoundArgs) -> Result<Outcome> {
    let v = load_orthogonal(&args.input)?;
    let to = args.to.unwrap_or(v.n());
    if args.from > to {
        return Err(CliError::Usage(format!(
            "--from {} exceeds --to {to}",
            args.from
        )));
    }
    let rows = (args.from..=to)
        .map(|m| {
            Ok(BoundRow {
                m,
                bound: error_bound(&v, m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::ok(Report::Bound(BoundReport { n: v.n(), rows })))
}

pub fn apply(args: &ApplyArgs) -> Result<Outcome> {
    let product = format::load_factored(&args.factors)?;
    let input = format::load_matrix(&args.input)?;
    if input.nrows() != product.dim() {
        return Err(CliError::from(hhfactor::Error::DimensionMismatch {
            expected: product.dim(),
            found: input.nrows(),
        })
        .in_file(&args.input));
    }
    let mut out = input;
    for mut col in out.column_iter_mut() {
        let x = col.clone_owned();
        let y = if args.transpose {
            product.apply_transpose(&x)?
        } else {
            product.apply(&x)?
        };
        col.copy_from(&y);
    }
    if let Some(path) = &args.out {
        format::save_matrix(path, &out)?;
    }
    Ok(Outcome::ok(Report::Apply(ApplyReport {
        result: out
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
        out: args.out.clone(),
        matrix: out,
    })))
}

pub fn recover_cmd(args: &RecoverArgs) -> Result<Outcome> {
    let y = DataMatrix::new(format::load_matrix(&args.input)?)?;
    let result = if args.max_n == DEFAULT_ENUMERATION_CAP {
        recover(&y)?
    } else {
        recover_with(&y, args.max_n)?
    };
    Ok(Outcome::ok(Report::Recover(RecoverReport {
        u: result.reflector.direction().iter().copied().collect(),
        x: result
            .x
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
        residual: result.residual,
    })))
}

pub fn bench(args: &BenchArgs, seed: u64) -> Result<Outcome> {
    if args.m.is_empty() || args.m.iter().any(|&m| m == 0 || m > args.n) {
        return Err(CliError::Usage(format!(
            "every m must lie in 1..={}",
            args.n
        )));
    }
    let mut ms = args.m.clone();
    ms.sort_unstable();
    ms.dedup();
    let timings = ms
        .iter()
        .map(|&m| time_apply(args.n, m, args.trials, seed))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = (timings.first().unwrap(), timings.last().unwrap());
    let scaling = (hi.m > lo.m).then(|| normalized_scaling(lo, hi));
    let linear = scaling.map(|s| (LINEAR_SCALING_RANGE.0..=LINEAR_SCALING_RANGE.1).contains(&s));
    let code = if args.strict && linear == Some(false) {
        exit::INVALID_INPUT
    } else {
        exit::SUCCESS
    };
    Ok(Outcome {
        report: Report::Bench(BenchReport {
            n: args.n,
            trials: args.trials,
            timings,
            normalized_scaling: scaling,
            linear,
        }),
        code,
    })
}

/// Runs every `(distribution, m)` cell in parallel; each cell writes its own CSV.
pub fn sweep(args: &SweepArgs, seed: u64) -> Result<Outcome> {
    std::fs::create_dir_all(&args.out_dir).map_err(|source| CliError::Io {
        path: args.out_dir.display().to_string(),
        source,
    })?;
    let cells: Vec<(Distribution, usize)> = args
        .dist
        .iter()
        .flat_map(|&d| args.m.iter().map(move |&m| (d, m)))
        .collect();
    for &(d, m) in &cells {
        GeneratorSpec::new(d, args.n, m, seed)?;
    }
    let results = cells
        .par_iter()
        .map(|&(d, m)| {
            let inst = GeneratorSpec::new(d, args.n, m, seed)?.generate()?;
            let (product, trace) = greedy_decompose(&inst.matrix, args.n, args.eps)?;
            let path = args.out_dir.join(format!("{}_m{m}.csv", d.name()));
            format::save_trace(&path, &ErrorTraceRow::rows(&trace))?;
            Ok(SweepCell {
                distribution: d.to_string(),
                m,
                factors: product.len(),
                final_residual: trace.final_residual,
                termination: termination_name(trace.termination).into(),
                trace: path,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let code = if results.iter().all(|c| c.termination == "converged") {
        exit::SUCCESS
    } else {
        exit::CAP_REACHED
    };
    Ok(Outcome {
        report: Report::Sweep(SweepReport {
            n: args.n,
            eps: args.eps,
            cells: results,
        }),
        code,
    })
}

fn opt_path(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map_or_else(|| "-".into(), |p| p.display().to_string())
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Synth(r) => {
                writeln!(f, "distribution: {}", r.distribution)?;
                writeln!(f, "n: {}  m: {}  seed: {}", r.n, r.m, r.seed)?;
                writeln!(f, "matrix: {}", opt_path(&r.out))?;
                write!(f, "factors: {}", opt_path(&r.factors))
            }
            Report::Decompose(r) => {
                writeln!(f, "n: {}", r.n)?;
                writeln!(f, "factors: {}", r.factors)?;
                writeln!(f, "residual: {:.6e}", r.final_residual)?;
                writeln!(f, "termination: {}", r.termination)?;
                writeln!(f, "trace: {}", opt_path(&r.trace))?;
                write!(f, "out: {}", opt_path(&r.out))
            }
            Report::Bound(r) => {
                write!(f, "m bound")?;
                for row in &r.rows {
                    write!(f, "\n{} {:.16e}", row.m, row.bound)?;
                }
                Ok(())
            }
            Report::Apply(r) => {
                let mut buf = Vec::new();
                format::write_matrix(&mut buf, &r.matrix).map_err(|_| fmt::Error)?;
                f.write_str(String::from_utf8_lossy(&buf).trim_end())
            }
            Report::Recover(r) => {
                let u: Vec<String> = r.u.iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(f, "u: {}", u.join(" "))?;
                writeln!(f, "X:")?;
                for row in &r.x {
                    let bits: Vec<String> = row.iter().map(u8::to_string).collect();
                    writeln!(f, "  {}", bits.join(" "))?;
                }
                write!(f, "residual: {:.6e}", r.residual)
            }
            Report::Bench(r) => {
                writeln!(f, "n: {}  trials: {}", r.n, r.trials)?;
                write!(
                    f,
                    "{:>6} {:>14} {:>14} {:>9}",
                    "m", "factored_s", "dense_s", "speedup"
                )?;
                for t in &r.timings {
                    write!(
                        f,
                        "\n{:>6} {:>14.6e} {:>14.6e} {:>9.2}",
                        t.m,
                        t.factored_secs,
                        t.dense_secs,
                        t.speedup()
                    )?;
                }
                if let (Some(s), Some(ok)) = (r.normalized_scaling, r.linear) {
                    write!(
                        f,
                        "\nnormalized scaling: {s:.3} ({})",
                        if ok { "linear" } else { "NOT linear" }
                    )?;
                }
                Ok(())
            }
            Report::Sweep(r) => {
                write!(
                    f,
                    "{:<12} {:>5} {:>8} {:>14} {:<14} trace",
                    "distribution", "m", "factors", "residual", "termination"
                )?;
                for c in &r.cells {
                    write!(
                        f,
                        "\n{:<12} {:>5} {:>8} {:>14.6e} {:<14} {}",
                        c.distribution,
                        c.m,
                        c.factors,
                        c.final_residual,
                        c.termination,
                        c.trace.display()
                    )?;
                }
                Ok(())
            }
        }
    }
}
