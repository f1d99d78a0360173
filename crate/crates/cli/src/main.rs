use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod cache;
mod descriptor;
mod error;
mod format;
mod sweep;
mod task;

use cache::{execute, Cache};
use descriptor::{rational_range, Descriptor, LambdaArgs, Selector};
use error::{CliError, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE};
use format::render;
use task::{AuditMode, FourierMode, Task};

#[derive(Parser, Debug)]
#[command(name = "bconv", version, about = "Exact and certified invariants of Bernoulli convolutions")]
struct Cli {
    /// result cache directory
    #[arg(long, global = true, env = "BCONV_CACHE", value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// worker threads (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Mahler measure and Pisot / Salem / Garsia flags
    Classify {
        #[command(flatten)]
        lambda: LambdaArgs,
        /// integer-proximity terms reported for Pisot parameters
        #[arg(long, default_value_t = 20)]
        proximity: usize,
        /// also report the separation model at this degree
        #[arg(long = "separation-d", value_name = "D")]
        separation_d: Option<usize>,
    },
    /// Atoms of the finite approximant
    Atoms {
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long)]
        n: usize,
        /// first exponent of the window
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// probability of the + sign
        #[arg(long, default_value = "1/2")]
        bias: String,
        /// include the exact atom table
        #[arg(long)]
        list: bool,
    },
    /// Shannon entropies H(ν^(k)), the Garsia entropy bracket and semigroup growth
    Entropy {
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/2")]
        bias: String,
    },
    /// Averaged entropy at dyadic scales and the windowed dimension estimate
    ScaleEntropy {
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long, default_value_t = 16)]
        depth: u32,
        #[arg(long, default_value_t = 8)]
        window: u32,
        /// also report d - H(ν; 2^-d) for d = 1..=D and its slope
        #[arg(long, value_name = "D")]
        defect: Option<u32>,
    },
    /// Dimension bracket
    Dimension {
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long, default_value_t = 16)]
        n: usize,
    },
    /// Fourier transform: a single value, a Pisot scan or a decay fit
    Fourier {
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long, value_name = "T", conflicts_with_all = ["scan", "decay"])]
        t: Option<String>,
        /// |ν̂(λ^-n)| for n = 0..=N
        #[arg(long, value_name = "N", conflicts_with = "decay")]
        scan: Option<usize>,
        /// log-spaced grid `lo,hi,count`
        #[arg(long, value_name = "LO,HI,COUNT")]
        decay: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Audits of the ±1/0 polynomial families P_d
    RootsAudit {
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long, value_enum)]
        mode: AuditKind,
        #[arg(long)]
        d: usize,
        /// region for separation
        #[arg(long, default_value = "1/2")]
        a: String,
        #[arg(long, default_value = "1")]
        b: String,
        /// evaluation point for small-values
        #[arg(long, default_value = "9/10")]
        x: String,
        #[arg(long, default_value = "1/10000")]
        threshold: String,
    },
    /// Self-similar iteration on a dyadic grid
    Density {
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long)]
        iterations: Option<usize>,
        /// print the histogram as CSV instead of the JSON summary
        #[arg(long)]
        csv: bool,
    },
    /// Runs a subcommand over a grid of parameters; CSV output
    Sweep(SweepArgs),
    /// Inspect, clear or verify the result cache
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        /// share of entries recomputed by verify
        #[arg(long, default_value_t = 0.05)]
        fraction: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// rationals, comma separated
    #[arg(long, value_delimiter = ',', value_name = "P/Q,...")]
    lambdas: Vec<String>,
    /// rational grid `start:stop:step`, inclusive
    #[arg(long, value_name = "START:STOP:STEP")]
    range: Option<String>,
    /// polynomials, semicolon separated
    #[arg(long, value_delimiter = ';', value_name = "POLY;...")]
    polys: Vec<String>,
    #[arg(long = "root-index", value_name = "K")]
    root_index: Option<usize>,
    #[arg(long)]
    inverse: bool,
    /// the subcommand to run, after `--`
    #[arg(last = true, required = true, value_name = "SUBCOMMAND")]
    command: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum AuditKind {
    Transversality,
    Separation,
    Nearest,
    SmallValues,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CacheAction {
    Stat,
    Clear,
    Verify,
}

fn descriptor(a: &LambdaArgs, fixed: Option<&Descriptor>) -> Result<Descriptor, CliError> {
    match fixed {
        Some(_) if a.given() => Err(CliError::Usage("parameter flags are set by the sweep grid".into())),
        Some(d) => Ok(d.clone()),
        None => Descriptor::from_args(a),
    }
}

fn normalized_rational(text: &str) -> Result<String, CliError> {
    Ok(bconv_core::exact::parse_rational(text)?.to_string())
}

/// Builds the task; `fixed` replaces the parameter flags inside a sweep.
fn task_for(cmd: &Command, fixed: Option<&Descriptor>) -> Result<Task, CliError> {
    Ok(match cmd {
        Command::Classify { lambda, proximity, separation_d } => Task::Classify {
            lambda: descriptor(lambda, fixed)?,
            proximity: *proximity,
            separation_d: *separation_d,
        },
        Command::Atoms { lambda, n, start, bias, list } => Task::Atoms {
            lambda: descriptor(lambda, fixed)?,
            n: *n,
            start: *start,
            bias: normalized_rational(bias)?,
            list: *list,
        },
        Command::Entropy { lambda, n, bias } => {
            Task::Entropy { lambda: descriptor(lambda, fixed)?, n: *n, bias: normalized_rational(bias)? }
        }
        Command::ScaleEntropy { lambda, depth, window, defect } => Task::ScaleEntropy {
            lambda: descriptor(lambda, fixed)?,
            depth: *depth,
            window: *window,
            defect: *defect,
        },
        Command::Dimension { lambda, n } => Task::Dimension { lambda: descriptor(lambda, fixed)?, n: *n },
        Command::Fourier { lambda, t, scan, decay, eps } => {
            let query = match (t, scan, decay) {
                (Some(t), None, None) => FourierMode::At { t: normalized_rational(t)? },
                (None, Some(n), None) => FourierMode::Scan { n: *n },
                (None, None, Some(spec)) => {
                    let parts: Vec<&str> = spec.split(',').collect();
                    let bad = || CliError::Usage(format!("--decay `{spec}` is not `lo,hi,count`"));
                    let [lo, hi, count] = parts[..] else { return Err(bad()) };
                    FourierMode::Decay {
                        lo: lo.trim().parse().map_err(|_| bad())?,
                        hi: hi.trim().parse().map_err(|_| bad())?,
                        count: count.trim().parse().map_err(|_| bad())?,
                    }
                }
                _ => return Err(CliError::Usage("give one of --t, --scan, --decay".into())),
            };
            Task::Fourier { lambda: descriptor(lambda, fixed)?, query, eps: *eps }
        }
        Command::RootsAudit { lambda, mode, d, a, b, x, threshold } => {
            let query = match mode {
                AuditKind::Transversality => AuditMode::Transversality { d: *d },
                AuditKind::Separation => {
                    AuditMode::Separation { d: *d, a: normalized_rational(a)?, b: normalized_rational(b)? }
                }
                AuditKind::Nearest => AuditMode::Nearest { d: *d },
                AuditKind::SmallValues => AuditMode::SmallValues {
                    x: normalized_rational(x)?,
                    d: *d,
                    threshold: normalized_rational(threshold)?,
                },
            };
            let lambda = match mode {
                AuditKind::Nearest => Some(descriptor(lambda, fixed)?),
                _ if lambda.given() => {
                    return Err(CliError::Usage("only --mode nearest takes a parameter".into()));
                }
                _ => None,
            };
            Task::RootsAudit { lambda, query }
        }
        Command::Density { lambda, depth, iterations, csv } => Task::Density {
            lambda: descriptor(lambda, fixed)?,
            depth: *depth,
            iterations: *iterations,
            histogram: *csv,
        },
        Command::Sweep(_) | Command::Cache { .. } => {
            return Err(CliError::Usage("sweep and cache cannot be swept".into()));
        }
    })
}

fn grid(s: &SweepArgs) -> Result<Vec<Descriptor>, CliError> {
    let mut out = Vec::new();
    for q in &s.lambdas {
        out.push(Descriptor::rational(q.trim())?);
    }
    if let Some(r) = &s.range {
        out.extend(rational_range(r)?);
    }
    for p in &s.polys {
        let sel = s.root_index.map_or(Selector::Default, Selector::Index);
        out.push(Descriptor::algebraic(p.trim(), sel, s.inverse)?);
    }
    if out.len() > sweep::MAX_GRID {
        return Err(CliError::Usage(format!("grid larger than {} points", sweep::MAX_GRID)));
    }
    Ok(out)
}

fn histogram_csv(v: &Value) -> Result<String, CliError> {
    let h = &v["histogram"];
    let (Some(c), Some(m), Some(w)) = (h["bin_center"].as_array(), h["mass"].as_array(), v["bin_width"].as_f64()) else {
        return Err(CliError::Io("histogram missing from result".into()));
    };
    let mut out = String::from("bin_center,mass,density\n");
    for (c, m) in c.iter().zip(m) {
        let m = m.as_f64().unwrap_or(0.0);
        let d = serde_json::Number::from_f64(format::sig12(m / w, None)).map_or(Value::Null, Value::Number);
        out.push_str(&format!("{c},{m},{d}\n", m = Value::from(m)));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(String, i32), CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let cache = cli.cache_dir.as_ref().map(Cache::new);
    match &cli.command {
        Command::Cache { action, fraction, seed } => {
            let c = cache.ok_or_else(|| CliError::Usage("set --cache-dir or BCONV_CACHE".into()))?;
            match action {
                CacheAction::Stat => Ok((render(&c.stat()?), EXIT_OK)),
                CacheAction::Clear => Ok((render(&c.clear()?), EXIT_OK)),
                CacheAction::Verify => {
                    let (v, ok) = c.verify(*fraction, *seed)?;
                    Ok((render(&v), if ok { EXIT_OK } else { EXIT_INTERNAL }))
                }
            }
        }
        Command::Sweep(s) => {
            let points = grid(s)?;
            let mut argv = vec!["bconv".to_string()];
            argv.extend(s.command.iter().cloned());
            let inner = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(e.to_string()))?;
            let template = match points.first() {
                Some(d) => task_for(&inner.command, Some(d))?,
                None => return Err(CliError::Usage("empty grid".into())),
            };
            Ok((sweep::sweep(&template, &points, cache.as_ref())?, EXIT_OK))
        }
        cmd => {
            let task = task_for(cmd, None)?;
            let v = execute(&task, cache.as_ref())?;
            if matches!(cmd, Command::Density { csv: true, .. }) {
                return Ok((histogram_csv(&v)?, EXIT_OK));
            }
            Ok((render(&v), EXIT_OK))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            let msg = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprint!("{}", render(&msg));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
