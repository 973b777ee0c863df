//! `tailforge` command-line front end.
//!
//! Exit codes: 0 success, 1 expectation failure, 2 usage or I/O, 3 numerical.

pub mod cache;
pub mod experiments;
pub mod export;
pub mod grid;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tailforge::convolve::{conv2_tail, convn_tail_grid, trunc_convn_tail_grid};
use tailforge::dist::{sample, Landmarks};
use tailforge::functionals::{
    b2_cond, classify, jump_cond, ratio_diagnostic_with, t_ratio, ClassifyConfig, DiagKind, TrendRules,
};
use tailforge::montecarlo::mc_jump_cond;
use tailforge::spec::DistSpec;
use tailforge::QuadConfig;

use crate::experiments::ExperimentId;
use crate::export::{fmt_f64, json_f64, json_text, write_file, Exportable, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "tailforge", version, about = "Numerical analysis of distribution tails")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Evaluation grid: `a,b,c`, `geom:lo:hi:n`, `lin:lo:hi:n` or `pow2:m0:m1`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file, or directory for `experiment`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect, evaluate or sample a distribution.
    Dist {
        #[command(subcommand)]
        cmd: DistCmd,
    },
    /// Write the spec of `Ḡ(x) = F̄(x) e^{-γx}`.
    Transform {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        gamma: f64,
    },
    /// Tail of the n-fold convolution.
    Conv {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        /// Points; falls back to `--grid`.
        #[arg(long)]
        x: Option<String>,
        /// Lattice step; default `x_max/4096`.
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<ConvMethod>,
        /// Restrict every summand to `[0, cap]`.
        #[arg(long)]
        cap: Option<f64>,
    },
    /// Evaluate one tail functional over a grid.
    Functional {
        #[arg(long)]
        dist: String,
        #[arg(long, value_enum)]
        kind: FunctionalKind,
        #[arg(long)]
        x: Option<String>,
        #[arg(long = "K", alias = "k", default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Lattice cells per `x` for `jump`.
        #[arg(long, default_value_t = 4096)]
        cells: usize,
    },
    /// Class verdicts with their evidence series.
    Classify {
        #[arg(long)]
        dist: String,
        /// JSON config; missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Monte Carlo estimate of `P(X_{n,1} > x - K | S_n > x)`.
    Simulate {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: f64,
        #[arg(long = "K", alias = "k")]
        k: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Run a scripted scenario into the `--out` directory.
    Experiment {
        #[arg(value_enum)]
        id: ExperimentId,
        /// Config or earlier summary.json.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-export a JSON diagnostic series or bracket grid.
    Export {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum DistCmd {
    Show {
        #[arg(long)]
        dist: String,
    },
    Eval {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        x: Option<String>,
    },
    Sample {
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvMethod {
    Quad,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FunctionalKind {
    TRatio,
    B2,
    Jump,
    Ol,
    D,
    Lgamma,
    Os,
    Osstar,
}


/// How a successful invocation ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// An experiment ran but the named expectation did not hold.
    ExpectationFailed(String),
}

/// Exit code of an error: 3 for numerical limits, 2 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    err.chain()
        .find_map(|c| c.downcast_ref::<tailforge::Error>())
        .map_or(2, |e| if e.is_numerical() { 3 } else { 2 })
}

/// Parses arguments, runs, reports and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::ExpectationFailed(name)) => {
            eprintln!("expectation failed: {name}");
            1
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn load(arg: &str) -> Result<(DistSpec, tailforge::Distribution)> {
    let spec = DistSpec::load(arg)?;
    let d = spec.build()?;
    Ok((spec, d))
}

fn points(x: &Option<String>, g: &Global) -> Result<Vec<f64>> {
    match x.as_ref().or(g.grid.as_ref()) {
        Some(s) => grid::parse_grid(s),
        None => bail!("no evaluation points; pass --x or --grid"),
    }
}

fn quad(g: &Global) -> QuadConfig {
    g.tol.map_or_else(QuadConfig::default, QuadConfig::with_rel_tol)
}

fn emit(g: &Global, text: &str) -> Result<()> {
    match &g.out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let fmt = g.format.unwrap_or(Format::Csv);
    match &cli.command {
        Command::Dist { cmd } => match cmd {
            DistCmd::Show { dist } => {
                let (spec, d) = load(dist)?;
                let landmarks = match d.landmarks() {
                    Landmarks::None => Value::Null,
                    l => serde_json::to_value(l)?,
                };
                emit(
                    g,
                    &json_text(&json!({
                        "spec": spec.to_value(),
                        "label": d.label(),
                        "mean": d.mean().map(json_f64),
                        "truncation_hi": json_f64(d.truncation_hi()),
                        "truncation_notice": d.truncation_notice(),
                        "segments": d.tail().segments().len(),
                        "atoms": d.tail().atoms().len(),
                        "landmarks": landmarks,
                    })),
                )?;
            }
            DistCmd::Eval { dist, x } => {
                let (_, d) = load(dist)?;
                let mut t = Table::new(&["x", "log_tail", "tail"]);
                for x in points(x, g)? {
                    let lt = d.log_tail(x)?;
                    t.push(vec![fmt_f64(x), fmt_f64(lt), fmt_f64(lt.exp())]);
                }
                emit(g, &t.render(fmt))?;
            }
            DistCmd::Sample { dist, count } => {
                let (_, d) = load(dist)?;
                let mut t = Table::new(&["value"]);
                for v in sample(&d, g.seed, *count)? {
                    t.push(vec![fmt_f64(v)]);
                }
                emit(g, &t.render(fmt))?;
            }
        },
        Command::Transform { dist, gamma } => {
            let spec = DistSpec::load(dist)?.tilted(*gamma);
            spec.build()?;
            emit(g, &format!("{}\n", spec.to_json_pretty()))?;
        }
        Command::Conv {
            dist,
            n,
            x,
            h,
            method,
            cap,
        } => {
            let (spec, d) = load(dist)?;
            let xs = points(x, g)?;
            let method = method.unwrap_or(if *n == 2 && h.is_none() && cap.is_none() {
                ConvMethod::Quad
            } else {
                ConvMethod::Lattice
            });
            let mut t = Table::new(&["x", "lower", "upper", "method"]);
            match method {
                ConvMethod::Quad => {
                    if *n != 2 || cap.is_some() {
                        bail!("--method quad supports n = 2 without --cap");
                    }
                    let q = quad(g);
                    for x in xs {
                        let v = conv2_tail(&d, x, &q)?.ln();
                        t.push(vec![fmt_f64(x), fmt_f64(v), fmt_f64(v), "quad".into()]);
                    }
                }
                ConvMethod::Lattice => {
                    let x_max = xs.iter().copied().fold(0.0, f64::max);
                    let h = h.unwrap_or(x_max / 4096.0);
                    let bg = cache::cached_grid(&spec, *n, *cap, x_max, h, || match cap {
                        Some(c) => trunc_convn_tail_grid(&d, *n, *c, x_max, h),
                        None => convn_tail_grid(&d, *n, x_max, h),
                    })?;
                    for x in xs {
                        let (lo, hi) = bg.bracket_at(x)?;
                        t.push(vec![fmt_f64(x), fmt_f64(lo.ln()), fmt_f64(hi.ln()), "lattice".into()]);
                    }
                }
            }
            emit(g, &t.render(fmt))?;
        }
        Command::Functional {
            dist,
            kind,
            x,
            k,
            t,
            gamma,
            n,
            cells,
        } => {
            let (_, d) = load(dist)?;
            let xs = points(x, g)?;
            let q = quad(g);
            let diag = match kind {
                FunctionalKind::Ol => Some(DiagKind::Ol { t: *t }),
                FunctionalKind::D => Some(DiagKind::D),
                FunctionalKind::Lgamma => Some(DiagKind::Lgamma { gamma: *gamma, t: *t }),
                FunctionalKind::Os => Some(DiagKind::Os),
                FunctionalKind::Osstar => Some(DiagKind::OsStar),
                _ => None,
            };
            let text = if let Some(kind) = diag {
                let s = ratio_diagnostic_with(&d, kind, &xs, &q, &TrendRules::default())?;
                Exportable::Series(s).render(fmt)
            } else if *kind == FunctionalKind::Jump {
                let mut tab = Table::new(&["x", "lower", "upper"]);
                for x in xs {
                    let b = jump_cond(&d, *n, x, *k, x / *cells as f64)?;
                    tab.push(vec![fmt_f64(x), fmt_f64(b.lower), fmt_f64(b.upper)]);
                }
                tab.render(fmt)
            } else {
                let mut tab = Table::new(&["x", "value"]);
                for x in xs {
                    let v = if *kind == FunctionalKind::TRatio {
                        t_ratio(&d, x, *k, &q)?
                    } else {
                        b2_cond(&d, x, *k, &q)?
                    };
                    tab.push(vec![fmt_f64(x), fmt_f64(v)]);
                }
                tab.render(fmt)
            };
            emit(g, &text)?;
        }
        Command::Classify { dist, config } => {
            let (_, d) = load(dist)?;
            let mut cfg: ClassifyConfig = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str(&text).with_context(|| format!("invalid classify config {}", p.display()))?
                }
                None => ClassifyConfig::default(),
            };
            if let Some(s) = &g.grid {
                cfg.xgrid = Some(grid::parse_grid(s)?);
            }
            if let Some(tol) = g.tol {
                cfg.quad.rel_tol = tol;
            }
            let report = classify(&d, &cfg);
            let text = match g.format.unwrap_or(Format::Json) {
                Format::Json => json_text(&report),
                Format::Csv => {
                    let mut t = Table::new(&["class", "verdict", "note"]);
                    for e in &report.entries {
                        let v = serde_json::to_value(e.verdict)?;
                        t.push(vec![
                            e.class.as_str().into(),
                            v.as_str().unwrap_or_default().into(),
                            e.note.replace(',', ";"),
                        ]);
                    }
                    t.to_csv()
                }
            };
            emit(g, &text)?;
        }
        Command::Simulate { dist, n, x, k, samples } => {
            let (_, d) = load(dist)?;
            let e = mc_jump_cond(&d, *n, *x, *k, *samples, g.seed)?;
            let text = match g.format.unwrap_or(Format::Json) {
                Format::Json => json_text(&e),
                Format::Csv => {
                    let mut t = Table::new(&["estimate", "std_error", "accepted", "total", "seed"]);
                    t.push(vec![
                        fmt_f64(e.estimate),
                        fmt_f64(e.std_error),
                        e.accepted.to_string(),
                        e.total.to_string(),
                        e.seed.to_string(),
                    ]);
                    t.to_csv()
                }
            };
            emit(g, &text)?;
        }
        Command::Experiment { id, config } => {
            let cfg = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    Some(serde_json::from_str(&text).with_context(|| format!("{} is not JSON", p.display()))?)
                }
                None => None,
            };
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from(id.as_str()));
            let summary = experiments::run_experiment(*id, cfg, g.tol, &out)?;
            for e in &summary.expectations {
                println!("{} {}: {}", if e.holds { "PASS" } else { "FAIL" }, e.name, e.detail);
            }
            if let Some(f) = summary.first_failure() {
                return Ok(Outcome::ExpectationFailed(f.name.clone()));
            }
        }
        Command::Export { input } => {
            let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
            let item = Exportable::from_json(&text).with_context(|| format!("reading {}", input.display()))?;
            emit(g, &item.render(fmt))?;
        }
    }
    Ok(Outcome::Done)
}
