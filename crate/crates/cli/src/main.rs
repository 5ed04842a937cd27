use std::path::PathBuf;
use std::process::ExitCode;

use bitree_core::harness::{
    self, CapacityTarget, CheckKind, Command, FamilyKind, RunConfig,
};
use bitree_core::DyadicRect;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bitree", version, about = "Box, Carleson and capacity conditions on the dyadic bi-tree")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Relative tolerance for spectral and QP iterations.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON artifact here instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write CSV rows here (scan, experiment).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Use a = 1/N for the hyperbola measure instead of a = 1/B_A.
    #[arg(long, global = true)]
    paper_a: bool,
    /// Itemized terms and per-sample rows in the JSON artifact.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    Balanced,
    Hyperbola,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Check {
    Box,
    Carleson,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Scenario {
    Hyperbola,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate the balanced or hyperbola family.
    Gen {
        kind: Kind,
        #[arg(long)]
        n: u32,
    },
    /// F_A and B_A of a family file.
    Stats {
        #[arg(long)]
        family: PathBuf,
    },
    /// Box constant, or Carleson ratio over the union of a family.
    Check {
        kind: Check,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Extremal embedding constant by power iteration.
    Embed {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
    },
    /// Primal and dual embedding constants restricted to a family.
    Dual {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Bi-tree capacity of a cell, rectangle or region; tree capacity of an interval.
    Capacity {
        /// Grain, or tree depth with --interval.
        #[arg(long)]
        n: u32,
        /// Cell as ix,iy.
        #[arg(long, value_delimiter = ',', group = "target")]
        cell: Option<Vec<u64>>,
        /// Rectangle as hl,hi,vl,vi.
        #[arg(long, value_delimiter = ',', group = "target")]
        rect: Option<Vec<u64>>,
        /// All cells of the union of a family file.
        #[arg(long, group = "target")]
        family: Option<PathBuf>,
        /// Simple-tree interval as level,index.
        #[arg(long, value_delimiter = ',', group = "target")]
        interval: Option<Vec<u64>>,
    },
    /// Box-feasible random measures against the capacitary statistic.
    Experiment {
        #[arg(long, default_value_t = 6)]
        n: u32,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0.25)]
        sparsity: f64,
        #[arg(long, default_value_t = 16.0)]
        threshold: f64,
    },
    /// Hyperbola scenario over a list of N.
    Scan {
        scenario: Scenario,
        /// Comma-separated list of N.
        #[arg(long, value_delimiter = ',', required_unless_present = "n_list")]
        n: Vec<u64>,
        /// Same as --n.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u64>,
        /// Materialize every object and evaluate exact sums (N <= 8).
        #[arg(long)]
        exhaustive: bool,
    },
    /// Pruned/cut classification of a family.
    Classify {
        #[arg(long)]
        family: PathBuf,
        /// Classify every rectangle not in the family.
        #[arg(long)]
        complement: bool,
    },
    /// Replay a serialized run configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn to_command(cmd: Cmd) -> Result<Command, String> {
    Ok(match cmd {
        Cmd::Gen { kind, n } => Command::Gen {
            kind: match kind {
                Kind::Balanced => FamilyKind::Balanced,
                Kind::Hyperbola => FamilyKind::Hyperbola,
            },
            n,
        },
        Cmd::Stats { family } => Command::Stats { family },
        Cmd::Check {
            kind,
            measure,
            alpha,
            family,
        } => Command::Check {
            kind: match kind {
                Check::Box => CheckKind::Box,
                Check::Carleson => CheckKind::Carleson,
            },
            measure,
            alpha,
            family,
        },
        Cmd::Embed { measure, alpha } => Command::Embed { measure, alpha },
        Cmd::Dual {
            measure,
            alpha,
            family,
        } => Command::Dual {
            measure,
            alpha,
            family,
        },
        Cmd::Capacity {
            n,
            cell,
            rect,
            family,
            interval,
        } => {
            let arity = |v: &Option<Vec<u64>>, k: usize, flag: &str| match v {
                Some(v) if v.len() != k => Err(format!("--{flag} takes {k} comma-separated values")),
                _ => Ok(()),
            };
            arity(&cell, 2, "cell")?;
            arity(&rect, 4, "rect")?;
            arity(&interval, 2, "interval")?;
            let target = match (cell, rect, family, interval) {
                (Some(c), ..) => CapacityTarget::Cell { ix: c[0], iy: c[1] },
                (_, Some(r), ..) => {
                    let level = |x: u64| u32::try_from(x).map_err(|_| format!("level {x} too large"));
                    let r = DyadicRect::from_parts(level(r[0])?, r[1], level(r[2])?, r[3])
                        .map_err(|e| e.to_string())?;
                    CapacityTarget::Rect(r)
                }
                (_, _, Some(f), _) => CapacityTarget::Region(f),
                (_, _, _, Some(i)) => CapacityTarget::Interval {
                    level: u32::try_from(i[0]).map_err(|_| "level too large".to_string())?,
                    index: i[1],
                },
                _ => return Err("capacity needs one of --cell, --rect, --family, --interval".into()),
            };
            Command::Capacity { n, target }
        }
        Cmd::Experiment {
            n,
            samples,
            sparsity,
            threshold,
        } => Command::Experiment {
            n,
            samples,
            sparsity,
            threshold,
        },
        Cmd::Scan {
            scenario: Scenario::Hyperbola,
            mut n,
            n_list,
            exhaustive,
        } => {
            n.extend(n_list);
            Command::Scan {
                n_list: n,
                exhaustive,
            }
        }
        Cmd::Classify { family, complement } => Command::Classify { family, complement },
        Cmd::Run { .. } => unreachable!("handled before conversion"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.common.verbose {
        "info"
    } else {
        "warn"
    }))
    .init();

    let cfg = match cli.command {
        Cmd::Run { config } => {
            match std::fs::read_to_string(&config)
                .map_err(|e| e.to_string())
                .and_then(|s| serde_json::from_str::<RunConfig>(&s).map_err(|e| e.to_string()))
            {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::from(harness::exit::USAGE as u8);
                }
            }
        }
        cmd => match to_command(cmd) {
            Ok(command) => {
                let c = cli.common;
                RunConfig {
                    tol: c.tol,
                    seed: c.seed,
                    paper_a: c.paper_a,
                    verbose: c.verbose,
                    csv: c.csv,
                    json: c.json,
                    ..RunConfig::new(command)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(harness::exit::USAGE as u8);
            }
        },
    };
    ExitCode::from(harness::run(&cfg) as u8)
}
