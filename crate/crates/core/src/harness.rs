//! Run configuration, command dispatch and artifacts behind the CLI.
//!
//! [`execute`] is pure apart from reading input files: it returns the JSON
//! artifact (library version, the full [`RunConfig`], the result) and the CSV
//! text where the command has one. [`run`] writes them out and maps the
//! outcome to an exit status.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{
    bitree_capacity, box_to_capacity_experiment, capacity_estimate, tree_capacity,
    ExperimentConfig, QpOptions, Target,
};
use crate::codec::{format_sig, rational_to_f64};
use crate::conditions::{
    box_constant, box_terms, carleson_ratio, carleson_terms, classify_family, embedding_estimate,
};
use crate::counterexamples::{
    balanced_family, family_stats, hyperbola_family, scenario_hyperbola, ScenarioMode,
    ScenarioOptions, ScenarioReport, MAX_LATTICE_N,
};
use crate::error::{Error, Result};
use crate::grid::{
    CellId, DyadicInterval, DyadicRect, Grain, Measure, RectFamily, WeightFamily,
    MAX_EXHAUSTIVE_GRAIN, MAX_SPECTRAL_GRAIN,
};
use crate::hardy::dual_constant;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest sizes accepted per mode; each is capped again by the library.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guards {
    pub exhaustive: u32,
    pub spectral: u32,
    pub lattice: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            exhaustive: MAX_EXHAUSTIVE_GRAIN,
            spectral: MAX_SPECTRAL_GRAIN,
            lattice: MAX_LATTICE_N,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Balanced,
    Hyperbola,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Box,
    Carleson,
}

/// What a capacity run targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityTarget {
    Cell { ix: u64, iy: u64 },
    Rect(DyadicRect),
    /// Every cell of the union of a family file.
    Region(PathBuf),
    /// An interval of the simple tree; `n` is the tree depth.
    Interval { level: u32, index: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    Gen {
        kind: FamilyKind,
        n: u32,
    },
    Stats {
        family: PathBuf,
    },
    Check {
        kind: CheckKind,
        measure: PathBuf,
        alpha: PathBuf,
        family: Option<PathBuf>,
    },
    Embed {
        measure: PathBuf,
        alpha: PathBuf,
    },
    Dual {
        measure: PathBuf,
        alpha: PathBuf,
        family: PathBuf,
    },
    Capacity {
        n: u32,
        target: CapacityTarget,
    },
    Experiment {
        n: u32,
        samples: usize,
        sparsity: f64,
        threshold: f64,
    },
    Scan {
        n_list: Vec<u64>,
        exhaustive: bool,
    },
    Classify {
        family: PathBuf,
        /// Classify every rectangle not in the family instead.
        complement: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub tol: f64,
    pub seed: u64,
    /// Use `a = 1/N` instead of `a = 1/B_A` for the hyperbola measure.
    pub paper_a: bool,
    pub verbose: bool,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub guards: Guards,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            tol: 1e-10,
            seed: 0,
            paper_a: false,
            verbose: false,
            csv: None,
            json: None,
            guards: Guards::default(),
        }
    }
}

/// One line of a hyperbola scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub f_a: u64,
    pub b_a: u64,
    pub ratio_fb: f64,
    pub box_on_family: f64,
    pub box_on_all: f64,
    pub carleson: f64,
}

impl From<&ScenarioReport> for ScanRow {
    fn from(r: &ScenarioReport) -> Self {
        ScanRow {
            n: r.n,
            f_a: r.stats.f_a,
            b_a: r.stats.b_a,
            ratio_fb: r.ratio_fb,
            box_on_family: rational_to_f64(&r.box_on_family),
            box_on_all: rational_to_f64(&r.box_on_all),
            carleson: rational_to_f64(&r.carleson),
        }
    }
}

pub const SCAN_HEADER: &str = "n,f_a,b_a,ratio_fb,box_on_family,box_on_all,carleson";
pub const EXPERIMENT_HEADER: &str = "seed,sample,statistic,hl,hi,vl,vi";

impl ScanRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.f_a,
            self.b_a,
            format_sig(self.ratio_fb),
            format_sig(self.box_on_family),
            format_sig(self.box_on_all),
            format_sig(self.carleson)
        )
    }
}

/// Why a run did not end cleanly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The run completed but found a violated condition worth reporting.
    Finding,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub artifact: Value,
    pub csv: Option<String>,
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const GUARD: i32 = 3;
    pub const NON_CONVERGENCE: i32 = 4;
    pub const FINDING: i32 = 5;
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Guard { .. } => exit::GUARD,
        Error::NonConvergence { .. } => exit::NON_CONVERGENCE,
        Error::Malformed(_)
        | Error::Json(_)
        | Error::InvalidParameter(_)
        | Error::GrainMismatch { .. }
        | Error::OutOfGrain(_)
        | Error::Precondition(_)
        | Error::EmptyFamily
        | Error::EmptyDomain => exit::USAGE,
        Error::Io(_) => exit::FAILURE,
    }
}

/// Executes, writes artifacts (JSON to `cfg.json` or stdout, CSV to
/// `cfg.csv`) and returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    let outcome = match execute(cfg) {
        Ok(o) => o,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = write_outcome(cfg, &outcome) {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match outcome.status {
        Status::Ok => exit::OK,
        Status::Finding => exit::FINDING,
    }
}

fn write_outcome(cfg: &RunConfig, outcome: &Outcome) -> Result<()> {
    let text = serde_json::to_string_pretty(&outcome.artifact)? + "\n";
    match &cfg.json {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    if let (Some(p), Some(csv)) = (&cfg.csv, &outcome.csv) {
        fs::write(p, csv)?;
    }
    Ok(())
}

fn artifact(cfg: &RunConfig, result: Value) -> Result<Value> {
    Ok(json!({
        "version": VERSION,
        "config": serde_json::to_value(cfg)?,
        "result": result,
    }))
}

fn csv_with_provenance(cfg: &RunConfig, header: &str, lines: impl Iterator<Item = String>) -> Result<String> {
    let mut out = format!(
        "# bitree {VERSION} {}\n{header}\n",
        serde_json::to_string(cfg)?
    );
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    Ok(out)
}

fn grain_at_most(n: u32, limit: u32, what: &'static str) -> Result<Grain> {
    if n > limit {
        return Err(Error::guard(what, n, limit));
    }
    Grain::new(n)
}

/// Reads a bare encoding, or an entry of the `result` object of an artifact
/// written by an earlier run: the first of `keys` present, or the key named
/// after a `#` in the path (`h.json#forbidden`).
pub fn load<T: DeserializeOwned>(path: &Path, keys: &[&str]) -> Result<T> {
    let spec = path.to_string_lossy();
    let (file, key) = match spec.rsplit_once('#') {
        Some((f, k)) => (Path::new(f), Some(k)),
        None => (path, None),
    };
    let text = fs::read_to_string(file)?;
    let v: Value = serde_json::from_str(&text)?;
    if key.is_none() {
        if let Ok(t) = serde_json::from_value::<T>(v.clone()) {
            return Ok(t);
        }
    }
    let result = v.get("result");
    let wanted: Vec<&str> = match key {
        Some(k) => vec![k],
        None => keys.to_vec(),
    };
    for k in wanted {
        if let Some(inner) = result.and_then(|r| r.get(k)) {
            return Ok(serde_json::from_value(inner.clone())?);
        }
    }
    Err(Error::Malformed(format!(
        "{}: neither a bare encoding nor an artifact with result.{}",
        file.display(),
        key.map_or_else(|| keys.join("|"), str::to_string)
    )))
}

fn load_measure(p: &Path) -> Result<Measure> {
    load(p, &["mu", "measure"])
}

fn load_alpha(p: &Path) -> Result<WeightFamily> {
    load(p, &["alpha", "weights"])
}

fn load_family(p: &Path) -> Result<RectFamily> {
    load(p, &["family"])
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let g = &cfg.guards;
    let ok = |result: Value| -> Result<Outcome> {
        Ok(Outcome {
            status: Status::Ok,
            artifact: artifact(cfg, result)?,
            csv: None,
        })
    };
    match &cfg.command {
        Command::Gen { kind, n } => {
            let grain = Grain::new(*n)?;
            match kind {
                FamilyKind::Balanced => ok(json!({ "family": balanced_family(grain)? })),
                FamilyKind::Hyperbola => {
                    let h = hyperbola_family(grain, cfg.paper_a)?;
                    ok(json!({
                        "family": h.family,
                        "forbidden": h.forbidden,
                        "alpha": h.alpha,
                        "mu": h.mu,
                        "a": crate::codec::format_rational(&h.a),
                    }))
                }
            }
        }
        Command::Stats { family } => {
            let fam = load_family(family)?;
            grain_at_most(fam.grain().n(), g.exhaustive, "family statistics")?;
            let s = family_stats(&fam)?;
            ok(json!({
                "f_a": s.f_a,
                "b_a": s.b_a,
                "witness": s.witness,
                "witness_box": s.witness_box(fam.grain())?,
                "ratio_fb": s.ratio(),
            }))
        }
        Command::Check {
            kind,
            measure,
            alpha,
            family,
        } => {
            let mu = load_measure(measure)?;
            let alpha = load_alpha(alpha)?;
            grain_at_most(mu.grain().n(), g.exhaustive, "condition check")?;
            let report = match kind {
                CheckKind::Box => {
                    let rep = box_constant(&mu, &alpha)?;
                    match (cfg.verbose, rep.witness_rect()) {
                        (true, Some(w)) => {
                            let terms = box_terms(&mu, &alpha, &w)?;
                            rep.with_terms(terms)
                        }
                        _ => rep,
                    }
                }
                CheckKind::Carleson => {
                    let path = family.as_ref().ok_or_else(|| {
                        Error::InvalidParameter("check carleson needs --family".into())
                    })?;
                    let fam = load_family(path)?;
                    let rep = carleson_ratio(&mu, &alpha, &fam)?;
                    if cfg.verbose {
                        let terms = carleson_terms(&mu, &alpha, &fam)?;
                        rep.with_terms(terms)
                    } else {
                        rep
                    }
                }
            };
            ok(serde_json::to_value(report)?)
        }
        Command::Embed { measure, alpha } => {
            let mu = load_measure(measure)?;
            let alpha = load_alpha(alpha)?;
            grain_at_most(mu.grain().n(), g.spectral, "embedding constant")?;
            ok(serde_json::to_value(embedding_estimate(&mu, &alpha, cfg.tol)?)?)
        }
        Command::Dual {
            measure,
            alpha,
            family,
        } => {
            let mu = load_measure(measure)?;
            let alpha = load_alpha(alpha)?;
            let fam = load_family(family)?;
            grain_at_most(mu.grain().n(), g.spectral, "dual constant")?;
            let rep = dual_constant(&mu, &alpha, &fam, cfg.tol)?;
            let agree = rep.gap <= 1e-6 * rep.primal.max(1.0);
            let mut out = ok(json!({ "report": rep, "agree": agree }))?;
            if !agree {
                out.status = Status::Finding;
            }
            Ok(out)
        }
        Command::Capacity { n, target } => capacity(cfg, *n, target),
        Command::Experiment {
            n,
            samples,
            sparsity,
            threshold,
        } => {
            grain_at_most(*n, g.exhaustive, "experiment")?;
            let rep = box_to_capacity_experiment(&ExperimentConfig {
                grain: *n,
                samples: *samples,
                seed: cfg.seed,
                sparsity: *sparsity,
                threshold: *threshold,
            })?;
            let csv = csv_with_provenance(
                cfg,
                EXPERIMENT_HEADER,
                rep.rows.iter().map(|r| {
                    let w = r
                        .witness
                        .map(|w| format!("{},{},{},{}", w.h.level, w.h.index, w.v.level, w.v.index))
                        .unwrap_or_else(|| ",,,".into());
                    format!("{},{},{},{w}", r.seed, r.sample, format_sig(r.statistic_f64()))
                }),
            )?;
            let finding = !rep.summary.findings.is_empty() || rep.summary.recursion_failures > 0;
            let result = if cfg.verbose {
                serde_json::to_value(&rep)?
            } else {
                json!({ "summary": rep.summary })
            };
            Ok(Outcome {
                status: if finding { Status::Finding } else { Status::Ok },
                artifact: artifact(cfg, result)?,
                csv: Some(csv),
            })
        }
        Command::Scan { n_list, exhaustive } => {
            if n_list.is_empty() {
                return Err(Error::InvalidParameter("scan needs at least one N".into()));
            }
            let (mode, limit) = if *exhaustive {
                (ScenarioMode::Exhaustive, u64::from(g.exhaustive))
            } else {
                (ScenarioMode::Fast, g.lattice)
            };
            if let Some(&n) = n_list.iter().find(|&&n| n > limit) {
                return Err(Error::guard("scan", n, limit));
            }
            let opts = ScenarioOptions {
                paper_a: cfg.paper_a,
                mode,
            };
            let reports: Vec<ScenarioReport> = n_list
                .par_iter()
                .map(|&n| scenario_hyperbola(n, opts))
                .collect::<Result<_>>()?;
            let rows: Vec<ScanRow> = reports.iter().map(ScanRow::from).collect();
            let csv = csv_with_provenance(cfg, SCAN_HEADER, rows.iter().map(ScanRow::csv_line))?;
            let result = if cfg.verbose {
                json!({ "rows": rows, "reports": reports })
            } else {
                json!({ "rows": rows })
            };
            Ok(Outcome {
                status: Status::Ok,
                artifact: artifact(cfg, result)?,
                csv: Some(csv),
            })
        }
        Command::Classify { family, complement } => {
            let fam = load_family(family)?;
            let grain = grain_at_most(fam.grain().n(), g.exhaustive, "classify")?;
            let fam = if *complement {
                RectFamily::full(grain)?.difference(&fam)?
            } else {
                fam
            };
            ok(json!({ "members": fam.len(), "class": classify_family(&fam)? }))
        }
    }
}

fn capacity(cfg: &RunConfig, n: u32, target: &CapacityTarget) -> Result<Outcome> {
    let opts = QpOptions {
        tol: cfg.tol.max(1e-12),
        ..QpOptions::default()
    };
    let result = match target {
        CapacityTarget::Interval { level, index } => {
            let i = DyadicInterval::new(*level, *index)?;
            json!({ "capacity": TreeOutcome::from(tree_capacity(i, n, &opts)?) })
        }
        other => {
            let grain = grain_at_most(n, cfg.guards.spectral, "capacity")?;
            let (target, estimate) = match other {
                CapacityTarget::Cell { ix, iy } => {
                    let r = grain.cell_rect(CellId::new(*ix, *iy));
                    grain.check(&r)?;
                    (Target::Rect(r), Some(capacity_estimate(&r)))
                }
                CapacityTarget::Rect(r) => (Target::Rect(*r), Some(capacity_estimate(r))),
                CapacityTarget::Region(p) => {
                    let fam = load_family(p)?;
                    grain.check_same(fam.grain())?;
                    (Target::Cells(fam.region_cells()?), None)
                }
                CapacityTarget::Interval { .. } => unreachable!("handled above"),
            };
            let res = bitree_capacity(&target, grain, &opts)?;
            json!({ "capacity": res, "estimate": estimate })
        }
    };
    Ok(Outcome {
        status: Status::Ok,
        artifact: artifact(cfg, result)?,
        csv: None,
    })
}

#[derive(Serialize)]
struct TreeOutcome {
    value: f64,
    lower_bound: f64,
    kkt_residual: f64,
    iterations: usize,
    optimizer: Vec<(DyadicInterval, f64)>,
}

impl From<crate::capacity::CapacityResult<crate::capacity::TreeFunction>> for TreeOutcome {
    fn from(r: crate::capacity::CapacityResult<crate::capacity::TreeFunction>) -> Self {
        TreeOutcome {
            value: r.value,
            lower_bound: r.lower_bound,
            kkt_residual: r.kkt_residual,
            iterations: r.iterations,
            optimizer: r.optimizer.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_rows_and_csv() {
        let mut cfg = RunConfig::new(Command::Scan {
            n_list: vec![16, 64, 256],
            exhaustive: false,
        });
        cfg.csv = Some("scan.csv".into());
        let out = execute(&cfg).unwrap();
        let csv = out.csv.unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# bitree "));
        assert_eq!(lines[1], SCAN_HEADER);
        assert_eq!(lines.len(), 5);
        let ratios: Vec<f64> = lines[2..]
            .iter()
            .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(out.artifact["version"], VERSION);
        assert_eq!(out.artifact["config"]["command"]["command"], "scan");
    }

    #[test]
    fn scan_guard() {
        let cfg = RunConfig::new(Command::Scan {
            n_list: vec![4, 9],
            exhaustive: true,
        });
        let e = execute(&cfg).unwrap_err();
        assert_eq!(exit_code(&e), exit::GUARD);
    }

    #[test]
    fn corner_capacity_run() {
        let cfg = RunConfig::new(Command::Capacity {
            n: 4,
            target: CapacityTarget::Cell { ix: 0, iy: 0 },
        });
        let out = execute(&cfg).unwrap();
        let v = out.artifact["result"]["capacity"]["value"].as_f64().unwrap();
        assert!((v - 1.0 / 25.0).abs() < 1e-8);
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = RunConfig::new(Command::Check {
            kind: CheckKind::Carleson,
            measure: "m.json".into(),
            alpha: "a.json".into(),
            family: Some("f.json".into()),
        });
        cfg.seed = 9;
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&s).unwrap(), cfg);
    }
}
