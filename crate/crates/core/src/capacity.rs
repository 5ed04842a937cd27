//! Bi-tree and simple-tree capacity, the capacitary box statistic, and the
//! box-to-capacity experiment over random box-feasible measures.
//!
//! The capacity of a target cell set `E` is
//! `min Σ_γ ψ(γ)²` over `ψ ≥ 0` with `Σ_{γ' ⊇ ω} ψ(γ') ≥ 1` for every cell
//! `ω ⊆ E`. Writing `A` for the cell-by-vertex ancestor matrix, the optimum is
//! `ψ = Aᵀν` where `ν ≥ 0` minimizes `‖Aᵀν‖² − 2·Σν`. That dual problem has
//! only sign constraints, so it is solved by accelerated projected gradient
//! with the fixed step `1/L`, `L` the largest row sum of `AAᵀ`. The reported
//! optimizer is `Aᵀν` rescaled to be exactly feasible, and `lower_bound` is
//! the dual objective, so `lower_bound ≤ cap ≤ value` always holds.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::codec::{opt_ratio_str, ratio_str};
use crate::conditions::box_constant;
use crate::error::{Error, Result};
use crate::grid::{
    CellId, DyadicInterval, DyadicRect, Grain, Measure, RectTable, WeightFamily,
    MAX_EXHAUSTIVE_GRAIN,
};
use crate::Rational;

/// Largest grain for bi-tree capacity programs.
pub const MAX_CAPACITY_GRAIN: u32 = 6;
/// Deepest simple tree for capacity programs.
pub const MAX_TREE_CAPACITY_DEPTH: u32 = 14;
/// Redraws allowed when a random measure comes out empty.
const MAX_REDRAWS: usize = 64;
/// Residual checks happen every this many iterations.
const CHECK_EVERY: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpOptions {
    /// Stop once the complementarity residual is at most this.
    pub tol: f64,
    /// Largest constraint violation accepted in the returned optimizer.
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for QpOptions {
    fn default() -> Self {
        QpOptions {
            tol: 1e-8,
            feas_tol: 1e-9,
            max_iter: 100_000,
        }
    }
}

/// Nonnegative function on the vertices of the bi-tree; missing vertices
/// are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BiTreeFunction<T = f64> {
    grain: Grain,
    values: BTreeMap<DyadicRect, T>,
}

impl<T> BiTreeFunction<T> {
    pub fn new(grain: Grain) -> Self {
        BiTreeFunction {
            grain,
            values: BTreeMap::new(),
        }
    }

    pub fn from_values(
        grain: Grain,
        values: impl IntoIterator<Item = (DyadicRect, T)>,
    ) -> Result<Self> {
        let mut f = BiTreeFunction::new(grain);
        for (r, v) in values {
            f.set(r, v)?;
        }
        Ok(f)
    }

    pub fn set(&mut self, r: DyadicRect, value: T) -> Result<()> {
        self.grain.check(&r)?;
        self.values.insert(r, value);
        Ok(())
    }

    pub fn grain(&self) -> Grain {
        self.grain
    }

    pub fn get(&self, r: &DyadicRect) -> Option<&T> {
        self.values.get(r)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DyadicRect, &T)> {
        self.values.iter()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }
}

impl BiTreeFunction<f64> {
    pub fn norm_sq(&self) -> f64 {
        self.values.values().map(|v| v * v).sum()
    }

    /// `Σ_{γ' ⊇ ω} ψ(γ')` at a cell.
    pub fn potential(&self, c: CellId) -> f64 {
        let cell = self.grain.cell_rect(c);
        self.values
            .iter()
            .filter(|(r, _)| r.contains(&cell))
            .map(|(_, v)| v)
            .sum()
    }
}

impl Serialize for BiTreeFunction<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            rect: &'a DyadicRect,
            value: f64,
        }
        let values: Vec<Entry> = self
            .values
            .iter()
            .map(|(rect, &value)| Entry { rect, value })
            .collect();
        let mut st = s.serialize_struct("BiTreeFunction", 2)?;
        st.serialize_field("grain", &self.grain.n())?;
        st.serialize_field("values", &values)?;
        st.end()
    }
}

/// A target for the bi-tree capacity program.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Rect(DyadicRect),
    Cells(BTreeSet<CellId>),
}

impl Target {
    pub fn cells(&self, grain: Grain) -> Result<Vec<CellId>> {
        match self {
            Target::Rect(r) => {
                grain.check(r)?;
                Ok(r.cells(grain).collect())
            }
            Target::Cells(cs) => {
                for c in cs {
                    grain.check_cell(*c)?;
                }
                Ok(cs.iter().copied().collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult<F = BiTreeFunction> {
    /// `Σ ψ²` of the returned feasible optimizer.
    pub value: f64,
    /// Dual objective; the capacity lies in `[lower_bound, value]`.
    pub lower_bound: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub optimizer: F,
}

/// Optimizer of a simple-tree program, keyed by interval.
pub type TreeFunction = BTreeMap<DyadicInterval, f64>;

struct DualSolution {
    nu: Vec<f64>,
    residual: f64,
    iterations: usize,
    converged: bool,
}

/// Accelerated projected gradient on `min ‖Aᵀν‖² − 2·Σν`, `ν ≥ 0`, with
/// adaptive restart. `gram` applies `AAᵀ`.
fn solve_dual(m: usize, mut gram: impl FnMut(&[f64], &mut [f64]), opts: &QpOptions) -> DualSolution {
    let mut g = vec![0.0; m];
    gram(&vec![1.0; m], &mut g);
    let lipschitz = g.iter().cloned().fold(0.0, f64::max);
    let mut nu = vec![0.0; m];
    let mut y = nu.clone();
    let mut next = nu.clone();
    let mut t = 1.0f64;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        gram(&y, &mut g);
        for i in 0..m {
            next[i] = (y[i] - (g[i] - 1.0) / lipschitz).max(0.0);
        }
        let restart: f64 = (0..m).map(|i| (y[i] - next[i]) * (next[i] - nu[i])).sum();
        if restart > 0.0 {
            t = 1.0;
            y.copy_from_slice(&next);
        } else {
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let beta = (t - 1.0) / t_next;
            for i in 0..m {
                y[i] = next[i] + beta * (next[i] - nu[i]);
            }
            t = t_next;
        }
        std::mem::swap(&mut nu, &mut next);
        if it == 1 || it % CHECK_EVERY == 0 {
            gram(&nu, &mut g);
            residual = (0..m)
                .map(|i| nu[i].min(g[i] - 1.0).abs())
                .fold(0.0, f64::max);
            if residual <= opts.tol {
                return DualSolution {
                    nu,
                    residual,
                    iterations: it,
                    converged: true,
                };
            }
        }
    }
    DualSolution {
        nu,
        residual,
        iterations: opts.max_iter,
        converged: false,
    }
}

fn check_options(opts: &QpOptions) -> Result<()> {
    if !(opts.tol > 0.0) || !(opts.feas_tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidParameter(format!(
            "capacity options need positive tolerances and iterations, got {opts:?}"
        )));
    }
    Ok(())
}

/// Bi-tree capacity of a rectangle or cell set.
pub fn bitree_capacity(target: &Target, grain: Grain, opts: &QpOptions) -> Result<CapacityResult> {
    check_options(opts)?;
    grain.require_at_most("bi-tree capacity", MAX_CAPACITY_GRAIN)?;
    let cells: Vec<DyadicRect> = target
        .cells(grain)?
        .into_iter()
        .map(|c| grain.cell_rect(c))
        .collect();
    if cells.is_empty() {
        return Err(Error::InvalidParameter("capacity target has no cells".into()));
    }
    let mut t = RectTable::from_fn(grain, |_| 0.0f64);
    let sol = solve_dual(
        cells.len(),
        |x, y| {
            t.data_mut().fill(0.0);
            for (c, xi) in cells.iter().zip(x) {
                *t.get_mut(c) = *xi;
            }
            t.down_sum_in_place();
            t.up_sum_in_place();
            for (c, yi) in cells.iter().zip(y.iter_mut()) {
                *yi = *t.get(c);
            }
        },
        opts,
    );

    t.data_mut().fill(0.0);
    for (c, xi) in cells.iter().zip(&sol.nu) {
        *t.get_mut(c) = *xi;
    }
    t.down_sum_in_place();
    let psi = t.clone();
    t.up_sum_in_place();
    let scale = cells.iter().map(|c| *t.get(c)).fold(f64::INFINITY, f64::min);
    let norm_sq: f64 = psi.iter().map(|(_, v)| v * v).sum();
    let lower_bound = (2.0 * sol.nu.iter().sum::<f64>() - norm_sq).max(0.0);
    let optimizer = BiTreeFunction::from_values(
        grain,
        psi.iter()
            .filter(|(_, v)| **v > 0.0)
            .map(|(r, v)| (r, v / scale)),
    )?;
    let value = norm_sq / (scale * scale);
    finish(sol, value, lower_bound, optimizer, "bi-tree capacity").inspect(|res| {
        if cells.len() == 1 {
            let closed = 1.0 / ((grain.n() + 1) as f64).powi(2);
            if (res.value - closed).abs() > 1e-8 {
                log::warn!("single-cell capacity {} differs from 1/(N+1)^2 = {closed}", res.value);
            }
        }
    })
}

fn finish<F>(
    sol: DualSolution,
    value: f64,
    lower_bound: f64,
    optimizer: F,
    what: &'static str,
) -> Result<CapacityResult<F>> {
    if !sol.converged {
        return Err(Error::NonConvergence {
            what,
            iterations: sol.iterations,
            best: value,
        });
    }
    Ok(CapacityResult {
        value,
        lower_bound,
        kkt_residual: sol.residual,
        iterations: sol.iterations,
        optimizer,
    })
}

/// Capacity of an interval in the simple tree of the given depth: the
/// constraints are the leaves below the interval.
pub fn tree_capacity(
    interval: DyadicInterval,
    depth: u32,
    opts: &QpOptions,
) -> Result<CapacityResult<TreeFunction>> {
    check_options(opts)?;
    if depth > MAX_TREE_CAPACITY_DEPTH {
        return Err(Error::guard("tree capacity", depth, MAX_TREE_CAPACITY_DEPTH));
    }
    if interval.level > depth {
        return Err(Error::OutOfGrain(format!(
            "interval at level {} in a tree of depth {depth}",
            interval.level
        )));
    }
    let w = (1usize << (depth + 1)) - 1;
    let first_leaf = (1usize << depth) - 1;
    let shift = depth - interval.level;
    let leaves: Vec<usize> = (0..1u64 << shift)
        .map(|j| first_leaf + ((interval.index << shift) + j) as usize)
        .collect();
    let transpose = |x: &[f64], t: &mut Vec<f64>| {
        t.iter_mut().for_each(|v| *v = 0.0);
        for (&l, xi) in leaves.iter().zip(x) {
            t[l] = *xi;
        }
        for i in (0..first_leaf).rev() {
            t[i] = t[2 * i + 1] + t[2 * i + 2];
        }
    };
    let potential = |t: &mut Vec<f64>| {
        for i in 1..w {
            t[i] += t[(i - 1) / 2];
        }
    };
    let mut t = vec![0.0f64; w];
    let sol = solve_dual(
        leaves.len(),
        |x, y| {
            transpose(x, &mut t);
            potential(&mut t);
            for (&l, yi) in leaves.iter().zip(y.iter_mut()) {
                *yi = t[l];
            }
        },
        opts,
    );
    transpose(&sol.nu, &mut t);
    let psi = t.clone();
    potential(&mut t);
    let scale = leaves.iter().map(|&l| t[l]).fold(f64::INFINITY, f64::min);
    let norm_sq: f64 = psi.iter().map(|v| v * v).sum();
    let lower_bound = (2.0 * sol.nu.iter().sum::<f64>() - norm_sq).max(0.0);
    let optimizer = psi
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(id, v)| (DyadicInterval::from_heap_id(id), v / scale))
        .collect();
    finish(sol, norm_sq / (scale * scale), lower_bound, optimizer, "tree capacity")
}

/// The closed-form estimate `1/(log₂(1/|H|)·log₂(1/|V|))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityEstimate {
    Finite(#[serde(with = "ratio_str")] Rational),
    /// A side has full length, so a logarithm vanishes.
    Infinite,
}

pub fn capacity_estimate(r: &DyadicRect) -> CapacityEstimate {
    let (h, v) = (r.h.level, r.v.level);
    if h == 0 || v == 0 {
        CapacityEstimate::Infinite
    } else {
        CapacityEstimate::Finite(Rational::new(1.into(), (u64::from(h) * u64::from(v)).into()))
    }
}

/// `μ(Q_{m,k})` for all hooked parameters, indexed `[m][k]`.
pub fn hooked_masses(mu: &Measure) -> Vec<Vec<Rational>> {
    let n = mu.grain().n() as usize;
    let mut t = vec![vec![Rational::zero(); n + 1]; n + 1];
    for (c, m) in mu.iter() {
        // smallest hooked parameter whose side covers the cell
        let mx = (u64::BITS - c.ix.leading_zeros()) as usize;
        let my = (u64::BITS - c.iy.leading_zeros()) as usize;
        t[mx][my] += m;
    }
    for m in 0..=n {
        for k in 0..=n {
            let mut acc = t[m][k].clone();
            if m > 0 {
                acc += &t[m - 1][k];
            }
            if k > 0 {
                acc += &t[m][k - 1];
            }
            if m > 0 && k > 0 {
                acc -= &t[m - 1][k - 1];
            }
            t[m][k] = acc;
        }
    }
    t
}

/// Worst hooked ratio `μ(R)·(j_h+1)(j_v+1)`, `(j_h, j_v)` the levels of `R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacitaryReport {
    #[serde(with = "ratio_str")]
    pub ratio: Rational,
    pub witness: Option<DyadicRect>,
}

pub fn capacitary_box_report(mu: &Measure) -> Result<CapacitaryReport> {
    let grain = mu.grain();
    grain.require_at_most("capacitary box report", MAX_EXHAUSTIVE_GRAIN)?;
    Ok(capacitary_from_masses(grain, &hooked_masses(mu)))
}

fn capacitary_from_masses(grain: Grain, masses: &[Vec<Rational>]) -> CapacitaryReport {
    let n = grain.n();
    let mut best = CapacitaryReport {
        ratio: Rational::zero(),
        witness: None,
    };
    for m in 0..=n {
        for k in 0..=n {
            let mass = &masses[m as usize][k as usize];
            if mass.is_zero() {
                continue;
            }
            let count = u64::from(n - m + 1) * u64::from(n - k + 1);
            let ratio = mass * Rational::from_integer(count.into());
            if best.witness.is_none() || ratio > best.ratio {
                best = CapacitaryReport {
                    ratio,
                    witness: Some(grain.hooked(m, k).expect("parameters within grain")),
                };
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursionReport {
    pub passes: bool,
    /// Smallest `μ(Q_{m,k}) − Σ_{(m',k') ≤ (m,k)} μ(Q_{m',k'})²` over boxes of
    /// positive mass; `None` when there are none (the slack is infinite).
    #[serde(with = "opt_ratio_str")]
    pub min_slack: Option<Rational>,
    pub witness: Option<DyadicRect>,
}

/// The box inequality restricted to hooked sub-rectangles, for a measure
/// with box constant at most one.
pub fn recursion_check(mu: &Measure) -> Result<RecursionReport> {
    let grain = mu.grain();
    let c = box_constant(mu, &WeightFamily::ones(grain))?;
    if c.infinite || c.constant > Rational::one() {
        return Err(Error::Precondition(format!(
            "recursion check needs box constant at most 1, got {}",
            c.constant
        )));
    }
    Ok(recursion_from_masses(grain, &hooked_masses(mu)))
}

fn recursion_from_masses(grain: Grain, masses: &[Vec<Rational>]) -> RecursionReport {
    let n = grain.n() as usize;
    let mut squares = vec![vec![Rational::zero(); n + 1]; n + 1];
    let mut out = RecursionReport {
        passes: true,
        min_slack: None,
        witness: None,
    };
    for m in 0..=n {
        for k in 0..=n {
            let mass = &masses[m][k];
            let mut acc = mass * mass;
            if m > 0 {
                acc += &squares[m - 1][k];
            }
            if k > 0 {
                acc += &squares[m][k - 1];
            }
            if m > 0 && k > 0 {
                acc -= &squares[m - 1][k - 1];
            }
            if !mass.is_zero() {
                let slack = mass - &acc;
                if out.min_slack.as_ref().is_none_or(|s| slack < *s) {
                    out.passes = slack >= Rational::zero();
                    out.witness = Some(grain.hooked(m as u32, k as u32).expect("within grain"));
                    out.min_slack = Some(slack);
                }
            }
            squares[m][k] = acc;
        }
    }
    out
}

/// Random sparse measure rescaled so that its box constant (with `α ≡ 1`) is
/// exactly one. Each cell is occupied with probability `sparsity` and gets an
/// integer mass in `1..=16` before rescaling.
pub fn box_feasible_sample(grain: Grain, seed: u64, sparsity: f64) -> Result<Measure> {
    if !(sparsity > 0.0 && sparsity <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sparsity must lie in (0, 1], got {sparsity}"
        )));
    }
    grain.require_at_most("box-feasible sample", MAX_EXHAUSTIVE_GRAIN)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let mut masses = Vec::new();
        for c in grain.cells() {
            if rng.random_bool(sparsity) {
                let m: i64 = rng.random_range(1..=16);
                masses.push((c, Rational::from_integer(m.into())));
            }
        }
        if masses.is_empty() {
            continue;
        }
        let mu = Measure::from_masses(grain, masses)?;
        let c = box_constant(&mu, &WeightFamily::ones(grain))?.constant;
        return mu.scaled(&c.recip());
    }
    Err(Error::Precondition(format!(
        "{MAX_REDRAWS} consecutive empty draws at sparsity {sparsity}"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grain: u32,
    pub samples: usize,
    pub seed: u64,
    pub sparsity: f64,
    /// Statistics above this are reported as findings.
    pub threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grain: 6,
            samples: 500,
            seed: 0,
            sparsity: 0.25,
            threshold: 16.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub seed: u64,
    pub sample: usize,
    #[serde(with = "ratio_str")]
    pub statistic: Rational,
    pub witness: Option<DyadicRect>,
    pub recursion: RecursionReport,
}

impl SampleRow {
    pub fn statistic_f64(&self) -> f64 {
        self.statistic.to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub min: f64,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub argmax: usize,
    pub recursion_failures: usize,
    /// Samples whose statistic exceeds the threshold.
    pub findings: Vec<usize>,
    /// Least-squares slope `p` of `log max_s μ_s(Q) ≈ −p·log((j_h+1)(j_v+1))`
    /// over hooked boxes with positive worst-case mass.
    pub decay_exponent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<SampleRow>,
    pub summary: ExperimentSummary,
}

/// Draws box-feasible measures and records, for each, the capacitary
/// statistic `max μ(Q_{m,k})·(j_h+1)(j_v+1)` and the hooked recursion check.
/// Sample `i` uses seed `seed + i` (wrapping).
pub fn box_to_capacity_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let grain = Grain::new(cfg.grain)?;
    grain.require_at_most("box-to-capacity experiment", MAX_EXHAUSTIVE_GRAIN)?;
    if cfg.samples == 0 {
        return Err(Error::InvalidParameter("experiment needs at least one sample".into()));
    }
    let n = cfg.grain as usize;
    let results: Vec<(SampleRow, Vec<Vec<Rational>>)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i as u64);
            let mu = box_feasible_sample(grain, seed, cfg.sparsity)?;
            let masses = hooked_masses(&mu);
            let cap = capacitary_from_masses(grain, &masses);
            let row = SampleRow {
                seed,
                sample: i,
                statistic: cap.ratio,
                witness: cap.witness,
                recursion: recursion_from_masses(grain, &masses),
            };
            Ok((row, masses))
        })
        .collect::<Result<_>>()?;

    let mut worst = vec![vec![Rational::zero(); n + 1]; n + 1];
    for (_, masses) in &results {
        for m in 0..=n {
            for k in 0..=n {
                if masses[m][k] > worst[m][k] {
                    worst[m][k] = masses[m][k].clone();
                }
            }
        }
    }
    let rows: Vec<SampleRow> = results.into_iter().map(|(r, _)| r).collect();
    let summary = summarize(&rows, cfg.threshold, &worst, n);
    Ok(ExperimentReport {
        config: cfg.clone(),
        rows,
        summary,
    })
}

fn summarize(rows: &[SampleRow], threshold: f64, worst: &[Vec<Rational>], n: usize) -> ExperimentSummary {
    let stats: Vec<f64> = rows.iter().map(SampleRow::statistic_f64).collect();
    let mut sorted = stats.clone();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    let median = if len % 2 == 1 {
        sorted[len / 2]
    } else {
        (sorted[len / 2 - 1] + sorted[len / 2]) / 2.0
    };
    let argmax = rows
        .iter()
        .max_by(|a, b| a.statistic.cmp(&b.statistic).then(b.sample.cmp(&a.sample)))
        .map(|r| r.sample)
        .unwrap_or(0);
    let points: Vec<(f64, f64)> = (0..=n)
        .flat_map(|m| (0..=n).map(move |k| (m, k)))
        .filter(|&(m, k)| !worst[m][k].is_zero() && (m, k) != (n, n))
        .map(|(m, k)| {
            let count = ((n - m + 1) * (n - k + 1)) as f64;
            (count.ln(), worst[m][k].to_f64().unwrap_or(f64::NAN).ln())
        })
        .collect();
    ExperimentSummary {
        min: sorted[0],
        mean: stats.iter().sum::<f64>() / len as f64,
        median,
        max: sorted[len - 1],
        argmax,
        recursion_failures: rows.iter().filter(|r| !r.recursion.passes).count(),
        findings: rows
            .iter()
            .filter(|r| r.statistic_f64() > threshold)
            .map(|r| r.sample)
            .collect(),
        decay_exponent: slope(&points).map(|s| -s),
    }
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
