//! Random instance generators and independent dense oracles shared by the
//! integration tests.
#![allow(dead_code)]

use bitree_core::tree::{TreeMeasure, TreeWeights};
use bitree_core::{rat, CellId, DyadicInterval, DyadicRect, Grain, Measure, RectFamily, Rational, WeightFamily};
use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use rand::Rng;

pub fn grain(n: u32) -> Grain {
    Grain::new(n).unwrap()
}

/// Sparse measure with masses `p/q`, `p ∈ 1..=9`, `q ∈ 1..=4`; never zero.
pub fn random_measure(rng: &mut impl Rng, g: Grain, density: f64) -> Measure {
    loop {
        let mut cells = Vec::new();
        for c in g.cells() {
            if rng.random_bool(density) {
                cells.push((c, rat(rng.random_range(1..=9), rng.random_range(1..=4))));
            }
        }
        if !cells.is_empty() {
            return Measure::from_masses(g, cells).unwrap();
        }
    }
}

pub fn random_rect(rng: &mut impl Rng, g: Grain) -> DyadicRect {
    let hl = rng.random_range(0..=g.n());
    let vl = rng.random_range(0..=g.n());
    DyadicRect::from_parts(hl, rng.random_range(0..1u64 << hl), vl, rng.random_range(0..1u64 << vl)).unwrap()
}

/// Weights from `{0, 1/4, 1/2, 1, 2}` (positive only when asked) on random
/// rectangles over a random default.
pub fn random_alpha(rng: &mut impl Rng, g: Grain, positive: bool) -> WeightFamily {
    let pick = |rng: &mut dyn rand::RngCore| {
        let choices = [rat(0, 1), rat(1, 4), rat(1, 2), rat(1, 1), rat(2, 1)];
        let lo = if positive { 1 } else { 0 };
        choices[rng.random_range(lo..choices.len())].clone()
    };
    let mut a = WeightFamily::constant(g, pick(rng)).unwrap();
    let k = rng.random_range(0..=8);
    for _ in 0..k {
        let r = random_rect(rng, g);
        a.set(r, pick(rng)).unwrap();
    }
    a
}

pub fn random_family(rng: &mut impl Rng, g: Grain, max_len: usize) -> RectFamily {
    let k = rng.random_range(1..=max_len);
    RectFamily::from_rects(g, (0..k).map(|_| random_rect(rng, g))).unwrap()
}

pub fn random_tree(rng: &mut impl Rng, depth: u32) -> (TreeMeasure, TreeWeights) {
    let mut leaves = Vec::new();
    while leaves.is_empty() {
        for l in 0..1u64 << depth {
            if rng.random_bool(0.5) {
                leaves.push((l, rat(rng.random_range(1..=9), rng.random_range(1..=4))));
            }
        }
    }
    let mu = TreeMeasure::new(depth, leaves).unwrap();
    let mut alpha = TreeWeights::constant(depth, rat(rng.random_range(1..=4), 2)).unwrap();
    for _ in 0..rng.random_range(0..=6) {
        let level = rng.random_range(0..=depth);
        let i = DyadicInterval::new(level, rng.random_range(0..1u64 << level)).unwrap();
        alpha.set(i, rat(rng.random_range(0..=4), 2)).unwrap();
    }
    (mu, alpha)
}

pub fn f(r: &Rational) -> f64 {
    r.to_f64().unwrap()
}

/// Largest eigenvalue of the dense cell-by-cell matrix
/// `M[ω, ω'] = √μ(ω) √μ(ω') Σ_{R ⊇ ω ∪ ω'} α_R`.
pub fn dense_embedding(mu: &Measure, alpha: &WeightFamily) -> f64 {
    let g = mu.grain();
    let cells: Vec<(CellId, f64)> = mu.iter().map(|(c, m)| (c, f(m).sqrt())).collect();
    let k = cells.len();
    let rects: Vec<(DyadicRect, f64)> = g
        .all_rects()
        .map(|r| (r, f(alpha.value(&r))))
        .filter(|(_, a)| *a > 0.0)
        .collect();
    let mut m = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let s: f64 = rects
                .iter()
                .filter(|(r, _)| r.contains_cell(cells[i].0, g) && r.contains_cell(cells[j].0, g))
                .map(|(_, a)| a)
                .sum();
            m[(i, j)] = cells[i].1 * cells[j].1 * s;
        }
    }
    m.symmetric_eigen().eigenvalues.max()
}

/// Lawson–Hanson active-set NNLS: `argmin_{x ≥ 0} ‖Ex − f‖²`.
pub fn nnls(e: &DMatrix<f64>, f: &DVector<f64>) -> DVector<f64> {
    let n = e.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    for _ in 0..3 * n + 10 {
        let w = e.transpose() * (f - e * &x);
        let j = (0..n)
            .filter(|&j| !passive[j] && w[j] > 1e-12)
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(j) = j else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let ep = e.select_columns(&idx);
            let zp = ep.clone().svd(true, true).solve(f, 1e-13).unwrap();
            if zp.iter().all(|&v| v > 1e-14) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = zp[k];
                }
                break;
            }
            let mut step = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if zp[k] <= 1e-14 {
                    step = step.min(x[i] / (x[i] - zp[k]));
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += step * (zp[k] - x[i]);
                if x[i] <= 1e-14 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    x
}

/// Capacity of a cell set from NNLS on the dual: with `E = Aᵀ` (vertices by
/// target cells) and `f` the indicator of the target cells as vertices,
/// `‖Eν − f‖² = ‖Aᵀν‖² − 2Σν + const`, and `cap = ‖Eν*‖²`.
pub fn oracle_capacity(g: Grain, cells: &[CellId]) -> f64 {
    let rects: Vec<DyadicRect> = g.all_rects().collect();
    let mut e = DMatrix::<f64>::zeros(rects.len(), cells.len());
    let mut rhs = DVector::<f64>::zeros(rects.len());
    for (i, r) in rects.iter().enumerate() {
        for (j, c) in cells.iter().enumerate() {
            if r.contains_cell(*c, g) {
                e[(i, j)] = 1.0;
            }
        }
        if cells.iter().any(|c| g.cell_rect(*c) == *r) {
            rhs[i] = 1.0;
        }
    }
    let nu = nnls(&e, &rhs);
    (&e * nu).norm_squared()
}

/// Unit-grid area of `∪ [0,m]×[0,k]` over positive integers with `mk ≤ n`:
/// the unit square `[x-1,x]×[y-1,y]` is covered iff `xy ≤ n`.
pub fn u_brute(n: u64) -> u64 {
    let mut count = 0;
    for x in 1..=n {
        for y in 1..=n {
            if x * y <= n {
                count += 1;
            } else {
                break;
            }
        }
    }
    count
}
