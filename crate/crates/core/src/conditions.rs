//! Box condition, Carleson condition over unions, the extremal embedding
//! constant, their simple-tree analogues, and pruned/cut classification.
//!
//! All condition sums are exact. A rectangle with `μ(R₀) = 0` and a zero
//! numerator is skipped; a positive numerator over zero mass sets the
//! `infinite` flag of the report.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::codec::ratio_str;
use crate::error::{Error, Result};
use crate::grid::{
    inside_table, CellId, DyadicInterval, DyadicRect, Grain, Measure, RectFamily, RectTable,
    WeightFamily, MAX_EXHAUSTIVE_GRAIN, MAX_SPECTRAL_GRAIN,
};
use crate::spectral::power_iteration;
use crate::tree::{TreeMeasure, TreeWeights};
use crate::Rational;

/// Deepest simple tree for the box constant.
pub const MAX_TREE_BOX_DEPTH: u32 = 16;
/// Deepest simple tree for the spectral embedding constant.
pub const MAX_TREE_SPECTRAL_DEPTH: u32 = 12;
/// Largest grain for the exhaustive sweep over all unions.
pub const MAX_SWEEP_GRAIN: u32 = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Rect(DyadicRect),
    Family(RectFamily),
    Interval(DyadicInterval),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub rect: DyadicRect,
    #[serde(with = "ratio_str")]
    pub contribution: Rational,
}

/// Outcome of a box or Carleson evaluation.
///
/// When `infinite` is set, `constant` still holds the largest finite ratio
/// and `witness` points at a zero-mass set with a positive sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    #[serde(with = "ratio_str")]
    pub constant: Rational,
    pub witness: Option<Witness>,
    pub infinite: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<Term>>,
}

impl ConditionReport {
    pub fn with_terms(mut self, terms: Vec<Term>) -> Self {
        self.terms = Some(terms);
        self
    }

    pub fn witness_rect(&self) -> Option<DyadicRect> {
        match self.witness {
            Some(Witness::Rect(r)) => Some(r),
            _ => None,
        }
    }

    pub fn constant_f64(&self) -> f64 {
        if self.infinite {
            f64::INFINITY
        } else {
            self.constant.to_f64().unwrap_or(f64::NAN)
        }
    }
}

/// Pruned/cut classification of the sub-bi-tree spanned by a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyClass {
    pub pruned: bool,
    pub cut: bool,
    pub vacuous_cut: bool,
}

struct SupScan<K> {
    best: Option<(Rational, K)>,
    infinite: Option<K>,
}

impl<K: Clone> SupScan<K> {
    fn new() -> Self {
        SupScan {
            best: None,
            infinite: None,
        }
    }

    fn push(&mut self, key: &K, numerator: &Rational, mass: &Rational) {
        if mass.is_zero() {
            if !numerator.is_zero() && self.infinite.is_none() {
                self.infinite = Some(key.clone());
            }
            return;
        }
        let ratio = numerator / mass;
        if self.best.as_ref().is_none_or(|(b, _)| ratio > *b) {
            self.best = Some((ratio, key.clone()));
        }
    }

    fn finish(self, wrap: impl Fn(K) -> Witness) -> ConditionReport {
        let infinite = self.infinite.is_some();
        let (constant, best) = match self.best {
            Some((c, k)) => (c, Some(k)),
            None => (Rational::zero(), None),
        };
        ConditionReport {
            constant,
            witness: self.infinite.or(best).map(wrap),
            infinite,
            terms: None,
        }
    }
}

/// Per-rectangle masses, the terms `μ(R)² α_R`, and their sums over
/// sub-rectangles.
pub(crate) struct BoxTables {
    pub masses: RectTable<Rational>,
    pub terms: RectTable<Rational>,
    pub sums: RectTable<Rational>,
}

pub(crate) fn box_tables(mu: &Measure, alpha: &WeightFamily) -> Result<BoxTables> {
    mu.grain().check_same(alpha.grain())?;
    mu.grain()
        .require_at_most("box constant", MAX_EXHAUSTIVE_GRAIN)?;
    let masses = mu.mass_table()?;
    let terms = masses.map(|r, m| {
        let a = alpha.value(&r);
        if m.is_zero() || a.is_zero() {
            Rational::zero()
        } else {
            m * m * a
        }
    });
    let sums = terms.clone().down_sum();
    Ok(BoxTables {
        masses,
        terms,
        sums,
    })
}

/// `sup_{R₀} Σ_{R ⊆ R₀} μ(R)² α_R / μ(R₀)` over every dyadic rectangle.
pub fn box_constant(mu: &Measure, alpha: &WeightFamily) -> Result<ConditionReport> {
    let t = box_tables(mu, alpha)?;
    let mut scan = SupScan::new();
    for ((r, m), (_, s)) in t.masses.iter().zip(t.sums.iter()) {
        scan.push(&r, s, m);
    }
    Ok(scan.finish(Witness::Rect))
}

/// The nonzero contributions `μ(R)² α_R` for `R ⊆ r0`.
pub fn box_terms(mu: &Measure, alpha: &WeightFamily, r0: &DyadicRect) -> Result<Vec<Term>> {
    mu.grain().check(r0)?;
    let t = box_tables(mu, alpha)?;
    Ok(t.terms
        .iter()
        .filter(|(r, c)| !c.is_zero() && r0.contains(r))
        .map(|(rect, c)| Term {
            rect,
            contribution: c.clone(),
        })
        .collect())
}

/// `Σ_{R ⊆ Ω} μ(R)² α_R / μ(Ω)` for `Ω` the union of `fam`. The sum runs
/// over every dyadic rectangle inside `Ω`, not only the members.
pub fn carleson_ratio(
    mu: &Measure,
    alpha: &WeightFamily,
    fam: &RectFamily,
) -> Result<ConditionReport> {
    if fam.is_empty() {
        return Err(Error::EmptyFamily);
    }
    mu.grain().check_same(fam.grain())?;
    let mask = fam.region_mask()?;
    let mut report = region_ratio(mu, alpha, &mask)?;
    report.witness = Some(Witness::Family(fam.clone()));
    Ok(report)
}

fn region_ratio(mu: &Measure, alpha: &WeightFamily, mask: &[bool]) -> Result<ConditionReport> {
    let t = box_tables(mu, alpha)?;
    let inside = inside_table(mu.grain(), mask)?;
    let numerator = t
        .terms
        .iter()
        .zip(inside.iter())
        .filter(|(_, (_, &ins))| ins)
        .fold(Rational::zero(), |acc, ((_, c), _)| acc + c);
    let mass = mu
        .iter()
        .filter(|(c, _)| mask[mu.grain().cell_index(*c)])
        .fold(Rational::zero(), |acc, (_, m)| acc + m);
    let infinite = mass.is_zero() && !numerator.is_zero();
    let constant = if mass.is_zero() {
        Rational::zero()
    } else {
        numerator / mass
    };
    Ok(ConditionReport {
        constant,
        witness: None,
        infinite,
        terms: None,
    })
}

/// Itemized terms of the Carleson sum for `fam`.
pub fn carleson_terms(mu: &Measure, alpha: &WeightFamily, fam: &RectFamily) -> Result<Vec<Term>> {
    mu.grain().check_same(fam.grain())?;
    let t = box_tables(mu, alpha)?;
    let inside = fam.inside_table()?;
    Ok(t.terms
        .iter()
        .zip(inside.iter())
        .filter(|((_, c), (_, &ins))| ins && !c.is_zero())
        .map(|((rect, c), _)| Term {
            rect,
            contribution: c.clone(),
        })
        .collect())
}

/// Worst Carleson ratio over every union of cells (every `N`-coarse region).
/// Exponential in the number of cells, so limited to `N ≤ 2`.
pub fn carleson_sweep(mu: &Measure, alpha: &WeightFamily) -> Result<ConditionReport> {
    let grain = mu.grain();
    grain.require_at_most("carleson sweep", MAX_SWEEP_GRAIN)?;
    grain.check_same(alpha.grain())?;
    let t = box_tables(mu, alpha)?;
    let ncells = (grain.side() * grain.side()) as usize;
    let cell_mass: Vec<Rational> = (0..ncells).map(|i| mu.mass(grain.cell_at(i))).collect();
    let nonzero: Vec<(DyadicRect, u64, &Rational)> = t
        .terms
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(r, c)| (r, cell_bits(grain, &r), c))
        .collect();
    let mut scan = SupScan::new();
    for set in 1u64..(1u64 << ncells) {
        let numerator = nonzero
            .iter()
            .filter(|(_, bits, _)| bits & set == *bits)
            .fold(Rational::zero(), |acc, (_, _, c)| acc + *c);
        let mass = (0..ncells)
            .filter(|i| set >> i & 1 == 1)
            .fold(Rational::zero(), |acc, i| acc + &cell_mass[i]);
        scan.push(&set, &numerator, &mass);
    }
    Ok(scan.finish(|set| {
        let cells = (0..ncells)
            .filter(|i| set >> i & 1 == 1)
            .map(|i| grain.cell_rect(grain.cell_at(i)));
        Witness::Family(RectFamily::from_rects(grain, cells).expect("cells fit the grain"))
    }))
}

fn cell_bits(grain: Grain, r: &DyadicRect) -> u64 {
    r.cells(grain)
        .fold(0u64, |acc, c| acc | 1 << grain.cell_index(c))
}

/// Estimated smallest `C` with `Σ_R α_R (∫_R φ dμ)² ≤ C ∫ φ² dμ`.
pub fn embedding_constant(mu: &Measure, alpha: &WeightFamily, tol: f64) -> Result<f64> {
    embedding_estimate(mu, alpha, tol).map(|e| e.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
}

/// Power iteration on `x ↦ √μ · H α D (√μ · x)` over the cells of positive
/// mass, where `D` sums over sub-rectangles and `H` over ancestors.
pub fn embedding_estimate(
    mu: &Measure,
    alpha: &WeightFamily,
    tol: f64,
) -> Result<SpectralEstimate> {
    let grain = mu.grain();
    grain.check_same(alpha.grain())?;
    grain.require_at_most("embedding constant", MAX_SPECTRAL_GRAIN)?;
    let support: Vec<(DyadicRect, f64)> = mu
        .iter()
        .map(|(c, m)| (grain.cell_rect(c), m.to_f64().unwrap_or(0.0).sqrt()))
        .collect();
    let weights = RectTable::from_fn(grain, |r| alpha.value(&r).to_f64().unwrap_or(0.0));
    let start = support.iter().map(|(_, s)| *s).collect();
    let r = power_iteration(
        "embedding constant",
        start,
        |x, y| {
            let mut t = RectTable::from_fn(grain, |_| 0.0f64);
            for ((cell, s), xi) in support.iter().zip(x) {
                *t.get_mut(cell) = s * xi;
            }
            let mut t = t.down_sum();
            for (w, (_, a)) in t.data_mut().iter_mut().zip(weights.iter()) {
                *w *= a;
            }
            let t = t.up_sum();
            for ((cell, s), yi) in support.iter().zip(y.iter_mut()) {
                *yi = s * t.get(cell);
            }
        },
        tol,
    )?;
    Ok(SpectralEstimate {
        value: r.value,
        iterations: r.iterations,
    })
}

/// `sup_I Σ_{J ⊆ I} μ(J)² α_J / μ(I)` on the simple tree.
pub fn tree_box_constant(mu: &TreeMeasure, alpha: &TreeWeights) -> Result<ConditionReport> {
    check_tree(mu, alpha, MAX_TREE_BOX_DEPTH)?;
    let masses = mu.mass_table();
    let first_leaf = (1usize << mu.depth()) - 1;
    let mut sums: Vec<Rational> = masses
        .iter()
        .enumerate()
        .map(|(id, m)| {
            let a = alpha.value(&DyadicInterval::from_heap_id(id));
            if m.is_zero() || a.is_zero() {
                Rational::zero()
            } else {
                m * m * a
            }
        })
        .collect();
    for i in (0..first_leaf).rev() {
        let s = &sums[2 * i + 1] + &sums[2 * i + 2];
        sums[i] += s;
    }
    let mut scan = SupScan::new();
    for (id, (m, s)) in masses.iter().zip(&sums).enumerate() {
        scan.push(&DyadicInterval::from_heap_id(id), s, m);
    }
    Ok(scan.finish(Witness::Interval))
}

/// Simple-tree analogue of [`embedding_constant`].
pub fn tree_embedding_constant(mu: &TreeMeasure, alpha: &TreeWeights, tol: f64) -> Result<f64> {
    check_tree(mu, alpha, MAX_TREE_SPECTRAL_DEPTH)?;
    let depth = mu.depth();
    let w = mu.interval_count();
    let first_leaf = (1usize << depth) - 1;
    let support: Vec<(usize, f64)> = mu
        .iter()
        .map(|(leaf, m)| (first_leaf + leaf as usize, m.to_f64().unwrap_or(0.0).sqrt()))
        .collect();
    let weights: Vec<f64> = (0..w)
        .map(|id| {
            alpha
                .value(&DyadicInterval::from_heap_id(id))
                .to_f64()
                .unwrap_or(0.0)
        })
        .collect();
    let start = support.iter().map(|(_, s)| *s).collect();
    let mut t = vec![0.0f64; w];
    let r = power_iteration(
        "tree embedding constant",
        start,
        |x, y| {
            t.fill(0.0);
            for ((id, s), xi) in support.iter().zip(x) {
                t[*id] = s * xi;
            }
            for i in (0..first_leaf).rev() {
                t[i] = t[2 * i + 1] + t[2 * i + 2];
            }
            for (ti, a) in t.iter_mut().zip(&weights) {
                *ti *= a;
            }
            for i in 1..w {
                t[i] += t[(i - 1) / 2];
            }
            for ((id, s), yi) in support.iter().zip(y.iter_mut()) {
                *yi = s * t[*id];
            }
        },
        tol,
    )?;
    Ok(r.value)
}

fn check_tree(mu: &TreeMeasure, alpha: &TreeWeights, limit: u32) -> Result<()> {
    if mu.depth() != alpha.depth() {
        return Err(Error::GrainMismatch {
            expected: mu.depth(),
            found: alpha.depth(),
        });
    }
    if mu.depth() > limit {
        return Err(Error::guard("simple tree", mu.depth(), limit));
    }
    Ok(())
}

/// Pruned: weakly connected through parent/child edges and containing every
/// cell. Cut: every non-member has only non-member parents.
pub fn classify_family(fam: &RectFamily) -> Result<FamilyClass> {
    let grain = fam.grain();
    grain.require_at_most("family classification", MAX_EXHAUSTIVE_GRAIN)?;
    let member = RectTable::from_fn(grain, |r| fam.contains(&r));
    let all_cells = grain
        .cells()
        .all(|c: CellId| *member.get(&grain.cell_rect(c)));

    let mut dsu = Dsu::new(grain.rect_count());
    let index = RectTable::from_fn(grain, {
        let mut i = 0usize;
        move |_| {
            i += 1;
            i - 1
        }
    });
    for r in fam.iter() {
        for p in r.parents() {
            if *member.get(&p) {
                dsu.union(*index.get(r), *index.get(&p));
            }
        }
    }
    let roots: std::collections::BTreeSet<usize> =
        fam.iter().map(|r| dsu.find(*index.get(r))).collect();
    let connected = roots.len() == 1;

    let mut cut = true;
    let mut complement_empty = true;
    for (r, &m) in member.iter() {
        if m {
            continue;
        }
        complement_empty = false;
        if r.parents().iter().any(|p| *member.get(p)) {
            cut = false;
            break;
        }
    }
    Ok(FamilyClass {
        pruned: connected && all_cells,
        cut,
        vacuous_cut: complement_empty,
    })
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn g(n: u32) -> Grain {
        Grain::new(n).unwrap()
    }

    /// Direct double loop over all pairs of rectangles.
    fn box_oracle(mu: &Measure, alpha: &WeightFamily) -> (Rational, DyadicRect) {
        let grain = mu.grain();
        let mut best: Option<(Rational, DyadicRect)> = None;
        for r0 in grain.all_rects() {
            let m0 = mu.rect_mass(&r0).unwrap();
            if m0.is_zero() {
                continue;
            }
            let s = grain
                .all_rects()
                .filter(|r| r0.contains(r))
                .fold(rat(0, 1), |acc, r| {
                    let m = mu.rect_mass(&r).unwrap();
                    acc + &m * &m * alpha.value(&r)
                });
            let ratio = s / m0;
            if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
                best = Some((ratio, r0));
            }
        }
        best.unwrap()
    }

    #[test]
    fn box_corner_measure() {
        let grain = g(1);
        let mu = Measure::corner(grain, rat(1, 1)).unwrap();
        let rep = box_constant(&mu, &WeightFamily::ones(grain)).unwrap();
        let (oracle, at) = box_oracle(&mu, &WeightFamily::ones(grain));
        assert_eq!(oracle, rat(4, 1));
        assert_eq!(rep.constant, oracle);
        assert_eq!(rep.witness_rect(), Some(at));
        assert_eq!(at, DyadicRect::unit());
        assert!(!rep.infinite);
    }

    #[test]
    fn box_lebesgue_and_zero_alpha() {
        let grain = g(1);
        let mu = Measure::lebesgue(grain).unwrap();
        let rep = box_constant(&mu, &WeightFamily::ones(grain)).unwrap();
        assert_eq!(box_oracle(&mu, &WeightFamily::ones(grain)).0, rat(9, 4));
        assert_eq!(rep.constant, rat(9, 4));
        assert_eq!(rep.witness_rect(), Some(DyadicRect::unit()));
        let zero = WeightFamily::constant(grain, rat(0, 1)).unwrap();
        assert_eq!(box_constant(&mu, &zero).unwrap().constant, rat(0, 1));
    }

    #[test]
    fn box_matches_oracle_on_mixed_instance() {
        let grain = g(2);
        let mu = Measure::from_masses(
            grain,
            [
                (CellId::new(0, 0), rat(1, 3)),
                (CellId::new(1, 3), rat(2, 5)),
                (CellId::new(3, 2), rat(1, 7)),
            ],
        )
        .unwrap();
        let alpha = WeightFamily::ones(grain)
            .with(DyadicRect::unit(), rat(0, 1))
            .unwrap()
            .with(DyadicRect::from_parts(1, 0, 1, 0).unwrap(), rat(5, 2))
            .unwrap();
        let rep = box_constant(&mu, &alpha).unwrap();
        let (c, w) = box_oracle(&mu, &alpha);
        assert_eq!(rep.constant, c);
        assert_eq!(rep.witness_rect(), Some(w));
    }

    #[test]
    fn zero_measure_is_vacuous() {
        // μ(R₀) = 0 forces every μ(R) with R ⊆ R₀ to vanish, so 0/0 is skipped
        let grain = g(2);
        let mu = Measure::zero(grain);
        let rep = box_constant(&mu, &WeightFamily::ones(grain)).unwrap();
        assert!(!rep.infinite);
        assert_eq!(rep.constant, rat(0, 1));
        assert!(rep.witness.is_none());
    }

    #[test]
    fn carleson_examples() {
        let grain = g(2);
        let mu = Measure::from_masses(
            grain,
            [(CellId::new(0, 1), rat(1, 2)), (CellId::new(2, 2), rat(1, 4))],
        )
        .unwrap();
        let alpha = WeightFamily::ones(grain);
        let q = RectFamily::from_rects(grain, [DyadicRect::unit()]).unwrap();
        let rep = carleson_ratio(&mu, &alpha, &q).unwrap();
        let s = box_tables(&mu, &alpha).unwrap();
        assert_eq!(rep.constant, s.sums.get(&DyadicRect::unit()) / mu.total());
        assert!(matches!(
            carleson_ratio(&mu, &alpha, &RectFamily::empty(grain)),
            Err(Error::EmptyFamily)
        ));
        let zero = Measure::zero(grain);
        let rep = carleson_ratio(&zero, &alpha, &q).unwrap();
        assert!(!rep.infinite);
        assert_eq!(rep.constant, rat(0, 1));
    }

    #[test]
    fn positive_over_zero_sets_flag() {
        let mut scan = SupScan::new();
        scan.push(&DyadicRect::unit(), &rat(1, 1), &rat(0, 1));
        scan.push(&DyadicRect::from_parts(1, 0, 0, 0).unwrap(), &rat(1, 1), &rat(1, 2));
        let rep = scan.finish(Witness::Rect);
        assert!(rep.infinite);
        assert_eq!(rep.constant, rat(2, 1));
        assert_eq!(rep.witness_rect(), Some(DyadicRect::unit()));
        assert_eq!(rep.constant_f64(), f64::INFINITY);
    }

    #[test]
    fn sweep_dominates_single_boxes() {
        let grain = g(1);
        let mu = Measure::from_masses(
            grain,
            [(CellId::new(0, 0), rat(1, 1)), (CellId::new(1, 1), rat(1, 1))],
        )
        .unwrap();
        let alpha = WeightFamily::ones(grain);
        let sweep = carleson_sweep(&mu, &alpha).unwrap();
        let bx = box_constant(&mu, &alpha).unwrap();
        assert!(sweep.constant >= bx.constant);
        assert!(carleson_sweep(&Measure::zero(g(3)), &WeightFamily::ones(g(3))).is_err());
    }

    #[test]
    fn embedding_single_cell() {
        let grain = g(0);
        let mu = Measure::corner(grain, rat(1, 1)).unwrap();
        let c = embedding_constant(&mu, &WeightFamily::ones(grain), 1e-12).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_corner_measure_is_one_dimensional() {
        for n in 0..=4 {
            let grain = g(n);
            let a = rat(3, 7);
            let mu = Measure::corner(grain, a).unwrap();
            let c = embedding_constant(&mu, &WeightFamily::ones(grain), 1e-13).unwrap();
            let expect = 3.0 / 7.0 * ((n + 1) * (n + 1)) as f64;
            assert!((c - expect).abs() < 1e-10 * expect, "n={n} {c} {expect}");
        }
    }

    #[test]
    fn tree_examples() {
        let a = rat(2, 3);
        let mu = TreeMeasure::new(1, [(0, a.clone())]).unwrap();
        let ones = TreeWeights::constant(1, rat(1, 1)).unwrap();
        let rep = tree_box_constant(&mu, &ones).unwrap();
        assert_eq!(rep.constant, rat(4, 3));
        assert_eq!(rep.witness, Some(Witness::Interval(DyadicInterval::root())));
        let e = tree_embedding_constant(&mu, &ones, 1e-13).unwrap();
        assert!((e - 4.0 / 3.0).abs() < 1e-12);

        let uniform = TreeMeasure::new(1, [(0, rat(1, 2)), (1, rat(1, 2))]).unwrap();
        assert_eq!(tree_box_constant(&uniform, &ones).unwrap().constant, rat(3, 2));

        let zero = TreeWeights::constant(3, rat(0, 1)).unwrap();
        let mu3 = TreeMeasure::new(3, [(5, rat(1, 1))]).unwrap();
        assert_eq!(tree_box_constant(&mu3, &zero).unwrap().constant, rat(0, 1));
        assert_eq!(tree_embedding_constant(&mu3, &zero, 1e-12).unwrap(), 0.0);
        assert!(tree_box_constant(&mu3, &ones).is_err());
    }

    #[test]
    fn classify_examples() {
        let grain = g(2);
        let q = RectFamily::from_rects(grain, [DyadicRect::unit()]).unwrap();
        let c = classify_family(&q).unwrap();
        assert!(!c.pruned);
        assert!(!c.cut);
        let full = RectFamily::full(grain).unwrap();
        let c = classify_family(&full).unwrap();
        assert_eq!(
            c,
            FamilyClass {
                pruned: true,
                cut: true,
                vacuous_cut: true
            }
        );
        // cells alone: contains all cells but is not connected
        let cells = RectFamily::from_rects(grain, grain.cells().map(|c| grain.cell_rect(c))).unwrap();
        let c = classify_family(&cells).unwrap();
        assert!(!c.pruned);
        assert!(c.cut);
        assert!(!c.vacuous_cut);
        let g0 = g(0);
        let c = classify_family(&RectFamily::full(g0).unwrap()).unwrap();
        assert!(c.pruned && c.cut && c.vacuous_cut);
    }
}
