//! Dyadic geometry of the unit square at a fixed grain.
//!
//! Intervals are half-open, `[i 2^-j, (i+1) 2^-j)`, so the cells of a grain
//! partition the square. Rectangles are stored as a pair of intervals and are
//! never materialized as cell sets unless an operation explicitly asks for
//! cells. Dense per-rectangle tables ([`RectTable`]) index intervals in heap
//! order, which makes the two tree sweeps (sum over sub-rectangles, sum over
//! ancestors) simple index loops.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::AddAssign;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::codec::{FamilyRepr, MeasureRepr, RectRepr, WeightsRepr};
use crate::error::{Error, Result};
use crate::Rational;

/// Largest grain for which operations enumerate cells.
pub const MAX_CELL_GRAIN: u32 = 12;
/// Largest grain for which operations enumerate every dyadic rectangle.
pub const MAX_EXHAUSTIVE_GRAIN: u32 = 8;
/// Largest grain for the dense spectral problems.
pub const MAX_SPECTRAL_GRAIN: u32 = 6;
/// Hard ceiling on the grid depth; cell indices must fit in a `u64`.
pub const MAX_GRAIN: u32 = 30;

/// Depth `N` of the dyadic grid; cells have side `2^-N`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grain(u32);

impl Grain {
    pub fn new(n: u32) -> Result<Self> {
        if n > MAX_GRAIN {
            return Err(Error::guard("grain", n, MAX_GRAIN));
        }
        Ok(Grain(n))
    }

    pub fn n(self) -> u32 {
        self.0
    }

    /// Number of cells along one axis.
    pub fn side(self) -> u64 {
        1u64 << self.0
    }

    /// Number of dyadic intervals of length at least `2^-N`.
    pub fn interval_count(self) -> usize {
        (1usize << (self.0 + 1)) - 1
    }

    pub fn rect_count(self) -> usize {
        self.interval_count() * self.interval_count()
    }

    pub fn root(self) -> DyadicRect {
        DyadicRect::unit()
    }

    pub fn fits(self, r: &DyadicRect) -> bool {
        r.h.level <= self.0 && r.v.level <= self.0
    }

    pub fn check(self, r: &DyadicRect) -> Result<()> {
        if self.fits(r) {
            Ok(())
        } else {
            Err(Error::OutOfGrain(r.to_string()))
        }
    }

    pub fn check_same(self, other: Grain) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GrainMismatch {
                expected: self.0,
                found: other.0,
            })
        }
    }

    pub(crate) fn require_at_most(self, what: &'static str, limit: u32) -> Result<()> {
        if self.0 > limit {
            Err(Error::guard(what, self.0, limit))
        } else {
            Ok(())
        }
    }

    /// Inclusion test with both rectangles checked against the grain.
    pub fn contains(self, outer: &DyadicRect, inner: &DyadicRect) -> Result<bool> {
        self.check(outer)?;
        self.check(inner)?;
        Ok(outer.contains(inner))
    }

    /// `(m, k)` with sides `2^(-N+m)`, `2^(-N+k)` when `r` sits at the origin.
    pub fn hooked_params(self, r: &DyadicRect) -> Option<(u32, u32)> {
        if !self.fits(r) || r.h.index != 0 || r.v.index != 0 {
            return None;
        }
        Some((self.0 - r.h.level, self.0 - r.v.level))
    }

    /// The hooked rectangle `[0, 2^(-N+m)) x [0, 2^(-N+k))`.
    pub fn hooked(self, m: u32, k: u32) -> Result<DyadicRect> {
        if m > self.0 || k > self.0 {
            return Err(Error::InvalidParameter(format!(
                "hooked parameters ({m},{k}) exceed N={}",
                self.0
            )));
        }
        Ok(DyadicRect::new(
            DyadicInterval::new(self.0 - m, 0)?,
            DyadicInterval::new(self.0 - k, 0)?,
        ))
    }

    /// Number of hooked rectangles inside the hooked rectangle `(m, k)`.
    pub fn hooked_within(self, m: u32, k: u32) -> Result<u64> {
        if m > self.0 || k > self.0 {
            return Err(Error::InvalidParameter(format!(
                "hooked parameters ({m},{k}) exceed N={}",
                self.0
            )));
        }
        Ok((m as u64 + 1) * (k as u64 + 1))
    }

    pub fn cell_rect(self, c: CellId) -> DyadicRect {
        DyadicRect::new(
            DyadicInterval {
                level: self.0,
                index: c.ix,
            },
            DyadicInterval {
                level: self.0,
                index: c.iy,
            },
        )
    }

    pub(crate) fn check_cell(self, c: CellId) -> Result<()> {
        if c.ix < self.side() && c.iy < self.side() {
            Ok(())
        } else {
            Err(Error::OutOfGrain(format!("cell ({},{})", c.ix, c.iy)))
        }
    }

    /// Dense index of a cell, row-major in `ix`.
    pub(crate) fn cell_index(self, c: CellId) -> usize {
        (c.ix * self.side() + c.iy) as usize
    }

    pub(crate) fn cell_at(self, idx: usize) -> CellId {
        let side = self.side();
        CellId {
            ix: idx as u64 / side,
            iy: idx as u64 % side,
        }
    }

    /// Every dyadic rectangle of the grain, in table order.
    pub fn all_rects(self) -> impl Iterator<Item = DyadicRect> {
        let w = self.interval_count();
        (0..w).flat_map(move |h| {
            (0..w).map(move |v| {
                DyadicRect::new(DyadicInterval::from_heap_id(h), DyadicInterval::from_heap_id(v))
            })
        })
    }

    pub fn cells(self) -> impl Iterator<Item = CellId> {
        let side = self.side();
        (0..side).flat_map(move |ix| (0..side).map(move |iy| CellId { ix, iy }))
    }
}

/// `[index 2^-level, (index+1) 2^-level)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DyadicInterval {
    pub level: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, index: u64) -> Result<Self> {
        if level > MAX_GRAIN || index >= (1u64 << level) {
            return Err(Error::InvalidParameter(format!(
                "interval index {index} out of range at level {level}"
            )));
        }
        Ok(DyadicInterval { level, index })
    }

    pub fn root() -> Self {
        DyadicInterval { level: 0, index: 0 }
    }

    pub fn contains(&self, other: &DyadicInterval) -> bool {
        other.level >= self.level && (other.index >> (other.level - self.level)) == self.index
    }

    pub fn parent(&self) -> Option<DyadicInterval> {
        (self.level > 0).then(|| DyadicInterval {
            level: self.level - 1,
            index: self.index >> 1,
        })
    }

    pub fn children(&self) -> [DyadicInterval; 2] {
        let level = self.level + 1;
        [
            DyadicInterval {
                level,
                index: self.index << 1,
            },
            DyadicInterval {
                level,
                index: (self.index << 1) | 1,
            },
        ]
    }

    /// All intervals containing this one, root first.
    pub fn ancestors(&self) -> impl Iterator<Item = DyadicInterval> + '_ {
        (0..=self.level).map(move |l| DyadicInterval {
            level: l,
            index: self.index >> (self.level - l),
        })
    }

    pub fn length(&self) -> Rational {
        Rational::new(1.into(), num_bigint::BigInt::one() << self.level)
    }

    pub fn heap_id(&self) -> usize {
        (1usize << self.level) - 1 + self.index as usize
    }

    pub fn from_heap_id(id: usize) -> Self {
        let level = (usize::BITS - 1 - (id + 1).leading_zeros()) as u32;
        DyadicInterval {
            level,
            index: (id + 1 - (1usize << level)) as u64,
        }
    }
}

/// A dyadic sub-rectangle `h x v` of the unit square.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RectRepr", into = "RectRepr")]
pub struct DyadicRect {
    pub h: DyadicInterval,
    pub v: DyadicInterval,
}

impl DyadicRect {
    pub fn new(h: DyadicInterval, v: DyadicInterval) -> Self {
        DyadicRect { h, v }
    }

    /// Convenience constructor from `(level, index)` pairs.
    pub fn from_parts(hl: u32, hi: u64, vl: u32, vi: u64) -> Result<Self> {
        Ok(DyadicRect::new(
            DyadicInterval::new(hl, hi)?,
            DyadicInterval::new(vl, vi)?,
        ))
    }

    /// The unit square `Q`.
    pub fn unit() -> Self {
        DyadicRect::new(DyadicInterval::root(), DyadicInterval::root())
    }

    pub fn contains(&self, inner: &DyadicRect) -> bool {
        self.h.contains(&inner.h) && self.v.contains(&inner.v)
    }

    pub fn contains_cell(&self, c: CellId, grain: Grain) -> bool {
        self.contains(&grain.cell_rect(c))
    }

    /// Rectangles obtained by doubling one side; a rectangle may have two.
    pub fn parents(&self) -> Vec<DyadicRect> {
        let mut out = Vec::with_capacity(2);
        if let Some(h) = self.h.parent() {
            out.push(DyadicRect::new(h, self.v));
        }
        if let Some(v) = self.v.parent() {
            out.push(DyadicRect::new(self.h, v));
        }
        out
    }

    /// Halves of this rectangle that still fit in the grain.
    pub fn children(&self, grain: Grain) -> Vec<DyadicRect> {
        let mut out = Vec::with_capacity(4);
        if self.h.level < grain.n() {
            out.extend(self.h.children().map(|h| DyadicRect::new(h, self.v)));
        }
        if self.v.level < grain.n() {
            out.extend(self.v.children().map(|v| DyadicRect::new(self.h, v)));
        }
        out
    }

    /// All rectangles containing this one, itself included.
    pub fn ancestors(&self) -> Vec<DyadicRect> {
        let vs: Vec<_> = self.v.ancestors().collect();
        self.h
            .ancestors()
            .flat_map(|h| vs.iter().map(move |&v| DyadicRect::new(h, v)))
            .collect()
    }

    pub fn area(&self) -> Rational {
        self.h.length() * self.v.length()
    }

    /// Cells of this rectangle, lazily.
    pub fn cells(&self, grain: Grain) -> impl Iterator<Item = CellId> {
        let n = grain.n();
        let (hs, vs) = (n - self.h.level, n - self.v.level);
        let (x0, y0) = (self.h.index << hs, self.v.index << vs);
        let (nx, ny) = (1u64 << hs, 1u64 << vs);
        (0..nx).flat_map(move |dx| {
            (0..ny).map(move |dy| CellId {
                ix: x0 + dx,
                iy: y0 + dy,
            })
        })
    }

    pub fn transpose(&self) -> Self {
        DyadicRect::new(self.v, self.h)
    }
}

impl fmt::Display for DyadicRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}:{} x {}:{})",
            self.h.level, self.h.index, self.v.level, self.v.index
        )
    }
}

/// A cell `ω` of the grain, i.e. the rectangle at levels `(N, N)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellId {
    pub ix: u64,
    pub iy: u64,
}

impl CellId {
    pub fn new(ix: u64, iy: u64) -> Self {
        CellId { ix, iy }
    }

    pub fn corner() -> Self {
        CellId { ix: 0, iy: 0 }
    }
}

/// Dense table with one entry per dyadic rectangle of a grain.
#[derive(Clone, Debug, PartialEq)]
pub struct RectTable<T> {
    grain: Grain,
    width: usize,
    data: Vec<T>,
}

impl<T> RectTable<T> {
    pub fn from_fn(grain: Grain, mut f: impl FnMut(DyadicRect) -> T) -> Self {
        let width = grain.interval_count();
        let data = grain.all_rects().map(&mut f).collect();
        RectTable { grain, width, data }
    }

    pub fn grain(&self) -> Grain {
        self.grain
    }

    fn idx(&self, r: &DyadicRect) -> usize {
        r.h.heap_id() * self.width + r.v.heap_id()
    }

    /// Panics if `r` does not fit in the grain.
    pub fn get(&self, r: &DyadicRect) -> &T {
        assert!(self.grain.fits(r), "rectangle {r} outside grain");
        &self.data[self.idx(r)]
    }

    pub fn get_mut(&mut self, r: &DyadicRect) -> &mut T {
        assert!(self.grain.fits(r), "rectangle {r} outside grain");
        let i = self.idx(r);
        &mut self.data[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (DyadicRect, &T)> {
        self.grain.all_rects().zip(self.data.iter())
    }

    pub(crate) fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn map<U>(&self, mut f: impl FnMut(DyadicRect, &T) -> U) -> RectTable<U> {
        RectTable {
            grain: self.grain,
            width: self.width,
            data: self.iter().map(|(r, t)| f(r, t)).collect(),
        }
    }
}

impl<T> RectTable<T>
where
    T: Zero + for<'a> AddAssign<&'a T>,
{
    /// Replaces every entry by the sum over its sub-rectangles (itself included).
    pub fn down_sum(mut self) -> Self {
        self.down_sum_in_place();
        self
    }

    /// Replaces every entry by the sum over its ancestors (itself included).
    pub fn up_sum(mut self) -> Self {
        self.up_sum_in_place();
        self
    }

    pub(crate) fn down_sum_in_place(&mut self) {
        let w = self.width;
        let inner = w / 2; // heap ids below this have children
        for h in (0..inner).rev() {
            for v in 0..w {
                accumulate(&mut self.data, h * w + v, (2 * h + 1) * w + v);
                accumulate(&mut self.data, h * w + v, (2 * h + 2) * w + v);
            }
        }
        for h in 0..w {
            for v in (0..inner).rev() {
                accumulate(&mut self.data, h * w + v, h * w + 2 * v + 1);
                accumulate(&mut self.data, h * w + v, h * w + 2 * v + 2);
            }
        }
    }

    pub(crate) fn up_sum_in_place(&mut self) {
        let w = self.width;
        for h in 1..w {
            for v in 0..w {
                accumulate(&mut self.data, h * w + v, ((h - 1) / 2) * w + v);
            }
        }
        for h in 0..w {
            for v in 1..w {
                accumulate(&mut self.data, h * w + v, h * w + (v - 1) / 2);
            }
        }
    }
}

fn accumulate<T>(data: &mut [T], dst: usize, src: usize)
where
    T: Zero + for<'a> AddAssign<&'a T>,
{
    if dst < src {
        let (a, b) = data.split_at_mut(src);
        if !b[0].is_zero() {
            a[dst] += &b[0];
        }
    } else {
        let (a, b) = data.split_at_mut(dst);
        if !a[src].is_zero() {
            b[0] += &a[src];
        }
    }
}

/// Grained nonnegative measure: exact rational mass per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct Measure {
    grain: Grain,
    masses: BTreeMap<CellId, Rational>,
}

impl Measure {
    pub fn zero(grain: Grain) -> Self {
        Measure {
            grain,
            masses: BTreeMap::new(),
        }
    }

    /// Builds a measure from `(cell, mass)` pairs; repeated cells add up.
    pub fn from_masses(
        grain: Grain,
        masses: impl IntoIterator<Item = (CellId, Rational)>,
    ) -> Result<Self> {
        let mut mu = Measure::zero(grain);
        for (c, m) in masses {
            mu.add_mass(c, m)?;
        }
        Ok(mu)
    }

    pub fn add_mass(&mut self, c: CellId, m: Rational) -> Result<()> {
        self.grain.check_cell(c)?;
        if m.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "negative mass {m} at cell ({},{})",
                c.ix, c.iy
            )));
        }
        if m.is_zero() {
            return Ok(());
        }
        *self.masses.entry(c).or_insert_with(Rational::zero) += m;
        Ok(())
    }

    /// All mass `a` on the corner cell `(0, 0)`.
    pub fn corner(grain: Grain, a: Rational) -> Result<Self> {
        Measure::from_masses(grain, [(CellId::corner(), a)])
    }

    /// Area measure: every cell carries `4^-N`.
    pub fn lebesgue(grain: Grain) -> Result<Self> {
        grain.require_at_most("lebesgue measure", MAX_CELL_GRAIN)?;
        let cell = grain.cell_rect(CellId::corner()).area();
        Ok(Measure {
            grain,
            masses: grain.cells().map(|c| (c, cell.clone())).collect(),
        })
    }

    pub fn grain(&self) -> Grain {
        self.grain
    }

    pub fn mass(&self, c: CellId) -> Rational {
        self.masses.get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    /// Cells with positive mass and their masses.
    pub fn iter(&self) -> impl Iterator<Item = (CellId, &Rational)> {
        self.masses.iter().map(|(c, m)| (*c, m))
    }

    pub fn support_len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_zero(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.masses.values().fold(Rational::zero(), |acc, m| acc + m)
    }

    /// `μ(R) = Σ_{ω ⊂ R} μ(ω)`.
    pub fn rect_mass(&self, r: &DyadicRect) -> Result<Rational> {
        self.grain.check(r)?;
        Ok(self
            .masses
            .iter()
            .filter(|(c, _)| r.contains_cell(**c, self.grain))
            .fold(Rational::zero(), |acc, (_, m)| acc + m))
    }

    pub fn region_mass(&self, cells: &BTreeSet<CellId>) -> Rational {
        self.masses
            .iter()
            .filter(|(c, _)| cells.contains(c))
            .fold(Rational::zero(), |acc, (_, m)| acc + m)
    }

    pub fn scaled(&self, t: &Rational) -> Result<Self> {
        if t.is_negative() {
            return Err(Error::InvalidParameter(format!("negative scale {t}")));
        }
        Measure::from_masses(self.grain, self.iter().map(|(c, m)| (c, m * t)))
    }

    /// Mirror across the diagonal, exchanging the two axes.
    pub fn transpose(&self) -> Self {
        Measure {
            grain: self.grain,
            masses: self
                .masses
                .iter()
                .map(|(c, m)| (CellId::new(c.iy, c.ix), m.clone()))
                .collect(),
        }
    }

    /// `μ(R)` for every rectangle of the grain.
    pub fn mass_table(&self) -> Result<RectTable<Rational>> {
        self.grain
            .require_at_most("rectangle enumeration", MAX_EXHAUSTIVE_GRAIN)?;
        let mut t = RectTable::from_fn(self.grain, |_| Rational::zero());
        for (c, m) in self.iter() {
            *t.get_mut(&self.grain.cell_rect(c)) = m.clone();
        }
        Ok(t.down_sum())
    }
}

/// Nonnegative function constant on every cell; missing cells are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    grain: Grain,
    values: BTreeMap<CellId, Rational>,
}

impl StepFunction {
    pub fn new(grain: Grain, values: impl IntoIterator<Item = (CellId, Rational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (c, v) in values {
            grain.check_cell(c)?;
            if v.is_negative() {
                return Err(Error::InvalidParameter(format!("negative value {v}")));
            }
            if !v.is_zero() {
                map.insert(c, v);
            }
        }
        Ok(StepFunction { grain, values: map })
    }

    pub fn constant(grain: Grain, value: Rational) -> Result<Self> {
        grain.require_at_most("constant step function", MAX_CELL_GRAIN)?;
        StepFunction::new(grain, grain.cells().map(|c| (c, value.clone())))
    }

    /// `1_Ω` for a cell set.
    pub fn indicator(grain: Grain, cells: &BTreeSet<CellId>) -> Result<Self> {
        StepFunction::new(grain, cells.iter().map(|&c| (c, Rational::one())))
    }

    pub fn grain(&self) -> Grain {
        self.grain
    }

    pub fn value(&self, c: CellId) -> Rational {
        self.values.get(&c).cloned().unwrap_or_else(Rational::zero)
    }
}

/// `∫_R φ dμ = Σ_{ω ⊂ R} φ_ω μ(ω)`.
pub fn integrate(phi: &StepFunction, mu: &Measure, r: &DyadicRect) -> Result<Rational> {
    mu.grain.check_same(phi.grain)?;
    mu.grain.check(r)?;
    Ok(mu
        .iter()
        .filter(|(c, _)| r.contains_cell(*c, mu.grain))
        .filter_map(|(c, m)| phi.values.get(&c).map(|v| v * m))
        .fold(Rational::zero(), |acc, x| acc + x))
}

/// Second weight `α`: a default plus sparse per-rectangle overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightsRepr", into = "WeightsRepr")]
pub struct WeightFamily {
    grain: Grain,
    default: Rational,
    overrides: BTreeMap<DyadicRect, Rational>,
}

impl WeightFamily {
    pub fn constant(grain: Grain, default: Rational) -> Result<Self> {
        if default.is_negative() {
            return Err(Error::InvalidParameter(format!("negative weight {default}")));
        }
        Ok(WeightFamily {
            grain,
            default,
            overrides: BTreeMap::new(),
        })
    }

    /// `α ≡ 1`.
    pub fn ones(grain: Grain) -> Self {
        WeightFamily {
            grain,
            default: Rational::one(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, r: DyadicRect, value: Rational) -> Result<()> {
        self.grain.check(&r)?;
        if value.is_negative() {
            return Err(Error::InvalidParameter(format!("negative weight {value}")));
        }
        if value == self.default {
            self.overrides.remove(&r);
        } else {
            self.overrides.insert(r, value);
        }
        Ok(())
    }

    pub fn with(mut self, r: DyadicRect, value: Rational) -> Result<Self> {
        self.set(r, value)?;
        Ok(self)
    }

    pub fn grain(&self) -> Grain {
        self.grain
    }

    pub fn default_value(&self) -> &Rational {
        &self.default
    }

    pub fn overrides(&self) -> impl Iterator<Item = (&DyadicRect, &Rational)> {
        self.overrides.iter()
    }

    pub fn value(&self, r: &DyadicRect) -> &Rational {
        self.overrides.get(r).unwrap_or(&self.default)
    }

    /// Same weights with every value outside `fam` set to zero.
    pub fn restricted_to(&self, fam: &RectFamily) -> Result<Self> {
        self.grain.check_same(fam.grain())?;
        let mut out = WeightFamily::constant(self.grain, Rational::zero())?;
        for r in fam.iter() {
            out.set(*r, self.value(r).clone())?;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        WeightFamily {
            grain: self.grain,
            default: self.default.clone(),
            overrides: self
                .overrides
                .iter()
                .map(|(r, v)| (r.transpose(), v.clone()))
                .collect(),
        }
    }
}

/// A finite set of rectangles and the region `Ω` they cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct RectFamily {
    grain: Grain,
    members: BTreeSet<DyadicRect>,
}

impl RectFamily {
    pub fn empty(grain: Grain) -> Self {
        RectFamily {
            grain,
            members: BTreeSet::new(),
        }
    }

    pub fn from_rects(grain: Grain, rects: impl IntoIterator<Item = DyadicRect>) -> Result<Self> {
        let mut fam = RectFamily::empty(grain);
        for r in rects {
            fam.insert(r)?;
        }
        Ok(fam)
    }

    /// Every dyadic rectangle of the grain.
    pub fn full(grain: Grain) -> Result<Self> {
        grain.require_at_most("full family", MAX_EXHAUSTIVE_GRAIN)?;
        Ok(RectFamily {
            grain,
            members: grain.all_rects().collect(),
        })
    }

    pub fn insert(&mut self, r: DyadicRect) -> Result<bool> {
        self.grain.check(&r)?;
        Ok(self.members.insert(r))
    }

    pub fn grain(&self) -> Grain {
        self.grain
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, r: &DyadicRect) -> bool {
        self.members.contains(r)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DyadicRect> {
        self.members.iter()
    }

    /// Members absent from `other` removed; grains must agree.
    pub fn difference(&self, other: &RectFamily) -> Result<Self> {
        self.grain.check_same(other.grain)?;
        Ok(RectFamily {
            grain: self.grain,
            members: self.members.difference(&other.members).copied().collect(),
        })
    }

    /// Dense cell mask of `Ω`, indexed by [`Grain::cell_index`].
    pub fn region_mask(&self) -> Result<Vec<bool>> {
        self.grain.require_at_most("region cells", MAX_CELL_GRAIN)?;
        let mut mask = vec![false; (self.grain.side() * self.grain.side()) as usize];
        for r in &self.members {
            for c in r.cells(self.grain) {
                mask[self.grain.cell_index(c)] = true;
            }
        }
        Ok(mask)
    }

    /// The exact cell set of `Ω = ∪ R`.
    pub fn region_cells(&self) -> Result<BTreeSet<CellId>> {
        let mask = self.region_mask()?;
        Ok(mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.grain.cell_at(i))
            .collect())
    }

    /// For every rectangle of the grain, whether it lies inside `Ω`.
    pub fn inside_table(&self) -> Result<RectTable<bool>> {
        self.grain
            .require_at_most("rectangle enumeration", MAX_EXHAUSTIVE_GRAIN)?;
        inside_table(self.grain, &self.region_mask()?)
    }
}

/// `R ⊆ Ω` for every rectangle, from a cell mask, by merging halves bottom-up.
pub(crate) fn inside_table(grain: Grain, mask: &[bool]) -> Result<RectTable<bool>> {
    grain.require_at_most("rectangle enumeration", MAX_EXHAUSTIVE_GRAIN)?;
    let n = grain.n();
    let w = grain.interval_count();
    let mut data = vec![false; w * w];
    for h in (0..w).rev() {
        let hi = DyadicInterval::from_heap_id(h);
        for v in (0..w).rev() {
            let vi = DyadicInterval::from_heap_id(v);
            data[h * w + v] = if hi.level < n {
                data[(2 * h + 1) * w + v] && data[(2 * h + 2) * w + v]
            } else if vi.level < n {
                data[h * w + 2 * v + 1] && data[h * w + 2 * v + 2]
            } else {
                mask[grain.cell_index(CellId::new(hi.index, vi.index))]
            };
        }
    }
    Ok(RectTable {
        grain,
        width: w,
        data,
    })
}
