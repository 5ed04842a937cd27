//! The balanced and hyperbola families, their `F_A`/`B_A` statistics, the
//! staircase area `u(N)`, wild weights, and the assembled
//! box-versus-Carleson scenario.
//!
//! `A` is always the corner cell. Every rectangle containing `A` is hooked,
//! so for a union of hooked rectangles both statistics reduce to counting
//! lattice points `(m, k)` under a staircase of column heights. That
//! reduction is the fast path; the exhaustive path enumerates rectangles and
//! is used up to `N = 8` to cross-check it.

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::codec::ratio_str;
use crate::conditions::{box_constant, box_tables, carleson_ratio};
use crate::error::{Error, Result};
use crate::grid::{
    CellId, DyadicRect, Grain, Measure, RectFamily, WeightFamily, MAX_EXHAUSTIVE_GRAIN,
};
use crate::Rational;

/// Largest `N` for the pure lattice-arithmetic paths.
pub const MAX_LATTICE_N: u64 = 1_000_000;
/// Largest `N` for which the hyperbola instance is materialized.
pub const MAX_MATERIALIZED_N: u32 = 64;

/// `F_A`, `B_A` and the hooked box `(m, k)` attaining `B_A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyStats {
    pub f_a: u64,
    pub b_a: u64,
    pub witness: HookedBox,
}

/// Hooked rectangle `[0, 2^(-N+m)) x [0, 2^(-N+k))` by its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HookedBox {
    pub m: u64,
    pub k: u64,
}

impl FamilyStats {
    pub fn witness_box(&self, grain: Grain) -> Result<DyadicRect> {
        grain.hooked(self.witness.m as u32, self.witness.k as u32)
    }

    pub fn ratio(&self) -> f64 {
        self.f_a as f64 / self.b_a as f64
    }
}

/// `R_j = [0, 2^(-N+j)) x [0, 2^(-j))` for `j = 0..=N`.
pub fn balanced_family(grain: Grain) -> Result<RectFamily> {
    let n = grain.n();
    if n == 0 {
        return Err(Error::InvalidParameter("balanced family needs N >= 1".into()));
    }
    RectFamily::from_rects(
        grain,
        (0..=n).map(|j| grain.hooked(j, n - j).expect("parameters within grain")),
    )
}

/// The hyperbola construction at grain `N`.
#[derive(Clone, Debug)]
pub struct HyperbolaInstance {
    /// Hooked `(m, k)` with `m, k ≥ 1` and `mk ≤ N`.
    pub family: RectFamily,
    /// Hooked `(m, k)` with `m, k ≥ 1` and `mk > N`.
    pub forbidden: RectFamily,
    /// Zero on the forbidden rectangles, one elsewhere.
    pub alpha: WeightFamily,
    /// Corner measure of mass `a`.
    pub mu: Measure,
    pub a: Rational,
}

/// Builds the hyperbola instance; `a = 1/B_A`, or `a = 1/N` with `paper_a`.
pub fn hyperbola_family(grain: Grain, paper_a: bool) -> Result<HyperbolaInstance> {
    let n = grain.n();
    if n < 2 {
        return Err(Error::InvalidParameter("hyperbola family needs N >= 2".into()));
    }
    if n > MAX_MATERIALIZED_N {
        return Err(Error::guard("hyperbola family", n, MAX_MATERIALIZED_N));
    }
    let mut family = RectFamily::empty(grain);
    let mut forbidden = RectFamily::empty(grain);
    for m in 1..=n {
        for k in 1..=n {
            let r = grain.hooked(m, k)?;
            if m * k <= n {
                family.insert(r)?;
            } else {
                forbidden.insert(r)?;
            }
        }
    }
    let mut alpha = WeightFamily::ones(grain);
    for r in forbidden.iter() {
        alpha.set(*r, Rational::zero())?;
    }
    let a = corner_mass(n as u64, paper_a);
    let mu = Measure::corner(grain, a.clone())?;
    Ok(HyperbolaInstance {
        family,
        forbidden,
        alpha,
        mu,
        a,
    })
}

fn corner_mass(n: u64, paper_a: bool) -> Rational {
    let denom = if paper_a { n } else { hyperbola_stats(n).b_a };
    Rational::new(1.into(), denom.into())
}

/// Statistics of a family, exhaustively up to `N = 8` and by the staircase
/// reduction beyond when every member is hooked.
pub fn family_stats(fam: &RectFamily) -> Result<FamilyStats> {
    if fam.grain().n() <= MAX_EXHAUSTIVE_GRAIN {
        family_stats_exhaustive(fam)
    } else {
        family_stats_hooked(fam)?.ok_or(Error::guard(
            "exhaustive family statistics",
            fam.grain().n(),
            MAX_EXHAUSTIVE_GRAIN,
        ))
    }
}

/// Enumerates every rectangle: `F_A` counts those containing `A` inside `Ω`;
/// `B_A` maximizes, over every `R ⊆ Ω`, the number of hooked rectangles in `R`.
pub fn family_stats_exhaustive(fam: &RectFamily) -> Result<FamilyStats> {
    let grain = fam.grain();
    if fam.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let inside = fam.inside_table()?;
    let anchor = grain.cell_rect(CellId::corner());
    if !*inside.get(&anchor) {
        return Err(Error::Precondition("region does not contain the corner cell".into()));
    }
    let hooked: Vec<DyadicRect> = grain
        .all_rects()
        .filter(|r| grain.hooked_params(r).is_some())
        .collect();
    let mut f_a = 0u64;
    let mut best: Option<(u64, HookedBox)> = None;
    for (r, &ins) in inside.iter() {
        if !ins {
            continue;
        }
        if r.contains(&anchor) {
            f_a += 1;
        }
        let count = hooked.iter().filter(|h| r.contains(h)).count() as u64;
        if count == 0 {
            continue;
        }
        let (m, k) = grain.hooked_params(&r).expect("only hooked rectangles hold hooked ones");
        let cand = HookedBox {
            m: m as u64,
            k: k as u64,
        };
        let better = match best {
            None => true,
            Some((c, w)) => count > c || (count == c && cand < w),
        };
        if better {
            best = Some((count, cand));
        }
    }
    let (b_a, witness) = best.expect("anchor cell is inside");
    Ok(FamilyStats { f_a, b_a, witness })
}

/// Staircase reduction; `None` when some member is not hooked.
pub fn family_stats_hooked(fam: &RectFamily) -> Result<Option<FamilyStats>> {
    let grain = fam.grain();
    let n = grain.n() as usize;
    let mut heights: Vec<Option<u64>> = vec![None; n + 1];
    for r in fam.iter() {
        let Some((m, k)) = grain.hooked_params(r) else {
            return Ok(None);
        };
        let h = &mut heights[m as usize];
        *h = Some(h.map_or(k as u64, |x| x.max(k as u64)));
    }
    // column m of the down-closure is as tall as the tallest member at m' ≥ m
    for m in (0..n).rev() {
        heights[m] = match (heights[m], heights[m + 1]) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
    if heights[0].is_none() {
        return Err(Error::EmptyFamily);
    }
    Ok(Some(staircase_stats(n as u64, |m| heights[m as usize])))
}

/// `F_A` and `B_A` of the staircase whose column `m` (for `m = 0..=n`) holds
/// the lattice points `k = 0..=height(m)`, or nothing when `None`.
pub fn staircase_stats(n: u64, height: impl Fn(u64) -> Option<u64>) -> FamilyStats {
    let mut f_a = 0u64;
    let mut best = (0u64, HookedBox { m: 0, k: 0 });
    for m in 0..=n {
        let Some(h) = height(m) else { continue };
        f_a += h + 1;
        let count = (m + 1) * (h + 1);
        if count > best.0 {
            best = (count, HookedBox { m, k: h });
        }
    }
    FamilyStats {
        f_a,
        b_a: best.0,
        witness: best.1,
    }
}

/// Column heights of the hyperbola staircase: `N` at `m = 0`, `⌊N/m⌋` after.
pub fn hyperbola_height(n: u64, m: u64) -> Option<u64> {
    if m == 0 {
        Some(n)
    } else {
        Some(n / m)
    }
}

/// `F_A`, `B_A` for the hyperbola family by lattice arithmetic.
pub fn hyperbola_stats(n: u64) -> FamilyStats {
    staircase_stats(n, |m| hyperbola_height(n, m))
}

/// `D(N) = Σ_{m=1..N} ⌊N/m⌋`, by the Dirichlet hyperbola method in `O(√N)`.
pub fn divisor_summatory(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let s = n.isqrt();
    2 * (1..=s).map(|i| n / i).sum::<u64>() - s * s
}

/// Area of `∪ [0,m] x [0,k]` over positive integers with `mk ≤ N`, by
/// summing the height `⌊N/x⌋` of each unit column `x = 1..=N`.
pub fn u_count(n: u64) -> u64 {
    (1..=n).map(|x| n / x).sum()
}

/// `α_R = 1/|R|` on `fam`, zero elsewhere, with the area measure.
pub fn wild_alpha(fam: &RectFamily) -> Result<(WeightFamily, Measure)> {
    let grain = fam.grain();
    let mut alpha = WeightFamily::constant(grain, Rational::zero())?;
    for r in fam.iter() {
        alpha.set(*r, Rational::one() / r.area())?;
    }
    Ok((alpha, Measure::lebesgue(grain)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioMode {
    /// Lattice arithmetic only; valid up to [`MAX_LATTICE_N`].
    #[default]
    Fast,
    /// Materializes every object and evaluates the exact sums (`N ≤ 8`).
    Exhaustive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScenarioOptions {
    pub paper_a: bool,
    pub mode: ScenarioMode,
}

/// Box and Carleson constants of the hyperbola instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub n: u64,
    #[serde(with = "ratio_str")]
    pub a: Rational,
    pub stats: FamilyStats,
    /// Worst box ratio over `R₀` in the family.
    #[serde(with = "ratio_str")]
    pub box_on_family: Rational,
    /// Worst box ratio over every dyadic `R₀`.
    #[serde(with = "ratio_str")]
    pub box_on_all: Rational,
    /// Carleson ratio of the union of the family.
    #[serde(with = "ratio_str")]
    pub carleson: Rational,
    pub ratio_fb: f64,
}

pub fn scenario_hyperbola(n: u64, opts: ScenarioOptions) -> Result<ScenarioReport> {
    if n < 2 {
        return Err(Error::InvalidParameter("hyperbola scenario needs N >= 2".into()));
    }
    match opts.mode {
        ScenarioMode::Fast => scenario_fast(n, opts.paper_a),
        ScenarioMode::Exhaustive => scenario_exhaustive(n, opts.paper_a),
    }
}

fn scenario_fast(n: u64, paper_a: bool) -> Result<ScenarioReport> {
    if n > MAX_LATTICE_N {
        return Err(Error::guard("lattice scenario", n, MAX_LATTICE_N));
    }
    let stats = hyperbola_stats(n);
    let a = if paper_a {
        Rational::new(1.into(), n.into())
    } else {
        Rational::new(1.into(), stats.b_a.into())
    };
    // sub-boxes of a member never reach the forbidden set
    let family_max = (1..=n).map(|m| (m + 1) * (n / m + 1)).max().unwrap_or(0);
    // the count is monotone in (m0, k0), so the worst box is Q
    let all_max = unforbidden_below(n, n, n);
    let big = |x: u64| Rational::from_integer(x.into());
    Ok(ScenarioReport {
        n,
        box_on_family: &a * big(family_max),
        box_on_all: &a * big(all_max),
        carleson: &a * big(stats.f_a),
        ratio_fb: stats.ratio(),
        a,
        stats,
    })
}

/// Hooked `(m, k) ≤ (m0, k0)` outside the forbidden set (`m = 0`, `k = 0`
/// or `mk ≤ N`).
pub fn unforbidden_below(n: u64, m0: u64, k0: u64) -> u64 {
    (0..=m0)
        .map(|m| if m == 0 { k0 + 1 } else { 1 + k0.min(n / m) })
        .sum()
}

fn scenario_exhaustive(n: u64, paper_a: bool) -> Result<ScenarioReport> {
    if n > MAX_EXHAUSTIVE_GRAIN as u64 {
        return Err(Error::guard("exhaustive scenario", n, MAX_EXHAUSTIVE_GRAIN));
    }
    let grain = Grain::new(n as u32)?;
    let inst = hyperbola_family(grain, paper_a)?;
    let stats = family_stats_exhaustive(&inst.family)?;
    let tables = box_tables(&inst.mu, &inst.alpha)?;
    let box_on_family = inst
        .family
        .iter()
        .filter(|r| !tables.masses.get(r).is_zero())
        .map(|r| tables.sums.get(r) / tables.masses.get(r))
        .max()
        .unwrap_or_else(Rational::zero);
    let box_on_all = box_constant(&inst.mu, &inst.alpha)?.constant;
    let carleson = carleson_ratio(&inst.mu, &inst.alpha, &inst.family)?.constant;
    Ok(ScenarioReport {
        n,
        a: inst.a,
        ratio_fb: stats.ratio(),
        stats,
        box_on_family,
        box_on_all,
        carleson,
    })
}

impl ScenarioReport {
    pub fn carleson_f64(&self) -> f64 {
        self.carleson.to_f64().unwrap_or(f64::NAN)
    }
}
