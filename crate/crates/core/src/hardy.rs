//! The Hardy operator restricted to a sub-family and the dual form of the
//! embedding constant.
//!
//! `𝕀_ℱψ(γ)` sums `ψ` over the ancestors of `γ` (itself included) in the
//! full bi-tree order that belong to `ℱ`; membership never depends on paths
//! inside `ℱ`. Both sweeps are the prefix sums of [`RectTable::up_sum`].

use std::ops::AddAssign;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::capacity::BiTreeFunction;
use crate::conditions::embedding_estimate;
use crate::error::{Error, Result};
use crate::grid::{DyadicRect, Measure, RectFamily, RectTable, WeightFamily, MAX_EXHAUSTIVE_GRAIN};
use crate::spectral::power_iteration;

/// Largest grain for the dual power iteration.
pub const MAX_DUAL_GRAIN: u32 = 5;

/// `𝕀_ℱψ` at every vertex of the full bi-tree. Values of `ψ` outside `fam`
/// are ignored with a warning.
pub fn hardy_transform<T>(psi: &BiTreeFunction<T>, fam: &RectFamily) -> Result<RectTable<T>>
where
    T: Clone + Zero + for<'a> AddAssign<&'a T>,
{
    let grain = psi.grain();
    grain.check_same(fam.grain())?;
    grain.require_at_most("hardy transform", MAX_EXHAUSTIVE_GRAIN)?;
    let mut t = RectTable::from_fn(grain, |_| T::zero());
    let mut ignored = 0usize;
    for (r, v) in psi.iter() {
        if fam.contains(r) {
            *t.get_mut(r) = v.clone();
        } else if !v.is_zero() {
            ignored += 1;
        }
    }
    if ignored > 0 {
        log::warn!("hardy transform ignored {ignored} values outside the family");
    }
    Ok(t.up_sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualReport {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// Smallest `C₀` with `Σ_ω 𝕀_ℱ(αψ)(ω)² μ(ω) ≤ C₀ Σ_{γ∈ℱ} ψ(γ)² α_γ`, next
/// to the primal embedding constant with `α` restricted to `ℱ`. Substituting
/// `ψ ↦ ψ/α` gives the norm `Σ ψ(γ)²/α_γ` on the plain `𝕀_ℱψ`; for `α ∈ {0, 1}`
/// both read `Σ ψ(γ)² α_γ`.
///
/// Members with `α = 0` are dropped from the dual domain. The dual side runs
/// power iteration on `α^{1/2} D μ 𝕀_ℱ α^{1/2}`, where `D` sums over the
/// cells of a rectangle.
pub fn dual_constant(
    mu: &Measure,
    alpha: &WeightFamily,
    fam: &RectFamily,
    tol: f64,
) -> Result<DualReport> {
    let grain = mu.grain();
    grain.check_same(alpha.grain())?;
    grain.check_same(fam.grain())?;
    grain.require_at_most("dual constant", MAX_DUAL_GRAIN)?;
    let domain: Vec<(DyadicRect, f64)> = fam
        .iter()
        .filter(|r| !alpha.value(r).is_zero())
        .map(|r| (*r, alpha.value(r).to_f64().unwrap_or(f64::NAN).sqrt()))
        .collect();
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let cells: Vec<(DyadicRect, f64)> = mu
        .iter()
        .map(|(c, m)| (grain.cell_rect(c), m.to_f64().unwrap_or(0.0)))
        .collect();
    let mut t = RectTable::from_fn(grain, |_| 0.0f64);
    let dual = power_iteration(
        "dual constant",
        vec![1.0; domain.len()],
        |x, y| {
            t.data_mut().fill(0.0);
            for ((r, s), xi) in domain.iter().zip(x) {
                *t.get_mut(r) = s * xi;
            }
            t.up_sum_in_place();
            let at_cells: Vec<f64> = cells.iter().map(|(c, m)| m * t.get(c)).collect();
            t.data_mut().fill(0.0);
            for ((c, _), v) in cells.iter().zip(at_cells) {
                *t.get_mut(c) = v;
            }
            t.down_sum_in_place();
            for ((r, s), yi) in domain.iter().zip(y.iter_mut()) {
                *yi = s * t.get(r);
            }
        },
        tol,
    )?
    .value;
    let support = RectFamily::from_rects(grain, domain.iter().map(|(r, _)| *r))?;
    let primal = embedding_estimate(mu, &alpha.restricted_to(&support)?, tol)?.value;
    Ok(DualReport {
        primal,
        dual,
        gap: (primal - dual).abs(),
    })
}
