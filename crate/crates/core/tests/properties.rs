mod common;

use std::collections::BTreeSet;

use bitree_core::capacity::{bitree_capacity, BiTreeFunction, QpOptions, Target};
use bitree_core::conditions::{
    box_constant, carleson_ratio, classify_family, embedding_constant, tree_box_constant,
    tree_embedding_constant,
};
use bitree_core::counterexamples::{
    divisor_summatory, family_stats_exhaustive, family_stats_hooked, u_count,
};
use bitree_core::hardy::hardy_transform;
use bitree_core::{rat, CellId, DyadicRect, Measure, RectFamily, Rational, WeightFamily};
use common::*;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cell_set(g: bitree_core::Grain, r: &DyadicRect) -> BTreeSet<CellId> {
    r.cells(g).collect()
}

#[test]
fn order_matches_cell_inclusion() {
    for n in 0..=3 {
        let g = grain(n);
        let rects: Vec<DyadicRect> = g.all_rects().collect();
        assert_eq!(rects.len(), ((2usize << n) - 1).pow(2));
        for r in &rects {
            let rc = cell_set(g, r);
            for s in &rects {
                assert_eq!(r.contains(s), cell_set(g, s).is_subset(&rc), "{r:?} vs {s:?}");
            }
            let anc: BTreeSet<DyadicRect> = r.ancestors().into_iter().collect();
            let brute: BTreeSet<DyadicRect> = rects.iter().filter(|s| s.contains(r)).copied().collect();
            assert_eq!(anc, brute);
            assert_eq!(anc.len() as u32, (r.h.level + 1) * (r.v.level + 1));
        }
    }
}

#[test]
fn parents_and_children_are_dual() {
    for n in 0..=3 {
        let g = grain(n);
        for r in g.all_rects() {
            for c in r.children(g) {
                assert!(c.parents().contains(&r));
            }
            for p in r.parents() {
                assert!(p.children(g).contains(&r));
            }
            assert!(r.parents().len() <= 2 && r.children(g).len() <= 4);
        }
    }
}

#[test]
fn hooked_boxes_count_their_hooked_subboxes() {
    for n in 0..=5 {
        let g = grain(n);
        for m in 0..=n {
            for k in 0..=n {
                let q = g.hooked(m, k).unwrap();
                let brute = g
                    .all_rects()
                    .filter(|r| q.contains(r) && g.hooked_params(r).is_some())
                    .count() as u64;
                assert_eq!(g.hooked_within(m, k).unwrap(), brute);
            }
        }
    }
}

#[test]
fn full_family_is_pruned_and_cut() {
    for n in 0..=3 {
        let c = classify_family(&RectFamily::full(grain(n)).unwrap()).unwrap();
        assert!(c.pruned && c.cut);
    }
}

#[test]
fn staircase_counts_match_brute_force() {
    for n in 1..=400 {
        assert_eq!(u_count(n), u_brute(n), "N={n}");
        assert_eq!(divisor_summatory(n), u_brute(n), "N={n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rect_mass_is_additive(seed in any::<u64>(), n in 1u32..=4) {
        let mut r = rng(seed);
        let g = grain(n);
        let mu = random_measure(&mut r, g, 0.4);
        for rect in g.all_rects() {
            let total = mu.rect_mass(&rect).unwrap();
            let by_cells = rect.cells(g).fold(Rational::zero(), |a, c| a + mu.mass(c));
            prop_assert_eq!(&total, &by_cells);
            if rect.h.level < n {
                let halves = rect.h.children().iter().fold(Rational::zero(), |a, h| {
                    a + mu.rect_mass(&DyadicRect::new(*h, rect.v)).unwrap()
                });
                prop_assert_eq!(&total, &halves);
            }
        }
    }

    #[test]
    fn conditions_scale_linearly_in_the_measure(seed in any::<u64>(), n in 1u32..=3, p in 1i64..6, q in 1i64..6) {
        let mut r = rng(seed);
        let g = grain(n);
        let mu = random_measure(&mut r, g, 0.5);
        let alpha = random_alpha(&mut r, g, false);
        let fam = random_family(&mut r, g, 4);
        let t = rat(p, q);
        let tmu = mu.scaled(&t).unwrap();
        prop_assert_eq!(box_constant(&tmu, &alpha).unwrap().constant, &t * box_constant(&mu, &alpha).unwrap().constant);
        prop_assert_eq!(
            carleson_ratio(&tmu, &alpha, &fam).unwrap().constant,
            &t * carleson_ratio(&mu, &alpha, &fam).unwrap().constant
        );
        let e = embedding_constant(&mu, &alpha, 1e-13).unwrap();
        let te = embedding_constant(&tmu, &alpha, 1e-13).unwrap();
        prop_assert!((te - f(&t) * e).abs() <= 1e-8 * (1.0 + te));
    }

    #[test]
    fn conditions_are_monotone_in_the_weights(seed in any::<u64>(), n in 1u32..=3) {
        let mut r = rng(seed);
        let g = grain(n);
        let mu = random_measure(&mut r, g, 0.5);
        let alpha = random_alpha(&mut r, g, false);
        let mut bigger = alpha.clone();
        for _ in 0..4 {
            let rect = random_rect(&mut r, g);
            let v = alpha.value(&rect) + rat(r.random_range(1..4), 2);
            bigger.set(rect, v).unwrap();
        }
        let fam = random_family(&mut r, g, 4);
        prop_assert!(box_constant(&mu, &alpha).unwrap().constant <= box_constant(&mu, &bigger).unwrap().constant);
        prop_assert!(
            carleson_ratio(&mu, &alpha, &fam).unwrap().constant
                <= carleson_ratio(&mu, &bigger, &fam).unwrap().constant
        );
    }

    #[test]
    fn box_constant_is_the_worst_single_rectangle(seed in any::<u64>(), n in 0u32..=2) {
        let mut r = rng(seed);
        let g = grain(n);
        let mu = random_measure(&mut r, g, 0.5);
        let alpha = random_alpha(&mut r, g, false);
        let report = box_constant(&mu, &alpha).unwrap();
        let mut best = Rational::zero();
        let mut infinite = false;
        for rect in g.all_rects() {
            let c = carleson_ratio(&mu, &alpha, &RectFamily::from_rects(g, [rect]).unwrap()).unwrap();
            infinite |= c.infinite;
            if c.constant > best {
                best = c.constant;
            }
        }
        prop_assert_eq!(report.infinite, infinite);
        prop_assert_eq!(report.constant, best);
    }

    #[test]
    fn box_constant_is_transpose_invariant(seed in any::<u64>(), n in 1u32..=3) {
        let mut r = rng(seed);
        let g = grain(n);
        let mu = random_measure(&mut r, g, 0.5);
        let alpha = random_alpha(&mut r, g, false);
        prop_assert_eq!(
            box_constant(&mu, &alpha).unwrap().constant,
            box_constant(&mu.transpose(), &alpha.transpose()).unwrap().constant
        );
    }

    #[test]
    fn embedding_dominates_and_matches_dense_eigenvalue(seed in any::<u64>(), n in 1u32..=3) {
        let mut r = rng(seed);
        let g = grain(n);
        let mu = random_measure(&mut r, g, 0.5);
        let alpha = random_alpha(&mut r, g, true);
        let fam = random_family(&mut r, g, 4);
        let e = embedding_constant(&mu, &alpha, 1e-13).unwrap();
        let dense = dense_embedding(&mu, &alpha);
        prop_assert!((e - dense).abs() <= 1e-7 * dense.max(1.0), "{} vs {}", e, dense);
        prop_assert!(e >= box_constant(&mu, &alpha).unwrap().constant_f64() - 1e-9);
        prop_assert!(e >= carleson_ratio(&mu, &alpha, &fam).unwrap().constant_f64() - 1e-9);
    }

    #[test]
    fn tree_embedding_dominates_tree_box(seed in any::<u64>(), depth in 1u32..=6) {
        let mut r = rng(seed);
        let (mu, alpha) = random_tree(&mut r, depth);
        let b = tree_box_constant(&mu, &alpha).unwrap().constant_f64();
        let e = tree_embedding_constant(&mu, &alpha, 1e-13).unwrap();
        prop_assert!(e >= b - 1e-9);
    }

    #[test]
    fn hooked_stats_agree_with_enumeration(seed in any::<u64>(), n in 1u32..=5) {
        let mut r = rng(seed);
        let g = grain(n);
        let k = r.random_range(1..=6);
        let fam = RectFamily::from_rects(
            g,
            (0..k).map(|_| g.hooked(r.random_range(0..=n), r.random_range(0..=n)).unwrap()),
        )
        .unwrap();
        let ex = family_stats_exhaustive(&fam).unwrap();
        let fast = family_stats_hooked(&fam).unwrap().unwrap();
        prop_assert_eq!(ex.f_a, fast.f_a);
        prop_assert_eq!(ex.b_a, fast.b_a);
        prop_assert!(ex.f_a >= ex.b_a);
    }

    #[test]
    fn union_area_dominates_any_box(seed in any::<u64>(), n in 1u32..=4) {
        let mut r = rng(seed);
        let g = grain(n);
        let mut fam = random_family(&mut r, g, 5);
        fam.insert(g.hooked(0, 0).unwrap()).unwrap();
        let s = family_stats_exhaustive(&fam).unwrap();
        prop_assert!(s.f_a >= s.b_a && s.b_a >= 1);
        let region = fam.region_cells().unwrap();
        let inside = g
            .all_rects()
            .filter(|rect| g.hooked_params(rect).is_some() && rect.cells(g).all(|c| region.contains(&c)))
            .count() as u64;
        prop_assert_eq!(s.f_a, inside);
    }

    #[test]
    fn hardy_transform_is_adjoint_to_restricted_sums(seed in any::<u64>(), n in 1u32..=3) {
        let mut r = rng(seed);
        let g = grain(n);
        let fam = random_family(&mut r, g, 6);
        let psi = BiTreeFunction::<Rational>::from_values(
            g,
            fam.iter().map(|rect| (*rect, rat(r.random_range(-5..=5), r.random_range(1..=3)))),
        )
        .unwrap();
        let phi: Vec<(CellId, Rational)> = g.cells().map(|c| (c, rat(r.random_range(-4..=4), 1))).collect();
        let t = hardy_transform(&psi, &fam).unwrap();
        let lhs = phi.iter().fold(Rational::zero(), |a, (c, v)| a + t.get(&g.cell_rect(*c)) * v);
        let rhs = psi.iter().fold(Rational::zero(), |a, (rect, v)| {
            let s = phi.iter().filter(|(c, _)| rect.contains_cell(*c, g)).fold(Rational::zero(), |s, (_, x)| s + x);
            a + v * s
        });
        prop_assert_eq!(lhs, rhs);
    }
}

fn random_cells(r: &mut ChaCha8Rng, g: bitree_core::Grain, p: f64) -> BTreeSet<CellId> {
    loop {
        let s: BTreeSet<CellId> = g.cells().filter(|_| r.random_bool(p)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn capacity_is_monotone_and_subadditive(seed in any::<u64>(), n in 1u32..=3) {
        let mut r = rng(seed);
        let g = grain(n);
        let opts = QpOptions::default();
        let e = random_cells(&mut r, g, 0.2);
        let f = random_cells(&mut r, g, 0.2);
        let union: BTreeSet<CellId> = e.union(&f).copied().collect();
        let ce = bitree_capacity(&Target::Cells(e), g, &opts).unwrap();
        let cf = bitree_capacity(&Target::Cells(f), g, &opts).unwrap();
        let cu = bitree_capacity(&Target::Cells(union), g, &opts).unwrap();
        prop_assert!(ce.lower_bound <= cu.value + 1e-7);
        prop_assert!(cf.lower_bound <= cu.value + 1e-7);
        prop_assert!(cu.lower_bound <= ce.value + cf.value + 1e-7);
    }

    #[test]
    fn capacity_matches_nnls_and_ancestor_bound(seed in any::<u64>(), n in 1u32..=3) {
        let mut r = rng(seed);
        let g = grain(n);
        let rect = random_rect(&mut r, g);
        let cap = bitree_capacity(&Target::Rect(rect), g, &QpOptions::default()).unwrap();
        let cells: Vec<CellId> = rect.cells(g).collect();
        let oracle = oracle_capacity(g, &cells);
        prop_assert!((cap.value - oracle).abs() <= 1e-6, "{} vs {}", cap.value, oracle);
        let anc = f64::from((rect.h.level + 1) * (rect.v.level + 1));
        prop_assert!(cap.value <= 1.0 / anc + 1e-9);
        prop_assert!(cap.lower_bound <= cap.value + 1e-12);
    }
}

#[test]
fn corner_measure_has_unit_capacitary_box() {
    for n in 1..=5 {
        let g = grain(n);
        let a = rat(1, i64::from((n + 1) * (n + 1)));
        let mu = Measure::corner(g, a).unwrap();
        let report = bitree_capacity_box(&mu);
        assert_eq!(report, rat(1, 1));
    }
}

fn bitree_capacity_box(mu: &Measure) -> Rational {
    bitree_core::capacity::capacitary_box_report(mu).unwrap().ratio
}

#[test]
fn weights_restrict_to_family() {
    let g = grain(2);
    let fam = RectFamily::from_rects(g, [g.root(), g.hooked(0, 0).unwrap()]).unwrap();
    let a = WeightFamily::constant(g, rat(3, 1)).unwrap().restricted_to(&fam).unwrap();
    for rect in g.all_rects() {
        let want = if fam.contains(&rect) { rat(3, 1) } else { Rational::zero() };
        assert_eq!(a.value(&rect), &want);
    }
}
