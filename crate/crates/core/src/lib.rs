//! Box constants, Carleson constants and capacities for grained measures on
//! the dyadic bi-tree of the unit square.
//!
//! The crate is organised by layer:
//!
//! * [`grid`]: dyadic intervals and rectangles, cells, measures, weights and
//!   rectangle families, plus dense per-rectangle tables with tree sweeps.
//! * [`conditions`]: box constant, Carleson ratio over a union, the extremal
//!   embedding constant and their one-parameter analogues; pruned/cut
//!   classification of sub-bi-trees.
//! * [`counterexamples`]: balanced and hyperbola families, `F_A`/`B_A`
//!   statistics, the staircase area, wild weights and the assembled
//!   box-but-not-Carleson scenario.
//! * [`capacity`]: bi-tree and tree capacities as a convex QP, the capacitary
//!   box statistic and the box-to-capacity experiment.
//! * [`hardy`]: the restricted Hardy operator and the dual form of the
//!   embedding.
//! * [`harness`]: run configuration, artifacts and scans behind the CLI.
//!
//! Condition sums are exact ([`Rational`]); floating point is used only inside
//! spectral and QP iterations.

pub mod capacity;
pub mod codec;
pub mod conditions;
pub mod counterexamples;
pub mod error;
pub mod grid;
pub mod hardy;
pub mod harness;
mod spectral;
pub mod tree;

pub use error::{Error, Result};
pub use grid::{
    integrate, CellId, DyadicInterval, DyadicRect, Grain, Measure, RectFamily, RectTable,
    StepFunction, WeightFamily,
};

/// Exact rational used for masses, weights and condition sums.
pub type Rational = num_rational::BigRational;

/// `p/q` as a [`Rational`]; panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}
