//! The one-parameter (simple) dyadic tree over `[0, 1)`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::grid::DyadicInterval;
use crate::Rational;

/// Grained measure on the leaves of a tree of the given depth.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMeasure {
    depth: u32,
    masses: BTreeMap<u64, Rational>,
}

impl TreeMeasure {
    pub fn new(depth: u32, masses: impl IntoIterator<Item = (u64, Rational)>) -> Result<Self> {
        if depth > 30 {
            return Err(Error::guard("tree depth", depth, 30u32));
        }
        let mut out = BTreeMap::new();
        for (leaf, m) in masses {
            if leaf >= 1u64 << depth {
                return Err(Error::OutOfGrain(format!("leaf {leaf} at depth {depth}")));
            }
            if m.is_negative() {
                return Err(Error::InvalidParameter(format!("negative mass {m}")));
            }
            if !m.is_zero() {
                *out.entry(leaf).or_insert_with(Rational::zero) += m;
            }
        }
        Ok(TreeMeasure { depth, masses: out })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.masses.iter().map(|(l, m)| (*l, m))
    }

    pub fn mass(&self, leaf: u64) -> Rational {
        self.masses.get(&leaf).cloned().unwrap_or_else(Rational::zero)
    }

    /// `μ(I)` for every interval, indexed by heap id.
    pub fn mass_table(&self) -> Vec<Rational> {
        let w = (1usize << (self.depth + 1)) - 1;
        let mut t = vec![Rational::zero(); w];
        let first_leaf = (1usize << self.depth) - 1;
        for (leaf, m) in self.iter() {
            t[first_leaf + leaf as usize] = m.clone();
        }
        for i in (0..first_leaf).rev() {
            let s = &t[2 * i + 1] + &t[2 * i + 2];
            t[i] = s;
        }
        t
    }

    pub fn interval_count(&self) -> usize {
        (1usize << (self.depth + 1)) - 1
    }
}

/// Weights `α_I` on the intervals of a tree.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeWeights {
    depth: u32,
    default: Rational,
    overrides: BTreeMap<DyadicInterval, Rational>,
}

impl TreeWeights {
    pub fn constant(depth: u32, default: Rational) -> Result<Self> {
        if default.is_negative() {
            return Err(Error::InvalidParameter(format!("negative weight {default}")));
        }
        Ok(TreeWeights {
            depth,
            default,
            overrides: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, i: DyadicInterval, value: Rational) -> Result<()> {
        if i.level > self.depth {
            return Err(Error::OutOfGrain(format!("interval {}:{}", i.level, i.index)));
        }
        if value.is_negative() {
            return Err(Error::InvalidParameter(format!("negative weight {value}")));
        }
        self.overrides.insert(i, value);
        Ok(())
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn value(&self, i: &DyadicInterval) -> &Rational {
        self.overrides.get(i).unwrap_or(&self.default)
    }
}
