use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::exact::ExactScalar;
use crate::tree::{
    for_each_extension, sphere_size, word_index, BoundaryWord, CylinderSet, Letter, TreeModel,
};

/// A function on the tree boundary that is constant on each depth-`n`
/// cylinder. Depth 0 means a constant. Values are indexed by
/// [`word_index`] of the cell label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimpleFunction {
    rank: u8,
    depth: usize,
    values: Vec<ExactScalar>,
}

impl SimpleFunction {
    pub fn new(rank: u8, depth: usize, values: Vec<ExactScalar>) -> Result<Self> {
        let expected = sphere_size(rank, depth);
        if values.len() as u128 != expected {
            return domain(format!(
                "a depth-{depth} simple function needs {expected} values, got {}",
                values.len()
            ));
        }
        Ok(Self {
            rank,
            depth,
            values,
        })
    }

    pub fn constant(rank: u8, c: ExactScalar) -> Self {
        Self {
            rank,
            depth: 0,
            values: vec![c],
        }
    }

    pub fn one(rank: u8) -> Self {
        Self::constant(rank, ExactScalar::one())
    }

    pub fn zero(rank: u8) -> Self {
        Self::constant(rank, ExactScalar::zero())
    }

    /// `χ_U` at the depth of `U`.
    pub fn indicator(set: &CylinderSet) -> Self {
        let rank = set.rank();
        if set.is_empty() {
            return Self::zero(rank);
        }
        if set.is_whole() {
            return Self::one(rank);
        }
        let n = set.depth();
        let ind = set.indicator(n).expect("depth matches the set");
        let values = ind
            .into_iter()
            .map(|x| {
                if x {
                    ExactScalar::one()
                } else {
                    ExactScalar::zero()
                }
            })
            .collect();
        Self {
            rank,
            depth: n,
            values,
        }
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[ExactScalar] {
        &self.values
    }

    /// Value on the cylinder `C(cell)`; `cell` may be deeper than the
    /// function.
    pub fn at_cell(&self, cell: &[Letter]) -> &ExactScalar {
        &self.values[word_index(self.rank, &cell[..self.depth])]
    }

    pub fn value_index(&self, cell: &[Letter]) -> usize {
        word_index(self.rank, &cell[..self.depth])
    }

    pub fn eval(&self, b: &BoundaryWord) -> Result<ExactScalar> {
        let head = b.head(self.depth)?;
        Ok(self.at_cell(head.letters()).clone())
    }

    /// The same function written on the depth-`n` partition.
    pub fn refine(&self, n: usize) -> Result<Self> {
        if n < self.depth {
            return domain(format!("cannot coarsen depth {} to {n}", self.depth));
        }
        if n == self.depth {
            return Ok(self.clone());
        }
        let mut values = Vec::with_capacity(sphere_size(self.rank, n) as usize);
        for_each_extension(self.rank, &[], n, &mut |w| {
            values.push(self.at_cell(w).clone())
        });
        Ok(Self {
            rank: self.rank,
            depth: n,
            values,
        })
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self {
            rank: self.rank,
            depth: self.depth,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.depth.max(other.depth);
        let (a, b) = (self.refine(n)?, other.refine(n)?);
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        Ok(Self {
            rank: self.rank,
            depth: n,
            values,
        })
    }

    /// `⟨u, v⟩_p = ∫ u v̄ dν_p` (values are real).
    pub fn inner(&self, other: &Self, model: &TreeModel) -> Result<ExactScalar> {
        if self.rank != other.rank || self.rank != model.rank() {
            return domain("simple functions over different ranks");
        }
        let n = self.depth.max(other.depth);
        let (a, b) = (self.refine(n)?, other.refine(n)?);
        let s: ExactScalar = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
        Ok(s * model.depth_measure(n))
    }

    pub fn norm_sq(&self, model: &TreeModel) -> Result<ExactScalar> {
        self.inner(self, model)
    }
}
