//! Finite-dimensional shadows of irreducibility: the span of the compressed
//! operators `P_n ρ(γ) P_n`, `|γ| ≤ L`, inside `End(P_n H)`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::rho::matrix_coefficient;
use super::simple::SimpleFunction;
use crate::error::{domain, Result};
use crate::exact::ExactScalar;
use crate::tree::{sphere_size, words_of_length, ReducedWord, TreeModel};

pub const DEFAULT_DIMENSION_BUDGET: usize = 500;

/// `P_n ρ(γ) P_n` in the orthonormal basis `χ_c/√ν(c)` of depth-`n`
/// cylinders, row-major: entry `(c′, c)` is `⟨ρ(γ)χ_c, χ_{c′}⟩/ν_n`.
pub fn compressed_operator(
    model: &TreeModel,
    gamma: &ReducedWord,
    n: usize,
) -> Result<Vec<ExactScalar>> {
    let rank = model.rank();
    let dim = sphere_size(rank, n) as usize;
    let basis: Vec<SimpleFunction> = (0..dim)
        .map(|i| {
            let mut values = vec![ExactScalar::zero(); dim];
            values[i] = ExactScalar::one();
            SimpleFunction::new(rank, n, values)
        })
        .collect::<Result<_>>()?;
    let scale = model.depth_measure(n).recip();
    let mut out = Vec::with_capacity(dim * dim);
    for row in &basis {
        for col in &basis {
            out.push(matrix_coefficient(model, gamma, col, row)? * scale.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RankStep {
    pub max_word_length: usize,
    pub operators: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankSweep {
    pub depth: usize,
    pub dimension: usize,
    pub steps: Vec<RankStep>,
    /// Smallest `L` at which the span is all of `End(P_n H)`.
    pub full_rank_at: Option<usize>,
}

/// Number of singular values above `1e-9·σ_max`.
pub fn numeric_rank(columns: &[Vec<f64>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let rows = columns[0].len();
    let m = DMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * max).count()
}

/// Rank of `span{P_n ρ(γ) P_n : |γ| ≤ L}` for `L = 0, 1, …, max_len`,
/// stopping once the span is full.
pub fn truncation_rank(
    model: &TreeModel,
    n: usize,
    max_len: usize,
    dim_budget: usize,
) -> Result<RankSweep> {
    if n == 0 {
        return domain("compression depth must be at least 1");
    }
    let dim = sphere_size(model.rank(), n);
    if dim > dim_budget as u128 {
        return domain(format!("dimension {dim} exceeds budget {dim_budget}"));
    }
    let dim = dim as usize;
    let full = dim * dim;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut steps = Vec::new();
    let mut full_rank_at = None;
    for l in 0..=max_len {
        for g in words_of_length(model.rank(), l) {
            let op = compressed_operator(model, &g, n)?;
            columns.push(op.iter().map(|x| x.to_f64()).collect());
        }
        let rank = numeric_rank(&columns);
        steps.push(RankStep {
            max_word_length: l,
            operators: columns.len(),
            rank,
        });
        if rank == full {
            full_rank_at = Some(l);
            break;
        }
    }
    Ok(RankSweep {
        depth: n,
        dimension: dim,
        steps,
        full_rank_at,
    })
}
