//! The boundary representation `ρ_p(γ)v(b) = λ^γ(b)·v(γ⁻¹b)` on the tree.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::simple::SimpleFunction;
use crate::error::{domain, Error, Result};
use crate::exact::ExactScalar;
use crate::tree::{for_each_extension, word_index, Letter, ReducedWord, TreeModel};

/// Default cap on the cylinder depth that `apply_rho` may materialize.
pub const DEFAULT_RESOLUTION_BUDGET: usize = 10;

fn check(model: &TreeModel, gamma: &ReducedWord, fs: &[&SimpleFunction]) -> Result<()> {
    model.check_word(gamma)?;
    for f in fs {
        if f.rank() != model.rank() {
            return domain("simple function rank does not match the model");
        }
    }
    Ok(())
}

/// `ρ(γ)v`, written exactly on the depth `|γ| + depth(v)` partition.
pub fn apply_rho(
    model: &TreeModel,
    gamma: &ReducedWord,
    v: &SimpleFunction,
    budget: usize,
) -> Result<SimpleFunction> {
    check(model, gamma, &[v])?;
    let n = gamma.len();
    if n == 0 {
        return Ok(v.clone());
    }
    let depth = n + v.depth();
    if depth > budget {
        return Err(Error::ResolutionBudget {
            required: depth,
            budget,
        });
    }
    let m = model.branching();
    let lambdas: Vec<ExactScalar> = (0..=n)
        .map(|j| ExactScalar::half_power(m, 2 * j as i64 - n as i64))
        .collect();
    let inv = gamma.inverse();
    let rank = model.rank();
    let mut values = Vec::new();
    for_each_extension(rank, &[], depth, &mut |cell| {
        let j = cell
            .iter()
            .zip(gamma.letters())
            .take_while(|(a, b)| a == b)
            .count();
        // γ⁻¹·cell = inv(γ)[..n−j] followed by cell[j..].
        let mut moved: Vec<Letter> = inv.letters()[..n - j].to_vec();
        moved.extend_from_slice(&cell[j..]);
        values.push(&lambdas[j] * v.at_cell(&moved));
    });
    SimpleFunction::new(rank, depth, values)
}

/// `⟨ρ(γ)g, h⟩_p`, computed region by region without materializing
/// `ρ(γ)g`. Boundary points agreeing with `γ` for exactly `j < |γ|` letters
/// are `γ[..j]·c·rest` and are moved to `inv(γ[j..])·c·rest`; those in
/// `C(γ)` are moved to `rest`. Only as many letters of `rest` are expanded
/// as `g` and `h` can see.
pub fn matrix_coefficient(
    model: &TreeModel,
    gamma: &ReducedWord,
    g: &SimpleFunction,
    h: &SimpleFunction,
) -> Result<ExactScalar> {
    check(model, gamma, &[g, h])?;
    let n = gamma.len();
    if n == 0 {
        return g.inner(h, model);
    }
    let rank = model.rank();
    let (dg, dh) = (g.depth(), h.depth());
    let gl = gamma.letters();
    let inv = gamma.inverse();
    // (g cell, h cell, half-exponent of λ·ν·2k) ↦ number of cells.
    let mut acc: BTreeMap<(usize, usize, i64), u64> = BTreeMap::new();
    let mut moved: Vec<Letter> = Vec::new();
    let mut start: Vec<Letter> = Vec::with_capacity(n + 1);
    for j in 0..n {
        for c in 0..2 * rank {
            let c = Letter(c);
            if c == gl[j] || (j > 0 && c.is_inverse_of(gl[j - 1])) {
                continue;
            }
            start.clear();
            start.extend_from_slice(&gl[..j]);
            start.push(c);
            let extra = dh.saturating_sub(j + 1).max(dg.saturating_sub(n - j + 1));
            let depth = (j + 1 + extra) as i64;
            let e = (2 * j as i64 - n as i64) + 2 * (1 - depth);
            for_each_extension(rank, &start, extra, &mut |b| {
                moved.clear();
                moved.extend_from_slice(&inv.letters()[..n - j]);
                moved.extend_from_slice(&b[j..]);
                let key = (g.value_index(&moved), h.value_index(b), e);
                *acc.entry(key).or_insert(0) += 1;
            });
        }
    }
    let extra = dh.saturating_sub(n).max(dg);
    let depth = (n + extra) as i64;
    let e = n as i64 + 2 * (1 - depth);
    for_each_extension(rank, gl, extra, &mut |b| {
        let key = (g.value_index(&b[n..]), h.value_index(b), e);
        *acc.entry(key).or_insert(0) += 1;
    });
    Ok(combine(model, &acc, g, h))
}

fn combine(
    model: &TreeModel,
    acc: &BTreeMap<(usize, usize, i64), u64>,
    g: &SimpleFunction,
    h: &SimpleFunction,
) -> ExactScalar {
    let m = model.branching();
    let Some(e_min) = acc.keys().map(|k| k.2).min() else {
        return ExactScalar::zero();
    };
    let mut total = ExactScalar::zero();
    let entries: Vec<_> = acc.iter().collect();
    for group in entries.chunk_by(|a, b| (a.0 .0, a.0 .1) == (b.0 .0, b.0 .1)) {
        let (gi, hi, _) = *group[0].0;
        let (gv, hv) = (&g.values()[gi], &h.values()[hi]);
        if gv.is_zero() || hv.is_zero() {
            continue;
        }
        // Σ count·m^{e/2} = m^{e_min/2}·(A + B√m) with integers A, B.
        let (mut a, mut b) = (BigInt::zero(), BigInt::zero());
        for (&(_, _, e), &count) in group {
            let d = e - e_min;
            let term = BigInt::from(count) * BigInt::from(m).pow((d / 2) as u32);
            if d % 2 == 0 {
                a += term;
            } else {
                b += term;
            }
        }
        let s = ExactScalar::new(
            BigRational::from_integer(a),
            BigRational::from_integer(b),
            m,
        );
        total += gv * hv * s;
    }
    total * ExactScalar::half_power(m, e_min) * ExactScalar::ratio(1, 2 * model.rank() as i64)
}

/// `⟨ρ(γ)1, 1⟩_p`.
pub fn coefficient_one(model: &TreeModel, gamma: &ReducedWord) -> Result<ExactScalar> {
    let one = SimpleFunction::one(model.rank());
    matrix_coefficient(model, gamma, &one, &one)
}

/// Index of `cell[..depth]`; used to key memo tables by word ends.
pub(crate) fn head_index(rank: u8, cell: &[Letter], depth: usize) -> usize {
    word_index(rank, &cell[..depth.min(cell.len())])
}
