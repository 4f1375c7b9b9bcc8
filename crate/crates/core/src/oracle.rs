//! Reference computations by direct enumeration. They share no code with
//! the production routes beyond word enumeration and exact arithmetic, and
//! exist to cross-check them.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::exact::ExactScalar;
use crate::rep::rank::compressed_operator;
use crate::rep::SimpleFunction;
use crate::space::SpaceModel;
use crate::tree::{
    for_each_extension, sphere_size, words_of_length, BoundaryWord, Letter, ReducedWord, TreeModel,
};

/// `⟨ρ(γ)1,1⟩ = Σ_cells ν(cell)·λ^γ(cell)` over the depth-`|γ|` cells, with
/// the agreement length of each cell found by direct comparison.
pub fn coefficient_one_brute(model: &TreeModel, gamma: &ReducedWord) -> Result<ExactScalar> {
    model.check_word(gamma)?;
    let n = gamma.len();
    if n == 0 {
        return Ok(ExactScalar::one());
    }
    let g = gamma.letters();
    let mut per_match = vec![0u64; n + 1];
    for_each_extension(model.rank(), &[], n, &mut |cell| {
        let mut j = 0;
        while j < n && cell[j] == g[j] {
            j += 1;
        }
        per_match[j] += 1;
    });
    let m = model.branching();
    let cell_measure = model.depth_measure(n);
    Ok(per_match
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            ExactScalar::from_integer(c as i64)
                * ExactScalar::half_power(m, 2 * j as i64 - n as i64)
        })
        .sum::<ExactScalar>()
        * cell_measure)
}

/// `⟨ρ(γ)1,1⟩ = Σ_j ν(shell_j)·λ^γ(b_j)`, where `shell_j` is the set of
/// boundary points agreeing with `γ` for exactly `j` letters, its measure
/// is a difference of cylinder measures, and `λ^γ` is evaluated through
/// the Busemann cocycle at an explicit point `b_j` of the shell.
///
/// Shell measures and the values `e^{−½ηβ}` are tabulated once per word
/// length, so the per-word cost is one cocycle evaluation per shell.
pub struct ShellOracle<'a> {
    model: &'a TreeModel,
    max_len: usize,
    /// `shells[n][j]`: measure of the shell `j` for words of length `n`.
    shells: Vec<Vec<ExactScalar>>,
    /// `lambdas[u + max_len]` = `e^{−½η·u·edge}`.
    lambdas: Vec<ExactScalar>,
}

impl<'a> ShellOracle<'a> {
    pub fn new(model: &'a TreeModel, max_len: usize) -> Result<Self> {
        let shells = (0..=max_len)
            .map(|n| {
                (0..=n)
                    .map(|j| {
                        if j == n {
                            model.depth_measure(n)
                        } else {
                            model.depth_measure(j) - model.depth_measure(j + 1)
                        }
                    })
                    .collect()
            })
            .collect();
        let edge = model.edge_length();
        let lambdas = (-(max_len as i64)..=max_len as i64)
            .map(|u| {
                model.exp_eta(
                    edge * num_rational::Ratio::from_integer(u),
                    num_rational::Ratio::new(1, 2),
                )
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            model,
            max_len,
            shells,
            lambdas,
        })
    }

    pub fn coefficient_one(&self, gamma: &ReducedWord) -> Result<ExactScalar> {
        self.model.check_word(gamma)?;
        let n = gamma.len();
        if n > self.max_len {
            return domain(format!(
                "word length {n} exceeds the oracle table ({})",
                self.max_len
            ));
        }
        let g = gamma.letters();
        let mut total = ExactScalar::zero();
        for j in 0..=n {
            let point = if j == n {
                if n == 0 {
                    BoundaryWord::constant(Letter(0))
                } else {
                    BoundaryWord::extend_word(gamma)?
                }
            } else {
                let c = (0..self.model.num_letters())
                    .map(Letter)
                    .find(|&c| c != g[j] && (j == 0 || !c.is_inverse_of(g[j - 1])))
                    .expect("rank ≥ 1 leaves a free letter");
                BoundaryWord::new(g[..j].iter().copied().chain([c]).collect(), vec![c])?
            };
            let beta = self.model.busemann_units(&point, gamma)?;
            total += &self.shells[n][j] * &self.lambdas[(beta + self.max_len as i64) as usize];
        }
        Ok(total)
    }
}

/// `‖λ^q‖₁` for `q = a^n`, by the same cell enumeration.
pub fn lambda_l1_brute(model: &TreeModel, n: usize) -> Result<ExactScalar> {
    coefficient_one_brute(model, &ReducedWord::new(vec![Letter(0); n])?)
}

/// `⟨ρ(γ)g, h⟩` cell by cell at depth `|γ| + max(depth g, depth h)`: each
/// cell `b` contributes `ν(b)·λ^γ(b)·g(γ⁻¹b)·h(b)`, with `λ^γ` from the
/// Busemann cocycle and `γ⁻¹b` from the boundary action.
pub fn coefficient_brute(
    model: &TreeModel,
    gamma: &ReducedWord,
    g: &SimpleFunction,
    h: &SimpleFunction,
) -> Result<ExactScalar> {
    model.check_word(gamma)?;
    let depth = gamma.len() + g.depth().max(h.depth());
    let inv = gamma.inverse();
    // (Busemann value in edge units, g value index, h value index) ↦ cells.
    let mut counts: HashMap<(i64, usize, usize), u64> = HashMap::new();
    let mut err = None;
    for_each_extension(model.rank(), &[], depth, &mut |cell| {
        if err.is_some() {
            return;
        }
        let r = (|| -> Result<(i64, usize, usize)> {
            // Any continuation works: g and h see at most `depth` letters of b
            // and `depth − |γ|` letters of γ⁻¹b.
            let last = *cell.last().expect("depth ≥ 1");
            let b = BoundaryWord::new(cell.to_vec(), vec![last])?;
            let beta = model.busemann_units(&b, gamma)?;
            let moved = b.act(&inv);
            let gi = g.value_index(moved.head(g.depth())?.letters());
            let hi = h.value_index(&cell[..h.depth()]);
            Ok((beta, gi, hi))
        })();
        match r {
            Ok(k) => *counts.entry(k).or_insert(0) += 1,
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    if depth == 0 {
        return g.inner(h, model);
    }
    let m = model.branching();
    let nu = model.depth_measure(depth);
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort();
    let mut total = ExactScalar::zero();
    for ((beta, gi, hi), c) in keys {
        // λ = m^{−β/2}.
        let lam = ExactScalar::half_power(m, -beta);
        total += lam
            * ExactScalar::from_integer(c as i64)
            * g.values()[gi].clone()
            * h.values()[hi].clone();
    }
    Ok(total * nu)
}

/// `sup_b (ρ∘T_t^1)(1)(b)` by summing `λ^γ(b)/(|S_t|·⟨ρ(γ)1,1⟩)` over every
/// `γ ∈ S_t` separately at every depth-`n` cell `b`.
pub fn sup_norm_tt1_brute(model: &TreeModel, t: f64) -> Result<ExactScalar> {
    let words = model.enumerate_annulus(t)?;
    if words.is_empty() {
        return domain(format!("S_t is empty at t = {t}"));
    }
    let n = words[0].len();
    let m = model.branching();
    let size = ExactScalar::from_integer(words.len() as i64);
    let weights: Vec<ExactScalar> = words
        .iter()
        .map(|g| Ok(coefficient_one_brute(model, g)? * size.clone()))
        .collect::<Result<_>>()?;
    let mut best: Option<ExactScalar> = None;
    for cell in words_of_length(model.rank(), n) {
        let mut v = ExactScalar::zero();
        for (g, w) in words.iter().zip(&weights) {
            let j = g.common_prefix(&cell);
            v += ExactScalar::half_power(m, 2 * j as i64 - n as i64) / w.clone();
        }
        if best.as_ref().map_or(true, |b| v > *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("nonempty"))
}

const PRIME: u64 = (1 << 61) - 1;

fn mod_p(x: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let mut r = x % &p;
    if r.is_negative() {
        r += &p;
    }
    r.to_u64().expect("reduced below p")
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

/// Rank over `Z/p` of integer-valued vectors, by Gaussian elimination.
fn rank_mod_p(mut rows: Vec<Vec<u64>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod(rows[rank][c], PRIME - 2);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = mul_mod(rows[r][c], inv);
                for k in c..cols {
                    let sub = mul_mod(f, rows[rank][k]);
                    rows[r][k] = (rows[r][k] + PRIME - sub) % PRIME;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exact rank of `span{P_n ρ(γ) P_n : |γ| ≤ L}` for each `L ≤ max_len`.
///
/// Entries of `P_n ρ(γ) P_n` are rational for even `|γ|` and rational
/// multiples of `√m` for odd `|γ|`; dividing the odd ones by `√m` gives
/// rational vectors with the same real span dimension. The rank is then
/// taken modulo the prime `2^61 − 1` after clearing denominators, which can
/// only undercount.
pub fn truncation_rank_exact(model: &TreeModel, n: usize, max_len: usize) -> Result<Vec<usize>> {
    let dim = sphere_size(model.rank(), n) as usize;
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut ranks = Vec::new();
    for l in 0..=max_len {
        for g in words_of_length(model.rank(), l) {
            let op = compressed_operator(model, &g, n)?;
            let parts: Vec<&num_rational::BigRational> = op
                .iter()
                .map(|x| {
                    if l % 2 == 0 {
                        x.rational_part()
                    } else {
                        x.irrational_part()
                    }
                })
                .collect();
            let mixed = op.iter().any(|x| {
                if l % 2 == 0 {
                    !x.irrational_part().is_zero()
                } else {
                    !x.rational_part().is_zero()
                }
            });
            if mixed {
                return domain(format!(
                    "compressed operator of {g} mixes rational and √m parts"
                ));
            }
            let lcm = parts.iter().fold(BigInt::from(1), |acc, q| {
                num_integer::Integer::lcm(&acc, q.denom())
            });
            rows.push(
                parts
                    .iter()
                    .map(|q| mod_p(&(q.numer() * (&lcm / q.denom()))))
                    .collect(),
            );
        }
        debug_assert!(rows.iter().all(|r| r.len() == dim * dim));
        ranks.push(rank_mod_p(rows.clone()));
    }
    Ok(ranks)
}

/// Translation length of `γ` on the tree as `d(γ^{k+1}p, p) − d(γ^k p, p)`
/// for the given `k`.
pub fn translation_length_difference(model: &TreeModel, gamma: &ReducedWord, k: u32) -> f64 {
    let p = model.basepoint();
    let pow = |e: u32| (0..e).fold(ReducedWord::identity(), |acc, _| acc.mul(gamma));
    let d = |w: ReducedWord| model.distance(&p, &model.vertex(w));
    d(pow(k + 1)) - d(pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_coefficients() {
        let model = TreeModel::free(2).unwrap();
        let g: ReducedWord = "ab".parse().unwrap();
        assert_eq!(
            coefficient_one_brute(&model, &g).unwrap(),
            ExactScalar::ratio(2, 3)
        );
        assert_eq!(
            lambda_l1_brute(&model, 1).unwrap(),
            ExactScalar::sqrt_of(3) * ExactScalar::ratio(1, 2)
        );
        let one = SimpleFunction::one(2);
        assert_eq!(
            coefficient_brute(&model, &g, &one, &one).unwrap(),
            ExactScalar::ratio(2, 3)
        );
        let ca = SimpleFunction::indicator(&crate::tree::parse_cylinder_set(2, "a").unwrap());
        let a: ReducedWord = "a".parse().unwrap();
        // √3/12.
        assert_eq!(
            coefficient_brute(&model, &a, &ca, &ca).unwrap(),
            ExactScalar::sqrt_of(3) * ExactScalar::ratio(1, 12)
        );
    }

    #[test]
    fn modular_rank() {
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 5], vec![0, 0]]), 2);
    }
}
