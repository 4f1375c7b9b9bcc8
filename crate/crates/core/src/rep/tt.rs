//! The group-algebra averages `T_t^f` and the experiments built on them.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::rho::{apply_rho, coefficient_one, head_index, matrix_coefficient};
use super::simple::SimpleFunction;
use crate::error::{domain, Error, Result};
use crate::exact::ExactScalar;
use crate::tree::{
    for_each_extension, sphere_size, word_index, BoundaryWord, CylinderSet, Letter, ReducedWord,
    TreeModel,
};

/// Default cap on `|S_t|` for streaming experiments.
pub const DEFAULT_ANNULUS_BUDGET: u128 = 50_000_000;

/// A finitely supported element of the group algebra with nonnegative
/// coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupAlgebraVector {
    pub support: Vec<ReducedWord>,
    pub coefficients: Vec<ExactScalar>,
}

impl GroupAlgebraVector {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn coefficient_sum(&self) -> ExactScalar {
        self.coefficients.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }

    /// `(ρ∘T)v = Σ_γ c_γ ρ(γ)v`, materialized.
    pub fn apply(
        &self,
        model: &TreeModel,
        v: &SimpleFunction,
        budget: usize,
    ) -> Result<SimpleFunction> {
        let mut out = SimpleFunction::zero(model.rank());
        for (g, c) in self.support.iter().zip(&self.coefficients) {
            if c.is_zero() {
                continue;
            }
            out = out.add(&apply_rho(model, g, v, budget)?.scale(c))?;
        }
        Ok(out)
    }
}

fn annulus_words(model: &TreeModel, t: f64, budget: u128) -> Result<(usize, u128)> {
    let n = match model.annulus_length(t)? {
        Some(n) => n,
        None => return domain(format!("S_t is empty at t = {t}")),
    };
    let size = sphere_size(model.rank(), n);
    if size > budget {
        let mut max_n = 0;
        while sphere_size(model.rank(), max_n + 1) <= budget {
            max_n += 1;
        }
        return Err(Error::AnnulusBudget {
            size,
            budget,
            max_t: max_n as f64 * model.edge_f64(),
        });
    }
    Ok((n, size))
}

/// `T_t^f = (1/|S_t|) Σ_{γ∈S_t} f(z_p^{γp}) / ⟨ρ(γ)1,1⟩ · γ`.
pub fn build_tt(model: &TreeModel, f: &SimpleFunction, t: f64) -> Result<GroupAlgebraVector> {
    let support = model.enumerate_annulus(t)?;
    if support.is_empty() {
        return domain(format!("S_t is empty at t = {t}"));
    }
    let size = ExactScalar::from_integer(support.len() as i64);
    let coefficients = support
        .iter()
        .map(|g| {
            let z = BoundaryWord::extend_word(g)?;
            let fv = f.eval(&z)?;
            if fv.is_zero() {
                return Ok(ExactScalar::zero());
            }
            Ok(fv / (coefficient_one(model, g)? * size.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupAlgebraVector {
        support,
        coefficients,
    })
}

/// `⟨(ρ∘T_t^f)v, w⟩` summed term by term over `S_t`. Reference
/// implementation for small `t`.
pub fn tt_pairing_direct(
    model: &TreeModel,
    f: &SimpleFunction,
    v: &SimpleFunction,
    w: &SimpleFunction,
    t: f64,
) -> Result<ExactScalar> {
    let tt = build_tt(model, f, t)?;
    let mut total = ExactScalar::zero();
    for (g, c) in tt.support.iter().zip(&tt.coefficients) {
        if !c.is_zero() {
            total += c * &matrix_coefficient(model, g, v, w)?;
        }
    }
    Ok(total)
}

/// `⟨(ρ∘T_t^f)v, w⟩` by streaming over `S_t`.
///
/// With `D = 1 + max depth of f, v, w`, a word of length `n ≥ 2D` enters
/// only through its first `D` and last `D` letters, so words are counted by
/// that pair and one representative per class is evaluated.
pub fn tt_pairing(
    model: &TreeModel,
    f: &SimpleFunction,
    v: &SimpleFunction,
    w: &SimpleFunction,
    t: f64,
    annulus_budget: u128,
) -> Result<ExactScalar> {
    let (n, size) = annulus_words(model, t, annulus_budget)?;
    let rank = model.rank();
    let d = 1 + f.depth().max(v.depth()).max(w.depth());
    let memo = n >= 2 * d;
    let classes = word_classes(rank, n, |word| {
        if memo {
            (head_index(rank, word, d), word_index(rank, &word[n - d..]))
        } else {
            (word_index(rank, word), usize::MAX)
        }
    });
    let sn = ExactScalar::from_integer(size as i64);
    let terms: Vec<ExactScalar> = classes
        .par_iter()
        .map(|(_, (count, rep))| -> Result<ExactScalar> {
            let g = ReducedWord::new(rep.clone())?;
            let fv = f.eval(&BoundaryWord::extend_word(&g)?)?;
            if fv.is_zero() {
                return Ok(ExactScalar::zero());
            }
            let coeff = matrix_coefficient(model, &g, v, w)?;
            Ok(fv * coeff * ExactScalar::from_integer(*count as i64) / coefficient_one(model, &g)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(terms.into_iter().sum::<ExactScalar>() / sn)
}

/// Counts the words of length `n` by `key`, keeping the lexicographically
/// smallest word of each class. Sorted by key.
fn word_classes<K>(rank: u8, n: usize, key: K) -> Vec<((usize, usize), (u64, Vec<Letter>))>
where
    K: Fn(&[Letter]) -> (usize, usize) + Sync,
{
    let parts: Vec<HashMap<(usize, usize), (u64, Vec<Letter>)>> = (0..2 * rank)
        .into_par_iter()
        .map(|first| {
            let mut table: HashMap<(usize, usize), (u64, Vec<Letter>)> = HashMap::new();
            for_each_extension(rank, &[Letter(first)], n - 1, &mut |word| {
                table
                    .entry(key(word))
                    .and_modify(|e| e.0 += 1)
                    .or_insert_with(|| (1, word.to_vec()));
            });
            table
        })
        .collect();
    let mut merged: HashMap<(usize, usize), (u64, Vec<Letter>)> = HashMap::new();
    for part in parts {
        for (k, (c, rep)) in part {
            merged
                .entry(k)
                .and_modify(|e| {
                    e.0 += c;
                    if rep < e.1 {
                        e.1 = rep.clone();
                    }
                })
                .or_insert((c, rep));
        }
    }
    let mut out: Vec<_> = merged.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Number of words of `S_t` beginning with each prefix, by prefix length.
fn prefix_counts(rank: u8, n: usize) -> Vec<Vec<u64>> {
    let mut counts: Vec<Vec<u64>> = (0..=n)
        .map(|l| vec![0u64; sphere_size(rank, l) as usize])
        .collect();
    for_each_extension(rank, &[], n, &mut |word| {
        for (l, table) in counts.iter_mut().enumerate() {
            table[word_index(rank, &word[..l])] += 1;
        }
    });
    counts
}

/// `‖(ρ∘T_t^1)(1)‖_∞`. The function is `Σ_j N_j(b) λ_j / (|S_t|·⟨ρ(γ)1,1⟩)`
/// where `N_j(b)` counts the words of `S_t` agreeing with `b` for exactly `j`
/// letters; it is constant on depth-`n` cylinders and is evaluated on every
/// one of them.
pub fn sup_norm_tt1(model: &TreeModel, t: f64, annulus_budget: u128) -> Result<ExactScalar> {
    let (n, size) = annulus_words(model, t, annulus_budget)?;
    let rank = model.rank();
    let counts = prefix_counts(rank, n);
    let mut histograms: HashMap<Vec<u64>, ()> = HashMap::new();
    for_each_extension(rank, &[], n, &mut |cell| {
        let at_least: Vec<u64> = (0..=n)
            .map(|l| counts[l][word_index(rank, &cell[..l])])
            .collect();
        let hist: Vec<u64> = (0..=n)
            .map(|j| at_least[j] - if j < n { at_least[j + 1] } else { 0 })
            .collect();
        histograms.entry(hist).or_insert(());
    });
    // ⟨ρ(γ)1,1⟩ depends on γ only through |γ|.
    let first = ReducedWord::new(vec![Letter(0); n])?;
    let denom = coefficient_one(model, &first)? * ExactScalar::from_integer(size as i64);
    let m = model.branching();
    let mut hists: Vec<Vec<u64>> = histograms.into_keys().collect();
    hists.sort();
    let best = hists
        .iter()
        .map(|hist| {
            let s: ExactScalar = hist
                .iter()
                .enumerate()
                .map(|(j, &c)| {
                    ExactScalar::from_integer(c as i64)
                        * ExactScalar::half_power(m, 2 * j as i64 - n as i64)
                })
                .sum();
            s / denom.clone()
        })
        .max()
        .expect("at least one cell");
    Ok(best)
}

/// Wall-clock timer that reads 0 on wasm32, where the clock is unavailable.
struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Stopwatch {
    fn start() -> Self {
        Stopwatch(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    fn millis(&self) -> u128 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_millis();
        #[cfg(target_arch = "wasm32")]
        0
    }
}

/// One row of a convergence series.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub t: f64,
    pub s_t_size: u128,
    pub value: ExactScalar,
    pub target: ExactScalar,
    pub abs_error: ExactScalar,
    pub wall_ms: u128,
}

/// `⟨(ρ∘T_t^{χ_U})χ_V, χ_W⟩` against its limit `ν(U∩W)ν(V)` for each `t`.
pub fn convergence_experiment(
    model: &TreeModel,
    u: &CylinderSet,
    v: &CylinderSet,
    w: &CylinderSet,
    t_list: &[f64],
    annulus_budget: u128,
) -> Result<Vec<ConvergenceRow>> {
    if t_list.windows(2).any(|p| p[1] <= p[0]) {
        return domain("t values must be increasing");
    }
    let target = u.intersection(w)?.measure(model)? * v.measure(model)?;
    let (fu, fv, fw) = (
        SimpleFunction::indicator(u),
        SimpleFunction::indicator(v),
        SimpleFunction::indicator(w),
    );
    let mut rows = Vec::new();
    for &t in t_list {
        let start = Stopwatch::start();
        let value = tt_pairing(model, &fu, &fv, &fw, t, annulus_budget)?;
        let s_t_size = model.annulus_size(t)?;
        let abs_error = (&value - &target).abs();
        rows.push(ConvergenceRow {
            t,
            s_t_size,
            value,
            target: target.clone(),
            abs_error,
            wall_ms: start.millis(),
        });
    }
    Ok(rows)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    crate::counting::least_squares(&xs, &ys).0
}
