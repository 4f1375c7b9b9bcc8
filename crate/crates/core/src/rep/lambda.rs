//! The functions `λ^q(b) = e^{−½ηβ_b(p,q)}` and their chopped variants.

use num_rational::Ratio;

use crate::error::Result;
use crate::exact::ExactScalar;
use crate::space::{busemann_cocycle, chopped_product, SpaceModel};
use crate::tree::{BoundaryWord, ReducedWord, TreeModel};

/// `λ^q(b)` in floating point, for any model.
pub fn lambda<M: SpaceModel>(model: &M, q: &M::Point, b: &M::Boundary) -> Result<f64> {
    let beta = busemann_cocycle(model, b, &model.basepoint(), q)?;
    Ok((-0.5 * model.critical_exponent() * beta).exp())
}

/// `λ̄^q(b) = e^{−½η β̄_b(p,q)}` with `β̄ = |q| − 2·overline{(q|b)}`.
pub fn lambda_chopped<M: SpaceModel>(model: &M, q: &M::Point, b: &M::Boundary) -> Result<f64> {
    let p = model.basepoint();
    let len = model.distance(&p, q);
    if len == 0.0 {
        return Ok(1.0);
    }
    let beta = len - 2.0 * chopped_product(model, q, b, &p)?;
    Ok((-0.5 * model.critical_exponent() * beta).exp())
}

/// Exact `λ^q(b) = (2k−1)^{(2j−|q|)/2}` on the tree.
pub fn lambda_exact(model: &TreeModel, q: &ReducedWord, b: &BoundaryWord) -> Result<ExactScalar> {
    model.check_word(q)?;
    let beta = model.busemann_exact(b, q)?;
    model.exp_eta(beta, Ratio::new(1, 2))
}

/// `‖λ^q‖₁ = ⟨λ^q, 1⟩` as a sum over the shells where `b` agrees with `q`
/// for exactly `j` letters. The value only involves `|q|`.
pub fn lambda_l1_exact(model: &TreeModel, n: usize) -> ExactScalar {
    let m = model.branching();
    let mut total = ExactScalar::zero();
    for j in 0..=n {
        let shell = if j < n {
            model.depth_measure(j) - model.depth_measure(j + 1)
        } else {
            model.depth_measure(n)
        };
        total += shell * ExactScalar::half_power(m, 2 * j as i64 - n as i64);
    }
    total
}

/// `‖λ^q‖₁ / (|q|·e^{−½η|q|})` for `|q| = n ≥ 1`. Since `η|q| = n·log(2k−1)`
/// regardless of edge length this lies in `Q`.
pub fn lambda_estimation_ratio(model: &TreeModel, n: usize) -> ExactScalar {
    assert!(n >= 1);
    let scale =
        ExactScalar::half_power(model.branching(), n as i64) * ExactScalar::ratio(1, n as i64);
    lambda_l1_exact(model, n) * scale
}

/// Smallest and largest ratio over `1 ≤ n ≤ n_max`, with the attaining
/// lengths.
#[derive(Clone, Debug)]
pub struct LambdaWindow {
    pub low: ExactScalar,
    pub low_at: usize,
    pub high: ExactScalar,
    pub high_at: usize,
}

pub fn lambda_estimation_window(model: &TreeModel, n_max: usize) -> LambdaWindow {
    let mut w: Option<LambdaWindow> = None;
    for n in 1..=n_max {
        let r = lambda_estimation_ratio(model, n);
        w = Some(match w {
            None => LambdaWindow {
                low: r.clone(),
                low_at: n,
                high: r,
                high_at: n,
            },
            Some(mut w) => {
                if r < w.low {
                    w.low = r.clone();
                    w.low_at = n;
                }
                if r > w.high {
                    w.high = r;
                    w.high_at = n;
                }
                w
            }
        });
    }
    w.expect("n_max ≥ 1")
}

/// The limit of the ratio as `|q| → ∞`, `(m−1)/(m+1)` with `m = 2k−1`: the
/// largest constant `C` with `C|q|e^{−½η|q|} ≤ ‖λ^q‖₁` for every `q`.
pub fn lambda_lower_constant(model: &TreeModel) -> ExactScalar {
    let m = model.branching() as i64;
    ExactScalar::ratio(m - 1, m + 1)
}

/// Ratios `‖λ^q‖₁/‖λ^{q′}‖₁` for `|q| − |q′| = gap`, over `T < |q′|, |q| ≤ n_max`.
pub fn unif_bounded_ratios(
    model: &TreeModel,
    gap: usize,
    threshold: usize,
    n_max: usize,
) -> Vec<(usize, ExactScalar)> {
    ((threshold + 1)..=n_max.saturating_sub(gap))
        .map(|n| {
            (
                n,
                lambda_l1_exact(model, n + gap) / lambda_l1_exact(model, n),
            )
        })
        .collect()
}
