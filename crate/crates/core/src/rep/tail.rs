use serde::Serialize;

use super::lambda::{lambda_l1_exact, lambda_lower_constant};
use super::rho::matrix_coefficient;
use super::simple::SimpleFunction;
use crate::error::{domain, Error, Result};
use crate::exact::ExactScalar;
use crate::space::SpaceModel;
use crate::tree::{BoundaryWord, CylinderSet, ReducedWord, TreeModel};

#[derive(Clone, Debug, Serialize)]
pub struct TailBound {
    /// `⟨λ^q, χ_V⟩ / ‖λ^q‖₁`, exact.
    pub lhs: ExactScalar,
    /// `C₀·e^a/|q|`.
    pub rhs: f64,
    pub c0: f64,
    /// `|q| ≤ a`, where the bound is immediate from `lhs ≤ 1`.
    pub short_branch: bool,
}

/// `C₀ = e^{δη}·ν(B)·e^{δ}/C` with `C` the lower constant of the
/// `‖λ^q‖₁ ≍ |q|e^{−½η|q|}` estimate.
pub fn tail_constant(model: &TreeModel) -> f64 {
    let de = model.delta() * model.critical_exponent();
    de.exp() * model.delta().exp() / lambda_lower_constant(model).to_f64()
}

/// Checks `⟨λ^q, χ_V⟩/‖λ^q‖₁ ≤ C₀e^a/|q|` for `z_p^q ∉ V(a)`.
pub fn tail_bound_check(
    model: &TreeModel,
    q: &ReducedWord,
    v: &CylinderSet,
    a: f64,
) -> Result<TailBound> {
    if q.is_empty() {
        return domain("tail bound needs q ≠ p");
    }
    let z = BoundaryWord::extend_word(q)?;
    if v.thicken(a, model)?.contains(&z)? {
        return domain(format!("direction of {q} lies in V({a})"));
    }
    let len = model.edge_f64() * q.len() as f64;
    let c0 = tail_constant(model);
    let rhs = c0 * a.exp() / len;
    let one = SimpleFunction::one(model.rank());
    let pairing = matrix_coefficient(model, q, &one, &SimpleFunction::indicator(v))?;
    let lhs = pairing / lambda_l1_exact(model, q.len());
    if lhs.to_f64() > rhs {
        return Err(Error::Assertion(format!(
            "tail bound fails at q = {q}, V = {v}, a = {a}: {} > {rhs}",
            lhs.to_decimal_string(17)
        )));
    }
    Ok(TailBound {
        lhs,
        rhs,
        c0,
        short_branch: len <= a,
    })
}
