//! Marked length spectra and the effect of rescaling the metric.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::plane::{FuchsianGroup, MobiusIsometry};
use crate::rep::{matrix_coefficient, SimpleFunction};
use crate::space::SpaceModel;
use crate::tree::{EdgeLength, ReducedWord, TreeModel};

/// `ℓ(γ)` on the tree: the cyclically reduced length times the edge length.
pub fn tree_translation_length(model: &TreeModel, gamma: &ReducedWord) -> Result<EdgeLength> {
    model.check_word(gamma)?;
    let (_, core) = gamma.cyclic_reduction();
    Ok(model.edge_length() * Ratio::from_integer(core.len() as i64))
}

/// `d(γ^k p, p)/k` on the tree.
pub fn tree_displacement_ratio(model: &TreeModel, gamma: &ReducedWord, k: u32) -> f64 {
    let pow = (0..k).fold(ReducedWord::identity(), |acc, _| acc.mul(gamma));
    model.distance(&model.basepoint(), &model.vertex(pow)) / k as f64
}

/// `ℓ(γ) = 2·arccosh(|tr γ|/2)` for a hyperbolic element. Parabolic
/// elements have length zero; elliptic ones are rejected.
pub fn plane_translation_length(g: &MobiusIsometry) -> Result<f64> {
    let tr = g.trace().abs();
    if tr < 2.0 - 1e-12 {
        return domain(format!(
            "elliptic element (|trace| = {tr} < 2): zero translation length"
        ));
    }
    Ok(2.0 * (tr / 2.0).max(1.0).acosh())
}

/// `d(g^k·0, 0)/k`.
pub fn plane_displacement_ratio(g: &MobiusIsometry, k: u32) -> f64 {
    g.pow(k).displacement() / k as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkedLengthRow {
    pub word: String,
    pub length: f64,
    /// Exact value when the model provides one.
    pub exact: Option<String>,
    /// `d(γ^k p, p)/k` at the largest `k` used.
    pub limit_estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkedLengthTable {
    pub rows: Vec<MarkedLengthRow>,
}

/// Checks every length against the displacement limit: on the tree
/// `d(γ^{k+1}p,p) − d(γ^k p,p) = ℓ(γ)` exactly for `k ≥ 1`.
pub fn tree_marked_lengths(
    model: &TreeModel,
    words: &[ReducedWord],
    max_power: u32,
) -> Result<MarkedLengthTable> {
    let mut rows = Vec::new();
    for g in words {
        let l = tree_translation_length(model, g)?;
        let lf = *l.numer() as f64 / *l.denom() as f64;
        for k in 1..max_power {
            let diff = crate::oracle::translation_length_difference(model, g, k);
            if (diff - lf).abs() > 1e-9 {
                return Err(Error::Assertion(format!(
                    "ℓ({g}) = {l} but d(γ^{}p,p) − d(γ^{k}p,p) = {diff}",
                    k + 1
                )));
            }
        }
        rows.push(MarkedLengthRow {
            word: g.to_string(),
            length: lf,
            exact: Some(l.to_string()),
            limit_estimate: tree_displacement_ratio(model, g, max_power),
        });
    }
    Ok(MarkedLengthTable { rows })
}

/// Plane lengths, checked against the increments `d(g^{k+1}·0,0) − d(g^k·0,0)`,
/// which converge to `ℓ` at rate `e^{−kℓ}`.
pub fn plane_marked_lengths(
    group: &FuchsianGroup,
    words: &[Vec<u8>],
    max_power: u32,
) -> Result<MarkedLengthTable> {
    let mut rows = Vec::new();
    for w in words {
        let g = group.evaluate(w);
        let l = plane_translation_length(&g)?;
        let k = max_power.max(2);
        // The increment approaches ℓ like e^{−ℓ(j−1)}; take j with ℓ(j−1) ≥ 30.
        let j = ((30.0 / l).ceil() as u32 + 1).clamp(k, 64);
        let diff = g.pow(j).displacement() - g.pow(j - 1).displacement();
        if (diff - l).abs() > 1e-6 * l.max(1.0) {
            return Err(Error::Assertion(format!(
                "ℓ({}) = {l} but the displacement increment is {diff}",
                group.format_word(w)
            )));
        }
        rows.push(MarkedLengthRow {
            word: group.format_word(w),
            length: l,
            exact: None,
            limit_estimate: plane_displacement_ratio(&g, k),
        });
    }
    Ok(MarkedLengthTable { rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct RescaleReport {
    pub scale: String,
    pub lengths_checked: usize,
    pub coefficients_checked: usize,
    /// Both comparisons are exact; these are `true` iff every one matched.
    pub lengths_scaled: bool,
    pub coefficients_equal: bool,
}

/// Builds the tree with edge length multiplied by `c` and checks that
/// `ℓ_c(γ) = c·ℓ(γ)` and `⟨ρ_c(γ)g,h⟩ = ⟨ρ(γ)g,h⟩` exactly.
pub fn rescaling_invariance_check(
    base: &TreeModel,
    c: Ratio<i64>,
    words: &[ReducedWord],
    pairs: &[(SimpleFunction, SimpleFunction)],
) -> Result<RescaleReport> {
    if c <= Ratio::from_integer(0) {
        return domain("scale factor must be positive");
    }
    let scaled = TreeModel::new(base.rank(), base.edge_length() * c)?;
    let mut lengths_scaled = true;
    let mut coefficients_equal = true;
    let mut witness = None;
    let mut coefficients = 0;
    for g in words {
        let (l1, lc) = (
            tree_translation_length(base, g)?,
            tree_translation_length(&scaled, g)?,
        );
        if lc != l1 * c {
            lengths_scaled = false;
            witness.get_or_insert(format!("ℓ_c({g}) = {lc} ≠ {c}·{l1}"));
        }
        for (u, v) in pairs {
            let (a, b) = (
                matrix_coefficient(base, g, u, v)?,
                matrix_coefficient(&scaled, g, u, v)?,
            );
            coefficients += 1;
            if a != b {
                coefficients_equal = false;
                witness.get_or_insert(format!("⟨ρ(γ)g,h⟩ differs at γ = {g}: {a} vs {b}"));
            }
        }
    }
    if let Some(w) = witness {
        return Err(Error::Assertion(w));
    }
    Ok(RescaleReport {
        scale: c.to_string(),
        lengths_checked: words.len(),
        coefficients_checked: coefficients,
        lengths_scaled,
        coefficients_equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Preset;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        let m = TreeModel::free(2).unwrap();
        assert_eq!(
            tree_translation_length(&m, &w("abA")).unwrap(),
            Ratio::from_integer(1)
        );
        assert_eq!(
            tree_translation_length(&m, &ReducedWord::identity()).unwrap(),
            Ratio::from_integer(0)
        );
        let m2 = TreeModel::new(2, Ratio::from_integer(2)).unwrap();
        assert_eq!(
            tree_translation_length(&m2, &w("ab")).unwrap(),
            Ratio::from_integer(4)
        );
        let g = MobiusIsometry::translation(2.0);
        assert!((g.trace() - 2.0 * 1f64.cosh()).abs() < 1e-12);
        assert!((plane_translation_length(&g).unwrap() - 2.0).abs() < 1e-12);
        assert!(plane_translation_length(&MobiusIsometry::rotation(1.0)).is_err());
    }

    #[test]
    fn tables_verify_against_limits() {
        let m = TreeModel::free(2).unwrap();
        let words: Vec<ReducedWord> = ["a", "abA", "abAB", "aabAA", "BaBab"]
            .iter()
            .map(|s| w(s))
            .collect();
        let t = tree_marked_lengths(&m, &words, 6).unwrap();
        assert_eq!(t.rows[1].exact.as_deref(), Some("1"));
        let group = FuchsianGroup::build(Preset::Genus2Octagon);
        let pw: Vec<Vec<u8>> = vec![vec![0], vec![0, 1], vec![0, 5, 2]];
        let t = plane_marked_lengths(&group, &pw, 6).unwrap();
        assert!(t
            .rows
            .iter()
            .all(|r| r.length > 2.0 && r.limit_estimate >= r.length));
    }

    #[test]
    fn rescale_examples() {
        let m = TreeModel::free(2).unwrap();
        let one = SimpleFunction::one(2);
        let words = vec![w("ab"), w("aB")];
        let r =
            rescaling_invariance_check(&m, Ratio::new(3, 2), &words, &[(one.clone(), one.clone())])
                .unwrap();
        assert!(r.lengths_scaled && r.coefficients_equal);
        let scaled = TreeModel::new(2, Ratio::new(3, 2)).unwrap();
        assert_eq!(
            crate::rep::coefficient_one(&scaled, &w("ab")).unwrap(),
            crate::exact::ExactScalar::ratio(2, 3)
        );
        assert!(rescaling_invariance_check(&m, Ratio::from_integer(1), &words, &[]).is_ok());
    }
}
