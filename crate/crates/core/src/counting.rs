//! Orbit statistics: annulus sizes, growth exponents and two-sided
//! directional frequencies.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::exact::ExactScalar;
use crate::tree::{
    count_prefix_suffix, for_each_extension, sphere_size, BoundaryWord, CylinderSet, ReducedWord,
    TreeModel,
};

/// Ordinary least squares `y ≈ slope·x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub eta_hat: f64,
    pub residual: f64,
    pub points: Vec<(f64, u128)>,
}

/// Slope of `log N(t)` against `t`.
pub fn growth_exponent(t_list: &[f64], count: impl Fn(f64) -> Result<u128>) -> Result<GrowthFit> {
    if t_list.len() < 3 {
        return domain("growth fit needs at least 3 radii");
    }
    let points: Vec<(f64, u128)> = t_list
        .iter()
        .map(|&t| Ok((t, count(t)?)))
        .collect::<Result<_>>()?;
    if points.iter().any(|p| p.1 == 0) {
        return domain("empty ball in growth fit");
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 as f64).ln()).collect();
    let (eta_hat, _, residual) = least_squares(&xs, &ys);
    Ok(GrowthFit {
        eta_hat,
        residual,
        points,
    })
}

/// `N(t) = #{γ : d(p, γp) ≤ t}` on the tree.
pub fn tree_ball_count(model: &TreeModel, t: f64) -> u128 {
    let max_n = (t / model.edge_f64() + 1e-12).floor() as usize;
    (0..=max_n).map(|n| sphere_size(model.rank(), n)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistributionPoint {
    pub t: f64,
    pub s_t_size: u128,
    pub count: u128,
    pub freq: ExactScalar,
    pub target: ExactScalar,
    pub abs_error: ExactScalar,
}

/// `(1/|S_t|)·#{γ ∈ S_t : z_p^{γ⁻¹p} ∈ U, z_p^{γp} ∈ U′}` by enumeration.
pub fn equidistribution(
    model: &TreeModel,
    u: &CylinderSet,
    u_prime: &CylinderSet,
    t: f64,
) -> Result<EquidistributionPoint> {
    let words = model.enumerate_annulus(t)?;
    if words.is_empty() {
        return domain(format!("S_t is empty at t = {t}"));
    }
    let mut count = 0u128;
    for g in &words {
        let back = BoundaryWord::extend_word(&g.inverse())?;
        let fwd = BoundaryWord::extend_word(g)?;
        if u.contains(&back)? && u_prime.contains(&fwd)? {
            count += 1;
        }
    }
    point(model, u, u_prime, t, words.len() as u128, count)
}

/// Same count as [`equidistribution`], streamed without materializing
/// `S_t`; usable at larger `t`.
pub fn equidistribution_streaming(
    model: &TreeModel,
    u: &CylinderSet,
    u_prime: &CylinderSet,
    t: f64,
) -> Result<EquidistributionPoint> {
    let n = match model.annulus_length(t)? {
        Some(n) => n,
        None => return domain(format!("S_t is empty at t = {t}")),
    };
    let mut count = 0u128;
    let mut err = None;
    let mut inv = Vec::with_capacity(n);
    for_each_extension(model.rank(), &[], n, &mut |w| {
        if err.is_some() {
            return;
        }
        inv.clear();
        inv.extend(w.iter().rev().map(|l| l.inverse()));
        let r = (|| -> Result<bool> {
            let back = BoundaryWord::new(inv.clone(), vec![*inv.last().unwrap()])?;
            let fwd = BoundaryWord::new(w.to_vec(), vec![*w.last().unwrap()])?;
            Ok(u.contains(&back)? && u_prime.contains(&fwd)?)
        })();
        match r {
            Ok(true) => count += 1,
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    point(model, u, u_prime, t, sphere_size(model.rank(), n), count)
}

/// The same frequency counted with transfer matrices: a word lies in the
/// set iff it begins with a prefix of `U′` and ends with the inverse of a
/// prefix of `U`. Needs `|γ|` at least the depth of both sets.
pub fn equidistribution_transfer(
    model: &TreeModel,
    u: &CylinderSet,
    u_prime: &CylinderSet,
    t: f64,
) -> Result<EquidistributionPoint> {
    let n = match model.annulus_length(t)? {
        Some(n) => n,
        None => return domain(format!("S_t is empty at t = {t}")),
    };
    if n < u.depth().max(u_prime.depth()) {
        return domain("transfer count needs words at least as long as the set depths");
    }
    let mut count = 0u128;
    for a in u.prefixes() {
        let suffix: ReducedWord = a.inverse();
        for b in u_prime.prefixes() {
            count += count_prefix_suffix(model.rank(), b, &suffix, n)?;
        }
    }
    point(model, u, u_prime, t, sphere_size(model.rank(), n), count)
}

fn point(
    model: &TreeModel,
    u: &CylinderSet,
    u_prime: &CylinderSet,
    t: f64,
    size: u128,
    count: u128,
) -> Result<EquidistributionPoint> {
    let freq =
        ExactScalar::from_rational(num_rational::BigRational::new(count.into(), size.into()));
    let target = u.measure(model)? * u_prime.measure(model)?;
    let abs_error = (&freq - &target).abs();
    Ok(EquidistributionPoint {
        t,
        s_t_size: size,
        count,
        freq,
        target,
        abs_error,
    })
}
