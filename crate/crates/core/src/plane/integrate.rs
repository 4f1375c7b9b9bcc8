//! Numerical integration over the boundary circle with its normalized
//! angle measure.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::measure::{integrate, Estimate};

const LEAF: usize = 8;

/// Sum with a fixed binary tree over the input order, so the result does
/// not depend on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = (0.5 * (a + b), (a * b).sqrt());
        a = next.0;
        b = next.1;
    }
    0.5 * (a + b)
}

/// `∫ P(z, θ)^{1/2} dθ/2π` for `|z| = tanh(d/2)`, which is
/// `e^{−d/2} / AGM(1, e^{−d})` (a complete elliptic integral).
pub fn spherical_function(d: f64) -> f64 {
    (-0.5 * d).exp() / agm(1.0, (-d).exp())
}

/// `∫ f dθ/2π` over `[0, 2π)` by adaptive quadrature on the pieces cut at
/// `breakpoints` (radians).
pub fn circle_quadrature(f: &dyn Fn(f64) -> f64, breakpoints: &[f64], tol: f64) -> f64 {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .map(|&t| super::normalize_angle(t))
        .collect();
    cuts.push(0.0);
    cuts.push(2.0 * PI);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces: Vec<f64> = cuts
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], tol))
        .collect();
    pairwise_sum(&pieces) / (2.0 * PI)
}

/// Monte Carlo `∫ f dν` with `n` uniform angles drawn from a seeded
/// ChaCha stream. Values are evaluated in parallel and summed pairwise in
/// sample order.
pub fn mc_boundary_integral(
    f: &(dyn Fn(f64) -> f64 + Sync),
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    mc_on_interval(f, 0.0, 2.0 * PI, n, seed).map(|(e, _)| e)
}

/// Monte Carlo `∫_lo^hi f dθ/2π`; also returns the raw sample values.
pub(crate) fn mc_on_interval(
    f: &(dyn Fn(f64) -> f64 + Sync),
    lo: f64,
    hi: f64,
    n: usize,
    seed: u64,
) -> Result<(Estimate, usize)> {
    if n == 0 {
        return domain("Monte Carlo needs at least one sample");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    let values: Vec<f64> = angles.par_iter().map(|&t| f(t)).collect();
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    let nf = n as f64;
    let mean = pairwise_sum(&values) / nf;
    let var = if n > 1 {
        ((pairwise_sum(&squares) / nf - mean * mean) * nf / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    let scale = (hi - lo) / (2.0 * PI);
    Ok((
        Estimate {
            value: scale * mean,
            std_error: scale * (var / nf).sqrt(),
        },
        n,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_is_order_fixed() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let direct: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - direct).abs() < 1e-12);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn mc_examples() {
        let one = mc_boundary_integral(&|_| 1.0, 1000, 7).unwrap();
        assert_eq!((one.value, one.std_error), (1.0, 0.0));
        let half = mc_boundary_integral(&|t| if t < PI { 1.0 } else { 0.0 }, 20_000, 3).unwrap();
        assert!((half.value - 0.5).abs() < 3.0 * half.std_error);
        let a = mc_boundary_integral(&|t| t.sin().powi(2), 5000, 11).unwrap();
        let b = mc_boundary_integral(&|t| t.sin().powi(2), 5000, 11).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert!(mc_boundary_integral(&|_| 1.0, 0, 1).is_err());
    }

    #[test]
    fn spherical_function_matches_quadrature() {
        for d in [0.0, 0.5, 2.0, 4.0, 9.0] {
            let r = (d / 2.0f64).tanh();
            let p = move |t: f64| ((1.0 - r * r) / (1.0 - 2.0 * r * t.cos() + r * r)).sqrt();
            let q = circle_quadrature(&p, &[0.0], 1e-13);
            assert!(
                (q - spherical_function(d)).abs() < 1e-9 * q.max(1e-3),
                "d = {d}: {q} vs {}",
                spherical_function(d)
            );
        }
        assert_eq!(spherical_function(0.0), 1.0);
    }
}
