use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::arcs::ArcSet;
use super::group::{FuchsianGroup, Preset};
use super::integrate::{mc_on_interval, pairwise_sum, spherical_function};
use super::mobius::{disk_distance, normalize_angle, MobiusIsometry};
use super::orbit::{shared_cache, OrbitCache, OrbitElement};
use crate::error::{domain, Error, Result};
use crate::measure::{Estimate, OrbitSource, ShellIntegral};
use crate::space::{BallMeasure, Ideal, ModelSampler, SpaceModel};

/// A boundary point: an angle in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(theta: f64) -> Self {
        Self(normalize_angle(theta))
    }

    pub fn from_turns(x: f64) -> Self {
        Self::new(x * 2.0 * PI)
    }

    pub fn angle(&self) -> f64 {
        self.0
    }

    pub fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.0)
    }
}

pub const DEFAULT_SAMPLES: usize = 1 << 16;

/// The Poincaré disk with a cocompact Fuchsian group, basepoint at the
/// origin and `η = 1`.
#[derive(Clone, Debug)]
pub struct PlaneModel {
    group: Arc<FuchsianGroup>,
    delta: f64,
    cache_radius: f64,
    mc_samples: usize,
}

impl PlaneModel {
    pub fn new(preset: Preset) -> Self {
        let cache_radius = match preset {
            Preset::Genus2Octagon => 12.5,
            Preset::Triangle237 => 8.0,
        };
        Self {
            group: Arc::new(FuchsianGroup::build(preset)),
            delta: 2f64.ln(),
            cache_radius,
            mc_samples: DEFAULT_SAMPLES,
        }
    }

    pub fn genus2() -> Self {
        Self::new(Preset::Genus2Octagon)
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_cache_radius(mut self, r: f64) -> Self {
        self.cache_radius = r;
        self
    }

    pub fn with_mc_samples(mut self, n: usize) -> Self {
        self.mc_samples = n;
        self
    }

    pub fn group(&self) -> &FuchsianGroup {
        &self.group
    }

    pub fn preset(&self) -> Preset {
        self.group.preset
    }

    pub fn cache_radius(&self) -> f64 {
        self.cache_radius
    }

    /// The shared orbit cache, built (or loaded) on first use.
    pub fn orbit(&self) -> Result<Arc<OrbitCache>> {
        shared_cache(&self.group, self.cache_radius)
    }

    /// `S_t = {γ : d(0, γ·0) ∈ (t − R, t + R)}`.
    pub fn annulus(&self, t: f64) -> Result<Vec<OrbitElement>> {
        let r = self.quotient_radius();
        if !(t > r) {
            return domain(format!("annulus needs t > R = {r}, got {t}"));
        }
        Ok(self.orbit()?.window(t - r, t + r)?.to_vec())
    }

    pub fn ball_count(&self, t: f64) -> Result<u128> {
        Ok(self.orbit()?.ball_count(t)? as u128)
    }

    fn check_inside(z: Complex64) -> Result<()> {
        if !(z.norm_sqr() < 1.0) {
            return domain(format!("point {z} is not inside the unit disk"));
        }
        Ok(())
    }

    /// Poisson kernel `P(z, b) = (1 − |z|²)/|b − z|²`.
    pub fn poisson(z: Complex64, b: &CirclePoint) -> f64 {
        (1.0 - z.norm_sqr()) / (b.unit() - z).norm_sqr()
    }

    /// `β_b(x, y) = log P(x, b) − log P(y, b)`.
    pub fn busemann_disk(b: &CirclePoint, x: Complex64, y: Complex64) -> Result<f64> {
        Self::check_inside(x)?;
        Self::check_inside(y)?;
        Ok(Self::poisson(x, b).ln() - Self::poisson(y, b).ln())
    }

    /// `λ^{γ·0}(b) = P(γ·0, b)^{1/2} = 1/|ᾱe^{iθ} − β|`, computed from the
    /// matrix so that far orbit points keep full precision.
    pub fn lambda_element(g: &MobiusIsometry, b: &CirclePoint) -> f64 {
        let (al, be) = g.su11();
        1.0 / (al.conj() * b.unit() - be).norm()
    }

    /// `z_p^{γ·0}`.
    pub fn element_direction(g: &MobiusIsometry) -> CirclePoint {
        CirclePoint::new(g.origin_image().arg())
    }

    /// `⟨ρ(γ)1, 1⟩ = ‖λ^{γ·0}‖₁`, a function of `d(0, γ·0)` alone.
    pub fn coefficient_one(d: f64) -> f64 {
        spherical_function(d)
    }

    /// `(ρ(γ)v)(b) = λ^{γ·0}(b)·v(γ⁻¹b)`.
    pub fn apply_rho<'a>(
        g: &'a MobiusIsometry,
        v: &'a dyn Fn(f64) -> f64,
    ) -> impl Fn(f64) -> f64 + 'a {
        let inv = g.inverse();
        move |theta| {
            let b = CirclePoint::new(theta);
            Self::lambda_element(g, &b) * v(inv.apply_angle(theta))
        }
    }

    /// `⟨ρ(γ)u, v⟩` for functions given by their values and their
    /// discontinuities, by adaptive quadrature.
    pub fn matrix_coefficient(
        g: &MobiusIsometry,
        u: &dyn Fn(f64) -> f64,
        u_breaks: &[f64],
        v: &dyn Fn(f64) -> f64,
        v_breaks: &[f64],
        tol: f64,
    ) -> f64 {
        let ru = Self::apply_rho(g, u);
        let mut cuts: Vec<f64> = u_breaks.iter().map(|&t| g.apply_angle(t)).collect();
        cuts.extend_from_slice(v_breaks);
        // The kernel peaks in the direction of γ·0.
        cuts.push(Self::element_direction(g).angle());
        super::circle_quadrature(&|t| ru(t) * v(t), &cuts, tol)
    }
}

impl SpaceModel for PlaneModel {
    type Point = Complex64;
    type Boundary = CirclePoint;

    fn basepoint(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn delta(&self) -> f64 {
        self.delta
    }

    fn quotient_radius(&self) -> f64 {
        self.group.circumradius
    }

    fn critical_exponent(&self) -> f64 {
        1.0
    }

    fn contains(&self, x: &Complex64) -> bool {
        x.norm_sqr() < 1.0
    }

    fn distance(&self, x: &Complex64, y: &Complex64) -> f64 {
        disk_distance(*x, *y)
    }

    fn gromov_oracle(
        &self,
        x: &Ideal<Complex64, CirclePoint>,
        y: &Ideal<Complex64, CirclePoint>,
        base: &Complex64,
    ) -> Result<f64> {
        let to = MobiusIsometry::moving_to_origin(*base);
        let zero = Complex64::new(0.0, 0.0);
        let moved = |z: &Ideal<Complex64, CirclePoint>| match z {
            Ideal::Point(p) => Ideal::Point(to.apply_disk(*p)),
            Ideal::Boundary(b) => Ideal::Boundary(CirclePoint::new(to.apply_angle(b.angle()))),
        };
        Ok(match (moved(x), moved(y)) {
            (Ideal::Point(p), Ideal::Point(q)) => {
                0.5 * (disk_distance(zero, p) + disk_distance(zero, q) - disk_distance(p, q))
            }
            (Ideal::Point(p), Ideal::Boundary(b)) | (Ideal::Boundary(b), Ideal::Point(p)) => {
                0.5 * (disk_distance(zero, p) + Self::poisson(p, &b).ln())
            }
            (Ideal::Boundary(b), Ideal::Boundary(c)) => -(0.5 * (b.unit() - c.unit()).norm()).ln(),
        })
    }

    fn direction(&self, q: &Complex64) -> Result<CirclePoint> {
        if q.norm_sqr() == 0.0 {
            return domain("the basepoint has no direction");
        }
        Ok(CirclePoint::new(q.arg()))
    }

    fn ray_point(&self, b: &CirclePoint, s: f64) -> Result<Complex64> {
        if s < 0.0 {
            return domain("ray parameter must be nonnegative");
        }
        Ok(b.unit() * (s / 2.0).tanh())
    }

    fn same_boundary(&self, b: &CirclePoint, c: &CirclePoint) -> bool {
        (b.unit() - c.unit()).norm() < 1e-15
    }
}

impl ModelSampler for PlaneModel {
    fn sample_point<R: Rng>(&self, rng: &mut R) -> Complex64 {
        let r = rng.gen_range(0.0..6.0f64);
        Complex64::from_polar((r / 2.0).tanh(), rng.gen_range(0.0..2.0 * PI))
    }

    fn sample_boundary<R: Rng>(&self, rng: &mut R) -> CirclePoint {
        CirclePoint::new(rng.gen_range(0.0..2.0 * PI))
    }

    fn sample_near<R: Rng>(&self, b: &CirclePoint, r: f64, rng: &mut R) -> Result<CirclePoint> {
        if r < 0.0 {
            return domain("radius must be nonnegative");
        }
        let max = 2.0 * r.min(1.0).asin();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        Ok(CirclePoint::new(
            b.angle() + sign * rng.gen_range(0.0..=max),
        ))
    }
}

/// `σ(b, c) = sin(Δ/2)` where `Δ ∈ [0, π]` is the angle between them, so the
/// open ball of radius `r < 1` is an arc of half-width `2·arcsin(r)`.
impl BallMeasure for PlaneModel {
    fn ball_measure(&self, _b: &CirclePoint, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return domain("ball radius must be positive");
        }
        Ok(if r >= 1.0 { 1.0 } else { 2.0 * r.asin() / PI })
    }
}

impl PlaneModel {
    /// MC over the angles `Δ` with `lo ≤ σ < hi`; by symmetry of the circle
    /// the integrand depends on `Δ` only.
    fn shell_mc(
        &self,
        f: &(dyn Fn(f64) -> f64 + Sync),
        lo: f64,
        hi: Option<f64>,
        seed: u64,
    ) -> Result<Estimate> {
        let d_lo = 2.0 * lo.min(1.0).asin();
        let d_hi = hi.map_or(PI, |h| 2.0 * h.min(1.0).asin());
        if d_hi <= d_lo {
            return Ok(Estimate {
                value: 0.0,
                std_error: 0.0,
            });
        }
        let g = |delta: f64| f((0.5 * delta).sin());
        // Both sides of b: twice the one-sided integral. Angles are drawn
        // log-uniformly, which tames integrands that blow up like 1/Δ at b.
        let (e, _) = if d_lo > 0.0 {
            let h = |v: f64| {
                let delta = v.exp();
                g(delta) * delta
            };
            mc_on_interval(&h, d_lo.ln(), d_hi.ln(), self.mc_samples, seed)?
        } else {
            mc_on_interval(&g, d_lo, d_hi, self.mc_samples, seed)?
        };
        Ok(Estimate {
            value: 2.0 * e.value,
            std_error: 2.0 * e.std_error,
        })
    }
}

impl ShellIntegral for PlaneModel {
    fn shell_integral(
        &self,
        f: &(dyn Fn(f64) -> f64 + Sync),
        _b: &CirclePoint,
        s: f64,
        t: f64,
        seed: u64,
    ) -> Result<Estimate> {
        self.shell_mc(f, s, Some(t), seed)
    }

    fn complement_integral(
        &self,
        f: &(dyn Fn(f64) -> f64 + Sync),
        _b: &CirclePoint,
        s: f64,
        seed: u64,
    ) -> Result<Estimate> {
        self.shell_mc(f, s, None, seed)
    }
}

impl OrbitSource for PlaneModel {
    fn annulus_points(&self, t: f64) -> Result<Vec<Complex64>> {
        Ok(self
            .annulus(t)?
            .iter()
            .map(|e| e.g.origin_image())
            .collect())
    }

    fn open_ball_count(&self, r: f64) -> Result<usize> {
        self.orbit()?.open_ball_count(r)
    }
}

/// Sampled values of `(ρ∘T_t^1)(1)(b) = (1/|S_t|) Σ_{γ∈S_t} λ^{γ·0}(b)/⟨ρ(γ)1,1⟩`.
#[derive(Clone, Debug, Serialize)]
pub struct PlaneSupNorm {
    pub t: f64,
    pub s_t_size: usize,
    /// Largest sampled value: a lower bound for the sup norm.
    pub sup_lower_bound: f64,
    pub min_value: f64,
    pub samples: usize,
}

pub fn plane_sup_norm_tt1(
    model: &PlaneModel,
    t: f64,
    samples: usize,
    offset: f64,
) -> Result<PlaneSupNorm> {
    use rayon::prelude::*;
    if samples == 0 {
        return domain("need at least one sample direction");
    }
    let annulus = model.annulus(t)?;
    if annulus.is_empty() {
        return domain(format!("S_t is empty at t = {t}"));
    }
    let weights: Vec<f64> = annulus
        .iter()
        .map(|e| 1.0 / PlaneModel::coefficient_one(e.dist))
        .collect();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let b = CirclePoint::from_turns((i as f64 + offset) / samples as f64);
            let terms: Vec<f64> = annulus
                .iter()
                .zip(&weights)
                .map(|(e, w)| PlaneModel::lambda_element(&e.g, &b) * w)
                .collect();
            pairwise_sum(&terms) / annulus.len() as f64
        })
        .collect();
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PlaneSupNorm {
        t,
        s_t_size: annulus.len(),
        sup_lower_bound: sup,
        min_value: min,
        samples,
    })
}

/// `#{γ ∈ S : z_p^{γ⁻¹·0} ∈ U, z_p^{γ·0} ∈ U′}` over the given elements.
pub fn two_sided_count(elements: &[OrbitElement], u: &ArcSet, u_prime: &ArcSet) -> usize {
    elements
        .iter()
        .filter(|e| {
            u.contains_angle(PlaneModel::element_direction(&e.g.inverse()).angle())
                && u_prime.contains_angle(PlaneModel::element_direction(&e.g).angle())
        })
        .count()
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaneEquidistribution {
    pub t: f64,
    pub s_t_size: usize,
    pub count: usize,
    pub freq: f64,
    pub target: f64,
    pub abs_error: f64,
}

pub fn plane_equidistribution(
    model: &PlaneModel,
    u: &ArcSet,
    u_prime: &ArcSet,
    t: f64,
) -> Result<PlaneEquidistribution> {
    let s = model.annulus(t)?;
    if s.is_empty() {
        return domain(format!("S_t is empty at t = {t}"));
    }
    let count = two_sided_count(&s, u, u_prime);
    let freq = count as f64 / s.len() as f64;
    let target = u.measure() * u_prime.measure();
    Ok(PlaneEquidistribution {
        t,
        s_t_size: s.len(),
        count,
        freq,
        target,
        abs_error: (freq - target).abs(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MargulisPoint {
    pub t: f64,
    pub count: usize,
    pub c_t: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MargulisFit {
    pub c_hat: f64,
    /// Slope of `Ĉ(t)` against `t`, relative to `Ĉ`.
    pub relative_trend: f64,
    /// RMS of `Ĉ(t)/Ĉ − 1`.
    pub relative_residual: f64,
    pub points: Vec<MargulisPoint>,
}

/// Mean over `t_list` of `e^{−ηt}·n(U,U′,(t−a,t+a))/(ν(U)ν(U′))`.
pub fn margulis_fit(
    model: &PlaneModel,
    u: &ArcSet,
    u_prime: &ArcSet,
    a: f64,
    t_list: &[f64],
) -> Result<MargulisFit> {
    if !(a > 0.0) {
        return domain("window half-width a must be positive");
    }
    if t_list.is_empty() {
        return domain("margulis fit needs at least one t");
    }
    let mass = u.measure() * u_prime.measure();
    if mass == 0.0 {
        return domain("U and U′ must have positive measure");
    }
    let orbit = model.orbit()?;
    let mut points = Vec::new();
    for &t in t_list {
        if t - a < 0.0 {
            return domain("need t ≥ a");
        }
        let window = orbit.window(t - a, t + a)?;
        let count = two_sided_count(window, u, u_prime);
        points.push(MargulisPoint {
            t,
            count,
            c_t: (-t).exp() * count as f64 / mass,
        });
    }
    let c_hat = points.iter().map(|p| p.c_t).sum::<f64>() / points.len() as f64;
    if !(c_hat > 0.0) {
        return domain("no orbit points counted");
    }
    let (relative_trend, relative_residual) = if points.len() >= 2 {
        let xs: Vec<f64> = points.iter().map(|p| p.t).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.c_t / c_hat).collect();
        let (slope, _, _) = crate::counting::least_squares(&xs, &ys);
        let rms = (ys.iter().map(|y| (y - 1.0).powi(2)).sum::<f64>() / ys.len() as f64).sqrt();
        (slope, rms)
    } else {
        (0.0, 0.0)
    };
    Ok(MargulisFit {
        c_hat,
        relative_trend,
        relative_residual,
        points,
    })
}

impl PlaneModel {
    /// Fails unless `relation_residual` and `det_residual` are below `tol`.
    pub fn check_group(&self, tol: f64) -> Result<()> {
        let (r, d) = (self.group.relation_residual(), self.group.det_residual());
        if r > tol || d > tol {
            return Err(Error::Assertion(format!(
                "group relations fail: relation {r}, det {d}"
            )));
        }
        Ok(())
    }
}
