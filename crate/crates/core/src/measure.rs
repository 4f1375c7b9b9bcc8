//! Regular metric measure spaces: regularity certificates, integrals of
//! decreasing functions of the visual distance, and sampling sets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exact::ExactScalar;
use crate::space::{visual_distance, BallMeasure, ModelSampler, SpaceModel};
use crate::tree::{for_each_extension, word_index, BoundaryWord, ReducedWord, TreeModel};

#[derive(Clone, Debug, Serialize)]
pub struct RegularityCertificate {
    pub eta: f64,
    pub k: f64,
    pub kprime: f64,
    pub samples: usize,
    pub worst_ratio_low: f64,
    pub worst_ratio_high: f64,
}

/// Tightest `(k, k′)` with `k·r^η ≤ ν(B(b, r)) ≤ k′·r^η` over the given
/// centres and radii.
pub fn certify_regularity<M: BallMeasure>(
    model: &M,
    radius_grid: &[f64],
    centers: &[M::Boundary],
) -> Result<RegularityCertificate> {
    if radius_grid.is_empty() || centers.is_empty() {
        return domain("regularity certificate needs nonempty grids");
    }
    let eta = model.critical_exponent();
    let diam = model.boundary_diameter();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut samples = 0;
    for b in centers {
        for &r in radius_grid {
            if !(r > 0.0 && r <= diam) {
                return domain(format!("radius {r} outside (0, diam]"));
            }
            let ratio = model.ball_measure(b, r)? / r.powf(eta);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            samples += 1;
        }
    }
    if !(lo > 0.0) || hi / lo > 1e6 {
        return Err(Error::Assertion(format!(
            "ball ratios are unbounded: [{lo}, {hi}]"
        )));
    }
    Ok(RegularityCertificate {
        eta,
        k: lo,
        kprime: hi,
        samples,
        worst_ratio_low: lo,
        worst_ratio_high: hi,
    })
}

/// Exact regularity constants on the tree. A ball equal to a depth-`D`
/// cylinder has radius `e^{−x}` with `x/edge ∈ [D−1, D)`, on which
/// `ν/r^η = ν(C_D)·m^{x/edge}` increases: its infimum `ν(C_D)m^{D−1}` is
/// attained, its supremum `ν(C_D)m^D` is not.
#[derive(Clone, Debug, Serialize)]
pub struct ExactRegularity {
    pub k: ExactScalar,
    pub kprime: ExactScalar,
    pub kprime_attained: bool,
    pub balls: usize,
}

pub fn tree_regularity_exact(model: &TreeModel, max_depth: usize) -> Result<ExactRegularity> {
    if max_depth == 0 {
        return domain("need at least depth 1");
    }
    let m = model.branching();
    let mut k: Option<ExactScalar> = None;
    let mut kp: Option<ExactScalar> = None;
    let mut balls = 0;
    for depth in 1..=max_depth {
        let mut err = None;
        for_each_extension(model.rank(), &[], depth, &mut |cell| {
            let w = ReducedWord::new(cell.to_vec()).expect("enumerated words are reduced");
            match model.cylinder_measure(&w) {
                Ok(nu) => {
                    let low = &nu * &ExactScalar::half_power(m, 2 * (depth as i64 - 1));
                    let high = &nu * &ExactScalar::half_power(m, 2 * depth as i64);
                    if k.as_ref().map_or(true, |k| low < *k) {
                        k = Some(low);
                    }
                    if kp.as_ref().map_or(true, |kp| high > *kp) {
                        kp = Some(high);
                    }
                    balls += 1;
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(ExactRegularity {
        k: k.unwrap(),
        kprime: kp.unwrap(),
        kprime_attained: false,
        balls,
    })
}

/// A value with a standard error (zero for exact evaluations).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Models on which `∫_{B(b,t)∖B(b,s)} f(σ(b,c)^η) dν(c)` can be evaluated.
pub trait ShellIntegral: BallMeasure {
    fn shell_integral(
        &self,
        f: &(dyn Fn(f64) -> f64 + Sync),
        b: &Self::Boundary,
        s: f64,
        t: f64,
        seed: u64,
    ) -> Result<Estimate>;

    /// `∫_{B(b,s)^c} f(σ(b,c)^η) dν(c)`.
    fn complement_integral(
        &self,
        f: &(dyn Fn(f64) -> f64 + Sync),
        b: &Self::Boundary,
        s: f64,
        seed: u64,
    ) -> Result<Estimate>;
}

impl ShellIntegral for TreeModel {
    fn shell_integral(
        &self,
        f: &(dyn Fn(f64) -> f64 + Sync),
        _b: &BoundaryWord,
        s: f64,
        t: f64,
        _seed: u64,
    ) -> Result<Estimate> {
        Ok(Estimate {
            value: self.shells(f, s, Some(t)),
            std_error: 0.0,
        })
    }

    fn complement_integral(
        &self,
        f: &(dyn Fn(f64) -> f64 + Sync),
        _b: &BoundaryWord,
        s: f64,
        _seed: u64,
    ) -> Result<Estimate> {
        Ok(Estimate {
            value: self.shells(f, s, None),
            std_error: 0.0,
        })
    }
}

impl TreeModel {
    /// Sum over the shells `{c : lcp(b,c) = j}`, on which `σ = e^{−j·edge}`
    /// and `σ^η = m^{−j}`, restricted to `s ≤ σ < t` (`t = None`: no upper
    /// limit).
    fn shells(&self, f: &dyn Fn(f64) -> f64, s: f64, t: Option<f64>) -> f64 {
        let m = self.branching() as f64;
        let mut total = 0.0;
        let mut j = 0usize;
        loop {
            let sigma = (-(j as f64) * self.edge_f64()).exp();
            if sigma < s {
                break;
            }
            if t.map_or(true, |t| sigma < t) {
                let shell = (self.depth_measure(j) - self.depth_measure(j + 1)).to_f64();
                total += shell * f(m.powi(-(j as i32)));
            }
            j += 1;
        }
        total
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate on `[a, b]` with the 7-point Gauss error.
fn kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut k = GK_WEIGHTS[7] * fc;
    let mut g = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod quadrature on `[a, b]`: the interval
/// with the largest error estimate is bisected until the total estimate
/// drops below `tol` or rounding noise.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut parts = vec![(a, b, kronrod(f, a, b))];
    for _ in 0..4000 {
        let total: f64 = parts.iter().map(|p| p.2 .1).sum();
        let value: f64 = parts.iter().map(|p| p.2 .0).sum();
        if total <= tol.max(64.0 * f64::EPSILON * value.abs()) {
            break;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("nonempty");
        let (lo, hi, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            parts.push((lo, hi, (kronrod(f, lo, hi).0, 0.0)));
            continue;
        }
        parts.push((lo, mid, kronrod(f, lo, mid)));
        parts.push((mid, hi, kronrod(f, mid, hi)));
    }
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    parts.iter().map(|p| p.2 .0).sum()
}

/// Rejects `f` unless it is positive and non-increasing on a grid of `[lo, hi]`.
pub fn audit_decreasing(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> Result<()> {
    let mut prev = f64::INFINITY;
    for i in 0..=grid {
        let u = lo + (hi - lo) * i as f64 / grid as f64;
        let v = f(u);
        if !(v > 0.0) {
            return domain(format!("f is not positive at u = {u}: f(u) = {v}"));
        }
        if v > prev * (1.0 + 1e-12) {
            return domain(format!("f increases near u = {u}"));
        }
        prev = v;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralBounds {
    pub lower: f64,
    pub upper: f64,
    pub actual: f64,
    pub std_error: f64,
    /// `k∫f − (k′−k)s^η f(s^η)`: the lower bound with the same boundary term
    /// as the upper one.
    pub lower_sharp: f64,
}

impl IntegralBounds {
    /// Checks `lower ≤ actual ≤ upper`, allowing three standard errors.
    pub fn holds(&self) -> bool {
        let slack = 3.0 * self.std_error + 1e-12 * self.actual.abs().max(1.0);
        self.lower <= self.actual + slack && self.actual <= self.upper + slack
    }
}

/// Bounds for `∫_{B(b,t)∖B(b,s)} f(σ(b,c)^η) dν(c)` from the regularity
/// constants `k ≤ k′`.
#[allow(clippy::too_many_arguments)]
pub fn decreasing_integral_bounds<M: ShellIntegral>(
    model: &M,
    f: &(dyn Fn(f64) -> f64 + Sync),
    b: &M::Boundary,
    s: f64,
    t: f64,
    k: f64,
    kprime: f64,
    seed: u64,
) -> Result<IntegralBounds> {
    if !(0.0 < s && s < t && t <= model.boundary_diameter()) {
        return domain(format!("need 0 < s < t ≤ diam, got s = {s}, t = {t}"));
    }
    let eta = model.critical_exponent();
    let (lo, hi) = (s.powf(eta), t.powf(eta));
    audit_decreasing(f, lo, hi, 256)?;
    let int = integrate(f, lo, hi, 1e-10);
    let fs = f(lo);
    let est = model.shell_integral(f, b, s, t, seed)?;
    let r = IntegralBounds {
        lower: k * int - (kprime - k) * fs,
        upper: kprime * int + (kprime - k) * lo * fs,
        actual: est.value,
        std_error: est.std_error,
        lower_sharp: k * int - (kprime - k) * lo * fs,
    };
    if !r.holds() {
        return Err(Error::Assertion(format!(
            "shell integral {} outside [{}, {}] (s = {s}, t = {t})",
            r.actual, r.lower, r.upper
        )));
    }
    Ok(r)
}

/// `∫_{B(b,s)^c} σ(b,c)^{−η} dν(c)` against `−kη log s − (k′−k)` and
/// `−k′η log s + (k′−k)`, on a diameter-one boundary. Not asserted: on
/// the tree the atom at `σ = 1` breaks the upper bound for `s` close to 1.
pub fn int_as_log<M: ShellIntegral>(
    model: &M,
    b: &M::Boundary,
    s: f64,
    k: f64,
    kprime: f64,
    seed: u64,
) -> Result<IntegralBounds> {
    if (model.boundary_diameter() - 1.0).abs() > 1e-12 {
        return domain("the logarithmic bound is stated for diameter-one boundaries");
    }
    if !(0.0 < s && s < 1.0) {
        return domain(format!("need 0 < s < 1, got {s}"));
    }
    let eta = model.critical_exponent();
    let f = move |u: f64| 1.0 / u;
    let est = model.complement_integral(&f, b, s, seed)?;
    let lower = -k * eta * s.ln() - (kprime - k);
    Ok(IntegralBounds {
        lower,
        upper: -kprime * eta * s.ln() + (kprime - k),
        actual: est.value,
        std_error: est.std_error,
        lower_sharp: lower,
    })
}

/// The same bounds for `∫_{B(b,1)∖B(b,s)} σ(b,c)^{−η} dν(c)`, the region the
/// shell lemma covers with `t = 1`. It differs from the full complement by
/// the sphere `{σ = 1}`, which is null on the circle but carries mass
/// `1 − ν(C(b₁))` on the tree.
pub fn int_as_log_within_diameter<M: ShellIntegral>(
    model: &M,
    b: &M::Boundary,
    s: f64,
    k: f64,
    kprime: f64,
    seed: u64,
) -> Result<IntegralBounds> {
    if (model.boundary_diameter() - 1.0).abs() > 1e-12 {
        return domain("the logarithmic bound is stated for diameter-one boundaries");
    }
    if !(0.0 < s && s < 1.0) {
        return domain(format!("need 0 < s < 1, got {s}"));
    }
    let eta = model.critical_exponent();
    let f = move |u: f64| 1.0 / u;
    let est = model.shell_integral(&f, b, s, 1.0, seed)?;
    let lower = -k * eta * s.ln() - (kprime - k);
    Ok(IntegralBounds {
        lower,
        upper: -kprime * eta * s.ln() + (kprime - k),
        actual: est.value,
        std_error: est.std_error,
        lower_sharp: lower,
    })
}

/// An `r`-sampling set: directions `ℓ̃_s` whose `r`-balls cover the
/// boundary, at most `multiplicity` of them in any `r`-ball.
#[derive(Clone, Debug)]
pub struct SamplingSet<B> {
    pub directions: Vec<B>,
    pub radius: f64,
    pub multiplicity: usize,
}

/// Models that can enumerate the orbit annulus `S_t` and orbit balls.
pub trait OrbitSource: SpaceModel {
    /// The points `γp`, `γ ∈ S_t`.
    fn annulus_points(&self, t: f64) -> Result<Vec<Self::Point>>;
    /// `|{γ : d(p, γp) < r}|`.
    fn open_ball_count(&self, r: f64) -> Result<usize>;
}

/// `S_t` with directions `γ ↦ z_p^{γp}`, radius `e^{−t+R+2δ}` and
/// multiplicity `|{γ : |γp| < 3R + 4δ}|`.
pub fn build_sampling_set<M: OrbitSource>(model: &M, t: f64) -> Result<SamplingSet<M::Boundary>> {
    let (r, d) = (model.quotient_radius(), model.delta());
    if !(t > r + 2.0 * d) {
        return domain(format!("sampling needs t > R + 2δ = {}", r + 2.0 * d));
    }
    let directions = model
        .annulus_points(t)?
        .iter()
        .map(|q| model.direction(q))
        .collect::<Result<Vec<_>>>()?;
    if directions.is_empty() {
        return domain(format!("S_t is empty at t = {t}"));
    }
    Ok(SamplingSet {
        directions,
        radius: (-t + r + 2.0 * d).exp(),
        multiplicity: model.open_ball_count(3.0 * r + 4.0 * d)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverAudit {
    pub samples: usize,
    pub min_hits: usize,
    pub max_hits: usize,
}

/// Counts sampled directions in `B(b, r)` for random `b`; fails if some ball
/// is empty or holds more than the multiplicity bound.
pub fn audit_sampling_set<M: ModelSampler>(
    model: &M,
    set: &SamplingSet<M::Boundary>,
    samples: usize,
    seed: u64,
) -> Result<CoverAudit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = model.basepoint();
    let (mut lo, mut hi) = (usize::MAX, 0);
    for _ in 0..samples {
        let b = model.sample_boundary(&mut rng);
        let mut hits = 0;
        for d in &set.directions {
            if visual_distance(model, &b, d, &p)? < set.radius {
                hits += 1;
            }
        }
        lo = lo.min(hits);
        hi = hi.max(hits);
        if hits == 0 || hits > set.multiplicity {
            return Err(Error::Assertion(format!(
                "ball B({b:?}, {}) holds {hits} directions (multiplicity {})",
                set.radius, set.multiplicity
            )));
        }
    }
    Ok(CoverAudit {
        samples,
        min_hits: lo,
        max_hits: hi,
    })
}

/// Checks `|log f(x) − log f(y)| ≤ L` on random pairs with `σ(x,y) ≤ r`.
pub fn audit_almost_continuity<M: ModelSampler>(
    model: &M,
    f: &dyn Fn(&M::Boundary) -> Result<f64>,
    r: f64,
    l: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = model.sample_boundary(&mut rng);
        let y = model.sample_near(&x, r * rng.gen_range(0.0..=1.0), &mut rng)?;
        let gap = (f(&x)?.ln() - f(&y)?.ln()).abs();
        if gap > l + 1e-12 {
            return domain(format!(
                "log f is not ({r}, {l})-almost continuous: |log f({x:?}) − log f({y:?})| = {gap}"
            ));
        }
        worst = worst.max(gap);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct SampledIntegral {
    pub estimate: f64,
    pub integral: f64,
    pub c_l: f64,
}

impl SampledIntegral {
    pub fn holds(&self, slack: f64) -> bool {
        self.estimate / self.c_l <= self.integral + slack
            && self.integral <= self.c_l * self.estimate + slack
    }
}

/// `C_L = m(Le^L + 1)k′/k`.
pub fn sampling_constant(multiplicity: usize, l: f64, k: f64, kprime: f64) -> f64 {
    multiplicity as f64 * (l * l.exp() + 1.0) * kprime / k
}

/// `(1/|S|)Σ f(ℓ̃_s)` against a known `∫f dν`, after auditing almost
/// continuity at the sampling radius.
#[allow(clippy::too_many_arguments)]
pub fn sampled_integral<M: ModelSampler>(
    model: &M,
    f: &dyn Fn(&M::Boundary) -> Result<f64>,
    set: &SamplingSet<M::Boundary>,
    l: f64,
    integral: f64,
    k: f64,
    kprime: f64,
    audit_samples: usize,
    seed: u64,
) -> Result<SampledIntegral> {
    audit_almost_continuity(model, f, set.radius, l, audit_samples, seed)?;
    let values = set.directions.iter().map(f).collect::<Result<Vec<f64>>>()?;
    let estimate = crate::plane::pairwise_sum(&values) / values.len() as f64;
    let r = SampledIntegral {
        estimate,
        integral,
        c_l: sampling_constant(set.multiplicity, l, k, kprime),
    };
    if !r.holds(0.0) {
        return Err(Error::Assertion(format!(
            "sampling sandwich fails: estimate {estimate}, integral {integral}, C_L {}",
            r.c_l
        )));
    }
    Ok(r)
}

/// Exhaustive tree check of the sampling sandwich for `f = λ^q`, every `q`
/// with `|q| ≤ t`, for each integer `t ≤ t_max`. Returns the extreme
/// ratios `estimate/∫` seen.
#[derive(Clone, Debug, Serialize)]
pub struct TreeSamplingSweep {
    pub cases: u64,
    pub c_l: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub fn tree_sampling_sweep(model: &TreeModel, t_max: usize) -> Result<TreeSamplingSweep> {
    let rank = model.rank();
    let m = model.branching();
    let eta = model.critical_exponent();
    let l = eta * (2.0 * model.quotient_radius() + 3.0 * model.delta());
    let k = ExactScalar::ratio(1, 2 * rank as i64).to_f64();
    let kprime = ExactScalar::ratio(m as i64, 2 * rank as i64).to_f64();
    let mut c_l = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut cases = 0u64;
    for t in 1..=t_max {
        let tf = t as f64 * model.edge_f64();
        let set = build_sampling_set(model, tf)?;
        c_l = sampling_constant(set.multiplicity, l, k, kprime);
        let n = t;
        // counts[l][prefix] = number of directions whose first l letters are `prefix`.
        let mut counts: Vec<Vec<u64>> = (0..=n)
            .map(|l| vec![0u64; crate::tree::sphere_size(rank, l) as usize])
            .collect();
        for d in &set.directions {
            let head = d.head(n)?;
            for (l, table) in counts.iter_mut().enumerate() {
                table[word_index(rank, &head.letters()[..l])] += 1;
            }
        }
        let size = set.directions.len() as u64;
        let mut seen = std::collections::HashMap::new();
        for qlen in 0..=n {
            let l1 = crate::rep::lambda_l1_exact(model, qlen);
            let mut err = None;
            for_each_extension(rank, &[], qlen, &mut |q| {
                let at_least: Vec<u64> = (0..=qlen)
                    .map(|j| counts[j][word_index(rank, &q[..j])])
                    .collect();
                let hist: Vec<u64> = (0..=qlen)
                    .map(|j| at_least[j] - if j < qlen { at_least[j + 1] } else { 0 })
                    .collect();
                cases += 1;
                let ratio = seen.entry((qlen, hist.clone())).or_insert_with(|| {
                    let est: ExactScalar = hist
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| {
                            ExactScalar::from_integer(c as i64)
                                * ExactScalar::half_power(m, 2 * j as i64 - qlen as i64)
                        })
                        .sum::<ExactScalar>()
                        / ExactScalar::from_integer(size as i64);
                    (est / l1.clone()).to_f64()
                });
                let ratio = *ratio;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
                if !(ratio <= c_l && 1.0 / ratio <= c_l) && err.is_none() {
                    err = Some(Error::Assertion(format!(
                        "sampling sandwich fails at t = {t}, |q| = {qlen}: ratio {ratio}, C_L {c_l}"
                    )));
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(TreeSamplingSweep {
        cases,
        c_l,
        min_ratio: lo,
        max_ratio: hi,
    })
}

impl OrbitSource for TreeModel {
    fn annulus_points(&self, t: f64) -> Result<Vec<crate::tree::TreePoint>> {
        Ok(self
            .enumerate_annulus(t)?
            .into_iter()
            .map(crate::tree::TreePoint::vertex)
            .collect())
    }

    fn open_ball_count(&self, r: f64) -> Result<usize> {
        let mut n = 0usize;
        let mut count = 0usize;
        while (n as f64) * self.edge_f64() < r {
            count += crate::tree::sphere_size(self.rank(), n) as usize;
            n += 1;
        }
        Ok(count)
    }
}

/// Random `(s, t)` pairs with `0 < s < t ≤ 1`, for audits.
pub fn random_radii<R: Rng>(rng: &mut R) -> (f64, f64) {
    let t = rng.gen_range(0.05..=1.0f64);
    let s = t * rng.gen_range(1e-3..0.95f64);
    (s, t)
}
