//! Model-independent geometry: everything here is expressed through a
//! model's distance and Gromov-product oracles.

use std::fmt::Debug;

use rand::Rng;

use crate::error::{domain, Error, Result};

/// A point of `X` or a point of its boundary `B`.
#[derive(Clone, Debug, PartialEq)]
pub enum Ideal<P, B> {
    Point(P),
    Boundary(B),
}

/// A proper geodesic δ-hyperbolic space with a cocompact group action and a
/// chosen basepoint `p`.
pub trait SpaceModel: Sync {
    type Point: Clone + Debug + Send + Sync;
    type Boundary: Clone + Debug + Send + Sync;

    fn basepoint(&self) -> Self::Point;
    /// Hyperbolicity constant, in length units.
    fn delta(&self) -> f64;
    /// Quotient radius `R`: `Γ·X(p,R) = X`.
    fn quotient_radius(&self) -> f64;
    /// Critical exponent `η`.
    fn critical_exponent(&self) -> f64;

    fn contains(&self, x: &Self::Point) -> bool;
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// `(x|y)_base`, extended continuously to boundary arguments.
    /// Implementations may assume `base` is a valid point.
    fn gromov_oracle(
        &self,
        x: &Ideal<Self::Point, Self::Boundary>,
        y: &Ideal<Self::Point, Self::Boundary>,
        base: &Self::Point,
    ) -> Result<f64>;

    /// `z_p^q = ℓ_{p,q}(∞)`, the boundary direction of `q` seen from `p`.
    fn direction(&self, q: &Self::Point) -> Result<Self::Boundary>;

    /// `ℓ_{p,b}(s)`: the point at distance `s` from `p` on the ray to `b`.
    fn ray_point(&self, b: &Self::Boundary, s: f64) -> Result<Self::Point>;

    /// Is `b == c`? Needed because (b|b) is infinite.
    fn same_boundary(&self, b: &Self::Boundary, c: &Self::Boundary) -> bool;

    /// Diameter of `(B, σ_p)`.
    fn boundary_diameter(&self) -> f64 {
        1.0
    }
}

/// Random points for property audits.
pub trait ModelSampler: SpaceModel {
    fn sample_point<R: Rng>(&self, rng: &mut R) -> Self::Point;
    fn sample_boundary<R: Rng>(&self, rng: &mut R) -> Self::Boundary;
    /// A random boundary point `c` with `σ_p(b, c) ≤ r`.
    fn sample_near<R: Rng>(
        &self,
        b: &Self::Boundary,
        r: f64,
        rng: &mut R,
    ) -> Result<Self::Boundary>;
}

/// Models whose visual balls have a computable `ν_p`-measure.
pub trait BallMeasure: SpaceModel {
    /// `ν_p(B(b, r))` for the open ball `{c : σ_p(b, c) < r}`.
    fn ball_measure(&self, b: &Self::Boundary, r: f64) -> Result<f64>;
}

pub type IdealOf<M> = Ideal<<M as SpaceModel>::Point, <M as SpaceModel>::Boundary>;

/// `(x|y)_base`, with the validation every model shares.
pub fn gromov_product<M: SpaceModel>(
    model: &M,
    x: &IdealOf<M>,
    y: &IdealOf<M>,
    base: &M::Point,
) -> Result<f64> {
    if !model.contains(base) {
        return domain("base point outside the model");
    }
    for z in [x, y] {
        if let Ideal::Point(p) = z {
            if !model.contains(p) {
                return domain("point outside the model");
            }
        }
    }
    if let (Ideal::Boundary(b), Ideal::Boundary(c)) = (x, y) {
        if model.same_boundary(b, c) {
            return Err(Error::InfiniteProduct);
        }
    }
    let g = model.gromov_oracle(x, y, base)?;
    Ok(g.max(0.0))
}

/// `β_b(x,y) = d(x,y) − 2(y|b)_x`.
pub fn busemann_cocycle<M: SpaceModel>(
    model: &M,
    b: &M::Boundary,
    x: &M::Point,
    y: &M::Point,
) -> Result<f64> {
    let g = gromov_product(
        model,
        &Ideal::Point(y.clone()),
        &Ideal::Boundary(b.clone()),
        x,
    )?;
    Ok(model.distance(x, y) - 2.0 * g)
}

/// `σ_base(b,c) = e^{−(b|c)_base}`; zero on the diagonal.
pub fn visual_distance<M: SpaceModel>(
    model: &M,
    b: &M::Boundary,
    c: &M::Boundary,
    base: &M::Point,
) -> Result<f64> {
    if model.same_boundary(b, c) {
        return Ok(0.0);
    }
    let g = gromov_product(
        model,
        &Ideal::Boundary(b.clone()),
        &Ideal::Boundary(c.clone()),
        base,
    )?;
    Ok((-g).exp())
}

/// An open ball `{c : σ_p(center, c) < radius}` in the boundary, or the
/// whole boundary.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryBall<B> {
    Whole,
    Ball { center: B, radius: f64 },
}

impl<B: Clone> BoundaryBall<B> {
    pub fn new(center: B, radius: f64, diameter: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return domain(format!("ball radius must be positive, got {radius}"));
        }
        if radius > diameter {
            return domain(format!(
                "ball radius {radius} exceeds the boundary diameter {diameter}"
            ));
        }
        Ok(BoundaryBall::Ball { center, radius })
    }

    pub fn contains<M: SpaceModel<Boundary = B>>(&self, model: &M, c: &B) -> Result<bool> {
        match self {
            BoundaryBall::Whole => Ok(true),
            BoundaryBall::Ball { center, radius } => {
                Ok(visual_distance(model, center, c, &model.basepoint())? < *radius)
            }
        }
    }
}

/// Shadow `B_p(q) = B_p(z_p^q, e^{−d(p,q)})`, with `B_p(p) = B`.
pub fn shadow<M: SpaceModel>(model: &M, q: &M::Point) -> Result<BoundaryBall<M::Boundary>> {
    let p = model.basepoint();
    let r = model.distance(&p, q);
    if r == 0.0 {
        return Ok(BoundaryBall::Whole);
    }
    let center = model.direction(q)?;
    Ok(BoundaryBall::Ball {
        center,
        radius: (-r).exp(),
    })
}

/// The chopped product `min{(z_base^q | b)_base, d(base, q)}`.
///
/// The direction `z^q` is always taken from the model basepoint, so `base`
/// must be the basepoint.
pub fn chopped_product<M: SpaceModel>(
    model: &M,
    q: &M::Point,
    b: &M::Boundary,
    base: &M::Point,
) -> Result<f64> {
    let len = model.distance(base, q);
    if len == 0.0 {
        return domain("chopped product needs q ≠ base");
    }
    let p = model.basepoint();
    if model.distance(&p, base) != 0.0 {
        return domain("chopped product is defined relative to the model basepoint");
    }
    let z = model.direction(q)?;
    if model.same_boundary(&z, b) {
        return Ok(len);
    }
    let g = gromov_product(
        model,
        &Ideal::Boundary(z),
        &Ideal::Boundary(b.clone()),
        base,
    )?;
    Ok(g.min(len))
}

/// `q′ = ℓ_{p,q}(|q| + 2δ + R)`, the centre of the inner ball of the
/// annulus-cone region behind `q`.
pub fn cone_center<M: SpaceModel>(model: &M, q: &M::Point) -> Result<M::Point> {
    let p = model.basepoint();
    let len = model.distance(&p, q);
    if len == 0.0 {
        return domain("annulus cone needs q ≠ p");
    }
    let z = model.direction(q)?;
    model.ray_point(&z, len + 2.0 * model.delta() + model.quotient_radius())
}

/// Membership in `Y^q = {r : z_p^r ∈ B_p(q), ||r| − |q′|| < R}`.
pub fn annulus_cone_membership<M: SpaceModel>(
    model: &M,
    r: &M::Point,
    q: &M::Point,
) -> Result<bool> {
    let p = model.basepoint();
    let q_prime = cone_center(model, q)?;
    let rl = model.distance(&p, r);
    if rl == 0.0 {
        return Ok(false);
    }
    let window = (rl - model.distance(&p, &q_prime)).abs() < model.quotient_radius();
    if !window {
        return Ok(false);
    }
    let z = model.direction(r)?;
    shadow(model, q)?.contains(model, &z)
}

/// Worst observed violation of the (hyp) inequality,
/// `max(min((x|w),(y|w)) − (x|y))` over random triples and bases.
#[derive(Clone, Debug)]
pub struct HypAudit {
    pub samples: usize,
    pub max_defect: f64,
}

pub fn audit_hyperbolicity<M: ModelSampler, R: Rng>(
    model: &M,
    samples: usize,
    rng: &mut R,
) -> Result<HypAudit> {
    let mut max_defect = f64::NEG_INFINITY;
    let mut done = 0;
    while done < samples {
        let pick = |rng: &mut R| -> IdealOf<M> {
            if rng.gen_bool(0.5) {
                Ideal::Point(model.sample_point(rng))
            } else {
                Ideal::Boundary(model.sample_boundary(rng))
            }
        };
        let (x, y, w) = (pick(rng), pick(rng), pick(rng));
        let base = if rng.gen_bool(0.5) {
            model.basepoint()
        } else {
            model.sample_point(rng)
        };
        let xy = gromov_product(model, &x, &y, &base);
        let xw = gromov_product(model, &x, &w, &base);
        let yw = gromov_product(model, &y, &w, &base);
        let (xy, xw, yw) = match (xy, xw, yw) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            // Coincident boundary samples: skip.
            _ => continue,
        };
        if xw.is_finite() && yw.is_finite() && xy.is_finite() {
            max_defect = max_defect.max(xw.min(yw) - xy);
        }
        done += 1;
    }
    Ok(HypAudit {
        samples,
        max_defect,
    })
}

/// Fails if the audited defect exceeds the model's configured δ.
pub fn check_hyperbolicity<M: ModelSampler, R: Rng>(
    model: &M,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<HypAudit> {
    let audit = audit_hyperbolicity(model, samples, rng)?;
    if audit.max_defect > model.delta() + tol {
        return Err(Error::Assertion(format!(
            "(hyp) defect {} exceeds δ = {}",
            audit.max_defect,
            model.delta()
        )));
    }
    Ok(audit)
}
