//! The hyperbolic plane (Poincaré disk) with a cocompact Fuchsian group.

mod arcs;
mod group;
mod integrate;
mod mobius;
mod model;
mod orbit;

pub use arcs::{parse_arc_set, ArcSet};
pub use group::{FuchsianGroup, Preset};
pub use integrate::{
    agm, circle_quadrature, mc_boundary_integral, pairwise_sum, spherical_function,
};
pub use mobius::{disk_distance, normalize_angle, MobiusIsometry};
pub use model::{
    margulis_fit, plane_equidistribution, plane_sup_norm_tt1, two_sided_count, CirclePoint,
    MargulisFit, MargulisPoint, PlaneEquidistribution, PlaneModel, PlaneSupNorm, DEFAULT_SAMPLES,
};
pub use orbit::{shared_cache, OrbitCache, OrbitElement, CACHE_DIR_ENV};
