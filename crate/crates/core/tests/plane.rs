use std::f64::consts::PI;

use boundary_rep::counting::growth_exponent;
use boundary_rep::measure::{certify_regularity, int_as_log, int_as_log_within_diameter};
use boundary_rep::plane::*;
use boundary_rep::space::*;
use boundary_rep::spectra::plane_translation_length;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn group_presets() {
    let g = FuchsianGroup::build(Preset::Genus2Octagon);
    assert_eq!(g.generators.len(), 8);
    assert!(g.relation_residual() < 1e-9);
    assert!(g.det_residual() < 1e-12);
    let t = FuchsianGroup::build(Preset::Triangle237);
    assert!(t.relation_residual() < 1e-9);
    let id = g.evaluate(&[]);
    assert_eq!(id, MobiusIsometry::IDENTITY);
    assert!("octagon".parse::<Preset>().is_err());
}

#[test]
fn triangle_generator_orders() {
    let t = FuchsianGroup::build(Preset::Triangle237);
    let mut orders: Vec<u32> = Vec::new();
    for g in &t.generators {
        let order = (1..=7)
            .find(|&n| {
                let p = g.pow(n);
                let s = if p.a > 0.0 { 1.0 } else { -1.0 };
                (p.a - s).abs() + p.b.abs() + p.c.abs() + (p.d - s).abs() < 1e-9
            })
            .expect("finite order");
        orders.push(order);
    }
    for n in [2, 3, 7] {
        assert!(orders.contains(&n), "{orders:?}");
    }
}

#[test]
fn shadow_at_distance_three() {
    let m = PlaneModel::genus2();
    let r = (1.5f64).tanh();
    let s = shadow(&m, &Complex64::new(r, 0.0)).unwrap();
    match s {
        BoundaryBall::Ball { center, radius } => {
            assert!(center.angle().abs() < 1e-12);
            assert!((radius - (-3f64).exp()).abs() < 1e-12);
        }
        BoundaryBall::Whole => panic!("expected a ball"),
    }
    assert_eq!(shadow(&m, &Complex64::new(0.0, 0.0)).unwrap(), BoundaryBall::Whole);
}

#[test]
fn busemann_disk_examples() {
    let b = CirclePoint::new(0.0);
    let o = Complex64::new(0.0, 0.0);
    assert_eq!(PlaneModel::busemann_disk(&b, o, o).unwrap(), 0.0);
    for r in [0.1, 0.5, 0.9, 0.999] {
        let y = Complex64::new(r, 0.0);
        let beta = PlaneModel::busemann_disk(&b, o, y).unwrap();
        assert!((beta + disk_distance(o, y)).abs() < 1e-9, "{r}");
    }
    assert!(PlaneModel::busemann_disk(&b, Complex64::new(1.0, 0.0), o).is_err());
}

#[test]
fn busemann_matches_generic_definition() {
    let m = PlaneModel::genus2();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let b = m.sample_boundary(&mut rng);
        let (x, y) = (m.sample_point(&mut rng), m.sample_point(&mut rng));
        let closed = PlaneModel::busemann_disk(&b, x, y).unwrap();
        let generic = busemann_cocycle(&m, &b, &x, &y).unwrap();
        assert!((closed - generic).abs() < 1e-6, "{closed} vs {generic}");
        // A far point on the ray towards b approximates the limit.
        let far = m.ray_point(&b, 15.0).unwrap();
        let finite = m.distance(&y, &far) - m.distance(&x, &far);
        assert!((closed - finite).abs() < 1e-6, "{closed} vs {finite} at {x} {y} {}", b.angle());
    }
}

#[test]
fn mc_integral_examples() {
    let one = mc_boundary_integral(&|_| 1.0, 4096, 3).unwrap();
    assert_eq!(one.value, 1.0);
    let half = mc_boundary_integral(&|t| if t < PI { 1.0 } else { 0.0 }, 1 << 14, 3).unwrap();
    assert!((half.value - 0.5).abs() < 3.0 * half.std_error);
    assert!(mc_boundary_integral(&|_| 1.0, 0, 3).is_err());
    // ‖λ^q‖₁ for an orbit point at distance d is the spherical function.
    let g = MobiusIsometry::translation(4.0);
    let f = |t: f64| PlaneModel::lambda_element(&g, &CirclePoint::new(t));
    let mc = mc_boundary_integral(&f, 1 << 16, 5).unwrap();
    let quad = circle_quadrature(&f, &[0.0], 1e-12);
    assert!((quad - spherical_function(4.0)).abs() < 1e-9);
    assert!((mc.value - quad).abs() < 4.0 * mc.std_error);
}

#[test]
fn unitarity_on_the_circle() {
    let g = MobiusIsometry::translation(1.3) * MobiusIsometry::rotation(0.4);
    let u = |t: f64| if t < 1.0 { 1.0 } else { 0.25 };
    let ub = [0.0, 1.0];
    let ru = PlaneModel::apply_rho(&g, &u);
    let breaks: Vec<f64> = ub.iter().map(|&t| g.apply_angle(t)).collect();
    let norm = circle_quadrature(&|t| ru(t).powi(2), &breaks, 1e-12);
    let base = circle_quadrature(&|t| u(t).powi(2), &ub, 1e-12);
    assert!((norm - base).abs() < 1e-6);
    let c = PlaneModel::matrix_coefficient(&g, &|_| 1.0, &[], &|_| 1.0, &[], 1e-12);
    assert!((c - PlaneModel::coefficient_one(g.displacement())).abs() < 1e-9);
}

#[test]
fn translation_length_example() {
    let g = MobiusIsometry::translation(2.0);
    assert!((g.trace().abs() - 2.0 * 1f64.cosh()).abs() < 1e-12);
    assert!((plane_translation_length(&g).unwrap() - 2.0).abs() < 1e-12);
    assert!(plane_translation_length(&MobiusIsometry::rotation(1.0)).is_err());
}

#[test]
fn regularity_of_the_circle() {
    let m = PlaneModel::genus2();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let centers: Vec<CirclePoint> = (0..1000).map(|_| m.sample_boundary(&mut rng)).collect();
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let cert = certify_regularity(&m, &grid, &centers).unwrap();
    assert!(0.2 <= cert.k && cert.kprime <= 5.0);
}

#[test]
fn log_integral_on_the_circle() {
    let m = PlaneModel::genus2().with_mc_samples(1 << 14);
    let (k, kp) = (2.0 / PI, 1.0);
    for (i, s) in [1e-5, 1e-3, 0.05, 0.4, 0.9].into_iter().enumerate() {
        let b = CirclePoint::from_turns(0.1 * i as f64);
        for r in [
            int_as_log(&m, &b, s, k, kp, 9).unwrap(),
            int_as_log_within_diameter(&m, &b, s, k, kp, 9).unwrap(),
        ] {
            assert!(r.lower - 3.0 * r.std_error <= r.actual, "{s}: {r:?}");
            assert!(r.actual <= r.upper + 3.0 * r.std_error, "{s}: {r:?}");
        }
    }
}

#[test]
fn annulus_and_growth() {
    let m = PlaneModel::genus2();
    assert!(m.annulus(1.0).is_err());
    let sizes: Vec<usize> = [6.0, 7.0, 8.0].iter().map(|&t| m.annulus(t).unwrap().len()).collect();
    assert!(sizes[0] > 0 && sizes.windows(2).all(|p| p[0] < p[1]));
    let ts: Vec<f64> = (8..=12).map(f64::from).collect();
    let fit = growth_exponent(&ts, |t| m.ball_count(t)).unwrap();
    assert!((0.9..=1.1).contains(&fit.eta_hat), "{}", fit.eta_hat);
}

#[test]
fn margulis_examples() {
    let m = PlaneModel::genus2();
    let ts = [9.0, 10.0, 11.0];
    let whole = margulis_fit(&m, &ArcSet::whole(), &ArcSet::whole(), 1.0, &ts).unwrap();
    assert!(whole.c_hat.is_finite() && whole.c_hat > 0.0);
    let u = parse_arc_set("0.1:0.6").unwrap();
    let up = parse_arc_set("0.3:0.55").unwrap();
    let full = margulis_fit(&m, &u, &up, 1.0, &ts).unwrap();
    let halved = u.halve();
    assert!((halved.measure() - 0.25).abs() < 1e-12);
    let half = margulis_fit(&m, &halved, &up, 1.0, &ts).unwrap();
    let total = |f: &MargulisFit| f.points.iter().map(|p| p.count).sum::<usize>() as f64;
    let ratio = total(&half) / total(&full);
    assert!((ratio - 0.5).abs() < 0.1, "{ratio}");
    assert!(margulis_fit(&m, &ArcSet::empty(), &up, 1.0, &ts).is_err());
}

#[test]
fn plane_equidistribution_whole_circle() {
    let m = PlaneModel::genus2();
    let e = plane_equidistribution(&m, &ArcSet::whole(), &ArcSet::whole(), 6.0).unwrap();
    assert_eq!(e.freq, 1.0);
    assert_eq!(e.count, e.s_t_size);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn isometries_preserve_distance(seed in any::<u64>(), word in proptest::collection::vec(0u8..8, 0..4)) {
        let m = PlaneModel::genus2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = m.group().evaluate(&word);
        let (x, y) = (m.sample_point(&mut rng), m.sample_point(&mut rng));
        let d = disk_distance(x, y);
        let dg = disk_distance(g.apply_disk(x), g.apply_disk(y));
        prop_assert!((d - dg).abs() < 1e-9 * d.max(1.0));
        prop_assert!((g.det() - 1.0).abs() < 1e-9, "det {}", g.det());
    }

    #[test]
    fn plane_cocycle_identity(seed in any::<u64>()) {
        let m = PlaneModel::genus2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = m.sample_boundary(&mut rng);
        let (x, y, z) = (m.sample_point(&mut rng), m.sample_point(&mut rng), m.sample_point(&mut rng));
        let bxy = PlaneModel::busemann_disk(&b, x, y).unwrap();
        let byz = PlaneModel::busemann_disk(&b, y, z).unwrap();
        let bxz = PlaneModel::busemann_disk(&b, x, z).unwrap();
        prop_assert!((bxy + byz - bxz).abs() < 1e-9 * bxz.abs().max(1.0));
    }

    #[test]
    fn hyperbolicity_with_log2(seed in any::<u64>()) {
        let m = PlaneModel::genus2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let audit = check_hyperbolicity(&m, 500, 1e-9, &mut rng);
        prop_assert!(audit.is_ok());
    }
}
