use boundary_rep::space::*;
use boundary_rep::tree::*;
use boundary_rep::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f2() -> TreeModel {
    TreeModel::free(2).unwrap()
}

fn v(s: &str) -> TreePoint {
    TreePoint::vertex(s.parse().unwrap())
}

fn bw(s: &str) -> BoundaryWord {
    s.parse().unwrap()
}

type I = IdealOf<TreeModel>;

fn pt(s: &str) -> I {
    Ideal::Point(v(s))
}

fn bd(s: &str) -> I {
    Ideal::Boundary(bw(s))
}

#[test]
fn gromov_product_examples() {
    let m = f2();
    let e = v("");
    assert_eq!(gromov_product(&m, &pt("ab"), &pt("aB"), &e).unwrap(), 1.0);
    assert_eq!(gromov_product(&m, &pt("abA"), &pt("abA"), &e).unwrap(), 3.0);
    assert_eq!(gromov_product(&m, &bd("(a)"), &bd("(b)"), &e).unwrap(), 0.0);
    assert_eq!(
        gromov_product(&m, &bd("(a)"), &bd("(a)"), &e),
        Err(Error::InfiniteProduct)
    );
}

#[test]
fn busemann_examples() {
    let m = f2();
    let (e, ab) = (v(""), v("ab"));
    assert_eq!(busemann_cocycle(&m, &bw("(a)"), &e, &ab).unwrap(), 0.0);
    assert_eq!(busemann_cocycle(&m, &bw("a(b)"), &e, &ab).unwrap(), -2.0);
    assert_eq!(busemann_cocycle(&m, &bw("(b)"), &ab, &ab).unwrap(), 0.0);
}

#[test]
fn visual_distance_examples() {
    let m = f2();
    let e = v("");
    let d = visual_distance(&m, &bw("(a)"), &bw("a(b)"), &e).unwrap();
    assert!((d - (-1f64).exp()).abs() < 1e-15);
    assert_eq!(visual_distance(&m, &bw("(a)"), &bw("(a)"), &e).unwrap(), 0.0);
    assert_eq!(visual_distance(&m, &bw("(a)"), &bw("(b)"), &e).unwrap(), 1.0);
}

#[test]
fn shadows_are_cylinders() {
    let m = f2();
    let s = shadow(&m, &v("ab")).unwrap();
    // Open ball of radius e^{-2} about z = abbb…: the cylinder C(abb).
    assert!(!s.contains(&m, &bw("a(B)")).unwrap());
    assert!(s.contains(&m, &bw("abb(a)")).unwrap());
    assert!(!s.contains(&m, &bw("ab(a)")).unwrap());
    assert!(!s.contains(&m, &bw("(b)")).unwrap());
    assert_eq!(shadow(&m, &v("")).unwrap(), BoundaryBall::Whole);
}

#[test]
fn chopped_product_examples() {
    let m = f2();
    let e = v("");
    assert_eq!(chopped_product(&m, &v("ab"), &bw("(ab)"), &e).unwrap(), 2.0);
    assert_eq!(chopped_product(&m, &v("ab"), &bw("(b)"), &e).unwrap(), 0.0);
    assert!(chopped_product(&m, &e, &bw("(b)"), &e).is_err());
}

#[test]
fn thicken_examples() {
    let m = f2();
    let a = parse_cylinder_set(2, "a").unwrap();
    assert_eq!(a.thicken(1.5, &m).unwrap(), a);
    let ab = parse_cylinder_set(2, "ab").unwrap();
    assert_eq!(ab.thicken(0.5, &m).unwrap(), a);
    let empty = CylinderSet::empty(2);
    assert!(empty.thicken(1.0, &m).unwrap().is_empty());
    // Nested thickenings shrink to the set itself.
    let mut prev = CylinderSet::whole(2);
    for a in [0.1, 0.5, 1.5, 2.5, 5.0] {
        let t = ab.thicken(a, &m).unwrap();
        assert_eq!(t.intersection(&prev).unwrap(), t);
        prev = t;
    }
    assert_eq!(prev, ab);
}

#[test]
fn annulus_cone_examples() {
    let m = f2();
    let q = v("a");
    let q_prime = cone_center(&m, &q).unwrap();
    assert_eq!(q_prime.depth(), 1.5);
    // The window ||r| - 1.5| < 1/2 is open, so the vertex aa sits on its edge.
    assert!(annulus_cone_membership(&m, &TreePoint::along("aa".parse().unwrap(), 1.75).unwrap(), &q).unwrap());
    assert!(!annulus_cone_membership(&m, &v("aa"), &q).unwrap());
    assert!(annulus_cone_membership(&m, &q_prime, &q).unwrap());
    assert!(!annulus_cone_membership(&m, &v("ba"), &q).unwrap());
}

#[test]
fn tree_is_zero_hyperbolic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let audit = check_hyperbolicity(&f2(), 100_000, 0.0, &mut rng).unwrap();
    assert!(audit.max_defect <= 0.0);
}

fn word(max: usize) -> impl Strategy<Value = ReducedWord> {
    proptest::collection::vec(0u8..4, 0..=max)
        .prop_map(|ls| ReducedWord::reduce(ls.into_iter().map(Letter)))
}

fn boundary() -> impl Strategy<Value = BoundaryWord> {
    (word(6), proptest::collection::vec(0u8..4, 1..=3)).prop_filter_map(
        "cycle must reduce",
        |(p, c)| BoundaryWord::new(p.letters().to_vec(), c.into_iter().map(Letter).collect()).ok(),
    )
}

proptest! {
    #[test]
    fn cocycle_identity_is_exact(b in boundary(), x in word(6), y in word(6), z in word(6)) {
        let m = f2();
        let (x, y, z) = (TreePoint::vertex(x), TreePoint::vertex(y), TreePoint::vertex(z));
        let xy = busemann_cocycle(&m, &b, &x, &y).unwrap();
        let yz = busemann_cocycle(&m, &b, &y, &z).unwrap();
        let xz = busemann_cocycle(&m, &b, &x, &z).unwrap();
        prop_assert_eq!(xy + yz, xz);
        prop_assert_eq!(xy, -busemann_cocycle(&m, &b, &y, &x).unwrap());
    }

    #[test]
    fn chopped_equals_plain(q in word(8), b in boundary()) {
        prop_assume!(!q.is_empty());
        let m = f2();
        let e = v("");
        let q = TreePoint::vertex(q);
        let plain = gromov_product(&m, &Ideal::Point(q.clone()), &Ideal::Boundary(b.clone()), &e).unwrap();
        prop_assert_eq!(chopped_product(&m, &q, &b, &e).unwrap(), plain);
    }

    #[test]
    fn visual_distance_is_ultrametric(a in boundary(), b in boundary(), c in boundary()) {
        let m = f2();
        let e = v("");
        let d = |x: &BoundaryWord, y: &BoundaryWord| visual_distance(&m, x, y, &e).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b).max(d(&b, &c)));
        prop_assert_eq!(d(&a, &b) == 0.0, m.same_boundary(&a, &b));
    }

    #[test]
    fn shadows_contain_rays_beyond(q in word(6), extra in 0.01f64..5.0) {
        prop_assume!(!q.is_empty());
        let m = f2();
        let z = m.direction(&TreePoint::vertex(q.clone())).unwrap();
        let r = m.ray_point(&z, q.len() as f64 + extra).unwrap();
        let z = m.direction(&r).unwrap();
        prop_assert!(shadow(&m, &TreePoint::vertex(q)).unwrap().contains(&m, &z).unwrap());
    }
}
