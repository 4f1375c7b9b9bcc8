use boundary_rep::oracle::{coefficient_brute, coefficient_one_brute, lambda_l1_brute};
use boundary_rep::rep::rank::{truncation_rank, DEFAULT_DIMENSION_BUDGET};
use boundary_rep::rep::rho::DEFAULT_RESOLUTION_BUDGET;
use boundary_rep::rep::tail::tail_bound_check;
use boundary_rep::rep::tt::{sup_norm_tt1, tt_pairing, tt_pairing_direct, DEFAULT_ANNULUS_BUDGET};
use boundary_rep::rep::*;
use boundary_rep::tree::*;
use boundary_rep::ExactScalar;
use num_rational::Ratio;
use proptest::prelude::*;

fn f2() -> TreeModel {
    TreeModel::free(2).unwrap()
}

fn w(s: &str) -> ReducedWord {
    s.parse().unwrap()
}

fn bw(s: &str) -> BoundaryWord {
    s.parse().unwrap()
}

fn chi(s: &str) -> SimpleFunction {
    SimpleFunction::indicator(&parse_cylinder_set(2, s).unwrap())
}

fn q(p: i64, d: i64) -> ExactScalar {
    ExactScalar::ratio(p, d)
}

#[test]
fn annulus_enumeration_examples() {
    let m = f2();
    let s1: Vec<String> = m.enumerate_annulus(1.0).unwrap().iter().map(|g| g.to_string()).collect();
    assert_eq!(s1.len(), 4);
    for g in ["a", "A", "b", "B"] {
        assert!(s1.contains(&g.to_string()));
    }
    assert_eq!(m.enumerate_annulus(3.0).unwrap().len(), 36);
    assert!(m.enumerate_annulus(0.4).is_err());
    for n in 1..=14 {
        assert_eq!(sphere_size(2, n), 4 * 3u128.pow(n as u32 - 1));
    }
}

#[test]
fn cylinder_measures() {
    let m = f2();
    assert_eq!(m.cylinder_measure(&w("a")).unwrap(), q(1, 4));
    assert_eq!(m.cylinder_measure(&w("ab")).unwrap(), q(1, 12));
    let total: ExactScalar = words_of_length(2, 2)
        .iter()
        .map(|c| m.cylinder_measure(c).unwrap())
        .sum();
    assert_eq!(total, ExactScalar::one());
}

#[test]
fn radon_nikodym_examples() {
    let m = f2();
    assert_eq!(m.radon_nikodym(&w("ab"), &bw("(ab)")).unwrap(), q(9, 1));
    assert_eq!(m.radon_nikodym(&w("ab"), &bw("(b)")).unwrap(), q(1, 9));
    assert_eq!(m.radon_nikodym(&w(""), &bw("(b)")).unwrap(), ExactScalar::one());
    assert!(m.radon_nikodym(&w("ab"), &bw("a")).is_err());
    // ν_q(B) = 1: integrate the derivative over depth-|q| cells.
    for g in ["ab", "aBA", "bbaB"] {
        let g = w(g);
        let total: ExactScalar = words_of_length(2, g.len())
            .iter()
            .map(|c| {
                m.radon_nikodym(&g, &BoundaryWord::extend_word(c).unwrap()).unwrap()
                    * m.cylinder_measure(c).unwrap()
            })
            .sum();
        assert_eq!(total, ExactScalar::one(), "{g}");
    }
}

#[test]
fn transfer_counts() {
    let (b, a_inv) = (
        LetterConstraint::letter(Letter::from_char('b').unwrap()),
        LetterConstraint::letter(Letter::from_char('A').unwrap()),
    );
    let counts: Vec<u128> = (1..=4)
        .map(|n| transfer_matrix_count(2, b, a_inv, n).unwrap())
        .collect();
    assert_eq!(counts, [0, 1, 2, 7]);
}

#[test]
fn lambda_examples() {
    let m = f2();
    assert_eq!(lambda_exact(&m, &w("ab"), &bw("(ab)")).unwrap(), q(3, 1));
    assert_eq!(lambda_exact(&m, &w("ab"), &bw("(b)")).unwrap(), q(1, 3));
    assert_eq!(lambda_exact(&m, &w(""), &bw("(b)")).unwrap(), ExactScalar::one());
    let r3 = ExactScalar::sqrt_of(3);
    assert_eq!(lambda_l1_exact(&m, 1), &r3 / &q(2, 1));
    assert_eq!(lambda_l1_exact(&m, 2), q(2, 3));
    assert_eq!(lambda_l1_exact(&m, 0), ExactScalar::one());
    for n in 0..=8 {
        assert_eq!(lambda_l1_exact(&m, n), lambda_l1_brute(&m, n).unwrap());
        if n > 0 {
            // ((n+2)/2)·3^{-n/2}
            let closed = q(n as i64 + 2, 2) * ExactScalar::half_power(3, -(n as i64));
            assert_eq!(lambda_l1_exact(&m, n), closed);
        }
    }
}

#[test]
fn rho_examples() {
    let m = f2();
    let ca = chi("a");
    let v = apply_rho(&m, &w(""), &ca, DEFAULT_RESOLUTION_BUDGET).unwrap();
    assert_eq!(v.inner(&ca, &m).unwrap(), ca.norm_sq(&m).unwrap());
    let sqrt3_over_12 = &ExactScalar::sqrt_of(3) / &q(12, 1);
    assert_eq!(matrix_coefficient(&m, &w("a"), &ca, &ca).unwrap(), sqrt3_over_12);
    assert_eq!(coefficient_one(&m, &w("ab")).unwrap(), q(2, 3));
    assert_eq!(coefficient_one(&m, &w("")).unwrap(), ExactScalar::one());
    let one = SimpleFunction::one(2);
    for n in 0..=6 {
        for g in words_of_length(2, n).iter().step_by(37) {
            let r = apply_rho(&m, g, &one, DEFAULT_RESOLUTION_BUDGET).unwrap();
            assert_eq!(r.norm_sq(&m).unwrap(), ExactScalar::one(), "{g}");
        }
    }
    let (cb, cab) = (chi("b"), chi("ab,B"));
    assert_eq!(
        matrix_coefficient(&m, &w("ab"), &cb, &cab).unwrap(),
        coefficient_brute(&m, &w("ab"), &cb, &cab).unwrap()
    );
}

#[test]
fn resolution_budget_is_enforced() {
    let m = f2();
    let long = w("abababababab");
    assert!(apply_rho(&m, &long, &chi("a"), 4).is_err());
}

#[test]
fn tt_examples() {
    let m = f2();
    let one = SimpleFunction::one(2);
    for t in 1..=4 {
        let t = t as f64;
        assert_eq!(
            tt_pairing_direct(&m, &one, &one, &one, t).unwrap(),
            ExactScalar::one()
        );
    }
    let tt = build_tt(&m, &chi("a"), 1.0).unwrap();
    assert_eq!(tt.len(), 4);
    assert_eq!(tt.coefficients.iter().filter(|c| c.is_zero()).count(), 3);
    assert!(build_tt(&m, &SimpleFunction::zero(2), 3.0).unwrap().is_zero());
    assert!(build_tt(&m, &one, 0.5).is_err());
    let (u, v) = (chi("a"), chi("b"));
    for t in 2..=5 {
        let t = t as f64;
        assert_eq!(
            tt_pairing(&m, &u, &v, &u, t, DEFAULT_ANNULUS_BUDGET).unwrap(),
            tt_pairing_direct(&m, &u, &v, &u, t).unwrap()
        );
    }
}

#[test]
fn sup_norm_is_one_on_the_tree() {
    let m = f2();
    for t in 1..=8 {
        assert_eq!(
            sup_norm_tt1(&m, t as f64, DEFAULT_ANNULUS_BUDGET).unwrap(),
            ExactScalar::one()
        );
    }
}

#[test]
fn convergence_targets() {
    let m = f2();
    let set = |s| parse_cylinder_set(2, s).unwrap();
    let rows = convergence_experiment(
        &m,
        &set("*"),
        &set("*"),
        &set("*"),
        &[2.0, 3.0, 4.0],
        DEFAULT_ANNULUS_BUDGET,
    )
    .unwrap();
    assert!(rows.iter().all(|r| r.value == ExactScalar::one() && r.target == ExactScalar::one()));
    let rows = convergence_experiment(
        &m,
        &set("a"),
        &set("b"),
        &set("a"),
        &[2.0, 6.0],
        DEFAULT_ANNULUS_BUDGET,
    )
    .unwrap();
    assert!(rows.iter().all(|r| r.target == q(1, 16)));
    let rows =
        convergence_experiment(&m, &set("a"), &set("*"), &set("b"), &[2.0, 4.0, 6.0, 8.0], DEFAULT_ANNULUS_BUDGET)
            .unwrap();
    assert!(rows.iter().all(|r| r.target.is_zero()));
    assert!(rows.windows(2).all(|p| p[1].abs_error < p[0].abs_error));
    let big = convergence_experiment(&m, &set("a"), &set("b"), &set("a"), &[30.0], 1000);
    assert!(matches!(big, Err(boundary_rep::Error::AnnulusBudget { .. })));
}

#[test]
fn tail_bounds() {
    let m = f2();
    let b = parse_cylinder_set(2, "b").unwrap();
    let r = tail_bound_check(&m, &w("aaaaaa"), &b, 1.0).unwrap();
    assert!(r.lhs.to_f64() <= r.rhs);
    let r = tail_bound_check(&m, &w("aaaaaa"), &CylinderSet::empty(2), 1.0).unwrap();
    assert!(r.lhs.is_zero());
    let r = tail_bound_check(&m, &w("a"), &b, 2.0).unwrap();
    assert!(r.short_branch && r.lhs.to_f64() <= 1.0);
    assert!(tail_bound_check(&m, &w("ba"), &b, 1.0).is_err());
}

#[test]
fn truncation_rank_sweep() {
    let m = f2();
    let s = truncation_rank(&m, 1, 6, DEFAULT_DIMENSION_BUDGET).unwrap();
    assert_eq!(s.steps[0].rank, 1);
    assert!(s.steps.windows(2).all(|p| p[0].rank <= p[1].rank));
    assert_eq!(s.steps.last().unwrap().rank, 16);
    assert!(s.full_rank_at.unwrap() <= 6);
}

#[test]
fn rescaled_model_keeps_coefficients() {
    let base = f2();
    let scaled = TreeModel::new(2, Ratio::new(3, 2)).unwrap();
    for g in ["ab", "aB", "bbA"] {
        assert_eq!(
            coefficient_one(&base, &w(g)).unwrap(),
            coefficient_one(&scaled, &w(g)).unwrap()
        );
    }
    assert_eq!(coefficient_one(&scaled, &w("ab")).unwrap(), q(2, 3));
}

fn word(max: usize) -> impl Strategy<Value = ReducedWord> {
    proptest::collection::vec(0u8..4, 0..=max)
        .prop_map(|ls| ReducedWord::reduce(ls.into_iter().map(Letter)))
}

fn simple(depth: usize) -> impl Strategy<Value = SimpleFunction> {
    let cells = sphere_size(2, depth) as usize;
    proptest::collection::vec(-3i64..=3, cells).prop_map(move |vals| {
        SimpleFunction::new(2, depth, vals.into_iter().map(ExactScalar::from_integer).collect())
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitarity(g in word(5), u in (1usize..=3).prop_flat_map(simple), v in (1usize..=3).prop_flat_map(simple)) {
        let m = f2();
        let ru = apply_rho(&m, &g, &u, DEFAULT_RESOLUTION_BUDGET).unwrap();
        let rv = apply_rho(&m, &g, &v, DEFAULT_RESOLUTION_BUDGET).unwrap();
        prop_assert_eq!(ru.inner(&rv, &m).unwrap(), u.inner(&v, &m).unwrap());
    }

    #[test]
    fn adjoint_is_inverse(g in word(4), u in simple(2), v in simple(2)) {
        let m = f2();
        let lhs = matrix_coefficient(&m, &g, &u, &v).unwrap();
        let rhs = matrix_coefficient(&m, &g.inverse(), &v, &u).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn homomorphism(g in word(3), h in word(3), u in simple(2)) {
        let m = f2();
        let b = DEFAULT_RESOLUTION_BUDGET;
        let gh = apply_rho(&m, &g.mul(&h), &u, b).unwrap();
        let g_h = apply_rho(&m, &g, &apply_rho(&m, &h, &u, b).unwrap(), b).unwrap();
        let d = gh.depth().max(g_h.depth());
        prop_assert_eq!(gh.refine(d).unwrap(), g_h.refine(d).unwrap());
    }

    #[test]
    fn streaming_matches_cell_sum(g in word(7)) {
        let m = f2();
        let c = coefficient_one(&m, &g).unwrap();
        prop_assert_eq!(&c, &coefficient_one_brute(&m, &g).unwrap());
        prop_assert_eq!(c, coefficient_one(&m, &g.inverse()).unwrap());
    }
}
