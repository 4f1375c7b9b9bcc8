use boundary_rep::counting::*;
use boundary_rep::measure::*;
use boundary_rep::rep::lambda_exact;
use boundary_rep::rep::{coefficient_one, matrix_coefficient, SimpleFunction};
use boundary_rep::space::BallMeasure;
use boundary_rep::spectra::*;
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

fn set(s: &str) -> CylinderSet {
    parse_cylinder_set(2, s).unwrap()
}

#[test]
fn exact_regularity_constants() {
    let r = tree_regularity_exact(&f2(), 10).unwrap();
    assert_eq!(r.k, ExactScalar::ratio(1, 4));
    assert_eq!(r.kprime, ExactScalar::ratio(3, 4));
    assert!(!r.kprime_attained);
}

#[test]
fn regularity_certificate_single_ball() {
    let m = f2();
    let b: BoundaryWord = "(a)".parse().unwrap();
    let cert = certify_regularity(&m, &[0.3], std::slice::from_ref(&b)).unwrap();
    let ratio = m.ball_measure(&b, 0.3).unwrap() / 0.3f64.powf(m_eta(&m));
    assert_eq!(cert.k, cert.kprime);
    assert!((cert.k - ratio).abs() < 1e-15);
}

fn m_eta(m: &TreeModel) -> f64 {
    use boundary_rep::space::SpaceModel;
    m.critical_exponent()
}

#[test]
fn log_integral_example() {
    // f(u) = 1/u off B(b,e^{-4}) is 3/4 (the sphere sigma = 1) + 4/2.
    let m = f2();
    let b: BoundaryWord = "(a)".parse().unwrap();
    let s = (-4f64).exp();
    let r = int_as_log(&m, &b, s, 0.25, 0.75, 1).unwrap();
    assert!((r.actual - 2.75).abs() < 1e-12);
    assert!(r.lower <= r.actual && r.actual <= r.upper);
    let r = int_as_log_within_diameter(&m, &b, s, 0.25, 0.75, 1).unwrap();
    assert!((r.actual - 2.0).abs() < 1e-12);
    assert!(r.holds());
    let r = decreasing_integral_bounds(&m, &|u| 1.0 / u, &b, s, 1.0, 0.25, 0.75, 1).unwrap();
    assert!((r.actual - 2.0).abs() < 1e-12);
    assert!(r.lower <= r.actual && r.actual <= r.upper);
    // Constant f: the shell measure.
    let r = decreasing_integral_bounds(&m, &|_| 2.0, &b, 0.2, 0.9, 0.25, 0.75, 1).unwrap();
    let shell = m.ball_measure(&b, 0.9).unwrap() - m.ball_measure(&b, 0.2).unwrap();
    assert!((r.actual - 2.0 * shell).abs() < 1e-15);
    let r = decreasing_integral_bounds(&m, &|u| 1.0 / u, &b, 0.5, 0.5 + 1e-9, 0.25, 0.75, 1).unwrap();
    assert_eq!(r.actual, 0.0);
    assert!(decreasing_integral_bounds(&m, &|u| u, &b, 0.1, 0.9, 0.25, 0.75, 1).is_err());
}

#[test]
fn sampling_set_at_t3() {
    let m = f2();
    let s = build_sampling_set(&m, 3.0).unwrap();
    assert_eq!(s.directions.len(), 36);
    assert_eq!(s.multiplicity, 5);
    // e^{-t+R+2δ} with R = 1/2, δ = 0.
    assert!((s.radius - (-2.5f64).exp()).abs() < 1e-15);
    let mut heads: Vec<ReducedWord> = s.directions.iter().map(|d| d.head(3).unwrap()).collect();
    heads.sort_by_key(|h| h.to_string());
    heads.dedup();
    assert_eq!(heads.len(), 36);
    let audit = audit_sampling_set(&m, &s, 2000, 3).unwrap();
    assert!(audit.min_hits >= 1 && audit.max_hits <= 5);
    assert!(build_sampling_set(&m, 0.5).is_err());
    assert!(!build_sampling_set(&m, 0.51).unwrap().directions.is_empty());
}

#[test]
fn sampled_lambda_integral() {
    let m = f2();
    let q = w("ab");
    let set = build_sampling_set(&m, 4.0).unwrap();
    let f = |b: &BoundaryWord| Ok(lambda_exact(&m, &q, b)?.to_f64());
    let l = 3f64.ln();
    let r = sampled_integral(&m, &f, &set, l, 2.0 / 3.0, 0.25, 0.75, 500, 5).unwrap();
    assert_eq!(r.integral, 2.0 / 3.0);
    assert!(r.holds(0.0));
    assert_eq!(r.c_l, sampling_constant(5, l, 0.25, 0.75));
    let one = |_: &BoundaryWord| Ok(1.0);
    let r = sampled_integral(&m, &one, &set, 0.0, 1.0, 0.25, 0.75, 100, 5).unwrap();
    assert_eq!(r.estimate, 1.0);
    // |q| > t + R: λ^q varies by more than L across a sampling ball.
    let deep = w("abababab");
    let g = |b: &BoundaryWord| Ok(lambda_exact(&m, &deep, b)?.to_f64());
    assert!(sampled_integral(&m, &g, &set, l, 1.0, 0.25, 0.75, 2000, 5).is_err());
}

#[test]
fn sampling_sweep_holds() {
    let r = tree_sampling_sweep(&f2(), 8).unwrap();
    assert!(r.cases > 0);
    assert!(1.0 / r.c_l <= r.min_ratio && r.max_ratio <= r.c_l);
}

#[test]
fn equidistribution_examples() {
    let m = f2();
    let e = equidistribution(&m, &set("a"), &set("b"), 3.0).unwrap();
    assert_eq!((e.count, e.s_t_size), (2, 36));
    assert_eq!(e.freq, ExactScalar::ratio(1, 18));
    assert_eq!(e.target, ExactScalar::ratio(1, 16));
    let e = equidistribution(&m, &set("a"), &set("b"), 4.0).unwrap();
    assert_eq!(e.freq, ExactScalar::ratio(7, 108));
    for t in 1..=5 {
        let all = equidistribution(&m, &set("*"), &set("*"), t as f64).unwrap();
        assert_eq!(all.freq, ExactScalar::one());
    }
}

#[test]
fn equidistribution_splits_over_complements() {
    let m = f2();
    let (u, up) = (set("a,bA"), set("B,ab"));
    for t in 2..=8 {
        let t = t as f64;
        let x = equidistribution_transfer(&m, &u, &up, t).unwrap();
        let y = equidistribution_transfer(&m, &u, &up.complement(), t).unwrap();
        let z = equidistribution_transfer(&m, &u, &set("*"), t).unwrap();
        assert_eq!(x.freq + y.freq, z.freq);
        assert_eq!(x.count, equidistribution(&m, &u, &up, t).unwrap().count);
        assert_eq!(x.count, equidistribution_streaming(&m, &u, &up, t).unwrap().count);
    }
}

#[test]
fn tree_growth_exponents() {
    for (rank, eta) in [(2u8, 3f64.ln()), (3, 5f64.ln())] {
        let m = TreeModel::free(rank).unwrap();
        let ts: Vec<f64> = (8..=14).map(f64::from).collect();
        let fit = growth_exponent(&ts, |t| Ok(tree_ball_count(&m, t))).unwrap();
        assert!((fit.eta_hat - eta).abs() < 1e-3, "{}", fit.eta_hat);
    }
    assert!(growth_exponent(&[5.0], |_| Ok(1)).is_err());
}

#[test]
fn translation_lengths() {
    let m = f2();
    let ell = |s: &str| tree_translation_length(&m, &w(s)).unwrap();
    assert_eq!(ell("abA"), Ratio::from_integer(1));
    assert_eq!(ell(""), Ratio::from_integer(0));
    assert_eq!(ell("ab"), Ratio::from_integer(2));
    let table = tree_marked_lengths(&m, &[w("abA"), w("aab"), w("bAAB")], 6).unwrap();
    for row in &table.rows {
        assert!((row.length - row.limit_estimate).abs() < 1.0);
    }
}

#[test]
fn rescaling_examples() {
    let m = f2();
    let one = SimpleFunction::one(2);
    let pairs = vec![(one.clone(), one.clone())];
    for c in [Ratio::new(1, 1), Ratio::new(2, 1), Ratio::new(3, 2)] {
        let r = rescaling_invariance_check(&m, c, &[w("ab"), w("aBBa")], &pairs).unwrap();
        assert!(r.lengths_scaled && r.coefficients_equal);
    }
    let doubled = TreeModel::new(2, Ratio::from_integer(2)).unwrap();
    assert_eq!(tree_translation_length(&doubled, &w("ab")).unwrap(), Ratio::from_integer(4));
    let scaled = TreeModel::new(2, Ratio::new(3, 2)).unwrap();
    for g in words_of_length(2, 2) {
        assert_eq!(coefficient_one(&scaled, &g).unwrap(), ExactScalar::ratio(2, 3));
        assert_eq!(
            matrix_coefficient(&scaled, &g, &one, &one).unwrap(),
            ExactScalar::ratio(2, 3)
        );
    }
    assert!(rescaling_invariance_check(&m, Ratio::new(-1, 2), &[], &pairs).is_err());
}

fn word(max: usize) -> impl Strategy<Value = ReducedWord> {
    proptest::collection::vec(0u8..4, 0..=max)
        .prop_map(|ls| ReducedWord::reduce(ls.into_iter().map(Letter)))
}

proptest! {
    #[test]
    fn translation_length_is_a_class_function(g in word(8), d in word(4), n in 1u32..4) {
        let m = f2();
        let l = tree_translation_length(&m, &g).unwrap();
        let conj = d.mul(&g).mul(&d.inverse());
        prop_assert_eq!(tree_translation_length(&m, &conj).unwrap(), l);
        let mut p = ReducedWord::identity();
        for _ in 0..n {
            p = p.mul(&g);
        }
        prop_assert_eq!(tree_translation_length(&m, &p).unwrap(), l * Ratio::from_integer(n as i64));
    }

    #[test]
    fn ball_measure_within_regularity_window(b in word(8), r in 0.001f64..1.0) {
        let m = f2();
        let b = BoundaryWord::extend_word(&b).unwrap_or_else(|_| "(a)".parse().unwrap());
        let ratio = m.ball_measure(&b, r).unwrap() / r.powf(3f64.ln());
        prop_assert!((0.25 - 1e-12..0.75).contains(&ratio));
    }
}
