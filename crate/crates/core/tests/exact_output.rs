use boundary_rep::output::*;
use boundary_rep::ExactScalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = BigRational> {
    prop_oneof![
        (-50i64..50, 1i64..50).prop_map(|(n, d)| BigRational::new(n.into(), d.into())),
        // Operands past the machine-integer fast paths.
        (any::<i64>(), 1i64..i64::MAX, 0u32..3).prop_map(|(n, d, e)| {
            let big = BigInt::from(n) * BigInt::from(10).pow(e * 12);
            BigRational::new(big, d.into())
        }),
    ]
}

fn scalar() -> impl Strategy<Value = ExactScalar> {
    (rational(), rational()).prop_map(|(x, y)| ExactScalar::new(x, y, 3))
}

/// Products and sums computed straight from the field formulas.
fn reference_mul(a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
    let (x1, y1) = (a.rational_part(), a.irrational_part());
    let (x2, y2) = (b.rational_part(), b.irrational_part());
    let three = BigRational::from_integer(3.into());
    ExactScalar::new(x1 * x2 + y1 * y2 * three, x1 * y2 + x2 * y1, 3)
}

fn reference_add(a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
    ExactScalar::new(
        a.rational_part() + b.rational_part(),
        a.irrational_part() + b.irrational_part(),
        3,
    )
}

proptest! {
    #[test]
    fn ring_operations_match_reference(a in scalar(), b in scalar()) {
        prop_assert_eq!(&a * &b, reference_mul(&a, &b));
        prop_assert_eq!(&a + &b, reference_add(&a, &b));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a);
        }
    }

    #[test]
    fn ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn summation_order_is_irrelevant(mut xs in proptest::collection::vec(scalar(), 1..12)) {
        let forward: ExactScalar = xs.iter().sum();
        xs.reverse();
        let backward: ExactScalar = xs.iter().sum();
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn order_agrees_with_floats(a in scalar(), b in scalar()) {
        let (fa, fb) = (a.to_f64(), b.to_f64());
        if (fa - fb).abs() > 1e-9 * fa.abs().max(fb.abs()).max(1.0) {
            prop_assert_eq!(a < b, fa < fb);
        }
        prop_assert_eq!((&a - &b).signum(), a.cmp(&b) as i32);
    }

    #[test]
    fn exact_strings_round_trip(a in scalar()) {
        let back: ExactScalar = a.to_exact_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn half_powers_multiply(e1 in -20i64..20, e2 in -20i64..20) {
        prop_assert_eq!(
            ExactScalar::half_power(3, e1) * ExactScalar::half_power(3, e2),
            ExactScalar::half_power(3, e1 + e2)
        );
    }

    #[test]
    fn floats_round_trip_at_17_digits(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let s = format_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}

#[test]
fn known_values() {
    let r3 = ExactScalar::sqrt_of(3);
    assert_eq!(&r3 * &r3, ExactScalar::from_integer(3));
    assert_eq!(ExactScalar::sqrt_of(4), ExactScalar::from_integer(2));
    assert_eq!(ExactScalar::half_power(3, -1), &r3 / &ExactScalar::from_integer(3));
    let x = &r3 / &ExactScalar::from_integer(12);
    assert!((x.to_f64() - 0.144_337_567_297_406_4).abs() < 1e-16);
    assert_eq!(ExactScalar::ratio(2, 3).to_decimal_string(17), "0.66666666666666667");
}

#[test]
fn float_formatting() {
    assert_eq!(format_f64(0.0625), "0.0625");
    assert_eq!(format_f64(1.0), "1");
    assert_eq!(format_f64(-2.5), "-2.5");
    assert_eq!(format_f64(1.0 / 3.0), "0.33333333333333331");
    assert_eq!(format_f64(1e-7), "9.9999999999999995e-8");
    assert_eq!(format_f64(2f64.powi(-20)), "9.5367431640625e-7");
    assert_eq!(format_f64(6.02e23), "6.02e23");
}

#[test]
fn csv_and_json_rendering() {
    let mut t = Table::new("series", &["t", "value", "ok"]);
    t.push(vec![Cell::from(2i64), Cell::from(ExactScalar::ratio(1, 16)), Cell::Bool(true)]);
    t.push(vec![Cell::from(3i64), Cell::from(0.5f64), Cell::Bool(false)]);
    let header: Header = vec![("seed".into(), "7".into())];
    let csv = render(std::slice::from_ref(&t), &header, Format::Csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# seed: 7");
    assert_eq!(lines[1], "t,value,ok");
    assert_eq!(lines[2], "2,0.0625,true");
    let json = render(&[t], &header, Format::Json);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["config"]["seed"], "7");
    let row = &v["tables"][0]["rows"][0];
    assert_eq!(row["value_exact"], "1/16");
    assert_eq!(row["value"].as_f64(), Some(0.0625));
    assert!("xml".parse::<Format>().is_err());
}
