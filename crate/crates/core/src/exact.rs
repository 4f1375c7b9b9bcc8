//! Exact arithmetic in the real quadratic field `Q(√m)`.
//!
//! Every measure, λ-value and matrix coefficient of the tree model is of the
//! form `x + y·√m` with `x, y` rational and `m = 2k − 1`, so the whole tree
//! pipeline stays exact. Values only become decimals at output time, see
//! [`ExactScalar::to_decimal_string`].

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `x + y·√radicand` with rational `x`, `y`.
///
/// A pure rational carries `radicand == 0`; it combines with any radicand.
/// Mixing two different non-trivial radicands is a logic error and panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    x: BigRational,
    y: BigRational,
    radicand: u64,
}

fn is_square(m: u64) -> Option<u64> {
    let r = m.sqrt();
    (r * r == m).then_some(r)
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_rational(x: BigRational) -> Self {
        Self {
            x,
            y: BigRational::zero(),
            radicand: 0,
        }
    }

    /// `p / q`. Panics on `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(p.into(), q.into()))
    }

    /// `x + y·√m`, normalised (square radicands are folded into `x`).
    pub fn new(x: BigRational, y: BigRational, m: u64) -> Self {
        let mut s = Self { x, y, radicand: m };
        s.normalize();
        s
    }

    /// `√m`.
    pub fn sqrt_of(m: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), m)
    }

    /// `m^(e/2)` for any integer `e`, exactly.
    pub fn half_power(m: u64, e: i64) -> Self {
        assert!(m > 0, "half_power of zero base");
        let half = Integer::div_floor(&e, &2);
        let odd = e.rem_euclid(2) == 1;
        let base = BigRational::from_integer(BigInt::from(m));
        let r = if half >= 0 {
            pow_rational(&base, half as u32)
        } else {
            pow_rational(&base, (-half) as u32).recip()
        };
        if odd {
            Self::new(BigRational::zero(), r, m)
        } else {
            Self::from_rational(r)
        }
    }

    fn normalize(&mut self) {
        if self.y.is_zero() {
            self.radicand = 0;
            return;
        }
        if self.radicand == 0 {
            self.y = BigRational::zero();
            return;
        }
        if let Some(r) = is_square(self.radicand) {
            let y = std::mem::replace(&mut self.y, BigRational::zero());
            self.x += y * BigRational::from_integer(r.into());
            self.radicand = 0;
        }
    }

    fn joint_radicand(&self, other: &Self) -> u64 {
        match (self.radicand, other.radicand) {
            (0, m) | (m, 0) => m,
            (a, b) if a == b => a,
            (a, b) => panic!("mixing quadratic fields Q(√{a}) and Q(√{b})"),
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.x
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.y
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// `x − y·√m`.
    pub fn conjugate(&self) -> Self {
        Self {
            x: self.x.clone(),
            y: -self.y.clone(),
            radicand: self.radicand,
        }
    }

    /// Field norm `x² − m·y²`.
    pub fn norm(&self) -> BigRational {
        let m = BigRational::from_integer(self.radicand.into());
        &self.x * &self.x - m * &self.y * &self.y
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        let n = self.norm();
        let c = self.conjugate();
        Self::new(c.x / &n, c.y / n, self.radicand)
    }

    pub fn signum(&self) -> i32 {
        let sx = sign_of(&self.x);
        let sy = sign_of(&self.y);
        if sy == 0 || sx == sy {
            return if sx != 0 { sx } else { sy };
        }
        if sx == 0 {
            return sy;
        }
        // Opposite signs: compare x² with m·y².
        let m = BigRational::from_integer(self.radicand.into());
        match (&self.x * &self.x).cmp(&(m * &self.y * &self.y)) {
            Ordering::Greater => sx,
            Ordering::Less => sy,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Nearest `f64`. Only meant for output and for float-side comparisons.
    pub fn to_f64(&self) -> f64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        if self.y.is_zero() {
            return x;
        }
        x + self.y.to_f64().unwrap_or(f64::NAN) * (self.radicand as f64).sqrt()
    }

    /// Decimal rendering rounded to nearest at `digits` significant digits,
    /// computed exactly (no intermediate float).
    pub fn to_decimal_string(&self, digits: usize) -> String {
        decimal::format_exact(self, digits)
    }

    /// `p/q` rendering for rational values, `x+y*sqrt(m)` otherwise.
    pub fn to_exact_string(&self) -> String {
        if self.y.is_zero() {
            self.x.to_string()
        } else {
            format!("{}+{}*sqrt({})", self.x, self.y, self.radicand)
        }
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn pow_rational(b: &BigRational, e: u32) -> BigRational {
    // Powers of coprime integers stay coprime, so no reduction is needed.
    BigRational::new_raw(
        num_traits::pow(b.numer().clone(), e as usize),
        num_traits::pow(b.denom().clone(), e as usize),
    )
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_exact_string())
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_exact_string())
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl std::str::FromStr for ExactScalar {
    type Err = crate::error::Error;

    /// Inverse of [`ExactScalar::to_exact_string`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || crate::error::Error::Parse(format!("not an exact scalar: {s:?}"));
        let rat = |t: &str| t.trim().parse::<BigRational>().map_err(|_| bad());
        match s.split_once("*sqrt(") {
            None => Ok(Self::from_rational(rat(s)?)),
            Some((head, tail)) => {
                let m: u64 = tail
                    .strip_suffix(')')
                    .ok_or_else(bad)?
                    .parse()
                    .map_err(|_| bad())?;
                // The rational part may itself start with a sign; split at the
                // last '+' that is not the leading character.
                let cut = head[1..].rfind('+').map(|i| i + 1).ok_or_else(bad)?;
                Ok(Self::new(rat(&head[..cut])?, rat(&head[cut + 1..])?, m))
            }
        }
    }
}

impl serde::Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_exact_string())
    }
}

impl<'de> serde::Deserialize<'de> for ExactScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let m = self.joint_radicand(rhs);
        ExactScalar::new(add_q(&self.x, &rhs.x), add_q(&self.y, &rhs.y), m)
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        let m = self.joint_radicand(rhs);
        ExactScalar::new(add_q(&self.x, &-&rhs.x), add_q(&self.y, &-&rhs.y), m)
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let m = self.joint_radicand(rhs);
        if self.y.is_zero() && rhs.y.is_zero() {
            return ExactScalar::from_rational(mul_q(&self.x, &rhs.x));
        }
        if self.y.is_zero() || rhs.y.is_zero() {
            let (r, q) = if self.y.is_zero() {
                (&self.x, rhs)
            } else {
                (&rhs.x, self)
            };
            return ExactScalar::new(mul_q(r, &q.x), mul_q(r, &q.y), m);
        }
        let mr = BigRational::from_integer(m.into());
        let x = mul_q(&self.x, &rhs.x) + mul_q(&mr, &mul_q(&self.y, &rhs.y));
        let y = mul_q(&self.x, &rhs.y) + mul_q(&self.y, &rhs.x);
        ExactScalar::new(x, y, m)
    }
}

/// Rational product, skipping the gcd work when a factor is an integer.
fn mul_q(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    match (a.is_integer(), b.is_integer()) {
        (true, true) => BigRational::from_integer(a.numer() * b.numer()),
        (true, false) | (false, true) => {
            let (int, frac) = if a.is_integer() { (a, b) } else { (b, a) };
            let g = num_integer::Integer::gcd(int.numer(), frac.denom());
            if g.is_one() {
                BigRational::new_raw(int.numer() * frac.numer(), frac.denom().clone())
            } else {
                BigRational::new_raw((int.numer() / &g) * frac.numer(), frac.denom() / &g)
            }
        }
        (false, false) => match (small(a), small(b)) {
            (Some((an, ad)), Some((bn, bd))) => reduced(an * bn, ad * bd),
            _ => a * b,
        },
    }
}

/// Rational sum, in machine integers when both operands are small.
fn add_q(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    match (small(a), small(b)) {
        (Some((an, ad)), Some((bn, bd))) => {
            if ad == bd {
                reduced(an + bn, ad)
            } else {
                reduced(an * bd + bn * ad, ad * bd)
            }
        }
        _ => a + b,
    }
}

fn small(q: &BigRational) -> Option<(i128, i128)> {
    Some((q.numer().to_i64()? as i128, q.denom().to_i64()? as i128))
}

/// `n/d` in lowest terms, `d > 0`.
fn reduced(n: i128, d: i128) -> BigRational {
    let g = Integer::gcd(&n, &d);
    BigRational::new_raw(BigInt::from(n / g), BigInt::from(d / g))
}

impl<'a> Div<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        if rhs.is_rational() {
            assert!(!rhs.x.is_zero(), "division by zero");
            return ExactScalar::new(&self.x / &rhs.x, &self.y / &rhs.x, self.radicand);
        }
        self * &rhs.recip()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        let m = self.joint_radicand(rhs);
        self.x = add_q(&self.x, &rhs.x);
        self.y = add_q(&self.y, &rhs.y);
        self.radicand = m;
        self.normalize();
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: ExactScalar) {
        *self += &rhs;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        *self += &(-rhs.clone());
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self * rhs;
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            x: -self.x,
            y: -self.y,
            radicand: self.radicand,
        }
    }
}

impl Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, v| acc + v)
    }
}

impl<'a> Sum<&'a ExactScalar> for ExactScalar {
    fn sum<I: Iterator<Item = &'a ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, v| acc + v)
    }
}

/// Exact decimal conversion, shared with the f64 formatter in [`crate::output`].
pub(crate) mod decimal {
    use super::*;

    fn pow10(e: u32) -> BigInt {
        num_traits::pow(BigInt::from(10u32), e as usize)
    }

    /// `value · 10^shift` as an exact scalar (shift may be negative).
    fn scaled(v: &ExactScalar, shift: i64) -> ExactScalar {
        let f = if shift >= 0 {
            BigRational::from_integer(pow10(shift as u32))
        } else {
            BigRational::new(BigInt::one(), pow10((-shift) as u32))
        };
        v * &ExactScalar::from_rational(f)
    }

    /// Largest integer `n` with `n <= v`, for `v >= 0`.
    fn floor_nonneg(v: &ExactScalar, guess: f64) -> BigInt {
        let mut n = if guess.is_finite() && guess >= 0.0 {
            BigInt::from_f64_floor(guess)
        } else {
            BigInt::zero()
        };
        let one = BigInt::one();
        while ExactScalar::from_rational(BigRational::from_integer(&n + &one)) <= *v {
            n += &one;
        }
        while ExactScalar::from_rational(BigRational::from_integer(n.clone())) > *v {
            n -= &one;
        }
        n
    }

    trait FromF64Floor {
        fn from_f64_floor(x: f64) -> BigInt;
    }

    impl FromF64Floor for BigInt {
        fn from_f64_floor(x: f64) -> BigInt {
            num_traits::FromPrimitive::from_f64(x.floor()).unwrap_or_else(BigInt::zero)
        }
    }

    pub(crate) fn format_exact(v: &ExactScalar, digits: usize) -> String {
        assert!(digits >= 1);
        if v.is_zero() {
            return "0".to_string();
        }
        let neg = v.signum() < 0;
        let a = v.abs();
        let approx = a.to_f64();
        let mut exp10 = if approx.is_finite() && approx > 0.0 {
            approx.log10().floor() as i64
        } else {
            0
        };
        // Fix the decade exactly: 10^exp10 <= a < 10^(exp10+1).
        loop {
            let lo = scaled(&ExactScalar::one(), exp10);
            let hi = scaled(&ExactScalar::one(), exp10 + 1);
            if a < lo {
                exp10 -= 1;
            } else if a >= hi {
                exp10 += 1;
            } else {
                break;
            }
        }
        let d = digits as i64;
        let shift = d - 1 - exp10;
        let half = ExactScalar::ratio(1, 2);
        let target = &scaled(&a, shift) + &half;
        let guess = approx * 10f64.powi(shift as i32) + 0.5;
        let mut mant = floor_nonneg(&target, guess);
        if mant >= pow10(digits as u32) {
            mant /= BigInt::from(10);
            exp10 += 1;
        }
        render(neg, &mant.to_str_radix(10), exp10)
    }

    /// Render an exact `digits`-long mantissa with decimal exponent `exp10`
    /// (value = 0.d1d2... × 10^(exp10+1)), trimming trailing zeros.
    pub(crate) fn render(neg: bool, mant: &str, exp10: i64) -> String {
        let trimmed = mant.trim_end_matches('0');
        let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        if (-6..21).contains(&exp10) {
            if exp10 < 0 {
                s.push_str("0.");
                for _ in 0..(-exp10 - 1) {
                    s.push('0');
                }
                s.push_str(trimmed);
            } else {
                let int_len = (exp10 + 1) as usize;
                if trimmed.len() <= int_len {
                    s.push_str(trimmed);
                    for _ in trimmed.len()..int_len {
                        s.push('0');
                    }
                } else {
                    s.push_str(&trimmed[..int_len]);
                    s.push('.');
                    s.push_str(&trimmed[int_len..]);
                }
            }
        } else {
            s.push_str(&trimmed[..1]);
            if trimmed.len() > 1 {
                s.push('.');
                s.push_str(&trimmed[1..]);
            }
            s.push_str(&format!("e{exp10}"));
        }
        s
    }
}
