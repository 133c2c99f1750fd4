//! Numeric field abstraction shared by the float and rational simplex paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};

/// Field operations the factorization and simplex code need.
///
/// Tolerance arguments are ignored by exact implementations, so the same
/// pivoting code runs unchanged over `f64` and `BigRational`.
pub trait Scalar: Clone + Debug + Display + PartialEq + PartialOrd + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact value, if the representation carries one.
    fn to_exact(&self) -> Option<BigRational>;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self -= a * b`
    fn sub_mul_assign(&mut self, a: &Self, b: &Self);
    fn add_mul_assign(&mut self, a: &Self, b: &Self);

    fn eq_zero(&self) -> bool;
    /// Magnitude used for pivot selection.
    fn mag(&self) -> f64;
    /// `self > tol` (exact: `self > 0`).
    fn is_pos(&self, tol: f64) -> bool;
    /// `self < -tol` (exact: `self < 0`).
    fn is_neg(&self, tol: f64) -> bool;
    /// Entries below this are dropped during elimination.
    fn negligible(&self) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_exact(&self) -> Option<BigRational> {
        None
    }
    #[inline]
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    #[inline]
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    #[inline]
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    #[inline]
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    #[inline]
    fn neg(&self) -> Self {
        -self
    }
    #[inline]
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    #[inline]
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    #[inline]
    fn eq_zero(&self) -> bool {
        *self == 0.0
    }
    #[inline]
    fn mag(&self) -> f64 {
        self.abs()
    }
    #[inline]
    fn is_pos(&self, tol: f64) -> bool {
        *self > tol
    }
    #[inline]
    fn is_neg(&self, tol: f64) -> bool {
        *self < -tol
    }
    #[inline]
    fn negligible(&self) -> bool {
        self.abs() < 1e-14
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite value")
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_exact(&self) -> Option<BigRational> {
        Some(self.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if !Zero::is_zero(a) && !Zero::is_zero(b) {
            *self -= a * b;
        }
    }
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        if !Zero::is_zero(a) && !Zero::is_zero(b) {
            *self += a * b;
        }
    }
    fn eq_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mag(&self) -> f64 {
        rational_to_f64(self).abs()
    }
    fn is_pos(&self, _tol: f64) -> bool {
        self.is_positive()
    }
    fn is_neg(&self, _tol: f64) -> bool {
        self.is_negative()
    }
    fn negligible(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Correctly rounded (half-even) double of a rational, ignoring subnormals.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    const SMALL: u64 = 1 << 53;
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_u64()) {
        if n.unsigned_abs() <= SMALL && d <= SMALL {
            return n as f64 / d as f64;
        }
    }
    if Zero::is_zero(r.numer()) {
        return 0.0;
    }
    let neg = r.numer().is_negative();
    let n = r.numer().magnitude().clone();
    let d = r.denom().magnitude().clone();
    // Scale so the integer quotient carries 55 or 56 significant bits.
    let s = 55 - (n.bits() as i64 - d.bits() as i64);
    let (num, den) = if s >= 0 { (n << (s as usize), d) } else { (n, d << ((-s) as usize)) };
    let (q, rem) = num_integer::Integer::div_rem(&num, &den);
    let mut q = q.to_u64().expect("quotient fits in 64 bits");
    let sticky = !Zero::is_zero(&rem);
    let extra = 64 - q.leading_zeros() as i64 - 53;
    let mut exp = -s;
    if extra > 0 {
        let dropped = q & ((1u64 << extra) - 1);
        let half = 1u64 << (extra - 1);
        q >>= extra;
        exp += extra;
        if dropped > half || (dropped == half && (sticky || q & 1 == 1)) {
            q += 1;
        }
    }
    let mut v = q as f64;
    let mut e = exp;
    while e > 0 {
        let step = e.min(1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        v /= 2f64.powi(step as i32);
        e += step;
    }
    if neg {
        -v
    } else {
        v
    }
}

/// Exact rational for a finite double (dyadic expansion).
pub fn f64_to_rational(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

/// Parse `"p/q"`, an integer, or a plain decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// `p/q` text, or just `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/4"), Some(q(3, 4)));
        assert_eq!(parse_rational("0.001"), Some(q(1, 1000)));
        assert_eq!(parse_rational("-2.5e1"), Some(q(-25, 1)));
        assert_eq!(parse_rational("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_rational("7"), Some(q(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(10).pow(400u32);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&r) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn decimal_text_converts_to_the_same_double() {
        for v in [0.1f64, 1.0 / 3.0, 2.0f64.sqrt(), 1e-17, 123456.789e10, -7.25, 0.9581234567890123] {
            let r = parse_rational(&v.to_string()).unwrap();
            assert_eq!(rational_to_f64(&r).to_bits(), v.to_bits(), "{}", v);
        }
    }

    #[test]
    fn format_round_trips() {
        for r in [q(3, 4), q(-5, 1), q(0, 1), q(22, 7)] {
            assert_eq!(parse_rational(&format_rational(&r)), Some(r));
        }
    }
}
