//! Arbitrary-precision rational scalars and exact 3-vectors.
//!
//! Every geometric quantity in this crate is carried as a `Rational` so that
//! incidence and continuity questions can be answered by exact zero tests
//! instead of floating-point thresholds.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational scalar, kept in canonical form: positive denominator,
/// numerator and denominator coprime.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`. Panics if `den` is zero.
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "rational with zero denominator");
        Rational(BigRational::new(num, den))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ints(num: i64, den: i64) -> Self {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.denom().is_one()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Parses a decimal literal (`-2.5e-2`, `0.25`, `17`) into the exact
    /// rational it denotes. No binary rounding is involved.
    pub fn from_decimal_str(s: &str) -> Result<Self, ParseRationalError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let (mantissa, exp10) = match s.find(['e', 'E']) {
            Some(pos) => {
                let e: i64 = s[pos + 1..]
                    .parse()
                    .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
                (&s[..pos], e)
            }
            None => (s, 0),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
            None => (mantissa, ""),
        };
        let digits: String = [int_part, frac_part].concat();
        if digits.is_empty() || digits == "-" || digits == "+" {
            return Err(ParseRationalError::Malformed(s.to_string()));
        }
        let numer =
            BigInt::from_str(&digits).map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
        let shift = exp10 - frac_part.len() as i64;
        let ten = BigInt::from(10);
        let value = if shift >= 0 {
            BigRational::from_integer(numer * ten.pow(shift as u32))
        } else {
            BigRational::new(numer, ten.pow((-shift) as u32))
        };
        Ok(Rational(value))
    }

    /// Nearest `f64`, robust for numerators and denominators of any size.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let num = self.0.numer();
        let den = self.0.denom();
        let nbits = num.bits() as i64;
        let dbits = den.bits() as i64;
        // Shift both operands near 64 bits so the integer-to-float
        // conversions are exact, then rescale by the dropped power of two.
        let nshift = (nbits - 63).max(0);
        let dshift = (dbits - 63).max(0);
        let n = (num >> nshift)
            .to_string()
            .parse::<f64>()
            .unwrap_or(f64::NAN);
        let d = (den >> dshift)
            .to_string()
            .parse::<f64>()
            .unwrap_or(f64::NAN);
        (n / d) * 2f64.powi((nshift - dshift) as i32)
    }
}

/// Error from parsing a rational or decimal literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty numeric literal")]
    Empty,
    #[error("malformed numeric literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q`, plain integers, and decimal literals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once('/') {
            Some((num, den)) => {
                let n = BigInt::from_str(num.trim())
                    .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
                let d = BigInt::from_str(den.trim())
                    .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
                if d.is_zero() {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational::new(n, d))
            }
            None => Rational::from_decimal_str(s),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num::integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Normalizes a slice of rationals to a primitive integer vector: returns
/// `(scale, ints)` with `scale * ints[i] == values[i]`, `gcd(ints) == 1`, and
/// the first nonzero entry of `ints` positive. An all-zero input yields scale
/// zero and an all-zero vector.
pub fn normalize_primitive_slice(values: &[Rational]) -> (Rational, Vec<BigInt>) {
    if values.iter().all(Rational::is_zero) {
        return (Rational::zero(), vec![BigInt::zero(); values.len()]);
    }
    let mut common_den = BigInt::one();
    for v in values {
        common_den = common_den.lcm(v.denom());
    }
    let ints: Vec<BigInt> = values
        .iter()
        .map(|v| v.numer() * (&common_den / v.denom()))
        .collect();
    let mut g = BigInt::zero();
    for n in &ints {
        g = g.gcd(n);
    }
    let first_negative = ints
        .iter()
        .find(|n| !n.is_zero())
        .map(|n| n.sign() == Sign::Minus)
        .unwrap_or(false);
    if first_negative {
        g = -g;
    }
    let ints: Vec<BigInt> = ints.iter().map(|n| n / &g).collect();
    (Rational::new(g, common_den), ints)
}

/// Point or direction with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vec3r(pub [Rational; 3]);

impl Vec3r {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Self {
        Vec3r([x, y, z])
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Vec3r([
            Rational::from_int(x),
            Rational::from_int(y),
            Rational::from_int(z),
        ])
    }

    pub fn zero() -> Self {
        Vec3r([Rational::zero(), Rational::zero(), Rational::zero()])
    }

    pub fn x(&self) -> &Rational {
        &self.0[0]
    }

    pub fn y(&self) -> &Rational {
        &self.0[1]
    }

    pub fn z(&self) -> &Rational {
        &self.0[2]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Vec3r {
        Vec3r([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s])
    }

    pub fn dot(&self, other: &Vec3r) -> Rational {
        &(&(&self.0[0] * &other.0[0]) + &(&self.0[1] * &other.0[1])) + &(&self.0[2] * &other.0[2])
    }

    pub fn cross(&self, other: &Vec3r) -> Vec3r {
        let [ax, ay, az] = &self.0;
        let [bx, by, bz] = &other.0;
        Vec3r([
            &(ay * bz) - &(az * by),
            &(az * bx) - &(ax * bz),
            &(ax * by) - &(ay * bx),
        ])
    }

    /// Midpoint of two points.
    pub fn midpoint(&self, other: &Vec3r) -> Vec3r {
        (self + other).scale(&Rational::from_ints(1, 2))
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64()]
    }
}

impl fmt::Debug for Vec3r {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add<&Vec3r> for &Vec3r {
    type Output = Vec3r;
    fn add(self, rhs: &Vec3r) -> Vec3r {
        Vec3r([
            &self.0[0] + &rhs.0[0],
            &self.0[1] + &rhs.0[1],
            &self.0[2] + &rhs.0[2],
        ])
    }
}

impl Sub<&Vec3r> for &Vec3r {
    type Output = Vec3r;
    fn sub(self, rhs: &Vec3r) -> Vec3r {
        Vec3r([
            &self.0[0] - &rhs.0[0],
            &self.0[1] - &rhs.0[1],
            &self.0[2] - &rhs.0[2],
        ])
    }
}

impl Neg for &Vec3r {
    type Output = Vec3r;
    fn neg(self) -> Vec3r {
        Vec3r([-&self.0[0], -&self.0[1], -&self.0[2]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ints(n, d)
    }

    #[test]
    fn canonical_form() {
        let x = r(2, -4);
        assert_eq!(x, r(-1, 2));
        assert_eq!(x.to_string(), "-1/2");
        assert!(x.denom() > &BigInt::zero());
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(Rational::from_decimal_str("0.25").unwrap(), r(1, 4));
        assert_eq!(Rational::from_decimal_str("-2.5e-2").unwrap(), r(-1, 40));
        assert_eq!(Rational::from_decimal_str("1e3").unwrap(), r(1000, 1));
        assert_eq!(Rational::from_decimal_str("17").unwrap(), r(17, 1));
        assert_eq!(Rational::from_decimal_str(".5").unwrap(), r(1, 2));
        assert!(Rational::from_decimal_str("abc").is_err());
    }

    #[test]
    fn fraction_parsing() {
        assert_eq!("3/9".parse::<Rational>().unwrap(), r(1, 3));
        assert_eq!("-7/2".parse::<Rational>().unwrap(), r(-7, 2));
        assert!(matches!(
            "1/0".parse::<Rational>(),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
    }

    #[test]
    fn display_round_trips() {
        for v in [r(0, 1), r(-3, 7), r(22, 1), r(355, 113)] {
            let s = v.to_string();
            assert_eq!(s.parse::<Rational>().unwrap(), v);
        }
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&r(1, 3) + &r(1, 6), r(1, 2));
        assert_eq!(&r(1, 3) - &r(1, 2), r(-1, 6));
        assert_eq!(&r(2, 3) * &r(3, 4), r(1, 2));
        assert_eq!(&r(1, 3) / &r(2, 1), r(1, 6));
    }

    #[test]
    fn f64_conversion_handles_large_terms() {
        let big = BigInt::from(3).pow(200);
        let x = Rational::new(&big * 2, big.clone());
        assert_eq!(x.to_f64(), 2.0);
        assert!((r(1, 3).to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r(-5, 4).to_f64(), -1.25);
    }

    #[test]
    fn normalize_primitive_examples() {
        let (scale, ints) =
            normalize_primitive_slice(&[r(1, 3), r(2, 3), r(1, 1)]);
        assert_eq!(scale, r(1, 3));
        assert_eq!(ints, vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)]);

        let (scale, ints) = normalize_primitive_slice(&[r(0, 1), r(0, 1)]);
        assert!(scale.is_zero());
        assert_eq!(ints, vec![BigInt::zero(), BigInt::zero()]);

        // sign convention: first nonzero entry of the primitive vector positive
        let (scale, ints) = normalize_primitive_slice(&[r(0, 1), r(-2, 5), r(4, 5)]);
        assert_eq!(ints, vec![BigInt::zero(), BigInt::from(1), BigInt::from(-2)]);
        assert_eq!(scale, r(-2, 5));
    }

    #[test]
    fn normalize_primitive_reconstructs_input() {
        let vals = [r(-6, 8), r(9, 4), r(0, 1), r(3, 2)];
        let (scale, ints) = normalize_primitive_slice(&vals);
        for (v, n) in vals.iter().zip(&ints) {
            assert_eq!(&scale * &Rational::from_bigint(n.clone()), *v);
        }
    }

    #[test]
    fn vector_ops() {
        let a = Vec3r::from_ints(1, 0, 0);
        let b = Vec3r::from_ints(0, 1, 0);
        assert_eq!(a.cross(&b), Vec3r::from_ints(0, 0, 1));
        assert_eq!(a.dot(&b), Rational::zero());
        assert_eq!(
            a.midpoint(&b),
            Vec3r::new(r(1, 2), r(1, 2), r(0, 1))
        );
    }
}
