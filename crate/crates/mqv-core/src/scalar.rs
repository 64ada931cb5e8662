//! Scalars: exact Gaussian rationals and complex doubles.
//!
//! Every matrix is homogeneous in one of the two modes. Exact arithmetic in
//! `GaussianRational` is closed under the four field operations with no
//! rounding, which is what makes zero-tolerance identity checks meaningful.

use std::fmt;
use std::str::FromStr;

use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Arithmetic mode of a scalar or matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// An element of Q(i), kept in lowest terms by the rational components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// Rational number p/q as a Gaussian rational.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::new(
            BigRational::new(p.into(), q.into()),
            BigRational::zero(),
        )
    }

    /// p/q + (r/s)i.
    pub fn from_parts(p: i64, q: i64, r: i64, s: i64) -> Self {
        assert!(q != 0 && s != 0, "zero denominator");
        Self::new(BigRational::new(p.into(), q.into()), BigRational::new(r.into(), s.into()))
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Squared absolute value, a nonnegative rational.
    pub fn norm2(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let n = self.norm2();
        Ok(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Integer power, negative exponents allowed for nonzero values.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn to_complex(&self) -> Complex64 {
        fn to_f64(r: &BigRational) -> f64 {
            let n = r.numer();
            let d = r.denom();
            // Good enough for desk-scale heights; exact values stay exact.
            let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
            let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
            nf / df
        }
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    /// Crude size measure used for pivot selection: digits of all four integers.
    pub fn height(&self) -> usize {
        fn digits(n: &BigInt) -> usize {
            n.to_string().len()
        }
        digits(self.re.numer())
            + digits(self.re.denom())
            + digits(self.im.numer())
            + digits(self.im.denom())
    }
}

fn format_rational_signed(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for GaussianRational {
    /// Canonical form `p/q+r/s*i` in lowest terms (`p/q-r/s*i` for negative
    /// imaginary part).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = format_rational_signed(&self.re);
        if self.im.is_negative() {
            let im = -self.im.clone();
            write!(f, "{}-{}*i", re, format_rational_signed(&im))
        } else {
            write!(f, "{}+{}*i", re, format_rational_signed(&self.im))
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).ok()?;
        Some(BigRational::from_integer(n))
    }
}

impl FromStr for GaussianRational {
    type Err = CoreError;

    /// Accepts `p/q+r/s*i`, `p/q-r/s*i`, a bare rational `p/q`, integers,
    /// and a bare imaginary part `r/s*i`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || CoreError::ContractViolation(format!("cannot parse scalar `{s}`"));
        if let Some(body) = s.strip_suffix("*i").or_else(|| s.strip_suffix('i')) {
            // Split into real part and imaginary coefficient at the last
            // top-level +/- that is not a leading sign.
            let mut split = None;
            for (idx, c) in body.char_indices().skip(1) {
                if c == '+' || c == '-' {
                    let prev = body.as_bytes()[idx - 1];
                    if prev != b'+' && prev != b'-' && prev != b'/' {
                        split = Some(idx);
                    }
                }
            }
            if let Some(idx) = split {
                let (re_s, im_s) = body.split_at(idx);
                let sign = &im_s[..1];
                let im_body = &im_s[1..];
                let re = parse_rational(re_s).ok_or_else(bad)?;
                let mut im = parse_rational(im_body).ok_or_else(bad)?;
                if sign == "-" {
                    im = -im;
                }
                Ok(Self::new(re, im))
            } else {
                let im = parse_rational(&body.replace('*', "")).ok_or_else(bad)?;
                Ok(Self::new(BigRational::zero(), im))
            }
        } else {
            let re = parse_rational(&s).ok_or_else(bad)?;
            Ok(Self::new(re, BigRational::zero()))
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A scalar in one of the two modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(GaussianRational),
    Float(Complex64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(GaussianRational::zero()),
            Mode::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(GaussianRational::one()),
            Mode::Float => Scalar::Float(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_complex().norm(),
            Scalar::Float(z) => z.norm(),
        }
    }

    pub fn as_exact(&self) -> Result<&GaussianRational> {
        match self {
            Scalar::Exact(q) => Ok(q),
            Scalar::Float(_) => Err(CoreError::ExactModeRequired("scalar".into())),
        }
    }

    pub fn as_float(&self) -> Result<Complex64> {
        match self {
            Scalar::Float(z) => Ok(*z),
            Scalar::Exact(_) => Err(CoreError::FloatModeRequired("scalar".into())),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(q) => q.to_complex(),
            Scalar::Float(z) => *z,
        }
    }
}

impl From<GaussianRational> for Scalar {
    fn from(q: GaussianRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(p, d)
    }

    #[test]
    fn field_operations_are_exact() {
        let a = GaussianRational::from_parts(1, 3, -2, 5);
        let b = GaussianRational::from_parts(7, 2, 1, 4);
        let prod = a.mul(&b);
        let back = prod.div(&b).unwrap();
        assert_eq!(back, a);
        let s = a.add(&b).sub(&b);
        assert_eq!(s, a);
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert!(GaussianRational::zero().inv().is_err());
    }

    #[test]
    fn powers_including_negative() {
        let a = q(2, 1);
        assert_eq!(a.pow(3).unwrap(), q(8, 1));
        assert_eq!(a.pow(-2).unwrap(), q(1, 4));
        assert_eq!(a.pow(0).unwrap(), GaussianRational::one());
    }

    #[test]
    fn display_round_trip() {
        let cases = [
            GaussianRational::from_parts(3, 4, -1, 2),
            GaussianRational::from_parts(-3, 4, 1, 2),
            GaussianRational::zero(),
            GaussianRational::i(),
            q(-7, 3),
        ];
        for c in &cases {
            let s = c.to_string();
            let back: GaussianRational = s.parse().unwrap();
            assert_eq!(&back, c, "round trip through `{s}`");
        }
    }

    #[test]
    fn parse_lenient_forms() {
        assert_eq!("2".parse::<GaussianRational>().unwrap(), q(2, 1));
        assert_eq!("-1/2".parse::<GaussianRational>().unwrap(), q(-1, 2));
        assert_eq!(
            "1/2*i".parse::<GaussianRational>().unwrap(),
            GaussianRational::from_parts(0, 1, 1, 2)
        );
        assert_eq!(
            "1+2*i".parse::<GaussianRational>().unwrap(),
            GaussianRational::from_parts(1, 1, 2, 1)
        );
    }
}
