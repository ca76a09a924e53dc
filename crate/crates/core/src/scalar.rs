//! Scalars that stay exact rationals until an irrational operation forces
//! floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number used for geometry and structure constants.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("cannot parse `{0}` as a number")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {0}")]
    NegativeSqrt(String),
    #[error("{base}^{exponent} is not a real number")]
    Domain { base: String, exponent: String },
}

/// A real number that is either an exact rational or an `f64`.
///
/// Arithmetic between two exact values is exact; anything touching a
/// `Real` degrades to `Real`.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(Rational),
    Real(f64),
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(rational_int(n))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Scalar::Exact(rational(numer, denom))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Real(x) => *x,
        }
    }

    /// Forces the floating-point representation.
    pub fn to_real(&self) -> Scalar {
        Scalar::Real(self.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Real(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Real(x) => *x < 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Real(x) => Scalar::Real(x.abs()),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                if b.is_zero() {
                    Err(ScalarError::DivisionByZero)
                } else {
                    Ok(Scalar::Exact(a / b))
                }
            }
            _ => {
                let d = rhs.to_f64();
                if d == 0.0 {
                    Err(ScalarError::DivisionByZero)
                } else {
                    Ok(Scalar::Real(self.to_f64() / d))
                }
            }
        }
    }

    pub fn powi(&self, exp: i64) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Exact(q) => {
                if exp < 0 && q.is_zero() {
                    return Err(ScalarError::DivisionByZero);
                }
                let e = i32::try_from(exp).map_err(|_| ScalarError::Domain {
                    base: self.to_string(),
                    exponent: exp.to_string(),
                })?;
                Ok(Scalar::Exact(num_traits::Pow::pow(q, e)))
            }
            Scalar::Real(x) => {
                if exp < 0 && *x == 0.0 {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(Scalar::Real(x.powi(exp as i32)))
            }
        }
    }

    /// Square root; exact when numerator and denominator are perfect squares.
    pub fn sqrt(&self) -> Result<Scalar, ScalarError> {
        if self.is_negative() {
            return Err(ScalarError::NegativeSqrt(self.to_string()));
        }
        self.root(2)
    }

    fn root(&self, n: u32) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Exact(q) => {
                if let Some(r) = exact_root(q, n) {
                    return Ok(Scalar::Exact(r));
                }
                Ok(Scalar::Real(real_root(rational_to_f64(q), n)))
            }
            Scalar::Real(x) => Ok(Scalar::Real(real_root(*x, n))),
        }
    }

    /// General power. Integer exponents stay exact; rational exponents `p/q`
    /// stay exact when the base has an exact `q`-th root.
    pub fn pow(&self, exp: &Scalar) -> Result<Scalar, ScalarError> {
        let domain = || ScalarError::Domain {
            base: self.to_string(),
            exponent: exp.to_string(),
        };
        if let Scalar::Exact(e) = exp {
            if e.is_integer() {
                let n = e.to_integer().to_i64().ok_or_else(domain)?;
                return self.powi(n);
            }
            let denom = e.denom().to_u32().ok_or_else(domain)?;
            let numer = e.numer().to_i64().ok_or_else(domain)?;
            if self.is_negative() && denom % 2 == 0 {
                return Err(domain());
            }
            if self.is_zero() && numer < 0 {
                return Err(ScalarError::DivisionByZero);
            }
            if let Scalar::Exact(b) = self {
                let magnitude = exact_root(&b.abs(), denom);
                if let Some(r) = magnitude {
                    let r = if b.is_negative() { -r } else { r };
                    return Scalar::Exact(r).powi(numer);
                }
            }
            let b = self.to_f64();
            let r = real_root(b.abs(), denom) * b.signum();
            return Scalar::Real(r).powi(numer);
        }
        let b = self.to_f64();
        let e = exp.to_f64();
        if b < 0.0 {
            return Err(domain());
        }
        if b == 0.0 && e < 0.0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::Real(b.powf(e)))
    }

    /// Renders with at most `digits` significant decimal digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        format_significant(self.to_f64(), digits)
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }
}

fn real_root(x: f64, n: u32) -> f64 {
    match n {
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        _ => x.powf(1.0 / f64::from(n)),
    }
}

fn exact_root(q: &Rational, n: u32) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let num = q.numer().nth_root(n);
    let den = q.denom().nth_root(n);
    if num.pow(n) == *q.numer() && den.pow(n) == *q.denom() {
        Some(Rational::new(num, den))
    } else {
        None
    }
}

pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    format!("{rounded}")
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Parses `p/q`, integers, and decimals (optionally with an exponent) as
/// exact rationals.
pub fn parse_rational(src: &str) -> Result<Rational, ScalarError> {
    let s = src.trim();
    let err = || ScalarError::Parse(src.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        return Ok(p / q);
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = body[pos + 1..].parse().map_err(|_| err())?;
            (&body[..pos], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::Pow::pow(&ten, scale as u32));
    } else {
        value /= Rational::from_integer(num_traits::Pow::pow(&ten, (-scale) as u32));
    }
    Ok(if negative { -value } else { value })
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(Scalar::Exact)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Real(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero; use [`Scalar::checked_div`] for
    /// untrusted input.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Real(x) => Scalar::Real(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

/// Order-insensitive accumulator: exact terms are summed exactly, float
/// terms with Neumaier compensation.
#[derive(Debug, Clone)]
pub struct ScalarSum {
    exact: Rational,
    sum: f64,
    compensation: f64,
    has_real: bool,
}

impl Default for ScalarSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ScalarSum {
    pub fn new() -> Self {
        ScalarSum {
            exact: Rational::zero(),
            sum: 0.0,
            compensation: 0.0,
            has_real: false,
        }
    }

    pub fn add(&mut self, x: &Scalar) {
        match x {
            Scalar::Exact(q) => self.exact += q,
            Scalar::Real(v) => {
                self.has_real = true;
                let t = self.sum + v;
                if self.sum.abs() >= v.abs() {
                    self.compensation += (self.sum - t) + v;
                } else {
                    self.compensation += (v - t) + self.sum;
                }
                self.sum = t;
            }
        }
    }

    pub fn finish(self) -> Scalar {
        if self.has_real {
            Scalar::Real(rational_to_f64(&self.exact) + (self.sum + self.compensation))
        } else {
            Scalar::Exact(self.exact)
        }
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        let mut acc = ScalarSum::new();
        for x in iter {
            acc.add(x);
        }
        acc.finish()
    }
}

impl std::iter::Sum<Scalar> for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = ScalarSum::new();
        for x in iter {
            acc.add(&x);
        }
        acc.finish()
    }
}
