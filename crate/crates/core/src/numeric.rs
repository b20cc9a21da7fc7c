//! Numeric irrationals and points of ℝ/ℤ.
//!
//! Circle points are kept in 128-bit fixed point so that `b·α mod 1` stays
//! accurate for the large integer multipliers produced by polynomial values.
//! Quadratic surds are expanded from an exact integer square root.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// A point of ℝ/ℤ as a 128-bit binary fraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(pub u128);

fn two_pow(bits: u32) -> BigInt {
    BigInt::one() << bits
}

impl Angle {
    pub const ZERO: Angle = Angle(0);

    /// `floor(r · 2^128) mod 2^128`.
    pub fn from_rational(r: &BigRational) -> Self {
        let scaled = (r.numer() << 128u32).div_floor(r.denom());
        Angle::from_big(&scaled)
    }

    fn from_big(x: &BigInt) -> Self {
        let r = x.mod_floor(&two_pow(128));
        Angle(r.to_u128().expect("reduced below 2^128"))
    }

    pub fn from_f64(x: f64) -> Self {
        let f = x - x.floor();
        Angle((f * 2f64.powi(64)) as u128 * (1u128 << 64))
    }

    /// `n · self`, exact modulo 1 up to the stored precision of `self`.
    pub fn mul_int(self, n: &BigInt) -> Self {
        let r = n.mod_floor(&two_pow(128)).to_u128().expect("reduced below 2^128");
        Angle(self.0.wrapping_mul(r))
    }

    pub fn mul_i128(self, n: i128) -> Self {
        Angle(self.0.wrapping_mul(n as u128))
    }

    /// Representative in `[0, 1)`.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2f64.powi(128)
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn centered(self) -> f64 {
        (self.0 as i128) as f64 / 2f64.powi(128)
    }

    /// Distance to the nearest integer.
    pub fn norm(self) -> f64 {
        self.centered().abs()
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, o: Angle) -> Angle {
        Angle(self.0.wrapping_add(o.0))
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, o: Angle) -> Angle {
        Angle(self.0.wrapping_sub(o.0))
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle(self.0.wrapping_neg())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// `(a + b·√c) / d` with `c` not a square, `b ≠ 0`, `d > 0`.
    Surd { a: BigInt, b: BigInt, c: BigInt, d: BigInt },
    Exact(BigRational),
}

/// A real number given by name, decimal, or quadratic surd expression.
///
/// Accepted forms: `sqrt2`, `sqrt3`, `sqrt5`, `golden` (`(√5 − 1)/2`), `phi`
/// (`(1 + √5)/2`), decimals such as `0.4142`, and surds such as
/// `sqrt(2)-1` or `(1+2*sqrt(7))/3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irrational {
    text: String,
    repr: Repr,
}

impl fmt::Display for Irrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Irrational {
    pub fn parse(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidNumber(text.to_string());
        let named = match t.as_str() {
            "sqrt2" => Some("sqrt(2)"),
            "sqrt3" => Some("sqrt(3)"),
            "sqrt5" => Some("sqrt(5)"),
            "golden" => Some("(sqrt(5)-1)/2"),
            "phi" => Some("(1+sqrt(5))/2"),
            _ => None,
        };
        let body = named.unwrap_or(&t);
        let repr = if let Some(r) = parse_decimal(body) {
            Repr::Exact(r)
        } else {
            parse_surd(body).ok_or_else(bad)?
        };
        Ok(Irrational {
            text: text.trim().to_string(),
            repr,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn value(&self) -> f64 {
        match &self.repr {
            Repr::Surd { a, b, c, d } => {
                (a.to_f64().unwrap() + b.to_f64().unwrap() * c.to_f64().unwrap().sqrt()) / d.to_f64().unwrap()
            }
            Repr::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// `self / divisor mod 1` in fixed point.
    pub fn angle(&self, divisor: &BigInt) -> Angle {
        match &self.repr {
            Repr::Exact(r) => Angle::from_rational(&(r / BigRational::from_integer(divisor.clone()))),
            Repr::Surd { a, b, c, d } => {
                // 2^192·b·√c, floored toward −∞ up to one unit
                let root = (b * b * c * two_pow(384)).sqrt();
                let root = if b.sign() == Sign::Minus { -root - 1 } else { root };
                let num = (a << 192u32) + root;
                let scaled = num.div_floor(&(d * divisor)) >> 64u32;
                Angle::from_big(&scaled)
            }
        }
    }
}

/// Exact rational from `a/b`, an integer or a finite decimal.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(r) = parse_decimal(&t) {
        return Ok(r);
    }
    let bad = || Error::InvalidNumber(text.to_string());
    let (a, b) = t.split_once('/').ok_or_else(bad)?;
    let a: BigInt = a.parse().map_err(|_| bad())?;
    let b: BigInt = b.parse().map_err(|_| bad())?;
    if b.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(a, b))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.ends_with('.') {
        return None;
    }
    let n: BigInt = format!("{int}{frac}").parse().ok()?;
    let r = BigRational::new(n, BigInt::from(10).pow(frac.len() as u32));
    Some(if neg { -r } else { r })
}

/// `[(] a ± b*sqrt(c) [)] [/ d]` with the terms in either order.
fn parse_surd(s: &str) -> Option<Repr> {
    let (body, d) = match s.rsplit_once('/') {
        Some((body, d)) => (body.strip_prefix('(')?.strip_suffix(')')?, d.parse::<BigInt>().ok()?),
        None => (s, BigInt::one()),
    };
    if !d.is_positive() {
        return None;
    }
    let mut a = BigInt::zero();
    let mut sur: Option<(BigInt, BigInt)> = None;
    let mut rest = body;
    while !rest.is_empty() {
        let (sign, tail) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ if rest.len() == body.len() => (1, rest),
            _ => return None,
        };
        let end = tail[1..].find(['+', '-']).map(|i| i + 1).unwrap_or(tail.len());
        let term = &tail[..end];
        rest = &tail[end..];
        if let Some(idx) = term.find("sqrt(") {
            let coef = match &term[..idx] {
                "" => BigInt::one(),
                c => c.strip_suffix('*')?.parse().ok()?,
            };
            let c: BigInt = term[idx + 5..].strip_suffix(')')?.parse().ok()?;
            if sur.is_some() || !c.is_positive() {
                return None;
            }
            sur = Some((coef * sign, c));
        } else {
            a += term.parse::<BigInt>().ok()? * sign;
        }
    }
    let (b, c) = sur?;
    let r = c.sqrt();
    if b.is_zero() || &r * &r == c {
        return None;
    }
    Some(Repr::Surd { a, b, c, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surd_values() {
        for (text, v) in [
            ("sqrt2", 2f64.sqrt()),
            ("sqrt(2)-1", 2f64.sqrt() - 1.0),
            ("golden", (5f64.sqrt() - 1.0) / 2.0),
            ("(1+2*sqrt(7))/3", (1.0 + 2.0 * 7f64.sqrt()) / 3.0),
            ("-sqrt(3)", -(3f64.sqrt())),
            ("0.25", 0.25),
        ] {
            let x = Irrational::parse(text).unwrap();
            assert!((x.value() - v).abs() < 1e-12, "{text}");
            let frac = v - v.floor();
            assert!((x.angle(&BigInt::one()).to_f64() - frac).abs() < 1e-12, "{text}");
        }
        assert!(Irrational::parse("sqrt(4)").is_err());
        assert!(Irrational::parse("pi").is_err());
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("0.125").unwrap(), BigRational::new(1.into(), 8.into()));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn fixed_point_multiples_stay_accurate() {
        // frac(10^15 · √2) from a high-precision reference
        let a = Irrational::parse("sqrt2").unwrap().angle(&BigInt::one());
        let big = BigInt::from(10u64.pow(15));
        let exact = (BigInt::from(2) * BigInt::from(10).pow(60)).sqrt(); // 10^30·√2
        let expected = (exact % BigInt::from(10).pow(15)).to_f64().unwrap() / 1e15;
        assert!((a.mul_int(&big).to_f64() - expected).abs() < 1e-12);
        assert_eq!((a + (-a)), Angle::ZERO);
        let half = Angle::from_rational(&BigRational::new(1.into(), 2.into()));
        assert_eq!(half.centered(), -0.5);
        assert!((Irrational::parse("sqrt2").unwrap().angle(&BigInt::from(2)).to_f64() - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }
}
