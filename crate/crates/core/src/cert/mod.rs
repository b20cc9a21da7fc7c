//! Machine-checkable evidence for intersectivity verdicts.
//!
//! Certificates are canonical: wherever several pieces of evidence would
//! prove the same claim, the emitter picks the least one under a fixed order
//! and the checker rejects any other choice. A statement therefore has at
//! most one accepted certificate of each kind.

mod check;

pub use check::{verify, CertError};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::poly::{default_vars, IntPoly};

/// Integer carried as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecInt(pub BigInt);

impl From<BigInt> for DecInt {
    fn from(v: BigInt) -> Self {
        DecInt(v)
    }
}

impl From<u64> for DecInt {
    fn from(v: u64) -> Self {
        DecInt(v.into())
    }
}

impl From<i64> for DecInt {
    fn from(v: i64) -> Self {
        DecInt(v.into())
    }
}

impl fmt::Display for DecInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for DecInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for DecInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_decimal(&s).map(DecInt).map_err(serde::de::Error::custom)
    }
}

fn parse_decimal(s: &str) -> Result<BigInt, String> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || (digits.len() > 1 && digits.starts_with('0')) {
        return Err(format!("'{s}' is not a canonical decimal integer"));
    }
    if s == "-0" {
        return Err("'-0' is not canonical".into());
    }
    BigInt::from_str(s).map_err(|e| e.to_string())
}

/// Rational carried as `"a/b"` (or `"a"` when integral), lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecRat(pub BigRational);

impl fmt::Display for DecRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            self.0.numer().fmt(f)
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for DecRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DecRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let r = match s.split_once('/') {
            None => BigRational::from_integer(parse_decimal(&s).map_err(serde::de::Error::custom)?),
            Some((a, b)) => {
                let a = parse_decimal(a).map_err(serde::de::Error::custom)?;
                let b = parse_decimal(b).map_err(serde::de::Error::custom)?;
                if b <= BigInt::from(1) {
                    return Err(serde::de::Error::custom("denominator must exceed 1"));
                }
                let r = BigRational::new(a.clone(), b.clone());
                if r.numer() != &a || r.denom() != &b {
                    return Err(serde::de::Error::custom("rational is not in lowest terms"));
                }
                r
            }
        };
        Ok(DecRat(r))
    }
}

/// Statement a certificate proves about its family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Claim {
    /// For every `k` a single `n` makes every member divisible by `k`.
    Intersective {},
    /// No `n` makes every member divisible by `modulus`.
    NotIntersective { modulus: DecInt },
    /// Jointly solvable modulo every prime power up to `bound`.
    SolvableUpTo { bound: DecInt },
    /// The single member has a root in ℤ_q for every prime `q ≤ prime_bound`.
    LocalRootsUpTo { prime_bound: DecInt },
    /// Only the Bezout reduction itself; the nested verdict was inconclusive.
    ReducesToGcd {},
}

/// One q-adic root: `P(root) ≡ 0 mod q^(2t+1)` and `v_q(P'(root)) = t`,
/// where `P` is the member scaled to integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HenselEntry {
    pub prime: DecInt,
    pub root: DecInt,
    pub t: u32,
}

/// A factor whose local roots are automatic outside a finite prime set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailFactor {
    /// `w·n − u` for the root `u/w`: roots in ℤ_q for every `q ∤ w`.
    Linear { root: DecRat },
    /// `(n² − a)(n² − b)(n² − ab)`: roots in ℤ_q for every `q ∤ 2ab`.
    QuadTriple { a: DecInt, b: DecInt },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessTable {
    /// Common integer root, least by `(|r|, r)`.
    pub root: DecInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HenselPayload {
    /// Largest prime covered; every prime up to it has exactly one entry.
    pub prime_bound: DecInt,
    pub proofs: Vec<HenselEntry>,
    pub tail: Option<TailFactor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegendreRow {
    pub prime: DecInt,
    pub a1: i8,
    pub a2: i8,
    pub product: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadResidueProof {
    pub a1: DecInt,
    pub a2: DecInt,
    /// `p = scale · (n² − a1)(n² − a2)(n² − a1·a2)`.
    pub scale: DecRat,
    /// Least square root of `a1` modulo `a2`, and vice versa.
    pub sqrt_a1_mod_a2: DecInt,
    pub sqrt_a2_mod_a1: DecInt,
    /// Largest prime in the Legendre table.
    pub legendre_bound: DecInt,
    /// Spot table with one row per odd prime up to `legendre_bound`.
    pub legendre: Vec<LegendreRow>,
    /// Local roots of the unscaled sextic at 2, a1 and a2, in that order.
    pub local: Vec<HenselEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BezoutReduction {
    /// Primitive integer GCD `g`.
    pub gcd: String,
    /// `Σ h_i·p_i = scale·g`.
    pub scale: DecInt,
    pub cofactors: Vec<String>,
    /// `p_i = g·quotient_i`.
    pub quotients: Vec<String>,
    pub nested: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleTable {
    pub modulus: DecInt,
    /// Period of the family's values modulo `modulus`.
    pub search_modulus: DecInt,
    /// For each residue (lexicographic, last coordinate fastest), the least
    /// member index that is not divisible by `modulus` there.
    pub table: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundedWitness {
    pub modulus: DecInt,
    /// Least residue vector in `[0, search modulus)^m`.
    pub residue: Vec<DecInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundedOnly {
    /// Largest prime power listed; every prime power up to it has one witness.
    pub bound: DecInt,
    pub witnesses: Vec<BoundedWitness>,
    /// Either empty or one local root for every prime up to `bound`.
    pub local: Vec<HenselEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", deny_unknown_fields)]
pub enum Evidence {
    WitnessTable(WitnessTable),
    HenselProof(HenselPayload),
    QuadResidueProof(QuadResidueProof),
    BezoutReduction(Box<BezoutReduction>),
    CounterexampleModulus(CounterexampleTable),
    BoundedOnly(BoundedOnly),
}

impl Evidence {
    pub fn kind(&self) -> &'static str {
        match self {
            Evidence::WitnessTable(_) => "WitnessTable",
            Evidence::HenselProof(_) => "HenselProof",
            Evidence::QuadResidueProof(_) => "QuadResidueProof",
            Evidence::BezoutReduction(_) => "BezoutReduction",
            Evidence::CounterexampleModulus(_) => "CounterexampleModulus",
            Evidence::BoundedOnly(_) => "BoundedOnly",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub vars: Vec<String>,
    pub family: Vec<String>,
    pub claim: Claim,
    pub evidence: Evidence,
    /// SHA-256 of the other fields; binds the evidence to its family and claim.
    pub seal: String,
}

/// Hex SHA-256 of the canonical JSON of `(vars, family, claim, evidence)`.
fn content_seal(vars: &[String], family: &[String], claim: &Claim, evidence: &Evidence) -> String {
    let body = serde_json::to_string(&(vars, family, claim, evidence)).expect("certificate serializes");
    format!("{:x}", Sha256::digest(body.as_bytes()))
}

impl Certificate {
    /// Wraps evidence for `family`, rendered in the default variable names.
    pub fn new(family: &[IntPoly], claim: Claim, evidence: Evidence) -> Self {
        let nvars = family.first().map(IntPoly::nvars).unwrap_or(1);
        let vars = default_vars(nvars);
        let mut cert = Certificate {
            family: family.iter().map(|p| p.render(&vars)).collect(),
            vars,
            claim,
            evidence,
            seal: String::new(),
        };
        cert.reseal();
        cert
    }

    /// Recomputes the seal after the fields were edited.
    pub fn reseal(&mut self) {
        self.seal = self.expected_seal();
    }

    pub fn expected_seal(&self) -> String {
        content_seal(&self.vars, &self.family, &self.claim, &self.evidence)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_strings_are_canonical() {
        assert!(serde_json::from_str::<DecInt>("\"-17\"").is_ok());
        for bad in ["\"007\"", "\"-0\"", "\"1e3\"", "\"\"", "\"+4\"", "12"] {
            assert!(serde_json::from_str::<DecInt>(bad).is_err(), "{bad}");
        }
        let r: DecRat = serde_json::from_str("\"-3/4\"").unwrap();
        assert_eq!(r.0, BigRational::new((-3).into(), 4.into()));
        assert!(serde_json::from_str::<DecRat>("\"2/4\"").is_err());
        assert!(serde_json::from_str::<DecRat>("\"3/1\"").is_err());
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"-3/4\"");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for bad in [
            r#"{"type":"intersective","extra":1}"#,
            r#"{"type":"reduces_to_gcd","extra":1}"#,
            r#"{"type":"not_intersective","modulus":"3","extra":1}"#,
        ] {
            assert!(serde_json::from_str::<Claim>(bad).is_err(), "{bad}");
        }
        assert!(serde_json::from_str::<Claim>(r#"{"type":"intersective"}"#).is_ok());
        let e = r#"{"kind":"WitnessTable","payload":{"root":"2"},"extra":1}"#;
        assert!(serde_json::from_str::<Evidence>(e).is_err());
    }
}
