//! Polynomial sequences on tori and their orbit closures.
//!
//! A [`TorusSequence`] is `t(n) = q₀(n)/k + Σ_i b_i(n)·α_i/δ_i mod ℤ^s` with
//! integer-valued vector polynomials `q₀, b_i`, and `1, α_1, …` declared
//! linearly independent over ℚ. The closure of such an orbit is a
//! [`SubtorusCoset`]: the image of a rational affine subspace.

mod closure;
mod coset;
mod sample;

pub use closure::{closure_with_zero, component_closure, contains_zero, sum_closures, ClosureWithZero, LabelZero, ZeroCertificate};
pub use coset::{SubtorusCoset, SymbolicPoint};
pub use sample::{sample_verify, SampleOptions, SampleReport};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cert::{DecInt, DecRat};
use crate::lattice::AffineLattice;
use crate::poly::{default_vars, parse_poly, IntPoly, RationalVectorPoly};
use crate::{Error, Result};

/// One irrational component: `b(n)·α/divisor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrationalPart {
    pub label: String,
    /// Numeric value of `α` (see [`crate::numeric::Irrational`]), used only for sampling.
    pub value: Option<String>,
    pub divisor: BigInt,
    pub b: RationalVectorPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusSequence {
    dim: usize,
    nvars: usize,
    k: BigInt,
    q0: RationalVectorPoly,
    parts: Vec<IrrationalPart>,
    domain: AffineLattice,
    family: Vec<IntPoly>,
}

impl TorusSequence {
    /// Validates dimensions, integrality on `domain` and label uniqueness.
    pub fn new(
        k: BigInt,
        q0: RationalVectorPoly,
        parts: Vec<IrrationalPart>,
        domain: AffineLattice,
        family: Vec<IntPoly>,
    ) -> Result<Self> {
        let (dim, nvars) = (q0.dim(), q0.nvars());
        if !k.is_positive() {
            return Err(Error::InvalidModulus("rational denominator must be positive".into()));
        }
        if domain.dim() != nvars {
            return Err(Error::DimensionMismatch { expected: nvars, found: domain.dim() });
        }
        let mut seen = std::collections::BTreeSet::new();
        for part in &parts {
            if !seen.insert(part.label.as_str()) {
                return Err(Error::DuplicateLabel(part.label.clone()));
            }
            if part.b.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: part.b.dim() });
            }
            if part.b.nvars() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: part.b.nvars() });
            }
            if !part.divisor.is_positive() {
                return Err(Error::InvalidModulus("label divisor must be positive".into()));
            }
        }
        for p in q0.components().iter().chain(parts.iter().flat_map(|p| p.b.components())) {
            if !p.is_integral_on(&domain)? {
                return Err(Error::NotIntegral(p.to_string()));
            }
        }
        if let Some(p) = family.iter().find(|p| p.nvars() != nvars) {
            return Err(Error::DimensionMismatch { expected: nvars, found: p.nvars() });
        }
        Ok(TorusSequence { dim, nvars, k, q0, parts, domain, family })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn k(&self) -> &BigInt {
        &self.k
    }

    pub fn rational_part(&self) -> &RationalVectorPoly {
        &self.q0
    }

    pub fn parts(&self) -> &[IrrationalPart] {
        &self.parts
    }

    pub fn domain(&self) -> &AffineLattice {
        &self.domain
    }

    /// Polynomials the sequence was assembled from (may be empty).
    pub fn family(&self) -> &[IntPoly] {
        &self.family
    }

    /// Same sequence on a smaller domain.
    pub fn with_domain(&self, domain: AffineLattice) -> Result<Self> {
        if !self.domain.contains_lattice(&domain) {
            return Err(Error::NotSublattice);
        }
        let mut out = self.clone();
        out.domain = domain;
        Ok(out)
    }

    /// Attaches numeric values to labels.
    pub fn with_values(mut self, values: &BTreeMap<String, String>) -> Self {
        for part in &mut self.parts {
            if let Some(v) = values.get(&part.label) {
                part.value = Some(v.clone());
            }
        }
        self
    }

    /// Exact symbolic value `t(n)` before reduction modulo ℤ^s.
    pub fn symbolic_at(&self, n: &[BigInt]) -> Result<SymbolicPoint> {
        let k = BigRational::from_integer(self.k.clone());
        let rational = self.q0.eval(n)?.into_iter().map(|v| v / &k).collect();
        let mut irrational = BTreeMap::new();
        for part in &self.parts {
            let d = BigRational::from_integer(part.divisor.clone());
            let v: Vec<BigRational> = part.b.eval(n)?.into_iter().map(|x| x / &d).collect();
            irrational.insert(part.label.clone(), v);
        }
        Ok(SymbolicPoint { rational, irrational })
    }
}

/// A coordinate `r + Σ c_i·α_i` with rational `r, c_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearForm {
    pub rational: BigRational,
    pub irrational: BTreeMap<String, BigRational>,
}

impl LinearForm {
    /// Parses e.g. `1/2`, `alpha`, `2*alpha - 1/3*beta + 5` over the declared labels.
    pub fn parse(text: &str, labels: &[&str]) -> Result<Self> {
        let p = parse_poly(text, labels).map_err(|e| match undeclared_identifier(text, labels) {
            Some(name) => Error::UndeclaredLabel(name),
            None => Error::Parse(e),
        })?;
        if p.degree() > 1 {
            return Err(Error::InvalidNumber(format!("'{text}' is not linear in the labels")));
        }
        let mut irrational = BTreeMap::new();
        for (i, name) in labels.iter().enumerate() {
            let mut e = vec![0u32; labels.len()];
            e[i] = 1;
            let c = p.coeff(&e);
            if !c.is_zero() {
                irrational.insert(name.to_string(), c);
            }
        }
        Ok(LinearForm {
            rational: p.constant_term(),
            irrational,
        })
    }
}

fn undeclared_identifier(text: &str, labels: &[&str]) -> Option<String> {
    let mut cur = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_ascii_alphanumeric() || c == '_' {
            cur.push(c);
        } else {
            if cur.chars().next().is_some_and(|f| f.is_ascii_alphabetic() || f == '_') && !labels.contains(&cur.as_str()) {
                return Some(cur);
            }
            cur.clear();
        }
    }
    None
}

/// Least `k ≥ 1` making `k·p` integer-valued on ℤ^m (values on the degree grid decide).
fn integrality_denominator(p: &IntPoly) -> Result<BigInt> {
    let m = p.nvars();
    let degs: Vec<u32> = (0..m).map(|j| p.degree_in(j)).collect();
    let mut point = vec![0u32; m];
    let mut k = BigInt::one();
    loop {
        let pt: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
        k = k.lcm(p.eval(&pt)?.denom());
        let mut j = 0;
        loop {
            if j == m {
                return Ok(k);
            }
            if point[j] < degs[j] {
                point[j] += 1;
                break;
            }
            point[j] = 0;
            j += 1;
        }
    }
}

/// Gathers `Σ p_i(n)·v_i` into canonical form on `domain`.
///
/// `vectors[i]` holds the `s` coordinates of `v_i`. Every label occurring must be
/// declared; labels are taken with their numeric values, if any. The result is
/// checked against the input by coefficient comparison.
pub fn normalize_form(
    polys: &[IntPoly],
    vectors: &[Vec<LinearForm>],
    labels: &[(String, Option<String>)],
    domain: &AffineLattice,
) -> Result<TorusSequence> {
    if polys.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if polys.len() != vectors.len() {
        return Err(Error::DimensionMismatch { expected: polys.len(), found: vectors.len() });
    }
    let s = vectors[0].len();
    if s == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != s) {
        return Err(Error::DimensionMismatch { expected: s, found: v.len() });
    }
    let m = polys[0].nvars();
    let declared: Vec<&str> = labels.iter().map(|(l, _)| l.as_str()).collect();
    for v in vectors.iter().flatten() {
        if let Some(l) = v.irrational.keys().find(|l| !declared.contains(&l.as_str())) {
            return Err(Error::UndeclaredLabel(l.clone()));
        }
    }
    // pull back to ℤ^m so integrality is measured on the domain
    let param = domain.parametrization();
    let sum_for = |coef: &dyn Fn(&LinearForm) -> BigRational| -> Result<Vec<IntPoly>> {
        (0..s)
            .map(|j| {
                let mut acc = IntPoly::zero(m);
                for (p, v) in polys.iter().zip(vectors) {
                    let c = coef(&v[j]);
                    if !c.is_zero() {
                        acc = &acc + &p.clone().without_domain().scale(&c);
                    }
                }
                Ok(acc)
            })
            .collect()
    };
    let denominator = |comps: &[IntPoly]| -> Result<BigInt> {
        comps.iter().try_fold(BigInt::one(), |acc, c| {
            Ok(acc.lcm(&integrality_denominator(&c.compose(&param)?)?))
        })
    };

    let rational = sum_for(&|f: &LinearForm| f.rational.clone())?;
    let k = denominator(&rational)?;
    let q0 = RationalVectorPoly::new(rational.iter().map(|c| c.scale_int(&k)).collect())?;
    let mut parts = Vec::new();
    for (label, value) in labels {
        let comps = sum_for(&|f: &LinearForm| f.irrational.get(label).cloned().unwrap_or_else(BigRational::zero))?;
        if comps.iter().all(IntPoly::is_zero) {
            continue;
        }
        let divisor = denominator(&comps)?;
        parts.push(IrrationalPart {
            label: label.clone(),
            value: value.clone(),
            b: RationalVectorPoly::new(comps.iter().map(|c| c.scale_int(&divisor)).collect())?,
            divisor,
        });
    }
    let t = TorusSequence::new(k, q0, parts, domain.clone(), polys.to_vec())?;

    // coefficient comparison against the input
    let kq = BigRational::from_integer(t.k.clone()).recip();
    for (j, r) in rational.iter().enumerate() {
        if &t.q0.components()[j].scale(&kq) != r {
            return Err(Error::Internal("rational part does not reproduce the input".into()));
        }
    }
    for part in &t.parts {
        let expect = sum_for(&|f: &LinearForm| f.irrational.get(&part.label).cloned().unwrap_or_else(BigRational::zero))?;
        let inv = BigRational::from_integer(part.divisor.clone()).recip();
        for (j, e) in expect.iter().enumerate() {
            if &part.b.components()[j].scale(&inv) != e {
                return Err(Error::Internal(format!("part '{}' does not reproduce the input", part.label)));
            }
        }
    }
    Ok(t)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartRepr {
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    divisor: DecInt,
    b: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceRepr {
    dim: usize,
    vars: Vec<String>,
    k: DecInt,
    rational_part: Vec<String>,
    irrational_parts: Vec<PartRepr>,
    domain: AffineLattice,
    #[serde(default)]
    family: Vec<String>,
}

impl Serialize for TorusSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let vars = default_vars(self.nvars);
        let render = |v: &RationalVectorPoly| v.components().iter().map(|p| p.render(&vars)).collect();
        SequenceRepr {
            dim: self.dim,
            vars: vars.clone(),
            k: DecInt(self.k.clone()),
            rational_part: render(&self.q0),
            irrational_parts: self
                .parts
                .iter()
                .map(|p| PartRepr {
                    label: p.label.clone(),
                    value: p.value.clone(),
                    divisor: DecInt(p.divisor.clone()),
                    b: render(&p.b),
                })
                .collect(),
            domain: self.domain.clone(),
            family: self.family.iter().map(|p| p.render(&vars)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SequenceRepr::deserialize(d)?;
        let vars: Vec<&str> = r.vars.iter().map(String::as_str).collect();
        let parse = |v: &[String]| -> Result<RationalVectorPoly> {
            RationalVectorPoly::new(v.iter().map(|t| parse_poly(t, &vars)).collect::<std::result::Result<_, _>>()?)
        };
        let build = || -> Result<TorusSequence> {
            let q0 = parse(&r.rational_part)?;
            if q0.dim() != r.dim {
                return Err(Error::DimensionMismatch { expected: r.dim, found: q0.dim() });
            }
            let parts = r
                .irrational_parts
                .iter()
                .map(|p| {
                    Ok(IrrationalPart {
                        label: p.label.clone(),
                        value: p.value.clone(),
                        divisor: p.divisor.0.clone(),
                        b: parse(&p.b)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let family = r.family.iter().map(|t| parse_poly(t, &vars)).collect::<std::result::Result<_, _>>()?;
            TorusSequence::new(r.k.0.clone(), q0, parts, r.domain.clone(), family)
        };
        build().map_err(D::Error::custom)
    }
}

pub(crate) fn rat_strings(v: &[BigRational]) -> Vec<DecRat> {
    v.iter().map(|x| DecRat(x.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPoly {
        parse_poly(s, &["n"]).unwrap()
    }

    fn forms(v: &[&str], labels: &[&str]) -> Vec<LinearForm> {
        v.iter().map(|t| LinearForm::parse(t, labels).unwrap()).collect()
    }

    #[test]
    fn normal_form_examples() {
        let full = AffineLattice::full(1);
        let a = vec![("alpha".to_string(), None)];
        let t = normalize_form(&[p("n")], &[forms(&["alpha"], &["alpha"])], &a, &full).unwrap();
        assert_eq!(t.k(), &BigInt::one());
        assert!(t.rational_part().components()[0].is_zero());
        assert_eq!(t.parts()[0].b.components(), &[p("n")]);

        let t = normalize_form(&[p("n")], &[forms(&["1/3"], &[])], &[], &full).unwrap();
        assert_eq!(t.k(), &BigInt::from(3));
        assert_eq!(t.rational_part().components(), &[p("n")]);
        assert!(t.parts().is_empty());

        let t = normalize_form(
            &[p("2*n+1"), p("n^2")],
            &[forms(&["alpha", "1/2"], &["alpha"]), forms(&["0", "alpha"], &["alpha"])],
            &a,
            &full,
        )
        .unwrap();
        assert_eq!(t.k(), &BigInt::from(2));
        assert_eq!(t.rational_part().components(), &[p("0"), p("2*n+1")]);
        assert_eq!(t.parts()[0].b.components(), &[p("2*n+1"), p("n^2")]);

        assert!(matches!(
            LinearForm::parse("beta", &["alpha"]),
            Err(Error::UndeclaredLabel(l)) if l == "beta"
        ));
    }

    #[test]
    fn integer_valued_parts_need_no_extra_denominator() {
        // n(n-1)/2 · (1/2): values are multiples of 1/2 only on even triangular numbers
        let full = AffineLattice::full(1);
        let t = normalize_form(&[p("n*(n-1)/2")], &[forms(&["1/2"], &[])], &[], &full).unwrap();
        assert_eq!(t.k(), &BigInt::from(2));
        assert_eq!(t.rational_part().components(), &[p("n*(n-1)/2")]);
        // a label coefficient 1/2 becomes a divisor
        let a = vec![("a".to_string(), None)];
        let t = normalize_form(&[p("n")], &[forms(&["a/2"], &["a"])], &a, &full).unwrap();
        assert_eq!(t.parts()[0].divisor, BigInt::from(2));
    }

    #[test]
    fn json_round_trip() {
        let full = AffineLattice::full(1);
        let a = vec![("alpha".to_string(), Some("sqrt2".to_string()))];
        let t = normalize_form(&[p("n^2+n")], &[forms(&["alpha", "1/3"], &["alpha"])], &a, &full).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        let back: TorusSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }
}
