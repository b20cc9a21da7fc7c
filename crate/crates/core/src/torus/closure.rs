//! Exact orbit closures of polynomial sequences on tori.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::coset::{SubtorusCoset, SymbolicPoint};
use super::{rat_strings, TorusSequence};
use crate::cert::DecRat;
use crate::intersect::{jointly_intersective_up_to, JointVerdict, DEFAULT_BUDGET};
use crate::lattice::{divisibility_sublattice_keeping, restrict_family, AffineLattice, DivisibilityProof};
use crate::linalg::{dot, nullspace, QVec};
use crate::poly::{IntPoly, Monomial, RationalVectorPoly};
use crate::{Error, Result};

/// `q` rewritten in the coordinates of `domain`.
fn on_domain(q: &RationalVectorPoly, domain: &AffineLattice) -> Result<Vec<IntPoly>> {
    if q.nvars() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), found: q.nvars() });
    }
    restrict_family(q.components(), domain, domain)
}

/// One row per non-constant monomial: the coefficients of that monomial across components.
fn hat_rows(comps: &[IntPoly]) -> Vec<QVec> {
    let monomials: BTreeSet<&Monomial> = comps
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m))
        .filter(|m| !m.is_constant())
        .collect();
    monomials
        .into_iter()
        .map(|m| comps.iter().map(|p| p.coeff(&m.0)).collect())
        .collect()
}

fn constants(comps: &[IntPoly]) -> QVec {
    comps.iter().map(IntPoly::constant_term).collect()
}

/// Closure of `{b(n)·α/divisor : n ∈ domain}` for a single irrational label.
///
/// The subspace is spanned by the non-constant coefficient vectors of `b` in the
/// coordinates of `domain`; the offset is `b` at the base point of `domain`.
pub fn component_closure(
    label: &str,
    b: &RationalVectorPoly,
    divisor: &BigInt,
    domain: &AffineLattice,
) -> Result<SubtorusCoset> {
    if divisor.is_zero() {
        return Err(Error::InvalidModulus("label divisor must be nonzero".into()));
    }
    let comps = on_domain(b, domain)?;
    let s = comps.len();
    let d = BigRational::from_integer(divisor.clone());
    let mut offset = SymbolicPoint::zero(s);
    offset
        .irrational
        .insert(label.to_string(), constants(&comps).into_iter().map(|c| c / &d).collect());
    SubtorusCoset::new(s, &hat_rows(&comps), offset)
}

/// Minkowski sum of closures attached to distinct labels.
pub fn sum_closures(parts: &[SubtorusCoset]) -> Result<SubtorusCoset> {
    let first = parts.first().ok_or(Error::EmptyFamily)?;
    let s = first.dim();
    let mut generators = Vec::new();
    let mut offset = SymbolicPoint::zero(s);
    for part in parts {
        if part.dim() != s {
            return Err(Error::DimensionMismatch { expected: s, found: part.dim() });
        }
        generators.extend(part.basis().iter().cloned());
        for (o, r) in offset.rational.iter_mut().zip(part.rational_offset()) {
            *o += r;
        }
        for (label, v) in part.irrational_offset() {
            if offset.irrational.insert(label.clone(), v.clone()).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
    }
    SubtorusCoset::new(s, &generators, offset)
}

/// Whether `0` lies in the closure of `{q(n)·α}` for an irrational `α`.
///
/// True iff every relation `Σ c_j·q̂_j = 0` among the non-constant parts also
/// kills the constant vector, i.e. no combination of the `q_j` is a nonzero constant.
pub fn contains_zero(q: &RationalVectorPoly, domain: &AffineLattice) -> Result<bool> {
    Ok(zero_relations(q, domain)?.iter().all(|r| r.value.is_zero()))
}

struct Relation {
    kernel: QVec,
    value: BigRational,
}

fn zero_relations(q: &RationalVectorPoly, domain: &AffineLattice) -> Result<Vec<Relation>> {
    let comps = on_domain(q, domain)?;
    let c0 = constants(&comps);
    Ok(nullspace(&hat_rows(&comps), comps.len())
        .into_iter()
        .map(|kernel| {
            let value = dot(&kernel, &c0);
            Relation { kernel, value }
        })
        .collect())
}

/// Per-label evidence: a basis of the relations among the non-constant parts,
/// each of which vanishes on the constant vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelZero {
    pub label: String,
    #[serde(serialize_with = "ser_rows")]
    pub kernel: Vec<QVec>,
    /// Constant vector of `b` in the coordinates of the refined lattice.
    #[serde(serialize_with = "ser_row")]
    pub constant: QVec,
}

fn ser_rows<S: serde::Serializer>(rows: &[QVec], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rows.iter().map(|r| rat_strings(r)))
}

fn ser_row<S: serde::Serializer>(row: &QVec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(row.iter().map(|x| DecRat(x.clone())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroCertificate {
    /// Refined lattice on which the rational part vanishes modulo ℤ^s.
    pub lattice: AffineLattice,
    /// Present when the rational part needed a divisibility refinement.
    pub divisibility: Option<DivisibilityProof>,
    pub labels: Vec<LabelZero>,
    /// Result of the coset membership test applied to the zero point.
    pub zero_in_closure: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureWithZero {
    pub lattice: AffineLattice,
    pub closure: SubtorusCoset,
    pub certificate: ZeroCertificate,
}

/// Passes to a sublattice on which the rational part vanishes and returns the
/// (connected) closure there together with a certificate that it contains `0`.
///
/// The underlying family (or, if none was recorded, every nonzero component) must
/// be jointly solvable modulo every prime power up to `max(bound, k)`.
pub fn closure_with_zero(t: &TorusSequence, bound: u64) -> Result<ClosureWithZero> {
    let domain = t.domain();
    let q0_nonzero: Vec<IntPoly> =
        t.rational_part().components().iter().filter(|p| !p.is_zero()).cloned().collect();
    let family: Vec<IntPoly> = if t.family().is_empty() {
        q0_nonzero
            .iter()
            .cloned()
            .chain(t.parts().iter().flat_map(|p| p.b.components().iter().filter(|c| !c.is_zero()).cloned()))
            .collect()
    } else {
        t.family().to_vec()
    };
    let k = t
        .k()
        .to_u64()
        .ok_or_else(|| Error::InvalidModulus("rational denominator is too large".into()))?;
    let check_bound = bound.max(k).max(2);
    if !family.is_empty() {
        let restricted = restrict_family(&family, domain, domain)?;
        if let JointVerdict::Counterexample { modulus, .. } =
            jointly_intersective_up_to(&restricted, check_bound, DEFAULT_BUDGET)?
        {
            return Err(Error::PreconditionViolated(format!(
                "the family has no common root modulo {modulus}"
            )));
        }
    }
    let (lattice, divisibility) = if k > 1 && !q0_nonzero.is_empty() {
        let (l, proof) = divisibility_sublattice_keeping(&q0_nonzero, &family, domain, k, bound)?;
        (l, Some(proof))
    } else {
        (domain.clone(), None)
    };
    let s = t.dim();
    let mut closures = vec![SubtorusCoset::zero(s)];
    let mut labels = Vec::new();
    for part in t.parts() {
        let relations = zero_relations(&part.b, &lattice)?;
        if relations.iter().any(|r| !r.value.is_zero()) {
            return Err(Error::Inconsistent(format!(
                "a combination of the '{}' components is a nonzero constant, so the family is not jointly intersective",
                part.label
            )));
        }
        closures.push(component_closure(&part.label, &part.b, &part.divisor, &lattice)?);
        labels.push(LabelZero {
            label: part.label.clone(),
            kernel: relations.into_iter().map(|r| r.kernel).collect(),
            constant: constants(&on_domain(&part.b, &lattice)?),
        });
    }
    let closure = sum_closures(&closures)?;
    let zero_in_closure = closure.contains(&SymbolicPoint::zero(s));
    if !zero_in_closure {
        return Err(Error::Internal("zero failed the coset membership test".into()));
    }
    Ok(ClosureWithZero {
        lattice: lattice.clone(),
        closure,
        certificate: ZeroCertificate {
            lattice,
            divisibility,
            labels,
            zero_in_closure,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_vector;
    use crate::torus::IrrationalPart;

    fn vp(text: &str) -> RationalVectorPoly {
        RationalVectorPoly::new(parse_poly_vector(text, &["n"]).unwrap()).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn one() -> BigInt {
        BigInt::from(1)
    }

    #[test]
    fn component_examples() {
        let full = AffineLattice::full(1);
        let c = component_closure("a", &vp("(2*n+1)"), &one(), &full).unwrap();
        assert!(c.is_full());
        let c = component_closure("a", &vp("(n, n+1)"), &one(), &full).unwrap();
        assert_eq!(c.basis(), &[vec![q(1, 1), q(1, 1)]]);
        // offset (0, 1)·α is equivalent to (-1, 0)·α modulo V; canonical form zeroes the pivot
        assert_eq!(c.irrational_offset()["a"], vec![q(0, 1), q(1, 1)]);
        let c = component_closure("a", &vp("(0, 0)"), &one(), &full).unwrap();
        assert_eq!(c, SubtorusCoset::zero(2));
    }

    #[test]
    fn zero_criterion_examples() {
        let full = AffineLattice::full(1);
        assert!(!contains_zero(&vp("(n, n+1)"), &full).unwrap());
        assert!(contains_zero(&vp("(2*n+1)"), &full).unwrap());
        assert!(contains_zero(&vp("(n^2, n^2+n)"), &full).unwrap());
        // on 2ℤ+1: n ↦ 2n+1 turns (n, n+1) into (2n+1, 2n+2), still a constant gap
        assert!(!contains_zero(&vp("(n, n+1)"), &AffineLattice::scalar(2, 1)).unwrap());
    }

    #[test]
    fn sums() {
        let full = AffineLattice::full(1);
        let a = component_closure("a", &vp("(n, 0)"), &one(), &full).unwrap();
        let b = component_closure("b", &vp("(0, n)"), &one(), &full).unwrap();
        let s = sum_closures(&[a.clone(), b.clone()]).unwrap();
        assert!(s.is_full());
        assert_eq!(sum_closures(&[SubtorusCoset::zero(2), a.clone()]).unwrap(), a);
        // zero offsets carry no label, so duplicates are only visible through a nonzero offset
        let c = component_closure("a", &vp("(n, 1)"), &one(), &full).unwrap();
        assert!(matches!(sum_closures(&[c.clone(), c]), Err(Error::DuplicateLabel(_))));
    }

    fn seq(k: i64, q0: &str, parts: &[(&str, &str)], family: &[&str]) -> TorusSequence {
        TorusSequence::new(
            BigInt::from(k),
            vp(q0),
            parts
                .iter()
                .map(|(l, b)| IrrationalPart {
                    label: l.to_string(),
                    value: None,
                    divisor: one(),
                    b: vp(b),
                })
                .collect(),
            AffineLattice::full(1),
            family.iter().map(|p| crate::poly::parse_poly(p, &["n"]).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn closure_with_zero_examples() {
        let r = closure_with_zero(&seq(3, "(n)", &[], &[]), 50).unwrap();
        assert_eq!(r.lattice, AffineLattice::scalar(3, 0));
        assert_eq!(r.closure, SubtorusCoset::zero(1));

        let t = seq(1, "(0)", &[("a", "(2*n+1)")], &["2*n+1"]);
        assert!(matches!(closure_with_zero(&t, 50), Err(Error::PreconditionViolated(_))));

        let t = seq(2, "(n^2-n)", &[("a", "(n^2-n)")], &["n^2-n"]);
        let r = closure_with_zero(&t, 50).unwrap();
        assert!(r.closure.is_full());
        assert!(r.certificate.divisibility.is_some());
        assert!(r.certificate.zero_in_closure);

        let t = seq(1, "(0)", &[("a", "(2*n^2+n)")], &["n^2", "n^2+n"]);
        assert!(closure_with_zero(&t, 50).unwrap().closure.is_full());

        // the family itself passes, but the label components have a constant gap
        let t = seq(1, "(0, 0)", &[("a", "(n, n+1)")], &["n"]);
        assert!(matches!(closure_with_zero(&t, 50), Err(Error::Inconsistent(_))));
    }
}
