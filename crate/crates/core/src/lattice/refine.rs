//! Restricting families to sublattices and the two refinement constructions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::AffineLattice;
use crate::intersect::{jointly_intersective_up_to, JointVerdict, DEFAULT_BUDGET};
use crate::poly::{denominator_scale, IntPoly};
use crate::{Error, Result};

/// Rewrites each polynomial in the coordinates of `sub`: `p ↦ p(A′·n + l′)`.
///
/// Every member must be integral on `domain`, and `sub ⊆ domain`.
pub fn restrict_family(family: &[IntPoly], domain: &AffineLattice, sub: &AffineLattice) -> Result<Vec<IntPoly>> {
    if !domain.contains_lattice(sub) {
        return Err(Error::NotSublattice);
    }
    let param = sub.parametrization();
    family
        .iter()
        .map(|p| {
            if p.nvars() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    expected: domain.dim(),
                    found: p.nvars(),
                });
            }
            if !p.is_integral_on(domain)? {
                return Err(Error::NotIntegral(p.to_string()));
            }
            p.clone().without_domain().compose(&param)
        })
        .collect()
}

/// Symbolic evidence that every member is divisible by `k` on the refined lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityProof {
    pub k: u64,
    /// Common denominator of the family in the coordinates of the input lattice.
    pub scale: u64,
    /// Chosen residue in the coordinates of the input lattice, in `[0, k·scale)^m`.
    pub residue: Vec<u64>,
    /// `p_i(A′·n + l′) / k`, each integral on ℤ^m.
    #[serde(serialize_with = "render_polys")]
    pub quotients: Vec<IntPoly>,
    /// Prime-power bound up to which the restricted family stays jointly solvable.
    pub verified_bound: u64,
}

fn render_polys<S: serde::Serializer>(ps: &[IntPoly], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| p.to_string()))
}

/// `L′ = k·d·L + l` on which every member takes values divisible by `k`.
///
/// Residues `x` with `k·d | d·p_i(x)` are tried in lexicographic order; the first
/// whose refined family stays jointly solvable modulo every prime power up to
/// `search_bound` is chosen.
pub fn divisibility_sublattice(
    family: &[IntPoly],
    domain: &AffineLattice,
    k: u64,
    search_bound: u64,
) -> Result<(AffineLattice, DivisibilityProof)> {
    divisibility_sublattice_keeping(family, family, domain, k, search_bound)
}

/// As [`divisibility_sublattice`], but the bounded joint-solvability check runs
/// on `keep` (restricted to the refined lattice) instead of on `family`.
pub(crate) fn divisibility_sublattice_keeping(
    family: &[IntPoly],
    keep: &[IntPoly],
    domain: &AffineLattice,
    k: u64,
    search_bound: u64,
) -> Result<(AffineLattice, DivisibilityProof)> {
    if k == 0 {
        return Err(Error::InvalidModulus("k must be positive".into()));
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let on_domain = restrict_family(family, domain, domain)?;
    let d = denominator_scale(&on_domain);
    let kd = d
        .to_u64()
        .and_then(|d| d.checked_mul(k))
        .filter(|&x| x < 1 << 31)
        .ok_or_else(|| Error::InvalidModulus("k·d is too large".into()))?;
    let kd_big = BigInt::from(kd);
    let m = domain.dim();
    let mut found_root = false;
    let mut digits = vec![0u64; m];
    loop {
        let x: Vec<BigInt> = digits.iter().rev().map(|&v| BigInt::from(v)).collect();
        if divisible_at(&on_domain, &x, k)? {
            found_root = true;
            let sub = domain.refine(&kd_big, &domain.point(&x))?;
            let quotients = quotients_by(&restrict_family(family, domain, &sub)?, k)?;
            let kept = restrict_family(keep, domain, &sub)?;
            let passes = search_bound < 2
                || keep.is_empty()
                || matches!(
                    jointly_intersective_up_to(&kept, search_bound, DEFAULT_BUDGET)?,
                    JointVerdict::SolvableAllModuli { .. }
                );
            if passes {
                let proof = DivisibilityProof {
                    k,
                    scale: d.to_u64().expect("checked above"),
                    residue: digits.iter().rev().copied().collect(),
                    quotients,
                    verified_bound: search_bound,
                };
                return Ok((sub, proof));
            }
        }
        if !crate::intersect::advance_odometer(&mut digits, kd) {
            break;
        }
    }
    Err(Error::Inconsistent(if found_root {
        format!("no residue modulo {kd} keeps the family jointly solvable up to {search_bound}")
    } else {
        format!("the family has no common root modulo {k}")
    }))
}

fn divisible_at(family: &[IntPoly], x: &[BigInt], k: u64) -> Result<bool> {
    let k = BigInt::from(k);
    for p in family {
        let v = p.eval(x)?;
        if !v.is_integer() || !(v.to_integer() % &k).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `p / k` for each member, checked integral.
fn quotients_by(family: &[IntPoly], k: u64) -> Result<Vec<IntPoly>> {
    let inv = BigRational::new(1.into(), k.into());
    family
        .iter()
        .map(|p| {
            let q = p.scale(&inv);
            if q.is_integral() {
                Ok(q)
            } else {
                Err(Error::Internal(format!("{p} is not divisible by {k} on the refined lattice")))
            }
        })
        .collect()
}

/// Result of [`coset_refine`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetChoice {
    /// Canonical offset of the chosen coset.
    pub offset: Vec<BigInt>,
    pub lattice: AffineLattice,
    /// The family in the coordinates of `lattice`.
    pub restricted: Vec<IntPoly>,
    pub verified_bound: u64,
}

/// First coset of `sub` inside `domain` (lexicographic canonical offsets) on
/// which the family is jointly solvable modulo every prime power up to `bound`.
pub fn coset_refine(family: &[IntPoly], domain: &AffineLattice, sub: &AffineLattice, bound: u64) -> Result<CosetChoice> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let offsets = domain.coset_offsets(sub)?;
    let outcomes: Vec<Result<Option<CosetChoice>>> = offsets
        .par_iter()
        .map(|o| {
            let lattice = sub.with_offset(o)?;
            let restricted = restrict_family(family, domain, &lattice)?;
            match jointly_intersective_up_to(&restricted, bound, DEFAULT_BUDGET)? {
                JointVerdict::SolvableAllModuli { .. } => Ok(Some(CosetChoice {
                    offset: o.clone(),
                    lattice,
                    restricted,
                    verified_bound: bound,
                })),
                JointVerdict::Counterexample { .. } => Ok(None),
            }
        })
        .collect();
    for out in outcomes {
        if let Some(choice) = out? {
            return Ok(choice);
        }
    }
    Err(Error::Inconsistent(format!(
        "no coset of the sublattice is jointly solvable up to {bound}; raise the bound"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn fam(src: &[&str]) -> Vec<IntPoly> {
        src.iter().map(|s| parse_poly(s, &["n"]).unwrap()).collect()
    }

    #[test]
    fn restriction_examples() {
        let full = AffineLattice::full(1);
        let r = restrict_family(&fam(&["2*n+1"]), &full, &AffineLattice::scalar(2, 1)).unwrap();
        assert_eq!(r, fam(&["4*n+3"]));
        let r = restrict_family(&fam(&["n*(n+1)/2"]), &full, &AffineLattice::scalar(4, 0)).unwrap();
        assert_eq!(r, fam(&["8*n^2+2*n"]));
        assert!(matches!(
            restrict_family(&fam(&["n"]), &AffineLattice::scalar(2, 0), &AffineLattice::scalar(3, 0)),
            Err(Error::NotSublattice)
        ));
    }

    #[test]
    fn divisibility_examples() {
        let full = AffineLattice::full(1);
        let (l, proof) = divisibility_sublattice(&fam(&["n"]), &full, 3, 50).unwrap();
        assert_eq!(l, AffineLattice::scalar(3, 0));
        assert_eq!(proof.quotients, fam(&["n"]));

        let (l, _) = divisibility_sublattice(&fam(&["n^2-1", "n-1"]), &full, 4, 50).unwrap();
        assert_eq!(l, AffineLattice::scalar(4, 1));

        let (l, proof) = divisibility_sublattice(&fam(&["n*(n+1)/2"]), &full, 2, 50).unwrap();
        assert_eq!(proof.scale, 2);
        assert_eq!(l, AffineLattice::scalar(4, 0));

        assert!(matches!(
            divisibility_sublattice(&fam(&["2*n+1"]), &full, 2, 50),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn coset_examples() {
        let full = AffineLattice::full(1);
        let c = coset_refine(&fam(&["n"]), &full, &AffineLattice::scalar(2, 0), 50).unwrap();
        assert_eq!(c.offset, vec![BigInt::from(0)]);
        let c = coset_refine(&fam(&["n-1"]), &full, &AffineLattice::scalar(2, 0), 50).unwrap();
        assert_eq!(c.offset, vec![BigInt::from(1)]);
        let c = coset_refine(&fam(&["n^2-1", "n-1"]), &full, &AffineLattice::scalar(6, 0), 100).unwrap();
        assert_eq!(c.offset, vec![BigInt::from(1)]);
    }
}
