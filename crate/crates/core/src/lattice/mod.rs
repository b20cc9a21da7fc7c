//! Finite-index affine lattices `A·ℤ^m + l` in ℤ^m.

pub mod hnf;
mod refine;

pub(crate) use refine::divisibility_sublattice_keeping;
pub use refine::{coset_refine, divisibility_sublattice, restrict_family, CosetChoice, DivisibilityProof};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::IntPoly;
use crate::{Error, Result};
use hnf::{diagonal_product, hnf_from_columns, is_hnf, reduce_vector};

/// Coset of a full-rank subgroup of ℤ^m. The basis is kept in column HNF and
/// the offset reduced against it, so equal sets compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct AffineLattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
    offset: Vec<BigInt>,
}

impl AffineLattice {
    pub fn full(m: usize) -> Self {
        let basis = (0..m)
            .map(|i| (0..m).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect();
        AffineLattice {
            dim: m,
            basis,
            offset: vec![BigInt::zero(); m],
        }
    }

    /// `modulus·ℤ + residue` in dimension one.
    pub fn scalar(modulus: i64, residue: i64) -> Self {
        Self::new(1, &[vec![BigInt::from(modulus)]], &[BigInt::from(residue)]).expect("nonzero modulus")
    }

    /// Lattice generated by the given columns, shifted by `offset`.
    pub fn new(m: usize, columns: &[Vec<BigInt>], offset: &[BigInt]) -> Result<Self> {
        if offset.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: offset.len(),
            });
        }
        let basis = hnf_from_columns(m, columns)?;
        let offset = reduce_vector(&basis, offset);
        Ok(AffineLattice { dim: m, basis, offset })
    }

    /// Subgroup with the given HNF matrix (validated).
    pub fn from_hnf(h: Vec<Vec<BigInt>>, offset: &[BigInt]) -> Result<Self> {
        if !is_hnf(&h) {
            return Err(Error::InvalidLattice("matrix is not in Hermite normal form".into()));
        }
        let m = h.len();
        if offset.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: offset.len(),
            });
        }
        let offset = reduce_vector(&h, offset);
        Ok(AffineLattice { dim: m, basis: h, offset })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// HNF matrix, row-major; its columns are the basis vectors.
    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn offset(&self) -> &[BigInt] {
        &self.offset
    }

    pub fn index(&self) -> BigInt {
        diagonal_product(&self.basis)
    }

    pub fn is_full(&self) -> bool {
        self.index().is_one()
    }

    fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.basis[i][j].clone()).collect())
            .collect()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let diff: Vec<BigInt> = x.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        reduce_vector(&self.basis, &diff).iter().all(Zero::is_zero)
    }

    pub fn contains_i64(&self, x: &[i64]) -> bool {
        let v: Vec<BigInt> = x.iter().map(|&a| BigInt::from(a)).collect();
        self.contains(&v)
    }

    /// Whether the subgroup of `self` contains `v`.
    pub fn subgroup_contains(&self, v: &[BigInt]) -> bool {
        reduce_vector(&self.basis, v).iter().all(Zero::is_zero)
    }

    /// Whether `other ⊆ self` as sets.
    pub fn contains_lattice(&self, other: &AffineLattice) -> bool {
        other.dim == self.dim
            && self.contains(&other.offset)
            && other.columns().iter().all(|c| self.subgroup_contains(c))
    }

    /// Image point `A·x + l` of the parametrization ℤ^m → self.
    pub fn point(&self, x: &[BigInt]) -> Vec<BigInt> {
        (0..self.dim)
            .map(|i| {
                let mut acc = self.offset[i].clone();
                for (j, xj) in x.iter().enumerate() {
                    acc += &self.basis[i][j] * xj;
                }
                acc
            })
            .collect()
    }

    /// Polynomial coordinates `n ↦ A·n + l`, one polynomial per ambient variable.
    pub fn parametrization(&self) -> Vec<IntPoly> {
        let m = self.dim;
        (0..m)
            .map(|i| {
                let mut p = IntPoly::constant(m, self.offset[i].clone().into());
                for j in 0..m {
                    if !self.basis[i][j].is_zero() {
                        p = &p + &IntPoly::var(m, j).scale_int(&self.basis[i][j]);
                    }
                }
                p
            })
            .collect()
    }

    /// `factor·Λ + offset`, where `Λ` is the subgroup of `self`.
    pub fn refine(&self, factor: &BigInt, offset: &[BigInt]) -> Result<Self> {
        if factor.is_zero() {
            return Err(Error::InvalidModulus("refinement factor must be nonzero".into()));
        }
        let cols: Vec<Vec<BigInt>> = self
            .columns()
            .into_iter()
            .map(|c| c.into_iter().map(|x| x * factor).collect())
            .collect();
        AffineLattice::new(self.dim, &cols, offset)
    }

    /// Same subgroup, different offset.
    pub fn with_offset(&self, offset: &[BigInt]) -> Result<Self> {
        AffineLattice::from_hnf(self.basis.clone(), offset)
    }

    /// Canonical offsets of the cosets of `sub`'s subgroup inside `self`,
    /// sorted lexicographically. Requires `sub`'s subgroup ⊆ `self`'s subgroup.
    pub fn coset_offsets(&self, sub: &AffineLattice) -> Result<Vec<Vec<BigInt>>> {
        if sub.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: sub.dim,
            });
        }
        if !sub.columns().iter().all(|c| self.subgroup_contains(c)) {
            return Err(Error::NotSublattice);
        }
        // coordinates of sub's generators in self's basis
        let inv = crate::linalg::inverse_rational(&self.basis).ok_or(Error::SingularMatrix)?;
        let coords: Vec<Vec<BigInt>> = sub
            .columns()
            .iter()
            .map(|c| {
                (0..self.dim)
                    .map(|i| {
                        let v: num_rational::BigRational = (0..self.dim)
                            .map(|j| &inv[i][j] * num_rational::BigRational::from_integer(c[j].clone()))
                            .sum();
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        let h = hnf_from_columns(self.dim, &coords)?;
        let mut reps = vec![Vec::new()];
        for i in 0..self.dim {
            let d = &h[i][i];
            let mut next = Vec::new();
            for r in &reps {
                let mut k = BigInt::zero();
                while &k < d {
                    let mut v: Vec<BigInt> = r.clone();
                    v.push(k.clone());
                    next.push(v);
                    k += 1;
                }
            }
            reps = next;
        }
        let mut out: Vec<Vec<BigInt>> = reps
            .iter()
            .map(|x| reduce_vector(&sub.basis, &self.point(x)))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    m: usize,
    hnf_matrix: Vec<Vec<String>>,
    offset: Vec<String>,
}

impl From<AffineLattice> for LatticeRepr {
    fn from(l: AffineLattice) -> Self {
        LatticeRepr {
            m: l.dim,
            hnf_matrix: l.basis.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
            offset: l.offset.iter().map(ToString::to_string).collect(),
        }
    }
}

impl TryFrom<LatticeRepr> for AffineLattice {
    type Error = Error;

    fn try_from(r: LatticeRepr) -> Result<Self> {
        let parse = |s: &String| {
            s.parse::<BigInt>()
                .map_err(|_| Error::InvalidLattice(format!("'{s}' is not a decimal integer")))
        };
        let h = r
            .hnf_matrix
            .iter()
            .map(|row| row.iter().map(parse).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if h.len() != r.m {
            return Err(Error::DimensionMismatch {
                expected: r.m,
                found: h.len(),
            });
        }
        let off = r.offset.iter().map(parse).collect::<Result<Vec<_>>>()?;
        let out = AffineLattice::from_hnf(h, &off)?;
        if out.offset != off {
            return Err(Error::InvalidLattice("offset is not reduced".into()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn membership_examples() {
        let odd = AffineLattice::scalar(2, 1);
        assert!(odd.contains_i64(&[7]));
        assert!(!odd.contains_i64(&[4]));
        let full = AffineLattice::full(3);
        assert!(full.contains_i64(&[5, -2, 11]));
        assert_eq!(full.index(), BigInt::one());
    }

    #[test]
    fn negative_modulus_normalizes() {
        assert_eq!(AffineLattice::scalar(-3, 7), AffineLattice::scalar(3, 1));
    }

    #[test]
    fn serde_round_trip() {
        let l = AffineLattice::new(2, &[bv(&[2, 0]), bv(&[1, 3])], &bv(&[5, 4])).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        assert!(s.contains("\"hnf_matrix\""));
        let back: AffineLattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        let bad = r#"{"m":1,"hnf_matrix":[["3"]],"offset":["4"]}"#;
        assert!(serde_json::from_str::<AffineLattice>(bad).is_err());
    }

    #[test]
    fn refine_index_multiplies() {
        let l = AffineLattice::new(2, &[bv(&[2, 0]), bv(&[1, 3])], &bv(&[0, 0])).unwrap();
        let r = l.refine(&BigInt::from(5), &bv(&[1, 3])).unwrap();
        assert_eq!(r.index(), BigInt::from(6 * 25));
        assert!(l.contains_lattice(&r));
        assert!(!r.contains_lattice(&l));
    }

    #[test]
    fn coset_offsets_cover_the_lattice() {
        let l = AffineLattice::scalar(2, 1);
        let sub = AffineLattice::scalar(6, 1);
        let reps = l.coset_offsets(&sub).unwrap();
        assert_eq!(reps, vec![bv(&[1]), bv(&[3]), bv(&[5])]);
        let full = AffineLattice::full(2);
        let sub2 = AffineLattice::new(2, &[bv(&[2, 0]), bv(&[0, 2])], &bv(&[0, 0])).unwrap();
        assert_eq!(full.coset_offsets(&sub2).unwrap().len(), 4);
    }

    fn arb_basis() -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-6i64..7, 2), 2)
    }

    proptest! {
        #[test]
        fn hnf_is_canonical_under_unimodular_change(b in arb_basis(), u in -4i64..5, off in prop::collection::vec(-20i64..20, 2)) {
            let cols: Vec<Vec<BigInt>> = b.iter().map(|c| bv(c)).collect();
            prop_assume!(!crate::linalg::det_int(&[
                vec![cols[0][0].clone(), cols[1][0].clone()],
                vec![cols[0][1].clone(), cols[1][1].clone()],
            ]).is_zero());
            let l1 = AffineLattice::new(2, &cols, &bv(&off)).unwrap();
            // column ops: c1 += u·c0, then swap, then add a redundant generator
            let c1: Vec<BigInt> = cols[1].iter().zip(&cols[0]).map(|(a, c)| a + c * u).collect();
            let extra: Vec<BigInt> = cols[0].iter().zip(&c1).map(|(a, c)| a * 3 - c).collect();
            let shifted: Vec<BigInt> = bv(&off).iter().zip(&cols[0]).map(|(a, c)| a + c * 7).collect();
            let l2 = AffineLattice::new(2, &[c1, cols[0].clone(), extra], &shifted).unwrap();
            prop_assert_eq!(&l1, &l2);
            // membership through parametrization
            let x = bv(&[u, 3 - u]);
            prop_assert!(l1.contains(&l1.point(&x)));
        }
    }
}
