use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rat_strings;
use crate::cert::DecRat;
use crate::lattice::hnf::hnf_from_columns;
use crate::linalg::{rref, QVec};
use crate::{Error, Result};

/// A point `r + Σ_label c_label·α_label` of ℝ^s with rational `r` and `c`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolicPoint {
    pub rational: QVec,
    pub irrational: BTreeMap<String, QVec>,
}

impl SymbolicPoint {
    pub fn zero(s: usize) -> Self {
        SymbolicPoint {
            rational: vec![BigRational::zero(); s],
            irrational: BTreeMap::new(),
        }
    }
}

/// `(offset + V ⊗ ℝ) mod ℤ^s` for a rational subspace `V`.
///
/// Canonical: the basis of `V` is in reduced row-echelon form, each irrational
/// offset vector is reduced modulo `V` (pivot coordinates zero, zero vectors
/// dropped), and the rational offset is the canonical representative modulo
/// `V + ℤ^s`. Equal sets therefore compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtorusCoset {
    dim: usize,
    basis: Vec<QVec>,
    rational: QVec,
    irrational: BTreeMap<String, QVec>,
}

impl SubtorusCoset {
    /// The single point `0`.
    pub fn zero(s: usize) -> Self {
        SubtorusCoset {
            dim: s,
            basis: Vec::new(),
            rational: vec![BigRational::zero(); s],
            irrational: BTreeMap::new(),
        }
    }

    pub fn new(s: usize, generators: &[QVec], offset: SymbolicPoint) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != s) {
            return Err(Error::DimensionMismatch { expected: s, found: g.len() });
        }
        if offset.rational.len() != s {
            return Err(Error::DimensionMismatch { expected: s, found: offset.rational.len() });
        }
        let basis = rref(generators);
        let mut out = SubtorusCoset {
            dim: s,
            basis,
            rational: Vec::new(),
            irrational: BTreeMap::new(),
        };
        for (label, v) in offset.irrational {
            if v.len() != s {
                return Err(Error::DimensionMismatch { expected: s, found: v.len() });
            }
            let r = out.reduce_mod_subspace(&v);
            if r.iter().any(|x| !x.is_zero()) {
                out.irrational.insert(label, r);
            }
        }
        out.rational = out.reduce_mod_lattice(&offset.rational);
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subtorus.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn rational_offset(&self) -> &QVec {
        &self.rational
    }

    pub fn irrational_offset(&self) -> &BTreeMap<String, QVec> {
        &self.irrational
    }

    pub fn offset(&self) -> SymbolicPoint {
        SymbolicPoint {
            rational: self.rational.clone(),
            irrational: self.irrational.clone(),
        }
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero rref row"))
            .collect()
    }

    /// Representative of `v + V` with zero pivot coordinates.
    pub(crate) fn reduce_mod_subspace(&self, v: &QVec) -> QVec {
        let mut out = v.clone();
        for (row, p) in self.basis.iter().zip(self.pivots()) {
            if out[p].is_zero() {
                continue;
            }
            let f = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                *o -= &f * r;
            }
        }
        out
    }

    /// Canonical representative of `v + V + ℤ^s`.
    ///
    /// After zeroing pivot coordinates, `ℤ^s` maps onto the lattice in the free
    /// coordinates generated by the unit vectors and the negated free parts of the
    /// basis rows; the free part is reduced against that lattice's HNF.
    pub(crate) fn reduce_mod_lattice(&self, v: &QVec) -> QVec {
        let w = self.reduce_mod_subspace(v);
        let pivots = self.pivots();
        let free: Vec<usize> = (0..self.dim).filter(|j| !pivots.contains(j)).collect();
        if free.is_empty() {
            return vec![BigRational::zero(); self.dim];
        }
        let den = self
            .basis
            .iter()
            .flat_map(|r| free.iter().map(move |&j| r[j].denom().clone()))
            .fold(BigInt::one(), |a, d| a.lcm(&d));
        let f = free.len();
        let mut gens: Vec<Vec<BigInt>> = (0..f)
            .map(|i| (0..f).map(|j| if i == j { den.clone() } else { BigInt::zero() }).collect())
            .collect();
        for row in &self.basis {
            gens.push(free.iter().map(|&j| -(&row[j] * &den).to_integer()).collect());
        }
        let h = hnf_from_columns(f, &gens).expect("contains den·ℤ^f");
        let dq = BigRational::from_integer(den.clone());
        let mut y: QVec = free.iter().map(|&j| &w[j] * &dq).collect();
        for i in (0..f).rev() {
            let hi = BigRational::from_integer(h[i][i].clone());
            let q = (&y[i] / &hi).floor();
            if q.is_zero() {
                continue;
            }
            for r in 0..=i {
                y[r] -= &q * BigRational::from_integer(h[r][i].clone());
            }
        }
        let mut out = vec![BigRational::zero(); self.dim];
        for (idx, &j) in free.iter().enumerate() {
            out[j] = &y[idx] / &dq;
        }
        out
    }

    /// Exact membership of the image of `x` in the coset.
    pub fn contains(&self, x: &SymbolicPoint) -> bool {
        if x.rational.len() != self.dim {
            return false;
        }
        let mut labels: Vec<&String> = x.irrational.keys().chain(self.irrational.keys()).collect();
        labels.sort();
        labels.dedup();
        let zero = vec![BigRational::zero(); self.dim];
        for l in labels {
            let a = x.irrational.get(l).unwrap_or(&zero);
            let b = self.irrational.get(l).unwrap_or(&zero);
            if a.len() != self.dim {
                return false;
            }
            let d: QVec = a.iter().zip(b).map(|(p, q)| p - q).collect();
            if self.reduce_mod_subspace(&d).iter().any(|v| !v.is_zero()) {
                return false;
            }
        }
        let d: QVec = x.rational.iter().zip(&self.rational).map(|(p, q)| p - q).collect();
        self.reduce_mod_lattice(&d).iter().all(Zero::is_zero)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OffsetRepr {
    rational: Vec<DecRat>,
    irrational: BTreeMap<String, Vec<DecRat>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CosetRepr {
    dim: usize,
    rank: usize,
    basis: Vec<Vec<DecRat>>,
    offset: OffsetRepr,
}

impl Serialize for SubtorusCoset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CosetRepr {
            dim: self.dim,
            rank: self.rank(),
            basis: self.basis.iter().map(|r| rat_strings(r)).collect(),
            offset: OffsetRepr {
                rational: rat_strings(&self.rational),
                irrational: self.irrational.iter().map(|(k, v)| (k.clone(), rat_strings(v))).collect(),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubtorusCoset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CosetRepr::deserialize(d)?;
        let un = |v: Vec<DecRat>| v.into_iter().map(|x| x.0).collect::<QVec>();
        let offset = SymbolicPoint {
            rational: un(r.offset.rational),
            irrational: r.offset.irrational.into_iter().map(|(k, v)| (k, un(v))).collect(),
        };
        let gens: Vec<QVec> = r.basis.into_iter().map(un).collect();
        let c = SubtorusCoset::new(r.dim, &gens, offset).map_err(D::Error::custom)?;
        if c.rank() != r.rank {
            return Err(D::Error::custom("rank does not match the basis"));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn point(r: &[(i64, i64)]) -> SymbolicPoint {
        SymbolicPoint {
            rational: r.iter().map(|&(a, b)| q(a, b)).collect(),
            irrational: BTreeMap::new(),
        }
    }

    #[test]
    fn rational_offsets_are_canonical() {
        // V = span{(1, 2)}: (1/2, 0) = (1/2)·(1, 2) + (0, -1) lies in V + ℤ²
        let v = vec![vec![q(1, 1), q(2, 1)]];
        let a = SubtorusCoset::new(2, &v, point(&[(1, 2), (0, 1)])).unwrap();
        let b = SubtorusCoset::new(2, &v, point(&[(0, 1), (-1, 1)])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, SubtorusCoset::new(2, &v, point(&[(0, 1), (0, 1)])).unwrap());
        // (1/3, 0) is not in V + ℤ²
        let c = SubtorusCoset::new(2, &v, point(&[(1, 3), (0, 1)])).unwrap();
        assert_ne!(c, a);
        assert!(c.contains(&point(&[(4, 3), (2, 1)])));
        assert!(!c.contains(&point(&[(0, 1), (0, 1)])));
    }

    #[test]
    fn point_cosets() {
        let z = SubtorusCoset::zero(2);
        assert!(z.contains(&point(&[(3, 1), (-2, 1)])));
        assert!(!z.contains(&point(&[(1, 2), (0, 1)])));
        let mut x = point(&[(0, 1), (0, 1)]);
        x.irrational.insert("a".into(), vec![q(1, 1), q(0, 1)]);
        assert!(!z.contains(&x));
        let line = SubtorusCoset::new(2, &[vec![q(1, 1), q(0, 1)]], SymbolicPoint::zero(2)).unwrap();
        assert!(line.contains(&x));
    }

    #[test]
    fn json_round_trip() {
        let mut off = point(&[(1, 3), (1, 2)]);
        off.irrational.insert("alpha".into(), vec![q(0, 1), q(1, 1)]);
        let c = SubtorusCoset::new(2, &[vec![q(1, 1), q(1, 1)]], off).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: SubtorusCoset = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
