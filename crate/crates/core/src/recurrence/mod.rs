//! Finite-window recurrence experiments: exact densities of multiple
//! intersections, good-shift scans, circle rotations and partition obstructions.
//!
//! Every density is an exact rational `count / window length`. Shifts that push
//! part of a configuration outside the window are not wrapped; the lost fraction
//! is bounded by `max |shift| / length` and reported.

mod circle;
mod scan;

pub use circle::{empty_triple_check, uc_average_circle, EmptyTriple, IntervalUnion, UcAverage};
pub use scan::{
    good_set_scan, obstruction_demo, partition_scan, CellObstruction, CellScan, DensityEntry, DensityReport,
    ObstructionReport, PartitionReport,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::numeric::Irrational;
use crate::poly::{CompiledPoly, IntPoly};
use crate::{Error, Result};

/// A subset of the integer window `[start, end)` stored as a bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSet {
    start: i64,
    len: usize,
    bits: Vec<u64>,
}

/// JSON description of a [`WindowSet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WindowSpec {
    /// `{a : a mod modulus ∈ residues}`.
    Residues { window: [i64; 2], modulus: u64, residues: Vec<u64> },
    /// `{a : frac(a·beta) ∈ [interval[0], interval[1])}`.
    Bohr { window: [i64; 2], beta: String, interval: [f64; 2] },
    Explicit { window: [i64; 2], elements: Vec<i64> },
}

impl WindowSpec {
    pub fn build(&self) -> Result<WindowSet> {
        match self {
            WindowSpec::Residues { window, modulus, residues } => {
                WindowSet::residues(window[0], window[1], *modulus, residues)
            }
            WindowSpec::Bohr { window, beta, interval } => {
                WindowSet::bohr(window[0], window[1], &Irrational::parse(beta)?, interval[0], interval[1])
            }
            WindowSpec::Explicit { window, elements } => WindowSet::explicit(window[0], window[1], elements),
        }
    }
}

impl WindowSet {
    fn empty(start: i64, end: i64) -> Result<Self> {
        if end <= start {
            return Err(Error::DegenerateSet(format!("window [{start}, {end}) is empty")));
        }
        let len = usize::try_from(end - start).map_err(|_| Error::DegenerateSet("window too long".into()))?;
        Ok(WindowSet {
            start,
            len,
            bits: vec![0; len.div_ceil(64)],
        })
    }

    fn from_predicate(start: i64, end: i64, mut member: impl FnMut(i64) -> bool) -> Result<Self> {
        let mut set = Self::empty(start, end)?;
        for i in 0..set.len {
            if member(start + i as i64) {
                set.bits[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(set)
    }

    /// The whole window.
    pub fn full(start: i64, end: i64) -> Result<Self> {
        Self::from_predicate(start, end, |_| true)
    }

    pub fn residues(start: i64, end: i64, modulus: u64, residues: &[u64]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus("modulus must be positive".into()));
        }
        let m = modulus as i64;
        let mut keep = vec![false; modulus as usize];
        for &r in residues {
            keep[(r % modulus) as usize] = true;
        }
        Self::from_predicate(start, end, |a| keep[a.rem_euclid(m) as usize])
    }

    /// Bohr set `{a : frac(a·β) ∈ [lo, hi)}`, with `a·β` tracked in 128-bit fixed point.
    pub fn bohr(start: i64, end: i64, beta: &Irrational, lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::DegenerateSet(format!("interval [{lo}, {hi}) is not a subinterval of [0, 1)")));
        }
        let step = beta.angle(&BigInt::from(1));
        let mut x = step.mul_i128(start as i128);
        Self::from_predicate(start, end, |_| {
            let f = x.to_f64();
            x = x + step;
            lo <= f && f < hi
        })
    }

    pub fn explicit(start: i64, end: i64, elements: &[i64]) -> Result<Self> {
        let mut set = Self::empty(start, end)?;
        for &a in elements {
            if a < start || a >= end {
                return Err(Error::DegenerateSet(format!("{a} lies outside the window [{start}, {end})")));
            }
            let i = (a - start) as usize;
            set.bits[i / 64] |= 1 << (i % 64);
        }
        Ok(set)
    }

    pub fn window(&self) -> (i64, i64) {
        (self.start, self.start + self.len as i64)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn contains(&self, a: i64) -> bool {
        let i = a - self.start;
        i >= 0 && (i as usize) < self.len && self.bits[i as usize / 64] >> (i as usize % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn density(&self) -> BigRational {
        BigRational::new(self.count().into(), (self.len as u64).into())
    }

    pub fn elements(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len).filter(|&i| self.bits[i / 64] >> (i % 64) & 1 == 1).map(|i| self.start + i as i64)
    }

    /// Subset of `other ⊆ self` on the same window.
    pub fn is_subset_of(&self, other: &WindowSet) -> bool {
        self.window() == other.window() && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Bits `offset .. offset + 64` of the bitmap, zero outside the window.
    fn word_at(&self, offset: i64) -> u64 {
        let nwords = self.bits.len() as i64;
        let (q, r) = (offset.div_euclid(64), offset.rem_euclid(64) as u32);
        let get = |j: i64| if (0..nwords).contains(&j) { self.bits[j as usize] } else { 0 };
        if r == 0 {
            get(q)
        } else {
            (get(q) >> r) | (get(q + 1) << (64 - r))
        }
    }

    /// `|{a : a, a + s_1, …, a + s_r ∈ E}|` within the window.
    pub fn configuration_count(&self, shifts: &[i128]) -> u64 {
        let len = self.len as i128;
        if shifts.iter().any(|s| s.abs() >= len) {
            return 0;
        }
        let mut total = 0u64;
        for (j, &w) in self.bits.iter().enumerate() {
            let mut acc = w;
            for &s in shifts {
                if acc == 0 {
                    break;
                }
                acc &= self.word_at(64 * j as i64 + s as i64);
            }
            total += acc.count_ones() as u64;
        }
        total
    }
}

/// Compiled integer shifts `p_i(n)`.
pub(crate) struct Shifts {
    polys: Vec<CompiledPoly>,
    nvars: usize,
}

impl Shifts {
    pub(crate) fn new(family: &[IntPoly]) -> Result<Self> {
        let nvars = family.first().ok_or(Error::EmptyFamily)?.nvars();
        if let Some(p) = family.iter().find(|p| p.nvars() != nvars) {
            return Err(Error::DimensionMismatch { expected: nvars, found: p.nvars() });
        }
        if let Some(p) = family.iter().find(|p| !p.is_integral()) {
            return Err(Error::NotIntegral(p.to_string()));
        }
        Ok(Shifts {
            polys: family.iter().map(CompiledPoly::new).collect(),
            nvars,
        })
    }

    pub(crate) fn nvars(&self) -> usize {
        self.nvars
    }

    pub(crate) fn at(&self, n: &[i64]) -> Result<Vec<i128>> {
        self.polys
            .iter()
            .map(|p| p.eval_i128(n).ok_or_else(|| Error::Internal(format!("shift overflow at {n:?}"))))
            .collect()
    }
}

/// Exact count-based density of `E ∩ (E − p_1(n)) ∩ … ∩ (E − p_r(n))` on the window.
pub fn intersection_density(set: &WindowSet, family: &[IntPoly], n: &[i64]) -> Result<BigRational> {
    let shifts = Shifts::new(family)?;
    if n.len() != shifts.nvars() {
        return Err(Error::DimensionMismatch { expected: shifts.nvars(), found: n.len() });
    }
    let count = set.configuration_count(&shifts.at(n)?);
    Ok(BigRational::new(count.into(), (set.len() as u64).into()))
}

/// Upper bound on the fraction of the window lost to configurations leaving it.
pub fn edge_loss(set: &WindowSet, shifts: &[i128]) -> f64 {
    let max = shifts.iter().map(|s| s.unsigned_abs()).max().unwrap_or(0);
    (max as f64 / set.len() as f64).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn fam(src: &[&str]) -> Vec<IntPoly> {
        src.iter().map(|s| parse_poly(s, &["n"]).unwrap()).collect()
    }

    fn brute(set: &WindowSet, shifts: &[i128]) -> u64 {
        let (m, n) = set.window();
        (m..n)
            .filter(|&a| set.contains(a) && shifts.iter().all(|&s| set.contains(a + s as i64)))
            .count() as u64
    }

    #[test]
    fn density_examples() {
        let e = WindowSet::residues(0, 30_000, 3, &[0]).unwrap();
        assert_eq!(intersection_density(&e, &fam(&["n^2+1"]), &[1]).unwrap(), BigRational::from_integer(0.into()));
        let e = WindowSet::residues(0, 10_000, 2, &[0]).unwrap();
        // shift 6 preserves evens; the last three evens leave the window
        assert_eq!(
            intersection_density(&e, &fam(&["n^2-n"]), &[3]).unwrap(),
            BigRational::new(4997.into(), 10_000.into())
        );
        let full = WindowSet::full(-7, 93).unwrap();
        assert_eq!(intersection_density(&full, &fam(&["n"]), &[5]).unwrap(), BigRational::new(95.into(), 100.into()));
    }

    #[test]
    fn word_level_count_matches_brute_force() {
        let e = WindowSet::bohr(-300, 917, &Irrational::parse("sqrt3").unwrap(), 0.0, 0.4).unwrap();
        for shifts in [vec![0i128], vec![1], vec![-65, 3], vec![64, 128], vec![-1, 200, 7], vec![2000]] {
            assert_eq!(e.configuration_count(&shifts), brute(&e, &shifts), "{shifts:?}");
        }
    }

    #[test]
    fn bohr_membership() {
        let beta = Irrational::parse("sqrt3").unwrap();
        let e = WindowSet::bohr(-50, 50, &beta, 0.0, 0.2).unwrap();
        for a in -50..50i64 {
            let f = (a as f64 * 3f64.sqrt()).rem_euclid(1.0);
            assert_eq!(e.contains(a), f < 0.2, "{a}");
        }
    }

    #[test]
    fn spec_round_trip() {
        let spec: WindowSpec =
            serde_json::from_str(r#"{"window":[0,100],"kind":"residues","modulus":3,"residues":[1]}"#).unwrap();
        let set = spec.build().unwrap();
        assert_eq!(set.count(), 33);
        let back: WindowSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(WindowSet::explicit(0, 10, &[10]).is_err());
        assert!(WindowSet::full(3, 3).is_err());
    }
}
