//! Bounded joint-intersectivity check for vector-valued maps ℤ^m → ℤ^k.
//!
//! A subgroup `Λ` of index `N` contains `N·ℤ^k`, and an integral polynomial with
//! denominator `d` has values modulo `N` periodic with period `d·N`. So a common
//! `n` with every value in `Λ` exists iff one exists in `[0, d·N)^m`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::search::advance;
use crate::lattice::hnf::{diagonal_product, reduce_vector, subgroups_up_to_index};
use crate::poly::{denominator_scale, CompiledPoly, IntPoly, RationalVectorPoly};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupVerdict {
    /// HNF basis (columns) of the subgroup.
    pub hnf: Vec<Vec<u64>>,
    pub index: u64,
    /// Least `n` in `[0, d·N)^m` (last coordinate fastest) with every value in the subgroup.
    pub witness: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultidimReport {
    pub index_bound: u64,
    /// One entry per subgroup, ordered by index then row-major HNF entries.
    pub verdicts: Vec<SubgroupVerdict>,
    /// Position in `verdicts` of the first subgroup without a witness.
    pub first_failure: Option<usize>,
}

impl MultidimReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks every subgroup of ℤ^k with index at most `index_bound`.
///
/// `budget` caps the total number of map evaluations.
pub fn multidim_bounded_check(maps: &[RationalVectorPoly], index_bound: u64, budget: u64) -> Result<MultidimReport> {
    let first = maps.first().ok_or(Error::EmptyFamily)?;
    let (m, k) = (first.nvars(), first.dim());
    for f in maps {
        if f.nvars() != m {
            return Err(Error::DimensionMismatch { expected: m, found: f.nvars() });
        }
        if f.dim() != k {
            return Err(Error::DimensionMismatch { expected: k, found: f.dim() });
        }
        if let Some(c) = f.components().iter().find(|c| !c.is_integral()) {
            return Err(Error::NotIntegral(c.to_string()));
        }
    }
    if index_bound == 0 {
        return Err(Error::InvalidModulus("index bound must be positive".into()));
    }
    let comps: Vec<IntPoly> = maps.iter().flat_map(|f| f.components().iter().cloned()).collect();
    let d = denominator_scale(&comps);
    let compiled: Vec<CompiledPoly> = comps.iter().map(|c| CompiledPoly::with_scale(c, &d)).collect();
    let d = d.to_u64().ok_or_else(|| Error::InvalidModulus("denominator too large".into()))?;

    let mut left = budget;
    let mut verdicts = Vec::new();
    let mut first_failure = None;
    for h in subgroups_up_to_index(k, index_bound) {
        let index = diagonal_product(&h).to_u64().expect("index within bound");
        let period = d
            .checked_mul(index)
            .ok_or_else(|| Error::InvalidModulus("search period overflows".into()))?;
        let witness = search_subgroup(&comps, &compiled, &h, m, k, period, &mut left)?;
        if witness.is_none() && first_failure.is_none() {
            first_failure = Some(verdicts.len());
        }
        verdicts.push(SubgroupVerdict {
            hnf: h.iter().map(|r| r.iter().map(|x| x.to_u64().expect("reduced")).collect()).collect(),
            index,
            witness,
        });
    }
    Ok(MultidimReport {
        index_bound,
        verdicts,
        first_failure,
    })
}

fn search_subgroup(
    comps: &[IntPoly],
    compiled: &[CompiledPoly],
    h: &[Vec<BigInt>],
    m: usize,
    k: usize,
    period: u64,
    budget: &mut u64,
) -> Result<Option<Vec<i64>>> {
    let mut digits = vec![0u64; m];
    loop {
        let point: Vec<i64> = digits.iter().rev().map(|&x| x as i64).collect();
        let big: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
        let mut inside = true;
        for map in comps.chunks(k).zip(compiled.chunks(k)) {
            if *budget == 0 {
                return Err(Error::BudgetExceeded { last_verified_bound: 0 });
            }
            *budget -= 1;
            let value = map
                .0
                .iter()
                .zip(map.1)
                .map(|(p, c)| match c.eval_i128(&point) {
                    Some(v) => Ok(BigInt::from(v)),
                    None => Ok(p.eval(&big)?.to_integer()),
                })
                .collect::<Result<Vec<BigInt>>>()?;
            if !reduce_vector(h, &value).iter().all(Zero::is_zero) {
                inside = false;
                break;
            }
        }
        if inside {
            return Ok(Some(point));
        }
        if !advance(&mut digits, period) {
            return Ok(None);
        }
    }
}
