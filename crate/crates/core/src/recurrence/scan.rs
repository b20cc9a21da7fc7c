//! Good-shift scans, partition scans and residue-class obstructions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{edge_loss, Shifts, WindowSet};
use crate::cert::DecRat;
use crate::intersect::{solvable_mod, DEFAULT_BUDGET};
use crate::poly::IntPoly;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEntry {
    pub n: Vec<i64>,
    pub count: u64,
    pub density: DecRat,
}

/// Per-shift densities over a centered box, with the good set and its gap statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub window: [i64; 2],
    pub set_density: DecRat,
    pub family: Vec<String>,
    pub box_radius: u64,
    pub entries: Vec<DensityEntry>,
    /// `Σ c_n / |box|`, the finite stand-in for the uniform Cesàro limit.
    pub average: DecRat,
    pub epsilon: DecRat,
    /// `{n : c_n > ε}` in box order.
    pub good: Vec<Vec<i64>>,
    /// Largest gap between consecutive good shifts (one variable only).
    pub max_gap: Option<u64>,
    pub median_gap: Option<f64>,
    pub gap_histogram: BTreeMap<u64, u64>,
    /// Largest sup-norm distance from a box point to the good set (several variables).
    pub covering_radius: Option<u64>,
    /// Largest fraction of the window lost to configurations leaving it.
    pub max_edge_loss: f64,
}

impl DensityReport {
    /// `n_1,…,n_m,count,c_n,good` rows.
    pub fn to_csv(&self) -> String {
        let m = self.entries.first().map_or(1, |e| e.n.len());
        let mut out: String = (1..=m).map(|i| format!("n{i},")).collect();
        out.push_str("count,c_n,good\n");
        let eps = self.epsilon.0.clone();
        for e in &self.entries {
            for x in &e.n {
                out.push_str(&format!("{x},"));
            }
            out.push_str(&format!("{},{},{}\n", e.count, rat_f64(&e.density.0), e.density.0 > eps));
        }
        out
    }
}

fn rat_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Points of `[-radius, radius]^m` in lexicographic order.
pub(crate) fn box_points(m: usize, radius: u64) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let mut out = Vec::new();
    let mut x = vec![-r; m];
    loop {
        out.push(x.clone());
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if x[i] < r {
                x[i] += 1;
                break;
            }
            x[i] = -r;
        }
    }
}

fn gap_stats(sorted: &[i64]) -> (Option<u64>, Option<f64>, BTreeMap<u64, u64>) {
    let mut gaps: Vec<u64> = sorted.windows(2).map(|w| (w[1] - w[0]) as u64).collect();
    let mut hist = BTreeMap::new();
    for &g in &gaps {
        *hist.entry(g).or_insert(0) += 1;
    }
    if gaps.is_empty() {
        return (None, None, hist);
    }
    gaps.sort_unstable();
    let mid = gaps.len() / 2;
    let median = if gaps.len() % 2 == 1 {
        gaps[mid] as f64
    } else {
        (gaps[mid - 1] + gaps[mid]) as f64 / 2.0
    };
    (gaps.last().copied(), Some(median), hist)
}

fn covering_radius(points: &[Vec<i64>], good: &[Vec<i64>]) -> Option<u64> {
    if good.is_empty() {
        return None;
    }
    points
        .par_iter()
        .map(|x| {
            good.iter()
                .map(|g| x.iter().zip(g).map(|(a, b)| a.abs_diff(*b)).max().unwrap_or(0))
                .min()
                .unwrap_or(0)
        })
        .max()
}

/// Computes `c_n` for every `n` in `[-N, N]^m` and the good set `{c_n > ε}`.
///
/// `ε` defaults to half the box average.
pub fn good_set_scan(
    set: &WindowSet,
    family: &[IntPoly],
    box_radius: u64,
    epsilon: Option<BigRational>,
) -> Result<DensityReport> {
    let shifts = Shifts::new(family)?;
    let m = shifts.nvars();
    let points = box_points(m, box_radius);
    let counted: Vec<(u64, f64)> = points
        .par_iter()
        .map(|n| {
            let s = shifts.at(n)?;
            Ok((set.configuration_count(&s), edge_loss(set, &s)))
        })
        .collect::<Result<_>>()?;
    let len = BigInt::from(set.len() as u64);
    let entries: Vec<DensityEntry> = points
        .iter()
        .zip(&counted)
        .map(|(n, &(count, _))| DensityEntry {
            n: n.clone(),
            count,
            density: DecRat(BigRational::new(count.into(), len.clone())),
        })
        .collect();
    let total: BigInt = counted.iter().map(|&(c, _)| BigInt::from(c)).sum();
    let average = BigRational::new(total, len * BigInt::from(points.len()));
    let epsilon = epsilon.unwrap_or_else(|| &average / BigRational::from_integer(2.into()));
    let good: Vec<Vec<i64>> = entries.iter().filter(|e| e.density.0 > epsilon).map(|e| e.n.clone()).collect();
    let (max_gap, median_gap, gap_histogram, covering) = if m == 1 {
        let flat: Vec<i64> = good.iter().map(|n| n[0]).collect();
        let (a, b, c) = gap_stats(&flat);
        (a, b, c, None)
    } else {
        (None, None, BTreeMap::new(), covering_radius(&points, &good))
    };
    let (lo, hi) = set.window();
    Ok(DensityReport {
        window: [lo, hi],
        set_density: DecRat(set.density()),
        family: family.iter().map(|p| p.to_string()).collect(),
        box_radius,
        entries,
        average: DecRat(average),
        epsilon: DecRat(epsilon),
        good,
        max_gap,
        median_gap,
        gap_histogram,
        covering_radius: covering,
        max_edge_loss: counted.iter().map(|&(_, e)| e).fold(0.0, f64::max),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellScan {
    pub index: usize,
    pub epsilon: DecRat,
    /// `{n ∈ E_i ∩ [-N, N] : c_n(E_i) > ε}`.
    pub good: Vec<i64>,
    pub gap_bound: Option<u64>,
    /// Longest stretch `[start, end]` of good shifts whose consecutive gaps stay within `gap_bound`.
    pub longest_run: Option<[i64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub window: [i64; 2],
    pub box_radius: u64,
    /// Names the finite-window stand-in used for piecewise syndeticity.
    pub statistic: String,
    pub cells: Vec<CellScan>,
}

fn check_partition(cells: &[WindowSet]) -> Result<(i64, i64)> {
    let first = cells.first().ok_or_else(|| Error::DegenerateSet("no cells".into()))?;
    let window = first.window();
    if cells.iter().any(|c| c.window() != window) {
        return Err(Error::DegenerateSet("cells live on different windows".into()));
    }
    for i in 0..first.bits.len() {
        let mut union = 0u64;
        for c in cells {
            if union & c.bits[i] != 0 {
                return Err(Error::DegenerateSet("cells overlap".into()));
            }
            union |= c.bits[i];
        }
        let expected = if (i + 1) * 64 <= first.len { u64::MAX } else { (1u64 << (first.len % 64)) - 1 };
        if union != expected {
            return Err(Error::DegenerateSet("cells do not cover the window".into()));
        }
    }
    Ok(window)
}

fn longest_run(good: &[i64], bound: u64) -> Option<[i64; 2]> {
    let mut best: Option<[i64; 2]> = None;
    let mut start = *good.first()?;
    for w in good.windows(2) {
        if w[1].abs_diff(w[0]) > bound {
            start = w[1];
            continue;
        }
        if best.is_none_or(|[a, b]| w[1] - start > b - a) {
            best = Some([start, w[1]]);
        }
    }
    best.or(Some([good[0], good[0]]))
}

/// For each cell `E_i`, the shifts `n ∈ E_i` in the box with `c_n(E_i) > ε_i`.
///
/// `ε_i` defaults to half the cell's average over those shifts; the gap bound
/// defaults to four times the median gap of the cell's good set.
pub fn partition_scan(
    cells: &[WindowSet],
    family: &[IntPoly],
    box_radius: u64,
    epsilon: Option<BigRational>,
    gap_bound: Option<u64>,
) -> Result<PartitionReport> {
    let shifts = Shifts::new(family)?;
    if shifts.nvars() != 1 {
        return Err(Error::NotUnivariate(shifts.nvars()));
    }
    let (lo, hi) = check_partition(cells)?;
    let r = box_radius as i64;
    let mut out = Vec::with_capacity(cells.len());
    for (index, cell) in cells.iter().enumerate() {
        let ns: Vec<i64> = (-r..=r).filter(|&n| cell.contains(n)).collect();
        let counts: Vec<u64> = ns
            .par_iter()
            .map(|&n| Ok(cell.configuration_count(&shifts.at(&[n])?)))
            .collect::<Result<_>>()?;
        let len = BigInt::from(cell.len() as u64);
        let eps = epsilon.clone().unwrap_or_else(|| {
            if ns.is_empty() {
                BigRational::zero()
            } else {
                let total: BigInt = counts.iter().map(|&c| BigInt::from(c)).sum();
                BigRational::new(total, &len * BigInt::from(2 * ns.len()))
            }
        });
        let good: Vec<i64> = ns
            .iter()
            .zip(&counts)
            .filter(|&(_, &c)| BigRational::new(c.into(), len.clone()) > eps)
            .map(|(&n, _)| n)
            .collect();
        let bound = gap_bound.or_else(|| gap_stats(&good).1.map(|m| (4.0 * m).ceil() as u64));
        out.push(CellScan {
            index,
            epsilon: DecRat(eps),
            longest_run: bound.and_then(|b| longest_run(&good, b)),
            gap_bound: bound,
            good,
        });
    }
    Ok(PartitionReport {
        window: [lo, hi],
        box_radius,
        statistic: "longest run of good shifts with consecutive gaps within gap_bound".into(),
        cells: out,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellObstruction {
    pub residue: u64,
    /// Configurations found inside the cell over the whole box.
    pub configurations: u64,
    pub confirmed: bool,
    /// First shift (box order) with a configuration inside the cell.
    pub first: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub k: u64,
    pub window: [i64; 2],
    pub box_radius: u64,
    pub cells: Vec<CellObstruction>,
    pub all_confirmed: bool,
}

/// Exhaustively confirms that no residue class modulo `k` contains a
/// configuration `{a, a + p_1(n), …}` for `n` in the box.
///
/// Requires that the family has no common root modulo `k`.
pub fn obstruction_demo(family: &[IntPoly], k: u64, window: (i64, i64), box_radius: u64) -> Result<ObstructionReport> {
    let shifts = Shifts::new(family)?;
    let sol = solvable_mod(family, k, DEFAULT_BUDGET)?;
    if let Some(w) = sol.witness {
        let w: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        return Err(Error::PreconditionViolated(format!(
            "the family has a common root modulo {k} at ({})",
            w.join(", ")
        )));
    }
    let points = box_points(shifts.nvars(), box_radius);
    let all_shifts: Vec<Vec<i128>> = points.iter().map(|n| shifts.at(n)).collect::<Result<_>>()?;
    let cells: Vec<CellObstruction> = (0..k)
        .into_par_iter()
        .map(|residue| {
            let cell = WindowSet::residues(window.0, window.1, k, &[residue])?;
            let mut configurations = 0;
            let mut first = None;
            for (n, s) in points.iter().zip(&all_shifts) {
                let c = cell.configuration_count(s);
                if c > 0 && first.is_none() {
                    first = Some(n.clone());
                }
                configurations += c;
            }
            Ok(CellObstruction {
                residue,
                configurations,
                confirmed: configurations == 0,
                first,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ObstructionReport {
        k,
        window: [window.0, window.1],
        box_radius,
        all_confirmed: cells.iter().all(|c| c.confirmed),
        cells,
    })
}
