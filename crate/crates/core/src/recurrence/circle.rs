//! Rotations of the circle: interval unions, uniform averages along polynomial
//! times and the empty triple-intersection example.
//!
//! Endpoints are `f64`, but every intersection is decided by comparing
//! endpoints; comparisons closer than [`GUARD`] are counted as near-degenerate.

use rayon::prelude::*;
use serde::Serialize;

use super::Shifts;
use crate::numeric::{Angle, Irrational};
use crate::poly::IntPoly;
use crate::{Error, Result};

pub const GUARD: f64 = 1e-12;

/// Finite union of half-open arcs `[a, b)` of `[0, 1)`, sorted and disjoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalUnion {
    parts: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(mut parts: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &parts {
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
                return Err(Error::DegenerateSet(format!("[{a}, {b}) is not an arc of [0, 1)")));
            }
        }
        parts.retain(|&(a, b)| b > a);
        parts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalUnion { parts: merged })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn measure(&self) -> f64 {
        self.parts.iter().map(|(a, b)| b - a).sum()
    }

    /// `(self − x) mod 1`.
    fn shifted(&self, x: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        for &(a, b) in &self.parts {
            let a2 = (a - x).rem_euclid(1.0);
            let b2 = a2 + (b - a);
            if b2 <= 1.0 {
                out.push((a2, b2));
            } else {
                out.push((a2, 1.0));
                out.push((0.0, b2 - 1.0));
            }
        }
        out.sort_by(|p, q| p.0.total_cmp(&q.0));
        out
    }

    /// Intersection with a sorted list of disjoint arcs; counts near ties.
    fn intersect(&self, other: &[(f64, f64)], near: &mut u64) -> IntervalUnion {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.len() {
            let (a, b) = self.parts[i];
            let (c, d) = other[j];
            let lo = a.max(c);
            let hi = b.min(d);
            if (hi - lo).abs() < GUARD || (a - d).abs() < GUARD || (c - b).abs() < GUARD {
                *near += 1;
            }
            if hi > lo {
                out.push((lo, hi));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion { parts: out }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UcAverage {
    pub measure: f64,
    /// Mean of `μ(A ∩ (A − p_1(n)α) ∩ …)` over the box.
    pub average: f64,
    /// `μ(A)²` for one polynomial; `0` (a positivity threshold) for families.
    pub reference: f64,
    pub reference_kind: String,
    pub terms: u64,
    pub near_degenerate: u64,
}

/// Averages `μ(A ∩ (A − p_1(n)α) ∩ … ∩ (A − p_r(n)α))` over the half-open box
/// `ranges[0] × ranges[1] × …`.
pub fn uc_average_circle(
    a: &IntervalUnion,
    alpha: &Irrational,
    family: &[IntPoly],
    ranges: &[(i64, i64)],
) -> Result<UcAverage> {
    let measure = a.measure();
    if measure <= 0.0 {
        return Err(Error::DegenerateSet("the arc set has zero length".into()));
    }
    let shifts = Shifts::new(family)?;
    if ranges.len() != shifts.nvars() {
        return Err(Error::DimensionMismatch { expected: shifts.nvars(), found: ranges.len() });
    }
    if ranges.iter().any(|&(lo, hi)| hi <= lo) {
        return Err(Error::DegenerateSet("empty averaging box".into()));
    }
    let step = alpha.angle(&1.into());
    let points = range_points(ranges);
    let terms: Vec<(f64, u64)> = points
        .par_iter()
        .map(|n| {
            let mut near = 0;
            let mut cur = a.clone();
            for s in shifts.at(n)? {
                let x = step.mul_i128(s).to_f64();
                cur = cur.intersect(&a.shifted(x), &mut near);
            }
            Ok((cur.measure(), near))
        })
        .collect::<Result<_>>()?;
    // sequential sum keeps the result independent of scheduling
    let total: f64 = terms.iter().map(|t| t.0).sum();
    let single = family.len() == 1;
    Ok(UcAverage {
        measure,
        average: total / terms.len() as f64,
        reference: if single { measure * measure } else { 0.0 },
        reference_kind: if single { "measure_squared" } else { "positivity" }.into(),
        terms: terms.len() as u64,
        near_degenerate: terms.iter().map(|t| t.1).sum(),
    })
}

fn range_points(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (lo..hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmptyTriple {
    pub h: f64,
    pub range: [i64; 2],
    pub all_empty: bool,
    pub violations: u64,
    pub first_violation: Option<i64>,
    /// Least spread of `{0, −nα, −(2n+1)α}` over the range: every `h` up to it passes.
    pub largest_h_passing: f64,
    pub near_degenerate: u64,
}

/// Shortest arc containing the given circle points.
fn spread(points: &[Angle]) -> f64 {
    let mut xs: Vec<f64> = points.iter().map(|p| p.to_f64()).collect();
    xs.sort_by(f64::total_cmp);
    let mut max_gap = 1.0 - xs[xs.len() - 1] + xs[0];
    for w in xs.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    1.0 - max_gap
}

/// Checks `A ∩ (A − nα) ∩ (A − (2n+1)α) = ∅` for `A = [0, h)` and every
/// `n ∈ [lo, hi]` with `n ≠ 0`.
pub fn empty_triple_check(alpha: &Irrational, h: f64, lo: i64, hi: i64) -> Result<EmptyTriple> {
    let a = IntervalUnion::interval(0.0, h)?;
    if a.measure() <= 0.0 {
        return Err(Error::DegenerateSet("the arc has zero length".into()));
    }
    let step = alpha.angle(&1.into());
    let ns: Vec<i64> = (lo..=hi).filter(|&n| n != 0).collect();
    let rows: Vec<(bool, u64, f64)> = ns
        .par_iter()
        .map(|&n| {
            let x1 = step.mul_i128(n as i128);
            let x2 = step.mul_i128(2 * n as i128 + 1);
            let mut near = 0;
            let cut = a.intersect(&a.shifted(x1.to_f64()), &mut near);
            let cut = cut.intersect(&a.shifted(x2.to_f64()), &mut near);
            (cut.measure() > 0.0, near, spread(&[Angle::ZERO, -x1, -x2]))
        })
        .collect();
    let first_violation = ns.iter().zip(&rows).find(|(_, r)| r.0).map(|(&n, _)| n);
    let violations = rows.iter().filter(|r| r.0).count() as u64;
    Ok(EmptyTriple {
        h,
        range: [lo, hi],
        all_empty: violations == 0,
        violations,
        first_violation,
        largest_h_passing: rows.iter().map(|r| r.2).fold(1.0, f64::min),
        near_degenerate: rows.iter().map(|r| r.1).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::scan::box_points;
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn trivial_averages() {
        let alpha = Irrational::parse("sqrt(2)-1").unwrap();
        let a = IntervalUnion::interval(0.0, 0.3).unwrap();
        let r = uc_average_circle(&a, &alpha, &[parse_poly("0", &["n"]).unwrap()], &[(0, 100)]).unwrap();
        assert!((r.average - 0.3).abs() < 1e-12);
        let full = IntervalUnion::interval(0.0, 1.0).unwrap();
        let r = uc_average_circle(&full, &alpha, &[parse_poly("n^2", &["n"]).unwrap()], &[(0, 100)]).unwrap();
        assert!((r.average - 1.0).abs() < 1e-12);
        assert!(IntervalUnion::interval(0.2, 0.2).and_then(|a| uc_average_circle(&a, &alpha, &[], &[])).is_err());
    }

    #[test]
    fn shifted_overlap_matches_formula() {
        // for A = [0, a) and a shift x, μ(A ∩ (A − x)) = max(0, a − ‖x‖)
        let a = IntervalUnion::interval(0.0, 0.3).unwrap();
        for x in [0.0, 0.05, 0.2, 0.5, 0.75, 0.95] {
            let mut near = 0;
            let got = a.intersect(&a.shifted(x), &mut near).measure();
            let d: f64 = x.min(1.0 - x);
            assert!((got - (0.3 - d).max(0.0)).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn merging() {
        let u = IntervalUnion::new(vec![(0.5, 0.7), (0.1, 0.2), (0.15, 0.3)]).unwrap();
        assert_eq!(u.parts(), &[(0.1, 0.3), (0.5, 0.7)]);
    }

    #[test]
    fn triple_examples() {
        let golden = Irrational::parse("golden").unwrap();
        let r = empty_triple_check(&golden, 0.01, 1, 2000).unwrap();
        assert!(r.all_empty);
        assert!(r.largest_h_passing >= 0.01);
        let r = empty_triple_check(&golden, 0.9, 1, 2000).unwrap();
        assert!(!r.all_empty && r.first_violation.is_some());
        // the spread bound and the interval test agree
        let h = r.largest_h_passing;
        assert!(empty_triple_check(&golden, h * 0.999, 1, 2000).unwrap().all_empty);
        assert!(!empty_triple_check(&golden, h * 1.001, 1, 2000).unwrap().all_empty);
    }

    #[test]
    fn box_points_are_centered() {
        assert_eq!(box_points(1, 2), vec![vec![-2], vec![-1], vec![0], vec![1], vec![2]]);
    }
}
