//! Floating-point cross-check of a predicted closure against orbit samples.
//!
//! Points are held as 128-bit [`Angle`]s per coordinate, so integer multiples of
//! an irrational stay accurate far beyond `f64`. Distances are sup-norm on the torus.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::coset::SubtorusCoset;
use super::TorusSequence;
use crate::linalg::{integer_kernel, primitive_integer, rank, QVec};
use crate::numeric::{Angle, Irrational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleOptions {
    /// Samples are taken from `[-N, N]^m ∩ domain`.
    pub box_radius: u64,
    pub max_samples: usize,
    pub seed: u64,
    /// A character counts as an annihilator when it stays this close to an integer.
    pub tol: f64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            box_radius: 10_000,
            max_samples: 20_000,
            seed: 0,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub samples: usize,
    /// Largest normalized distance from a sample to the predicted coset.
    pub max_membership_residual: f64,
    /// `s` minus the rank of the small characters that are constant on the samples.
    pub empirical_dimension: usize,
    pub predicted_dimension: usize,
    /// Largest distance from a random point of the coset to the nearest sample.
    pub covering_statistic: f64,
    pub min_distance_to_zero: f64,
}

const PROBES: usize = 64;
const COVER_SAMPLES: usize = 20_000;

fn search_radius(s: usize) -> i64 {
    match s {
        0 | 1 => 40,
        2 => 20,
        3 => 8,
        4 => 5,
        _ => 3,
    }
}

/// `r mod 1` for an exact rational.
fn rational_angle(r: &BigRational) -> Angle {
    Angle::from_rational(r)
}

fn to_int(v: &BigRational) -> Result<BigInt> {
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(Error::NotIntegral(v.to_string()))
    }
}

fn sup_dist(a: &[Angle], b: &[Angle]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm()).fold(0.0, f64::max)
}

fn char_value(h: &[i64], x: &[Angle]) -> Angle {
    h.iter().zip(x).fold(Angle::ZERO, |acc, (&c, a)| acc + a.mul_i128(c as i128))
}

/// Lattice points of the domain in the box, evenly thinned or randomly drawn when too many.
fn sample_points(t: &TorusSequence, opts: &SampleOptions) -> Vec<Vec<BigInt>> {
    let m = t.nvars();
    let n = opts.box_radius as i64;
    let side = 2 * opts.box_radius as u128 + 1;
    let total = side.checked_pow(m as u32).unwrap_or(u128::MAX);
    let domain = t.domain();
    let cap = opts.max_samples.max(1);
    if total <= (cap as u128) * 4 {
        let mut pts = Vec::new();
        let mut digits = vec![0u64; m];
        loop {
            let x: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d as i64 - n)).collect();
            if domain.contains(&x) {
                pts.push(x);
            }
            if !crate::intersect::advance_odometer(&mut digits, side as u64) {
                break;
            }
        }
        if pts.len() > cap {
            let len = pts.len();
            pts = (0..cap).map(|i| pts[i * len / cap].clone()).collect();
        }
        return pts;
    }
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut pts = Vec::with_capacity(cap);
    for _ in 0..cap.saturating_mul(64) {
        if pts.len() == cap {
            break;
        }
        let x: Vec<BigInt> = (0..m).map(|_| BigInt::from(rng.gen_range(-n..=n))).collect();
        if domain.contains(&x) {
            pts.push(x);
        }
    }
    pts
}

struct Evaluator {
    k: BigRational,
    angles: Vec<Angle>,
}

impl Evaluator {
    fn new(t: &TorusSequence) -> Result<Self> {
        let angles = t
            .parts()
            .iter()
            .map(|p| {
                let v = p.value.as_deref().ok_or_else(|| Error::MissingNumericValue(p.label.clone()))?;
                Ok(Irrational::parse(v)?.angle(&p.divisor))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Evaluator {
            k: BigRational::from_integer(t.k().clone()),
            angles,
        })
    }

    fn point(&self, t: &TorusSequence, n: &[BigInt]) -> Result<Vec<Angle>> {
        let mut x: Vec<Angle> = t
            .rational_part()
            .eval(n)?
            .iter()
            .map(|v| rational_angle(&(v / &self.k)))
            .collect();
        for (part, a) in t.parts().iter().zip(&self.angles) {
            for (xj, v) in x.iter_mut().zip(part.b.eval(n)?) {
                *xj = *xj + a.mul_int(&to_int(&v)?);
            }
        }
        Ok(x)
    }
}

/// Offset of the coset as angles, using the label values of `t`.
fn offset_angles(t: &TorusSequence, coset: &SubtorusCoset) -> Result<Vec<Angle>> {
    let values: BTreeMap<&str, Irrational> = t
        .parts()
        .iter()
        .filter_map(|p| p.value.as_deref().map(|v| (p.label.as_str(), v)))
        .map(|(l, v)| Ok((l, Irrational::parse(v)?)))
        .collect::<Result<_>>()?;
    let mut o: Vec<Angle> = coset.rational_offset().iter().map(rational_angle).collect();
    for (label, coeffs) in coset.irrational_offset() {
        let irr = match values.get(label.as_str()) {
            Some(v) => v,
            None if t.parts().iter().any(|p| &p.label == label) => {
                return Err(Error::MissingNumericValue(label.clone()))
            }
            None => return Err(Error::UndeclaredLabel(label.clone())),
        };
        for (oj, c) in o.iter_mut().zip(coeffs) {
            *oj = *oj + irr.angle(c.denom()).mul_int(c.numer());
        }
    }
    Ok(o)
}

/// Integer characters vanishing on the subspace: a saturated basis of `V^⊥ ∩ ℤ^s`.
fn annihilators(coset: &SubtorusCoset) -> Vec<Vec<BigInt>> {
    let s = coset.dim();
    if coset.rank() == 0 {
        return (0..s)
            .map(|i| (0..s).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
    }
    let rows: Vec<Vec<BigInt>> = coset.basis().iter().map(primitive_integer).collect();
    integer_kernel(&rows, s)
}

fn membership_residual(x: &[Angle], offset: &[Angle], chars: &[(Vec<i128>, f64)]) -> f64 {
    let d: Vec<Angle> = x.iter().zip(offset).map(|(a, b)| *a - *b).collect();
    chars
        .iter()
        .map(|(h, norm)| {
            let v = h.iter().zip(&d).fold(Angle::ZERO, |acc, (&c, a)| acc + a.mul_i128(c));
            v.norm() / norm
        })
        .fold(0.0, f64::max)
}

/// Rank of the small integer characters that are constant along the samples.
fn empirical_dimension(points: &[Vec<Angle>], s: usize, tol: f64) -> usize {
    let Some(base) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<Angle>> = points[1..]
        .iter()
        .map(|x| x.iter().zip(base).map(|(a, b)| *a - *b).collect())
        .collect();
    let r = search_radius(s);
    let mut found: Vec<QVec> = Vec::new();
    let mut h = vec![-r; s];
    loop {
        let lead = h.iter().find(|&&c| c != 0);
        if lead.is_some_and(|&c| c > 0) && diffs.iter().all(|d| char_value(&h, d).norm() < tol) {
            let v: QVec = h.iter().map(|&c| BigRational::from_integer(c.into())).collect();
            if rank(&found) < rank(&[found.clone(), vec![v.clone()]].concat()) {
                found.push(v);
            }
        }
        // odometer over [-r, r]^s
        let mut i = s;
        loop {
            if i == 0 {
                return s - rank(&found);
            }
            i -= 1;
            if h[i] < r {
                h[i] += 1;
                break;
            }
            h[i] = -r;
        }
    }
}

/// Random point of `offset + V` as angles.
fn probe(offset: &[Angle], basis: &[QVec], rng: &mut StdRng) -> Vec<Angle> {
    let mut p = offset.to_vec();
    for row in basis {
        let den = row.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let u = rng.gen::<f64>() * den.to_f64().unwrap_or(1.0);
        for (pj, c) in p.iter_mut().zip(row) {
            if !c.is_zero() {
                *pj = *pj + Angle::from_f64(u * c.to_f64().unwrap_or(0.0));
            }
        }
    }
    p
}

/// Samples the orbit and compares it with `predicted`.
pub fn sample_verify(t: &TorusSequence, predicted: &SubtorusCoset, opts: &SampleOptions) -> Result<SampleReport> {
    if predicted.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), found: predicted.dim() });
    }
    let eval = Evaluator::new(t)?;
    let offset = offset_angles(t, predicted)?;
    let ns = sample_points(t, opts);
    if ns.is_empty() {
        return Err(Error::DegenerateSet("the sampling box contains no domain point".into()));
    }
    let points = ns.iter().map(|n| eval.point(t, n)).collect::<Result<Vec<_>>>()?;
    let chars: Vec<(Vec<i128>, f64)> = annihilators(predicted)
        .into_iter()
        .map(|h| {
            let h: Vec<i128> = h.iter().map(|c| c.to_i128().expect("small annihilator")).collect();
            let norm = h.iter().map(|&c| (c as f64).powi(2)).sum::<f64>().sqrt();
            (h, norm)
        })
        .collect();
    let max_membership_residual = points
        .iter()
        .map(|x| membership_residual(x, &offset, &chars))
        .fold(0.0, f64::max);
    let zero = vec![Angle::ZERO; t.dim()];
    let min_distance_to_zero = points.iter().map(|x| sup_dist(x, &zero)).fold(f64::INFINITY, f64::min);
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let cover = &points[..points.len().min(COVER_SAMPLES)];
    let covering_statistic = (0..PROBES)
        .map(|_| {
            let p = probe(&offset, predicted.basis(), &mut rng);
            cover.iter().map(|x| sup_dist(x, &p)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(SampleReport {
        samples: points.len(),
        max_membership_residual,
        empirical_dimension: empirical_dimension(&points, t.dim(), opts.tol),
        predicted_dimension: predicted.rank(),
        covering_statistic,
        min_distance_to_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::AffineLattice;
    use crate::poly::{parse_poly_vector, RationalVectorPoly};
    use crate::torus::{component_closure, IrrationalPart};

    fn single(b: &str, alpha: &str) -> TorusSequence {
        let vp = |t: &str| RationalVectorPoly::new(parse_poly_vector(t, &["n"]).unwrap()).unwrap();
        let bv = vp(b);
        let s = bv.dim();
        let zero = vp(&format!("({})", vec!["0"; s].join(", ")));
        TorusSequence::new(
            BigInt::one(),
            zero,
            vec![IrrationalPart {
                label: "a".into(),
                value: Some(alpha.into()),
                divisor: BigInt::one(),
                b: bv,
            }],
            AffineLattice::full(1),
            Vec::new(),
        )
        .unwrap()
    }

    fn opts(n: u64) -> SampleOptions {
        SampleOptions { box_radius: n, ..SampleOptions::default() }
    }

    #[test]
    fn rotation_fills_the_circle() {
        let t = single("(n)", "sqrt2");
        let c = component_closure("a", &t.parts()[0].b, &BigInt::one(), t.domain()).unwrap();
        let r = sample_verify(&t, &c, &opts(10_000)).unwrap();
        assert!(r.max_membership_residual < 1e-9);
        assert_eq!(r.empirical_dimension, 1);
        assert!(r.covering_statistic < 1e-3);
    }

    #[test]
    fn shifted_diagonal() {
        let t = single("(n, n+1)", "sqrt2");
        let c = component_closure("a", &t.parts()[0].b, &BigInt::one(), t.domain()).unwrap();
        let r = sample_verify(&t, &c, &opts(2_000)).unwrap();
        assert!(r.max_membership_residual < 1e-9);
        assert_eq!((r.empirical_dimension, r.predicted_dimension), (1, 1));
        // distance to 0 is at least ‖α‖/2 on the line {(x, x + α)}
        assert!(r.min_distance_to_zero > 0.1);
    }

    #[test]
    fn zero_sequence_and_missing_values() {
        let t = single("(0)", "sqrt2");
        let r = sample_verify(&t, &SubtorusCoset::zero(1), &opts(50)).unwrap();
        assert_eq!(r.min_distance_to_zero, 0.0);
        assert_eq!(r.max_membership_residual, 0.0);
        assert_eq!(r.empirical_dimension, 0);
        let mut values = BTreeMap::new();
        values.insert("a".to_string(), "sqrt3".to_string());
        let t2 = single("(n)", "sqrt2").with_values(&values);
        assert_eq!(t2.parts()[0].value.as_deref(), Some("sqrt3"));
        let bare = TorusSequence::new(
            BigInt::one(),
            t.rational_part().clone(),
            vec![IrrationalPart { value: None, ..t.parts()[0].clone() }],
            AffineLattice::full(1),
            Vec::new(),
        )
        .unwrap();
        assert!(matches!(
            sample_verify(&bare, &SubtorusCoset::zero(1), &opts(5)),
            Err(Error::MissingNumericValue(_))
        ));
    }
}
