//! Column-style Hermite normal form and subgroup enumeration.
//!
//! A matrix `H` is in HNF when it is upper triangular with positive diagonal
//! and `0 ≤ H[i][j] < H[i][i]` for every `j > i`. Its columns generate the lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// HNF of the lattice generated by the given columns, which must span ℚ^m.
pub fn hnf_from_columns(m: usize, columns: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    if columns.iter().any(|c| c.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: columns.iter().map(Vec::len).find(|&l| l != m).unwrap_or(m),
        });
    }
    let mut work: Vec<Vec<BigInt>> = columns.iter().filter(|c| c.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivots: Vec<Option<Vec<BigInt>>> = vec![None; m];
    for i in (0..m).rev() {
        // fold every working column with a nonzero entry in row i into one pivot
        let mut pivot: Option<Vec<BigInt>> = None;
        let mut rest = Vec::with_capacity(work.len());
        for col in work.drain(..) {
            if col[i].is_zero() {
                rest.push(col);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(col),
                Some(p) => {
                    let (np, other) = gcd_combine(&p, &col, i);
                    pivot = Some(np);
                    if other.iter().any(|x| !x.is_zero()) {
                        rest.push(other);
                    }
                }
            }
        }
        work = rest;
        let mut p = pivot.ok_or(Error::SingularMatrix)?;
        if p[i].is_negative() {
            p.iter_mut().for_each(|x| *x = -x.clone());
        }
        pivots[i] = Some(p);
    }
    // leftover columns are zero in every row by construction
    let mut h: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); m]; m];
    for (j, col) in pivots.into_iter().enumerate() {
        let col = col.expect("pivot set");
        for i in 0..m {
            h[i][j] = col[i].clone();
        }
    }
    reduce_off_diagonal(&mut h);
    Ok(h)
}

/// Unimodular 2-column step: returns `(g, z)` where `g[row] = gcd`, `z[row] = 0`.
fn gcd_combine(a: &[BigInt], b: &[BigInt], row: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let eg = a[row].extended_gcd(&b[row]);
    let (x, y) = (eg.x, eg.y);
    let (as_, bs) = (&a[row] / &eg.gcd, &b[row] / &eg.gcd);
    let g: Vec<BigInt> = a.iter().zip(b).map(|(u, v)| &x * u + &y * v).collect();
    let z: Vec<BigInt> = a.iter().zip(b).map(|(u, v)| &as_ * v - &bs * u).collect();
    (g, z)
}

fn reduce_off_diagonal(h: &mut [Vec<BigInt>]) {
    let m = h.len();
    for j in 0..m {
        for i in (0..j).rev() {
            let q = h[i][j].div_floor(&h[i][i]);
            if q.is_zero() {
                continue;
            }
            for r in 0..=i {
                let delta = &q * &h[r][i];
                h[r][j] -= delta;
            }
        }
    }
}

/// Reduces `x` modulo the column lattice of the HNF `h` to its canonical representative.
pub fn reduce_vector(h: &[Vec<BigInt>], x: &[BigInt]) -> Vec<BigInt> {
    let mut v = x.to_vec();
    for i in (0..h.len()).rev() {
        let q = v[i].div_floor(&h[i][i]);
        if q.is_zero() {
            continue;
        }
        for r in 0..=i {
            let delta = &q * &h[r][i];
            v[r] -= delta;
        }
    }
    v
}

pub fn is_hnf(h: &[Vec<BigInt>]) -> bool {
    let m = h.len();
    (0..m).all(|i| {
        h[i].len() == m
            && h[i][i].is_positive()
            && (0..i).all(|j| h[i][j].is_zero())
            && (i + 1..m).all(|j| !h[i][j].is_negative() && h[i][j] < h[i][i])
    })
}

pub fn diagonal_product(h: &[Vec<BigInt>]) -> BigInt {
    (0..h.len()).fold(BigInt::one(), |acc, i| acc * &h[i][i])
}

/// Every subgroup of ℤ^k with index at most `max_index`, as HNF matrices,
/// ordered by index then row-major entries.
pub fn subgroups_up_to_index(k: usize, max_index: u64) -> Vec<Vec<Vec<BigInt>>> {
    let mut diags = Vec::new();
    let mut cur = Vec::with_capacity(k);
    diagonal_tuples(k, max_index, 1, &mut cur, &mut diags);
    let mut out = Vec::new();
    for d in diags {
        let slots: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        let mut h = vec![vec![0u64; k]; k];
        for i in 0..k {
            h[i][i] = d[i];
        }
        fill_offdiag(&slots, 0, &mut h, &mut out);
    }
    out.sort_by(|a, b| diagonal_product(a).cmp(&diagonal_product(b)).then_with(|| a.cmp(b)));
    out
}

fn diagonal_tuples(k: usize, max: u64, prod: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    let mut d = 1;
    while prod * d <= max {
        cur.push(d);
        diagonal_tuples(k, max, prod * d, cur, out);
        cur.pop();
        d += 1;
    }
}

fn fill_offdiag(slots: &[(usize, usize)], at: usize, h: &mut Vec<Vec<u64>>, out: &mut Vec<Vec<Vec<BigInt>>>) {
    if at == slots.len() {
        out.push(h.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
        return;
    }
    let (i, j) = slots[at];
    for v in 0..h[i][i] {
        h[i][j] = v;
        fill_offdiag(slots, at + 1, h, out);
    }
    h[i][j] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn cols(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter().map(|c| c.iter().map(|&x| b(x)).collect()).collect()
    }

    #[test]
    fn hnf_of_simple_generators() {
        // columns (2,0), (1,3) generate index 6
        let h = hnf_from_columns(2, &cols(&[&[2, 0], &[1, 3]])).unwrap();
        assert!(is_hnf(&h));
        assert_eq!(diagonal_product(&h), b(6));
        assert_eq!(h, vec![vec![b(2), b(1)], vec![b(0), b(3)]]);

        // an extra redundant generator changes nothing
        let h2 = hnf_from_columns(2, &cols(&[&[2, 0], &[1, 3], &[3, 3], &[-4, 6]])).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn singular_generators_rejected() {
        assert!(matches!(
            hnf_from_columns(2, &cols(&[&[1, 2], &[2, 4]])),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn reduction_is_canonical() {
        let h = hnf_from_columns(2, &cols(&[&[2, 0], &[1, 3]])).unwrap();
        let x = vec![b(7), b(-5)];
        let r = reduce_vector(&h, &x);
        assert!(r[1] >= b(0) && r[1] < b(3));
        assert!(r[0] >= b(0) && r[0] < b(2));
        // x − r lies in the lattice: its reduction is zero
        let diff: Vec<BigInt> = x.iter().zip(&r).map(|(a, c)| a - c).collect();
        assert!(reduce_vector(&h, &diff).iter().all(Zero::is_zero));
    }

    #[test]
    fn subgroup_counts() {
        // subgroups of ℤ² of index n number σ(n): 1, 3, 4, 7
        let s = subgroups_up_to_index(2, 4);
        let count = |n: i64| s.iter().filter(|h| diagonal_product(h) == b(n)).count();
        assert_eq!((count(1), count(2), count(3), count(4)), (1, 3, 4, 7));
        assert!(s.iter().all(|h| is_hnf(h)));
        assert_eq!(subgroups_up_to_index(1, 5).len(), 5);
    }
}
