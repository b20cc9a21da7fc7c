//! Exact linear algebra over ℚ and ℤ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QVec = Vec<BigRational>;

/// Reduced row-echelon form of the given rows; zero rows are dropped.
pub fn rref(rows: &[QVec]) -> Vec<QVec> {
    let mut a: Vec<QVec> = rows.to_vec();
    let ncols = a.first().map(Vec::len).unwrap_or(0);
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(sel) = (pivot_row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(pivot_row, sel);
        let inv = BigRational::one() / &a[pivot_row][col];
        for x in a[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..a.len() {
            if r != pivot_row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..ncols {
                    let delta = &f * &a[pivot_row][c];
                    a[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == a.len() {
            break;
        }
    }
    a.truncate(pivot_row);
    a
}

pub fn rank(rows: &[QVec]) -> usize {
    rref(rows).len()
}

/// Basis of `{x : A·x = 0}` where `A` is given by its rows.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let r = rref(rows);
    let pivots: Vec<usize> = r
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).expect("nonzero row"))
        .collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Whether `v` lies in the ℚ-span of `rows`.
pub fn in_span(rows: &[QVec], v: &QVec) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    let mut ext = rows.to_vec();
    ext.push(v.clone());
    rank(&ext) == rank(rows)
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer(v: &QVec) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn dot(a: &QVec, b: &QVec) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant of a square integer matrix (fraction-free elimination).
pub fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Integer-matrix inverse as a rational matrix; `None` if singular.
pub fn inverse_rational(m: &[Vec<BigInt>]) -> Option<Vec<QVec>> {
    let n = m.len();
    let mut a: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: QVec = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            r.extend((0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i32))));
            r
        })
        .collect();
    for col in 0..n {
        let sel = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, sel);
        let inv = BigRational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Unimodular column reduction of an integer matrix.
///
/// Returns `(E, U)` with `E = A·U` in column echelon form (rows processed top to
/// bottom) and `U` unimodular. The trailing `ncols − rank` columns of `E` are zero,
/// so the matching columns of `U` form a ℤ-basis of the integer kernel of `A`.
pub fn column_echelon(a: &[Vec<BigInt>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, usize) {
    let mut e: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    let mut col = 0;
    for row in 0..e.len() {
        if col == ncols {
            break;
        }
        // fold every later column into `col` by gcd steps on this row
        for j in col + 1..ncols {
            if e[row][j].is_zero() {
                continue;
            }
            let x = e[row][col].clone();
            let y = e[row][j].clone();
            let g = x.extended_gcd(&y);
            let (p, q) = (g.x, g.y);
            let (xs, ys) = (&x / &g.gcd, &y / &g.gcd);
            // [col, j] <- [col, j] · [[p, -ys], [q, xs]]  (determinant 1)
            combine_columns(&mut e, col, j, &p, &q, &(-ys.clone()), &xs);
            combine_columns(&mut u, col, j, &p, &q, &(-ys), &xs);
        }
        if e[row][col].is_zero() {
            continue;
        }
        if e[row][col].is_negative() {
            negate_column(&mut e, col);
            negate_column(&mut u, col);
        }
        col += 1;
    }
    (e, u, col)
}

fn combine_columns(m: &mut [Vec<BigInt>], c1: usize, c2: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
    for row in m.iter_mut() {
        let x = row[c1].clone();
        let y = row[c2].clone();
        row[c1] = a * &x + b * &y;
        row[c2] = c * &x + d * &y;
    }
}

fn negate_column(m: &mut [Vec<BigInt>], c: usize) {
    for row in m.iter_mut() {
        row[c] = -row[c].clone();
    }
}

/// ℤ-basis of `{c ∈ ℤ^n : A·c = 0}`; always saturated in ℤ^n.
pub fn integer_kernel(a: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let (_, u, rank) = column_echelon(a, ncols);
    (rank..ncols)
        .map(|j| u.iter().map(|row| row[j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(v: &[i64]) -> QVec {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rref_and_rank() {
        let rows = vec![qv(&[1, 2, 3]), qv(&[2, 4, 6]), qv(&[0, 1, 1])];
        let r = rref(&rows);
        assert_eq!(r, vec![qv(&[1, 0, 1]), qv(&[0, 1, 1])]);
        assert_eq!(rank(&rows), 2);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns, vec![qv(&[-1, -1, 1])]);
        assert!(in_span(&rows, &qv(&[1, 3, 4])));
        assert!(!in_span(&rows, &qv(&[0, 0, 1])));
    }

    #[test]
    fn determinant() {
        let m = vec![iv(&[2, 1, 0]), iv(&[1, 3, 1]), iv(&[0, 1, 4])];
        assert_eq!(det_int(&m), BigInt::from(18));
        let s = vec![iv(&[1, 2]), iv(&[2, 4])];
        assert!(det_int(&s).is_zero());
        let p = vec![iv(&[0, 1]), iv(&[1, 0])];
        assert_eq!(det_int(&p), BigInt::from(-1));
    }

    #[test]
    fn kernel_is_saturated() {
        // kernel of (2, 4) over ℤ is spanned by (-2, 1), not (-4, 2)
        let k = integer_kernel(&[iv(&[2, 4])], 2);
        assert_eq!(k.len(), 1);
        let g = k[0].iter().fold(BigInt::zero(), |a, x| a.gcd(x));
        assert_eq!(g, BigInt::one());
        assert!((&k[0][0] * BigInt::from(2) + &k[0][1] * BigInt::from(4)).is_zero());

        let k = integer_kernel(&[iv(&[1, 1, 0, 2]), iv(&[0, 3, 3, 3])], 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((&v[0] + &v[1] + &v[3] * BigInt::from(2)).is_zero());
            assert!(((&v[1] + &v[2] + &v[3]) * BigInt::from(3)).is_zero());
        }
    }

    #[test]
    fn inverse() {
        let m = vec![iv(&[2, 1]), iv(&[0, 3])];
        let inv = inverse_rational(&m).unwrap();
        assert_eq!(inv[0][1], BigRational::new((-1).into(), 6.into()));
        assert!(inverse_rational(&[iv(&[1, 2]), iv(&[2, 4])]).is_none());
    }
}
