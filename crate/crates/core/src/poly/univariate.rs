//! One-variable polynomial division, GCD and Bezout cofactors over ℚ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::IntPoly;
use crate::{Error, Result};

fn dense(p: &IntPoly) -> Vec<BigRational> {
    let deg = p.degree() as usize;
    let mut c = vec![BigRational::zero(); deg + 1];
    for (m, v) in p.terms() {
        c[m.0[0] as usize] = v.clone();
    }
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

fn ensure_univariate(p: &IntPoly) -> Result<()> {
    if p.nvars() != 1 {
        return Err(Error::NotUnivariate(p.nvars()));
    }
    Ok(())
}

impl IntPoly {
    pub fn leading_coeff(&self) -> BigRational {
        self.terms()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Ascending coefficient vector of a one-variable polynomial.
    pub fn dense_coeffs(&self) -> Vec<BigRational> {
        dense(self)
    }

    /// Euclidean division in ℚ[n]: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &IntPoly) -> Result<(IntPoly, IntPoly)> {
        ensure_univariate(self)?;
        ensure_univariate(divisor)?;
        if divisor.is_zero() {
            return Err(Error::EmptyFamily);
        }
        let b = dense(divisor);
        let db = b.len() - 1;
        let lead = b[db].clone();
        let mut r = dense(self);
        if self.is_zero() || r.len() - 1 < db {
            return Ok((IntPoly::zero(1), self.clone().without_domain()));
        }
        let mut q = vec![BigRational::zero(); r.len() - db];
        for i in (0..q.len()).rev() {
            let c = &r[i + db] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
            q[i] = c;
        }
        r.truncate(db.max(1));
        Ok((IntPoly::from_coeffs(&q), IntPoly::from_coeffs(&r)))
    }

    /// Monic associate; the zero polynomial stays zero.
    pub fn monic(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(BigRational::one() / self.leading_coeff()))
    }

    /// Associate with coprime integer coefficients and positive leading coefficient.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let scaled = self.scale_int(&self.denominator());
        let content = scaled
            .terms()
            .fold(BigInt::zero(), |g, (_, c)| g.gcd(&c.to_integer()));
        let mut out = scaled.scale(&BigRational::new(BigInt::one(), content));
        if out.leading_coeff().is_negative() {
            out = -&out;
        }
        out
    }
}

/// GCD over ℚ[n] with integer Bezout cofactors: `Σ h_i·p_i = d·g`, `g` monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutData {
    pub gcd: IntPoly,
    pub cofactors: Vec<IntPoly>,
    pub scale: BigInt,
}

impl BezoutData {
    /// Re-checks the identity `Σ h_i·p_i − d·g = 0` symbolically.
    pub fn verify(&self, family: &[IntPoly]) -> bool {
        if family.len() != self.cofactors.len() {
            return false;
        }
        let mut acc = IntPoly::zero(1);
        for (h, p) in self.cofactors.iter().zip(family) {
            acc = &acc + &(h * p);
        }
        let rhs = self.gcd.scale_int(&self.scale);
        (&acc - &rhs).is_zero() && self.cofactors.iter().all(IntPoly::has_integer_coefficients)
    }
}

fn xgcd_rational(family: &[IntPoly], target_normalizer: impl Fn(&IntPoly) -> IntPoly) -> Result<(IntPoly, Vec<IntPoly>)> {
    for p in family {
        ensure_univariate(p)?;
    }
    if family.iter().all(IntPoly::is_zero) {
        return Err(Error::EmptyFamily);
    }
    let r = family.len();
    let unit = |i: usize| {
        (0..r)
            .map(|j| IntPoly::from_int(1, (i == j) as i64))
            .collect::<Vec<_>>()
    };
    // invariant: g = Σ h_j p_j
    let mut g = IntPoly::zero(1);
    let mut h: Vec<IntPoly> = vec![IntPoly::zero(1); r];
    for (i, p) in family.iter().enumerate() {
        let p = p.clone().without_domain();
        if p.is_zero() {
            continue;
        }
        if g.is_zero() {
            g = p;
            h = unit(i);
            continue;
        }
        // extended Euclid on (g, p)
        let (mut r0, mut r1) = (g.clone(), p);
        let (mut s0, mut s1) = (IntPoly::from_int(1, 1), IntPoly::zero(1));
        let (mut t0, mut t1) = (IntPoly::zero(1), IntPoly::from_int(1, 1));
        while !r1.is_zero() {
            let (q, rem) = r0.div_rem(&r1)?;
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        g = r0;
        let ei = unit(i);
        h = h
            .iter()
            .zip(&ei)
            .map(|(hj, ej)| &(&s0 * hj) + &(&t0 * ej))
            .collect();
    }
    let normal = target_normalizer(&g);
    // normal = c·g
    let c = normal.leading_coeff() / g.leading_coeff();
    let h = h.iter().map(|x| x.scale(&c)).collect();
    Ok((normal, h))
}

fn clear_cofactors(h: Vec<IntPoly>) -> (Vec<IntPoly>, BigInt) {
    let d = h.iter().fold(BigInt::one(), |acc, x| acc.lcm(&x.denominator()));
    (h.into_iter().map(|x| x.scale_int(&d)).collect(), d)
}

/// GCD of a one-variable family in ℚ[n], normalized monic, with integer cofactors.
pub fn gcd_bezout_1var(family: &[IntPoly]) -> Result<BezoutData> {
    let (g, h) = xgcd_rational(family, IntPoly::monic)?;
    let (cofactors, scale) = clear_cofactors(h);
    let out = BezoutData {
        gcd: g,
        cofactors,
        scale,
    };
    if !out.verify(family) {
        return Err(Error::Internal("Bezout identity failed re-verification".into()));
    }
    Ok(out)
}

/// Same as [`gcd_bezout_1var`] but with the GCD normalized to its primitive
/// integer associate: `Σ h_i·p_i = D·g` with `g ∈ ℤ[n]` primitive.
pub fn gcd_bezout_primitive(family: &[IntPoly]) -> Result<BezoutData> {
    let (g, h) = xgcd_rational(family, IntPoly::primitive)?;
    let (cofactors, scale) = clear_cofactors(h);
    let out = BezoutData {
        gcd: g,
        cofactors,
        scale,
    };
    if !out.verify(family) {
        return Err(Error::Internal("Bezout identity failed re-verification".into()));
    }
    Ok(out)
}
