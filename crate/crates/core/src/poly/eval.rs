//! Fast evaluation paths for hot loops (residue searches, sampling sweeps).
//!
//! A polynomial `p` with coefficient denominator `d` is stored as the integer
//! polynomial `P = d·p`. Values are recovered exactly as `P(n)/d`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::IntPoly;
use crate::arith::{big_mod_u64, mul_mod};

#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    scale: BigInt,
    terms: Vec<(Vec<u32>, BigInt)>,
    small: Option<(Vec<(Vec<u32>, i128)>, i128)>,
}

impl CompiledPoly {
    pub fn new(p: &IntPoly) -> Self {
        Self::with_scale(p, &p.denominator())
    }

    /// Compiles `scale·p`; `scale` must clear all denominators of `p`.
    pub fn with_scale(p: &IntPoly, scale: &BigInt) -> Self {
        let terms: Vec<(Vec<u32>, BigInt)> = p
            .scale_int(scale)
            .integer_terms()
            .expect("scale clears denominators")
            .into_iter()
            .map(|(m, c)| (m.0, c))
            .collect();
        let small = terms
            .iter()
            .map(|(e, c)| c.to_i128().map(|c| (e.clone(), c)))
            .collect::<Option<Vec<_>>>().zip(scale.to_i128());
        CompiledPoly {
            nvars: p.nvars(),
            scale: scale.clone(),
            terms,
            small,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// Exact value `p(point)` when it is an integer and no overflow occurs.
    pub fn eval_i128(&self, point: &[i64]) -> Option<i128> {
        let (terms, scale) = self.small.as_ref()?;
        let mut acc: i128 = 0;
        for (e, c) in terms {
            let mut t = *c;
            for (j, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t.checked_mul(point[j] as i128)?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        (acc % scale == 0).then(|| acc / scale)
    }

    /// `P = scale·p` reduced modulo `m`, ready for repeated evaluation.
    pub fn reduce_mod(&self, m: u64) -> ModPoly {
        let mut dense = None;
        if self.nvars == 1 {
            let deg = self.terms.iter().map(|(e, _)| e[0]).max().unwrap_or(0) as usize;
            let mut c = vec![0u64; deg + 1];
            for (e, v) in &self.terms {
                c[e[0] as usize] = big_mod_u64(v, m);
            }
            dense = Some(c);
        }
        let max_deg = (0..self.nvars)
            .map(|j| self.terms.iter().map(|(e, _)| e[j]).max().unwrap_or(0))
            .collect();
        ModPoly {
            modulus: m,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), big_mod_u64(c, m)))
                .filter(|(_, c)| *c != 0)
                .collect(),
            dense,
            max_deg,
        }
    }
}

/// An integer polynomial with coefficients reduced modulo `modulus`.
#[derive(Clone, Debug)]
pub struct ModPoly {
    modulus: u64,
    terms: Vec<(Vec<u32>, u64)>,
    dense: Option<Vec<u64>>,
    max_deg: Vec<u32>,
}

impl ModPoly {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Value modulo `modulus` at a point with coordinates already reduced.
    pub fn eval(&self, point: &[u64]) -> u64 {
        let m = self.modulus;
        if let Some(c) = &self.dense {
            let x = point[0] % m;
            let mut acc = 0u64;
            for &a in c.iter().rev() {
                acc = (mul_mod(acc, x, m) + a) % m;
            }
            return acc;
        }
        let powers: Vec<Vec<u64>> = point
            .iter()
            .zip(&self.max_deg)
            .map(|(&x, &d)| {
                let mut pw = Vec::with_capacity(d as usize + 1);
                pw.push(1 % m);
                for i in 1..=d as usize {
                    pw.push(mul_mod(pw[i - 1], x % m, m));
                }
                pw
            })
            .collect();
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = mul_mod(t, powers[j][k as usize], m);
                }
            }
            acc = (acc + t) % m;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn exact_and_modular_agree() {
        let p = parse_poly("n*(n+1)*(2*n+1)/6 - 3", &["n"]).unwrap();
        let c = CompiledPoly::new(&p);
        assert_eq!(c.scale(), &BigInt::from(6));
        for n in -20i64..20 {
            let exact = p.eval_i64(&[n]).unwrap();
            assert_eq!(BigInt::from(c.eval_i128(&[n]).unwrap()), exact.to_integer());
        }
        let mp = c.reduce_mod(35);
        for n in 0..35u64 {
            let scaled = p.eval_i64(&[n as i64]).unwrap() * num_rational::BigRational::from_integer(6.into());
            assert_eq!(mp.eval(&[n]), big_mod_u64(&scaled.to_integer(), 35));
        }
    }

    #[test]
    fn multivariate_mod_eval() {
        let p = parse_poly("x^2*y - 3*y^2 + 7", &["x", "y"]).unwrap();
        let mp = CompiledPoly::new(&p).reduce_mod(11);
        for x in 0..11u64 {
            for y in 0..11u64 {
                let v = p.eval_i64(&[x as i64, y as i64]).unwrap().to_integer();
                assert_eq!(mp.eval(&[x, y]), big_mod_u64(&v, 11));
            }
        }
    }
}
