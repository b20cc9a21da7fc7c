//! Residue searches modulo prime powers.
//!
//! For a family with common denominator `d`, write `P_i = d·p_i`. Then
//! `q^e | p_i(n)` iff `q^(e + v_q(d)) | P_i(n)`, and the right side depends only
//! on `n mod q^(e + v_q(d))`. The search walks the tree of common roots of
//! the `P_i` modulo `q, q², …`, which is exhaustive: a residue survives at level
//! `j + 1` only if its reduction survived at level `j`.

use num_bigint::BigInt;

use crate::arith::valuation;
use crate::poly::{CompiledPoly, IntPoly, ModPoly};
use crate::{Error, Result};

/// Evaluation allowance for one prime-power search.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum PrimeOutcome {
    /// Common root modulo `q^(e + v)`, coordinates in `[0, q^(e + v))`.
    Witness(Vec<u64>),
    /// Least exponent `e' ≤ e` with no common root of the `p_i` modulo `q^e'`.
    Fails { least_exponent: u32 },
}

pub(crate) struct ScaledFamily {
    pub nvars: usize,
    pub scale: BigInt,
    pub compiled: Vec<CompiledPoly>,
}

impl ScaledFamily {
    pub fn new(family: &[IntPoly]) -> Result<Self> {
        let first = family.first().ok_or(Error::EmptyFamily)?;
        let nvars = first.nvars();
        if let Some(bad) = family.iter().find(|p| p.nvars() != nvars) {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: bad.nvars(),
            });
        }
        let scale = crate::poly::denominator_scale(family);
        let compiled = family.iter().map(|p| CompiledPoly::with_scale(p, &scale)).collect();
        Ok(ScaledFamily { nvars, scale, compiled })
    }

    pub fn scale_valuation(&self, q: u64) -> u32 {
        valuation(&self.scale, q).expect("scale is nonzero")
    }
}

pub(crate) fn checked_pow(q: u64, e: u32) -> Result<u64> {
    q.checked_pow(e)
        .filter(|&m| m < (1u64 << 62))
        .ok_or_else(|| Error::InvalidModulus(format!("{q}^{e} exceeds the 62-bit search range")))
}

/// Tree search for a common root of the family modulo `q^e`.
///
/// `budget` is decremented once per polynomial evaluation.
pub(crate) fn search_prime_power(fam: &ScaledFamily, q: u64, e: u32, budget: &mut u64) -> Result<PrimeOutcome> {
    let v = fam.scale_valuation(q);
    let depth = e + v;
    let modulus = checked_pow(q, depth)?;
    let reduced: Vec<ModPoly> = fam.compiled.iter().map(|c| c.reduce_mod(modulus)).collect();
    let m = fam.nvars;
    let level_mod: Vec<u64> = (0..=depth).map(|j| q.pow(j)).collect();

    let mut best = 0u32;
    // frames hold (level, point mod q^level, next child digits); children are
    // expanded lazily in ascending digit order
    let mut stack: Vec<(u32, Vec<u64>, Option<Vec<u64>>)> = vec![(0, vec![0; m], Some(vec![0; m]))];
    while let Some(frame) = stack.last_mut() {
        let level = frame.0;
        best = best.max(level);
        if level == depth {
            return Ok(PrimeOutcome::Witness(frame.1.clone()));
        }
        let step = level_mod[level as usize];
        let target = level_mod[level as usize + 1];
        let mut found = None;
        while let Some(digits) = frame.2.as_mut() {
            let child: Vec<u64> = frame.1.iter().zip(digits.iter()).map(|(&x, &t)| x + step * t).collect();
            if !advance(digits, q) {
                frame.2 = None;
            }
            let mut ok = true;
            for p in &reduced {
                if *budget == 0 {
                    return Err(Error::BudgetExceeded { last_verified_bound: 0 });
                }
                *budget -= 1;
                if p.eval(&child) % target != 0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                found = Some(child);
                break;
            }
        }
        match found {
            Some(child) => stack.push((level + 1, child, Some(vec![0; m]))),
            None => {
                stack.pop();
            }
        }
    }
    Ok(PrimeOutcome::Fails {
        least_exponent: best + 1 - v,
    })
}

/// Odometer over `[0, base)^len`; returns false after the last tuple.
pub(crate) fn advance(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Least residue vector (lexicographic, last coordinate fastest) in
/// `[0, modulus)^m` at which every `P_i` vanishes modulo `target`.
pub(crate) fn least_residue(
    fam: &ScaledFamily,
    modulus: u64,
    target: u64,
    budget: &mut u64,
) -> Result<Option<Vec<u64>>> {
    let reduced: Vec<ModPoly> = fam.compiled.iter().map(|c| c.reduce_mod(modulus)).collect();
    let m = fam.nvars;
    let mut digits = vec![0u64; m];
    loop {
        let point: Vec<u64> = digits.iter().rev().copied().collect();
        let mut ok = true;
        for p in &reduced {
            if *budget == 0 {
                return Err(Error::BudgetExceeded { last_verified_bound: 0 });
            }
            *budget -= 1;
            if p.eval(&point) % target != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(point));
        }
        if !advance(&mut digits, modulus) {
            return Ok(None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn fam(src: &[&str]) -> ScaledFamily {
        let polys: Vec<IntPoly> = src.iter().map(|s| parse_poly(s, &["n"]).unwrap()).collect();
        ScaledFamily::new(&polys).unwrap()
    }

    #[test]
    fn tree_search_matches_brute_force() {
        let f = fam(&["n*(n+1)*(2*n+1)", "(n^3+n^2+2)*(2*n+1)"]);
        let mut b = DEFAULT_BUDGET;
        assert_eq!(search_prime_power(&f, 2, 1, &mut b).unwrap(), PrimeOutcome::Witness(vec![0]));
        assert_eq!(
            search_prime_power(&f, 2, 5, &mut b).unwrap(),
            PrimeOutcome::Fails { least_exponent: 2 }
        );
        let g = fam(&["n^2+1"]);
        assert_eq!(
            search_prime_power(&g, 3, 4, &mut b).unwrap(),
            PrimeOutcome::Fails { least_exponent: 1 }
        );
        // 2 | n^2+1 at n odd, 4 never
        assert_eq!(
            search_prime_power(&g, 2, 3, &mut b).unwrap(),
            PrimeOutcome::Fails { least_exponent: 2 }
        );
    }

    #[test]
    fn denominators_shift_the_search_depth() {
        // n(n+1)/2 is even iff n ≡ 0, 3 mod 4
        let f = fam(&["n*(n+1)/2"]);
        let mut b = DEFAULT_BUDGET;
        match search_prime_power(&f, 2, 1, &mut b).unwrap() {
            PrimeOutcome::Witness(w) => assert!(w[0] % 4 == 0 || w[0] % 4 == 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = fam(&["n^2+1"]);
        let mut b = 2;
        assert!(matches!(
            search_prime_power(&f, 101, 1, &mut b),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn least_residue_is_lexicographic() {
        let polys = vec![parse_poly("x^2 + y^2 - 2", &["x", "y"]).unwrap()];
        let f = ScaledFamily::new(&polys).unwrap();
        let mut b = DEFAULT_BUDGET;
        // modulo 5: x^2 + y^2 ≡ 2 first at (1, 1)
        assert_eq!(least_residue(&f, 5, 5, &mut b).unwrap(), Some(vec![1, 1]));
    }
}
