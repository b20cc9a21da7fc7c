//! Hensel certificates for q-adic roots.
//!
//! If `P(a) ≡ 0 mod q^(2t+1)` and `v_q(P'(a)) = t`, Newton iteration from `a`
//! converges q-adically, so `P` has a root in ℤ_q and is solvable modulo every
//! power of `q`.

use num_bigint::BigInt;
use rayon::prelude::*;

use super::search::checked_pow;
use crate::arith::{is_prime, primes_up_to, valuation};
use crate::cert::{Certificate, Claim, DecInt, Evidence, HenselEntry, HenselPayload};
use crate::poly::{CompiledPoly, IntPoly};
use crate::{Error, Result};

/// Root-tree nodes explored before giving up.
const NODE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HenselOutcome {
    /// `root ∈ [0, q^(2t+1))` lifts to a q-adic root.
    CertifiedRoot { root: u64, t: u32 },
    /// No root modulo `q^exponent`; `exponent ≤ e_max` is the least such.
    NoRootUpTo { exponent: u32 },
    /// Roots survive to `q^e_max` but none meets the lifting condition.
    Inconclusive { precision: u32 },
}

impl HenselOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, HenselOutcome::CertifiedRoot { .. })
    }
}

/// Searches the roots of an integer-coefficient polynomial modulo `q, q², …, q^e_max`
/// level by level and returns the least certificate: least `t`, then least root.
pub fn hensel_root(p: &IntPoly, q: u64, e_max: u32) -> Result<HenselOutcome> {
    if p.nvars() != 1 {
        return Err(Error::NotUnivariate(p.nvars()));
    }
    if !p.has_integer_coefficients() {
        return Err(Error::NotIntegerCoefficients);
    }
    if p.is_zero() {
        return Err(Error::EmptyFamily);
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if e_max == 0 {
        return Err(Error::InvalidModulus("precision must be at least 1".into()));
    }
    let top = checked_pow(q, e_max)?;
    let reduced = CompiledPoly::new(p).reduce_mod(top);
    let dp = p.derivative(0);
    let mut level: Vec<u64> = vec![0];
    let mut modulus = 1u64;
    let mut explored = 0usize;
    for j in 1..=e_max {
        let next_mod = modulus * q;
        let mut next = Vec::new();
        for &r in &level {
            for digit in 0..q {
                let cand = r + modulus * digit;
                if reduced.eval(&[cand]).is_multiple_of(next_mod) {
                    next.push(cand);
                }
            }
        }
        explored += next.len();
        if next.is_empty() {
            return Ok(HenselOutcome::NoRootUpTo { exponent: j });
        }
        next.sort_unstable();
        if j % 2 == 1 {
            let t = (j - 1) / 2;
            for &a in &next {
                let d = dp.eval(&[BigInt::from(a)])?.to_integer();
                if matches!(valuation(&d, q), Some(v) if v <= t) {
                    return Ok(HenselOutcome::CertifiedRoot { root: a, t });
                }
            }
        }
        if explored > NODE_CAP {
            return Ok(HenselOutcome::Inconclusive { precision: j });
        }
        level = next;
        modulus = next_mod;
    }
    Ok(HenselOutcome::Inconclusive { precision: e_max })
}

/// Per-prime local-root status of one polynomial for every prime up to a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HenselSweep {
    pub prime_bound: u64,
    pub results: Vec<(u64, HenselOutcome)>,
}

impl HenselSweep {
    pub fn all_certified(&self) -> bool {
        self.results.iter().all(|(_, o)| o.is_certified())
    }

    pub fn first_failure(&self) -> Option<&(u64, HenselOutcome)> {
        self.results.iter().find(|(_, o)| !o.is_certified())
    }

    /// Certificate entries, when every prime is certified.
    pub fn entries(&self) -> Option<Vec<HenselEntry>> {
        self.results
            .iter()
            .map(|(q, o)| match o {
                HenselOutcome::CertifiedRoot { root, t } => Some(HenselEntry {
                    prime: DecInt::from(*q),
                    root: DecInt::from(*root),
                    t: *t,
                }),
                _ => None,
            })
            .collect()
    }

    /// Certificate that `p` has a root in ℤ_q for every prime `q` in the sweep.
    pub fn certificate(&self, p: &IntPoly) -> Option<Certificate> {
        let proofs = self.entries()?;
        let bound = DecInt::from(self.results.last()?.0);
        Some(Certificate::new(
            std::slice::from_ref(p),
            Claim::LocalRootsUpTo { prime_bound: bound.clone() },
            Evidence::HenselProof(HenselPayload {
                prime_bound: bound,
                proofs,
                tail: None,
            }),
        ))
    }
}

/// Runs [`hensel_root`] on `d·p` (integer coefficients) for every prime `≤ prime_bound`.
pub fn hensel_sweep(p: &IntPoly, prime_bound: u64, e_max: u32) -> Result<HenselSweep> {
    let big_p = p.scale_int(&p.denominator());
    let primes = primes_up_to(prime_bound);
    if primes.is_empty() {
        return Err(Error::InvalidModulus("prime bound must be at least 2".into()));
    }
    let results = primes
        .par_iter()
        .map(|&q| {
            // cap the precision so q^e stays in range
            let mut e = e_max;
            while checked_pow(q, e).is_err() && e > 1 {
                e -= 1;
            }
            hensel_root(&big_p, q, e).map(|o| (q, o))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HenselSweep {
        prime_bound: *primes.last().expect("nonempty"),
        results,
    })
}

pub(crate) fn entry_from(q: u64, outcome: &HenselOutcome) -> Option<HenselEntry> {
    match outcome {
        HenselOutcome::CertifiedRoot { root, t } => Some(HenselEntry {
            prime: DecInt::from(q),
            root: DecInt::from(*root),
            t: *t,
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str) -> IntPoly {
        parse_poly(s, &["n"]).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(
            hensel_root(&p("n^2-5"), 11, 4).unwrap(),
            HenselOutcome::CertifiedRoot { root: 4, t: 0 }
        );
        assert_eq!(hensel_root(&p("n^2-5"), 3, 4).unwrap(), HenselOutcome::NoRootUpTo { exponent: 1 });
        assert_eq!(
            hensel_root(&p("n-12"), 7, 3).unwrap(),
            HenselOutcome::CertifiedRoot { root: 5, t: 0 }
        );
        assert!(matches!(hensel_root(&p("n"), 4, 3), Err(Error::NotPrime(4))));
        assert!(matches!(hensel_root(&p("n/2"), 3, 3), Err(Error::NotIntegerCoefficients)));
    }

    #[test]
    fn degree_five_example_at_small_primes() {
        let f = p("(n^3-19)*(n^2+n+1)");
        // at 3 the certificate needs precision 5 (t = 2)
        match hensel_root(&f, 3, 5).unwrap() {
            HenselOutcome::CertifiedRoot { t, .. } => assert_eq!(t, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(hensel_root(&f, 3, 4).unwrap(), HenselOutcome::Inconclusive { .. }));
        assert_eq!(hensel_root(&f, 2, 5).unwrap(), HenselOutcome::CertifiedRoot { root: 1, t: 0 });
    }

    #[test]
    fn squares_at_two_need_precision_three() {
        // n^2 - 17: 17 ≡ 1 mod 8, derivative 2n has valuation 1
        assert_eq!(
            hensel_root(&p("n^2-17"), 2, 5).unwrap(),
            HenselOutcome::CertifiedRoot { root: 1, t: 1 }
        );
        // n^2 - 5 has no root mod 8
        assert_eq!(hensel_root(&p("n^2-5"), 2, 5).unwrap(), HenselOutcome::NoRootUpTo { exponent: 3 });
    }

    #[test]
    fn sweep_certificates_verify() {
        let f = p("n^2-n");
        let s = hensel_sweep(&f, 30, 5).unwrap();
        assert!(s.all_certified());
        crate::cert::verify(&s.certificate(&f).unwrap()).unwrap();
    }
}
