//! Solvability modulo `k`, joint intersectivity scans and their certificates.

mod decide;
mod hensel;
mod multidim;
mod search;

pub use decide::{intersective_decide_1var, reduce_joint_to_gcd, GcdReduction, Verdict};
pub use hensel::{hensel_root, hensel_sweep, HenselOutcome, HenselSweep};
pub use multidim::{multidim_bounded_check, MultidimReport, SubgroupVerdict};
pub use search::DEFAULT_BUDGET;
pub(crate) use search::advance as advance_odometer;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{crt, factorize, primes_up_to};
use crate::cert::{Certificate, Claim, CounterexampleTable, DecInt, Evidence};
use crate::poly::IntPoly;
use crate::{Error, Result};
use search::{advance, checked_pow, search_prime_power, PrimeOutcome, ScaledFamily};

/// Outcome of a search modulo `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModSolvability {
    pub modulus: u64,
    /// Residue vector in `[0, witness_modulus)^m` making every member divisible by `k`.
    pub witness: Option<Vec<BigInt>>,
    /// Period of the family's values modulo `k`.
    pub witness_modulus: u64,
    /// The search covered every residue (directly or by CRT composition).
    pub exhaustive: bool,
    /// Prime-power component of `k` with no common root, if any.
    pub obstruction: Option<u64>,
}

fn ensure_integral(family: &[IntPoly]) -> Result<()> {
    for p in family {
        if !p.is_integral() {
            return Err(Error::NotIntegral(p.to_string()));
        }
    }
    Ok(())
}

/// Decides whether a single `n` makes every member divisible by `k`.
///
/// `budget` caps the number of polynomial evaluations per prime-power component.
pub fn solvable_mod(family: &[IntPoly], k: u64, budget: u64) -> Result<ModSolvability> {
    if k == 0 {
        return Err(Error::InvalidModulus("k must be positive".into()));
    }
    ensure_integral(family)?;
    let fam = ScaledFamily::new(family)?;
    let m = fam.nvars;
    let mut parts: Vec<(Vec<u64>, u64)> = Vec::new();
    let mut period = 1u64;
    for (q, e) in factorize(k) {
        let depth_mod = checked_pow(q, e + fam.scale_valuation(q))?;
        period = period
            .checked_mul(depth_mod)
            .ok_or_else(|| Error::InvalidModulus("search modulus overflows".into()))?;
        let mut b = budget;
        match search_prime_power(&fam, q, e, &mut b)? {
            PrimeOutcome::Witness(w) => parts.push((w, depth_mod)),
            PrimeOutcome::Fails { .. } => {
                return Ok(ModSolvability {
                    modulus: k,
                    witness: None,
                    witness_modulus: search_modulus(k, &fam.scale),
                    exhaustive: true,
                    obstruction: Some(q.pow(e)),
                })
            }
        }
    }
    let witness: Vec<BigInt> = (0..m)
        .map(|j| {
            let pairs: Vec<(u64, u64)> = parts.iter().map(|(w, md)| (w[j], *md)).collect();
            crt(&pairs).map(|(r, _)| BigInt::from(r)).unwrap_or_else(BigInt::zero)
        })
        .collect();
    let kb = BigInt::from(k);
    for p in family {
        let v = p.eval(&witness)?;
        if !(v.to_integer() % &kb).is_zero() || !v.is_integer() {
            return Err(Error::Internal(format!("witness {witness:?} fails re-verification")));
        }
    }
    Ok(ModSolvability {
        modulus: k,
        witness: Some(witness),
        witness_modulus: period,
        exhaustive: true,
        obstruction: None,
    })
}

/// `∏ q^(e + v_q(d))` over `q^e ∥ k`: the period of `p(n) mod k` when `d·p` is integral.
pub fn search_modulus(k: u64, d: &BigInt) -> u64 {
    factorize(k)
        .into_iter()
        .map(|(q, e)| q.pow(e + crate::arith::valuation(d, q).unwrap_or(0)))
        .product()
}

/// Result of a prime-power scan up to a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JointVerdict {
    SolvableAllModuli { bound: u64 },
    Counterexample {
        modulus: u64,
        certificate: Option<Certificate>,
    },
}

/// Scans every prime power `≤ bound` (composite moduli follow by CRT) and
/// reports the least one at which the family has no common root.
pub fn jointly_intersective_up_to(family: &[IntPoly], bound: u64, budget: u64) -> Result<JointVerdict> {
    if bound < 2 {
        return Err(Error::InvalidModulus("bound must be at least 2".into()));
    }
    ensure_integral(family)?;
    let fam = ScaledFamily::new(family)?;
    let primes = primes_up_to(bound);
    let outcomes: Vec<(u64, Result<PrimeOutcome>)> = primes
        .par_iter()
        .map(|&q| {
            let mut e = 1;
            while q.checked_pow(e + 1).is_some_and(|x| x <= bound) {
                e += 1;
            }
            let mut b = budget;
            (q, search_prime_power(&fam, q, e, &mut b))
        })
        .collect();
    let mut least_fail: Option<u64> = None;
    let mut least_unverified: Option<u64> = None;
    for (q, out) in outcomes {
        match out {
            Ok(PrimeOutcome::Witness(_)) => {}
            Ok(PrimeOutcome::Fails { least_exponent }) => {
                let k = q.pow(least_exponent);
                least_fail = Some(least_fail.map_or(k, |x| x.min(k)));
            }
            Err(Error::BudgetExceeded { .. }) => {
                least_unverified = Some(least_unverified.map_or(q, |x| x.min(q)));
            }
            Err(e) => return Err(e),
        }
    }
    match (least_fail, least_unverified) {
        (Some(k), u) if u.is_none_or(|u| k < u) => Ok(JointVerdict::Counterexample {
            modulus: k,
            certificate: counterexample_certificate(family, k).ok(),
        }),
        (_, Some(u)) => Err(Error::BudgetExceeded {
            last_verified_bound: u - 1,
        }),
        _ => Ok(JointVerdict::SolvableAllModuli { bound }),
    }
}

/// Residue tables above this size are not emitted.
const TABLE_CAP: u64 = 1 << 22;

/// Table certificate that no residue makes every member divisible by `k`.
pub fn counterexample_certificate(family: &[IntPoly], k: u64) -> Result<Certificate> {
    ensure_integral(family)?;
    let fam = ScaledFamily::new(family)?;
    let period = search_modulus(k, &fam.scale);
    let m = fam.nvars;
    let total = period
        .checked_pow(m as u32)
        .filter(|&t| t <= TABLE_CAP)
        .ok_or(Error::BudgetExceeded { last_verified_bound: 0 })?;
    let mut table = Vec::with_capacity(total as usize);
    let mut digits = vec![0u64; m];
    let kb = BigInt::from(k);
    loop {
        let point: Vec<BigInt> = digits.iter().rev().map(|&x| BigInt::from(x)).collect();
        let mut hit = None;
        for (i, p) in family.iter().enumerate() {
            let small = point.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>();
            let divisible = match small.and_then(|s| fam.compiled[i].eval_i128(&s)) {
                Some(v) => v % k as i128 == 0,
                None => (p.eval(&point)?.to_integer() % &kb).is_zero(),
            };
            if !divisible {
                hit = Some(i as u32);
                break;
            }
        }
        match hit {
            Some(i) => table.push(i),
            None => {
                return Err(Error::Inconsistent(format!(
                    "residue {point:?} makes every member divisible by {k}"
                )))
            }
        }
        if !advance(&mut digits, period) {
            break;
        }
    }
    Ok(Certificate::new(
        family,
        Claim::NotIntersective { modulus: DecInt::from(k) },
        Evidence::CounterexampleModulus(CounterexampleTable {
            modulus: DecInt::from(k),
            search_modulus: DecInt::from(period),
            table,
        }),
    ))
}
