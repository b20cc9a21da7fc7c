//! Certified intersectivity verdicts for one-variable polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::hensel::{entry_from, hensel_root, hensel_sweep, HenselOutcome};
use super::search::{checked_pow, least_residue, ScaledFamily};
use super::{counterexample_certificate, ensure_integral, jointly_intersective_up_to, search_modulus, JointVerdict};
use crate::arith::{factorize, is_prime, legendre, prime_powers_up_to, primes_up_to, sqrt_mod_prime, valuation};
use crate::cert::{
    BezoutReduction, BoundedOnly, BoundedWitness, Certificate, Claim, DecInt, DecRat, Evidence, HenselPayload,
    LegendreRow, QuadResidueProof, TailFactor, WitnessTable,
};
use crate::poly::{default_vars, gcd_bezout_primitive, BezoutData, IntPoly};
use crate::{Error, Result};

/// Odd primes listed in the Legendre spot table.
const LEGENDRE_TABLE_BOUND: u64 = 100;

/// Precision cap for the local roots of the quadratic-residue sextic.
const QR_PRECISION: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Intersective,
    NotIntersective(u64),
    Unknown,
}

/// Rational roots of a one-variable polynomial, ordered by `(denominator, |numerator|, numerator)`.
///
/// Returns an empty list when the extreme coefficients are too large to factor.
pub(crate) fn rational_roots(p: &IntPoly) -> Vec<BigRational> {
    if p.is_zero() || p.degree() == 0 {
        return Vec::new();
    }
    let coeffs: Vec<BigInt> = p.primitive().dense_coeffs().iter().map(|c| c.to_integer()).collect();
    let mut out = Vec::new();
    let low = coeffs.iter().position(|c| !c.is_zero()).expect("nonzero");
    if low > 0 {
        out.push(BigRational::zero());
    }
    let a0 = coeffs[low].abs();
    let an = coeffs.last().expect("nonempty").abs();
    let (Some(a0), Some(an)) = (a0.to_u64(), an.to_u64()) else {
        return out;
    };
    for w in divisors(an) {
        for u in divisors(a0) {
            if u.gcd(&w) != 1 {
                continue;
            }
            for s in [-1i64, 1] {
                let r = BigRational::new(BigInt::from(u) * s, BigInt::from(w));
                if p.eval_rational(std::slice::from_ref(&r)).map(|v| v.is_zero()).unwrap_or(false) {
                    out.push(r);
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (a.denom(), a.numer().abs(), a.numer()).cmp(&(b.denom(), b.numer().abs(), b.numer()))
    });
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (q, e) in factorize(n) {
        let cur = ds.clone();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            ds.extend(cur.iter().map(|d| d * pw));
        }
    }
    ds.sort_unstable();
    ds
}

/// `(scale, a, b)` with `p = scale·(n² − a)(n² − b)(n² − ab)`, `(a, b)` least with `a < b`.
fn match_quad_triple(p: &IntPoly) -> Option<(BigRational, BigInt, BigInt)> {
    if p.degree() != 6 {
        return None;
    }
    let c = p.dense_coeffs();
    if c.iter().skip(1).step_by(2).any(|x| !x.is_zero()) {
        return None;
    }
    let lead = c[6].clone();
    let cubic = IntPoly::from_coeffs(&[c[0].clone(), c[2].clone(), c[4].clone(), c[6].clone()]);
    let mut roots: Vec<BigInt> = Vec::new();
    let mut rest = cubic.clone();
    for r in rational_roots(&cubic) {
        if !r.is_integer() {
            return None;
        }
        // multiplicities
        loop {
            let lin = IntPoly::from_coeffs(&[-r.clone(), BigRational::one()]);
            let (q, rem) = rest.div_rem(&lin).ok()?;
            if !rem.is_zero() {
                break;
            }
            roots.push(r.to_integer());
            rest = q;
        }
    }
    if roots.len() != 3 {
        return None;
    }
    let mut best: Option<(BigInt, BigInt)> = None;
    for k in 0..3 {
        for (i, j) in [((k + 1) % 3, (k + 2) % 3), ((k + 2) % 3, (k + 1) % 3)] {
            let (x, y) = (&roots[i], &roots[j]);
            if x < y && x * y == roots[k] && !x.is_zero() && best.as_ref().is_none_or(|(bx, by)| (x, y) < (bx, by)) {
                best = Some((x.clone(), y.clone()));
            }
        }
    }
    best.map(|(a, b)| (lead, a, b))
}

fn qr_pattern(a: &BigInt, b: &BigInt) -> Option<(u64, u64)> {
    let (a1, a2) = (a.to_u64()?, b.to_u64()?);
    let ok = is_prime(a1) && is_prime(a2) && a1 % 4 == 1 && a2 % 4 == 1 && a1 != a2;
    (ok && sqrt_mod_prime(a1, a2).is_some()).then_some((a1, a2))
}

fn sextic(a: &BigInt, b: &BigInt) -> IntPoly {
    let shift = |c: BigInt| IntPoly::from_coeffs(&[BigRational::from_integer(-c), BigRational::zero(), BigRational::one()]);
    &(&shift(a.clone()) * &shift(b.clone())) * &shift(a * b)
}

fn quad_residue_certificate(p: &IntPoly, scale: BigRational, a1: u64, a2: u64, e_max: u32) -> Result<Option<Certificate>> {
    let f = sextic(&a1.into(), &a2.into());
    let mut local = Vec::new();
    for q in [2, a1, a2] {
        // the search stops at the first certified level, so a generous cap is cheap
        let mut e = e_max.max(QR_PRECISION);
        while checked_pow(q, e).is_err() {
            e -= 1;
        }
        match hensel_root(&f, q, e)? {
            o @ HenselOutcome::CertifiedRoot { .. } => local.push(entry_from(q, &o).expect("certified")),
            _ => return Ok(None),
        }
    }
    let odd: Vec<u64> = primes_up_to(LEGENDRE_TABLE_BOUND).into_iter().filter(|&q| q != 2).collect();
    let prod = (a1 * a2) as i64;
    let legendre_rows = odd
        .iter()
        .map(|&q| LegendreRow {
            prime: DecInt::from(q),
            a1: legendre(a1 as i64, q),
            a2: legendre(a2 as i64, q),
            product: legendre(prod, q),
        })
        .collect();
    Ok(Some(Certificate::new(
        std::slice::from_ref(p),
        Claim::Intersective {},
        Evidence::QuadResidueProof(QuadResidueProof {
            a1: DecInt::from(a1),
            a2: DecInt::from(a2),
            scale: DecRat(scale),
            sqrt_a1_mod_a2: DecInt::from(sqrt_mod_prime(a1, a2).expect("residue")),
            sqrt_a2_mod_a1: DecInt::from(sqrt_mod_prime(a2, a1).expect("reciprocity")),
            legendre_bound: DecInt::from(*odd.last().expect("nonempty")),
            legendre: legendre_rows,
            local,
        }),
    )))
}

fn exceptional_primes(tail: &TailFactor) -> Vec<u64> {
    let mut out = match tail {
        TailFactor::Linear { root } => factorize(root.0.denom().to_u64().unwrap_or(0)).into_iter().map(|(q, _)| q).collect(),
        TailFactor::QuadTriple { a, b } => {
            let mut v = vec![2];
            for c in [a, b] {
                v.extend(factorize(c.0.abs().to_u64().unwrap_or(0)).into_iter().map(|(q, _)| q));
            }
            v
        }
    };
    out.sort_unstable();
    out.dedup();
    out
}

fn not_intersective(p: &IntPoly, k: u64) -> (Verdict, Certificate) {
    let cert = counterexample_certificate(std::slice::from_ref(p), k).unwrap_or_else(|_| {
        // table too large: fall back to the bounded record of the failing modulus
        Certificate::new(
            std::slice::from_ref(p),
            Claim::NotIntersective { modulus: DecInt::from(k) },
            Evidence::BoundedOnly(BoundedOnly {
                bound: DecInt::from(0u64),
                witnesses: Vec::new(),
                local: Vec::new(),
            }),
        )
    });
    (Verdict::NotIntersective(k), cert)
}

/// Decides intersectivity of one polynomial with a certificate.
///
/// In order: an integer root; a failing prime power up to `prime_bound`; the
/// quadratic-residue sextic pattern; a factor covering all but finitely many
/// primes together with local roots at every prime up to the bound (raised to
/// cover the exceptional primes). Otherwise the verdict is `Unknown` and the
/// certificate records the bounded evidence.
pub fn intersective_decide_1var(p: &IntPoly, prime_bound: u64, e_max: u32, budget: u64) -> Result<(Verdict, Certificate)> {
    if p.nvars() != 1 {
        return Err(Error::NotUnivariate(p.nvars()));
    }
    if p.is_zero() {
        return Err(Error::EmptyFamily);
    }
    ensure_integral(std::slice::from_ref(p))?;
    let p = p.clone().without_domain();
    let fam = std::slice::from_ref(&p);
    let roots = rational_roots(&p);

    if let Some(r) = roots.iter().filter(|r| r.is_integer()).min_by_key(|r| (r.numer().abs(), r.numer().clone())) {
        let cert = Certificate::new(
            fam,
            Claim::Intersective {},
            Evidence::WitnessTable(WitnessTable { root: DecInt(r.to_integer()) }),
        );
        return Ok((Verdict::Intersective, cert));
    }

    let bound = prime_bound.max(2);
    if let JointVerdict::Counterexample { modulus, .. } = jointly_intersective_up_to(fam, bound, budget)? {
        return Ok(not_intersective(&p, modulus));
    }

    let triple = match_quad_triple(&p);
    if let Some((scale, a, b)) = &triple {
        if let Some((a1, a2)) = qr_pattern(a, b) {
            if let Some(cert) = quad_residue_certificate(&p, scale.clone(), a1, a2, e_max)? {
                return Ok((Verdict::Intersective, cert));
            }
        }
    }

    let tail = match (&triple, roots.first()) {
        (_, Some(r)) => Some(TailFactor::Linear { root: DecRat(r.clone()) }),
        (Some((_, a, b)), None) => Some(TailFactor::QuadTriple {
            a: DecInt(a.clone()),
            b: DecInt(b.clone()),
        }),
        _ => None,
    };
    let sweep_bound = tail
        .as_ref()
        .map(|t| exceptional_primes(t).last().copied().unwrap_or(2).max(bound))
        .unwrap_or(bound);
    let sweep = hensel_sweep(&p, sweep_bound, e_max)?;
    let d = p.denominator();
    for (q, o) in &sweep.results {
        if let HenselOutcome::NoRootUpTo { exponent } = o {
            let v = valuation(&d, *q).unwrap_or(0);
            if *exponent > v {
                return Ok(not_intersective(&p, q.pow(exponent - v)));
            }
        }
    }
    if let (Some(tail), Some(proofs)) = (tail, sweep.entries()) {
        let cert = Certificate::new(
            fam,
            Claim::Intersective {},
            Evidence::HenselProof(HenselPayload {
                prime_bound: DecInt::from(sweep.prime_bound),
                proofs,
                tail: Some(tail),
            }),
        );
        return Ok((Verdict::Intersective, cert));
    }

    Ok((Verdict::Unknown, bounded_certificate(&p, bound, e_max, budget)?))
}

/// Least witnesses for every prime power up to `bound`, plus local roots when
/// every prime up to `bound` is certified.
fn bounded_certificate(p: &IntPoly, bound: u64, e_max: u32, budget: u64) -> Result<Certificate> {
    let fam = ScaledFamily::new(std::slice::from_ref(p))?;
    let pps = prime_powers_up_to(bound);
    let top = pps.last().map(|x| x.0).unwrap_or(2);
    let mut witnesses = Vec::with_capacity(pps.len());
    for &(k, _, _) in &pps {
        let period = search_modulus(k, &fam.scale);
        let mut b = budget;
        let w = least_residue(&fam, period, k * fam.scale.to_u64().unwrap_or(1), &mut b)?
            .ok_or_else(|| Error::Internal(format!("no residue modulo {k} after a passing scan")))?;
        witnesses.push(BoundedWitness {
            modulus: DecInt::from(k),
            residue: w.into_iter().map(DecInt::from).collect(),
        });
    }
    let sweep = hensel_sweep(p, top, e_max)?;
    let local = if sweep.prime_bound == *primes_up_to(top).last().expect("top >= 2") {
        sweep.entries().unwrap_or_default()
    } else {
        Vec::new()
    };
    Ok(Certificate::new(
        std::slice::from_ref(p),
        Claim::SolvableUpTo { bound: DecInt::from(top) },
        Evidence::BoundedOnly(BoundedOnly {
            bound: DecInt::from(top),
            witnesses,
            local,
        }),
    ))
}

/// Output of [`reduce_joint_to_gcd`].
#[derive(Clone, Debug)]
pub struct GcdReduction {
    /// Primitive integer GCD `g` with `Σ h_i·p_i = D·g`.
    pub bezout: BezoutData,
    pub quotients: Vec<IntPoly>,
    pub gcd_verdict: Verdict,
    /// Consequence for the family: `g` intersective gives joint intersectivity;
    /// `g` failing modulo `k` makes the family fail modulo `D·k`.
    pub family_verdict: Verdict,
    pub certificate: Certificate,
}

/// Reduces joint intersectivity of a one-variable family to intersectivity of its GCD.
pub fn reduce_joint_to_gcd(family: &[IntPoly], prime_bound: u64, e_max: u32, budget: u64) -> Result<GcdReduction> {
    ensure_integral(family)?;
    let family: Vec<IntPoly> = family.iter().map(|p| p.clone().without_domain()).collect();
    let bezout = gcd_bezout_primitive(&family)?;
    let g = bezout.gcd.clone();
    let quotients = family
        .iter()
        .map(|p| {
            let (q, r) = p.div_rem(&g)?;
            if !r.is_zero() {
                return Err(Error::Internal("gcd does not divide a member".into()));
            }
            Ok(q)
        })
        .collect::<Result<Vec<_>>>()?;
    let (gcd_verdict, nested) = intersective_decide_1var(&g, prime_bound, e_max, budget)?;
    let d = &bezout.scale;
    let (family_verdict, claim) = match &gcd_verdict {
        Verdict::Intersective => (Verdict::Intersective, Claim::Intersective {}),
        Verdict::NotIntersective(k) => {
            let dk = d * BigInt::from(*k);
            let v = dk.to_u64().map(Verdict::NotIntersective).unwrap_or(Verdict::Unknown);
            (v, Claim::NotIntersective { modulus: DecInt(dk) })
        }
        Verdict::Unknown => (Verdict::Unknown, Claim::ReducesToGcd {}),
    };
    let vars = default_vars(1);
    let certificate = Certificate::new(
        &family,
        claim,
        Evidence::BezoutReduction(Box::new(BezoutReduction {
            gcd: g.render(&vars),
            scale: DecInt(d.clone()),
            cofactors: bezout.cofactors.iter().map(|h| h.render(&vars)).collect(),
            quotients: quotients.iter().map(|q| q.render(&vars)).collect(),
            nested,
        })),
    );
    Ok(GcdReduction {
        bezout,
        quotients,
        gcd_verdict,
        family_verdict,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::verify;
    use crate::intersect::DEFAULT_BUDGET;
    use crate::poly::parse_poly;

    fn p(s: &str) -> IntPoly {
        parse_poly(s, &["n"]).unwrap()
    }

    fn decide(s: &str) -> (Verdict, Certificate) {
        let out = intersective_decide_1var(&p(s), 200, 6, DEFAULT_BUDGET).unwrap();
        verify(&out.1).unwrap_or_else(|e| panic!("{s}: {e}\n{}", out.1.to_json()));
        out
    }

    #[test]
    fn rational_roots_ordering() {
        let r = rational_roots(&p("(2*n-1)*(n+3)*(n-3)*n"));
        let s: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, vec!["0", "-3", "3", "1/2"]);
    }

    #[test]
    fn verdicts_with_certificates() {
        let (v, c) = decide("n-7");
        assert_eq!(v, Verdict::Intersective);
        assert_eq!(c.evidence.kind(), "WitnessTable");

        assert_eq!(decide("n^2+1").0, Verdict::NotIntersective(3));

        let (v, c) = decide("(n^2-5)*(n^2-41)*(n^2-205)");
        assert_eq!(v, Verdict::Intersective);
        assert_eq!(c.evidence.kind(), "QuadResidueProof");

        let (v, c) = decide("(n^3-19)*(n^2+n+1)");
        assert_eq!(v, Verdict::Unknown);
        assert_eq!(c.evidence.kind(), "BoundedOnly");
    }

    #[test]
    fn rational_root_tail() {
        // 3n - 1 has a root in every ℤ_q with q ≠ 3; n^2 - 7 supplies a 3-adic root
        let (v, c) = decide("(3*n-1)*(n^2-7)");
        assert_eq!(v, Verdict::Intersective);
        assert_eq!(c.evidence.kind(), "HenselProof");
    }

    #[test]
    fn gcd_reduction_of_the_pair() {
        let fam = vec![p("n*(n+1)*(2*n+1)"), p("(n^3+n^2+2)*(2*n+1)")];
        let r = reduce_joint_to_gcd(&fam, 100, 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.bezout.gcd, p("2*n+1"));
        assert_eq!(r.gcd_verdict, Verdict::NotIntersective(2));
        assert!(matches!(r.family_verdict, Verdict::NotIntersective(_)));
        verify(&r.certificate).unwrap();

        let r = reduce_joint_to_gcd(&[p("n^2"), p("n^3"), p("n^2+n^3")], 100, 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.bezout.gcd, p("n^2"));
        assert_eq!(r.family_verdict, Verdict::Intersective);
        verify(&r.certificate).unwrap();

        let r = reduce_joint_to_gcd(&[p("n"), p("n-1")], 100, 6, DEFAULT_BUDGET).unwrap();
        assert!(r.bezout.gcd.is_constant());
        assert!(matches!(r.family_verdict, Verdict::NotIntersective(_)));
        verify(&r.certificate).unwrap();
    }
}
