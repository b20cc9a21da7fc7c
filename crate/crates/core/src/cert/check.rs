//! Standalone certificate checker.
//!
//! Uses only exact polynomial evaluation and modular arithmetic. No search
//! from the producing side is called; canonicality checks scan only below the
//! value the certificate names.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::*;
use crate::arith::{factorize, is_prime, pow_mod, prime_powers_up_to, primes_up_to};
use crate::poly::{denominator_scale, parse_poly};

/// Work cap for canonicality scans and residue tables.
const SCAN_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate rejected: {0}")]
pub struct CertError(pub String);

type Check<T = ()> = std::result::Result<T, CertError>;

fn fail<T>(msg: impl Into<String>) -> Check<T> {
    Err(CertError(msg.into()))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        fail(msg)
    }
}

/// Accepts the certificate iff its evidence proves its claim about its family.
pub fn verify(cert: &Certificate) -> Check {
    ensure(cert.seal == cert.expected_seal(), "seal does not match the certificate content")?;
    let vars: Vec<&str> = cert.vars.iter().map(String::as_str).collect();
    ensure(!vars.is_empty(), "no variables declared")?;
    ensure(!cert.family.is_empty(), "empty family")?;
    let family = cert
        .family
        .iter()
        .map(|s| canonical_poly(s, &vars))
        .collect::<Check<Vec<_>>>()?;
    for p in &family {
        ensure(!p.is_zero(), "zero polynomial in family")?;
        ensure(p.is_integral(), format!("'{}' is not integer-valued", p.render(&vars)))?;
    }
    match &cert.evidence {
        Evidence::WitnessTable(w) => check_witness_table(&family, w, &cert.claim),
        Evidence::HenselProof(h) => check_hensel_payload(&family, h, &cert.claim),
        Evidence::QuadResidueProof(q) => check_quad_residue(&family, q, &cert.claim),
        Evidence::BezoutReduction(b) => check_bezout(&family, &vars, b, &cert.claim, &cert.vars),
        Evidence::CounterexampleModulus(c) => check_counterexample(&family, c, &cert.claim),
        Evidence::BoundedOnly(b) => check_bounded(&family, b, &cert.claim),
    }
}

fn canonical_poly(s: &str, vars: &[&str]) -> Check<IntPoly> {
    let p = parse_poly(s, vars).map_err(|e| CertError(format!("polynomial '{s}': {e}")))?;
    ensure(p.render(vars) == s, format!("polynomial '{s}' is not in canonical rendering"))?;
    Ok(p)
}

fn univariate_single(family: &[IntPoly]) -> Check<&IntPoly> {
    ensure(family.len() == 1, "evidence applies to a single polynomial")?;
    ensure(family[0].nvars() == 1, "evidence applies to one variable")?;
    Ok(&family[0])
}

fn small(v: &DecInt, what: &str) -> Check<u64> {
    v.0.to_u64().ok_or_else(|| CertError(format!("{what} {} out of range", v.0)))
}

fn int_scaled(p: &IntPoly) -> IntPoly {
    p.scale_int(&p.denominator())
}

fn eval_int(p: &IntPoly, x: &BigInt) -> BigRational {
    p.eval(std::slice::from_ref(x)).expect("one variable")
}

fn big_valuation(n: &BigInt, q: &BigInt) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let mut n = n.clone();
    let mut v = 0;
    while (&n % q).is_zero() {
        n /= q;
        v += 1;
    }
    Some(v)
}

/// Whether `b` certifies a q-adic root of the integer polynomial `big_p` at precision `t`.
fn hensel_ok(big_p: &IntPoly, dp: &IntPoly, q: &BigInt, t: u32, b: &BigInt) -> bool {
    let modulus = num_traits::pow(q.clone(), 2 * t as usize + 1);
    let val = eval_int(big_p, b).to_integer();
    if !(&val % &modulus).is_zero() {
        return false;
    }
    matches!(big_valuation(&eval_int(dp, b).to_integer(), q), Some(v) if v <= t)
}

/// Validity plus canonicality of one local root of `big_p` (integer coefficients).
fn check_hensel_entry(big_p: &IntPoly, e: &HenselEntry) -> Check {
    let q64 = small(&e.prime, "prime")?;
    ensure(is_prime(q64), format!("{q64} is not prime"))?;
    let q = BigInt::from(q64);
    let dp = big_p.derivative(0);
    let modulus = num_traits::pow(q.clone(), 2 * e.t as usize + 1);
    ensure(
        !e.root.0.is_negative() && e.root.0 < modulus,
        format!("root {} not reduced modulo {q}^{}", e.root.0, 2 * e.t + 1),
    )?;
    ensure(
        (&eval_int(big_p, &e.root.0).to_integer() % &modulus).is_zero(),
        format!("P({}) is not divisible by {q}^{}", e.root.0, 2 * e.t + 1),
    )?;
    ensure(
        big_valuation(&eval_int(&dp, &e.root.0).to_integer(), &q) == Some(e.t),
        format!("derivative valuation at {} is not exactly {}", e.root.0, e.t),
    )?;
    // least precision first, then least residue at that precision
    let mut work = 0u64;
    for t in 0..=e.t {
        let range = num_traits::pow(q.clone(), 2 * t as usize + 1);
        let limit = if t == e.t { e.root.0.clone() } else { range };
        work += limit.to_u64().unwrap_or(u64::MAX);
        ensure(work <= SCAN_CAP, "local root too large to check canonicality")?;
        let mut b = BigInt::zero();
        while b < limit {
            ensure(
                !hensel_ok(big_p, &dp, &q, t, &b),
                format!("non-canonical local root at {q}: {b} certifies at precision {t}"),
            )?;
            b += 1;
        }
    }
    Ok(())
}

fn check_prime_cover(entries: &[HenselEntry], bound: &DecInt, big_p: &IntPoly) -> Check {
    let b = small(bound, "prime bound")?;
    ensure(b <= SCAN_CAP, "prime bound too large")?;
    let primes = primes_up_to(b);
    ensure(primes.last() == Some(&b), format!("prime bound {b} is not the largest listed prime"))?;
    ensure(entries.len() == primes.len(), "local roots do not cover every prime up to the bound")?;
    for (e, &q) in entries.iter().zip(&primes) {
        ensure(e.prime.0 == BigInt::from(q), format!("expected an entry for {q}, found {}", e.prime.0))?;
        check_hensel_entry(big_p, e)?;
    }
    Ok(())
}

fn check_witness_table(family: &[IntPoly], w: &WitnessTable, claim: &Claim) -> Check {
    ensure(*claim == Claim::Intersective {}, "witness table proves intersectivity only")?;
    ensure(family.iter().all(|p| p.nvars() == 1), "witness table applies to one variable")?;
    let root = &w.root.0;
    let all_vanish = |x: &BigInt| family.iter().all(|p| eval_int(p, x).is_zero());
    ensure(all_vanish(root), format!("{root} is not a common root"))?;
    let mag = root.abs().to_u64().filter(|&m| m <= SCAN_CAP / 2);
    let mag = mag.ok_or_else(|| CertError("root too large to check canonicality".into()))?;
    for a in 0..=mag {
        for cand in [-(a as i64), a as i64] {
            let c = BigInt::from(cand);
            if (a, cand) >= (mag, root.to_i64().unwrap()) {
                continue;
            }
            ensure(!all_vanish(&c), format!("non-canonical root: {c} precedes {root}"))?;
        }
    }
    Ok(())
}

fn sextic(a: &BigInt, b: &BigInt) -> IntPoly {
    let sq = parse_poly("n^2", &["n"]).expect("literal");
    let shift = |c: &BigInt| &sq - &IntPoly::constant(1, BigRational::from_integer(c.clone()));
    &(&shift(a) * &shift(b)) * &shift(&(a * b))
}

fn cauchy_bound(p: &IntPoly) -> BigInt {
    let lead = p.leading_coeff().abs();
    let max = p
        .terms()
        .map(|(_, c)| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    (max + BigRational::one()).ceil().to_integer()
}

fn check_tail(p: &IntPoly, tail: &TailFactor) -> Check<Vec<u64>> {
    match tail {
        TailFactor::Linear { root } => {
            let r = &root.0;
            ensure(p.eval_rational(std::slice::from_ref(r)).map(|v| v.is_zero()).unwrap_or(false), "tail root does not vanish")?;
            let w = r.denom().to_u64().ok_or_else(|| CertError("tail denominator too large".into()))?;
            let u = r.numer().clone();
            // least rational root by (denominator, |numerator|, numerator)
            let bound = cauchy_bound(p).to_u64().unwrap_or(u64::MAX);
            ensure(w.saturating_mul(w).saturating_mul(bound.saturating_mul(2) + 1) <= SCAN_CAP, "tail root too large to check canonicality")?;
            for w2 in 1..=w {
                let lim = if w2 == w { u.abs().to_u64().unwrap_or(0) } else { bound * w2 };
                for a in 0..=lim {
                    for cand in [-(a as i64), a as i64] {
                        if w2 == w && (a, cand) >= (u.abs().to_u64().unwrap(), u.to_i64().unwrap_or(i64::MAX)) {
                            continue;
                        }
                        let c = BigRational::new(cand.into(), w2.into());
                        if c.denom() != &BigInt::from(w2) {
                            continue;
                        }
                        ensure(
                            !p.eval_rational(std::slice::from_ref(&c)).map(|v| v.is_zero()).unwrap_or(false),
                            format!("non-canonical tail root: {c} precedes {r}"),
                        )?;
                    }
                }
            }
            Ok(factorize(w).into_iter().map(|(q, _)| q).collect())
        }
        TailFactor::QuadTriple { a, b } => {
            let (a, b) = (&a.0, &b.0);
            ensure(!a.is_zero() && !b.is_zero(), "zero parameter in quadratic triple")?;
            let f = sextic(a, b);
            let (_, rem) = p.div_rem(&f).map_err(|e| CertError(e.to_string()))?;
            ensure(rem.is_zero(), "quadratic triple does not divide the polynomial")?;
            // least ordered pair (x, y), x < y, with {x, y, xy} = {a, b, ab}
            let triple = [a.clone(), b.clone(), a * b];
            let mut best: Option<(BigInt, BigInt)> = None;
            for i in 0..3 {
                for j in 0..3 {
                    let k = 3 - i - j;
                    if i == j || k > 2 || k == i || k == j {
                        continue;
                    }
                    let (x, y) = (&triple[i], &triple[j]);
                    if x < y && (x * y) == triple[k] && best.as_ref().is_none_or(|(bx, by)| (x, y) < (bx, by)) {
                        best = Some((x.clone(), y.clone()));
                    }
                }
            }
            ensure(best == Some((a.clone(), b.clone())), "quadratic triple parameters are not canonical")?;
            let mut bad = vec![2u64];
            for c in [a, b] {
                let c = c.abs().to_u64().ok_or_else(|| CertError("triple parameter too large".into()))?;
                bad.extend(factorize(c).into_iter().map(|(q, _)| q));
            }
            bad.sort_unstable();
            bad.dedup();
            Ok(bad)
        }
    }
}

fn check_hensel_payload(family: &[IntPoly], h: &HenselPayload, claim: &Claim) -> Check {
    let p = univariate_single(family)?;
    let big_p = int_scaled(p);
    check_prime_cover(&h.proofs, &h.prime_bound, &big_p)?;
    match &h.tail {
        None => ensure(
            *claim == Claim::LocalRootsUpTo { prime_bound: h.prime_bound.clone() },
            "claim does not match the local-root payload",
        ),
        Some(tail) => {
            ensure(*claim == Claim::Intersective {}, "a tail factor proves intersectivity")?;
            let exceptional = check_tail(p, tail)?;
            let bound = small(&h.prime_bound, "prime bound")?;
            ensure(
                exceptional.iter().all(|&q| q <= bound),
                "some exceptional prime of the tail factor is not covered",
            )
        }
    }
}

fn euler_symbol(a: &BigInt, q: u64) -> i8 {
    let r = u64::try_from(a.mod_floor(&BigInt::from(q))).expect("reduced");
    match pow_mod(r, (q - 1) / 2, q) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

fn check_quad_residue(family: &[IntPoly], qr: &QuadResidueProof, claim: &Claim) -> Check {
    ensure(*claim == Claim::Intersective {}, "quadratic residue proof proves intersectivity only")?;
    let p = univariate_single(family)?;
    let a1 = small(&qr.a1, "a1")?;
    let a2 = small(&qr.a2, "a2")?;
    ensure(a1 < a2, "a1 must be smaller than a2")?;
    ensure(is_prime(a1) && is_prime(a2), "a1 and a2 must be prime")?;
    ensure(a1 % 4 == 1 && a2 % 4 == 1, "a1 and a2 must be 1 mod 4")?;
    ensure(!qr.scale.0.is_zero(), "zero scale")?;
    let f = sextic(&qr.a1.0, &qr.a2.0);
    ensure(*p == f.scale(&qr.scale.0), "polynomial is not the stated multiple of the sextic")?;
    for (s, a, m) in [(&qr.sqrt_a1_mod_a2, a1, a2), (&qr.sqrt_a2_mod_a1, a2, a1)] {
        let s = small(s, "square root")?;
        ensure(s > 0 && 2 * s < m, format!("square root {s} of {a} is not the least one modulo {m}"))?;
        ensure(
            (s as u128 * s as u128) % m as u128 == (a % m) as u128,
            format!("{s}^2 is not {a} modulo {m}"),
        )?;
    }
    let lb = small(&qr.legendre_bound, "Legendre bound")?;
    ensure((3..=SCAN_CAP).contains(&lb), "Legendre bound out of range")?;
    let odd: Vec<u64> = primes_up_to(lb).into_iter().filter(|&q| q != 2).collect();
    ensure(odd.last() == Some(&lb), "Legendre bound is not the largest listed prime")?;
    ensure(qr.legendre.len() == odd.len(), "Legendre table is incomplete")?;
    let prod = &qr.a1.0 * &qr.a2.0;
    for (row, &q) in qr.legendre.iter().zip(&odd) {
        ensure(row.prime.0 == BigInt::from(q), format!("Legendre row for {q} missing"))?;
        let expect = (euler_symbol(&qr.a1.0, q), euler_symbol(&qr.a2.0, q), euler_symbol(&prod, q));
        ensure(
            (row.a1, row.a2, row.product) == expect,
            format!("Legendre symbols at {q} are wrong"),
        )?;
        if q != a1 && q != a2 {
            ensure(
                row.a1.max(row.a2).max(row.product) == 1,
                format!("no residue among a1, a2, a1·a2 modulo {q}"),
            )?;
        }
    }
    ensure(qr.local.len() == 3, "local roots needed at 2, a1 and a2")?;
    for (e, q) in qr.local.iter().zip([2, a1, a2]) {
        ensure(e.prime.0 == BigInt::from(q), format!("local root at {q} missing"))?;
        check_hensel_entry(&f, e)?;
    }
    Ok(())
}

fn check_bezout(family: &[IntPoly], vars: &[&str], b: &BezoutReduction, claim: &Claim, cert_vars: &[String]) -> Check {
    ensure(family.iter().all(|p| p.nvars() == 1), "Bezout reduction applies to one variable")?;
    let g = canonical_poly(&b.gcd, vars)?;
    ensure(!g.is_zero() && g.has_integer_coefficients(), "gcd must be a nonzero integer polynomial")?;
    ensure(g == g.primitive(), "gcd is not primitive")?;
    ensure(b.scale.0.is_positive(), "Bezout scale must be positive")?;
    ensure(
        b.cofactors.len() == family.len() && b.quotients.len() == family.len(),
        "one cofactor and one quotient per member",
    )?;
    let mut acc = IntPoly::zero(1);
    for ((h, q), p) in b.cofactors.iter().zip(&b.quotients).zip(family) {
        let h = canonical_poly(h, vars)?;
        let q = canonical_poly(q, vars)?;
        ensure(h.has_integer_coefficients(), "cofactors must have integer coefficients")?;
        ensure(&(&g * &q) == p, "member is not gcd times its quotient")?;
        acc = &acc + &(&h * p);
    }
    ensure(acc == g.scale_int(&b.scale.0), "Bezout identity fails")?;
    let nested = &b.nested;
    ensure(nested.vars == cert_vars, "nested certificate uses different variables")?;
    ensure(nested.family == [b.gcd.clone()], "nested certificate is not about the gcd")?;
    verify(nested)?;
    let expected = match &nested.claim {
        Claim::Intersective {} => Claim::Intersective {},
        Claim::NotIntersective { modulus } => Claim::NotIntersective {
            modulus: DecInt(&modulus.0 * &b.scale.0),
        },
        _ => Claim::ReducesToGcd {},
    };
    ensure(*claim == expected, "claim does not follow from the nested verdict")
}

fn search_modulus(k: u64, d: &BigInt) -> Check<u64> {
    let mut m = 1u64;
    for (q, e) in factorize(k) {
        let mut v = 0u32;
        let mut dd = d.clone();
        while (&dd % q).is_zero() {
            dd /= q;
            v += 1;
        }
        let part = q.checked_pow(e + v).ok_or_else(|| CertError("search modulus overflows".into()))?;
        m = m.checked_mul(part).ok_or_else(|| CertError("search modulus overflows".into()))?;
    }
    Ok(m)
}

fn residues(modulus: u64, m: usize) -> impl Iterator<Item = Vec<BigInt>> {
    let total = modulus.pow(m as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![BigInt::zero(); m];
        for slot in v.iter_mut().rev() {
            *slot = BigInt::from(idx % modulus);
            idx /= modulus;
        }
        v
    })
}

fn divisible(p: &IntPoly, x: &[BigInt], k: &BigInt) -> bool {
    let v = p.eval(x).expect("dimension checked").to_integer();
    (v % k).is_zero()
}

fn check_counterexample(family: &[IntPoly], c: &CounterexampleTable, claim: &Claim) -> Check {
    ensure(
        *claim == Claim::NotIntersective { modulus: c.modulus.clone() },
        "claim does not match the counterexample modulus",
    )?;
    let k = small(&c.modulus, "modulus")?;
    ensure(k >= 2, "counterexample modulus must be at least 2")?;
    let d = denominator_scale(family);
    let m = family[0].nvars();
    ensure(family.iter().all(|p| p.nvars() == m), "members use different variable counts")?;
    let period = search_modulus(k, &d)?;
    ensure(small(&c.search_modulus, "search modulus")? == period, "search modulus is not canonical")?;
    let total = period.checked_pow(m as u32).filter(|&t| t <= SCAN_CAP);
    let total = total.ok_or_else(|| CertError("residue table too large".into()))?;
    ensure(c.table.len() as u64 == total, "table does not cover every residue")?;
    let kb = BigInt::from(k);
    for (x, &idx) in residues(period, m).zip(&c.table) {
        let idx = idx as usize;
        ensure(idx < family.len(), "table names a missing member")?;
        ensure(!divisible(&family[idx], &x, &kb), format!("member {idx} is divisible by {k} at {x:?}"))?;
        ensure(
            family[..idx].iter().all(|p| divisible(p, &x, &kb)),
            format!("table entry at {x:?} is not the least failing member"),
        )?;
    }
    Ok(())
}

fn check_bounded(family: &[IntPoly], b: &BoundedOnly, claim: &Claim) -> Check {
    ensure(*claim == Claim::SolvableUpTo { bound: b.bound.clone() }, "claim does not match the bound")?;
    let bound = small(&b.bound, "bound")?;
    ensure((2..=SCAN_CAP).contains(&bound), "bound out of range")?;
    let pps = prime_powers_up_to(bound);
    ensure(pps.last().map(|x| x.0) == Some(bound), "bound is not the largest listed prime power")?;
    ensure(b.witnesses.len() == pps.len(), "a witness is needed for every prime power up to the bound")?;
    let m = family[0].nvars();
    ensure(family.iter().all(|p| p.nvars() == m), "members use different variable counts")?;
    let d = denominator_scale(family);
    let mut work = 0u64;
    for (w, &(k, _, _)) in b.witnesses.iter().zip(&pps) {
        ensure(w.modulus.0 == BigInt::from(k), format!("expected a witness modulo {k}"))?;
        ensure(w.residue.len() == m, "witness has the wrong length")?;
        let period = search_modulus(k, &d)?;
        let x: Vec<BigInt> = w.residue.iter().map(|r| r.0.clone()).collect();
        ensure(
            x.iter().all(|v| !v.is_negative() && *v < BigInt::from(period)),
            format!("witness modulo {k} is not reduced"),
        )?;
        let kb = BigInt::from(k);
        ensure(family.iter().all(|p| divisible(p, &x, &kb)), format!("witness fails modulo {k}"))?;
        // no lexicographically smaller residue works
        for y in residues(period, m) {
            if y >= x {
                break;
            }
            work += 1;
            ensure(work <= SCAN_CAP, "witnesses too large to check canonicality")?;
            ensure(
                !family.iter().all(|p| divisible(p, &y, &kb)),
                format!("witness modulo {k} is not the least"),
            )?;
        }
    }
    if !b.local.is_empty() {
        let p = univariate_single(family)?;
        let last_prime = primes_up_to(bound).last().copied().expect("bound >= 2");
        check_prime_cover(&b.local, &DecInt::from(last_prime), &int_scaled(p))?;
    }
    Ok(())
}
