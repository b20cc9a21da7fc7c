//! Elementary integer arithmetic: primality, factorization, CRT, Legendre
//! symbols and valuations. Moduli handled here are desk scale and fit in `u64`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_big(n: &BigInt) -> bool {
    match u64::try_from(n) {
        Ok(v) => is_prime(v),
        Err(_) => false,
    }
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| p.then_some(i as u64))
        .collect()
}

/// All prime powers `q^e <= bound` (e >= 1), ascending.
pub fn prime_powers_up_to(bound: u64) -> Vec<(u64, u64, u32)> {
    let mut out = Vec::new();
    for q in primes_up_to(bound) {
        let mut pe = q;
        let mut e = 1;
        loop {
            out.push((pe, q, e));
            match pe.checked_mul(q) {
                Some(next) if next <= bound => {
                    pe = next;
                    e += 1;
                }
                _ => break,
            }
        }
    }
    out.sort_unstable();
    out
}

/// Trial-division factorization into `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime factors of a nonzero big integer, provided its absolute value fits in `u64`.
pub fn prime_factors_big(n: &BigInt) -> Option<Vec<u64>> {
    let v = u64::try_from(n.abs()).ok()?;
    Some(factorize(v).into_iter().map(|(p, _)| p).collect())
}

/// q-adic valuation; `None` for zero.
pub fn valuation(n: &BigInt, q: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let q = BigInt::from(q);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quot, rem) = n.div_rem(&q);
        if !rem.is_zero() {
            return Some(v);
        }
        n = quot;
        v += 1;
    }
}

/// Inverse of `a` modulo `m` when it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Chinese remaindering of `x ≡ r_i (mod m_i)` for pairwise coprime moduli.
pub fn crt(pairs: &[(u64, u64)]) -> Option<(u64, u64)> {
    let mut r = 0u128;
    let mut m = 1u128;
    for &(ri, mi) in pairs {
        let mi128 = mi as u128;
        let inv = inv_mod((m % mi128) as u64, mi)? as u128;
        // r + m * t ≡ ri (mod mi)
        let diff = ((ri as u128 % mi128) + mi128 - (r % mi128)) % mi128;
        let t = diff * inv % mi128;
        r += m * t;
        m = m.checked_mul(mi128)?;
        r %= m;
    }
    let m = u64::try_from(m).ok()?;
    Some((r as u64, m))
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Legendre symbol for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i8 {
    jacobi(a, p)
}

/// Square root modulo an odd prime (Tonelli-Shanks); `None` for non-residues.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}

pub fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

pub fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    a.lcm(b)
}

/// Nonnegative residue of a big integer modulo `m`.
pub fn big_mod_u64(n: &BigInt, m: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(m));
    u64::try_from(&r).expect("residue fits in u64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(2000);
        for n in 0..2000u64 {
            assert_eq!(is_prime(n), sieve.binary_search(&n).is_ok(), "n = {n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    #[test]
    fn prime_powers_are_sorted_and_complete() {
        let pp = prime_powers_up_to(30);
        let ks: Vec<u64> = pp.iter().map(|x| x.0).collect();
        assert_eq!(ks, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]);
    }

    #[test]
    fn crt_recombines() {
        let (r, m) = crt(&[(2, 3), (3, 5), (2, 7)]).unwrap();
        assert_eq!(m, 105);
        assert_eq!(r, 23);
        assert!(crt(&[(1, 4), (1, 6)]).is_none());
    }

    #[test]
    fn legendre_against_squares() {
        for p in [3u64, 5, 7, 11, 13, 41] {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 1..p {
                let expected = if squares.contains(&a) { 1 } else { -1 };
                assert_eq!(legendre(a as i64, p), expected);
            }
        }
        assert_eq!(legendre(5, 41), 1);
    }

    #[test]
    fn tonelli_shanks() {
        assert_eq!(sqrt_mod_prime(5, 41), Some(13));
        assert_eq!(sqrt_mod_prime(5, 11), Some(4));
        assert_eq!(sqrt_mod_prime(2, 3), None);
        for p in [17u64, 97, 193, 257] {
            for a in 1..p {
                if let Some(s) = sqrt_mod_prime(a, p) {
                    assert_eq!(s * s % p, a);
                }
            }
        }
    }

    #[test]
    fn valuation_counts() {
        assert_eq!(valuation(&BigInt::from(-54), 3), Some(3));
        assert_eq!(valuation(&BigInt::from(7), 3), Some(0));
        assert_eq!(valuation(&BigInt::zero(), 3), None);
    }
}
