//! Small integer arithmetic helpers: primality, factorization, Euler phi.
//!
//! Everything here is exact `u64`/`u128` arithmetic; these routines back the
//! prime bookkeeping done by the bound pipeline and the classical-group
//! order formulas.

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin, valid for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This base set is known to be exact for the full u64 range.
    'base: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

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

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// The first `count` primes, ascending.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 2u64;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n += 1;
    }
    out
}

/// Trial-division factorization, `prime -> exponent` in ascending prime order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
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

pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factor(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// Least `d >= 1` with `ell^d = 1 (mod n)`. Requires `gcd(ell, n) = 1`.
pub fn multiplicative_order(ell: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if gcd(ell % n.max(1), n) != 1 && n > 1 {
        return Err(Error::NotCoprime(ell, n));
    }
    if n == 1 {
        return Ok(1);
    }
    // Order divides phi(n); strip primes off phi until minimal.
    let phi = euler_phi(n);
    let mut order = phi;
    for (p, _) in factor(phi) {
        while order % p == 0 && pow_mod(ell, order / p, n) == 1 {
            order /= p;
        }
    }
    debug_assert_eq!(pow_mod(ell, order, n), 1);
    Ok(order)
}

/// True iff -1 lies in the cyclic subgroup generated by `ell` mod `n` (n > 2).
pub fn minus_one_in_cyclic(ell: u64, n: u64) -> Result<bool> {
    let d = multiplicative_order(ell, n)?;
    if n <= 2 {
        return Ok(true);
    }
    if d % 2 != 0 {
        return Ok(false);
    }
    Ok(pow_mod(ell, d / 2, n) == n - 1)
}

pub fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::InvalidInput(format!("{base}^{exp} overflows u64")))
}
