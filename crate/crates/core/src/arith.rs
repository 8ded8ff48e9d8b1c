//! Machine-word number theory: modular products and powers, trial-division
//! factorization, Euler's totient and multiplicative orders.
//!
//! Every modulus handled here is at most `u64::MAX`; products go through
//! `u128`, so nothing overflows.

use alloc::vec::Vec;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m`, with `x^0 = 1 mod m` (so everything is 0 mod 1).
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
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

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Prime factorization by trial division as `(prime, exponent)` pairs in
/// increasing prime order. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        push(d, &mut n);
        push(d + 2, &mut n);
        d += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let f = factorize(n);
    f.len() == 1 && f[0].1 == 1
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn totient(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// The chain `m, φ(m), φ(φ(m)), …` down to and including 1.
pub fn totient_chain(m: u64) -> Vec<u64> {
    let mut chain = alloc::vec![m];
    let mut cur = m;
    while cur > 1 {
        cur = totient(cur);
        chain.push(cur);
    }
    chain
}

/// Multiplicative order of `a` modulo `m`, or `None` when `gcd(a, m) != 1`.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(a % m, m) != 1 {
        return None;
    }
    // The order divides φ(m): strip prime factors while the power stays 1.
    let phi = totient(m);
    let mut ord = phi;
    for (p, _) in factorize(phi) {
        while ord % p == 0 && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    Some(ord)
}

/// `p^e` if it fits in a `u64`.
pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// Exponent of `p` in `n` (`n > 0`).
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Smallest `e` with `p^e >= n`.
pub fn ceil_log(n: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut acc: u128 = 1;
    while acc < n as u128 {
        acc *= p as u128;
        e += 1;
    }
    e
}

/// Exponent of `p` in `k!` (Legendre's formula).
pub fn factorial_valuation(k: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut q = k;
    while q > 0 {
        q /= p;
        v += q;
    }
    v
}
