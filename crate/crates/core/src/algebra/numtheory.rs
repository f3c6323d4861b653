//! 64-bit modular arithmetic, primality, factoring of `p - 1`, and the
//! multiplicative order of 2.

use crate::{Error, Result};

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

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Modular inverse of `a` mod `m` (extended Euclid); `None` if not coprime.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for the whole 64-bit range.
pub fn is_prime_u64(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
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

/// Brent's variant of Pollard rho; returns a nontrivial factor of the odd
/// composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let f = |x: u64, c: u64| (mul_mod(x, x, n) + c) % n;
    for c in 1.. {
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys, c);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Prime factorization as sorted `(prime, exponent)` pairs: trial division
/// to 10^4, then Pollard rho. `factor_u64(1)` is empty.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |q: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|(p, _)| *p == q) {
        Some(e) => e.1 += 1,
        None => out.push((q, 1)),
    };
    if n == 0 {
        return out;
    }
    while n.is_multiple_of(2) {
        push(2, &mut out);
        n /= 2;
    }
    let mut q = 3u64;
    while q <= 10_000 && q * q <= n {
        while n.is_multiple_of(q) {
            push(q, &mut out);
            n /= q;
        }
        q += 2;
    }
    let mut stack = vec![];
    if n > 1 {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push(m, &mut out);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

/// Order of `a` in the multiplicative group mod `n`, given the factored
/// group exponent `order` (any multiple of the true order).
fn order_from_multiple(a: u64, n: u64, mut order: u64, factors: &[(u64, u32)]) -> u64 {
    for &(q, _) in factors {
        while order.is_multiple_of(q) && pow_mod(a, order / q, n) == 1 {
            order /= q;
        }
    }
    order
}

/// Multiplicative order of 2 modulo the odd integer `p >= 3`.
///
/// For prime `p` the group order `p - 1` is factored and prime factors are
/// stripped; for composite `p` Euler's totient is used instead.
pub fn ord2(p: u64) -> Result<u64> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::usage(format!(
            "ord2 needs an odd modulus >= 3, got {p}"
        )));
    }
    let group = if is_prime_u64(p) {
        p - 1
    } else {
        factor_u64(p)
            .iter()
            .map(|&(q, e)| (q - 1) * q.pow(e - 1))
            .product()
    };
    Ok(order_from_multiple(2, p, group, &factor_u64(group)))
}

/// Order of 2 modulo the odd prime `p` using a precomputed factorization of
/// `p - 1`. Used by the search pipeline, which factors `p - 1` cheaply from
/// a small-prime table.
pub fn ord2_with_factors(p: u64, p_minus_1: &[(u64, u32)]) -> u64 {
    order_from_multiple(2, p, p - 1, p_minus_1)
}

/// An odd prime together with `t = ord2(p)` and the factorization of `p-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCtx {
    pub p: u64,
    pub t: u64,
    pub p_minus_1: Vec<(u64, u32)>,
}

impl PrimeCtx {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime_u64(p) {
            return Err(Error::usage(format!("{p} is not an odd prime")));
        }
        let p_minus_1 = factor_u64(p - 1);
        let t = ord2_with_factors(p, &p_minus_1);
        Ok(PrimeCtx { p, t, p_minus_1 })
    }

    /// The subgroup generated by 2 in Z_p^*, in generation order `2^0, 2^1, ...`.
    pub fn powers_of_two(&self) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.t as usize);
        let mut x = 1u64;
        for _ in 0..self.t {
            v.push(x);
            x = x * 2 % self.p;
        }
        v
    }
}
