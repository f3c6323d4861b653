//! Factoring integers up to 2^127 (Mersenne numbers `2^t - 1`, `t <= 127`).
//!
//! Montgomery arithmetic over `u128`, Miller-Rabin, and Brent's Pollard rho
//! with an iteration budget so callers can mark hard inputs as incomplete.

use super::numtheory::{factor_u64, is_prime_u64};
use crate::{Error, Result};

/// Full 256-bit product of two u128 values as `(hi, lo)`.
#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = (a >> 64, a & u64::MAX as u128);
    let (b1, b0) = (b >> 64, b & u64::MAX as u128);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & u64::MAX as u128) + (p10 & u64::MAX as u128);
    let lo = (p00 & u64::MAX as u128) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Montgomery form for an odd modulus `n < 2^127`, with `R = 2^128`.
struct Montgomery {
    n: u128,
    /// `-n^{-1} mod 2^128`
    n_neg_inv: u128,
    r2: u128,
}

impl Montgomery {
    fn new(n: u128) -> Self {
        debug_assert!(n & 1 == 1 && n < 1 << 127);
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r = (u128::MAX % n + 1) % n;
        let r2 = mul_mod_slow(r, r, n);
        Montgomery {
            n,
            n_neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.n_neg_inv);
        let (mh, ml) = mul_wide(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        let t = hi + mh + carry as u128;
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    #[inline]
    fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    fn from_mont(&self, a: u128) -> u128 {
        self.redc(0, a)
    }

    fn pow(&self, base: u128, mut e: u128) -> u128 {
        let mut acc = self.to_mont(1);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }
}

fn add_mod(a: u128, b: u128, n: u128) -> u128 {
    let (s, o) = a.overflowing_add(b);
    if o || s >= n {
        s.wrapping_sub(n)
    } else {
        s
    }
}

/// Double-and-add modular product; only used for setup constants.
fn mul_mod_slow(mut a: u128, mut b: u128, n: u128) -> u128 {
    let mut acc = 0u128;
    a %= n;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, n);
        }
        a = add_mod(a, a, n);
        b >>= 1;
    }
    acc
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Miller-Rabin with the first 20 prime bases. Deterministic below
/// 3.3 * 10^24; beyond that the error probability is below 4^-20.
pub fn is_prime_u128(n: u128) -> bool {
    if n <= u64::MAX as u128 {
        return is_prime_u64(n as u64);
    }
    const BASES: [u128; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    if BASES.iter().any(|&q| n.is_multiple_of(q)) {
        return false;
    }
    if n >= 1 << 127 {
        // Outside the Montgomery range; such inputs are rejected upstream.
        return false;
    }
    let mont = Montgomery::new(n);
    let one = mont.to_mont(1);
    let minus_one = mont.to_mont(n - 1);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-Pollard rho on an odd composite `n` with at most `budget` steps.
fn rho_u128(n: u128, budget: u64) -> Option<u128> {
    if n <= u64::MAX as u128 {
        let f = factor_u64(n as u64);
        return Some(f[0].0 as u128);
    }
    let mont = Montgomery::new(n);
    let mut spent = 0u64;
    for c in 1u128.. {
        let cm = mont.to_mont(c);
        let f = |x: u128| add_mod(mont.mul(x, x), cm, n);
        let mut y = mont.to_mont(2);
        let mut x = y;
        let mut ys = y;
        let mut q = mont.to_mont(1);
        let mut g = 1u128;
        let mut r = 1u64;
        const BATCH: u64 = 256;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = BATCH.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mont.mul(q, x.abs_diff(y));
                }
                g = gcd_u128(mont.from_mont(q), n);
                k += steps;
            }
            spent += 2 * r;
            if spent > budget {
                return None;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u128(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
        if c > 16 {
            return None;
        }
    }
    None
}

/// Default rho iteration budget per composite cofactor.
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 28;

/// Prime factorization of `m` (`2 <= m <= 2^127`) as sorted
/// `(prime, exponent)` pairs. Fails with `ResourceLimit` when Pollard rho
/// exceeds `budget` steps on some cofactor.
pub fn factorize(m: u128, budget: u64) -> Result<Vec<(u128, u32)>> {
    if !(2..=1 << 127).contains(&m) {
        return Err(Error::usage(format!(
            "factorize needs 2 <= m <= 2^127, got {m}"
        )));
    }
    let mut out: Vec<(u128, u32)> = Vec::new();
    fn push(out: &mut Vec<(u128, u32)>, q: u128) {
        match out.iter_mut().find(|(p, _)| *p == q) {
            Some(e) => e.1 += 1,
            None => out.push((q, 1)),
        }
    }
    let mut n = m;
    while n.is_multiple_of(2) {
        push(&mut out, 2);
        n /= 2;
    }
    let mut q = 3u128;
    while q <= 10_000 && q * q <= n {
        while n.is_multiple_of(q) {
            push(&mut out, q);
            n /= q;
        }
        q += 2;
    }
    let mut stack = if n > 1 { vec![n] } else { vec![] };
    while let Some(c) = stack.pop() {
        if is_prime_u128(c) {
            push(&mut out, c);
            continue;
        }
        let d = rho_u128(c, budget).ok_or_else(|| {
            Error::ResourceLimit(format!("pollard rho budget exhausted on cofactor {c}"))
        })?;
        stack.push(d);
        stack.push(c / d);
    }
    out.sort_unstable();
    Ok(out)
}

/// `P(m)`, the largest prime factor of `m`.
pub fn largest_prime_factor(m: u128) -> Result<u128> {
    largest_prime_factor_with_budget(m, DEFAULT_RHO_BUDGET)
}

pub fn largest_prime_factor_with_budget(m: u128, budget: u64) -> Result<u128> {
    Ok(factorize(m, budget)?
        .last()
        .expect("m >= 2 has a prime factor")
        .0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wide_product() {
        let (hi, lo) = mul_wide(u128::MAX, u128::MAX);
        assert_eq!(lo, 1);
        assert_eq!(hi, u128::MAX - 1);
    }

    #[test]
    fn examples() {
        assert_eq!(largest_prime_factor((1 << 23) - 1).unwrap(), 178481);
        assert_eq!(largest_prime_factor(8).unwrap(), 2);
        assert_eq!(largest_prime_factor(511).unwrap(), 73);
        assert_eq!(largest_prime_factor(2).unwrap(), 2);
        assert!(largest_prime_factor(1).is_err());
    }

    #[test]
    fn mersenne_67() {
        // Cole's factorization.
        let f = factorize((1u128 << 67) - 1, DEFAULT_RHO_BUDGET).unwrap();
        assert_eq!(f, vec![(193_707_721, 1), (761_838_257_287, 1)]);
    }

    #[test]
    fn large_primes() {
        assert!(is_prime_u128((1u128 << 127) - 1));
        assert!(is_prime_u128((1u128 << 89) - 1));
        assert!(!is_prime_u128((1u128 << 101) - 1));
        assert_eq!(
            largest_prime_factor((1u128 << 127) - 1).unwrap(),
            (1u128 << 127) - 1
        );
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // Product of two 40-bit primes; a tiny budget cannot split it.
        let n = 1_099_511_627_791u128 * 1_099_511_628_401u128;
        assert!(matches!(factorize(n, 10), Err(Error::ResourceLimit(_))));
    }

    proptest! {
        #[test]
        fn montgomery_matches_slow(a in any::<u128>(), b in any::<u128>(), n in any::<u128>()) {
            let n = (n >> 1) | 1;
            prop_assume!(n > 1);
            let m = Montgomery::new(n);
            let got = m.from_mont(m.mul(m.to_mont(a), m.to_mont(b)));
            prop_assert_eq!(got, mul_mod_slow(a, b, n));
        }

        #[test]
        fn factorization_is_complete(a in 2u128..(1 << 40), b in 2u128..(1 << 40)) {
            let m = a * b;
            let f = factorize(m, DEFAULT_RHO_BUDGET).unwrap();
            let prod: u128 = f.iter().map(|&(q, e)| q.pow(e)).product();
            prop_assert_eq!(prod, m);
            for (q, _) in f {
                prop_assert!(is_prime_u128(q));
            }
        }
    }
}
