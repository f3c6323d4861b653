//! Order-based predicates on `(p, t = ord2(p))`, evaluated in exact integer
//! arithmetic so boundary cases are decided without rounding.

use num_bigint::BigUint;
use num_traits::One;

/// Necessary condition for three p-th roots of unity to sum to zero:
/// `t <= sqrt(4p/3)`, i.e. `3 t^2 <= 4 p`.
pub fn necessary_cond_3(p: u64, t: u64) -> bool {
    3 * (t as u128) * (t as u128) <= 4 * p as u128
}

/// Necessary condition for `k` (odd, `>= 3`) roots summing to zero:
/// `t <= 2 p^(1 - 1/(k-1))`, i.e. `t^(k-1) <= 2^(k-1) p^(k-2)`.
pub fn necessary_cond_k(p: u64, t: u64, k: u32) -> bool {
    assert!(k >= 3 && k % 2 == 1, "k must be odd and >= 3");
    let lhs = BigUint::from(t).pow(k - 1);
    let rhs = (BigUint::one() << (k - 1)) * BigUint::from(p).pow(k - 2);
    lhs <= rhs
}

/// Sufficient condition for a three-term dependency: `t < (4/3) log2 p`,
/// i.e. `2^(3t) < p^4`.
pub fn sufficient_cond_3(p: u64, t: u64) -> bool {
    (BigUint::one() << (3 * t)) < BigUint::from(p).pow(4)
}

/// For `p > 3` a three-term dependency forces `t` odd.
pub fn odd_t_filter(p: u64, t: u64) -> bool {
    p <= 3 || t % 2 == 1
}
