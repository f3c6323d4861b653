//! Exhaustive enumeration of k-tuples of p-th roots of unity summing to
//! zero. This is the independent oracle for every faster decider.

use crate::rootsum::roots::RootsOfUnity;
use crate::{Error, Result};

pub const DEFAULT_BRUTE_T_LIMIT: u64 = 20;
pub const DEFAULT_BRUTE_BUDGET: u64 = 1 << 32;

/// Tuples are multisets of exponents, stored nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceDeps {
    pub p: u64,
    pub k: u32,
    /// Ordered k-tuples `(c_1, ..., c_k) ∈ C_p^k` with zero sum.
    pub ordered: u128,
    /// Zero-sum multisets of size k.
    pub multisets: u64,
    /// Zero-sum sets of k distinct roots.
    pub distinct_sets: u64,
    /// The first `cap` zero-sum multisets in lexicographic order.
    pub tuples: Vec<Vec<u64>>,
}

impl BruteForceDeps {
    pub fn has_distinct(&self) -> bool {
        self.distinct_sets > 0
    }
}

/// Options for [`brute_force_deps_with`].
#[derive(Debug, Clone, Copy)]
pub struct BruteOptions {
    /// Refuse when `ord2(p)` exceeds this.
    pub t_limit: u64,
    /// Refuse when more than this many (k-1)-prefixes would be visited.
    pub budget: u64,
    /// Maximum number of tuples kept in the listing.
    pub cap: usize,
}

impl Default for BruteOptions {
    fn default() -> Self {
        BruteOptions {
            t_limit: DEFAULT_BRUTE_T_LIMIT,
            budget: DEFAULT_BRUTE_BUDGET,
            cap: 1000,
        }
    }
}

pub fn brute_force_deps(roots: &RootsOfUnity, k: u32) -> Result<BruteForceDeps> {
    brute_force_deps_with(roots, k, BruteOptions::default())
}

/// Enumerates nondecreasing exponent prefixes `e_1 <= ... <= e_{k-1}` and
/// looks up the root that completes each to a zero sum.
pub fn brute_force_deps_with(
    roots: &RootsOfUnity,
    k: u32,
    opts: BruteOptions,
) -> Result<BruteForceDeps> {
    let p = roots.p();
    let t = roots.t();
    if k == 0 {
        return Err(Error::usage("k must be >= 1"));
    }
    if t > opts.t_limit {
        return Err(Error::ResourceLimit(format!(
            "ord2({p}) = {t} exceeds the brute-force limit {}",
            opts.t_limit
        )));
    }
    let prefixes = multichoose(p, (k - 1) as u64);
    if prefixes > opts.budget as u128 {
        return Err(Error::ResourceLimit(format!(
            "{prefixes} prefixes exceed the budget {}",
            opts.budget
        )));
    }
    // Elements of F_{2^t} with t <= 20 fit in one word.
    let values: Vec<u64> = roots.elements().iter().map(|e| e.low_u64()).collect();
    let mut exponent_of = vec![u32::MAX; 1usize << t];
    for (e, &v) in values.iter().enumerate() {
        exponent_of[v as usize] = e as u32;
    }
    let factorial: Vec<u128> = (0..=k as u128)
        .scan(1u128, |f, i| {
            if i > 0 {
                *f *= i;
            }
            Some(*f)
        })
        .collect();

    let mut out = BruteForceDeps {
        p,
        k,
        ordered: 0,
        multisets: 0,
        distinct_sets: 0,
        tuples: Vec::new(),
    };
    let mut prefix: Vec<u64> = Vec::with_capacity(k as usize);
    let visit = |prefix: &[u64], sum: u64, out: &mut BruteForceDeps| {
        let e = exponent_of[sum as usize];
        if e == u32::MAX {
            return;
        }
        let e = e as u64;
        if prefix.last().is_some_and(|&last| e < last) {
            return;
        }
        let mut tuple = prefix.to_vec();
        tuple.push(e);
        let mut arrangements = factorial[k as usize];
        let mut distinct = true;
        let mut run = 1usize;
        for w in 1..=tuple.len() {
            if w < tuple.len() && tuple[w] == tuple[w - 1] {
                run += 1;
                distinct = false;
            } else {
                arrangements /= factorial[run];
                run = 1;
            }
        }
        out.ordered += arrangements;
        out.multisets += 1;
        out.distinct_sets += distinct as u64;
        if out.tuples.len() < opts.cap {
            out.tuples.push(tuple);
        }
    };
    enumerate(
        &values,
        (k - 1) as usize,
        0,
        0,
        &mut prefix,
        &mut |pre, sum| visit(pre, sum, &mut out),
    );
    Ok(out)
}

fn enumerate(
    values: &[u64],
    depth: usize,
    start: usize,
    sum: u64,
    prefix: &mut Vec<u64>,
    f: &mut dyn FnMut(&[u64], u64),
) {
    if depth == 0 {
        f(prefix, sum);
        return;
    }
    for e in start..values.len() {
        prefix.push(e as u64);
        enumerate(values, depth - 1, e, sum ^ values[e], prefix, f);
        prefix.pop();
    }
}

/// Number of multisets of size `r` from `n` items, saturating.
fn multichoose(n: u64, r: u64) -> u128 {
    let mut acc = 1u128;
    for i in 0..r {
        acc = acc.saturating_mul((n + i) as u128) / (i as u128 + 1);
    }
    acc
}
