//! Additive characters `χ_a(x) = (-1)^{Tr(ax)}` summed over C_p, and the
//! counts `M_k = 2^{-t} Σ_a χ_a(C_p)^k` of ordered zero-sum k-tuples.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::rootsum::roots::RootsOfUnity;
use crate::{Error, Result};

pub const DEFAULT_FOURIER_T_LIMIT: u64 = 24;

#[derive(Debug, Clone)]
pub struct FourierProfile {
    pub p: u64,
    pub t: u64,
    /// `coefficients[a] = χ_a(C_p)`, indexed by the bit pattern of `a`.
    pub coefficients: Vec<i32>,
    /// `F = max_{a != 0} |χ_a(C_p)|`.
    pub max_nontrivial: u64,
    /// `M_k` for each computed odd `k`.
    pub m_counts: BTreeMap<u32, BigUint>,
    /// `(χ value, multiplicity)` pairs; every `M_k` is a sum over these.
    spectrum: Vec<(i64, u64)>,
}

impl FourierProfile {
    /// `M_k`, computed exactly from the spectrum.
    pub fn m_count(&self, k: u32) -> Result<BigUint> {
        let mut total = BigInt::zero();
        for &(value, mult) in &self.spectrum {
            total += BigInt::from(value).pow(k) * mult;
        }
        let denom = BigInt::one() << self.t;
        if !(&total % &denom).is_zero() {
            return Err(Error::Verification(format!(
                "Σ χ^{k} is not divisible by 2^{}",
                self.t
            )));
        }
        let m = total / denom;
        if m.is_negative() {
            return Err(Error::Verification(format!("M_{k} is negative")));
        }
        Ok(m.magnitude().clone())
    }

    /// `Σ_a χ_a² == 2^t p`.
    pub fn parseval_holds(&self) -> bool {
        let sum: u128 = self
            .spectrum
            .iter()
            .map(|&(v, m)| (v * v) as u128 * m as u128)
            .sum();
        sum == (self.p as u128) << self.t
    }
}

/// Computes every `χ_a(C_p)` by a Walsh-Hadamard transform of the
/// histogram of `c ↦ (Tr(c), Tr(xc), ..., Tr(x^{t-1} c))` over `c ∈ C_p`,
/// then `M_k` for odd `k <= k_max`.
pub fn fourier_profile(roots: &RootsOfUnity, k_max: u32) -> Result<FourierProfile> {
    fourier_profile_with_limit(roots, k_max, DEFAULT_FOURIER_T_LIMIT)
}

pub fn fourier_profile_with_limit(
    roots: &RootsOfUnity,
    k_max: u32,
    t_limit: u64,
) -> Result<FourierProfile> {
    let p = roots.p();
    let t = roots.t();
    if t > t_limit {
        return Err(Error::ResourceLimit(format!(
            "ord2({p}) = {t} exceeds the transform limit {t_limit}"
        )));
    }
    let field = &roots.field;
    let size = 1usize << t;
    // `Tr(x^i c)` is linear in `c`: column `j` holds `Tr(x^{i+j})` for all i.
    let trace_of_power: Vec<u8> = {
        let x = field.root();
        let mut cur = field.one();
        (0..2 * t)
            .map(|_| {
                let tr = field.trace(&cur);
                cur = field.mul(&cur, &x);
                tr
            })
            .collect()
    };
    let columns: Vec<u64> = (0..t as usize)
        .map(|j| (0..t as usize).fold(0u64, |acc, i| acc | (trace_of_power[i + j] as u64) << i))
        .collect();

    let mut coefficients = vec![0i32; size];
    for c in roots.elements() {
        let bits = c.low_u64();
        let mut y = 0u64;
        for (j, col) in columns.iter().enumerate() {
            if bits >> j & 1 == 1 {
                y ^= col;
            }
        }
        coefficients[y as usize] += 1;
    }
    walsh_hadamard(&mut coefficients);

    let max_nontrivial = coefficients[1..]
        .iter()
        .map(|v| v.unsigned_abs() as u64)
        .max()
        .unwrap_or(0);
    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    for &v in &coefficients {
        *hist.entry(v as i64).or_default() += 1;
    }
    let mut profile = FourierProfile {
        p,
        t,
        coefficients,
        max_nontrivial,
        m_counts: BTreeMap::new(),
        spectrum: hist.into_iter().collect(),
    };
    if profile.coefficients[0] as u64 != p || !profile.parseval_holds() {
        return Err(Error::Verification(format!(
            "character sums over C_{p} are inconsistent"
        )));
    }
    for k in (1..=k_max).step_by(2) {
        let m = profile.m_count(k)?;
        profile.m_counts.insert(k, m);
    }
    Ok(profile)
}

fn walsh_hadamard(v: &mut [i32]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                (*a, *b) = (*a + *b, *a - *b);
            }
        }
        h *= 2;
    }
}

/// `F/p < (p/2^t)^{1/(k-2)}`, decided exactly as `F^{k-2} 2^t < p^{k-1}`.
/// When true, some k elements of C_p sum to zero.
pub fn fourier_sufficient_k(profile: &FourierProfile, k: u32) -> bool {
    assert!(k >= 3, "k must be >= 3");
    let lhs = BigUint::from(profile.max_nontrivial).pow(k - 2) << profile.t;
    lhs < BigUint::from(profile.p).pow(k - 1)
}

/// The least odd `k` with `M_k > 0`.
///
/// Ordered tuples may repeat roots, but equal pairs cancel in
/// characteristic 2, so the least such `k` also admits `k` distinct roots.
/// All `p` roots sum to zero, so the answer is at most `p`.
pub fn min_k_dependency(roots: &RootsOfUnity) -> Result<u32> {
    min_k_dependency_with_limit(roots, DEFAULT_FOURIER_T_LIMIT)
}

pub fn min_k_dependency_with_limit(roots: &RootsOfUnity, t_limit: u64) -> Result<u32> {
    let profile = fourier_profile_with_limit(roots, 0, t_limit)?;
    for k in (3..=roots.p() as u32).step_by(2) {
        if !profile.m_count(k)?.is_zero() {
            return Ok(k);
        }
    }
    Err(Error::Verification(format!(
        "M_p vanished for p = {}",
        roots.p()
    )))
}
