//! Three-term dependencies: `ζ1 + ζ2 + ζ3 = 0` with `ζi ∈ C_p`.
//!
//! Dividing by one root reduces this to `1 + ζ + (ζ + 1) = 0`, so a
//! dependency exists iff some `ζ ∈ C_p \ {1}` has `ζ + 1 ∈ C_p`. Two
//! deciders are provided: the polynomial gcd over GF(2), which is quadratic
//! in `p`, and a scan over Frobenius classes inside F_{2^t}.

use crate::algebra::binfield::{BfElem, Bsgs};
use crate::algebra::gf2poly::Gf2Poly;
use crate::algebra::numtheory::inv_mod;
use crate::rootsum::roots::RootsOfUnity;
use crate::rootsum::witness::DependencyWitness;
use crate::{Error, Result};

/// `gcd(x^p + 1, (x + 1)^p + 1)`, computed by word-packed Euclid.
pub fn cube_sum_gcd(p: u64) -> Result<Gf2Poly> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::usage(format!(
            "the gcd test needs an odd p >= 3, got {p}"
        )));
    }
    let n = p as usize;
    let mut modulus = Gf2Poly::monomial(n);
    modulus.flip(0);
    // (x+1)^p + 1 has degree p; one subtraction of x^p + 1 reduces it.
    let mut other = Gf2Poly::one_plus_x_pow(n);
    other.flip(0);
    other += &modulus;
    Ok(Gf2Poly::gcd(&modulus, &other))
}

/// True iff three p-th roots of unity sum to zero, decided by whether
/// `gcd(x^p + 1, (x + 1)^p + 1)` is nonconstant.
pub fn gcd_test_3(p: u64) -> Result<bool> {
    Ok(!cube_sum_gcd(p)?.is_constant())
}

/// Scans one representative `i` per class `{i, 2i, 4i, ...}` of `Z_p^*`,
/// calling `on_hit(i, g^i)` whenever `g^i + 1 ∈ C_p`; the scan stops when
/// `on_hit` returns false.
///
/// `ζ^{-1} + 1 = ζ^{-1}(ζ + 1)`, so the class of `-i` is a hit iff the class
/// of `i` is; both are marked together and only `i` is tested.
fn scan_classes<F>(roots: &RootsOfUnity, mut on_hit: F)
where
    F: FnMut(u64, &BfElem) -> bool,
{
    const TABLE: u64 = 64;
    let p = roots.p();
    let field = &roots.field;
    let mut marked = vec![0u64; (p as usize).div_ceil(64)];
    let mark_class = |start: u64, marked: &mut [u64]| {
        let mut j = start;
        loop {
            if marked[(j / 64) as usize] >> (j % 64) & 1 == 1 {
                return;
            }
            marked[(j / 64) as usize] |= 1 << (j % 64);
            j = j * 2 % p;
        }
    };
    // step[k] = g^(k+1)
    let mut step = Vec::with_capacity(TABLE as usize);
    let mut cur = roots.generator.clone();
    for _ in 0..TABLE {
        step.push(cur.clone());
        cur = field.mul(&cur, &roots.generator);
    }
    let mut prev = 0u64;
    let mut power = field.one();
    for i in 1..p {
        if marked[(i / 64) as usize] >> (i % 64) & 1 == 1 {
            continue;
        }
        mark_class(i, &mut marked);
        mark_class(p - i, &mut marked);
        let gap = i - prev;
        power = if gap <= TABLE {
            field.mul(&power, &step[(gap - 1) as usize])
        } else {
            roots.pow(i)
        };
        prev = i;
        let shifted = field.add_one(&power);
        if roots.contains(&shifted) && !on_hit(i, &power) {
            return;
        }
    }
}

/// Some `i ∈ [1, p-1]` with `g^i + 1 ∈ C_p`, or `None` if three p-th roots
/// of unity never sum to zero.
pub fn class_test_3(roots: &RootsOfUnity) -> Option<u64> {
    let mut found = None;
    scan_classes(roots, |i, _| {
        found = Some(i);
        false
    });
    found
}

/// Every class representative `i` found by the scan with `g^i + 1 ∈ C_p`.
/// Classes reachable only through `i ↦ -i` are not listed.
pub fn class_hits_3(roots: &RootsOfUnity) -> Vec<u64> {
    let mut hits = Vec::new();
    scan_classes(roots, |i, _| {
        hits.push(i);
        true
    });
    hits
}

/// The canonical three-term witness `{0, 1, d}` with `g^d = g + 1`.
///
/// For a dependency `1 + ζ + (ζ + 1) = 0`, each of the six ways to scale the
/// triple so that one root becomes 1 yields an element `G` and an exponent
/// `d` with `G^d = G + 1`; `d` is constant on Frobenius classes. The witness
/// takes the smallest `d` over all dependencies, so its exponent set does
/// not depend on the field or the generator chosen.
pub fn extract_witness_3(roots: &RootsOfUnity) -> Result<DependencyWitness> {
    let p = roots.p();
    let field = &roots.field;
    let hits = class_hits_3(roots);
    if hits.is_empty() {
        return Err(Error::NotFound(format!(
            "no three {p}-th roots of unity sum to zero"
        )));
    }
    let bsgs = Bsgs::new(field, &roots.generator, p);
    let neg = |a: u64| (p - a % p) % p;
    let mut best: Option<(u64, u64)> = None; // (d, a)
    for i in hits {
        let j = bsgs.log(&field.add_one(&roots.pow(i)))?;
        let candidates = [
            (i, j),
            (j, i),
            (neg(i), (j + p - i) % p),
            ((j + p - i) % p, neg(i)),
            (neg(j), (i + p - j) % p),
            ((i + p - j) % p, neg(j)),
        ];
        for (a, b) in candidates {
            let Some(a_inv) = inv_mod(a, p) else { continue };
            let d = (b as u128 * a_inv as u128 % p as u128) as u64;
            if best.is_none_or(|cur| (d, a) < cur) {
                best = Some((d, a));
            }
        }
    }
    let (d, a) = best.expect("at least one hit");
    let witness = DependencyWitness {
        p,
        t: roots.t(),
        exponents: vec![0, 1, d],
        modulus: field.modulus().clone(),
        generator: roots.pow(a).to_poly(),
    };
    witness.verify()?;
    Ok(witness)
}
