//! The binary extension field F_{2^t} = GF(2)[x]/(f) for an irreducible `f`
//! of degree `t`, with element multiplication, traces, the p-th roots of
//! unity subgroup, and baby-step/giant-step discrete logs.
//!
//! Elements are fixed-length word vectors. Moduli produced by
//! [`build_field`] have the shape `x^t + r(x)` with a short tail `r`, which
//! lets reduction fold the high half back with a couple of word-by-word
//! carry-less products instead of a bitwise long division.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use super::clmul::{self, clmul64};
use super::gf2poly::{self, Gf2Poly};
use super::numtheory::factor_u64;
use crate::{seed, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BfElem {
    words: Vec<u64>,
}

impl BfElem {
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self) -> bool {
        self.words[0] == 1 && self.words[1..].iter().all(|&w| w == 0)
    }

    pub fn to_poly(&self) -> Gf2Poly {
        Gf2Poly::from_words(self.words.clone())
    }

    /// The element's low word; the full value for fields with `t <= 64`.
    pub fn low_u64(&self) -> u64 {
        self.words[0]
    }

    pub fn to_hex(&self) -> String {
        self.to_poly().to_hex()
    }
}

impl std::fmt::Debug for BfElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BfElem({})", self.to_poly())
    }
}

#[derive(Debug)]
pub struct BinaryFieldCtx {
    t: usize,
    modulus: Gf2Poly,
    nwords: usize,
    top_mask: u64,
    /// `r` with `modulus = x^t + r`, when short enough to reduce by folding.
    tail: Option<u64>,
    trace_mask: OnceLock<Vec<u64>>,
}

impl BinaryFieldCtx {
    /// Builds a field over a caller-supplied modulus, verifying irreducibility.
    pub fn new(modulus: Gf2Poly) -> Result<Arc<Self>> {
        let ctx = Self::unchecked(modulus)?;
        if !ctx.modulus_is_irreducible() {
            return Err(Error::Verification(format!(
                "modulus {} is reducible",
                ctx.modulus
            )));
        }
        Ok(Arc::new(ctx))
    }

    fn unchecked(modulus: Gf2Poly) -> Result<Self> {
        let t = match modulus.deg() {
            Some(t) if t >= 1 => t,
            _ => return Err(Error::usage("field modulus must have degree >= 1")),
        };
        let nwords = t.div_ceil(64);
        let top_mask = if t % 64 == 0 {
            u64::MAX
        } else {
            (1u64 << (t % 64)) - 1
        };
        let mut r = modulus.clone();
        r.flip(t);
        let tail = match r.deg() {
            None => Some(0),
            Some(d) if d < 64 && 2 * d <= t => Some(r.words()[0]),
            _ => None,
        };
        Ok(BinaryFieldCtx {
            t,
            modulus,
            nwords,
            top_mask,
            tail,
            trace_mask: OnceLock::new(),
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn modulus(&self) -> &Gf2Poly {
        &self.modulus
    }

    /// Number of field elements, `2^t`.
    pub fn order(&self) -> BigUint {
        BigUint::one() << self.t
    }

    pub fn zero(&self) -> BfElem {
        BfElem {
            words: vec![0; self.nwords],
        }
    }

    pub fn one(&self) -> BfElem {
        let mut e = self.zero();
        e.words[0] = 1;
        e
    }

    /// The class of `x`, a root of the modulus.
    pub fn root(&self) -> BfElem {
        self.from_poly(&Gf2Poly::x())
    }

    pub fn from_poly(&self, f: &Gf2Poly) -> BfElem {
        let mut words = f.words().to_vec();
        if words.len() < 2 * self.nwords {
            words.resize(2 * self.nwords, 0);
        }
        self.reduce(&mut words);
        words.truncate(self.nwords);
        BfElem { words }
    }

    /// Element whose bit pattern is `v`; requires `t <= 64` or reduces.
    pub fn from_u64(&self, v: u64) -> BfElem {
        self.from_poly(&Gf2Poly::from_u64(v))
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> BfElem {
        let mut words: Vec<u64> = (0..self.nwords).map(|_| rng.gen()).collect();
        *words.last_mut().unwrap() &= self.top_mask;
        BfElem { words }
    }

    pub fn add(&self, a: &BfElem, b: &BfElem) -> BfElem {
        BfElem {
            words: a.words.iter().zip(&b.words).map(|(x, y)| x ^ y).collect(),
        }
    }

    pub fn add_one(&self, a: &BfElem) -> BfElem {
        let mut e = a.clone();
        e.words[0] ^= 1;
        e
    }

    /// Reduces a buffer of length `>= 2 * nwords` modulo the field modulus;
    /// the result sits in the first `nwords` words, the rest are zero.
    fn reduce(&self, buf: &mut Vec<u64>) {
        match self.tail {
            Some(r) => self.reduce_fold(buf, r),
            None => {
                gf2poly::reduce_words(buf, self.modulus.words(), self.t);
                buf.resize(self.nwords, 0);
            }
        }
    }

    fn reduce_fold(&self, buf: &mut [u64], r: u64) {
        let off = self.t / 64;
        let s = self.t % 64;
        let mut high = vec![0u64; buf.len() - off];
        loop {
            // high = buf >> t
            let mut any = false;
            for i in 0..high.len() {
                let lo = buf[off + i] >> s;
                let hi = match (s, buf.get(off + i + 1)) {
                    (0, _) | (_, None) => 0,
                    (_, Some(&w)) => w << (64 - s),
                };
                high[i] = lo | hi;
                any |= high[i] != 0;
            }
            if !any {
                return;
            }
            buf[off] &= (1u64 << s) - 1;
            buf[off + 1..].iter_mut().for_each(|w| *w = 0);
            for (i, &h) in high.iter().enumerate() {
                if h == 0 {
                    continue;
                }
                let p = clmul64(h, r);
                buf[i] ^= p as u64;
                if i + 1 < buf.len() {
                    buf[i + 1] ^= (p >> 64) as u64;
                }
            }
        }
    }

    pub fn mul(&self, a: &BfElem, b: &BfElem) -> BfElem {
        if self.nwords == 1 {
            return BfElem {
                words: vec![self.mul_u64(a.words[0], b.words[0])],
            };
        }
        let mut buf = vec![0u64; 2 * self.nwords];
        clmul::mul_slices_into(&a.words, &b.words, &mut buf);
        self.reduce(&mut buf);
        buf.truncate(self.nwords);
        BfElem { words: buf }
    }

    #[inline]
    fn mul_u64(&self, a: u64, b: u64) -> u64 {
        let prod = clmul64(a, b);
        self.reduce_u128(prod)
    }

    #[inline]
    fn reduce_u128(&self, mut prod: u128) -> u64 {
        let t = self.t as u32;
        match self.tail {
            Some(r) => loop {
                let high = prod >> t;
                if high == 0 {
                    return prod as u64;
                }
                prod &= (1u128 << t) - 1;
                prod ^= clmul64(high as u64, r);
            },
            None => {
                let m = self.modulus.words();
                let m = m[0] as u128 | ((m.get(1).copied().unwrap_or(0) as u128) << 64);
                while prod >> t != 0 {
                    let d = 127 - prod.leading_zeros();
                    prod ^= m << (d - t);
                }
                prod as u64
            }
        }
    }

    pub fn square(&self, a: &BfElem) -> BfElem {
        if self.nwords == 1 {
            let w = a.words[0];
            let sq = clmul::spread32(w as u32) as u128
                | (clmul::spread32((w >> 32) as u32) as u128) << 64;
            return BfElem {
                words: vec![self.reduce_u128(sq)],
            };
        }
        let mut buf = Vec::with_capacity(2 * self.nwords);
        for &w in &a.words {
            buf.push(clmul::spread32(w as u32));
            buf.push(clmul::spread32((w >> 32) as u32));
        }
        self.reduce(&mut buf);
        buf.truncate(self.nwords);
        BfElem { words: buf }
    }

    pub fn pow_u64(&self, a: &BfElem, e: u64) -> BfElem {
        let mut acc = self.one();
        if e == 0 {
            return acc;
        }
        for i in (0..64 - e.leading_zeros()).rev() {
            acc = self.square(&acc);
            if e >> i & 1 == 1 {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn pow_big(&self, a: &BfElem, e: &BigUint) -> BfElem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Multiplicative inverse via `a^(2^t - 2)`; `None` for zero.
    pub fn inv(&self, a: &BfElem) -> Option<BfElem> {
        if a.is_zero() {
            return None;
        }
        let e = (BigUint::one() << self.t) - 2u32;
        Some(self.pow_big(a, &e))
    }

    /// Absolute trace `x + x^2 + x^4 + ... + x^(2^(t-1))`, returned as a bit.
    pub fn trace(&self, a: &BfElem) -> u8 {
        let mut acc = a.clone();
        let mut y = a.clone();
        for _ in 1..self.t {
            y = self.square(&y);
            acc = self.add(&acc, &y);
        }
        debug_assert!(acc.words[1..].iter().all(|&w| w == 0) && acc.words[0] <= 1);
        acc.words[0] as u8
    }

    /// Bit `k` is `Tr(x^k)`. Computed on first use (`t` literal traces).
    pub fn trace_mask(&self) -> &[u64] {
        self.trace_mask.get_or_init(|| {
            let mut mask = vec![0u64; self.nwords];
            let x = self.root();
            let mut xk = self.one();
            for k in 0..self.t {
                if self.trace(&xk) == 1 {
                    mask[k / 64] |= 1 << (k % 64);
                }
                xk = self.mul(&xk, &x);
            }
            mask
        })
    }

    /// Trace by the linear form `Tr(a) = <a, trace_mask>`.
    pub fn trace_linear(&self, a: &BfElem) -> u8 {
        let ones: u32 = a
            .words
            .iter()
            .zip(self.trace_mask())
            .map(|(x, m)| (x & m).count_ones())
            .sum();
        (ones & 1) as u8
    }

    /// Rabin's irreducibility test using this context's reduction; a
    /// distinct-degree prefilter rejects factors of degree <= 8 first.
    fn modulus_is_irreducible(&self) -> bool {
        let t = self.t;
        if t == 1 {
            return true;
        }
        if !self.modulus.coeff(0) {
            return false;
        }
        let x = self.root();
        // prefilter: gcd(f, prod_{i <= 8, i <= t/2} (x^(2^i) - x)) == 1
        let mut xp = x.clone();
        let mut prod = self.one();
        for _ in 1..=8.min(t / 2) {
            xp = self.square(&xp);
            prod = self.mul(&prod, &self.add(&xp, &x));
        }
        if t >= 2 && !Gf2Poly::gcd(&self.modulus, &prod.to_poly()).is_one() {
            return false;
        }
        let mut cuts: Vec<usize> = factor_u64(t as u64)
            .into_iter()
            .map(|(q, _)| t / q as usize)
            .collect();
        cuts.sort_unstable();
        let mut xp = x.clone();
        let mut done = 0;
        for cut in cuts {
            while done < cut {
                xp = self.square(&xp);
                done += 1;
            }
            if !Gf2Poly::gcd(&self.modulus, &self.add(&xp, &x).to_poly()).is_one() {
                return false;
            }
        }
        while done < t {
            xp = self.square(&xp);
            done += 1;
        }
        xp == x
    }
}

/// Builds F_{2^t} from a seeded random irreducible modulus `x^t + r(x)`.
///
/// The tail `r` has degree below `min(64, max(2, ceil(t/2)))` so reduction
/// folds in at most two passes. If that family were ever exhausted the
/// search widens to fully random dense moduli, so it always terminates.
pub fn build_field(t: usize, seed: u64) -> Result<Arc<BinaryFieldCtx>> {
    if t == 0 {
        return Err(Error::usage("extension degree must be >= 1"));
    }
    if t == 1 {
        return BinaryFieldCtx::new(Gf2Poly::from_exponents([1, 0]));
    }
    let mut rng = seed::rng(seed);
    let tail_bits = 64.min(2.max(t.div_ceil(2))).min(t);
    let sparse_budget = 256 * t + 1024;
    for attempt in 0.. {
        let modulus = if attempt < sparse_budget {
            let r: u64 = if tail_bits == 64 {
                rng.gen()
            } else {
                rng.gen_range(0..1u64 << tail_bits)
            };
            let mut m = Gf2Poly::from_u64(r | 1);
            m.flip(t);
            m
        } else {
            let mut words: Vec<u64> = (0..t / 64 + 1).map(|_| rng.gen()).collect();
            words[t / 64] &= (1u64 << (t % 64)) - 1;
            words[t / 64] |= 1 << (t % 64);
            words[0] |= 1;
            Gf2Poly::from_words(words)
        };
        let ctx = BinaryFieldCtx::unchecked(modulus)?;
        if ctx.modulus_is_irreducible() {
            return Ok(Arc::new(ctx));
        }
    }
    unreachable!()
}

/// `(2^t - 1) / p` if `p` divides `2^t - 1`.
pub fn cofactor(t: usize, p: u64) -> Option<BigUint> {
    let m = (BigUint::one() << t) - 1u32;
    let (q, r) = (&m / p, &m % p);
    r.is_zero().then_some(q)
}

/// A generator of C_p, the p-th roots of unity inside F_{2^t}: a random
/// element raised to `(2^t - 1)/p`, retried until it differs from 1.
pub fn cp_generator(ctx: &BinaryFieldCtx, p: u64, seed: u64) -> Result<BfElem> {
    if p < 2 {
        return Err(Error::usage("C_p needs p >= 2"));
    }
    let e = cofactor(ctx.t(), p)
        .ok_or_else(|| Error::usage(format!("{p} does not divide 2^{} - 1", ctx.t())))?;
    let mut rng = seed::rng(seed);
    loop {
        let r = ctx.random(&mut rng);
        if r.is_zero() {
            continue;
        }
        let g = ctx.pow_big(&r, &e);
        if !g.is_one() {
            return Ok(g);
        }
    }
}

/// Baby-step/giant-step discrete log in a cyclic group of prime order `p`
/// generated by `g`. The baby table is built once and reused for many
/// queries.
pub struct Bsgs<'a> {
    ctx: &'a BinaryFieldCtx,
    p: u64,
    baby: HashMap<Vec<u64>, u64>,
    m: u64,
    giant: BfElem,
}

impl<'a> Bsgs<'a> {
    /// Table of `ceil(sqrt(p))` baby steps.
    pub fn new(ctx: &'a BinaryFieldCtx, g: &BfElem, p: u64) -> Self {
        let m = (p as f64).sqrt().ceil() as u64;
        Self::with_baby_steps(ctx, g, p, m)
    }

    /// Table of `m` baby steps; giant steps per query are at most `p / m`.
    pub fn with_baby_steps(ctx: &'a BinaryFieldCtx, g: &BfElem, p: u64, m: u64) -> Self {
        let m = m.clamp(1, p.max(1));
        let mut baby = HashMap::with_capacity(m as usize);
        let mut cur = ctx.one();
        for j in 0..m {
            baby.entry(cur.words.clone()).or_insert(j);
            cur = ctx.mul(&cur, g);
        }
        // g^{-m} = g^{p - m mod p}
        let giant = ctx.pow_u64(g, (p - m % p) % p);
        Bsgs {
            ctx,
            p,
            baby,
            m,
            giant,
        }
    }

    pub fn log(&self, h: &BfElem) -> Result<u64> {
        let mut cur = h.clone();
        let steps = self.p / self.m + 1;
        for i in 0..=steps {
            if let Some(&j) = self.baby.get(&cur.words) {
                return Ok((i * self.m + j) % self.p);
            }
            cur = self.ctx.mul(&cur, &self.giant);
        }
        Err(Error::NotFound(format!(
            "element is not in the order-{} subgroup",
            self.p
        )))
    }
}

/// `d` in `[0, p)` with `g^d = h`, for `g` of prime order `p`.
pub fn bsgs_dlog(ctx: &BinaryFieldCtx, g: &BfElem, h: &BfElem, p: u64) -> Result<u64> {
    Bsgs::new(ctx, g, p).log(h)
}
