//! Polynomials over GF(2) packed into 64-bit words.
//!
//! Bit `i` of the word vector is the coefficient of `x^i`. The word vector
//! never carries trailing zero words, so the zero polynomial is the empty
//! vector and equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use super::clmul;
use crate::{Error, Result};

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { words: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly { words: vec![1] }
    }

    pub fn x() -> Self {
        Gf2Poly { words: vec![2] }
    }

    /// `x^n`
    pub fn monomial(n: usize) -> Self {
        let mut words = vec![0u64; n / 64 + 1];
        words[n / 64] = 1 << (n % 64);
        Gf2Poly { words }
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        normalize(&mut words);
        Gf2Poly { words }
    }

    pub fn from_u64(w: u64) -> Self {
        Self::from_words(vec![w])
    }

    /// Sum of `x^e` over the given exponents; repeated exponents cancel.
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I) -> Self {
        let mut words = Vec::new();
        for e in exps {
            if words.len() <= e / 64 {
                words.resize(e / 64 + 1, 0);
            }
            words[e / 64] ^= 1 << (e % 64);
        }
        Self::from_words(words)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    pub fn degree(&self) -> Degree {
        match self.deg() {
            Some(d) => Degree::Finite(d),
            None => Degree::NegInfinity,
        }
    }

    /// Degree as an `Option`, `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.deg(), None | Some(0))
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn flip(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] ^= 1 << (i % 64);
        normalize(&mut self.words);
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Exponents with nonzero coefficient, increasing.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn shl(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.words.len() + n / 64 + 1];
        xor_shifted(&mut out, &self.words, n);
        Self::from_words(out)
    }

    pub fn square(&self) -> Self {
        let mut out = Vec::with_capacity(self.words.len() * 2);
        for &w in &self.words {
            out.push(clmul::spread32(w as u32));
            out.push(clmul::spread32((w >> 32) as u32));
        }
        Self::from_words(out)
    }

    /// Coefficient reversal over `len` slots: returns `x^(len-1) f(1/x)`.
    /// Requires `deg f < len`.
    pub fn reverse(&self, len: usize) -> Self {
        debug_assert!(self.deg().is_none_or(|d| d < len));
        Self::from_exponents(self.support().map(|e| len - 1 - e))
    }

    /// The reciprocal polynomial `x^deg f · f(1/x)`.
    pub fn reciprocal(&self) -> Self {
        match self.deg() {
            None => Self::zero(),
            Some(d) => self.reverse(d + 1),
        }
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn divrem(&self, divisor: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly)> {
        let db = divisor
            .deg()
            .ok_or_else(|| Error::usage("polynomial division by zero"))?;
        let mut rem = self.words.clone();
        let mut quot = vec![0u64; self.deg().map_or(0, |d| d.saturating_sub(db) / 64 + 1)];
        while let Some(da) = deg_of(&rem) {
            if da < db {
                break;
            }
            let shift = da - db;
            quot[shift / 64] ^= 1 << (shift % 64);
            xor_shifted(&mut rem, &divisor.words, shift);
            normalize(&mut rem);
        }
        Ok((Self::from_words(quot), Self::from_words(rem)))
    }

    pub fn rem(&self, divisor: &Gf2Poly) -> Result<Gf2Poly> {
        let mut r = self.clone();
        r.rem_assign(divisor)?;
        Ok(r)
    }

    /// Reduces `self` modulo `divisor` in place.
    pub fn rem_assign(&mut self, divisor: &Gf2Poly) -> Result<()> {
        let db = divisor
            .deg()
            .ok_or_else(|| Error::usage("polynomial division by zero"))?;
        reduce_words(&mut self.words, &divisor.words, db);
        Ok(())
    }

    /// `self * other mod modulus`.
    pub fn mulmod(&self, other: &Gf2Poly, modulus: &Gf2Poly) -> Result<Gf2Poly> {
        (self * other).rem(modulus)
    }

    /// Greatest common divisor. Over GF(2) every nonzero polynomial is
    /// monic, so the result is the monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
        let mut a = a.words.clone();
        let mut b = b.words.clone();
        while let Some(db) = deg_of(&b) {
            reduce_words(&mut a, &b, db);
            std::mem::swap(&mut a, &mut b);
        }
        Self::from_words(a)
    }

    /// `base^e mod modulus` by square-and-multiply. `e = 0` gives 1 (reduced,
    /// so the empty product is still 1 for any nonconstant modulus).
    pub fn powmod(base: &Gf2Poly, e: u128, modulus: &Gf2Poly) -> Result<Gf2Poly> {
        if modulus.is_constant() {
            return Err(Error::usage("powmod needs a nonconstant modulus"));
        }
        let b = base.rem(modulus)?;
        let mut acc = Gf2Poly::one();
        if e == 0 {
            return Ok(acc);
        }
        for i in (0..128 - e.leading_zeros()).rev() {
            acc = acc.square().rem(modulus)?;
            if e >> i & 1 == 1 {
                acc = acc.mulmod(&b, modulus)?;
            }
        }
        Ok(acc)
    }

    /// `(x+1)^n`; coefficient `i` is `C(n, i) mod 2`, i.e. set iff `i & n == i`.
    pub fn one_plus_x_pow(n: usize) -> Gf2Poly {
        let mut words = vec![0u64; n / 64 + 1];
        // Enumerate submasks of n.
        let mut s = n;
        loop {
            words[s / 64] |= 1 << (s % 64);
            if s == 0 {
                break;
            }
            s = (s - 1) & n;
        }
        Self::from_words(words)
    }

    /// Lowest-degree word first, 16 hex digits per word. The zero polynomial
    /// is a single all-zero word.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0".repeat(16);
        }
        self.words.iter().map(|w| format!("{w:016x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Gf2Poly> {
        let s = s.trim();
        if s.is_empty() || !s.len().is_multiple_of(16) {
            return Err(Error::Parse(format!(
                "bad polynomial hex length {}",
                s.len()
            )));
        }
        let words = (0..s.len() / 16)
            .map(|i| {
                u64::from_str_radix(&s[i * 16..(i + 1) * 16], 16)
                    .map_err(|e| Error::Parse(format!("bad polynomial hex: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_words(words))
    }

    /// Rabin's test: `f` of degree `t` is irreducible iff `x^(2^t) = x mod f`
    /// and `gcd(x^(2^(t/q)) - x, f) = 1` for every prime `q | t`.
    pub fn is_irreducible(&self) -> bool {
        let t = match self.deg() {
            None | Some(0) => return false,
            Some(t) => t,
        };
        if t == 1 {
            return true;
        }
        let x = Gf2Poly::x();
        let mut cuts: Vec<usize> = super::numtheory::factor_u64(t as u64)
            .into_iter()
            .map(|(q, _)| t / q as usize)
            .collect();
        cuts.sort_unstable();
        let mut xp = x.clone();
        let mut done = 0;
        for cut in cuts.iter().copied() {
            while done < cut {
                xp = xp.square().rem(self).expect("nonzero modulus");
                done += 1;
            }
            let g = Gf2Poly::gcd(&(&xp + &x), self);
            if !g.is_one() {
                return false;
            }
        }
        while done < t {
            xp = xp.square().rem(self).expect("nonzero modulus");
            done += 1;
        }
        xp == x.rem(self).expect("nonzero modulus")
    }
}

pub(crate) fn normalize(words: &mut Vec<u64>) {
    while words.last() == Some(&0) {
        words.pop();
    }
}

pub(crate) fn deg_of(words: &[u64]) -> Option<usize> {
    let mut n = words.len();
    while n > 0 && words[n - 1] == 0 {
        n -= 1;
    }
    if n == 0 {
        return None;
    }
    Some((n - 1) * 64 + 63 - words[n - 1].leading_zeros() as usize)
}

/// `dst ^= src << shift`; `dst` must be long enough.
pub(crate) fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let off = shift / 64;
    let s = shift % 64;
    if s == 0 {
        for (d, &w) in dst[off..].iter_mut().zip(src) {
            *d ^= w;
        }
        return;
    }
    let mut carry = 0u64;
    for (i, &w) in src.iter().enumerate() {
        dst[off + i] ^= (w << s) | carry;
        carry = w >> (64 - s);
    }
    if carry != 0 {
        dst[off + src.len()] ^= carry;
    }
}

/// Long division remainder, in place. `div_deg` is the divisor's degree.
pub(crate) fn reduce_words(a: &mut Vec<u64>, divisor: &[u64], div_deg: usize) {
    let div_words = div_deg / 64 + 1;
    let divisor = &divisor[..div_words];
    loop {
        normalize(a);
        let da = match deg_of(a) {
            Some(d) if d >= div_deg => d,
            _ => return,
        };
        let shift = da - div_deg;
        xor_shifted(a, divisor, shift);
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

impl fmt::Display for Gf2Poly {
    /// Human-readable form, highest degree first, e.g. `x^3 + x + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<usize> = self.support().collect();
        let mut first = true;
        for &e in terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}

impl PartialOrd for Gf2Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gf2Poly {
    /// Orders by degree, then lexicographically from the top coefficient.
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl Add for &Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        let (long, short) = if self.words.len() >= rhs.words.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut words = long.words.clone();
        for (d, s) in words.iter_mut().zip(&short.words) {
            *d ^= s;
        }
        Gf2Poly::from_words(words)
    }
}

impl Add for Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: Gf2Poly) -> Gf2Poly {
        &self + &rhs
    }
}

impl AddAssign<&Gf2Poly> for Gf2Poly {
    fn add_assign(&mut self, rhs: &Gf2Poly) {
        if self.words.len() < rhs.words.len() {
            self.words.resize(rhs.words.len(), 0);
        }
        for (d, s) in self.words.iter_mut().zip(&rhs.words) {
            *d ^= s;
        }
        normalize(&mut self.words);
    }
}

impl Mul for &Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || rhs.is_zero() {
            return Gf2Poly::zero();
        }
        let mut out = vec![0u64; self.words.len() + rhs.words.len()];
        clmul::mul_slices_into(&self.words, &rhs.words, &mut out);
        Gf2Poly::from_words(out)
    }
}

impl Mul for Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: Gf2Poly) -> Gf2Poly {
        &self * &rhs
    }
}
