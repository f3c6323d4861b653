//! Algebraically nice pairs `(S0, S1)`: `|S1|` odd, `S0` nonempty, and
//! `|S0 ∩ (α + β S1)|` even for every `α ∈ Z_p` and `β ∈ ⟨2⟩`.
//!
//! Writing `φ_T = Σ_{s∈T} x^s` in `R = GF(2)[x]/(x^p - 1)`, the parity of
//! `|S0 ∩ (α + β S1)|` is the inner product of `φ_{S0}` with
//! `x^α φ_{S1}(x^β)`. For `β = 2^j` the latter is `x^α φ_{S1}^{2^j}`, so all
//! of them lie in the ideal `L = (τ)`, `τ = gcd(x^p - 1, φ_{S1})`. Any
//! support of a codeword in the dual code `L^⊥` is therefore a valid `S0`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::algebra::gf2poly::Gf2Poly;
use crate::algebra::numtheory::PrimeCtx;
use crate::rootsum::witness::DependencyWitness;
use crate::{seed, Error, Result};

/// Dual codes of at most this dimension are searched exhaustively.
pub const EXHAUSTIVE_DUAL_DIM: usize = 20;
/// Random restarts for larger dual codes.
pub const DEFAULT_S0_BUDGET: usize = 256;

/// `⟨2⟩ ⊂ Z_p^*`, sorted.
pub fn subgroup_2(p: u64) -> Result<Vec<u64>> {
    let mut v = PrimeCtx::new(p)?.powers_of_two();
    v.sort_unstable();
    Ok(v)
}

/// `S1` is the exponent set of a re-verified dependency witness.
pub fn build_s1(witness: &DependencyWitness) -> Result<Vec<u64>> {
    witness.verify()?;
    let mut s1 = witness.exponents.clone();
    s1.sort_unstable();
    Ok(s1)
}

fn x_pow_p_minus_1(p: u64) -> Gf2Poly {
    let mut m = Gf2Poly::monomial(p as usize);
    m.flip(0);
    m
}

/// `τ = gcd(x^p - 1, φ_{S1})`. A constant result means `S1` yields no
/// usable code.
pub fn compute_tau(p: u64, s1: &[u64]) -> Result<Gf2Poly> {
    if s1.is_empty() {
        return Err(Error::usage("S1 must be nonempty"));
    }
    let mut phi = Gf2Poly::zero();
    for &s in s1 {
        if s >= p {
            return Err(Error::usage(format!("{s} is not a residue mod {p}")));
        }
        phi.flip(s as usize);
    }
    Ok(Gf2Poly::gcd(&x_pow_p_minus_1(p), &phi))
}

/// `a · b mod (x^p - 1)`.
fn mul_cyclic(a: &Gf2Poly, b: &Gf2Poly, p: u64) -> Gf2Poly {
    let prod = a * b;
    let mut out = Gf2Poly::zero();
    for e in prod.support() {
        out.flip(e % p as usize);
    }
    out
}

/// Generator and dimension of `L^⊥` for `L = (τ)`: the reciprocal of
/// `h = (x^p - 1)/τ`, dimension `deg τ`.
pub fn dual_code(p: u64, tau: &Gf2Poly) -> Result<(Gf2Poly, usize)> {
    let (h, r) = x_pow_p_minus_1(p).divrem(tau)?;
    if !r.is_zero() {
        return Err(Error::usage("τ does not divide x^p - 1"));
    }
    let dim = tau.deg().unwrap_or(0);
    Ok((h.reciprocal(), dim))
}

/// A large-weight support `S0` with `φ_{S0} ∈ L^⊥`.
///
/// Exhaustive over `L^⊥` when its dimension is at most 20 (maximum weight,
/// ties to the smallest message `a` as a bit mask); otherwise random
/// messages refined by single-generator hill climbing until the weight
/// reaches `⌈p/2⌉`. The result is always checked with
/// [`verify_algebraic_niceness`].
pub fn build_s0(p: u64, s1: &[u64], seed: u64) -> Result<Vec<u64>> {
    build_s0_with_budget(p, s1, seed, DEFAULT_S0_BUDGET)
}

pub fn build_s0_with_budget(p: u64, s1: &[u64], seed: u64, budget: usize) -> Result<Vec<u64>> {
    build_s0_inner(p, s1, seed, budget, EXHAUSTIVE_DUAL_DIM)
}

fn build_s0_inner(
    p: u64,
    s1: &[u64],
    seed: u64,
    budget: usize,
    exhaustive_dim: usize,
) -> Result<Vec<u64>> {
    let tau = compute_tau(p, s1)?;
    if tau.is_constant() {
        return Err(Error::usage(format!(
            "gcd(x^{p} - 1, φ_S1) is constant; S1 gives no code"
        )));
    }
    let (gen, dim) = dual_code(p, &tau)?;
    let target = p.div_ceil(2) as usize;
    // basis[i] = x^i · gen mod (x^p - 1), as dense words
    let basis: Vec<Vec<u64>> = (0..dim)
        .map(|i| {
            let mut w = mul_cyclic(&Gf2Poly::monomial(i), &gen, p).into_words();
            w.resize((p as usize).div_ceil(64), 0);
            w
        })
        .collect();
    let nwords = (p as usize).div_ceil(64);
    let weight = |c: &[u64]| c.iter().map(|w| w.count_ones() as usize).sum::<usize>();
    let xor = |c: &mut [u64], b: &[u64]| c.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);

    let best = if dim <= exhaustive_dim {
        // Gray-code walk over all nonzero messages.
        let mut c = vec![0u64; nwords];
        let mut best: Option<(usize, u64, Vec<u64>)> = None;
        for step in 1u64..1 << dim {
            xor(&mut c, &basis[step.trailing_zeros() as usize]);
            let a = step ^ (step >> 1);
            let w = weight(&c);
            if best
                .as_ref()
                .is_none_or(|(bw, ba, _)| w > *bw || (w == *bw && a < *ba))
            {
                best = Some((w, a, c.clone()));
            }
        }
        best.map(|(_, _, c)| c)
    } else {
        let mut rng = seed::rng(seed);
        let mut found = None;
        for _ in 0..budget {
            let mut c = vec![0u64; nwords];
            for b in &basis {
                if rng.gen::<bool>() {
                    xor(&mut c, b);
                }
            }
            let mut w = weight(&c);
            let mut improved = true;
            while w < target && improved {
                improved = false;
                for b in &basis {
                    xor(&mut c, b);
                    let nw = weight(&c);
                    if nw > w {
                        w = nw;
                        improved = true;
                    } else {
                        xor(&mut c, b);
                    }
                }
            }
            if w >= target {
                found = Some(c);
                break;
            }
        }
        found
    };
    let c = best.ok_or_else(|| {
        Error::SearchExhausted(format!(
            "no dual codeword of weight >= {target} for p = {p}"
        ))
    })?;
    let s0: Vec<u64> = Gf2Poly::from_words(c).support().map(|e| e as u64).collect();
    if s0.len() < target {
        return Err(Error::SearchExhausted(format!(
            "best dual codeword has weight {} < {target} for p = {p}",
            s0.len()
        )));
    }
    if let Err(v) = verify_algebraic_niceness(p, &s0, s1) {
        return Err(Error::Verification(format!("constructed S0 fails: {v}")));
    }
    Ok(s0)
}

/// The first reason a candidate pair is not algebraically nice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NicenessViolation {
    EvenS1(usize),
    EmptyS0,
    OutOfRange(u64),
    /// `|S0 ∩ (α + β S1)|` is odd.
    OddIntersection {
        alpha: u64,
        beta: u64,
    },
}

impl fmt::Display for NicenessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NicenessViolation::EvenS1(n) => write!(f, "|S1| = {n} is even"),
            NicenessViolation::EmptyS0 => write!(f, "S0 is empty"),
            NicenessViolation::OutOfRange(x) => write!(f, "{x} is not a residue"),
            NicenessViolation::OddIntersection { alpha, beta } => {
                write!(f, "|S0 ∩ ({alpha} + {beta}·S1)| is odd")
            }
        }
    }
}

/// Exhaustive check over all `p · ord2(p)` pairs `(α, β)`.
pub fn verify_algebraic_niceness(
    p: u64,
    s0: &[u64],
    s1: &[u64],
) -> std::result::Result<(), NicenessViolation> {
    if s1.len().is_multiple_of(2) {
        return Err(NicenessViolation::EvenS1(s1.len()));
    }
    if s0.is_empty() {
        return Err(NicenessViolation::EmptyS0);
    }
    if let Some(&x) = s0.iter().chain(s1).find(|&&x| x >= p) {
        return Err(NicenessViolation::OutOfRange(x));
    }
    let betas = subgroup_2(p).map_err(|_| NicenessViolation::OutOfRange(p))?;
    let mut in_s0 = vec![false; p as usize];
    for &s in s0 {
        in_s0[s as usize] = true;
    }
    for alpha in 0..p {
        for &beta in &betas {
            let count = s1
                .iter()
                .filter(|&&s| {
                    in_s0[((alpha as u128 + beta as u128 * s as u128) % p as u128) as usize]
                })
                .count();
            if count % 2 == 1 {
                return Err(NicenessViolation::OddIntersection { alpha, beta });
            }
        }
    }
    Ok(())
}

/// A verified algebraically nice pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicNicePair {
    pub p: u64,
    pub s1: Vec<u64>,
    pub s0: Vec<u64>,
    pub tau: Gf2Poly,
}

impl AlgebraicNicePair {
    /// Builds `S1` from the witness and `S0` from the dual code.
    pub fn from_witness(witness: &DependencyWitness, seed: u64) -> Result<Self> {
        let s1 = build_s1(witness)?;
        let s0 = build_s0(witness.p, &s1, seed)?;
        Self::new(witness.p, s1, s0)
    }

    /// Checks every invariant; `S0` and `S1` are stored sorted.
    pub fn new(p: u64, mut s1: Vec<u64>, mut s0: Vec<u64>) -> Result<Self> {
        s1.sort_unstable();
        s0.sort_unstable();
        if s1.windows(2).any(|w| w[0] == w[1]) || s0.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Verification("repeated residue".into()));
        }
        verify_algebraic_niceness(p, &s0, &s1).map_err(|v| Error::Verification(v.to_string()))?;
        let tau = compute_tau(p, &s1)?;
        if tau.is_constant() {
            return Err(Error::Verification("τ is constant".into()));
        }
        Ok(AlgebraicNicePair { p, s1, s0, tau })
    }

    pub fn k_prime(&self) -> usize {
        self.s1.len()
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

pub(crate) fn parse_residues(line: &str) -> Result<Vec<u64>> {
    if line.trim().is_empty() {
        return Ok(Vec::new());
    }
    line.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("{x}: {e}")))
        })
        .collect()
}

/// Fixture form: header `p |S1| |S0|`, then `S1` and `S0` as
/// comma-separated residues on one line each.
impl fmt::Display for AlgebraicNicePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.p, self.s1.len(), self.s0.len())?;
        writeln!(f, "{}", join(&self.s1))?;
        writeln!(f, "{}", join(&self.s0))
    }
}

impl FromStr for AlgebraicNicePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header: Vec<u64> = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))?
            .split_whitespace()
            .map(|x| {
                x.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("{x}: {e}")))
            })
            .collect::<Result<_>>()?;
        let [p, n1, n0] = header[..] else {
            return Err(Error::Parse("header must be `p |S1| |S0|`".into()));
        };
        let s1 = parse_residues(lines.next().unwrap_or(""))?;
        let s0 = parse_residues(lines.next().unwrap_or(""))?;
        if s1.len() as u64 != n1 || s0.len() as u64 != n0 {
            return Err(Error::Parse("set sizes disagree with the header".into()));
        }
        AlgebraicNicePair::new(p, s1, s0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsum::{extract_witness_3, RootsOfUnity};

    #[test]
    fn subgroup_examples() {
        assert_eq!(subgroup_2(7).unwrap(), vec![1, 2, 4]);
        assert_eq!(subgroup_2(73).unwrap().len(), 9);
        assert_eq!(subgroup_2(3).unwrap(), vec![1, 2]);
    }

    #[test]
    fn tau_examples() {
        assert_eq!(
            compute_tau(7, &[0, 1, 3]).unwrap(),
            Gf2Poly::from_exponents([3, 1, 0])
        );
        assert!(compute_tau(7, &[0]).unwrap().is_one());
        assert_eq!(
            compute_tau(3, &[0, 1, 2]).unwrap(),
            Gf2Poly::from_exponents([2, 1, 0])
        );
    }

    #[test]
    fn s0_examples() {
        assert_eq!(build_s0(7, &[0, 1, 3], 0).unwrap(), vec![0, 2, 3, 4]);
        let s0 = build_s0(3, &[0, 1, 2], 0).unwrap();
        assert_eq!(s0.len(), 2);
        assert!(matches!(build_s0(7, &[0], 0), Err(Error::Usage(_))));
    }

    #[test]
    fn verifier_examples() {
        assert_eq!(
            verify_algebraic_niceness(7, &[0, 2, 3, 4], &[0, 1, 3]),
            Ok(())
        );
        assert_eq!(
            verify_algebraic_niceness(7, &[0], &[0, 1, 3]),
            Err(NicenessViolation::OddIntersection { alpha: 0, beta: 1 })
        );
        assert_eq!(
            verify_algebraic_niceness(7, &[], &[0, 1, 3]),
            Err(NicenessViolation::EmptyS0)
        );
        assert_eq!(
            verify_algebraic_niceness(7, &[0, 2], &[0, 1]),
            Err(NicenessViolation::EvenS1(2))
        );
    }

    #[test]
    fn pair_from_witness_and_fixture_round_trip() {
        let w = extract_witness_3(&RootsOfUnity::new(7, 1).unwrap()).unwrap();
        assert_eq!(build_s1(&w).unwrap(), vec![0, 1, 3]);
        let pair = AlgebraicNicePair::from_witness(&w, 0).unwrap();
        assert_eq!(pair.s0.len(), 4);
        let text = pair.to_string();
        assert_eq!(text, "7 3 4\n0,1,3\n0,2,3,4\n");
        assert_eq!(text.parse::<AlgebraicNicePair>().unwrap(), pair);
        assert!("7 3 1\n0,1,3\n0\n".parse::<AlgebraicNicePair>().is_err());
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let mut w = extract_witness_3(&RootsOfUnity::new(7, 1).unwrap()).unwrap();
        w.exponents = vec![0, 1, 2];
        assert!(build_s1(&w).is_err());
    }

    #[test]
    fn tau_divides_and_dual_is_orthogonal() {
        for (p, s1) in [
            (7u64, vec![0u64, 1, 3]),
            (73, vec![0, 1, 5]),
            (31, vec![0, 1, 2, 3, 5]),
        ] {
            let tau = compute_tau(p, &s1).unwrap();
            assert!(x_pow_p_minus_1(p).rem(&tau).unwrap().is_zero());
            if tau.is_constant() {
                continue;
            }
            let (gen, _) = dual_code(p, &tau).unwrap();
            // every shift of the dual generator is orthogonal to every shift of τ
            for i in 0..p as usize {
                let a = mul_cyclic(&Gf2Poly::monomial(i), &gen, p);
                let dot = a.support().filter(|&e| tau.coeff(e)).count();
                assert_eq!(dot % 2, 0);
            }
        }
    }

    #[test]
    fn randomized_path_certifies() {
        let w = extract_witness_3(&RootsOfUnity::new(127, 2).unwrap()).unwrap();
        let s1 = build_s1(&w).unwrap();
        let s0 = build_s0_inner(127, &s1, 5, 64, 0).unwrap();
        assert!(s0.len() >= 64);
        assert_eq!(verify_algebraic_niceness(127, &s0, &s1), Ok(()));
    }
}
