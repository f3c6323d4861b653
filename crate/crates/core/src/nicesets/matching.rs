//! Matching vector families: `(u_i, v_i) = 0` and `(u_j, v_i) ∈ S` for
//! `i != j`, all over Z_p.

use std::fmt;
use std::str::FromStr;

use crate::algebra::numtheory::{pow_mod, PrimeCtx};
use crate::nicesets::algebraic::{parse_residues, subgroup_2};
use crate::{Error, Result};

/// Default cap on tensor-power vector length.
pub const DEFAULT_TENSOR_CAP: usize = 1 << 22;
/// Default cap on the size of an incidence family.
pub const DEFAULT_FAMILY_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingFamily {
    pub p: u64,
    pub m: usize,
    pub u: Vec<Vec<u64>>,
    pub v: Vec<Vec<u64>>,
    /// Sorted target set inside `Z_p^*`.
    pub s: Vec<u64>,
}

impl MatchingFamily {
    pub fn n(&self) -> usize {
        self.u.len()
    }
}

pub fn dot(p: u64, a: &[u64], b: &[u64]) -> u64 {
    let acc = a.iter().zip(b).fold(0u128, |acc, (&x, &y)| {
        (acc + x as u128 * y as u128) % p as u128
    });
    acc as u64
}

/// `u_i = e_i`, `v_i = 1 - e_i`: every cross product is `1 = 2^0`.
pub fn trivial_family(p: u64, m: usize) -> Result<MatchingFamily> {
    if m < 2 {
        return Err(Error::usage("a matching family needs m >= 2"));
    }
    let u = (0..m)
        .map(|i| (0..m).map(|j| (i == j) as u64).collect())
        .collect();
    let v = (0..m)
        .map(|i| (0..m).map(|j| (i != j) as u64).collect())
        .collect();
    Ok(MatchingFamily {
        p,
        m,
        u,
        v,
        s: subgroup_2(p)?,
    })
}

/// One pair per `(p-1)`-subset `T` of `[m']`: `u_T = 1_T`, `v_T = 1 - 1_T`.
/// `(u_S, v_T) = (p - 1) - |S ∩ T|`, which is nonzero for `S != T`.
pub fn incidence_family(p: u64, m_prime: usize) -> Result<MatchingFamily> {
    PrimeCtx::new(p)?;
    let r = (p - 1) as usize;
    if m_prime < r {
        return Err(Error::usage(format!(
            "incidence family needs m' >= p - 1 = {r}, got {m_prime}"
        )));
    }
    let n = binomial(m_prime as u64, r as u64);
    if n > DEFAULT_FAMILY_CAP as u128 {
        return Err(Error::ResourceLimit(format!(
            "C({m_prime}, {r}) = {n} vectors exceed the cap"
        )));
    }
    let mut u = Vec::with_capacity(n as usize);
    let mut v = Vec::with_capacity(n as usize);
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        let mut ind = vec![0u64; m_prime];
        for &i in &subset {
            ind[i] = 1;
        }
        v.push(ind.iter().map(|&b| 1 - b).collect());
        u.push(ind);
        // next r-subset in lexicographic order
        let Some(pos) = (0..r).rev().find(|&i| subset[i] != i + m_prime - r) else {
            break;
        };
        subset[pos] += 1;
        for j in pos + 1..r {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(MatchingFamily {
        p,
        m: m_prime,
        u,
        v,
        s: (1..p).collect(),
    })
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `a^{⊗w}` with index `(i_1, ..., i_w) ↦ i_1 m^{w-1} + ... + i_w`.
pub fn tensor_power(p: u64, a: &[u64], w: u32) -> Vec<u64> {
    let mut out = vec![1u64];
    for _ in 0..w {
        out = tensor(p, &out, a);
    }
    out
}

pub fn tensor(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter()
        .flat_map(|&x| {
            b.iter()
                .map(move |&y| (x as u128 * y as u128 % p as u128) as u64)
        })
        .collect()
}

/// `{z^w : z ∈ S}`, sorted.
pub fn power_image(p: u64, s: &[u64], w: u64) -> Vec<u64> {
    let mut img: Vec<u64> = s.iter().map(|&z| pow_mod(z, w, p)).collect();
    img.sort_unstable();
    img.dedup();
    img
}

/// Replaces every vector by its `w`-th tensor power; dot products become
/// `w`-th powers and the target set becomes `{z^w : z ∈ S}`.
pub fn tensor_power_family(fam: &MatchingFamily, w: u32) -> Result<MatchingFamily> {
    tensor_power_family_with_cap(fam, w, DEFAULT_TENSOR_CAP)
}

pub fn tensor_power_family_with_cap(
    fam: &MatchingFamily,
    w: u32,
    cap: usize,
) -> Result<MatchingFamily> {
    if w == 0 {
        return Err(Error::usage("tensor power must be >= 1"));
    }
    let len = (fam.m as u128)
        .checked_pow(w)
        .filter(|&l| l <= cap as u128)
        .ok_or_else(|| {
            Error::ResourceLimit(format!("tensor length {}^{w} exceeds the cap {cap}", fam.m))
        })? as usize;
    let power = |x: &Vec<u64>| tensor_power(fam.p, x, w);
    Ok(MatchingFamily {
        p: fam.p,
        m: len,
        u: fam.u.iter().map(power).collect(),
        v: fam.v.iter().map(power).collect(),
        s: power_image(fam.p, &fam.s, w as u64),
    })
}

/// `incidence_family(p, m')` raised to `w = (p-1)/ord2(p)`, which lands
/// every cross product in `⟨2⟩`.
pub fn subgroup_family(p: u64, m_prime: usize) -> Result<MatchingFamily> {
    let ctx = PrimeCtx::new(p)?;
    tensor_power_family(&incidence_family(p, m_prime)?, ((p - 1) / ctx.t) as u32)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingViolation {
    Shape,
    Diagonal { i: usize, value: u64 },
    OffDiagonal { i: usize, j: usize, value: u64 },
}

impl fmt::Display for MatchingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingViolation::Shape => write!(f, "vectors have inconsistent lengths"),
            MatchingViolation::Diagonal { i, value } => write!(f, "(u_{i}, v_{i}) = {value} != 0"),
            MatchingViolation::OffDiagonal { i, j, value } => {
                write!(f, "(u_{j}, v_{i}) = {value} not in S")
            }
        }
    }
}

/// Exhaustive `n^2` check of both conditions against `fam.s`.
pub fn verify_matching(fam: &MatchingFamily) -> std::result::Result<(), MatchingViolation> {
    let n = fam.n();
    if fam.v.len() != n || fam.u.iter().chain(&fam.v).any(|x| x.len() != fam.m) {
        return Err(MatchingViolation::Shape);
    }
    let mut in_s = vec![false; fam.p as usize];
    for &z in &fam.s {
        if let Some(slot) = in_s.get_mut(z as usize) {
            *slot = true;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let value = dot(fam.p, &fam.u[j], &fam.v[i]);
            if i == j && value != 0 {
                return Err(MatchingViolation::Diagonal { i, value });
            }
            if i != j && !in_s[value as usize] {
                return Err(MatchingViolation::OffDiagonal { i, j, value });
            }
        }
    }
    Ok(())
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Fixture form: header `p m n`, then the `n` vectors `u_i`, then the `n`
/// vectors `v_i`, one comma-separated line each, then `S s_1,s_2,...`.
impl fmt::Display for MatchingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.p, self.m, self.n())?;
        for x in self.u.iter().chain(&self.v) {
            writeln!(f, "{}", join(x))?;
        }
        writeln!(f, "S {}", join(&self.s))
    }
}

impl FromStr for MatchingFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))?
            .split_whitespace()
            .map(|x| {
                x.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{x}: {e}")))
            })
            .collect::<Result<_>>()?;
        let [p, m, n] = header[..] else {
            return Err(Error::Parse("header must be `p m n`".into()));
        };
        let mut next_vec = || -> Result<Vec<u64>> {
            let v = parse_residues(
                lines
                    .next()
                    .ok_or_else(|| Error::Parse("missing vector".into()))?,
            )?;
            if v.len() != m {
                return Err(Error::Parse(format!(
                    "vector of length {} where m = {m}",
                    v.len()
                )));
            }
            Ok(v)
        };
        let u = (0..n).map(|_| next_vec()).collect::<Result<Vec<_>>>()?;
        let v = (0..n).map(|_| next_vec()).collect::<Result<Vec<_>>>()?;
        let s_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing S line".into()))?;
        let s_set = parse_residues(
            s_line
                .strip_prefix("S ")
                .ok_or_else(|| Error::Parse("S line must start with `S `".into()))?,
        )?;
        Ok(MatchingFamily {
            p: p as u64,
            m,
            u,
            v,
            s: s_set,
        })
    }
}
