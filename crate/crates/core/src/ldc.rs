//! The binary code over index space `Z_p^m` built from a matching family
//! `{(u_j, v_j)}` and a nice pair `(S0, S1)`:
//!
//! * `Enc(x)_w = Σ_j x_j [(u_j, w) ∈ S0]` (mod 2);
//! * to decode `x_i`, draw `w` uniformly with `(u_i, w) ∈ S0` and return
//!   `Σ_{λ∈S1} y_{w + λ v_i}`.
//!
//! Indices are mixed radix, least significant coordinate first:
//! `w ↦ w_0 + w_1 p + ... + w_{m-1} p^{m-1}`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::nicesets::algebraic::{subgroup_2, verify_algebraic_niceness, AlgebraicNicePair};
use crate::nicesets::matching::{dot, verify_matching, MatchingFamily};
use crate::{seed, Error, Result};

/// Default cap on the codeword length `N = p^m` in bits.
pub const DEFAULT_MAX_LEN: u64 = 1 << 28;

#[derive(Debug, Clone)]
pub struct LdcParams {
    pub p: u64,
    pub m: usize,
    pub family: MatchingFamily,
    pub nice: AlgebraicNicePair,
    /// Codeword length `p^m`.
    pub len: usize,
    in_s0: Vec<bool>,
}

impl LdcParams {
    pub fn new(family: MatchingFamily, nice: AlgebraicNicePair) -> Result<Self> {
        Self::with_max_len(family, nice, DEFAULT_MAX_LEN)
    }

    /// Re-verifies both certificates and that the family's target set lies
    /// inside `⟨2⟩`.
    pub fn with_max_len(
        family: MatchingFamily,
        nice: AlgebraicNicePair,
        max_len: u64,
    ) -> Result<Self> {
        let p = family.p;
        if nice.p != p {
            return Err(Error::usage(format!(
                "family is over Z_{p}, nice pair over Z_{}",
                nice.p
            )));
        }
        let subgroup = subgroup_2(p)?;
        if let Some(z) = family.s.iter().find(|z| subgroup.binary_search(z).is_err()) {
            return Err(Error::Verification(format!(
                "target value {z} is outside ⟨2⟩"
            )));
        }
        verify_algebraic_niceness(p, &nice.s0, &nice.s1)
            .map_err(|v| Error::Verification(v.to_string()))?;
        if let Some(i) = family.u.iter().position(|u| u.iter().all(|&x| x % p == 0)) {
            return Err(Error::usage(format!("u_{i} = 0 makes (u_{i}, w) constant")));
        }
        verify_matching(&family).map_err(|v| Error::Verification(v.to_string()))?;
        let len = (p as u128)
            .checked_pow(family.m as u32)
            .filter(|&n| n <= max_len as u128)
            .ok_or_else(|| {
                Error::ResourceLimit(format!("{p}^{} exceeds the length cap {max_len}", family.m))
            })? as usize;
        let mut in_s0 = vec![false; p as usize];
        for &s in &nice.s0 {
            in_s0[s as usize] = true;
        }
        Ok(LdcParams {
            p,
            m: family.m,
            len,
            family,
            nice,
            in_s0,
        })
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    /// Number of queries `k' = |S1|`.
    pub fn k(&self) -> usize {
        self.nice.s1.len()
    }

    pub fn index_of(&self, w: &[u64]) -> usize {
        w.iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn point_of(&self, mut idx: usize) -> Vec<u64> {
        (0..self.m)
            .map(|_| {
                let c = (idx % self.p as usize) as u64;
                idx /= self.p as usize;
                c
            })
            .collect()
    }

    pub fn in_s0(&self, z: u64) -> bool {
        self.in_s0[z as usize]
    }
}

/// A packed bit array of length `p^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub len: usize,
    pub words: Vec<u64>,
}

impl Codeword {
    pub fn zeros(len: usize) -> Self {
        Codeword {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &Codeword) {
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a ^= b);
    }

    pub fn distance(&self, other: &Codeword) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Header line `p m n |S0| |S1|`, then `ceil(N/8)` raw bytes, bit `i`
    /// at bit `i % 8` of byte `i / 8`.
    pub fn write_to<W: Write>(&self, params: &LdcParams, mut out: W) -> Result<()> {
        writeln!(
            out,
            "{} {} {} {} {}",
            params.p,
            params.m,
            params.n(),
            params.nice.s0.len(),
            params.nice.s1.len()
        )?;
        let bytes: Vec<u8> = self
            .words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(self.len.div_ceil(8))
            .collect();
        out.write_all(&bytes)?;
        Ok(())
    }

    /// Reads a codeword written by [`Codeword::write_to`], checking the
    /// header against `params`.
    pub fn read_from<R: BufRead>(params: &LdcParams, mut input: R) -> Result<Self> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        let expected = format!(
            "{} {} {} {} {}",
            params.p,
            params.m,
            params.n(),
            params.nice.s0.len(),
            params.nice.s1.len()
        );
        if header.trim_end() != expected {
            return Err(Error::Parse(format!(
                "header `{}` does not match `{expected}`",
                header.trim_end()
            )));
        }
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        if bytes.len() != params.len.div_ceil(8) {
            return Err(Error::Parse(format!(
                "expected {} bytes, got {}",
                params.len.div_ceil(8),
                bytes.len()
            )));
        }
        let mut cw = Codeword::zeros(params.len);
        for (i, &b) in bytes.iter().enumerate() {
            cw.words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        Ok(cw)
    }
}

/// Encodes `x` (one bool per message bit). Parallel over 64-bit words.
pub fn encode(params: &LdcParams, x: &[bool]) -> Result<Codeword> {
    if x.len() != params.n() {
        return Err(Error::usage(format!(
            "message has {} bits, code expects {}",
            x.len(),
            params.n()
        )));
    }
    let active: Vec<&Vec<u64>> = params
        .family
        .u
        .iter()
        .zip(x)
        .filter(|(_, &b)| b)
        .map(|(u, _)| u)
        .collect();
    let mut cw = Codeword::zeros(params.len);
    const CHUNK: usize = 256;
    let p = params.p;
    cw.words
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, words)| {
            let start = c * CHUNK * 64;
            let mut w = params.point_of(start);
            let mut dots: Vec<u64> = active.iter().map(|u| dot(p, u, &w)).collect();
            for (k, word) in words.iter_mut().enumerate() {
                for bit in 0..64 {
                    let idx = start + 64 * k + bit;
                    if idx >= params.len {
                        return;
                    }
                    let parity = dots.iter().filter(|&&d| params.in_s0(d)).count() & 1;
                    *word |= (parity as u64) << bit;
                    // Advance w in mixed radix. Both w_c -> w_c + 1 and the
                    // wrap p - 1 -> 0 add u_j[c] to (u_j, w) mod p.
                    for coord in 0..params.m {
                        for (d, u) in dots.iter_mut().zip(&active) {
                            *d = (*d + u[coord]) % p;
                        }
                        if w[coord] + 1 < p {
                            w[coord] += 1;
                            break;
                        }
                        w[coord] = 0;
                    }
                }
            }
        });
    Ok(cw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTrace {
    pub w: Vec<u64>,
    /// Codeword indices of `w + λ v_i`, in the order of `S1`.
    pub positions: Vec<usize>,
    pub output: bool,
}

/// Decodes bit `i` (0-based) for a fixed choice of `w`; `(u_i, w) ∈ S0` is
/// the caller's responsibility.
pub fn decode_with_w(params: &LdcParams, y: &Codeword, i: usize, w: &[u64]) -> DecodeTrace {
    let p = params.p;
    let v = &params.family.v[i];
    let positions: Vec<usize> = params
        .nice
        .s1
        .iter()
        .map(|&lambda| {
            let point: Vec<u64> = w
                .iter()
                .zip(v)
                .map(|(&a, &b)| ((a as u128 + lambda as u128 * b as u128) % p as u128) as u64)
                .collect();
            params.index_of(&point)
        })
        .collect();
    let output = positions.iter().fold(false, |acc, &q| acc ^ y.get(q));
    DecodeTrace {
        w: w.to_vec(),
        positions,
        output,
    }
}

/// Samples `w` uniformly from `{w : (u_i, w) ∈ S0}` by rejection and
/// returns the XOR of the `|S1|` queried bits.
pub fn decode_bit(params: &LdcParams, y: &Codeword, i: usize, seed: u64) -> Result<DecodeTrace> {
    if i >= params.n() {
        return Err(Error::usage(format!(
            "bit index {i} out of range 0..{}",
            params.n()
        )));
    }
    let mut rng = seed::rng(seed);
    let u = &params.family.u[i];
    loop {
        let w: Vec<u64> = (0..params.m).map(|_| rng.gen_range(0..params.p)).collect();
        if params.in_s0(dot(params.p, u, &w)) {
            return Ok(decode_with_w(params, y, i, &w));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionMode {
    Random,
    /// Flips the positions queried most often when decoding `target`.
    Greedy {
        target: usize,
    },
}

/// Flips exactly `floor(delta * N)` distinct positions.
pub fn corrupt(
    params: &LdcParams,
    y: &Codeword,
    delta: f64,
    mode: CorruptionMode,
    seed: u64,
) -> Result<Codeword> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::usage(format!("delta = {delta} is outside [0, 1]")));
    }
    let flips = ((delta * y.len as f64) + 1e-9).floor() as usize;
    let flips = flips.min(y.len);
    let mut rng = seed::rng(seed);
    let mut out = y.clone();
    match mode {
        CorruptionMode::Random => {
            for pos in sample(&mut rng, y.len, flips) {
                out.flip(pos);
            }
        }
        CorruptionMode::Greedy { target } => {
            let counts = query_counts(params, target)?;
            let mut order: Vec<usize> = (0..y.len).collect();
            order.shuffle(&mut rng);
            order.sort_by_key(|&q| std::cmp::Reverse(counts[q]));
            for &pos in &order[..flips] {
                out.flip(pos);
            }
        }
    }
    Ok(out)
}

/// How often each position is queried when decoding bit `i`, over every
/// valid `w`.
fn query_counts(params: &LdcParams, i: usize) -> Result<Vec<u32>> {
    if i >= params.n() {
        return Err(Error::usage(format!(
            "bit index {i} out of range 0..{}",
            params.n()
        )));
    }
    let zero = Codeword::zeros(params.len);
    let mut counts = vec![0u32; params.len];
    for idx in 0..params.len {
        let w = params.point_of(idx);
        if !params.in_s0(dot(params.p, &params.family.u[i], &w)) {
            continue;
        }
        for q in decode_with_w(params, &zero, i, &w).positions {
            counts[q] += 1;
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessStats {
    /// `|T_i| = |{w : (u_i, w) ∈ S0}|`.
    pub t_size: usize,
    /// Number of valid `w`.
    pub valid_w: usize,
    /// `query count ↦ number of positions with that count`, over all of
    /// Z_p^m (count 0 included).
    pub histogram: BTreeMap<u32, usize>,
    /// Positions queried that lie outside `T_i`.
    pub outside: usize,
    /// Every position of `T_i` is queried equally often.
    pub flat: bool,
}

/// Exhaustive tally of decoder queries for bit `i`.
pub fn smoothness_stats(params: &LdcParams, i: usize) -> Result<SmoothnessStats> {
    let counts = query_counts(params, i)?;
    let u = &params.family.u[i];
    let mut t_size = 0;
    let mut outside = 0;
    let mut histogram = BTreeMap::new();
    let mut in_t_counts = std::collections::BTreeSet::new();
    for (idx, &c) in counts.iter().enumerate() {
        let in_t = params.in_s0(dot(params.p, u, &params.point_of(idx)));
        *histogram.entry(c).or_insert(0) += 1;
        if in_t {
            t_size += 1;
            in_t_counts.insert(c);
        } else if c > 0 {
            outside += 1;
        }
    }
    Ok(SmoothnessStats {
        t_size,
        valid_w: t_size,
        histogram,
        outside,
        flat: in_t_counts.len() == 1 && outside == 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub delta: f64,
    pub trials: u64,
    pub errors: u64,
    pub rate: f64,
    /// `2 k δ` with `k = |S1|`.
    pub bound: f64,
    /// The bound is at least 1 and says nothing.
    pub vacuous: bool,
    /// `rate > bound + 4σ`, `σ` the binomial standard deviation at `bound`.
    pub violated: bool,
}

impl SimReport {
    pub const CSV_HEADER: &'static str = "delta,trials,errors,rate,bound,violated";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{}",
            self.delta, self.trials, self.errors, self.rate, self.bound, self.violated
        )
    }
}

/// Random message, random target bit and fresh corruption per trial. Trials
/// run in parallel with seeds derived from `(seed, trial)`.
pub fn simulate(
    params: &LdcParams,
    delta: f64,
    trials: u64,
    mode: CorruptionMode,
    seed: u64,
) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::usage("trials must be >= 1"));
    }
    let n = params.n();
    let basis: Vec<Codeword> = (0..n)
        .map(|j| {
            let mut x = vec![false; n];
            x[j] = true;
            encode(params, &x)
        })
        .collect::<Result<_>>()?;
    let greedy_counts = match mode {
        CorruptionMode::Greedy { target } => Some(query_counts(params, target)?),
        CorruptionMode::Random => None,
    };
    let errors: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<u64> {
            let trial_seed = seed::derive(seed, trial);
            let mut rng = seed::rng(trial_seed);
            let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let i = match mode {
                CorruptionMode::Greedy { target } => target,
                CorruptionMode::Random => rng.gen_range(0..n),
            };
            let mut cw = Codeword::zeros(params.len);
            for (b, e) in x.iter().zip(&basis) {
                if *b {
                    cw.xor_assign(e);
                }
            }
            let flips = ((delta * params.len as f64) + 1e-9).floor() as usize;
            let corrupted = match &greedy_counts {
                None => {
                    let mut y = cw;
                    for pos in sample(&mut rng, params.len, flips.min(params.len)) {
                        y.flip(pos);
                    }
                    y
                }
                Some(_) => corrupt(params, &cw, delta, mode, rng.gen())?,
            };
            let trace = decode_bit(params, &corrupted, i, rng.gen())?;
            Ok((trace.output != x[i]) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let rate = errors as f64 / trials as f64;
    let bound = 2.0 * params.k() as f64 * delta;
    let vacuous = bound >= 1.0;
    let sigma = (bound.min(1.0) * (1.0 - bound.min(1.0)) / trials as f64).sqrt();
    let violated = !vacuous && rate > bound + 4.0 * sigma;
    Ok(SimReport {
        delta,
        trials,
        errors,
        rate,
        bound,
        vacuous,
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nicesets::matching::trivial_family;

    fn seven(m: usize) -> LdcParams {
        let nice = AlgebraicNicePair::new(7, vec![0, 1, 3], vec![0, 2, 3, 4]).unwrap();
        LdcParams::new(trivial_family(7, m).unwrap(), nice).unwrap()
    }

    #[test]
    fn index_map_round_trips() {
        let params = seven(3);
        for idx in 0..params.len {
            assert_eq!(params.index_of(&params.point_of(idx)), idx);
        }
        assert_eq!(params.index_of(&[1, 0, 0]), 1);
        assert_eq!(params.index_of(&[0, 1, 0]), 7);
    }

    #[test]
    fn encode_examples() {
        let params = seven(4);
        assert_eq!(params.len, 2401);
        assert_eq!(encode(&params, &[false; 4]).unwrap().weight(), 0);
        let e1 = encode(&params, &[true, false, false, false]).unwrap();
        assert_eq!(e1.weight(), 1372);
        let e2 = encode(&params, &[false, true, false, false]).unwrap();
        let mut sum = e1.clone();
        sum.xor_assign(&e2);
        assert_eq!(encode(&params, &[true, true, false, false]).unwrap(), sum);
        assert!(encode(&params, &[true]).is_err());
    }

    #[test]
    fn encode_matches_direct_definition() {
        let params = seven(3);
        let x = [true, false, true];
        let cw = encode(&params, &x).unwrap();
        for idx in 0..params.len {
            let w = params.point_of(idx);
            let bit = (0..3)
                .filter(|&j| x[j] && params.in_s0(dot(7, &params.family.u[j], &w)))
                .count()
                % 2
                == 1;
            assert_eq!(cw.get(idx), bit);
        }
    }

    #[test]
    fn decoding_uncorrupted_and_fully_flipped() {
        let params = seven(4);
        let x = [true, false, true, true];
        let cw = encode(&params, &x).unwrap();
        for i in 0..4 {
            for s in 0..50 {
                let tr = decode_bit(&params, &cw, i, s).unwrap();
                assert_eq!(tr.output, x[i]);
                assert_eq!(tr.positions.len(), 3);
                let mut flipped = cw.clone();
                for &q in &tr.positions {
                    flipped.flip(q);
                }
                assert_eq!(decode_with_w(&params, &flipped, i, &tr.w).output, !x[i]);
            }
        }
    }

    #[test]
    fn corruption_counts() {
        let params = seven(4);
        let cw = encode(&params, &[true, true, false, false]).unwrap();
        assert_eq!(
            corrupt(&params, &cw, 0.0, CorruptionMode::Random, 1).unwrap(),
            cw
        );
        let one = corrupt(&params, &cw, 1.0 / 2401.0, CorruptionMode::Random, 1).unwrap();
        assert_eq!(one.distance(&cw), 1);
        assert_eq!(
            corrupt(&params, &cw, 0.05, CorruptionMode::Random, 1)
                .unwrap()
                .distance(&cw),
            120
        );
        let g = corrupt(&params, &cw, 0.05, CorruptionMode::Greedy { target: 0 }, 1).unwrap();
        assert_eq!(g.distance(&cw), 120);
    }

    #[test]
    fn smoothness_is_flat() {
        let params = seven(4);
        let s = smoothness_stats(&params, 0).unwrap();
        assert_eq!(s.t_size, 1372);
        assert!(s.flat);
        assert_eq!(s.outside, 0);
        assert_eq!(s.histogram[&3], 1372);
    }

    #[test]
    fn zero_u_is_rejected() {
        let nice = AlgebraicNicePair::new(7, vec![0, 1, 3], vec![0, 2, 3, 4]).unwrap();
        let mut fam = trivial_family(7, 3).unwrap();
        fam.u[0] = vec![0, 0, 0];
        assert!(matches!(LdcParams::new(fam, nice), Err(Error::Usage(_))));
    }

    #[test]
    fn simulate_zero_delta_and_vacuous() {
        let params = seven(3);
        let r = simulate(&params, 0.0, 200, CorruptionMode::Random, 9).unwrap();
        assert_eq!(r.errors, 0);
        let r = simulate(&params, 0.2, 50, CorruptionMode::Random, 9).unwrap();
        assert!(r.vacuous && !r.violated);
        assert_eq!(
            SimReport::CSV_HEADER,
            "delta,trials,errors,rate,bound,violated"
        );
    }

    #[test]
    fn persistence_round_trip() {
        let params = seven(3);
        let cw = encode(&params, &[true, false, true]).unwrap();
        let mut buf = Vec::new();
        cw.write_to(&params, &mut buf).unwrap();
        assert!(buf.starts_with(b"7 3 3 4 3\n"));
        assert_eq!(Codeword::read_from(&params, &buf[..]).unwrap(), cw);
    }
}
