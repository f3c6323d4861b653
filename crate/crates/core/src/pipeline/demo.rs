//! End-to-end instance: dependency witness, nice pair, trivial matching
//! family, code, and an empirical error table.

use serde::Serialize;

use crate::algebra::numtheory::PrimeCtx;
use crate::ldc::{
    simulate, smoothness_stats, CorruptionMode, LdcParams, SimReport, SmoothnessStats,
};
use crate::nicesets::{trivial_family, AlgebraicNicePair};
use crate::rootsum::{extract_witness_3, necessary_cond_3, odd_t_filter, RootsOfUnity};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct DemoRow {
    pub delta: f64,
    pub trials: u64,
    pub errors: u64,
    pub rate: f64,
    pub bound: f64,
    pub vacuous: bool,
    pub violated: bool,
}

impl From<SimReport> for DemoRow {
    fn from(r: SimReport) -> Self {
        DemoRow {
            delta: r.delta,
            trials: r.trials,
            errors: r.errors,
            rate: r.rate,
            bound: r.bound,
            vacuous: r.vacuous,
            violated: r.violated,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub p: u64,
    pub t: u64,
    pub m: usize,
    /// Message length.
    pub n: usize,
    /// Codeword length `p^m`.
    pub len: usize,
    pub witness: String,
    pub s1: Vec<u64>,
    pub s0: Vec<u64>,
    /// `|T_0|` and flatness of the decoder's query distribution for bit 0.
    pub t_size: usize,
    pub smooth: bool,
    pub rows: Vec<DemoRow>,
}

/// Refuses primes that fail a necessary condition, quoting the numbers.
pub fn ldc_demo(
    p: u64,
    m: usize,
    deltas: &[f64],
    trials: u64,
    run_seed: u64,
) -> Result<DemoReport> {
    let (report, _) = ldc_demo_with_params(p, m, deltas, trials, run_seed)?;
    Ok(report)
}

pub fn ldc_demo_with_params(
    p: u64,
    m: usize,
    deltas: &[f64],
    trials: u64,
    run_seed: u64,
) -> Result<(DemoReport, LdcParams)> {
    let t = PrimeCtx::new(p)?.t;
    let mut reasons = Vec::new();
    if !necessary_cond_3(p, t) {
        reasons.push(format!(
            "3t^2 = {} > 4p = {}",
            3 * t as u128 * t as u128,
            4 * p as u128
        ));
    }
    if !odd_t_filter(p, t) {
        reasons.push(format!("t = {t} is even"));
    }
    if !reasons.is_empty() {
        return Err(Error::NotFound(format!(
            "p = {p} (t = {t}) has no three-term dependency: {}",
            reasons.join("; ")
        )));
    }
    let roots = RootsOfUnity::new(p, seed::derive(run_seed, p))?;
    let witness = extract_witness_3(&roots)?;
    let nice = AlgebraicNicePair::from_witness(&witness, seed::derive(run_seed, p ^ 1 << 62))?;
    let params = LdcParams::new(trivial_family(p, m)?, nice)?;
    let smooth: SmoothnessStats = smoothness_stats(&params, 0)?;
    let rows = deltas
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            simulate(
                &params,
                d,
                trials,
                CorruptionMode::Random,
                seed::derive(run_seed, j as u64),
            )
            .map(DemoRow::from)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = DemoReport {
        p,
        t,
        m,
        n: params.n(),
        len: params.len,
        witness: witness.to_string(),
        s1: params.nice.s1.clone(),
        s0: params.nice.s0.clone(),
        t_size: smooth.t_size,
        smooth: smooth.flat,
        rows,
    };
    Ok((report, params))
}
