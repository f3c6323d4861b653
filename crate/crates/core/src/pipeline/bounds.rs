//! Largest-prime-factor bounds on Mersenne numbers `2^t - 1` and the
//! converse consistency check on found dependencies.
//!
//! Every verdict is decided in exact integer arithmetic; the `f64` fields
//! are for display only.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::algebra::factor::{is_prime_u128, largest_prime_factor_with_budget, DEFAULT_RHO_BUDGET};
use crate::pipeline::record::SearchRecord;
use crate::{Error, Result};

/// Largest `t` for which `2^t - 1` fits the factoring routines.
pub const MAX_T: u32 = 127;

/// A positive rational exponent `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gamma {
    pub num: u64,
    pub den: u64,
}

impl Gamma {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::usage("gamma must be a positive fraction"));
        }
        let g = crate::algebra::numtheory::gcd_u64(num, den);
        Ok(Gamma {
            num: num / g,
            den: den / g,
        })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `a/b` or a decimal such as `0.75`.
impl FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad gamma `{s}`"));
        if let Some((a, b)) = s.split_once('/') {
            return Gamma::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
        }
        let (int, frac) = s.trim().split_once('.').unwrap_or((s.trim(), ""));
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|x| x.checked_add(frac))
            .ok_or_else(bad)?;
        Gamma::new(num, den)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub t: u32,
    pub mersenne: u128,
    /// `None` when factoring ran out of budget.
    pub largest: Option<u128>,
    pub complete: bool,
    pub k: u32,
    pub gamma: Gamma,
    /// `2^{0.75 t}`.
    pub threshold_three_quarters: f64,
    /// `2^{γ t}`.
    pub threshold_gamma: f64,
    /// `(t/2)^{1 + 1/(k-2)}`.
    pub threshold_k: f64,
    /// `(3/4) t^2`.
    pub threshold_quadratic: f64,
    /// `P > 2^{0.75 t}`.
    pub exceeds_three_quarters: Option<bool>,
    /// `P > 2^{γ t}`.
    pub exceeds_gamma: Option<bool>,
    /// `P >= (t/2)^{1 + 1/(k-2)}`.
    pub meets_k: Option<bool>,
    /// `P >= (3/4) t^2`.
    pub meets_quadratic: Option<bool>,
}

fn big(x: u128) -> BigUint {
    BigUint::from(x)
}

/// `P^den > 2^{num t}`.
fn exceeds_power_of_two(p: u128, num: u64, den: u64, t: u32) -> bool {
    big(p).pow(den as u32) > BigUint::one() << (num * t as u64)
}

/// `P >= (t/2)^{(k-1)/(k-2)}`, i.e. `P^{k-2} 2^{k-1} >= t^{k-1}`.
pub fn meets_k_threshold(p: u128, t: u64, k: u32) -> bool {
    big(p).pow(k - 2) << (k - 1) >= BigUint::from(t).pow(k - 1)
}

/// `P >= (3/4) t^2`.
pub fn meets_quadratic_threshold(p: u128, t: u64) -> bool {
    4 * p >= 3 * (t as u128) * (t as u128)
}

pub fn eval_bound(t: u32, k: u32, gamma: Gamma) -> Result<BoundReport> {
    eval_bound_with_budget(t, k, gamma, DEFAULT_RHO_BUDGET)
}

pub fn eval_bound_with_budget(t: u32, k: u32, gamma: Gamma, budget: u64) -> Result<BoundReport> {
    if !(2..=MAX_T).contains(&t) {
        return Err(Error::usage(format!("t = {t} outside [2, {MAX_T}]")));
    }
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::usage(format!("k = {k} must be odd and >= 3")));
    }
    if gamma.den > u32::MAX as u64 {
        return Err(Error::usage("gamma denominator too large"));
    }
    let mersenne = (1u128 << t) - 1;
    let largest = match largest_prime_factor_with_budget(mersenne, budget) {
        Ok(p) => {
            if !mersenne.is_multiple_of(p) || !is_prime_u128(p) {
                return Err(Error::Verification(format!(
                    "{p} is not a prime factor of 2^{t} - 1"
                )));
            }
            Some(p)
        }
        Err(Error::ResourceLimit(msg)) => {
            log::warn!("t = {t}: {msg}");
            None
        }
        Err(e) => return Err(e),
    };
    let tf = t as f64;
    Ok(BoundReport {
        t,
        mersenne,
        largest,
        complete: largest.is_some(),
        k,
        gamma,
        threshold_three_quarters: 2f64.powf(0.75 * tf),
        threshold_gamma: 2f64.powf(gamma.as_f64() * tf),
        threshold_k: (tf / 2.0).powf(1.0 + 1.0 / (k as f64 - 2.0)),
        threshold_quadratic: 0.75 * tf * tf,
        exceeds_three_quarters: largest.map(|p| exceeds_power_of_two(p, 3, 4, t)),
        exceeds_gamma: largest.map(|p| exceeds_power_of_two(p, gamma.num, gamma.den, t)),
        meets_k: largest.map(|p| meets_k_threshold(p, t as u64, k)),
        meets_quadratic: largest.map(|p| meets_quadratic_threshold(p, t as u64)),
    })
}

/// One report per `t` in `[t_lo, t_hi]`; an incomplete factorization marks
/// that report and the run continues.
pub fn eval_bounds(t_lo: u32, t_hi: u32, k: u32, gamma: Gamma) -> Result<Vec<BoundReport>> {
    if t_lo > t_hi {
        return Err(Error::usage(format!("empty t range [{t_lo}, {t_hi}]")));
    }
    (t_lo..=t_hi).map(|t| eval_bound(t, k, gamma)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConverseViolation {
    pub p: u64,
    pub t: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ConverseReport {
    pub k: u32,
    pub checked: usize,
    pub violations: Vec<ConverseViolation>,
}

impl ConverseReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For each record with a k-dependency, `p` (a prime factor of `2^t - 1`)
/// must satisfy `p >= (t/2)^{1+1/(k-2)}` and `p >= (3/4) t^2`.
pub fn converse_check(records: &[SearchRecord], k: u32) -> ConverseReport {
    let mut report = ConverseReport {
        k,
        ..Default::default()
    };
    for r in records.iter().filter(|r| r.dep) {
        report.checked += 1;
        if !meets_k_threshold(r.p as u128, r.t, k) {
            report.violations.push(ConverseViolation {
                p: r.p,
                t: r.t,
                reason: format!("p < (t/2)^(1+1/{})", k - 2),
            });
        }
        if !meets_quadratic_threshold(r.p as u128, r.t) {
            report.violations.push(ConverseViolation {
                p: r.p,
                t: r.t,
                reason: "p < (3/4) t^2".into(),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::record::TestMethod;

    fn three_quarters() -> Gamma {
        Gamma::new(3, 4).unwrap()
    }

    #[test]
    fn gamma_parsing() {
        assert_eq!("0.75".parse::<Gamma>().unwrap(), three_quarters());
        assert_eq!("3/4".parse::<Gamma>().unwrap(), three_quarters());
        assert_eq!("6/8".parse::<Gamma>().unwrap(), three_quarters());
        assert_eq!("1".parse::<Gamma>().unwrap(), Gamma { num: 1, den: 1 });
        assert!("0".parse::<Gamma>().is_err());
        assert!("x".parse::<Gamma>().is_err());
        assert!("1/0".parse::<Gamma>().is_err());
    }

    #[test]
    fn t23() {
        let r = eval_bound(23, 3, three_quarters()).unwrap();
        assert_eq!(r.mersenne, 8388607);
        assert_eq!(r.largest, Some(178481));
        assert_eq!(r.exceeds_three_quarters, Some(true));
        // 2^17.25 = 155871.6...
        assert!((r.threshold_three_quarters - 155871.6).abs() < 1.0);
        // 178481^4 > 2^69 checked independently
        assert!(178481u128.pow(4) > 1u128 << 69);
    }

    #[test]
    fn t9_and_t2() {
        let r = eval_bound(9, 3, three_quarters()).unwrap();
        assert_eq!(r.largest, Some(73));
        assert_eq!(r.threshold_quadratic, 60.75);
        assert_eq!(r.meets_quadratic, Some(true));
        let r = eval_bound(2, 3, three_quarters()).unwrap();
        assert_eq!(r.largest, Some(3));
        assert_eq!(r.threshold_k, 1.0);
        assert_eq!(r.meets_k, Some(true));
    }

    #[test]
    fn exact_verdicts_match_float_thresholds_away_from_ties() {
        for r in eval_bounds(2, 64, 5, Gamma::new(2, 3).unwrap()).unwrap() {
            let p = r.largest.unwrap() as f64;
            let check = |exact: Option<bool>, approx: bool, thr: f64| {
                if (p - thr).abs() > 1e-6 * thr {
                    assert_eq!(exact, Some(approx), "t = {}", r.t);
                }
            };
            check(
                r.exceeds_three_quarters,
                p > r.threshold_three_quarters,
                r.threshold_three_quarters,
            );
            check(r.exceeds_gamma, p > r.threshold_gamma, r.threshold_gamma);
            check(r.meets_k, p >= r.threshold_k, r.threshold_k);
            check(
                r.meets_quadratic,
                p >= r.threshold_quadratic,
                r.threshold_quadratic,
            );
        }
    }

    #[test]
    fn tiny_budget_marks_incomplete() {
        let r = eval_bound_with_budget(101, 3, three_quarters(), 1).unwrap();
        assert!(!r.complete);
        assert_eq!(r.meets_k, None);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(eval_bound(1, 3, three_quarters()).is_err());
        assert!(eval_bound(128, 3, three_quarters()).is_err());
        assert!(eval_bound(10, 4, three_quarters()).is_err());
    }

    fn rec(p: u64, t: u64, dep: bool) -> SearchRecord {
        SearchRecord {
            p,
            t,
            nec3: true,
            odd_t: true,
            weil: false,
            dep,
            method: TestMethod::Class,
            witness: None,
            ms: 0,
        }
    }

    #[test]
    fn converse_examples() {
        let ok = converse_check(
            &[
                rec(7, 3, true),
                rec(73, 9, true),
                rec(599479, 33, true),
                rec(11, 10, false),
            ],
            3,
        );
        assert!(ok.passed());
        assert_eq!(ok.checked, 3);
        let bad = converse_check(&[rec(7, 6, true)], 3);
        assert_eq!(bad.violations.len(), 2);
    }
}
