use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which decider produced `dep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMethod {
    Class,
    Gcd,
    Brute,
}

impl TestMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TestMethod::Class => "class",
            TestMethod::Gcd => "gcd",
            TestMethod::Brute => "brute",
        }
    }
}

impl std::str::FromStr for TestMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "class" => Ok(TestMethod::Class),
            "gcd" => Ok(TestMethod::Gcd),
            "brute" => Ok(TestMethod::Brute),
            _ => Err(Error::Parse(format!("unknown method `{s}`"))),
        }
    }
}

/// One prime that reached the dependency test. Field order is the export
/// schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub p: u64,
    pub t: u64,
    pub nec3: bool,
    pub odd_t: bool,
    pub weil: bool,
    pub dep: bool,
    pub method: TestMethod,
    pub witness: Option<Vec<u64>>,
    pub ms: u64,
}

impl SearchRecord {
    /// `dep ⇒ nec3 ∧ odd_t` and `weil ⇒ dep`.
    pub fn check_soundness(&self) -> Result<()> {
        if self.dep && !(self.nec3 && self.odd_t) {
            return Err(Error::Verification(format!(
                "p = {}: dependency found although a filter failed",
                self.p
            )));
        }
        if self.weil && !self.dep {
            return Err(Error::Verification(format!(
                "p = {}: sufficient condition holds but no dependency",
                self.p
            )));
        }
        Ok(())
    }
}

/// Aggregate counters of a search run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub lo: u64,
    pub hi: u64,
    /// Odd primes in range.
    pub primes: u64,
    /// Primes passing `3t^2 <= 4p`.
    pub nec3: u64,
    /// Of those, primes that also pass the odd-t filter.
    pub odd_t: u64,
    pub deps: u64,
    /// Dependencies where `2^{3t} < p^4` fails.
    pub non_weil_deps: u64,
}

impl Summary {
    /// `(key, value)` pairs in export order.
    pub fn fields(&self) -> [(&'static str, u64); 7] {
        [
            ("lo", self.lo),
            ("hi", self.hi),
            ("primes", self.primes),
            ("nec3", self.nec3),
            ("odd_t", self.odd_t),
            ("deps", self.deps),
            ("non_weil_deps", self.non_weil_deps),
        ]
    }

    pub fn set(&mut self, key: &str, value: u64) -> Result<()> {
        let slot = match key {
            "lo" => &mut self.lo,
            "hi" => &mut self.hi,
            "primes" => &mut self.primes,
            "nec3" => &mut self.nec3,
            "odd_t" => &mut self.odd_t,
            "deps" => &mut self.deps,
            "non_weil_deps" => &mut self.non_weil_deps,
            _ => return Err(Error::Parse(format!("unknown counter `{key}`"))),
        };
        *slot = value;
        Ok(())
    }
}
