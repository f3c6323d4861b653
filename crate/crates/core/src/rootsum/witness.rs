use std::fmt;
use std::str::FromStr;

use crate::algebra::binfield::BinaryFieldCtx;
use crate::algebra::gf2poly::Gf2Poly;
use crate::algebra::numtheory::PrimeCtx;
use crate::{Error, Result};

/// An odd number of distinct exponents `{γ_i}` with `Σ g^{γ_i} = 0` in
/// F_{2^t}, together with the modulus and generator that pin `g`.
///
/// Canonical text form (one line):
/// `p t k' modulus_hex generator_hex γ_1,...,γ_k'`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyWitness {
    pub p: u64,
    pub t: u64,
    pub exponents: Vec<u64>,
    pub modulus: Gf2Poly,
    pub generator: Gf2Poly,
}

impl DependencyWitness {
    pub fn k_prime(&self) -> usize {
        self.exponents.len()
    }

    /// Re-checks every invariant from scratch: rebuilds the field from the
    /// stored modulus (re-verifying irreducibility), recomputes `ord2(p)`,
    /// confirms the generator has order exactly `p`, and sums the powers.
    pub fn verify(&self) -> Result<()> {
        let prime = PrimeCtx::new(self.p)?;
        if prime.t != self.t {
            return Err(Error::Verification(format!(
                "ord2({}) = {}, witness says {}",
                self.p, prime.t, self.t
            )));
        }
        let k = self.exponents.len();
        if k.is_multiple_of(2) || k < 3 {
            return Err(Error::Verification(format!(
                "k' = {k} must be odd and >= 3"
            )));
        }
        let mut sorted = self.exponents.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return Err(Error::Verification("exponents are not distinct".into()));
        }
        if sorted.iter().any(|&e| e >= self.p) {
            return Err(Error::Verification("exponent outside Z_p".into()));
        }
        let field = BinaryFieldCtx::new(self.modulus.clone())?;
        if field.t() as u64 != self.t {
            return Err(Error::Verification("modulus degree differs from t".into()));
        }
        let g = field.from_poly(&self.generator);
        if g.to_poly() != self.generator {
            return Err(Error::Verification("generator is not reduced".into()));
        }
        if g.is_one() || !field.pow_u64(&g, self.p).is_one() {
            return Err(Error::Verification(
                "generator does not have order p".into(),
            ));
        }
        let sum = self.exponents.iter().fold(field.zero(), |acc, &e| {
            field.add(&acc, &field.pow_u64(&g, e))
        });
        if !sum.is_zero() {
            return Err(Error::Verification("powers of g do not sum to zero".into()));
        }
        Ok(())
    }
}

impl fmt::Display for DependencyWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gammas: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        write!(
            f,
            "{} {} {} {} {} {}",
            self.p,
            self.t,
            self.exponents.len(),
            self.modulus.to_hex(),
            self.generator.to_hex(),
            gammas.join(",")
        )
    }
}

impl FromStr for DependencyWitness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split_whitespace().collect();
        let [p, t, k, modulus, generator, gammas] = fields[..] else {
            return Err(Error::Parse(format!(
                "witness needs 6 fields, got {}",
                fields.len()
            )));
        };
        let num = |v: &str| {
            v.parse::<u64>()
                .map_err(|e| Error::Parse(format!("{v}: {e}")))
        };
        let exponents = gammas.split(',').map(num).collect::<Result<Vec<_>>>()?;
        if num(k)? as usize != exponents.len() {
            return Err(Error::Parse("k' disagrees with the exponent list".into()));
        }
        Ok(DependencyWitness {
            p: num(p)?,
            t: num(t)?,
            exponents,
            modulus: Gf2Poly::from_hex(modulus)?,
            generator: Gf2Poly::from_hex(generator)?,
        })
    }
}
