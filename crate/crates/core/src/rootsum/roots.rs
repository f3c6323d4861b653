use std::sync::Arc;

use crate::algebra::binfield::{build_field, cp_generator, BfElem, BinaryFieldCtx};
use crate::algebra::numtheory::PrimeCtx;
use crate::{seed, Result};

/// C_p realised inside F_{2^t}: the field, a generator `g` of C_p, and the
/// prime data. Everything downstream expresses roots as powers `g^i`.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    pub prime: PrimeCtx,
    pub field: Arc<BinaryFieldCtx>,
    pub generator: BfElem,
}

impl RootsOfUnity {
    /// Builds the field and generator from `seed`; the field modulus and the
    /// generator draw independent sub-seeds.
    pub fn new(p: u64, seed: u64) -> Result<Self> {
        let prime = PrimeCtx::new(p)?;
        let field = build_field(prime.t as usize, seed::derive(seed, 1))?;
        let generator = cp_generator(&field, p, seed::derive(seed, 2))?;
        Ok(RootsOfUnity {
            prime,
            field,
            generator,
        })
    }

    /// Uses an existing field of degree `ord2(p)`.
    pub fn with_field(p: u64, field: Arc<BinaryFieldCtx>, seed: u64) -> Result<Self> {
        let prime = PrimeCtx::new(p)?;
        if field.t() as u64 != prime.t {
            return Err(crate::Error::usage(format!(
                "field degree {} differs from ord2({p}) = {}",
                field.t(),
                prime.t
            )));
        }
        let generator = cp_generator(&field, p, seed)?;
        Ok(RootsOfUnity {
            prime,
            field,
            generator,
        })
    }

    pub fn p(&self) -> u64 {
        self.prime.p
    }

    pub fn t(&self) -> u64 {
        self.prime.t
    }

    pub fn pow(&self, e: u64) -> BfElem {
        self.field.pow_u64(&self.generator, e % self.p())
    }

    /// Whether `z` is a p-th root of unity.
    pub fn contains(&self, z: &BfElem) -> bool {
        !z.is_zero() && self.field.pow_u64(z, self.p()).is_one()
    }

    /// All elements `g^0, g^1, ..., g^(p-1)` in exponent order.
    pub fn elements(&self) -> Vec<BfElem> {
        let mut out = Vec::with_capacity(self.p() as usize);
        let mut cur = self.field.one();
        for _ in 0..self.p() {
            out.push(cur.clone());
            cur = self.field.mul(&cur, &self.generator);
        }
        out
    }
}
