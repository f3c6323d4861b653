//! Exact arithmetic: GF(2)[x], F_{2^t}, Z_p, sieving and factoring.

pub mod binfield;
pub mod clmul;
pub mod factor;
pub mod gf2poly;
pub mod numtheory;
pub mod sieve;

pub use binfield::{bsgs_dlog, build_field, cp_generator, BfElem, BinaryFieldCtx, Bsgs};
pub use factor::{factorize, largest_prime_factor};
pub use gf2poly::{Degree, Gf2Poly};
pub use numtheory::{ord2, PrimeCtx};
pub use sieve::sieve_primes;
