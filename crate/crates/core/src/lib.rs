//! Short sums of roots of unity in characteristic 2, the nice subsets of
//! prime fields they produce, and the locally decodable codes built on top.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: word-packed GF(2)\[x\], binary extension fields,
//!   multiplicative orders, discrete logs, sieving and factoring.
//! * [`rootsum`]: deciding, counting and witnessing `k` roots of unity that
//!   sum to zero, plus the Fourier counting machinery.
//! * [`nicesets`]: algebraically nice pairs `(S0, S1)` and matching vector
//!   families.
//! * [`ldc`]: the encoder, the `k`-query local decoder, and a corruption
//!   simulator.
//! * [`pipeline`]: the prime search, Mersenne factor bounds, checkpointing
//!   and export.

pub mod algebra;
pub mod error;
pub mod ldc;
pub mod nicesets;
pub mod pipeline;
pub mod rootsum;
pub mod seed;

pub use error::{Error, Result};
