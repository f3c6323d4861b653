//! Algebraically nice pairs and combinatorially nice matching families.

pub mod algebraic;
pub mod matching;
pub mod polyvec;

pub use algebraic::{
    build_s0, build_s1, compute_tau, subgroup_2, verify_algebraic_niceness, AlgebraicNicePair,
    NicenessViolation,
};
pub use matching::{
    dot, incidence_family, power_image, subgroup_family, tensor_power_family, trivial_family,
    verify_matching, MatchingFamily, MatchingViolation,
};
pub use polyvec::{check_poly_dot_claim, check_poly_dot_pair, poly_vector, Monomial, MultiPoly};
