//! Deciding, counting and witnessing k-tuples of p-th roots of unity that
//! sum to zero in characteristic 2.

pub mod brute;
pub mod filters;
pub mod fourier;
pub mod roots;
pub mod three;
pub mod witness;

pub use brute::{brute_force_deps, brute_force_deps_with, BruteForceDeps, BruteOptions};
pub use filters::{necessary_cond_3, necessary_cond_k, odd_t_filter, sufficient_cond_3};
pub use fourier::{fourier_profile, fourier_sufficient_k, min_k_dependency, FourierProfile};
pub use roots::RootsOfUnity;
pub use three::{class_hits_3, class_test_3, cube_sum_gcd, extract_witness_3, gcd_test_3};
pub use witness::DependencyWitness;
