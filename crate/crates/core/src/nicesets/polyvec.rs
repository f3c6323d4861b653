//! Vectors indexed by polynomials: for `f = Σ c_i Π_j x_j^{α_j^i}` over
//! Z_p, `f(u_1, ..., u_h)` concatenates the scaled tensor products
//! `c_i u_1^{⊗α_1^i} ⊗ ... ⊗ u_h^{⊗α_h^i}`. With `f̄` the same monomials
//! at coefficient 1, `(f(u), f̄(v)) = f((u_1, v_1), ..., (u_h, v_h))`.

use crate::algebra::numtheory::pow_mod;
use crate::nicesets::matching::{dot, tensor, tensor_power};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: u64,
    /// `exponents[j]` is the power of variable `x_{j+1}`.
    pub exponents: Vec<u32>,
}

/// A polynomial as an explicit list of monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    pub p: u64,
    pub terms: Vec<Monomial>,
}

impl MultiPoly {
    /// The same monomials with every coefficient set to 1.
    pub fn bar(&self) -> MultiPoly {
        MultiPoly {
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: 1,
                    exponents: m.exponents.clone(),
                })
                .collect(),
        }
    }

    /// Evaluates at scalars `z_1, ..., z_h`.
    pub fn eval(&self, z: &[u64]) -> u64 {
        let p = self.p;
        self.terms.iter().fold(0u64, |acc, m| {
            let term = m.exponents.iter().zip(z).fold(m.coeff % p, |t, (&e, &zj)| {
                (t as u128 * pow_mod(zj, e as u64, p) as u128 % p as u128) as u64
            });
            (acc + term) % p
        })
    }
}

/// `f(u_1, ..., u_h)`.
pub fn poly_vector(f: &MultiPoly, us: &[Vec<u64>]) -> Vec<u64> {
    let p = f.p;
    let mut out = Vec::new();
    for m in &f.terms {
        let mut block = vec![m.coeff % p];
        for (u, &e) in us.iter().zip(&m.exponents) {
            block = tensor(p, &block, &tensor_power(p, u, e));
        }
        out.extend(block);
    }
    out
}

/// Compares `(f(u), g(v))` with `f((u_1, v_1), ..., (u_h, v_h))`.
pub fn check_poly_dot_pair(f: &MultiPoly, g: &MultiPoly, us: &[Vec<u64>], vs: &[Vec<u64>]) -> bool {
    let lhs = poly_vector(f, us);
    let rhs = poly_vector(g, vs);
    if lhs.len() != rhs.len() {
        return false;
    }
    let scalars: Vec<u64> = us.iter().zip(vs).map(|(u, v)| dot(f.p, u, v)).collect();
    dot(f.p, &lhs, &rhs) == f.eval(&scalars)
}

/// The identity with `g = f̄`.
pub fn check_poly_dot_claim(f: &MultiPoly, us: &[Vec<u64>], vs: &[Vec<u64>]) -> bool {
    check_poly_dot_pair(f, &f.bar(), us, vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mono(coeff: u64, exponents: &[u32]) -> Monomial {
        Monomial {
            coeff,
            exponents: exponents.to_vec(),
        }
    }

    #[test]
    fn expansions() {
        let x1 = MultiPoly {
            p: 7,
            terms: vec![mono(1, &[1])],
        };
        assert_eq!(poly_vector(&x1, &[vec![3, 4, 5]]), vec![3, 4, 5]);
        let x1x2 = MultiPoly {
            p: 7,
            terms: vec![mono(1, &[1, 1])],
        };
        assert_eq!(
            poly_vector(&x1x2, &[vec![1, 2], vec![3, 4]]),
            vec![3, 4, 6, 8 % 7]
        );
        let f = MultiPoly {
            p: 7,
            terms: vec![mono(3, &[2])],
        };
        assert_eq!(poly_vector(&f, &[vec![1, 2]]), vec![3, 6, 6, 5]);
    }

    #[test]
    fn disjoint_sum() {
        let f = MultiPoly {
            p: 7,
            terms: vec![mono(1, &[1, 0]), mono(1, &[0, 1])],
        };
        let us = [vec![1, 2, 3], vec![4, 5, 6]];
        let vs = [vec![6, 0, 1], vec![2, 2, 2]];
        assert!(check_poly_dot_claim(&f, &us, &vs));
    }

    #[test]
    fn mismatched_bar_fails() {
        // keeping the coefficient 2 on the v side multiplies the left by 2
        let f = MultiPoly {
            p: 7,
            terms: vec![mono(2, &[1])],
        };
        let us = [vec![1, 0]];
        let vs = [vec![1, 0]];
        assert!(check_poly_dot_claim(&f, &us, &vs));
        assert!(!check_poly_dot_pair(&f, &f, &us, &vs));
    }

    fn instance() -> impl Strategy<Value = (MultiPoly, Vec<Vec<u64>>, Vec<Vec<u64>>)> {
        (
            prop_oneof![Just(3u64), Just(7), Just(73)],
            1usize..=3,
            1usize..4,
        )
            .prop_flat_map(|(p, h, len)| {
                let term = (0..p, proptest::collection::vec(0u32..=3, h))
                    .prop_filter("degree <= 3", |(_, e)| e.iter().sum::<u32>() <= 3)
                    .prop_map(|(c, e)| Monomial {
                        coeff: c,
                        exponents: e,
                    });
                let terms = proptest::collection::vec(term, 1..4);
                let vecs = proptest::collection::vec(proptest::collection::vec(0..p, len), h);
                (terms, vecs.clone(), vecs)
                    .prop_map(move |(terms, us, vs)| (MultiPoly { p, terms }, us, vs))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn dot_claim_holds((f, us, vs) in instance()) {
            prop_assert!(check_poly_dot_claim(&f, &us, &vs));
        }
    }
}
