//! Exact Gram matrices of the monomial vectors `Z^a |0>`.
//!
//! With `A = M^dagger Lambda` for 2x2 parameter matrices `M, Lambda`,
//!
//! ```text
//! sum_{a,b} conj(mu)^a lambda^b <Z^a 0 | Z^b 0> / (a! b!) = det(1 - A)^{-n}
//! ```
//!
//! and `det(1 - A) = 1 - (tr A - det A)`, so
//! `det(1 - A)^{-n} = sum_j C(n+j-1, j) (tr A - det A)^j`. `tr A` is
//! diagonal in the monomials while `det A = conj(det M) det Lambda` pairs
//! `(r-s, s, s, r-s)` exponents, which gives every entry as a finite integer
//! sum.

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::basis::{BasisSet, MonomialIndex};
use crate::mathkit::binomial_exact;

fn factorial(m: u32) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, i| acc * i)
}

/// `(r - s, s, s, r - s)`: the exponent vector of one term of `det^r`.
fn det_term(r: u32, s: u32) -> [u32; 4] {
    [r - s, s, s, r - s]
}

fn sub(a: [u32; 4], e: [u32; 4]) -> Option<[u32; 4]> {
    let mut c = [0u32; 4];
    for t in 0..4 {
        c[t] = a[t].checked_sub(e[t])?;
    }
    Some(c)
}

/// Exact `<Z^a 0 | Z^b 0>` for `a`, `b` of equal degree; zero otherwise.
pub fn gram_entry_exact(n: u64, a: &MonomialIndex, b: &MonomialIndex) -> BigInt {
    let d = a.degree();
    if d != b.degree() {
        return BigInt::zero();
    }
    let (ea, eb) = (a.exponents(), b.exponents());
    let mut total = BigInt::zero();
    for r in 0..=d / 2 {
        let j = d - r;
        let p = d - 2 * r;
        let weight = BigInt::from(binomial_exact(n + j as u64 - 1, j as u64))
            * BigInt::from(binomial_exact(j as u64, r as u64));
        let mut inner = BigInt::zero();
        for s_prime in 0..=r {
            let Some(c) = sub(ea, det_term(r, s_prime)) else { continue };
            for s in 0..=r {
                if sub(eb, det_term(r, s)) != Some(c) {
                    continue;
                }
                let multinomial =
                    factorial(p) / c.iter().map(|&x| factorial(x)).product::<BigUint>();
                let term = BigInt::from(
                    multinomial
                        * binomial_exact(r as u64, s as u64)
                        * binomial_exact(r as u64, s_prime as u64),
                );
                if (s + s_prime) % 2 == 1 {
                    inner -= term;
                } else {
                    inner += term;
                }
            }
        }
        if r % 2 == 1 {
            total -= weight * inner;
        } else {
            total += weight * inner;
        }
    }
    let fa: BigUint = ea.iter().map(|&x| factorial(x)).product();
    let fb: BigUint = eb.iter().map(|&x| factorial(x)).product();
    total * BigInt::from(fa) * BigInt::from(fb)
}

fn to_f64(x: &BigInt) -> f64 {
    let v = x.to_f64().unwrap_or(f64::INFINITY);
    if x.is_negative() { -v.abs() } else { v }
}

/// Degree-`d` diagonal block of the Gram matrix, exact integers.
pub fn gram_block_exact(n: u64, basis: &BasisSet, degree: u32) -> Vec<Vec<BigInt>> {
    let block = basis.block(degree);
    block
        .iter()
        .map(|a| block.iter().map(|b| gram_entry_exact(n, a, b)).collect())
        .collect()
}

/// Degree-`d` diagonal block of the Gram matrix.
pub fn gram_block(n: u64, basis: &BasisSet, degree: u32) -> DMatrix<f64> {
    let exact = gram_block_exact(n, basis, degree);
    let size = exact.len();
    DMatrix::from_fn(size, size, |i, j| to_f64(&exact[i][j]))
}

/// Full Gram matrix over `V_{<=K}` in [`BasisSet`] order. Entries between
/// different degrees are exactly zero.
pub fn gram_matrix(n: u64, cutoff: u32) -> DMatrix<f64> {
    let basis = BasisSet::new(cutoff);
    let mut g = DMatrix::zeros(basis.len(), basis.len());
    for d in 0..=cutoff {
        let range = basis.block_range(d);
        let block = gram_block(n, &basis, d);
        g.view_mut((range.start, range.start), (range.len(), range.len())).copy_from(&block);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(n: u64, a: [u32; 4], b: [u32; 4]) -> i64 {
        gram_entry_exact(n, &MonomialIndex::from_array(a), &MonomialIndex::from_array(b))
            .to_i64()
            .unwrap()
    }

    #[test]
    fn degree_one_block_is_n_identity() {
        for n in 1..=6u64 {
            let basis = BasisSet::new(1);
            let g = gram_block(n, &basis, 1);
            assert_eq!(g, DMatrix::identity(4, 4) * n as f64);
        }
    }

    #[test]
    fn hand_computed_degree_two_entries() {
        // ||Z11^2 0||^2 = 2 n (n+1): sum_i a_i^dag b_i^dag squared.
        for n in 1..=4u64 {
            assert_eq!(entry(n, [2, 0, 0, 0], [2, 0, 0, 0]), (2 * n * (n + 1)) as i64);
            // Z11 Z22 and Z12 Z21 have norm n^2 and overlap n.
            assert_eq!(entry(n, [1, 0, 0, 1], [1, 0, 0, 1]), (n * n) as i64);
            assert_eq!(entry(n, [0, 1, 1, 0], [0, 1, 1, 0]), (n * n) as i64);
            assert_eq!(entry(n, [1, 0, 0, 1], [0, 1, 1, 0]), n as i64);
            assert_eq!(entry(n, [1, 1, 0, 0], [0, 1, 1, 0]), 0);
        }
    }

    #[test]
    fn cross_degree_entries_vanish() {
        assert_eq!(entry(3, [1, 0, 0, 0], [1, 1, 0, 0]), 0);
    }

    #[test]
    fn positive_definite_from_n_four_singular_below() {
        let basis = BasisSet::new(3);
        for d in 0..=3 {
            let g = gram_block(4, &basis, d);
            let e = g.symmetric_eigen().eigenvalues;
            assert!(e.min() > 0.0, "n=4 degree {d}");
        }
        // At n = 1 the degree-2 block already has a null vector:
        // Z11 Z22 - Z12 Z21 annihilates the vacuum of a single copy.
        let e = gram_block(1, &basis, 2).symmetric_eigen().eigenvalues;
        assert!(e.min().abs() < 1e-9);
    }
}
