//! Passive linear-optical action `W_u` on the truncated Fock space.
//!
//! `W_u` maps `a_i^dag -> sum_j u_ji a_j^dag` and `b'_i^dag` likewise, while
//! `b` and `a'` modes transform with `conj(u)`. Each occupation basis state
//! is rebuilt from the vacuum with the transformed creation operators, so
//! nothing about the `Z` operators is assumed.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::haar::{haar_unitary, C64};
use crate::subspace::MonomialIndex;

use super::operators::{MODE_A, MODE_A_PRIME, MODE_B, MODE_B_PRIME};
use super::states::PairSpace;

/// Largest copy count accepted by [`invariance_check`].
pub const MAX_INVARIANCE_COPIES: usize = 3;

/// Mode-space matrix `u (+) conj(u) (+) conj(u) (+) u` interleaved per copy.
pub fn lifted_mode_unitary(u: &DMatrix<C64>) -> DMatrix<C64> {
    let n = u.nrows();
    let mut full = DMatrix::zeros(4 * n, 4 * n);
    for i in 0..n {
        for j in 0..n {
            let (z, zc) = (u[(j, i)], u[(j, i)].conj());
            full[(4 * j + MODE_A, 4 * i + MODE_A)] = z;
            full[(4 * j + MODE_B, 4 * i + MODE_B)] = zc;
            full[(4 * j + MODE_A_PRIME, 4 * i + MODE_A_PRIME)] = zc;
            full[(4 * j + MODE_B_PRIME, 4 * i + MODE_B_PRIME)] = z;
        }
    }
    full
}

fn factorial(m: u8) -> f64 {
    (1..=m as u32).map(f64::from).product()
}

/// Apply a passive mode transformation `c_m^dag -> sum_j U_jm c_j^dag`.
pub fn apply_passive(ps: &PairSpace, v: &[C64], mode_u: &DMatrix<C64>) -> Result<Vec<C64>> {
    let space = &ps.space;
    if v.len() != space.dim() {
        return Err(Error::LengthMismatch { expected: space.dim(), got: v.len() });
    }
    let modes = space.modes();
    if mode_u.nrows() != modes || mode_u.ncols() != modes {
        return Err(domain("mode unitary has the wrong size"));
    }
    let mut out = vec![C64::new(0.0, 0.0); space.dim()];
    for (src, &amp) in v.iter().enumerate() {
        if amp.norm() == 0.0 {
            continue;
        }
        let occ = space.occupation(src);
        let mut state: HashMap<Vec<u8>, C64> = HashMap::new();
        state.insert(vec![0u8; modes], amp);
        for (m, &count) in occ.iter().enumerate() {
            for _ in 0..count {
                let mut next: HashMap<Vec<u8>, C64> = HashMap::new();
                for (o, &c) in &state {
                    for j in 0..modes {
                        let w = mode_u[(j, m)];
                        if w.norm() == 0.0 {
                            continue;
                        }
                        let mut o2 = o.clone();
                        let factor = (o2[j] as f64 + 1.0).sqrt();
                        o2[j] += 1;
                        *next.entry(o2).or_default() += c * w * factor;
                    }
                }
                state = next;
            }
            if count > 0 {
                let norm = factorial(count).sqrt();
                for c in state.values_mut() {
                    *c /= norm;
                }
            }
        }
        for (o, c) in state {
            let idx = space.index_of(&o).expect("passive maps preserve photon number");
            out[idx] += c;
        }
    }
    Ok(out)
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `max ||W_u v - v||` over `trials` Haar-random `u in U(n)`.
pub fn invariance_deviation<R: Rng + ?Sized>(
    ps: &PairSpace,
    v: &[C64],
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let u = haar_unitary(ps.n, rng);
        let w = apply_passive(ps, v, &lifted_mode_unitary(&u))?;
        worst = worst.max(distance(&w, v));
    }
    Ok(worst)
}

/// Invariance of the monomial vector `Z^idx |0>` under `W_u`, `n <= 3`.
pub fn invariance_check<R: Rng + ?Sized>(
    n: usize,
    idx: &MonomialIndex,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if n == 0 || n > MAX_INVARIANCE_COPIES {
        return Err(domain(format!(
            "invariance check supports 1..={MAX_INVARIANCE_COPIES} copies, got {n}"
        )));
    }
    let ps = PairSpace::new(n, 2 * idx.degree())?;
    let v = ps.monomial_vector(idx)?;
    invariance_deviation(&ps, &v, trials, rng)
}

/// `a_1^dag b_1^dag |0>`: a pair in the first copy only, not `U(n)`-invariant
/// for `n >= 2`.
pub fn single_pair_vector(ps: &PairSpace) -> Vec<C64> {
    let mut occ = vec![0u8; ps.space.modes()];
    occ[MODE_A] = 1;
    occ[MODE_B] = 1;
    let mut v = vec![C64::new(0.0, 0.0); ps.space.dim()];
    v[ps.space.index_of(&occ).expect("two photons fit")] = C64::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_is_exact() {
        let ps = PairSpace::new(2, 4).unwrap();
        let v = ps.monomial_vector(&MonomialIndex::new(1, 0, 0, 1)).unwrap();
        let w = apply_passive(&ps, &v, &lifted_mode_unitary(&DMatrix::identity(2, 2))).unwrap();
        assert_eq!(distance(&v, &w), 0.0);
    }

    #[test]
    fn monomials_invariant_control_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dev = invariance_check(2, &MonomialIndex::new(1, 0, 0, 0), 20, &mut rng).unwrap();
        assert!(dev <= 1e-9, "{dev}");
        let dev = invariance_check(3, &MonomialIndex::new(0, 1, 1, 0), 5, &mut rng).unwrap();
        assert!(dev <= 1e-9, "{dev}");
        let ps = PairSpace::new(2, 2).unwrap();
        let control = single_pair_vector(&ps);
        let dev = invariance_deviation(&ps, &control, 20, &mut rng).unwrap();
        assert!(dev > 1e-3, "{dev}");
    }

    #[test]
    fn passive_maps_are_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ps = PairSpace::new(2, 4).unwrap();
        let v = single_pair_vector(&ps);
        let u = haar_unitary(2, &mut rng);
        let w = apply_passive(&ps, &v, &lifted_mode_unitary(&u)).unwrap();
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
