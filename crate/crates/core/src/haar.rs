//! Haar-random unitaries.

use nalgebra::{Complex, DMatrix, Matrix2};
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;

/// Standard complex Gaussian with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed element of `U(dim)`: QR of a complex Ginibre matrix, with
/// the phases of `diag(R)` moved into `Q` so the result is unbiased.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let z = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-distributed element of `U(2)`.
///
/// Direct parametrization: a uniform point `(a, b)` on the 3-sphere and an
/// independent global phase give `e^{i phi} [[a, -conj b], [b, conj a]]`.
pub fn haar_u2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let (a, b) = loop {
        let a = complex_gaussian(rng);
        let b = complex_gaussian(rng);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm > 1e-300 {
            break (a / norm, b / norm);
        }
    };
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    let phase = C64::from_polar(1.0, phi);
    Matrix2::new(a, -b.conj(), b, a.conj()) * phase
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_to_machine_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [1, 2, 3, 5] {
            let u = haar_unitary(dim, &mut rng);
            let err = (&u * u.adjoint() - DMatrix::identity(dim, dim)).norm();
            assert!(err < 1e-13);
        }
        let u = haar_u2(&mut rng);
        assert!((u * u.adjoint() - Matrix2::identity()).norm() < 1e-14);
    }

    #[test]
    fn first_and_second_moments() {
        // E[u_ij] = 0, E|u_ij|^2 = 1/d, E[u_11 conj(u_12)] = 0 under Haar.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 200_000;
        for dim in [2usize, 3] {
            let (mut m1, mut m2, mut cross) = (C64::new(0.0, 0.0), 0.0, C64::new(0.0, 0.0));
            for _ in 0..trials {
                let u = if dim == 2 {
                    let m = haar_u2(&mut rng);
                    DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
                } else {
                    haar_unitary(dim, &mut rng)
                };
                m1 += u[(0, 0)];
                m2 += u[(1, 0)].norm_sqr();
                cross += u[(0, 0)] * u[(0, 1)].conj();
            }
            let t = trials as f64;
            let se = (1.0 / (dim as f64 * t)).sqrt();
            assert!((m1 / t).norm() < 5.0 * se);
            assert!((m2 / t - 1.0 / dim as f64).abs() < 5.0 * se);
            assert!((cross / t).norm() < 5.0 * se);
        }
    }

    #[test]
    fn qr_and_direct_u2_agree_in_law() {
        // E|u_11|^4 = 2 / (d (d+1)) = 1/3 for d = 2.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 200_000;
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..trials {
            a += haar_u2(&mut rng)[(0, 0)].norm_sqr().powi(2);
            b += haar_unitary(2, &mut rng)[(0, 0)].norm_sqr().powi(2);
        }
        let t = trials as f64;
        assert!((a / t - 1.0 / 3.0).abs() < 0.004);
        assert!((b / t - 1.0 / 3.0).abs() < 0.004);
    }
}
