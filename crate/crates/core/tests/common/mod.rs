#![allow(dead_code)]

use gdf_core::coherent::{LambdaMatrix, SingularPair};
use gdf_core::haar::haar_u2;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random `Lambda` with spectral norm at most `max_norm`, Haar-rotated.
pub fn random_lambda(r: &mut ChaCha8Rng, max_norm: f64) -> LambdaMatrix {
    let top = max_norm * max_norm;
    let s = SingularPair::new(r.random::<f64>() * top, r.random::<f64>() * top).unwrap();
    LambdaMatrix::from_svd(&haar_u2(r), s, &haar_u2(r))
}

/// Double-exponential quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    quadrature::integrate(f, a, b, 1e-14).integral
}

/// Iterated quadrature of `f(x, y)` over `[a, b]^2`.
pub fn integrate_square<F: Fn(f64, f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate(|x| integrate(|y| f(x, y), a, b), a, b)
}
