mod common;

use common::{random_lambda, rng};
use gdf_core::coherent::{
    overlap, photon_block_weight, sample_lambda, sample_radial, singular_squares, vacuum_overlap,
};
use gdf_core::fockoracle::{degree_weights, truncated_overlap, PairSpace};
use gdf_core::haar::C64;
use gdf_core::subspace::photon_block_via_gram;

#[test]
fn overlap_formula_matches_truncated_fock() {
    let single = PairSpace::new(1, 40).unwrap();
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..12 {
        let l1 = random_lambda(&mut r, 0.5);
        let l2 = random_lambda(&mut r, 0.5);
        for n in [1u64, 2] {
            let closed = overlap(&l1, &l2, n);
            let fock = truncated_overlap(&single, &l1, &l2, n as usize).unwrap();
            worst = worst.max((closed - fock).norm());
        }
    }
    assert!(worst <= 1e-6, "max deviation {worst:e}");
}

#[test]
fn overlap_is_hermitian_and_bounded() {
    let mut r = rng(12);
    for _ in 0..200 {
        let l1 = random_lambda(&mut r, 0.95);
        let l2 = random_lambda(&mut r, 0.95);
        for n in [1u64, 4, 9] {
            let a = overlap(&l1, &l2, n);
            let b = overlap(&l2, &l1, n);
            assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
            assert!(a.norm() <= 1.0 + 1e-12);
        }
        let self_overlap = overlap(&l1, &l1, 5);
        assert!((self_overlap - C64::new(1.0, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn vacuum_overlap_squared_is_degree_zero_weight() {
    let mut r = rng(13);
    for _ in 0..100 {
        let l = random_lambda(&mut r, 0.9);
        for n in [1u64, 3, 8] {
            let v = vacuum_overlap(&l, n).powi(2);
            let w = photon_block_weight(0, n, singular_squares(&l));
            assert!((v - w).abs() <= 1e-13);
        }
    }
}

#[test]
fn block_weight_three_routes_agree() {
    let n = 4;
    let ps = PairSpace::new(n, 6).unwrap();
    let mut r = rng(14);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let l = random_lambda(&mut r, 0.8);
        let fock = degree_weights(&ps, &l).unwrap();
        let s = singular_squares(&l);
        for k in 0..=3u32 {
            let closed = photon_block_weight(u64::from(k), n as u64, s);
            let gram = photon_block_via_gram(&l, n as u64, k).unwrap();
            worst = worst.max((closed - gram).abs()).max((closed - fock[k as usize]).abs());
        }
    }
    assert!(worst <= 1e-8, "max deviation {worst:e}");
}

/// Largest distance between the empirical CDF of `samples` and `cdf`.
fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let m = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).abs().max((f - (i + 1) as f64 / m).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn radial_sampler_matches_volume_law() {
    // Pr[max(x, y) <= t] over q on [0, eta]^2 is ((t / (1 - t)) / (eta / (1 - eta)))^4.
    let samples = 100_000;
    for (eta, n) in [(0.3, 6u64), (0.9, 10), (0.99, 4)] {
        let mut r = rng(15);
        let xs: Vec<f64> = (0..samples).map(|_| sample_radial(eta, n, &mut r).unwrap().x).collect();
        let odds = eta / (1.0 - eta);
        let d = ks_statistic(xs, |t| (t / (1.0 - t) / odds).powi(4));
        // 1.95 / sqrt(m) is the 0.1% critical value.
        assert!(d < 1.95 / (samples as f64).sqrt(), "eta {eta}: KS {d}");
    }
}

#[test]
fn lambda_sampler_keeps_radial_law() {
    let samples = 1_000_000;
    let (eta, n) = (0.8, 6);
    let mut r1 = rng(16);
    let mut r2 = rng(17);
    let mut a: Vec<f64> = (0..samples)
        .map(|_| singular_squares(&sample_lambda(eta, n, &mut r1).unwrap()).x)
        .collect();
    let mut b: Vec<f64> = (0..samples).map(|_| sample_radial(eta, n, &mut r2).unwrap().x).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 - j as f64).abs() / samples as f64);
    }
    assert!(d < 0.002, "two-sample KS {d}");
}
