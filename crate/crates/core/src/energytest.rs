//! Monte-Carlo simulation of the energy test, its classical symmetrization,
//! and the chi-square surrogate events that bound its failure probability.
//!
//! Heterodyne convention: a thermal mode with mean photon number `m` yields
//! a circular complex Gaussian amplitude with `E|alpha|^2 = m + 1`; the extra
//! unit is the vacuum contribution of the measurement. Thresholds are
//! inclusive.

use rand::{Rng, RngExt};
use rand_distr::{ChiSquared, Distribution};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::haar::{complex_gaussian, C64};
use crate::mathkit::{chi2_tail_bounds, LogReal};
use crate::parallel::{run_batches, split_counts, McOptions};
use crate::params::g_factor;

/// Width, in standard deviations, of every reported confidence interval.
pub const CONFIDENCE_Z: f64 = 3.0;

/// Expected event count below which a probability is treated as beyond
/// Monte-Carlo resolution.
pub const MC_RESOLUTION_COUNT: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestParams {
    pub n: u64,
    pub k: u64,
    pub d_a: f64,
    pub d_b: f64,
}

impl TestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(domain(format!("need n, k >= 1, got n = {}, k = {}", self.n, self.k)));
        }
        for (name, d) in [("d_A", self.d_a), ("d_B", self.d_b)] {
            if !(d > 0.0) || !d.is_finite() {
                return Err(domain(format!("{name} = {d} must be positive and finite")));
            }
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        (self.n + self.k) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeterodyneRecord {
    pub alice: Vec<C64>,
    pub bob: Vec<C64>,
}

impl HeterodyneRecord {
    pub fn new(alice: Vec<C64>, bob: Vec<C64>) -> Result<HeterodyneRecord> {
        if alice.len() != bob.len() {
            return Err(Error::LengthMismatch { expected: alice.len(), got: bob.len() });
        }
        Ok(HeterodyneRecord { alice, bob })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestOutcome {
    pub passed: bool,
    /// Energy in the last `k` modes.
    pub y_a: f64,
    pub y_b: f64,
    /// Energy in the first `n` modes.
    pub y_rem_a: f64,
    pub y_rem_b: f64,
}

/// `modes` i.i.d. heterodyne outcomes of a thermal state with the given mean.
pub fn sample_iid_heterodyne<R: Rng + ?Sized>(
    mean_photons: f64,
    modes: usize,
    rng: &mut R,
) -> Result<Vec<C64>> {
    if !(mean_photons >= 0.0) || !mean_photons.is_finite() {
        return Err(domain(format!("mean photon number {mean_photons} must be finite and >= 0")));
    }
    let scale = (mean_photons + 1.0).sqrt();
    Ok((0..modes).map(|_| complex_gaussian(rng) * scale).collect())
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `sum conj(a_i) b_i`.
fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Apply a Haar-random `u in U(N)` as `alpha -> u alpha`, `beta -> conj(u) beta`.
///
/// Only the images of `alpha` and `gamma = conj(beta)` are needed, and `u`
/// maps an orthonormal basis of their span to a Haar-random orthonormal pair.
/// That pair is drawn directly, so the cost is linear in `N`.
pub fn symmetrize<R: Rng + ?Sized>(record: &HeterodyneRecord, rng: &mut R) -> Result<HeterodyneRecord> {
    let size = record.alice.len();
    if record.bob.len() != size {
        return Err(Error::LengthMismatch { expected: size, got: record.bob.len() });
    }
    let gamma: Vec<C64> = record.bob.iter().map(|z| z.conj()).collect();

    // gamma = c1 e1 + c2 e2 with e1 = alpha / |alpha|.
    let norm_a = norm_sqr(&record.alice).sqrt();
    let (c1, c2) = if norm_a > 0.0 {
        let c1 = inner(&record.alice, &gamma) / norm_a;
        let rest = (norm_sqr(&gamma) - c1.norm_sqr()).max(0.0).sqrt();
        (c1, rest)
    } else {
        (C64::new(0.0, 0.0), norm_sqr(&gamma).sqrt())
    };

    let (f1, f2) = random_orthonormal_pair(size, rng);
    let mut alice = Vec::with_capacity(size);
    let mut bob = Vec::with_capacity(size);
    if norm_a > 0.0 {
        // e2 = (gamma - c1 e1) / c2, so u gamma = c1 f1 + c2 f2.
        for i in 0..size {
            alice.push(f1[i] * norm_a);
            bob.push((f1[i] * c1 + f2[i] * c2).conj());
        }
    } else {
        for i in 0..size {
            alice.push(C64::new(0.0, 0.0));
            bob.push((f1[i] * c2).conj());
        }
    }
    Ok(HeterodyneRecord { alice, bob })
}

fn random_orthonormal_pair<R: Rng + ?Sized>(size: usize, rng: &mut R) -> (Vec<C64>, Vec<C64>) {
    loop {
        let g1: Vec<C64> = (0..size).map(|_| complex_gaussian(rng)).collect();
        let g2: Vec<C64> = (0..size).map(|_| complex_gaussian(rng)).collect();
        let n1 = norm_sqr(&g1).sqrt();
        if n1 == 0.0 {
            continue;
        }
        let f1: Vec<C64> = g1.iter().map(|z| z / n1).collect();
        let p = inner(&f1, &g2);
        let h: Vec<C64> = g2.iter().zip(&f1).map(|(g, f)| g - f * p).collect();
        if size == 1 {
            // No second direction exists; gamma is parallel to alpha.
            return (f1, vec![C64::new(0.0, 0.0)]);
        }
        let nh = norm_sqr(&h).sqrt();
        if nh == 0.0 {
            continue;
        }
        return (f1, h.iter().map(|z| z / nh).collect());
    }
}

/// Energies of the last `k` modes decide the test; the first `n` are kept.
pub fn run_test(record: &HeterodyneRecord, params: &TestParams) -> Result<TestOutcome> {
    params.validate()?;
    let modes = params.modes();
    for side in [&record.alice, &record.bob] {
        if side.len() != modes {
            return Err(Error::LengthMismatch { expected: modes, got: side.len() });
        }
    }
    let n = params.n as usize;
    let y_a = norm_sqr(&record.alice[n..]);
    let y_b = norm_sqr(&record.bob[n..]);
    let kf = params.k as f64;
    Ok(TestOutcome {
        passed: y_a <= kf * params.d_a && y_b <= kf * params.d_b,
        y_a,
        y_b,
        y_rem_a: norm_sqr(&record.alice[..n]),
        y_rem_b: norm_sqr(&record.bob[..n]),
    })
}

/// Wilson score interval for `successes / trials` at `z` standard deviations.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let centre = (p + z2 / (2.0 * t)) / denom;
    let half = z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMethod {
    MonteCarlo,
    Analytic,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma36Estimate {
    pub n: u64,
    pub k: u64,
    pub d: f64,
    pub d_prime: f64,
    pub eps: LogReal,
    pub trials: u64,
    pub seed: u64,
    pub events: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// Binomial standard deviation of the rate at probability `eps`.
    pub sigma_at_eps: f64,
    /// `Pr[Z_n >= alpha n d'] + Pr[Z_k <= alpha k d]` from the chi-square
    /// deviation bounds at `x = ln(2/eps)`.
    pub analytic_bound: LogReal,
    pub method: VerdictMethod,
    pub passed: bool,
}

fn ln_two_over(eps: LogReal) -> Result<f64> {
    if eps <= LogReal::ZERO || eps >= LogReal::ONE {
        return Err(domain(format!("eps = {eps} outside (0, 1)")));
    }
    Ok(std::f64::consts::LN_2 - eps.ln())
}

/// Analytic bound on `Pr[k d Z_n >= n d' Z_k]` with `d' = g(n, k, eps) d`.
pub fn lemma36_analytic_bound(n: u64, k: u64, eps: LogReal) -> Result<LogReal> {
    let x = ln_two_over(eps)?;
    let g = g_factor(n, k, eps)?;
    let (nf, kf) = (n as f64, k as f64);
    // alpha d = 2 (1 - 2 sqrt(x / 2k)); thresholds in units where d = 1.
    let alpha_d = 2.0 * (1.0 - 2.0 * (x / (2.0 * kf)).sqrt());
    let upper = chi2_tail_bounds(2 * n, x)?;
    let lower = chi2_tail_bounds(2 * k, x)?;
    let slack = 1e-9;
    let upper_ok = alpha_d * nf * g - 2.0 * nf >= upper.upper_threshold * (1.0 - slack);
    let lower_ok = 2.0 * kf - alpha_d * kf >= lower.lower_threshold * (1.0 - slack);
    let part = |ok: bool, b: LogReal| if ok { b } else { LogReal::ONE };
    Ok((part(upper_ok, upper.upper_bound) + part(lower_ok, lower.lower_bound)).min(LogReal::ONE))
}

fn check_test_modes(k: u64, eps: LogReal) -> Result<f64> {
    let x = ln_two_over(eps)?;
    if !(k as f64 > 2.0 * x) {
        return Err(Error::TestModesTooFew { k, required: 2.0 * x });
    }
    Ok(x)
}

/// Empirical `Pr[k d Z_n >= n d' Z_k]`, `Z_n ~ chi^2(2n)`, `Z_k ~ chi^2(2k)`.
pub fn lemma36_probability<R: Rng + ?Sized>(
    n: u64,
    k: u64,
    d: f64,
    eps: LogReal,
    trials: u64,
    rng: &mut R,
) -> Result<Lemma36Estimate> {
    let seed = rng.random();
    lemma36_probability_seeded(n, k, d, eps, trials, seed, &McOptions::default())
}

pub fn lemma36_probability_seeded(
    n: u64,
    k: u64,
    d: f64,
    eps: LogReal,
    trials: u64,
    seed: u64,
    options: &McOptions,
) -> Result<Lemma36Estimate> {
    check_test_modes(k, eps)?;
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(domain(format!("d = {d} must be positive and finite")));
    }
    if trials == 0 {
        return Err(domain("need at least one trial"));
    }
    let g = g_factor(n, k, eps)?;
    let d_prime = g * d;
    let chi_n = ChiSquared::new(2.0 * n as f64).map_err(|e| domain(e.to_string()))?;
    let chi_k = ChiSquared::new(2.0 * k as f64).map_err(|e| domain(e.to_string()))?;
    let (kd, nd) = (k as f64 * d, n as f64 * d_prime);
    let counts = split_counts(trials, options.batches);
    let hits = run_batches(seed, counts.len(), options, |i, rng| {
        (0..counts[i])
            .filter(|_| {
                let zn: f64 = chi_n.sample(rng);
                let zk: f64 = chi_k.sample(rng);
                kd * zn >= nd * zk
            })
            .count() as u64
    });
    let events: u64 = hits.iter().sum();
    let rate = events as f64 / trials as f64;
    let (wilson_low, wilson_high) = wilson_interval(events, trials, CONFIDENCE_Z);
    let e = eps.value();
    let sigma_at_eps = (e * (1.0 - e) / trials as f64).sqrt();
    let analytic_bound = lemma36_analytic_bound(n, k, eps)?;
    let (method, passed) = if e * trials as f64 >= MC_RESOLUTION_COUNT {
        (VerdictMethod::MonteCarlo, rate <= e + CONFIDENCE_Z * sigma_at_eps)
    } else {
        (VerdictMethod::Analytic, analytic_bound <= eps)
    };
    Ok(Lemma36Estimate {
        n,
        k,
        d,
        d_prime,
        eps,
        trials,
        seed,
        events,
        rate,
        wilson_low,
        wilson_high,
        sigma_at_eps,
        analytic_bound,
        method,
        passed,
    })
}

/// How the two parties' modes are populated before symmetrization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SourceModel {
    /// Every mode thermal with the given mean photon number.
    Thermal { mean_a: f64, mean_b: f64 },
    /// The same total mean energy placed entirely in the first `n` modes;
    /// the last `k` modes are vacuum.
    Concentrated { mean_a: f64, mean_b: f64 },
}

impl SourceModel {
    pub fn validate(&self) -> Result<()> {
        let (SourceModel::Thermal { mean_a, mean_b } | SourceModel::Concentrated { mean_a, mean_b }) = *self;
        for m in [mean_a, mean_b] {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(domain(format!("mean photon number {m} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, params: &TestParams, rng: &mut R) -> Result<HeterodyneRecord> {
        let (n, k) = (params.n as usize, params.k as usize);
        let side = |mean: f64, concentrated: bool, rng: &mut R| -> Result<Vec<C64>> {
            if concentrated {
                let boosted = mean * (n + k) as f64 / n as f64;
                let mut v = sample_iid_heterodyne(boosted, n, rng)?;
                v.extend(sample_iid_heterodyne(0.0, k, rng)?);
                Ok(v)
            } else {
                sample_iid_heterodyne(mean, n + k, rng)
            }
        };
        let (ma, mb, conc) = match *self {
            SourceModel::Thermal { mean_a, mean_b } => (mean_a, mean_b, false),
            SourceModel::Concentrated { mean_a, mean_b } => (mean_a, mean_b, true),
        };
        let alice = side(ma, conc, rng)?;
        let bob = side(mb, conc, rng)?;
        Ok(HeterodyneRecord { alice, bob })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureEstimate {
    pub params: TestParams,
    pub source: SourceModel,
    pub eps_test: LogReal,
    pub d_prime_a: f64,
    pub d_prime_b: f64,
    pub trials: u64,
    pub seed: u64,
    pub passes: u64,
    pub failures: u64,
    pub pass_rate: f64,
    pub failure_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// `wilson_high <= eps_test`.
    pub passed: bool,
}

/// Rate of `passed and (Y_rem_A >= n d'_A or Y_rem_B >= n d'_B)` with
/// `d' = g(n, k, eps_test / 4) d` over the full sample, symmetrize and test
/// pipeline.
pub fn failure_event_estimate<R: Rng + ?Sized>(
    params: &TestParams,
    source: SourceModel,
    eps_test: LogReal,
    trials: u64,
    rng: &mut R,
) -> Result<FailureEstimate> {
    let seed = rng.random();
    failure_event_estimate_seeded(params, source, eps_test, trials, seed, &McOptions::default())
}

pub fn failure_event_estimate_seeded(
    params: &TestParams,
    source: SourceModel,
    eps_test: LogReal,
    trials: u64,
    seed: u64,
    options: &McOptions,
) -> Result<FailureEstimate> {
    params.validate()?;
    if trials == 0 {
        return Err(domain("need at least one trial"));
    }
    let g = g_factor(params.n, params.k, eps_test.scale(0.25))?;
    let (d_prime_a, d_prime_b) = (g * params.d_a, g * params.d_b);
    let nf = params.n as f64;
    source.validate()?;
    let counts = split_counts(trials, options.batches);
    let tallies = run_batches(seed, counts.len(), options, |i, rng| {
        let (mut passes, mut failures) = (0u64, 0u64);
        for _ in 0..counts[i] {
            let raw = source.sample(params, rng).expect("validated model");
            let rotated = symmetrize(&raw, rng).expect("equal lengths");
            let out = run_test(&rotated, params).expect("validated lengths");
            if out.passed {
                passes += 1;
                if out.y_rem_a >= nf * d_prime_a || out.y_rem_b >= nf * d_prime_b {
                    failures += 1;
                }
            }
        }
        (passes, failures)
    });
    let passes: u64 = tallies.iter().map(|t| t.0).sum();
    let failures: u64 = tallies.iter().map(|t| t.1).sum();
    let (wilson_low, wilson_high) = wilson_interval(failures, trials, CONFIDENCE_Z);
    Ok(FailureEstimate {
        params: *params,
        source,
        eps_test,
        d_prime_a,
        d_prime_b,
        trials,
        seed,
        passes,
        failures,
        pass_rate: passes as f64 / trials as f64,
        failure_rate: failures as f64 / trials as f64,
        wilson_low,
        wilson_high,
        passed: LogReal::from_f64(wilson_high) <= eps_test,
    })
}
