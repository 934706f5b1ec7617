//! Monte-Carlo matrix of `P_eta = int_{D_eta} |Lambda, n><Lambda, n| dmu_n`
//! over the monomial basis of `V_{<=K}`.
//!
//! With `|Lambda, n> = sum_c c_c(Lambda) Z^c |0>`, the matrix is
//! `M = G C G` where `C_cd = int_{D_eta} c_c conj(c_d) dmu_n`. The factor
//! `det(1 - Lambda Lambda^dag)^n` in `c c^dag` is folded into the sampling
//! density, which on singular-value squares `(x, y)` becomes
//! `(x - y)^2 (1-x)^{n-4} (1-y)^{n-4}` on `[0, eta]^2`, times Haar measure on
//! the two unitaries. Its total mass `Z_eta` is known in closed form, so
//! `C = Z_eta E[lambda^c conj(lambda)^d] / (c! d!)`.
//!
//! Entries across different degrees vanish exactly by phase invariance and
//! are not estimated. Complex conjugation of `Lambda` preserves the measure,
//! so `C` is real and only the real part of each sample is accumulated.

use nalgebra::DMatrix;
use rand::{Rng, RngExt};
use rand_distr::{Beta, Distribution};
use serde::Serialize;
use statrs::function::beta::ln_beta;

use super::basis::BasisSet;
use super::gram::gram_matrix;
use crate::coherent::{entry_powers, lambda_from_pair, monomial_value, SingularPair};
use crate::error::{domain, Result};
use crate::haar::C64;
use crate::mathkit::binom_upper_tail_exact;
use crate::parallel::{batch_mean_stderr, run_batches, split_counts, McOptions};

/// `int_0^eta x^k (1-x)^m dx = B(k+1, m+1) Pr[Bin(m+k+1, eta) >= k+1]`.
fn truncated_beta_integral(k: u64, m: u64, eta: f64) -> Result<f64> {
    let tail = binom_upper_tail_exact(k + 1, m + k + 1, eta)?;
    Ok((ln_beta((k + 1) as f64, (m + 1) as f64) + tail.ln()).exp())
}

/// `int_{D_eta} det(1 - Lambda Lambda^dag)^n dmu_n(Lambda)`, the vacuum
/// expectation of `P_eta`, for `n >= 4`.
pub fn p_eta_vacuum_mass(n: u64, eta: f64) -> Result<f64> {
    if n < 4 {
        return Err(domain(format!("mu_n needs n >= 4, got {n}")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("eta = {eta} outside [0, 1]")));
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    let m = n - 4;
    let i0 = truncated_beta_integral(0, m, eta)?;
    let i1 = truncated_beta_integral(1, m, eta)?;
    let i2 = truncated_beta_integral(2, m, eta)?;
    let nf = n as f64;
    let c = (nf - 1.0) * (nf - 2.0).powi(2) * (nf - 3.0) / 2.0;
    Ok(c * 2.0 * (i0 * i2 - i1 * i1).max(0.0))
}

/// Sampler for `(x - y)^2 (1-x)^m (1-y)^m` on `[0, eta]^2`.
///
/// Default proposal: even mixture of `x^2 (1-x)^m (1-y)^m` and its mirror,
/// accepted with probability `(x - y)^2 / (x^2 + y^2)`. The `x^2` factor
/// comes from a Beta(3, m+1) draw rejected above `eta`. When that rejection
/// would be wasteful (small `eta`), both coordinates come from the truncated
/// Beta(1, m+1) law and are accepted with probability `(x - y)^2 / eta^2`.
#[derive(Clone, Debug)]
pub struct PEtaRadialSampler {
    eta: f64,
    m1: f64,
    /// `1 - (1 - eta)^{m+1}`.
    mass1: f64,
    beta3: Option<Beta<f64>>,
}

impl PEtaRadialSampler {
    pub fn new(eta: f64, n: u64) -> Result<PEtaRadialSampler> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(domain(format!("eta = {eta} outside (0, 1)")));
        }
        if n < 4 {
            return Err(domain(format!("sampler needs n >= 4, got {n}")));
        }
        let m = n - 4;
        let m1 = (m + 1) as f64;
        let mass1 = -(m1 * (-eta).ln_1p()).exp_m1();
        let p3 = binom_upper_tail_exact(3, m + 3, eta)?.value();
        let beta3 = if p3 >= 0.25 {
            Some(Beta::new(3.0, m1).map_err(|e| domain(e.to_string()))?)
        } else {
            None
        };
        Ok(PEtaRadialSampler { eta, m1, mass1, beta3 })
    }

    fn truncated_beta1<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let x = -((-(u * self.mass1)).ln_1p() / self.m1).exp_m1();
        x.clamp(0.0, self.eta)
    }

    fn truncated_beta3<R: Rng + ?Sized>(&self, beta: &Beta<f64>, rng: &mut R) -> f64 {
        loop {
            let x = beta.sample(rng);
            if x <= self.eta {
                return x;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SingularPair {
        loop {
            let (x, y, accept) = match &self.beta3 {
                Some(beta) => {
                    let a = self.truncated_beta3(beta, rng);
                    let b = self.truncated_beta1(rng);
                    let (x, y) = if rng.random::<bool>() { (a, b) } else { (b, a) };
                    let denom = x * x + y * y;
                    let p = if denom > 0.0 { (x - y).powi(2) / denom } else { 0.0 };
                    (x, y, p)
                }
                None => {
                    let x = self.truncated_beta1(rng);
                    let y = self.truncated_beta1(rng);
                    (x, y, (x - y).powi(2) / (self.eta * self.eta))
                }
            };
            if rng.random::<f64>() < accept {
                return SingularPair::new(x, y).expect("inside [0, eta]");
            }
        }
    }
}

/// Gram matrix `G` together with the Monte-Carlo estimate of `M = G C G`.
#[derive(Clone, Debug, Serialize)]
pub struct GramOperatorPair {
    pub n: u64,
    pub cutoff: u32,
    pub eta: f64,
    pub sample_count: u64,
    pub seed: u64,
    #[serde(skip)]
    pub g: DMatrix<f64>,
    #[serde(skip)]
    pub m: DMatrix<f64>,
    #[serde(skip)]
    pub m_stderr: DMatrix<f64>,
    /// Per-batch estimates of `M`, in batch order.
    #[serde(skip)]
    pub batch_m: Vec<DMatrix<f64>>,
    pub vacuum_mass: f64,
}

impl GramOperatorPair {
    pub fn max_stderr(&self) -> f64 {
        self.m_stderr.iter().copied().fold(0.0, f64::max)
    }

    /// `max |M - M^T|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.m - self.m.transpose()).amax()
    }
}

fn accumulate_batch<R: Rng + ?Sized>(
    sampler: &PEtaRadialSampler,
    basis: &BasisSet,
    count: u64,
    rng: &mut R,
) -> DMatrix<f64> {
    let size = basis.len();
    let cutoff = basis.cutoff();
    let inv_fact: Vec<f64> = basis.indices().iter().map(|m| 1.0 / m.factorial_product()).collect();
    let blocks: Vec<_> = (0..=cutoff).map(|d| basis.block_range(d)).collect();
    let mut acc = DMatrix::<f64>::zeros(size, size);
    let mut v = vec![C64::new(0.0, 0.0); size];
    for _ in 0..count {
        let l = lambda_from_pair(sampler.sample(rng), rng);
        let powers = entry_powers(&l, cutoff);
        for (slot, (m, f)) in v.iter_mut().zip(basis.indices().iter().zip(&inv_fact)) {
            *slot = monomial_value(&powers, m) * *f;
        }
        for r in &blocks {
            for a in r.clone() {
                let va = v[a];
                for b in a..r.end {
                    acc[(a, b)] += va.re * v[b].re + va.im * v[b].im;
                }
            }
        }
    }
    for a in 0..size {
        for b in 0..a {
            acc[(a, b)] = acc[(b, a)];
        }
    }
    acc
}

/// Estimate `M` with `samples` draws from the normalized restriction of
/// `det(1 - Lambda Lambda^dag)^n dmu_n` to `D_eta`.
pub fn operator_matrix_p_eta<R: Rng + ?Sized>(
    n: u64,
    cutoff: u32,
    eta: f64,
    samples: u64,
    rng: &mut R,
) -> Result<GramOperatorPair> {
    let seed = rng.random();
    operator_matrix_p_eta_seeded(n, cutoff, eta, samples, seed, &McOptions::default())
}

/// [`operator_matrix_p_eta`] with an explicit master seed and batch layout.
pub fn operator_matrix_p_eta_seeded(
    n: u64,
    cutoff: u32,
    eta: f64,
    samples: u64,
    seed: u64,
    options: &McOptions,
) -> Result<GramOperatorPair> {
    if n < 6 {
        return Err(domain(format!("P_eta estimation needs n >= 6, got {n}")));
    }
    if cutoff == 0 {
        return Err(domain("need K >= 1"));
    }
    let batches = options.batches.max(2);
    if samples < batches as u64 {
        return Err(domain(format!("need at least {batches} samples, got {samples}")));
    }
    let sampler = PEtaRadialSampler::new(eta, n)?;
    let vacuum_mass = p_eta_vacuum_mass(n, eta)?;
    let basis = BasisSet::new(cutoff);
    let g = gram_matrix(n, cutoff);
    let counts = split_counts(samples, batches);
    let batch_m = run_batches(seed, batches, options, |i, rng| {
        let acc = accumulate_batch(&sampler, &basis, counts[i], rng);
        let c = acc * (vacuum_mass / counts[i] as f64);
        let m = &g * c * &g;
        (&m + m.transpose()) * 0.5
    });
    let size = basis.len();
    let mut m = DMatrix::zeros(size, size);
    let mut m_stderr = DMatrix::zeros(size, size);
    let mut column = vec![0.0; batches];
    for a in 0..size {
        for b in 0..size {
            for (slot, bm) in column.iter_mut().zip(&batch_m) {
                *slot = bm[(a, b)];
            }
            let (mean, se) = batch_mean_stderr(&column);
            m[(a, b)] = mean;
            m_stderr[(a, b)] = se;
        }
    }
    Ok(GramOperatorPair {
        n,
        cutoff,
        eta,
        sample_count: samples,
        seed,
        g,
        m,
        m_stderr,
        batch_m,
        vacuum_mass,
    })
}
