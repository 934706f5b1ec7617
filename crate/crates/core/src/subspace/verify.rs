//! Numerical certificate for `P_eta >= (1 - eps) Pi_{<=K}` on `V_{<=K}`, and
//! the photon-block weights read off the Gram matrix.

use nalgebra::DMatrix;
use rand::{Rng, RngExt};
use serde::Serialize;

use super::basis::BasisSet;
use super::eigen::{extremal_with, whitening};
use super::gram::gram_block;
use super::operator::operator_matrix_p_eta_seeded;
use crate::coherent::{entry_powers, ln_det_one_minus, monomial_value, LambdaMatrix};
use crate::error::{domain, Result};
use crate::haar::C64;
use crate::mathkit::LogReal;
use crate::parallel::{batch_mean_stderr, McOptions};
use crate::params::{definetti_epsilon, is_vacuous};

/// Margin, in standard errors, applied to every Monte-Carlo verdict.
pub const SIGMA_MARGIN: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn from_check(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DefinettiReport {
    pub n: u64,
    #[serde(rename = "K")]
    pub cutoff: u32,
    pub eta: f64,
    pub samples: u64,
    pub seed: u64,
    pub batches: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_min_stderr: f64,
    pub lambda_max_stderr: f64,
    /// `||E[E^2]||^{1/2}` for the error `E` of the whitened estimate, from
    /// batch deviations. By Weyl's inequality it bounds eigenvalue shifts on
    /// the scale of one standard error, including the upward bias of the
    /// largest eigenvalue when the spectrum is nearly degenerate.
    pub operator_stderr: f64,
    /// `max(lambda stderr, operator stderr)`, used by both verdicts.
    pub sigma: f64,
    pub max_entry_stderr: f64,
    pub gram_condition: f64,
    pub vacuum_mass: f64,
    pub eps_theorem: LogReal,
    /// `lambda_min >= 1 - eps - 3 sigma`, only when `eps < 1`.
    pub lower_verdict: Verdict,
    /// `lambda_max <= 1 + 3 sigma`.
    pub upper_verdict: Verdict,
    pub passed: bool,
}

/// Estimate the extremal eigenvalues of `P_eta` relative to `Pi_{<=K}` and
/// compare against `definetti_epsilon(n, K, eta)`.
pub fn verify_definetti<R: Rng + ?Sized>(
    n: u64,
    cutoff: u32,
    eta: f64,
    samples: u64,
    rng: &mut R,
) -> Result<DefinettiReport> {
    let seed = rng.random();
    verify_definetti_seeded(n, cutoff, eta, samples, seed, &McOptions::default())
}

pub fn verify_definetti_seeded(
    n: u64,
    cutoff: u32,
    eta: f64,
    samples: u64,
    seed: u64,
    options: &McOptions,
) -> Result<DefinettiReport> {
    let eps = definetti_epsilon(n, cutoff as u64, eta)?;
    let pair = operator_matrix_p_eta_seeded(n, cutoff, eta, samples, seed, options)?;
    let (w, condition) = whitening(&pair.g)?;
    let pooled = extremal_with(&w, &pair.m, condition);
    let per_batch: Vec<_> = pair.batch_m.iter().map(|m| extremal_with(&w, m, condition)).collect();
    let mins: Vec<f64> = per_batch.iter().map(|e| e.lambda_min).collect();
    let maxs: Vec<f64> = per_batch.iter().map(|e| e.lambda_max).collect();
    let (_, se_min) = batch_mean_stderr(&mins);
    let (_, se_max) = batch_mean_stderr(&maxs);
    let operator_stderr = whitened_operator_stderr(&w, &pair.m, &pair.batch_m);
    let sigma = se_min.max(se_max).max(operator_stderr);

    let lower_verdict = if is_vacuous(eps) {
        Verdict::NotApplicable
    } else {
        Verdict::from_check(pooled.lambda_min >= 1.0 - eps.value() - SIGMA_MARGIN * sigma)
    };
    let upper_verdict = Verdict::from_check(pooled.lambda_max <= 1.0 + SIGMA_MARGIN * sigma);
    Ok(DefinettiReport {
        n,
        cutoff,
        eta,
        samples,
        seed,
        batches: pair.batch_m.len(),
        lambda_min: pooled.lambda_min,
        lambda_max: pooled.lambda_max,
        lambda_min_stderr: se_min,
        lambda_max_stderr: se_max,
        operator_stderr,
        sigma,
        max_entry_stderr: pair.max_stderr(),
        gram_condition: condition,
        vacuum_mass: pair.vacuum_mass,
        eps_theorem: eps,
        lower_verdict,
        upper_verdict,
        passed: !lower_verdict.is_fail() && !upper_verdict.is_fail(),
    })
}

fn whitened_operator_stderr(w: &DMatrix<f64>, pooled: &DMatrix<f64>, batches: &[DMatrix<f64>]) -> f64 {
    let b = batches.len();
    if b < 2 {
        return f64::NAN;
    }
    let whiten = |m: &DMatrix<f64>| w.transpose() * m * w;
    let mean = whiten(pooled);
    let size = mean.nrows();
    let mut second = DMatrix::<f64>::zeros(size, size);
    for m in batches {
        let d = whiten(m) - &mean;
        second += &d * &d;
    }
    second /= (b * (b - 1)) as f64;
    let second = (&second + second.transpose()) * 0.5;
    second.symmetric_eigenvalues().max().max(0.0).sqrt()
}

/// `<Lambda, n| Pi_{=K} |Lambda, n> = det(1 - Lambda Lambda^dag)^n c^dag G_K c`
/// with `c_a = lambda^a / a!` over the degree-`K` monomials.
pub fn photon_block_via_gram(l: &LambdaMatrix, n: u64, cutoff: u32) -> Result<f64> {
    if n < 4 {
        return Err(domain(format!("photon_block_via_gram needs n >= 4, got {n}")));
    }
    let basis = BasisSet::new(cutoff);
    let g = gram_block(n, &basis, cutoff);
    let powers = entry_powers(l, cutoff);
    let c: Vec<C64> = basis
        .block(cutoff)
        .iter()
        .map(|m| monomial_value(&powers, m) / m.factorial_product())
        .collect();
    let mut quad = C64::new(0.0, 0.0);
    for (a, ca) in c.iter().enumerate() {
        for (b, cb) in c.iter().enumerate() {
            quad += ca.conj() * g[(a, b)] * cb;
        }
    }
    Ok((n as f64 * ln_det_one_minus(l)).exp() * quad.re)
}
