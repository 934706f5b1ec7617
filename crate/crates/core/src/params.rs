//! Closed-form security parameters of the reduction and a block-length solver.

use std::f64::consts::LN_2;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{domain, precondition, Error, Result};
use crate::mathkit::{binomial_exact, rel_entropy, LogReal};

/// Inputs of the reduction.
///
/// `eps_coll` is the security of the underlying protocol against Gaussian
/// collective attacks; `eps_test` is the failure budget of the energy test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProtocolInput {
    pub n: u64,
    pub k: u64,
    pub d_a: f64,
    pub d_b: f64,
    pub eps_coll: LogReal,
    pub eps_test: LogReal,
}

impl ProtocolInput {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(domain("n and k must be at least 1"));
        }
        if !(self.d_a > 0.0 && self.d_b > 0.0 && self.d_a.is_finite() && self.d_b.is_finite()) {
            return Err(domain("energy thresholds must be positive and finite"));
        }
        if !(self.eps_test > LogReal::ZERO && self.eps_test < LogReal::ONE) {
            return Err(domain("eps_test must lie in (0, 1)"));
        }
        if !(self.eps_coll >= LogReal::ZERO && self.eps_coll < LogReal::ONE) {
            return Err(domain("eps_coll must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Everything derived from a [`ProtocolInput`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedParams {
    pub g: f64,
    pub dprime_a: f64,
    pub dprime_b: f64,
    /// Photon cutoff produced by the energy test.
    #[serde(rename = "K")]
    pub k_cutoff: u64,
    /// Cutoff used by the de Finetti step: `max(K, n - 5)`.
    pub k_reduction: u64,
    pub cutoff_raised: bool,
    #[serde(rename = "N")]
    pub n_reduced: u64,
    pub alpha: f64,
    pub eta_star: f64,
    #[serde(rename = "T")]
    pub volume_t: LogReal,
    /// Pinsker form `2 (1+alpha)^7 N^4 exp(-2N / ((1+alpha)^2 ln 2))`.
    pub eps_definetti: LogReal,
    pub eps_definetti_vacuous: bool,
    /// `2 T eps_coll + 2 eps_test`.
    pub eps_prime_exact: LogReal,
    /// `K^4 / 50 * max(eps_coll, eps_test)`; only defined for `n >= 38`.
    pub eps_prime_envelope: Option<LogReal>,
    pub key_reduction_bits: u64,
    pub n_star: u64,
    pub feasible: bool,
    pub infeasibility: Option<String>,
}

impl DerivedParams {
    /// Turn an infeasible report into an error.
    pub fn require_feasible(self) -> Result<DerivedParams> {
        if self.feasible {
            Ok(self)
        } else {
            Err(Error::DeFinettiInapplicable {
                n_minus_5: self.n_reduced,
                alpha: self.alpha,
                n_star: self.n_star,
            })
        }
    }
}

/// `ln(2 / eps)`, from the log magnitude so that `eps` may underflow `f64`.
fn ln_two_over(eps: LogReal) -> Result<f64> {
    if !(eps > LogReal::ZERO && eps < LogReal::ONE) {
        return Err(domain(format!("eps = {eps} must lie in (0, 1)")));
    }
    Ok(LN_2 - eps.ln())
}

/// Energy-threshold inflation factor
/// `(1 + 2 sqrt(L/2n) + L/n) / (1 - 2 sqrt(L/2k))` with `L = ln(2/eps)`.
pub fn g_factor(n: u64, k: u64, eps: LogReal) -> Result<f64> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let l = ln_two_over(eps)?;
    let (nf, kf) = (n as f64, k as f64);
    let denominator = 1.0 - 2.0 * (l / (2.0 * kf)).sqrt();
    if k == 0 || denominator <= 0.0 {
        return Err(Error::TestModesTooFew { k, required: 2.0 * l });
    }
    Ok((1.0 + 2.0 * (l / (2.0 * nf)).sqrt() + l / nf) / denominator)
}

/// Photon cutoff `max(1, ceil(n (d_A + d_B) g(n, k, eps_test / 4)))`.
pub fn photon_cutoff_k(input: &ProtocolInput) -> Result<u64> {
    input.validate()?;
    let g = g_factor(input.n, input.k, input.eps_test.scale(0.25))?;
    let k = (input.n as f64 * (input.d_a + input.d_b) * g).ceil();
    if k >= u64::MAX as f64 {
        return Err(domain("photon cutoff overflows a 64-bit count"));
    }
    Ok((k as u64).max(1))
}

/// `eta* = (K - n + 5) / (K + n - 5)`.
pub fn eta_star(n: u64, k_cutoff: u64) -> Result<f64> {
    if n < 6 {
        return Err(precondition(format!("eta* needs n >= 6, got {n}")));
    }
    let big_n = n - 5;
    if k_cutoff < big_n {
        return Err(precondition(format!("K = {k_cutoff} is below n - 5 = {big_n}")));
    }
    Ok((k_cutoff - big_n) as f64 / (k_cutoff + big_n) as f64)
}

fn check_volume_args(n: u64, eta: f64) -> Result<()> {
    if n < 4 {
        return Err(domain(format!("volume needs n >= 4, got {n}")));
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(domain(format!("eta = {eta} outside [0, 1)")));
    }
    Ok(())
}

/// `T(n, eta)` in log form.
pub fn volume_t_log(n: u64, eta: f64) -> Result<LogReal> {
    check_volume_args(n, eta)?;
    if eta == 0.0 {
        return Ok(LogReal::ZERO);
    }
    let nf = n as f64;
    let ln_poly = (nf - 1.0).ln() + 2.0 * (nf - 2.0).ln() + (nf - 3.0).ln() - 12f64.ln();
    Ok(LogReal::from_ln(ln_poly + 4.0 * eta.ln() - 4.0 * (-eta).ln_1p()))
}

/// `T(n, eta) = (n-1)(n-2)^2(n-3) eta^4 / (12 (1-eta)^4)`.
pub fn volume_t(n: u64, eta: f64) -> Result<f64> {
    Ok(volume_t_log(n, eta)?.value())
}

/// `2 N^4 (1 + K/N)^7 exp(-N D(K/(K+N) || eta))` with `N = n - 5`.
///
/// Requires `K <= eta N / (1 - eta)`; values `>= 1` are returned as is
/// (see [`is_vacuous`]).
pub fn definetti_epsilon(n: u64, k_cutoff: u64, eta: f64) -> Result<LogReal> {
    if n <= 5 {
        return Err(domain(format!("n = {n} leaves no modes after removing 5")));
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(domain(format!("eta = {eta} outside [0, 1)")));
    }
    let big_n = (n - 5) as f64;
    let kf = k_cutoff as f64;
    let limit = eta * big_n / (1.0 - eta);
    if kf > limit * (1.0 + 1e-12) {
        return Err(precondition(format!(
            "K = {k_cutoff} exceeds eta N / (1 - eta) = {limit}"
        )));
    }
    let x = (kf / (kf + big_n)).min(eta);
    let d = rel_entropy(x, eta)?;
    let ln_prefactor = LN_2 + 4.0 * big_n.ln() + 7.0 * (kf / big_n).ln_1p();
    Ok(LogReal::from_ln(ln_prefactor - big_n * d))
}

/// The Pinsker-weakened form `2 (1+alpha)^7 N^4 exp(-2N / ((1+alpha)^2 ln 2))`,
/// `alpha = K / N`, equal to `2 (N+K)^7 / N^3 exp(-2 N^3 / ((N+K)^2 ln 2))`.
pub fn definetti_epsilon_pinsker(n: u64, k_cutoff: u64) -> Result<LogReal> {
    if n <= 5 {
        return Err(domain(format!("n = {n} leaves no modes after removing 5")));
    }
    let big_n = (n - 5) as f64;
    Ok(LogReal::from_ln(ln_n_star_objective(k_cutoff as f64 / big_n, big_n)))
}

pub fn is_vacuous(eps: LogReal) -> bool {
    eps >= LogReal::ONE
}

/// `ln(2 (1+alpha)^7 N^4 exp(-2N / ((1+alpha)^2 ln 2)))`.
fn ln_n_star_objective(alpha: f64, big_n: f64) -> f64 {
    let a1 = 1.0 + alpha;
    LN_2 + 7.0 * a1.ln() + 4.0 * big_n.ln() - 2.0 * big_n / (a1 * a1 * LN_2)
}

/// `N*(alpha)`: the smallest `N` with
/// `2 (1+alpha)^7 N^4 exp(-2N / ((1+alpha)^2 ln 2)) <= 1/2`, but at least 38.
pub fn n_star(alpha: f64) -> Result<u64> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(domain(format!("alpha = {alpha} must be finite and >= 1")));
    }
    let target = -LN_2;
    let ok = |big_n: u64| ln_n_star_objective(alpha, big_n as f64) <= target;
    // The objective rises until 2 (1+alpha)^2 ln 2 and falls afterwards, and
    // it is already above 1/2 at N = 1 for alpha >= 1, so the answer lies on
    // the falling branch.
    let peak = (2.0 * (1.0 + alpha).powi(2) * LN_2).floor().max(1.0);
    if peak >= (1u64 << 62) as f64 {
        return Err(Error::Unachievable);
    }
    let mut lo = peak as u64;
    let mut hi = lo.max(1);
    while !ok(hi) {
        lo = hi;
        hi = hi.checked_mul(2).ok_or(Error::Unachievable)?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(38))
}

/// `ceil(2 log2 C(K+4, 4))`, exact.
pub fn key_reduction_bits(k_cutoff: u64) -> u64 {
    let dim = binomial_exact(k_cutoff + 4, 4);
    let square = &dim * &dim;
    if square.is_one() {
        return 0;
    }
    let bits = square.bits();
    let power_of_two = (&square & (&square - 1u32)).is_zero();
    if power_of_two { bits - 1 } else { bits }
}

/// Compose all derived parameters for one input.
///
/// Infeasible inputs are reported, not rejected: see
/// [`DerivedParams::require_feasible`].
pub fn compose_security(input: &ProtocolInput) -> Result<DerivedParams> {
    input.validate()?;
    if input.n <= 5 {
        return Err(domain(format!("n = {} leaves no modes after removing 5", input.n)));
    }
    let g = g_factor(input.n, input.k, input.eps_test.scale(0.25))?;
    let k_cutoff = photon_cutoff_k(input)?;
    let n_reduced = input.n - 5;
    let k_reduction = k_cutoff.max(n_reduced);
    let cutoff_raised = k_reduction != k_cutoff;
    let alpha = k_reduction as f64 / n_reduced as f64;
    let eta = eta_star(input.n, k_reduction)?;
    let volume = volume_t_log(input.n.max(4), eta)?;
    let eps_definetti = definetti_epsilon_pinsker(input.n, k_reduction)?;
    let n_star = n_star(alpha)?;

    let two = LogReal::from_f64(2.0);
    let eps_prime_exact = two * volume * input.eps_coll + two * input.eps_test;
    let eps_prime_envelope = (input.n >= 38).then(|| {
        let k4 = LogReal::from_ln(4.0 * (k_reduction as f64).ln());
        k4 / LogReal::from_f64(50.0) * input.eps_coll.max(input.eps_test)
    });

    let infeasibility = if cutoff_raised {
        Some(format!(
            "cutoff K = {k_cutoff} is below n - 5 = {n_reduced}; eta* = 0 and the reduction is empty"
        ))
    } else if n_reduced < n_star {
        Some(format!("n - 5 = {n_reduced} is below N*({alpha:.6}) = {n_star}"))
    } else if input.n < 38 {
        Some(format!("n = {} is below 38", input.n))
    } else {
        None
    };

    Ok(DerivedParams {
        g,
        dprime_a: input.d_a * g,
        dprime_b: input.d_b * g,
        k_cutoff,
        k_reduction,
        cutoff_raised,
        n_reduced,
        alpha,
        eta_star: eta,
        volume_t: volume,
        eps_definetti,
        eps_definetti_vacuous: is_vacuous(eps_definetti),
        eps_prime_exact,
        eps_prime_envelope,
        key_reduction_bits: key_reduction_bits(k_cutoff),
        n_star,
        feasible: infeasibility.is_none(),
        infeasibility,
    })
}

/// Block-length search parameters; `k = ceil(k_ratio * n)`.
#[derive(Clone, Copy, Debug)]
pub struct BlocklengthQuery {
    pub target_eps_prime: LogReal,
    pub k_ratio: f64,
    pub d_a: f64,
    pub d_b: f64,
    pub eps_test: LogReal,
}

const MAX_BLOCKLENGTH: u64 = 1 << 60;

impl BlocklengthQuery {
    fn input(&self, n: u64, eps_coll: LogReal) -> ProtocolInput {
        ProtocolInput {
            n,
            k: ((self.k_ratio * n as f64).ceil() as u64).max(1),
            d_a: self.d_a,
            d_b: self.d_b,
            eps_coll,
            eps_test: self.eps_test,
        }
    }

    /// Composed parameters at `n`, or `None` where the reduction does not apply.
    pub fn evaluate(
        &self,
        n: u64,
        eps_coll_of_n: &dyn Fn(u64) -> LogReal,
    ) -> Option<DerivedParams> {
        compose_security(&self.input(n, eps_coll_of_n(n)))
            .ok()
            .filter(|p| p.feasible)
    }
}

/// Smallest `n` at which `pred` holds, assuming it is monotone on
/// `[start, MAX_BLOCKLENGTH]`.
fn first_true(start: u64, pred: impl Fn(u64) -> bool) -> Result<u64> {
    if pred(start) {
        return Ok(start);
    }
    let mut lo = start;
    let mut step = 1u64;
    let hi = loop {
        let candidate = lo.saturating_add(step).min(MAX_BLOCKLENGTH);
        if pred(candidate) {
            break candidate;
        }
        if candidate == MAX_BLOCKLENGTH {
            return Err(Error::Unachievable);
        }
        lo = candidate;
        step = step.saturating_mul(2);
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest block length whose composed `eps_prime_exact` meets the target.
///
/// First locates the smallest `n` at which the reduction applies, then
/// brackets and bisects on `eps_prime_exact <= target`. Both predicates are
/// assumed monotone in `n`; `eps_coll_of_n` should be nonincreasing.
pub fn min_blocklength(
    query: &BlocklengthQuery,
    eps_coll_of_n: &dyn Fn(u64) -> LogReal,
) -> Result<u64> {
    if !(query.k_ratio > 0.0 && query.k_ratio.is_finite()) {
        return Err(domain("k_ratio must be positive and finite"));
    }
    query.input(38, LogReal::ZERO).validate()?;
    if query.eps_test.scale(2.0) > query.target_eps_prime {
        return Err(Error::Unachievable);
    }
    let n_min = first_true(38, |n| query.evaluate(n, eps_coll_of_n).is_some())?;
    first_true(n_min, |n| {
        query
            .evaluate(n, eps_coll_of_n)
            .is_some_and(|p| p.eps_prime_exact <= query.target_eps_prime)
    })
}

/// The smallest `n` at which the reduction applies at all.
pub fn min_feasible_blocklength(
    query: &BlocklengthQuery,
    eps_coll_of_n: &dyn Fn(u64) -> LogReal,
) -> Result<u64> {
    first_true(38, |n| query.evaluate(n, eps_coll_of_n).is_some())
}
