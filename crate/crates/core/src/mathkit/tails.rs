//! Binomial, Chernoff, regularized-Beta and chi-square tail bounds.

use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use super::entropy::{check_probability, rel_entropy};
use super::LogReal;
use crate::error::{domain, precondition, Result};

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum `exp(ln t_j)` for a run of terms that decay monotonically away from
/// the first one, where `ratio(j)` gives `t_next / t_j`. Returns the log of
/// the sum.
fn ln_decaying_sum(ln_first: f64, steps: u64, mut ratio: impl FnMut(u64) -> f64) -> f64 {
    let mut acc = Neumaier::default();
    acc.add(1.0);
    let mut term = 1.0;
    for step in 0..steps {
        let r = ratio(step);
        term *= r;
        if term == 0.0 {
            break;
        }
        acc.add(term);
        // Ratios only shrink further out, so the remainder is at most geometric.
        if r < 1.0 && term * r / (1.0 - r) < 1e-18 * acc.total() {
            break;
        }
    }
    ln_first + acc.total().ln()
}

/// `F(K, N, p) = Pr[X <= K]` for `X ~ Bin(N, p)`.
///
/// Sums from whichever tail is smaller, so both deep tails and values near 1
/// keep full relative accuracy in the small quantity.
pub fn binom_tail_exact(k: u64, n: u64, p: f64) -> Result<LogReal> {
    check_probability("p", p)?;
    if k > n {
        return Err(domain(format!("K = {k} exceeds N = {n}")));
    }
    if k == n || p == 0.0 {
        return Ok(LogReal::ONE);
    }
    if p == 1.0 {
        return Ok(LogReal::ZERO);
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let ln_term = |j: u64| ln_binomial(n, j) + j as f64 * ln_p + (n - j) as f64 * ln_q;
    let odds = p / (1.0 - p);
    let mode = ((n + 1) as f64 * p).floor() as u64;

    if k < mode {
        // Lower tail, walking j = k, k-1, ..., 0.
        let ln_sum = ln_decaying_sum(ln_term(k), k, |s| {
            let j = k - s;
            j as f64 / ((n - j + 1) as f64 * odds)
        });
        Ok(LogReal::from_ln(ln_sum.min(0.0)))
    } else {
        // Upper tail, walking j = k+1, ..., n; F = 1 - Pr[X > K].
        let first = k + 1;
        let ln_upper = ln_decaying_sum(ln_term(first), n - first, |s| {
            let j = first + s;
            (n - j) as f64 * odds / (j + 1) as f64
        });
        if ln_upper >= 0.0 {
            return Ok(LogReal::ZERO);
        }
        Ok(LogReal::from_ln((-ln_upper.exp_m1()).ln()))
    }
}

/// `Pr[X >= k]` for `X ~ Bin(N, p)`, with full relative accuracy when small.
pub fn binom_upper_tail_exact(k: u64, n: u64, p: f64) -> Result<LogReal> {
    check_probability("p", p)?;
    if k == 0 || p == 1.0 {
        return Ok(if k <= n { LogReal::ONE } else { LogReal::ZERO });
    }
    if k > n || p == 0.0 {
        return Ok(LogReal::ZERO);
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let ln_term = |j: u64| ln_binomial(n, j) + j as f64 * ln_p + (n - j) as f64 * ln_q;
    let odds = p / (1.0 - p);
    let mode = ((n + 1) as f64 * p).floor() as u64;

    if k > mode {
        let ln_sum = ln_decaying_sum(ln_term(k), n - k, |s| {
            let j = k + s;
            (n - j) as f64 * odds / (j + 1) as f64
        });
        Ok(LogReal::from_ln(ln_sum.min(0.0)))
    } else {
        let last = k - 1;
        let ln_lower = ln_decaying_sum(ln_term(last), last, |s| {
            let j = last - s;
            j as f64 / ((n - j + 1) as f64 * odds)
        });
        if ln_lower >= 0.0 {
            return Ok(LogReal::ZERO);
        }
        Ok(LogReal::from_ln((-ln_lower.exp_m1()).ln()))
    }
}

/// Chernoff bound `exp(-n D(p + t || p)) >= Pr[X >= (p + t) n]`.
pub fn chernoff_tail_bound(n: u64, p: f64, t: f64) -> Result<LogReal> {
    check_probability("p", p)?;
    if !(0.0..=1.0 - p).contains(&t) {
        return Err(domain(format!("t = {t} outside [0, 1 - p]")));
    }
    let d = rel_entropy(p + t, p)?;
    if d == f64::INFINITY {
        return Ok(LogReal::ZERO);
    }
    Ok(LogReal::from_ln(-(n as f64) * d))
}

fn check_beta_args(eta: f64, k: u64, n: u64) -> Result<()> {
    check_probability("eta", eta)?;
    if k == 0 || n == 0 {
        return Err(domain(format!("Beta parameters must be positive, got k = {k}, n = {n}")));
    }
    Ok(())
}

/// `1 - I_eta(k, n)` through the identity `1 - I_eta(k, n) = F(k-1, n+k-1, eta)`.
pub fn reg_beta_tail_exact(eta: f64, k: u64, n: u64) -> Result<LogReal> {
    check_beta_args(eta, k, n)?;
    binom_tail_exact(k - 1, n + k - 1, eta)
}

fn chernoff_lower_tail(a: f64, eta: f64, trials: u64) -> Result<LogReal> {
    if eta < a {
        return Err(precondition(format!(
            "eta = {eta} is below the Chernoff threshold {a}"
        )));
    }
    let d = rel_entropy(a, eta)?;
    if d == f64::INFINITY {
        return Ok(LogReal::ZERO);
    }
    Ok(LogReal::from_ln(-(trials as f64) * d))
}

/// Upper bound `exp(-(n+k-1) D((k-1)/(n+k-1) || eta))` on [`reg_beta_tail_exact`].
///
/// Requires `eta >= (k-1)/(n+k-1)`.
pub fn reg_beta_tail_bound(eta: f64, k: u64, n: u64) -> Result<LogReal> {
    check_beta_args(eta, k, n)?;
    let trials = n + k - 1;
    chernoff_lower_tail((k - 1) as f64 / trials as f64, eta, trials)
}

/// The variant with `(k-2)/(n+k-1)` in place of `(k-1)/(n+k-1)`.
///
/// This is **not** a valid upper bound: at `k = 2, n = 1, eta = 1/2` it gives
/// `0.25` against an exact tail of `0.75`. Kept only so the failure can be
/// reproduced.
pub fn reg_beta_tail_bound_as_printed(eta: f64, k: u64, n: u64) -> Result<LogReal> {
    check_beta_args(eta, k, n)?;
    if k < 2 {
        return Err(domain("the (k-2) form needs k >= 2"));
    }
    let trials = n + k - 1;
    chernoff_lower_tail((k - 2) as f64 / trials as f64, eta, trials)
}

/// Laurent–Massart deviation bounds for `U ~ chi^2(D)`:
/// `Pr[U - D >= 2 sqrt(D x) + 2x] <= e^-x` and `Pr[D - U >= 2 sqrt(D x)] <= e^-x`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Chi2TailBounds {
    pub upper_threshold: f64,
    pub upper_bound: LogReal,
    pub lower_threshold: f64,
    pub lower_bound: LogReal,
}

pub fn chi2_tail_bounds(dof: u64, x: f64) -> Result<Chi2TailBounds> {
    if dof == 0 {
        return Err(domain("chi-square needs at least one degree of freedom"));
    }
    if !(x >= 0.0) || x.is_infinite() {
        return Err(domain(format!("x = {x} must be a finite nonnegative real")));
    }
    let root = 2.0 * (dof as f64 * x).sqrt();
    let bound = LogReal::from_ln(-x);
    Ok(Chi2TailBounds {
        upper_threshold: root + 2.0 * x,
        upper_bound: bound,
        lower_threshold: root,
        lower_bound: bound,
    })
}
