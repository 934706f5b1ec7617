//! Verification suites shared by `gdf verify` and the acceptance run.

use gdf_core::fockoracle::{gram_oracle, invariance_check, invariance_deviation, single_pair_vector, verify_u_le_2t, PairSpace};
use gdf_core::mathkit::{
    binom_upper_tail_exact, chernoff_tail_bound, pinsker_lower_bound, reg_beta_tail_bound,
    reg_beta_tail_exact, rel_entropy,
};
use gdf_core::parallel::substream;
use gdf_core::subspace::{gram_matrix, BasisSet, MonomialIndex};
use gdf_core::{Error, Result};
use serde::Serialize;

pub const GRAM_TOLERANCE: f64 = 1e-9;
pub const INVARIANCE_TOLERANCE: f64 = 1e-9;
pub const CONTROL_THRESHOLD: f64 = 1e-3;
/// Relative slack in log space for ties between a bound and its target.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct GramCheck {
    pub n: usize,
    #[serde(rename = "K")]
    pub cutoff: u32,
    pub entries: usize,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Closed-form Gram matrix against inner products in the Fock space.
pub fn gram_suite(n: usize, cutoff: u32) -> Result<GramCheck> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let series = gram_matrix(n as u64, cutoff);
    let oracle = gram_oracle(n, cutoff)?;
    let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
    for (s, o) in series.iter().zip(oracle.iter()) {
        let diff = (s - o).abs();
        max_abs = max_abs.max(diff);
        let rel = if *o == 0.0 { diff } else { diff / o.abs() };
        max_rel = max_rel.max(rel);
    }
    Ok(GramCheck {
        n,
        cutoff,
        entries: series.len(),
        max_abs_deviation: max_abs,
        max_rel_deviation: max_rel,
        tolerance: GRAM_TOLERANCE,
        passed: max_rel <= GRAM_TOLERANCE,
    })
}

/// Outcome of comparing a bound against an exact value on a grid.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GridTally {
    pub checked: u64,
    pub skipped: u64,
    pub ties: u64,
    pub violations: u64,
    /// Smallest `ln(bound) - ln(exact)` seen.
    pub min_log_margin: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
}

impl GridTally {
    fn record(&mut self, ln_bound: f64, ln_exact: f64, point: &[f64]) {
        self.checked += 1;
        let margin = if ln_exact == f64::NEG_INFINITY {
            if ln_bound == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY }
        } else {
            ln_bound - ln_exact
        };
        if margin.abs() <= TIE_TOLERANCE {
            self.ties += 1;
        } else if margin < 0.0 {
            self.violations += 1;
        }
        if self.min_log_margin.is_none_or(|m| margin < m) {
            self.min_log_margin = Some(margin);
            self.worst_point = Some(point.to_vec());
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TailsCheck {
    pub reg_beta: GridTally,
    pub chernoff: GridTally,
    pub pinsker: GridTally,
    pub passed: bool,
}

fn interior_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|j| j as f64 / (points + 1) as f64).collect()
}

/// Regularized-Beta, Chernoff and Pinsker bounds against exact values.
pub fn tails_suite(k_max: u64, n_max: u64, grid: usize, pinsker_grid: usize) -> Result<TailsCheck> {
    let etas = interior_grid(grid);

    let mut reg_beta = GridTally::default();
    for k in 1..=k_max {
        for n in 1..=n_max {
            for &eta in &etas {
                match reg_beta_tail_bound(eta, k, n) {
                    Ok(bound) => {
                        let exact = reg_beta_tail_exact(eta, k, n)?;
                        reg_beta.record(bound.ln(), exact.ln(), &[k as f64, n as f64, eta]);
                    }
                    Err(Error::Precondition(_)) => reg_beta.skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }

    let mut chernoff = GridTally::default();
    for n in 1..=n_max {
        for &p in &etas {
            let first = (p * n as f64).ceil() as u64;
            for j in first..=n {
                let t = (j as f64 / n as f64 - p).max(0.0);
                let bound = chernoff_tail_bound(n, p, t.min(1.0 - p))?;
                let exact = binom_upper_tail_exact(j, n, p)?;
                chernoff.record(bound.ln(), exact.ln(), &[n as f64, p, j as f64]);
            }
        }
    }

    let mut pinsker = GridTally::default();
    let axis: Vec<f64> = (0..pinsker_grid)
        .map(|i| if pinsker_grid == 1 { 0.5 } else { i as f64 / (pinsker_grid - 1) as f64 })
        .collect();
    for &x in &axis {
        for &y in &axis {
            let d = rel_entropy(x, y)?;
            let lower = pinsker_lower_bound(x, y)?;
            // Dominance of D over the Pinsker bound, recorded as bound = D.
            pinsker.record(d.ln(), lower.ln(), &[x, y]);
        }
    }

    let passed = reg_beta.violations == 0 && chernoff.violations == 0 && pinsker.violations == 0;
    Ok(TailsCheck { reg_beta, chernoff, pinsker, passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct LgrcCheck {
    pub n_max: u64,
    pub d_max: f64,
    pub d_step: f64,
    pub extra: u64,
    pub checked: u64,
    pub violations: u64,
    pub min_margin: Option<f64>,
    /// `(n, d, M)` at the smallest margin.
    pub argmin: Option<(u64, f64, u64)>,
    pub passed: bool,
}

/// `2 Q(M+n, nd) - 1 > 0` for `nd < M <= nd + extra` over the `(n, d)` grid.
pub fn lgrc_suite(n_max: u64, d_max: f64, d_step: f64, extra: u64) -> Result<LgrcCheck> {
    if !(d_step > 0.0) || !(d_max >= d_step) {
        return Err(Error::Domain(format!("need 0 < d_step <= d_max, got {d_step}, {d_max}")));
    }
    let steps = (d_max / d_step + 1e-9).floor() as u64;
    let mut out = LgrcCheck {
        n_max,
        d_max,
        d_step,
        extra,
        checked: 0,
        violations: 0,
        min_margin: None,
        argmin: None,
        passed: false,
    };
    for n in 1..=n_max {
        for j in 1..=steps {
            let d = j as f64 * d_step;
            let m_max = (n as f64 * d).floor() as u64 + extra;
            let r = verify_u_le_2t(n, d, m_max)?;
            out.checked += r.checked;
            out.violations += r.violations;
            if let (Some(m), Some(at)) = (r.min_margin, r.argmin_m) {
                if out.min_margin.is_none_or(|best| m < best) {
                    out.min_margin = Some(m);
                    out.argmin = Some((n, d, at));
                }
            }
        }
    }
    out.passed = out.violations == 0 && out.checked > 0;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonomialDeviation {
    pub index: MonomialIndex,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceCheck {
    pub n: usize,
    pub degree: u32,
    pub trials: u64,
    pub seed: u64,
    pub monomials: Vec<MonomialDeviation>,
    pub max_deviation: f64,
    /// Deviation of `a_1^dag b_1^dag |0>`; absent for `n = 1`, where that
    /// vector is itself invariant.
    pub control_deviation: Option<f64>,
    pub passed: bool,
}

pub fn invariance_suite(n: usize, degree: u32, trials: u64, seed: u64) -> Result<InvarianceCheck> {
    let mut rng = substream(seed, 0);
    let basis = BasisSet::new(degree);
    let mut monomials = Vec::new();
    for idx in basis.indices() {
        let deviation = invariance_check(n, idx, trials as usize, &mut rng)?;
        monomials.push(MonomialDeviation { index: *idx, deviation });
    }
    let max_deviation = monomials.iter().map(|m| m.deviation).fold(0.0, f64::max);
    let control_deviation = if n >= 2 {
        let ps = PairSpace::new(n, 2)?;
        Some(invariance_deviation(&ps, &single_pair_vector(&ps), trials as usize, &mut rng)?)
    } else {
        None
    };
    let passed = max_deviation <= INVARIANCE_TOLERANCE
        && control_deviation.is_none_or(|c| c > CONTROL_THRESHOLD);
    Ok(InvarianceCheck { n, degree, trials, seed, monomials, max_deviation, control_deviation, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(gram_suite(2, 1).unwrap().passed);
        let t = tails_suite(4, 20, 3, 7).unwrap();
        assert!(t.passed, "{t:?}");
        assert!(t.reg_beta.ties > 0);
        let l = lgrc_suite(3, 2.0, 0.5, 20).unwrap();
        assert!(l.passed && l.checked > 0);
        let i = invariance_suite(2, 1, 3, 1).unwrap();
        assert!(i.passed, "{i:?}");
        assert!(lgrc_suite(3, 1.0, 0.0, 1).is_err());
    }
}
