//! Energy operators `T_n^d` and `U_n^d` on `n` single-mode Fock spaces.
//!
//! `T_n^d = pi^-n int_{sum |alpha_i|^2 >= nd} |alpha><alpha| d^2 alpha` is
//! diagonal in the Fock basis because its region is invariant under per-mode
//! phase rotations. Under `|<m|alpha>|^2` the variable `|alpha|^2` is
//! `Gamma(m+1, 1)`, and a sum over modes with total `M` photons is
//! `Gamma(M+n, 1)`, so the eigenvalue is `Q(M+n, nd)`.
//!
//! `U_n^d` projects onto total photon number `M > nd`.

use serde::Serialize;

use crate::error::Result;
use crate::mathkit::incomplete_gamma_q;

/// Eigenvalue of `T_n^d` on any Fock state with `m_total` photons.
pub fn t_operator_eigenvalue(m_total: u64, n: u64, d: f64) -> Result<f64> {
    incomplete_gamma_q((m_total + n) as f64, n as f64 * d)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LgrcReport {
    pub n: u64,
    pub d: f64,
    pub m_max: u64,
    pub checked: u64,
    pub violations: u64,
    /// Smallest `2 T - U` eigenvalue over `nd < M <= m_max`, if any was checked.
    pub min_margin: Option<f64>,
    pub argmin_m: Option<u64>,
}

/// Check `U_n^d <= 2 T_n^d` eigenvalue by eigenvalue for `M <= m_max`.
///
/// Below `nd` the `U` eigenvalue is 0 and the inequality holds trivially.
pub fn verify_u_le_2t(n: u64, d: f64, m_max: u64) -> Result<LgrcReport> {
    let threshold = n as f64 * d;
    let first = if threshold < 0.0 { 0 } else { threshold.floor() as u64 + 1 };
    let mut report = LgrcReport {
        n,
        d,
        m_max,
        checked: 0,
        violations: 0,
        min_margin: None,
        argmin_m: None,
    };
    for m in first..=m_max {
        let margin = 2.0 * t_operator_eigenvalue(m, n, d)? - 1.0;
        report.checked += 1;
        if margin <= 0.0 {
            report.violations += 1;
        }
        if report.min_margin.is_none_or(|best| margin < best) {
            report.min_margin = Some(margin);
            report.argmin_m = Some(m);
        }
    }
    Ok(report)
}
