use statrs::function::gamma::checked_gamma_ur;

use crate::error::{domain, Result};

/// Regularized upper incomplete gamma `Q(s, x) = Gamma(s, x) / Gamma(s)`.
pub fn incomplete_gamma_q(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(format!("shape s = {s} must be positive and finite")));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("x = {x} must be nonnegative")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    checked_gamma_ur(s, x).map_err(|e| domain(e.to_string()))
}
