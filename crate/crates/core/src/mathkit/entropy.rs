use crate::error::{domain, Result};

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain(format!("{name} = {p} is not a probability")))
    }
}

/// `x ln(x/y)` with `0 ln 0 = 0` and `+inf` when `y = 0 < x`.
fn xlogxy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x * (x.ln() - y.ln())
    }
}

/// Binary relative entropy `D(x || y)` in nats.
pub fn rel_entropy(x: f64, y: f64) -> Result<f64> {
    check_probability("x", x)?;
    check_probability("y", y)?;
    let d = xlogxy(x, y) + xlogxy(1.0 - x, 1.0 - y);
    // Rounding can push the sum a hair below zero when x is close to y.
    Ok(d.max(0.0))
}

/// Pinsker's lower bound `2 (x - y)^2` on [`rel_entropy`], in nats.
///
/// The base-2 form `(2 / ln 2)(x - y)^2` is this divided by `ln 2`.
pub fn pinsker_lower_bound(x: f64, y: f64) -> Result<f64> {
    check_probability("x", x)?;
    check_probability("y", y)?;
    Ok(2.0 * (x - y) * (x - y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn reference_values() {
        assert_eq!(rel_entropy(0.3, 0.3).unwrap(), 0.0);
        assert_relative_eq!(rel_entropy(1.0, 0.5).unwrap(), LN_2, max_relative = 1e-15);
        let want = 0.5 * LN_2 + 0.5 * (2.0f64 / 3.0).ln();
        assert_relative_eq!(rel_entropy(0.5, 0.25).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(want, 0.143_841_036_225_890_2, max_relative = 1e-12);
    }

    #[test]
    fn endpoints() {
        assert_eq!(rel_entropy(1.0, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(rel_entropy(0.0, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(rel_entropy(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(pinsker_lower_bound(1.0, 0.0).unwrap(), 2.0);
        assert!(rel_entropy(1.5, 0.5).is_err());
        assert!(pinsker_lower_bound(0.5, -0.1).is_err());
    }

    #[test]
    fn pinsker_dominated_on_grid() {
        for i in 1..=19 {
            for j in 1..=19 {
                let (x, y) = (i as f64 * 0.05, j as f64 * 0.05);
                assert!(pinsker_lower_bound(x, y).unwrap() <= rel_entropy(x, y).unwrap());
            }
        }
    }
}
