//! Log-domain special functions and concentration bounds.

mod entropy;
mod gamma;
mod logreal;
mod tails;

pub use entropy::{pinsker_lower_bound, rel_entropy};
pub use gamma::incomplete_gamma_q;
pub use logreal::{LogReal, Sign};
pub use tails::{
    binom_tail_exact, binom_upper_tail_exact, chernoff_tail_bound, chi2_tail_bounds, reg_beta_tail_bound,
    reg_beta_tail_bound_as_printed, reg_beta_tail_exact, Chi2TailBounds,
};

use num_bigint::BigUint;
use statrs::function::factorial::ln_factorial;

/// `ln C(n, k)` via log-factorials.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Exact `C(n, k)`.
pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(5, 2), BigUint::from(10u32));
        assert_eq!(binomial_exact(4, 4), BigUint::from(1u32));
        assert_eq!(binomial_exact(3, 4), BigUint::ZERO);
        assert_eq!(binomial_exact(100, 50).to_string(), "100891344545564193334812497256");
        assert!((ln_choose(100, 50) - 66.783_841_652_017_37).abs() < 1e-10);
    }
}
