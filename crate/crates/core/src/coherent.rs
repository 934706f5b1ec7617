//! `SU(2,2)` coherent states `|Lambda, n>`.
//!
//! A state is parametrized by a 2x2 contraction `Lambda` and equals
//! `det(1 - Lambda Lambda^dag)^{n/2} exp(sum_ij lambda_ij Z_ij) |0>`, with
//! `Z11 = sum a^dag b^dag`, `Z12 = sum a^dag a'^dag`, `Z21 = sum b'^dag b^dag`
//! and `Z22 = sum a'^dag b'^dag`. Rows of `Lambda` are labelled by `(a, b')`
//! and columns by `(b, a')`.

use nalgebra::Matrix2;
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::haar::{haar_u2, C64};
use crate::mathkit::{ln_choose, LogReal};
use crate::subspace::{BasisSet, MonomialIndex};

/// Inclusive tolerance on the `D_eta` boundary.
pub const REGION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaMatrix {
    pub l11: C64,
    pub l12: C64,
    pub l21: C64,
    pub l22: C64,
}

/// Squared singular values, `x >= y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularPair {
    pub x: f64,
    pub y: f64,
}

impl SingularPair {
    pub fn new(x: f64, y: f64) -> Result<SingularPair> {
        for v in [x, y] {
            if !(0.0..1.0).contains(&v) {
                return Err(domain(format!("squared singular value {v} outside [0, 1)")));
            }
        }
        Ok(if x >= y { SingularPair { x, y } } else { SingularPair { x: y, y: x } })
    }
}

impl LambdaMatrix {
    pub const ZERO: LambdaMatrix = LambdaMatrix {
        l11: C64::new(0.0, 0.0),
        l12: C64::new(0.0, 0.0),
        l21: C64::new(0.0, 0.0),
        l22: C64::new(0.0, 0.0),
    };

    /// Checked constructor: the spectral norm must be below 1.
    pub fn new(l11: C64, l12: C64, l21: C64, l22: C64) -> Result<LambdaMatrix> {
        let m = LambdaMatrix { l11, l12, l21, l22 };
        if [l11, l12, l21, l22].iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(domain("non-finite Lambda entry"));
        }
        if m.singular_squares_raw().0 >= 1.0 {
            return Err(domain("Lambda must be a strict contraction"));
        }
        Ok(m)
    }

    pub fn from_matrix(m: &Matrix2<C64>) -> Result<LambdaMatrix> {
        LambdaMatrix::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    }

    /// `u diag(sqrt x, sqrt y) v^dag`.
    pub fn from_svd(u: &Matrix2<C64>, s: SingularPair, v: &Matrix2<C64>) -> LambdaMatrix {
        let d = Matrix2::new(
            C64::new(s.x.sqrt(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s.y.sqrt(), 0.0),
        );
        let m = u * d * v.adjoint();
        LambdaMatrix { l11: m[(0, 0)], l12: m[(0, 1)], l21: m[(1, 0)], l22: m[(1, 1)] }
    }

    pub fn diag(a: f64, b: f64) -> Result<LambdaMatrix> {
        let z = C64::new(0.0, 0.0);
        LambdaMatrix::new(C64::new(a, 0.0), z, z, C64::new(b, 0.0))
    }

    pub fn matrix(&self) -> Matrix2<C64> {
        Matrix2::new(self.l11, self.l12, self.l21, self.l22)
    }

    /// Entries in `(Z11, Z12, Z21, Z22)` order.
    pub fn entries(&self) -> [C64; 4] {
        [self.l11, self.l12, self.l21, self.l22]
    }

    pub fn det(&self) -> C64 {
        self.l11 * self.l22 - self.l12 * self.l21
    }

    fn singular_squares_raw(&self) -> (f64, f64) {
        let t: f64 = self.entries().iter().map(|z| z.norm_sqr()).sum();
        let delta = self.det().norm_sqr();
        let x = 0.5 * t + (0.25 * t * t - delta).max(0.0).sqrt();
        let y = if x > 0.0 { (delta / x).min(x) } else { 0.0 };
        (x, y)
    }

    /// Singular value decomposition `Lambda = u diag(sigma) v^dag`.
    pub fn svd(&self) -> (Matrix2<C64>, [f64; 2], Matrix2<C64>) {
        let svd = self.matrix().svd(true, true);
        let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let s = svd.singular_values;
        (u, [s[0], s[1]], v_t.adjoint())
    }
}

/// Whether every squared singular value is at most `eta` (inclusive, with
/// [`REGION_TOLERANCE`]).
pub fn in_region(l: &LambdaMatrix, eta: f64) -> bool {
    singular_squares(l).x <= eta + REGION_TOLERANCE
}

/// Squared singular values from `tr(Lambda Lambda^dag)` and `|det Lambda|^2`.
pub fn singular_squares(l: &LambdaMatrix) -> SingularPair {
    let (x, y) = l.singular_squares_raw();
    SingularPair { x, y }
}

/// `ln det(1 - Lambda Lambda^dag) = ln(1-x) + ln(1-y)`.
pub fn ln_det_one_minus(l: &LambdaMatrix) -> f64 {
    let s = singular_squares(l);
    (-s.x).ln_1p() + (-s.y).ln_1p()
}

/// `<0 | Lambda, n> = det(1 - Lambda Lambda^dag)^{n/2}`.
pub fn vacuum_overlap(l: &LambdaMatrix, n: u64) -> f64 {
    (0.5 * n as f64 * ln_det_one_minus(l)).exp()
}

/// Expansion coefficients of `|Lambda, n>` over `Z^a |0>`, `|a| <= K`, in
/// [`BasisSet`] order: `det(1 - Lambda Lambda^dag)^{n/2} lambda^a / a!`.
pub fn coherent_coeffs(l: &LambdaMatrix, n: u64, cutoff: u32) -> Vec<(MonomialIndex, C64)> {
    let basis = BasisSet::new(cutoff);
    let vac = vacuum_overlap(l, n);
    let powers = entry_powers(l, cutoff);
    basis
        .indices()
        .iter()
        .map(|m| (*m, monomial_value(&powers, m) * (vac / m.factorial_product())))
        .collect()
}

/// `powers[t][e] = lambda_t^e` for `e <= cutoff`.
pub(crate) fn entry_powers(l: &LambdaMatrix, cutoff: u32) -> [Vec<C64>; 4] {
    l.entries().map(|z| {
        let mut v = Vec::with_capacity(cutoff as usize + 1);
        let mut acc = C64::new(1.0, 0.0);
        for _ in 0..=cutoff {
            v.push(acc);
            acc *= z;
        }
        v
    })
}

pub(crate) fn monomial_value(powers: &[Vec<C64>; 4], m: &MonomialIndex) -> C64 {
    let e = m.exponents();
    powers[0][e[0] as usize]
        * powers[1][e[1] as usize]
        * powers[2][e[2] as usize]
        * powers[3][e[3] as usize]
}

/// `<Lambda1, n | Lambda2, n>`
/// `= det(1 - L1 L1^dag)^{n/2} det(1 - L2 L2^dag)^{n/2} det(1 - L1^dag L2)^{-n}`.
pub fn overlap(l1: &LambdaMatrix, l2: &LambdaMatrix, n: u64) -> C64 {
    let m = l1.matrix().adjoint() * l2.matrix();
    let det = (Matrix2::identity() - m).determinant();
    let ln_norms = 0.5 * n as f64 * (ln_det_one_minus(l1) + ln_det_one_minus(l2));
    (C64::new(ln_norms, 0.0) - det.ln() * n as f64).exp()
}

/// `q(x, y) = (n-1)(n-2)^2(n-3)(x-y)^2 / (2 (1-x)^4 (1-y)^4)`.
pub fn q_density(x: f64, y: f64, n: u64) -> Result<f64> {
    if n < 4 {
        return Err(domain(format!("q needs n >= 4, got {n}")));
    }
    for v in [x, y] {
        if !(0.0..1.0).contains(&v) {
            return Err(domain(format!("argument {v} outside [0, 1)")));
        }
    }
    let nf = n as f64;
    let c = (nf - 1.0) * (nf - 2.0).powi(2) * (nf - 3.0) / 2.0;
    Ok(c * (x - y).powi(2) / ((1.0 - x).powi(4) * (1.0 - y).powi(4)))
}

fn check_sampler_args(eta: f64, n: u64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(domain(format!("eta = {eta} outside (0, 1)")));
    }
    if n < 4 {
        return Err(domain(format!("sampler needs n >= 4, got {n}")));
    }
    Ok(())
}

/// Draw from density `prop t^-p` on `[a, 1]` for `p` in `{2, 4}`.
fn sample_power_law<R: Rng + ?Sized>(a: f64, p: i32, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let k = f64::from(p - 1);
    // CDF ∝ a^-k - t^-k; invert.
    let ak = a.powf(-k);
    (ak - u * (ak - 1.0)).powf(-1.0 / k)
}

/// `(x, y)` with density proportional to `q(x, y)` on `[0, eta]^2`, ordered
/// `x >= y`.
///
/// With `t = 1 - x`, `s = 1 - y` the target is `(t - s)^2 t^-4 s^-4`. Proposal
/// is the even mixture of `t^-2 s^-4` and `t^-4 s^-2`, both with closed-form
/// inverse CDFs; acceptance probability `(t - s)^2 / (t^2 + s^2)`, whose
/// mean stays bounded away from zero as `eta -> 0` and `eta -> 1`.
pub fn sample_radial<R: Rng + ?Sized>(eta: f64, n: u64, rng: &mut R) -> Result<SingularPair> {
    check_sampler_args(eta, n)?;
    let a = 1.0 - eta;
    loop {
        let swap: bool = rng.random();
        let (pt, ps) = if swap { (4, 2) } else { (2, 4) };
        let t = sample_power_law(a, pt, rng);
        let s = sample_power_law(a, ps, rng);
        let accept = (t - s).powi(2) / (t * t + s * s);
        if rng.random::<f64>() < accept {
            let (x, y) = ((1.0 - t).clamp(0.0, eta), (1.0 - s).clamp(0.0, eta));
            return SingularPair::new(x, y);
        }
    }
}

/// `u diag(sqrt x, sqrt y) v^dag` with `(x, y)` from [`sample_radial`] and
/// independent Haar `u, v`.
pub fn sample_lambda<R: Rng + ?Sized>(eta: f64, n: u64, rng: &mut R) -> Result<LambdaMatrix> {
    let s = sample_radial(eta, n, rng)?;
    Ok(lambda_from_pair(s, rng))
}

pub(crate) fn lambda_from_pair<R: Rng + ?Sized>(s: SingularPair, rng: &mut R) -> LambdaMatrix {
    let u = haar_u2(rng);
    let v = haar_u2(rng);
    LambdaMatrix::from_svd(&u, s, &v)
}

/// `tr[Pi_{=K} P_{x,y}] = sum_{k1+k2=K} C(n+k1-1,k1) C(n+k2-1,k2)
/// (1-x)^n (1-y)^n x^k1 y^k2`.
pub fn photon_block_weight_log(cutoff: u64, n: u64, s: SingularPair) -> LogReal {
    assert!(n >= 1, "photon_block_weight needs n >= 1");
    let nf = n as f64;
    let base = nf * ((-s.x).ln_1p() + (-s.y).ln_1p());
    let (lx, ly) = (s.x.ln(), s.y.ln());
    let mut acc = LogReal::ZERO;
    for k1 in 0..=cutoff {
        let k2 = cutoff - k1;
        let px = if k1 == 0 { 0.0 } else { k1 as f64 * lx };
        let py = if k2 == 0 { 0.0 } else { k2 as f64 * ly };
        let ln = base + ln_choose(n + k1 - 1, k1) + ln_choose(n + k2 - 1, k2) + px + py;
        if ln.is_finite() {
            acc = acc + LogReal::from_ln(ln);
        }
    }
    acc
}

pub fn photon_block_weight(cutoff: u64, n: u64, s: SingularPair) -> f64 {
    photon_block_weight_log(cutoff, n, s).value()
}
