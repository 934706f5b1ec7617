use nalgebra::DMatrix;

use crate::coherent::{photon_block_weight, singular_squares, vacuum_overlap, LambdaMatrix};
use crate::error::{domain, Error, Result};
use crate::haar::C64;
use crate::subspace::{BasisSet, MonomialIndex};

use super::operators::{build_all_z, SparseOperator};
use super::space::{fock_dimension, FockSpace, DEFAULT_STATE_LIMIT};

/// Largest acceptable truncation tail for [`coherent_truncated`].
pub const TAIL_LIMIT: f64 = 1e-8;

/// A Fock space for `n` copies together with its `Z` operators.
pub struct PairSpace {
    pub space: FockSpace,
    pub n: usize,
    pub z: [SparseOperator; 4],
}

impl PairSpace {
    pub fn new(n: usize, cutoff: u32) -> Result<PairSpace> {
        PairSpace::with_limit(n, cutoff, DEFAULT_STATE_LIMIT)
    }

    pub fn with_limit(n: usize, cutoff: u32, limit: u128) -> Result<PairSpace> {
        if n == 0 {
            return Err(domain("need at least one copy"));
        }
        let space = FockSpace::with_limit(4 * n, cutoff, limit)?;
        let z = build_all_z(&space, n)?;
        Ok(PairSpace { space, n, z })
    }

    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.space.dim()];
        v[self.space.vacuum()] = C64::new(1.0, 0.0);
        v
    }

    /// `Z11^i Z12^j Z21^k Z22^l |0>`.
    pub fn monomial_vector(&self, idx: &MonomialIndex) -> Result<Vec<C64>> {
        if 2 * idx.degree() > self.space.cutoff() {
            return Err(domain(format!(
                "monomial of degree {} needs cutoff >= {}, space has {}",
                idx.degree(),
                2 * idx.degree(),
                self.space.cutoff()
            )));
        }
        let mut v = self.vacuum();
        for (op, &e) in self.z.iter().zip(idx.exponents().iter()) {
            for _ in 0..e {
                v = op.apply(&v)?;
            }
        }
        Ok(v)
    }

    /// Components `(sum lambda_ij Z_ij)^d |0> / d!` for `d = 0..=cutoff/2`,
    /// without the `det^{n/2}` normalization. Each lives on photon level `2d`.
    pub fn exponential_components(&self, l: &LambdaMatrix) -> Result<Vec<Vec<C64>>> {
        let entries = l.entries();
        let max_degree = self.space.cutoff() / 2;
        let mut out = vec![self.vacuum()];
        for d in 1..=max_degree {
            let prev = &out[d as usize - 1];
            let mut next = vec![C64::new(0.0, 0.0); self.space.dim()];
            for (op, &lam) in self.z.iter().zip(entries.iter()) {
                op.apply_add(prev, lam / d as f64, &mut next)?;
            }
            out.push(next);
        }
        Ok(out)
    }
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Pairwise inner products of the monomial vectors of `V_{<=K}`, in
/// [`BasisSet`] order, computed in the `4n`-mode Fock space with cutoff `2K`.
pub fn gram_oracle(n: usize, cutoff: u32) -> Result<DMatrix<f64>> {
    gram_oracle_with_limit(n, cutoff, DEFAULT_STATE_LIMIT)
}

pub fn gram_oracle_with_limit(n: usize, cutoff: u32, limit: u128) -> Result<DMatrix<f64>> {
    let ps = PairSpace::with_limit(n, 2 * cutoff, limit)?;
    let basis = BasisSet::new(cutoff);
    let vectors = basis
        .indices()
        .iter()
        .map(|m| ps.monomial_vector(m))
        .collect::<Result<Vec<_>>>()?;
    let size = basis.len();
    let mut g = DMatrix::zeros(size, size);
    for a in 0..size {
        for b in a..size {
            let z = inner(&vectors[a], &vectors[b]);
            debug_assert!(z.im.abs() < 1e-9 * (1.0 + z.re.abs()));
            g[(a, b)] = z.re;
            g[(b, a)] = z.re;
        }
    }
    Ok(g)
}

/// A truncated coherent state and its bookkeeping.
pub struct TruncatedState {
    pub vector: Vec<C64>,
    /// `1 - sum_{d <= cutoff/2} tr[Pi_{=d} P]`, the mass lost to truncation.
    pub tail: f64,
}

/// `|Lambda, n>` expanded up to the space's cutoff, normalized by
/// `det(1 - Lambda Lambda^dag)^{n/2}`.
///
/// Refuses when the truncation tail exceeds [`TAIL_LIMIT`].
pub fn coherent_truncated(l: &LambdaMatrix, ps: &PairSpace) -> Result<TruncatedState> {
    let tail = truncation_tail(l, ps.n as u64, ps.space.cutoff() / 2);
    if tail > TAIL_LIMIT {
        return Err(Error::TailTooLarge { tail, limit: TAIL_LIMIT });
    }
    let comps = ps.exponential_components(l)?;
    let scale = vacuum_overlap(l, ps.n as u64);
    let mut vector = vec![C64::new(0.0, 0.0); ps.space.dim()];
    for c in &comps {
        for (v, x) in vector.iter_mut().zip(c) {
            *v += x * scale;
        }
    }
    Ok(TruncatedState { vector, tail })
}

/// Mass of `|Lambda, n>` above `max_degree` pair excitations.
pub fn truncation_tail(l: &LambdaMatrix, n: u64, max_degree: u32) -> f64 {
    let s = singular_squares(l);
    let kept: f64 = (0..=max_degree as u64).map(|k| photon_block_weight(k, n, s)).sum();
    (1.0 - kept).max(0.0)
}

/// `<Lambda1 | Pi_{=d} | Lambda2>` for one copy, `d = 0..=cutoff/2`,
/// computed in the 4-mode Fock space.
pub fn per_copy_degree_overlaps(
    ps: &PairSpace,
    l1: &LambdaMatrix,
    l2: &LambdaMatrix,
) -> Result<Vec<C64>> {
    if ps.n != 1 {
        return Err(domain("per-copy overlaps need a single-copy space"));
    }
    let c1 = ps.exponential_components(l1)?;
    let c2 = ps.exponential_components(l2)?;
    let scale = vacuum_overlap(l1, 1) * vacuum_overlap(l2, 1);
    Ok(c1.iter().zip(&c2).map(|(a, b)| inner(a, b) * scale).collect())
}

/// Overlap `<Lambda1, n | Pi_{<= cutoff photons} | Lambda2, n>` from the
/// per-copy degree overlaps: `|Lambda, n> = |Lambda, 1>^{tensor n}` and the
/// global photon projector couples copies only through the total.
pub fn truncated_overlap_from_copies(per_copy: &[C64], n: usize, max_total_degree: usize) -> C64 {
    // conv[t] = sum over d_1 + ... + d_m = t of prod per_copy[d_i].
    let mut conv = vec![C64::new(0.0, 0.0); max_total_degree + 1];
    conv[0] = C64::new(1.0, 0.0);
    for _ in 0..n {
        let mut next = vec![C64::new(0.0, 0.0); max_total_degree + 1];
        for (t, &c) in conv.iter().enumerate() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for (d, &p) in per_copy.iter().enumerate() {
                if t + d > max_total_degree {
                    break;
                }
                next[t + d] += c * p;
            }
        }
        conv = next;
    }
    conv.iter().sum()
}

/// Truncated inner product `<Lambda1, n | Lambda2, n>` with a global cutoff
/// of `cutoff` photons, using one 4-mode space.
pub fn truncated_overlap(
    single: &PairSpace,
    l1: &LambdaMatrix,
    l2: &LambdaMatrix,
    n: usize,
) -> Result<C64> {
    let per_copy = per_copy_degree_overlaps(single, l1, l2)?;
    Ok(truncated_overlap_from_copies(&per_copy, n, (single.space.cutoff() / 2) as usize))
}

/// Weights `||Pi_{=d} |Lambda, n>||^2` for `d = 0..=cutoff/2`, by projecting the
/// Fock-space state onto photon levels.
pub fn degree_weights(ps: &PairSpace, l: &LambdaMatrix) -> Result<Vec<f64>> {
    let comps = ps.exponential_components(l)?;
    let scale = vacuum_overlap(l, ps.n as u64).powi(2);
    Ok(comps
        .iter()
        .enumerate()
        .map(|(d, c)| {
            let level = ps.space.level(2 * d as u32);
            c[level].iter().map(|z| z.norm_sqr()).sum::<f64>() * scale
        })
        .collect())
}

/// Guideline size check for [`gram_oracle`] before building anything.
pub fn gram_oracle_size(n: usize, cutoff: u32) -> u128 {
    fock_dimension(4 * n, 2 * cutoff)
}
