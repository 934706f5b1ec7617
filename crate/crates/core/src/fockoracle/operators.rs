use crate::error::{domain, Error, Result};
use crate::haar::C64;

use super::space::FockSpace;

/// Which pair-creation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZKind {
    Z11,
    Z12,
    Z21,
    Z22,
}

impl ZKind {
    pub const ALL: [ZKind; 4] = [ZKind::Z11, ZKind::Z12, ZKind::Z21, ZKind::Z22];

    /// Offsets of the two created modes within one copy `(a, b, a', b')`.
    fn mode_pair(self) -> (usize, usize) {
        match self {
            ZKind::Z11 => (MODE_A, MODE_B),
            ZKind::Z12 => (MODE_A, MODE_A_PRIME),
            ZKind::Z21 => (MODE_B_PRIME, MODE_B),
            ZKind::Z22 => (MODE_A_PRIME, MODE_B_PRIME),
        }
    }
}

/// Mode layout: copy `i` owns modes `4i + {a, b, a', b'}`.
pub const MODE_A: usize = 0;
pub const MODE_B: usize = 1;
pub const MODE_A_PRIME: usize = 2;
pub const MODE_B_PRIME: usize = 3;

/// Real sparse operator on a [`FockSpace`], stored as `(target, source, value)`.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    /// `out += coeff * self * v`.
    pub fn apply_add(&self, v: &[C64], coeff: C64, out: &mut [C64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, got: v.len() });
        }
        if out.len() != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, got: out.len() });
        }
        for &(t, s, val) in &self.entries {
            let x = v[s as usize];
            if x.re != 0.0 || x.im != 0.0 {
                out[t as usize] += coeff * x * val;
            }
        }
        Ok(())
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_add(v, C64::new(1.0, 0.0), &mut out)?;
        Ok(out)
    }
}

/// `Z = sum_i c_{p,i}^dag c_{q,i}^dag` over `n` copies, truncated at the
/// space's cutoff (matrix elements leaving the space are dropped).
pub fn build_z(space: &FockSpace, which: ZKind, n: usize) -> Result<SparseOperator> {
    if space.modes() != 4 * n {
        return Err(domain(format!(
            "space has {} modes but {n} copies need {}",
            space.modes(),
            4 * n
        )));
    }
    if n == 0 {
        return Err(domain("need at least one copy"));
    }
    let (p, q) = which.mode_pair();
    let mut entries = Vec::new();
    let mut buf = vec![0u8; space.modes()];
    let top = space.level(space.cutoff().saturating_sub(1)).start;
    for src in 0..top.min(space.dim()) {
        let occ = space.occupation(src);
        let total: u32 = occ.iter().map(|&o| o as u32).sum();
        if total + 2 > space.cutoff() {
            continue;
        }
        for copy in 0..n {
            let (mp, mq) = (4 * copy + p, 4 * copy + q);
            buf.copy_from_slice(occ);
            let amp = ((buf[mp] as f64 + 1.0) * (buf[mq] as f64 + 1.0)).sqrt();
            buf[mp] += 1;
            buf[mq] += 1;
            let target = space.index_of(&buf).expect("below cutoff");
            entries.push((target as u32, src as u32, amp));
        }
    }
    Ok(SparseOperator { dim: space.dim(), entries })
}

/// The four `Z` operators in `(Z11, Z12, Z21, Z22)` order.
pub fn build_all_z(space: &FockSpace, n: usize) -> Result<[SparseOperator; 4]> {
    Ok([
        build_z(space, ZKind::Z11, n)?,
        build_z(space, ZKind::Z12, n)?,
        build_z(space, ZKind::Z21, n)?,
        build_z(space, ZKind::Z22, n)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vacuum(space: &FockSpace) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); space.dim()];
        v[space.vacuum()] = C64::new(1.0, 0.0);
        v
    }

    fn norm_sqr(v: &[C64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum()
    }

    #[test]
    fn single_copy_action() {
        let space = FockSpace::new(4, 4).unwrap();
        let z11 = build_z(&space, ZKind::Z11, 1).unwrap();
        let out = z11.apply(&vacuum(&space)).unwrap();
        let target = space.index_of(&[1, 1, 0, 0]).unwrap();
        assert_eq!(out[target], C64::new(1.0, 0.0));
        assert_eq!(norm_sqr(&out), 1.0);
    }

    #[test]
    fn norms_and_commutation() {
        for n in 1..=3usize {
            let space = FockSpace::new(4 * n, 4).unwrap();
            let zs = build_all_z(&space, n).unwrap();
            let vac = vacuum(&space);
            for z in &zs {
                assert!((norm_sqr(&z.apply(&vac).unwrap()) - n as f64).abs() < 1e-12);
            }
            for a in &zs {
                for b in &zs {
                    let ab = a.apply(&b.apply(&vac).unwrap()).unwrap();
                    let ba = b.apply(&a.apply(&vac).unwrap()).unwrap();
                    let diff: f64 = ab.iter().zip(&ba).map(|(x, y)| (x - y).norm()).sum();
                    assert!(diff < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mode_count_mismatch() {
        let space = FockSpace::new(5, 2).unwrap();
        assert!(build_z(&space, ZKind::Z11, 1).is_err());
    }
}
