use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::mathkit::binomial_exact;

/// Exponents `(i, j, k, l)` of `Z11^i Z12^j Z21^k Z22^l |0>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MonomialIndex {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub l: u32,
}

impl MonomialIndex {
    pub const VACUUM: MonomialIndex = MonomialIndex { i: 0, j: 0, k: 0, l: 0 };

    pub const fn new(i: u32, j: u32, k: u32, l: u32) -> MonomialIndex {
        MonomialIndex { i, j, k, l }
    }

    pub fn from_array(e: [u32; 4]) -> MonomialIndex {
        MonomialIndex::new(e[0], e[1], e[2], e[3])
    }

    pub fn exponents(&self) -> [u32; 4] {
        [self.i, self.j, self.k, self.l]
    }

    /// Number of pair excitations; the photon number is twice this.
    pub fn degree(&self) -> u32 {
        self.i + self.j + self.k + self.l
    }

    /// `i! j! k! l!` as a float.
    pub fn factorial_product(&self) -> f64 {
        self.exponents()
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product()
    }
}

/// All monomials with total degree `<= K`, graded by degree and
/// lexicographic on `(i, j, k, l)` within a degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSet {
    cutoff: u32,
    indices: Vec<MonomialIndex>,
    /// `offsets[d]..offsets[d+1]` is the degree-`d` block.
    offsets: Vec<usize>,
}

impl BasisSet {
    pub fn new(cutoff: u32) -> BasisSet {
        let mut indices = Vec::new();
        let mut offsets = vec![0];
        for d in 0..=cutoff {
            for i in (0..=d).rev() {
                for j in (0..=d - i).rev() {
                    for k in (0..=d - i - j).rev() {
                        indices.push(MonomialIndex::new(i, j, k, d - i - j - k));
                    }
                }
            }
            offsets.push(indices.len());
        }
        // Descending loops produce descending lex order; flip each block.
        for d in 0..=cutoff as usize {
            indices[offsets[d]..offsets[d + 1]].reverse();
        }
        BasisSet { cutoff, indices, offsets }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MonomialIndex] {
        &self.indices
    }

    pub fn block_range(&self, degree: u32) -> std::ops::Range<usize> {
        let d = degree as usize;
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn block(&self, degree: u32) -> &[MonomialIndex] {
        &self.indices[self.block_range(degree)]
    }

    pub fn position(&self, idx: &MonomialIndex) -> Option<usize> {
        if idx.degree() > self.cutoff {
            return None;
        }
        let range = self.block_range(idx.degree());
        self.indices[range.clone()].binary_search(idx).ok().map(|p| range.start + p)
    }
}

/// `dim V_{=K} = C(K+3, 3)`.
pub fn dim_v_eq(k: u64) -> BigUint {
    binomial_exact(k + 3, 3)
}

/// `dim V_{<=K} = C(K+4, 4)`.
pub fn dim_v_leq(k: u64) -> BigUint {
    binomial_exact(k + 4, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn dim_as_usize(d: BigUint) -> usize {
        d.to_usize().expect("dimension fits in usize")
    }

    #[test]
    fn small_dimensions() {
        let pairs: Vec<(u64, u64)> = (0..3)
            .map(|k| (dim_v_eq(k).to_u64().unwrap(), dim_v_leq(k).to_u64().unwrap()))
            .collect();
        assert_eq!(pairs, vec![(1, 1), (4, 5), (10, 15)]);
    }

    #[test]
    fn enumeration_matches_formulas() {
        for k in 0..=12u32 {
            let b = BasisSet::new(k);
            assert_eq!(b.len(), dim_as_usize(dim_v_leq(k as u64)));
            for d in 0..=k {
                assert_eq!(b.block(d).len(), dim_as_usize(dim_v_eq(d as u64)));
                assert!(b.block(d).iter().all(|m| m.degree() == d));
                assert!(b.block(d).windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn ordering_and_lookup() {
        let b = BasisSet::new(2);
        assert_eq!(b.indices()[0], MonomialIndex::VACUUM);
        assert_eq!(b.indices()[1], MonomialIndex::new(0, 0, 0, 1));
        assert_eq!(b.indices()[4], MonomialIndex::new(1, 0, 0, 0));
        for (p, m) in b.indices().iter().enumerate() {
            assert_eq!(b.position(m), Some(p));
        }
        assert_eq!(b.position(&MonomialIndex::new(3, 0, 0, 0)), None);
    }
}
