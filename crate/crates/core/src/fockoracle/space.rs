use num_traits::ToPrimitive;

use crate::error::{domain, Error, Result};
use crate::mathkit::binomial_exact;

/// Default refusal threshold for basis sizes.
pub const DEFAULT_STATE_LIMIT: u128 = 5_000_000;

/// Truncated multimode Fock space: all occupation tuples with total photon
/// number `<= cutoff`, ordered by total and then lexicographically.
///
/// States of one total occupy a contiguous index range, so photon-number
/// projections are slices.
#[derive(Clone, Debug)]
pub struct FockSpace {
    modes: usize,
    cutoff: u32,
    /// `counts[m][t]`: tuples of `m` modes with total exactly `t`.
    counts: Vec<Vec<usize>>,
    level_offsets: Vec<usize>,
    occupations: Vec<u8>,
}

/// Number of basis states of a truncated space, without building it.
pub fn fock_dimension(modes: usize, cutoff: u32) -> u128 {
    binomial_exact(modes as u64 + cutoff as u64, cutoff as u64)
        .to_u128()
        .unwrap_or(u128::MAX)
}

impl FockSpace {
    pub fn new(modes: usize, cutoff: u32) -> Result<FockSpace> {
        FockSpace::with_limit(modes, cutoff, DEFAULT_STATE_LIMIT)
    }

    pub fn with_limit(modes: usize, cutoff: u32, limit: u128) -> Result<FockSpace> {
        if modes == 0 {
            return Err(domain("a Fock space needs at least one mode"));
        }
        if cutoff > u8::MAX as u32 {
            return Err(domain("cutoff above 255 photons is not supported"));
        }
        let estimate = fock_dimension(modes, cutoff);
        if estimate > limit {
            return Err(Error::ResourceGuard { estimate, limit });
        }
        let c = cutoff as usize;
        let mut counts = vec![vec![0usize; c + 1]; modes + 1];
        counts[0][0] = 1;
        for m in 1..=modes {
            for t in 0..=c {
                counts[m][t] = (0..=t).map(|v| counts[m - 1][t - v]).sum();
            }
        }
        let mut level_offsets = vec![0usize];
        for t in 0..=c {
            level_offsets.push(level_offsets[t] + counts[modes][t]);
        }
        let dim = level_offsets[c + 1];
        let mut occupations = Vec::with_capacity(dim * modes);
        let mut buf = vec![0u8; modes];
        for t in 0..=cutoff {
            enumerate_level(&mut buf, 0, t, &mut occupations);
        }
        debug_assert_eq!(occupations.len(), dim * modes);
        Ok(FockSpace { modes, cutoff, counts, level_offsets, occupations })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.level_offsets[self.cutoff as usize + 1]
    }

    /// Index range of the states with exactly `photons` photons.
    pub fn level(&self, photons: u32) -> std::ops::Range<usize> {
        let t = photons as usize;
        self.level_offsets[t]..self.level_offsets[t + 1]
    }

    pub fn occupation(&self, index: usize) -> &[u8] {
        &self.occupations[index * self.modes..(index + 1) * self.modes]
    }

    /// Position of an occupation tuple, or `None` above the cutoff.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        debug_assert_eq!(occ.len(), self.modes);
        let total: u32 = occ.iter().map(|&o| o as u32).sum();
        if total > self.cutoff {
            return None;
        }
        let mut rank = self.level_offsets[total as usize];
        let mut remaining = total as usize;
        for (pos, &o) in occ.iter().enumerate() {
            let rest = self.modes - pos - 1;
            for v in 0..o as usize {
                rank += self.counts[rest][remaining - v];
            }
            remaining -= o as usize;
        }
        Some(rank)
    }

    pub fn vacuum(&self) -> usize {
        0
    }
}

fn enumerate_level(buf: &mut [u8], pos: usize, remaining: u32, out: &mut Vec<u8>) {
    if pos == buf.len() - 1 {
        buf[pos] = remaining as u8;
        out.extend_from_slice(buf);
        return;
    }
    for v in 0..=remaining {
        buf[pos] = v as u8;
        enumerate_level(buf, pos + 1, remaining - v, out);
    }
}
