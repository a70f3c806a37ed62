use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn floor_log2(x: u64) -> usize {
    assert!(x > 0);
    63 - x.leading_zeros() as usize
}

/// Bit-length indices of the two factors and of `N` (each `floor(log2 .)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BitSplit {
    pub lp: usize,
    pub lq: usize,
    pub ln: usize,
}

impl BitSplit {
    /// Odd values representable with both end bits fixed to one.
    pub fn p_range(&self) -> std::ops::RangeInclusive<u64> {
        (1u64 << self.lp) + 1..=(1u64 << (self.lp + 1)) - 1
    }

    pub fn q_range(&self) -> std::ops::RangeInclusive<u64> {
        (1u64 << self.lq) + 1..=(1u64 << (self.lq + 1)) - 1
    }
}

/// All bit splits `(L_p, L_q)` with `L_p <= L_q` under which some factor
/// pair of `n` is representable. Empty for even `n` and for primes.
pub fn enumerate_bit_splits(n: u64) -> Vec<BitSplit> {
    if n % 2 == 0 || n < 9 {
        return Vec::new();
    }
    let ln = floor_log2(n);
    let mut splits = Vec::new();
    let mut p = 3u64;
    while p * p <= n {
        if n % p == 0 {
            let q = n / p;
            let split = BitSplit {
                lp: floor_log2(p),
                lq: floor_log2(q),
                ln,
            };
            if !splits.contains(&split) {
                splits.push(split);
            }
        }
        p += 2;
    }
    splits.sort();
    splits
}

/// Block decomposition of the multiplication table and the resulting
/// variable budget. Per-block vectors are indexed from block 1 at position 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub split: BitSplit,
    pub width: usize,
    pub block_count: usize,
    pub max_sums: Vec<u64>,
    pub carry_counts: Vec<usize>,
    pub carry_prefix: Vec<usize>,
    pub total_carries: usize,
    pub num_blocks: usize,
    pub aux_count: usize,
    pub total_qubits: usize,
}

/// Number of `p_m * q_n` products landing in column `j` of the table.
pub(crate) fn column_size(split: &BitSplit, j: usize) -> u64 {
    (0..=split.lp)
        .filter(|&m| j >= m && j - m <= split.lq)
        .count() as u64
}

pub fn build_block_layout(split: BitSplit, width: usize) -> Result<BlockLayout> {
    if width == 0 {
        return Err(Error::InvalidBlockWidth(width));
    }
    let bits = split.lp + split.lq;
    if bits < width {
        return Err(Error::BlockWidthTooLarge { width, bits });
    }
    let block_count = bits / width;

    let mut max_sums = Vec::with_capacity(block_count);
    let mut carry_counts = Vec::with_capacity(block_count);
    let mut carry_prefix = Vec::with_capacity(block_count);
    let mut carry_max_in = 0u64;
    let mut prefix = 0usize;
    for i in 1..=block_count {
        let start = (i - 1) * width + 1;
        let max_rho: u64 = (start..start + width)
            .map(|j| column_size(&split, j) << (j - start))
            .sum();
        let max_sum = carry_max_in + max_rho;
        let overflow = max_sum >> width;
        let c = if overflow == 0 {
            0
        } else {
            floor_log2(overflow) + 1
        };
        max_sums.push(max_sum);
        carry_counts.push(c);
        carry_prefix.push(prefix);
        prefix += c;
        carry_max_in = (1u64 << c) - 1;
    }

    let (total_carries, num_blocks) = if split.ln as i64 - (block_count * width) as i64 > 1 {
        (carry_counts.iter().sum(), block_count + 1)
    } else {
        (carry_counts[..block_count - 1].iter().sum(), block_count)
    };
    let aux_count = (split.lp - 1) * (split.lq - 1);
    let total_qubits = (split.lp - 1) + (split.lq - 1) + total_carries + aux_count;

    Ok(BlockLayout {
        split,
        width,
        block_count,
        max_sums,
        carry_counts,
        carry_prefix,
        total_carries,
        num_blocks,
        aux_count,
        total_qubits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(lp: usize, lq: usize, ln: usize) -> BitSplit {
        BitSplit { lp, lq, ln }
    }

    #[test]
    fn splits_of_small_composites() {
        assert!(enumerate_bit_splits(143).contains(&split(3, 3, 7)));
        assert!(enumerate_bit_splits(15).contains(&split(1, 2, 3)));
        assert!(enumerate_bit_splits(77).contains(&split(2, 3, 6)));
        assert!(enumerate_bit_splits(4).is_empty());
        assert!(enumerate_bit_splits(13).is_empty());
        // 105 = 3*35 = 5*21 = 7*15
        assert_eq!(
            enumerate_bit_splits(105),
            vec![split(1, 5, 6), split(2, 3, 6), split(2, 4, 6)]
        );
    }

    #[test]
    fn layout_for_143() {
        let l = build_block_layout(split(3, 3, 7), 3).unwrap();
        assert_eq!(l.block_count, 2);
        assert_eq!(l.max_sums[0], 24);
        assert_eq!(l.carry_counts[0], 2);
        assert_eq!(l.total_carries, 2);
        assert_eq!(l.num_blocks, 2);
        assert_eq!(l.total_qubits, 10);
    }

    #[test]
    fn layout_without_auxiliaries() {
        let l = build_block_layout(split(1, 1, 3), 2).unwrap();
        assert_eq!(l.aux_count, 0);
    }

    #[test]
    fn layout_for_77() {
        let l = build_block_layout(split(2, 3, 6), 3).unwrap();
        assert_eq!(l.total_qubits, 7);
    }

    #[test]
    fn rejects_zero_width() {
        assert!(matches!(
            build_block_layout(split(3, 3, 7), 0),
            Err(Error::InvalidBlockWidth(0))
        ));
        assert!(build_block_layout(split(1, 1, 3), 3).is_err());
    }

    #[test]
    fn carry_prefix_is_exclusive_sum() {
        let l = build_block_layout(split(4, 5, 9), 2).unwrap();
        let mut acc = 0;
        for (c, chi) in l.carry_counts.iter().zip(&l.carry_prefix) {
            assert_eq!(*chi, acc);
            acc += c;
        }
    }
}
