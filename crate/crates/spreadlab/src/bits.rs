//! Fixed-length bitsets indexed by GF(2) vectors, with the XOR-translation
//! permutation implemented as a butterfly of delta swaps.
//!
//! A `Bitset` over `F2^n` holds `2^n` bits; bit `v` says whether vector `v`
//! is present. XOR-translating the whole set by `x` permutes bits
//! (`new[v] = old[v ^ x]`), which decomposes into one delta swap per set bit
//! of `x`: in-word swaps for bits 0..6, whole-word swaps above.

/// Masks of positions whose bit i is 0, for in-word delta swaps.
const SWAP_MASK: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Per-word pattern of positions whose bit i is 1 (the complement of
/// `SWAP_MASK`), used for coordinate-restricted popcounts.
const COORD_PATTERN: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitset {
    words: Vec<u64>,
    len: usize,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some((wi << 6) | b)
                }
            })
        })
    }

    /// The set `{ v : self[v ^ x] }`, i.e. this set XOR-translated by `x`.
    /// Requires `len` to be a power of two at least `2^ceil(log2(x+1))`.
    pub fn xor_shift(&self, x: usize) -> Bitset {
        debug_assert!(self.len.is_power_of_two());
        debug_assert!(x < self.len);
        let mut out = self.clone();
        out.xor_shift_in_place(x);
        out
    }

    pub fn xor_shift_in_place(&mut self, x: usize) {
        let mut rem = x;
        while rem != 0 {
            let i = rem.trailing_zeros() as usize;
            rem &= rem - 1;
            if i < 6 {
                let s = 1u32 << i;
                let m = SWAP_MASK[i];
                for w in &mut self.words {
                    *w = ((*w >> s) & m) | ((*w & m) << s);
                }
            } else {
                let stride = 1usize << (i - 6);
                let nwords = self.words.len();
                let mut j = 0;
                while j < nwords {
                    if j & stride == 0 {
                        self.words.swap(j, j | stride);
                    }
                    j += 1;
                }
            }
        }
    }

    /// `popcount(self & other)` without allocating.
    pub fn and_count(&self, other: &Bitset) -> u64 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    pub fn and(&self, other: &Bitset) -> Bitset {
        debug_assert_eq!(self.len, other.len);
        Bitset {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }
}

/// `popcount(a & b & c)` over raw word slices of equal length.
#[inline]
pub fn and3_count(a: &[u64], b: &[u64], c: &[u64]) -> u64 {
    debug_assert!(a.len() == b.len() && b.len() == c.len());
    let mut total = 0u64;
    for i in 0..a.len() {
        total += (a[i] & b[i] & c[i]).count_ones() as u64;
    }
    total
}

/// The 64-bit slice of the indicator `{ w : bit i of w is 1 }` at word
/// index `word_idx`.
#[inline]
pub fn coord_mask_word(i: u32, word_idx: usize) -> u64 {
    if i < 6 {
        COORD_PATTERN[i as usize]
    } else if (word_idx >> (i - 6)) & 1 == 1 {
        !0
    } else {
        0
    }
}

/// `popcount(a & b & c & {w : w_i = 1})`.
#[inline]
pub fn and3_count_coord(a: &[u64], b: &[u64], c: &[u64], i: u32) -> u64 {
    let mut total = 0u64;
    for wi in 0..a.len() {
        total += (a[wi] & b[wi] & c[wi] & coord_mask_word(i, wi)).count_ones() as u64;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_get_clear() {
        let mut b = Bitset::new(130);
        b.set(0);
        b.set(64);
        b.set(129);
        assert!(b.get(0) && b.get(64) && b.get(129));
        assert!(!b.get(1));
        assert_eq!(b.count_ones(), 3);
        b.clear(64);
        assert!(!b.get(64));
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 129]);
    }

    #[test]
    fn xor_shift_matches_pointwise_definition() {
        for n in [3usize, 6, 7, 9] {
            let len = 1 << n;
            let mut b = Bitset::new(len);
            // Arbitrary but fixed pattern.
            for v in 0..len {
                if (v * 0x9e37 + 11) % 5 < 2 {
                    b.set(v);
                }
            }
            for x in [0usize, 1, 5, len - 1, len / 2] {
                let shifted = b.xor_shift(x);
                for v in 0..len {
                    assert_eq!(shifted.get(v), b.get(v ^ x), "n={n} x={x} v={v}");
                }
            }
        }
    }

    #[test]
    fn coord_mask_matches_definition() {
        for n in [4u32, 7, 9] {
            for i in 0..n {
                for w in 0..(1usize << n) {
                    let in_mask = (coord_mask_word(i, w >> 6) >> (w & 63)) & 1 == 1;
                    assert_eq!(in_mask, (w >> i) & 1 == 1, "n={n} i={i} w={w}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn xor_shift_is_involutive(x in 0usize..256, seed in any::<u64>()) {
            let len = 256;
            let mut b = Bitset::new(len);
            let mut state = seed | 1;
            for v in 0..len {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if state >> 63 == 1 {
                    b.set(v);
                }
            }
            let twice = b.xor_shift(x).xor_shift(x);
            prop_assert_eq!(twice, b);
        }
    }
}
