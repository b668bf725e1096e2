//! Subsets of `F2^n` as bitsets with exact densities.

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::vector::{check_dim, F2Vector};
use crate::bits::Bitset;
use crate::rat::{rat, Rat};
use crate::{Error, Result};

/// A subset of `F2^n`. Membership is a `2^n`-bit bitset; the size is cached
/// and kept in sync by every mutator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Set {
    n: u32,
    bits: Bitset,
    size: u64,
}

impl F2Set {
    pub fn empty(n: u32) -> Result<Self> {
        check_dim(n)?;
        Ok(F2Set {
            n,
            bits: Bitset::new(1 << n),
            size: 0,
        })
    }

    pub fn full(n: u32) -> Result<Self> {
        let mut s = Self::empty(n)?;
        for v in 0..(1u32 << n) {
            s.insert(v);
        }
        Ok(s)
    }

    pub fn from_members(n: u32, members: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut s = Self::empty(n)?;
        for v in members {
            if n < 32 && v >> n != 0 {
                return Err(Error::invalid(format!(
                    "member {v:#x} outside F2^{n}"
                )));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Bernoulli(`num/den`) membership per vector, drawn in vector order from
    /// `rng`. The density is exact per element: a draw from `0..den` is
    /// compared against `num`, so no float rounding is involved.
    pub fn random_density(
        n: u32,
        num: u64,
        den: u64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::invalid(format!(
                "density {num}/{den} is not in [0, 1]"
            )));
        }
        let mut s = Self::empty(n)?;
        for v in 0..(1u32 << n) {
            if rng.random_range(0..den) < num {
                s.insert(v);
            }
        }
        Ok(s)
    }

    pub fn ambient_dim(&self) -> u32 {
        self.n
    }

    pub fn ambient_size(&self) -> u64 {
        1u64 << self.n
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.bits.get(v as usize)
    }

    pub fn insert(&mut self, v: u32) {
        if !self.bits.get(v as usize) {
            self.bits.set(v as usize);
            self.size += 1;
        }
    }

    pub fn remove(&mut self, v: u32) {
        if self.bits.get(v as usize) {
            self.bits.clear(v as usize);
            self.size -= 1;
        }
    }

    /// Members ascending.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter_ones().map(|v| v as u32)
    }

    pub fn bitset(&self) -> &Bitset {
        &self.bits
    }

    /// Density `|A| / 2^n` in the ambient space.
    pub fn density(&self) -> Rat {
        rat(self.size as i128, 1i128 << self.n)
    }

    fn check_same_ambient(&self, other: &F2Set) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &F2Set) -> Result<F2Set> {
        self.check_same_ambient(other)?;
        let mut out = self.clone();
        for v in other.iter() {
            out.insert(v);
        }
        Ok(out)
    }

    pub fn intersection(&self, other: &F2Set) -> Result<F2Set> {
        self.check_same_ambient(other)?;
        let mut out = F2Set::empty(self.n)?;
        // Word-parallel AND, then recount.
        for v in self.iter() {
            if other.contains(v) {
                out.insert(v);
            }
        }
        Ok(out)
    }

    pub fn difference(&self, other: &F2Set) -> Result<F2Set> {
        self.check_same_ambient(other)?;
        let mut out = F2Set::empty(self.n)?;
        for v in self.iter() {
            if !other.contains(v) {
                out.insert(v);
            }
        }
        Ok(out)
    }

    pub fn is_subset_of(&self, other: &F2Set) -> Result<bool> {
        self.check_same_ambient(other)?;
        Ok(self.iter().all(|v| other.contains(v)))
    }

    /// `{ a + v : a in A }`.
    pub fn translate(&self, v: F2Vector) -> Result<F2Set> {
        if v.ambient_dim() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.ambient_dim(),
            });
        }
        Ok(F2Set {
            n: self.n,
            bits: self.bits.xor_shift(v.bits() as usize),
            size: self.size,
        })
    }

    /// Compact binary form: 4-byte little-endian `n`, then the membership
    /// bitset LSB-first, `2^n / 8` bytes (n >= 3 pads to whole bytes).
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = (1usize << self.n).div_ceil(8);
        let mut out = Vec::with_capacity(4 + nbytes);
        out.extend_from_slice(&self.n.to_le_bytes());
        for i in 0..nbytes {
            let word = self.bits.words()[i / 8];
            out.push((word >> ((i % 8) * 8)) as u8);
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        if data.len() < 4 {
            return Err(Error::invalid("set blob shorter than header"));
        }
        let n = u32::from_le_bytes([data[0], data[1], data[2], data[3]]);
        check_dim(n)?;
        let nbytes = (1usize << n).div_ceil(8);
        if data.len() != 4 + nbytes {
            return Err(Error::invalid(format!(
                "set blob for n={n} must be {} bytes, got {}",
                4 + nbytes,
                data.len()
            )));
        }
        let mut s = F2Set::empty(n)?;
        for (i, &byte) in data[4..].iter().enumerate() {
            for b in 0..8 {
                let v = i * 8 + b;
                if v < (1usize << n) && (byte >> b) & 1 == 1 {
                    s.insert(v as u32);
                }
            }
        }
        Ok(s)
    }
}

#[derive(Serialize, Deserialize)]
struct SetRepr {
    n: u32,
    members: Vec<u32>,
}

impl Serialize for F2Set {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SetRepr {
            n: self.n,
            members: self.iter().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for F2Set {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SetRepr::deserialize(deserializer)?;
        F2Set::from_members(repr.n, repr.members).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn membership_size_density() {
        let s = F2Set::from_members(3, [0, 3, 5]).unwrap();
        assert!(s.contains(3) && !s.contains(1));
        assert_eq!(s.size(), 3);
        assert_eq!(s.density(), rat(3, 8));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 5]);
    }

    #[test]
    fn duplicate_inserts_do_not_inflate_size() {
        let s = F2Set::from_members(3, [1, 1, 1]).unwrap();
        assert_eq!(s.size(), 1);
    }

    #[test]
    fn translate_permutes_members() {
        let s = F2Set::from_members(3, [0, 1, 6]).unwrap();
        let t = s.translate(F2Vector::new(3, 0b101).unwrap()).unwrap();
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![0b011, 0b100, 0b101]);
        assert_eq!(t.size(), 3);
    }

    #[test]
    fn random_density_is_seed_deterministic() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let a = F2Set::random_density(8, 1, 4, &mut r1).unwrap();
        let b = F2Set::random_density(8, 1, 4, &mut r2).unwrap();
        assert_eq!(a, b);
        // Density concentrates near 1/4 at n = 8 but is not exact.
        assert!(a.size() > 32 && a.size() < 96, "size {}", a.size());
    }

    #[test]
    fn json_roundtrip_members_sorted() {
        let s = F2Set::from_members(4, [9, 2, 0]).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"n":4,"members":[0,2,9]}"#);
        let back: F2Set = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<F2Set>(r#"{"n":2,"members":[4]}"#).is_err());
    }

    #[test]
    fn bytes_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = F2Set::random_density(9, 1, 3, &mut rng).unwrap();
        let back = F2Set::from_bytes(&s.to_bytes()).unwrap();
        assert_eq!(back, s);
        assert!(F2Set::from_bytes(&[1, 2]).is_err());
    }
}
