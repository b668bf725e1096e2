//! Vectors in `F2^n` packed into machine words.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported ambient dimension. Keeps every set representable as a
/// `2^n`-bit bitset (16 MiB at the cap) and every pair index inside a u64.
pub const MAX_DIM: u32 = 24;

pub fn check_dim(n: u32) -> Result<()> {
    if n > MAX_DIM {
        Err(Error::DimensionRange(n))
    } else {
        Ok(())
    }
}

/// A vector in `F2^n`: coordinate `i` is bit `i` of `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct F2Vector {
    bits: u32,
    n: u32,
}

impl F2Vector {
    pub fn new(n: u32, bits: u32) -> Result<Self> {
        check_dim(n)?;
        if n < 32 && bits >> n != 0 {
            return Err(Error::invalid(format!(
                "vector {bits:#x} has bits above ambient dimension {n}"
            )));
        }
        Ok(F2Vector { bits, n })
    }

    pub fn zero(n: u32) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn ambient_dim(&self) -> u32 {
        self.n
    }

    pub fn coord(&self, i: u32) -> bool {
        debug_assert!(i < self.n);
        (self.bits >> i) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }
}

/// Coordinatewise XOR. Errors on mismatched ambient dimensions rather than
/// guessing an embedding.
pub fn vec_add(a: F2Vector, b: F2Vector) -> Result<F2Vector> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { left: a.n, right: b.n });
    }
    Ok(F2Vector {
        bits: a.bits ^ b.bits,
        n: a.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_is_xor_and_self_inverse() {
        let a = F2Vector::new(4, 0b1010).unwrap();
        let b = F2Vector::new(4, 0b0110).unwrap();
        let s = vec_add(a, b).unwrap();
        assert_eq!(s.bits(), 0b1100);
        assert_eq!(vec_add(s, b).unwrap(), a);
        assert_eq!(vec_add(a, a).unwrap(), F2Vector::zero(4).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = F2Vector::new(4, 1).unwrap();
        let b = F2Vector::new(5, 1).unwrap();
        assert!(matches!(
            vec_add(a, b),
            Err(Error::DimensionMismatch { left: 4, right: 5 })
        ));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(F2Vector::new(25, 0).is_err());
        assert!(F2Vector::new(3, 0b1000).is_err());
        assert!(F2Vector::new(3, 0b0111).is_ok());
    }
}
