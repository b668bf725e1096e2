//! Exact densities and the convolution inner product.

use super::set::F2Set;
use super::subspace::AffineSubspace;
use crate::rat::{rat, Rat};
use crate::{Error, Result};

/// Density of `a` inside an affine subspace: `|a ∩ v| / |v|`. `a` need not
/// be contained in `v`.
pub fn density(a: &F2Set, v: &AffineSubspace) -> Result<Rat> {
    if a.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: a.ambient_dim(),
            right: v.ambient_dim(),
        });
    }
    if v.dim() == a.ambient_dim() {
        return Ok(a.density());
    }
    let count = v.points().filter(|&p| a.contains(p)).count();
    Ok(rat(count as i128, v.size() as i128))
}

/// `|S(x, y, z)|` where `S = {(a, b) : a in x, b in y, a + b in z}`, by a
/// word-parallel scan: pairs with first coordinate `a` are `y ∩ (z + a)`.
pub fn diagonal_pair_count(x: &F2Set, y: &F2Set, z: &F2Set) -> Result<u64> {
    let n = x.ambient_dim();
    if y.ambient_dim() != n || z.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: y.ambient_dim().max(z.ambient_dim()),
        });
    }
    let mut total = 0u64;
    for a in x.iter() {
        total += y.bitset().and_count(&z.bitset().xor_shift(a as usize));
    }
    Ok(total)
}

/// The normalized convolution inner product
/// `E[phi_x(a) phi_y(b) phi_z(a+b)]` over independent uniform `a, b`, where
/// `phi_s = 1_s / density(s)`. Equals `|S(x,y,z)| / (2^2n a_x a_y a_z)`
/// exactly; sets must be nonempty. Value 1 means the sum-set behavior of
/// independent sets; a common linear subspace of codimension `c` gives
/// `2^c`.
pub fn convolution_inner_product(x: &F2Set, y: &F2Set, z: &F2Set) -> Result<Rat> {
    if x.is_empty() || y.is_empty() || z.is_empty() {
        return Err(Error::Empty("convolution_inner_product needs nonempty sets"));
    }
    let n = x.ambient_dim();
    let pairs = diagonal_pair_count(x, y, z)? as i128;
    // pairs / 2^2n / (ax ay az) with a_s = |s| / 2^n collapses to
    // pairs * 2^n / (|x| |y| |z|).
    Ok(rat(pairs, 1) * rat(1i128 << n, 1)
        / rat(x.size() as i128, 1)
        / rat(y.size() as i128, 1)
        / rat(z.size() as i128, 1))
}
