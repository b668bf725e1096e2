//! GF(2) vectors, sets, affine subspaces, and exact distributions.
//!
//! Ambient dimension is capped at 24: a vector is the low `n` bits of a
//! `u32`, a set is a `2^n`-bit bitset, and every density or inner product
//! is an exact rational.

mod conv;
mod dist;
mod set;
mod subspace;
mod vector;

pub use conv::{convolution_inner_product, density, diagonal_pair_count};
pub use dist::FiniteDistribution;
pub use set::F2Set;
pub use subspace::{
    count_affine_subspaces, enumerate_affine_subspaces, gaussian_binomial, subspace_from_constraints,
    AffineSubspace, DualConstraintIter,
};
pub use vector::{check_dim, vec_add, F2Vector, MAX_DIM};
