//! Exact, seeded, desk-scale computations over GF(2) set geometry and
//! three-player parallel repetition.
//!
//! Everything here is built around three commitments:
//!
//! * **Exactness.** Counts, densities, distributions, and distances are
//!   rational numbers, never floats, unless an operation is explicitly an
//!   estimator. Floats appear only in entropy values, Chernoff references,
//!   and sampled-mode summaries, and are labeled as such.
//! * **Determinism.** Every randomized path takes an explicit seed and is
//!   reproducible bit-for-bit. There is no ambient RNG.
//! * **Bounded work.** Operations whose cost grows like `2^(2n)` or `2^(3n)`
//!   take explicit budgets and fail loudly instead of thrashing.
//!
//! The modules, bottom to top:
//!
//! * [`f2`]: vectors, sets, and affine subspaces over GF(2), with exact
//!   densities and convolution inner products.
//! * [`spread`]: algebraic and combinatorial spreadness checkers, the
//!   density-increment extraction loop, and left-marginal bounds.
//! * [`diagprod`]: diagonal products `S(X,Y,Z)`, combinatorial squares, the
//!   square-cover distribution, and its counting reports.
//! * [`uniformize`]: decompositions of one, two, or three sets into
//!   spread pieces on affine subspaces, with independent verification.
//! * [`games`]: three-player games, exact brute-force values, repeated
//!   games on the GHZ support, strategy batteries, and experiments.
//! * [`infostats`]: entropy helpers, conditional marginal reports, Chernoff
//!   references, and the uniform-prefix distance.

pub mod bits;
pub mod diagprod;
pub mod error;
pub mod f2;
pub mod games;
pub mod infostats;
pub mod prf;
pub mod rat;
pub mod spread;
pub mod uniformize;

pub use error::{Error, Result};
pub use rat::Rat;

/// Work limits for operations with `2^(2n)`-ish or `2^(3n)`-ish cost.
///
/// Limits are phrased in the unit each consumer cares about; every field has
/// a default that comfortably covers `n <= 12` and trips before anything
/// pathological.
#[derive(Debug, Clone)]
pub struct Budgets {
    /// Max bits in a pair bitset over (F2^n)^2, i.e. 2^(2n).
    pub max_pair_bits: u64,
    /// Max affine subspaces visited in one enumeration or spread check.
    pub max_subspaces: u64,
    /// Max square triples materialized into an explicit list.
    pub max_triples: u64,
    /// Max (f, g) strategy pairs visited by brute-force game valuation.
    pub max_strategy_pairs: u64,
    /// Max input pairs for exact strategy evaluation on a repeated game.
    pub max_eval_pairs: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_pair_bits: 1 << 28,
            max_subspaces: 1 << 24,
            max_triples: 1 << 22,
            max_strategy_pairs: 1 << 26,
            max_eval_pairs: 1 << 24,
        }
    }
}
