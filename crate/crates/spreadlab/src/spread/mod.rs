//! Spreadness: certificates that a set has no dense affine or
//! combinatorial substructure.
//!
//! A set `A` inside a space `V` is `(r, eps)`-spread when every affine
//! subspace `V'` of `V` with `dim(V') >= dim(V) - r` satisfies
//! `|A ∩ V'| / |V'| <= (1 + eps) |A| / |V|`. All boundary comparisons are
//! non-strict in exactly that orientation. The combinatorial variant bounds
//! rectangle means of a bipartite relation, and the left-marginal variant
//! bounds the fraction of rows with depressed means.

mod algebraic;
mod combinatorial;

pub use algebraic::{
    check_algebraic_spread, extract_spread_subset, find_violating_subspace, AlgebraicVerdict,
    ExtractOutcome, ExtractStep,
};
pub use combinatorial::{
    check_combinatorial_spread, check_left_marginals, sum_set_relation, BipartiteRelation,
    CombMethod, CombinatorialVerdict, MarginalVerdict, Rectangle,
};

use crate::rat::{format_rat, Rat};
use crate::{Error, Result};
use num::Signed;
use serde::{Deserialize, Serialize};

/// The `(r, eps)` of a spreadness statement. `eps` must be positive; the
/// useful range is `(0, 1]` and everything in this crate stays there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadParams {
    pub r: u32,
    pub eps: Rat,
}

impl SpreadParams {
    pub fn new(r: u32, eps: Rat) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::invalid(format!(
                "eps must be positive, got {}",
                format_rat(&eps)
            )));
        }
        Ok(SpreadParams { r, eps })
    }
}

/// How a check explores the search space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckMode {
    /// Every candidate in scope is examined; a pass is a certificate.
    Exact,
    /// `samples` random candidates from the given seed; a pass is only
    /// evidence, a failure is still a hard witness.
    Sampled { samples: u64, seed: u64 },
}
