//! Decompositions of one, two, or three sets into spread pieces living on
//! affine subspaces.
//!
//! The one-set routine peels off spread subsets by density increment. The
//! two-set routine drives both sets to a joint fixpoint over a common
//! direction space. The three-set round combines them along the diagonal
//! constraint `x + y = z`, and the recursive driver re-decomposes pieces
//! that fail their certificates until everything retained is certified.
//!
//! Coverage accounting is exact everywhere: every point or pair that is
//! dropped is dropped against an explicit budget, and
//! [`verify_decomposition`] re-derives all claims from scratch.

mod pair;
mod round;
mod verify;

pub use pair::{uniformize_two_sets, TwoSetDecomposition, TwoSetPiece};
pub use round::{uniformize_recursive, uniformize_three_sets_round};
pub use verify::{verify_decomposition, VerificationReport};

use num::Signed;

use crate::f2::{AffineSubspace, F2Set};
use crate::rat::{ceil_inv_eps_log2_inv, rat, Rat};
use crate::spread::{check_algebraic_spread, extract_spread_subset, AlgebraicVerdict, CheckMode, SpreadParams};
use crate::{Budgets, Error, Result};

/// One piece of a single-set decomposition: `part` is spread inside `space`.
#[derive(Debug, Clone)]
pub struct OneSetPiece {
    pub space: AffineSubspace,
    pub part: F2Set,
    pub cert: AlgebraicVerdict,
}

/// Output of [`uniformize_one_set`]: disjoint spread pieces plus the
/// leftover points that fell under the density floor.
#[derive(Debug, Clone)]
pub struct OneSetDecomposition {
    pub pieces: Vec<OneSetPiece>,
    pub remainder: F2Set,
}

/// The three spread verdicts of one decomposition piece.
#[derive(Debug, Clone)]
pub struct PieceCerts {
    pub x: AlgebraicVerdict,
    pub y: AlgebraicVerdict,
    pub z: AlgebraicVerdict,
}

impl PieceCerts {
    pub fn all_passed(&self) -> bool {
        self.x.passed && self.y.passed && self.z.passed
    }
}

/// One piece of a three-set decomposition. The direction space is linear;
/// the three sets live on its cosets, with the z coset determined by the
/// other two: `zi` is a subset of `(x_shift + y_shift) + space`.
#[derive(Debug, Clone)]
pub struct DecompositionPiece {
    pub space: AffineSubspace,
    pub x_shift: u32,
    pub y_shift: u32,
    pub xi: F2Set,
    pub yi: F2Set,
    pub zi: F2Set,
    /// |S(xi, yi, zi)|, the piece's share of the diagonal product.
    pub pair_count: u64,
    /// The `(r, eps)` the certificates were computed at.
    pub check_params: SpreadParams,
    pub certs: PieceCerts,
}

impl DecompositionPiece {
    /// Canonical sort key: space, shifts, then member bytes.
    fn sort_key(&self) -> (AffineSubspace, u32, u32, Vec<u8>, Vec<u8>, Vec<u8>) {
        (
            self.space.clone(),
            self.x_shift,
            self.y_shift,
            self.xi.to_bytes(),
            self.yi.to_bytes(),
            self.zi.to_bytes(),
        )
    }
}

/// A three-set decomposition: pieces, the certified-good index set, and
/// exact coverage accounting against the input's diagonal product.
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub pieces: Vec<DecompositionPiece>,
    /// Indices of pieces whose three certificates all passed (and, for a
    /// single round, whose densities held up under refinement).
    pub good: Vec<usize>,
    /// Sum of piece pair counts.
    pub covered: u64,
    /// |S(X, Y, Z)| of the input.
    pub total: u64,
    /// total - covered.
    pub remainder: u64,
    pub params: SpreadParams,
    pub eta: Rat,
}

impl DecompositionResult {
    pub fn empty(params: SpreadParams, eta: Rat) -> DecompositionResult {
        DecompositionResult {
            pieces: Vec::new(),
            good: Vec::new(),
            covered: 0,
            total: 0,
            remainder: 0,
            params,
            eta,
        }
    }

    /// Diagonal mass carried by certified-good pieces.
    pub fn good_mass(&self) -> u64 {
        self.good.iter().map(|&i| self.pieces[i].pair_count).sum()
    }

    /// Sorts pieces into canonical order, keeping `good` aligned.
    pub(crate) fn canonicalize(&mut self) {
        let mut tagged: Vec<(DecompositionPiece, bool)> = std::mem::take(&mut self.pieces)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p, self.good.contains(&i)))
            .collect();
        tagged.sort_by_key(|(p, _)| p.sort_key());
        self.good = tagged
            .iter()
            .enumerate()
            .filter_map(|(i, (_, g))| g.then_some(i))
            .collect();
        self.pieces = tagged.into_iter().map(|(p, _)| p).collect();
    }
}

/// Partial output carried by an incomplete-decomposition error: whichever
/// stage ran out of iterations reports what it had.
#[derive(Debug, Clone)]
pub enum PartialDecomposition {
    Pairs(TwoSetDecomposition),
    Triples(DecompositionResult),
}

/// `set` restricted to the coset `rep + direction`.
fn restrict_to_coset(set: &F2Set, rep: u32, direction: &AffineSubspace) -> Result<F2Set> {
    F2Set::from_members(
        set.ambient_dim(),
        set.iter().filter(|&m| direction.contains(m ^ rep)),
    )
}

/// The affine subspace `rep + direction`.
fn coset_space(rep: u32, direction: &AffineSubspace) -> Result<AffineSubspace> {
    AffineSubspace::span(direction.ambient_dim(), rep, direction.basis())
}

/// Splits a set into certified spread pieces by repeated density-increment
/// extraction.
///
/// Peels a spread subset off the remaining points while more than an `eta`
/// fraction of `v` is left; every piece keeps density above `eta` inside
/// its own space because extraction only raises density. The remainder is
/// at most `eta |v|` points. The piece spaces may overlap; the parts are
/// pairwise disjoint.
pub fn uniformize_one_set(
    x: &F2Set,
    v: &AffineSubspace,
    params: &SpreadParams,
    eta: &Rat,
    budgets: &Budgets,
) -> Result<OneSetDecomposition> {
    if !eta.is_positive() {
        return Err(Error::invalid("eta must be positive"));
    }
    if x.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: x.ambient_dim(),
            right: v.ambient_dim(),
        });
    }
    let mut rest = x.clone();
    let mut pieces = Vec::new();
    let floor = *eta * rat(v.size() as i128, 1);
    while rat(rest.size() as i128, 1) > floor {
        let start_density = rat(rest.size() as i128, v.size() as i128);
        let out = extract_spread_subset(&rest, v, params, budgets)?;
        // Densities only rise along the extraction path, so the bound on
        // increment count is a bound on the dimension loss too.
        debug_assert!(
            out.iterations() <= ceil_inv_eps_log2_inv(&start_density, &params.eps).unwrap_or(u64::MAX)
        );
        let cert = check_algebraic_spread(&out.subset, &out.space, params, CheckMode::Exact, budgets)?;
        debug_assert!(cert.passed);
        rest = rest.difference(&out.subset)?;
        pieces.push(OneSetPiece {
            space: out.space,
            part: out.subset,
            cert,
        });
    }
    Ok(OneSetDecomposition {
        pieces,
        remainder: rest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat_int, within_piece_count_bound};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(r: u32, num: i128, den: i128) -> SpreadParams {
        SpreadParams::new(r, rat(num, den)).unwrap()
    }

    #[test]
    fn dense_spread_input_comes_back_as_one_piece() {
        let v = AffineSubspace::full_space(6).unwrap();
        let x = F2Set::full(6).unwrap();
        let dec = uniformize_one_set(&x, &v, &params(2, 1, 4), &rat(1, 16), &Budgets::default())
            .unwrap();
        assert_eq!(dec.pieces.len(), 1);
        assert_eq!(dec.pieces[0].space, v);
        assert_eq!(dec.pieces[0].part, x);
        assert!(dec.pieces[0].cert.passed);
        assert!(dec.remainder.is_empty());
    }

    #[test]
    fn tiny_input_is_all_remainder() {
        let v = AffineSubspace::full_space(8).unwrap();
        let x = F2Set::from_members(8, [3, 77, 200]).unwrap();
        let dec = uniformize_one_set(&x, &v, &params(2, 1, 4), &rat(1, 16), &Budgets::default())
            .unwrap();
        assert!(dec.pieces.is_empty());
        assert_eq!(dec.remainder, x);
    }

    #[test]
    fn empty_input_yields_nothing() {
        let v = AffineSubspace::full_space(5).unwrap();
        let x = F2Set::empty(5).unwrap();
        let dec = uniformize_one_set(&x, &v, &params(1, 1, 2), &rat(1, 8), &Budgets::default())
            .unwrap();
        assert!(dec.pieces.is_empty());
        assert!(dec.remainder.is_empty());
    }

    #[test]
    fn subspace_union_with_noise_decomposes_cleanly() {
        // Two parallel codim-2 cosets plus five stray points.
        let n = 8;
        let v = AffineSubspace::full_space(n).unwrap();
        let w = AffineSubspace::span(n, 0, &[1, 2, 4, 8, 16, 32]).unwrap();
        let shifted = AffineSubspace::span(n, 64, &[1, 2, 4, 8, 16, 32]).unwrap();
        let mut x = F2Set::from_members(n, w.points()).unwrap();
        for p in shifted.points() {
            x.insert(p);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut strays = 0;
        while strays < 5 {
            let p = rng.random_range(0..1u32 << n);
            if !x.contains(p) {
                x.insert(p);
                strays += 1;
            }
        }
        let eta = rat(1, 16);
        let pr = params(2, 1, 4);
        let dec = uniformize_one_set(&x, &v, &pr, &eta, &Budgets::default()).unwrap();
        assert!(!dec.pieces.is_empty());
        // Remainder below the floor, pieces disjoint, dense, re-certified.
        assert!(rat(dec.remainder.size() as i128, 1) <= eta * rat(v.size() as i128, 1));
        let mut seen = F2Set::empty(n).unwrap();
        for piece in &dec.pieces {
            assert!(piece.part.intersection(&seen).unwrap().is_empty());
            seen = seen.union(&piece.part).unwrap();
            assert!(piece.part.is_subset_of(&x).unwrap());
            assert!(
                rat(piece.part.size() as i128, piece.space.size() as i128) > eta
            );
            let again = check_algebraic_spread(
                &piece.part,
                &piece.space,
                &pr,
                CheckMode::Exact,
                &Budgets::default(),
            )
            .unwrap();
            assert!(again.passed);
            for m in piece.part.iter() {
                assert!(piece.space.contains(m));
            }
        }
        assert_eq!(
            seen.union(&dec.remainder).unwrap(),
            x,
            "pieces plus remainder reassemble the input"
        );
        assert!(within_piece_count_bound(dec.pieces.len() as u64, pr.r, &pr.eps, &eta).unwrap());
    }

    #[test]
    fn piece_dimensions_respect_the_increment_budget() {
        let n = 8;
        let v = AffineSubspace::full_space(n).unwrap();
        let pr = params(2, 1, 2);
        let eta = rat(1, 8);
        let max_loss = pr.r as u64 * ceil_inv_eps_log2_inv(&eta, &pr.eps).unwrap();
        for seed in [1u64, 2, 3] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = F2Set::random_density(n, 1, 3, &mut rng).unwrap();
            let dec = uniformize_one_set(&x, &v, &pr, &eta, &Budgets::default()).unwrap();
            for piece in &dec.pieces {
                assert!(
                    piece.space.dim() as u64 + max_loss >= n as u64,
                    "seed {seed}: piece dim {} lost more than {max_loss}",
                    piece.space.dim()
                );
            }
            assert!(
                within_piece_count_bound(dec.pieces.len() as u64, pr.r, &pr.eps, &eta).unwrap()
            );
        }
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let v = AffineSubspace::full_space(6).unwrap();
        let x = F2Set::full(5).unwrap();
        assert!(
            uniformize_one_set(&x, &v, &params(1, 1, 2), &rat(1, 8), &Budgets::default()).is_err()
        );
        let x = F2Set::full(6).unwrap();
        assert!(
            uniformize_one_set(&x, &v, &params(1, 1, 2), &rat_int(0), &Budgets::default()).is_err()
        );
    }
}
