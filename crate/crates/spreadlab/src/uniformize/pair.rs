//! Two-set decomposition: disjoint rectangles, both sides spread over
//! cosets of one shared direction space.

use std::collections::VecDeque;

use num::Signed;

use crate::f2::{AffineSubspace, F2Set};
use crate::rat::{ceil_inv_eps_log2_inv, rat, Rat};
use crate::spread::{AlgebraicVerdict, SpreadParams};
use crate::{Budgets, Error, Result};

use super::{coset_space, restrict_to_coset, uniformize_one_set, PartialDecomposition};

/// One rectangle of a two-set decomposition. Both parts are spread inside
/// their own coset of the shared linear `space`.
#[derive(Debug, Clone)]
pub struct TwoSetPiece {
    pub space: AffineSubspace,
    pub x_shift: u32,
    pub y_shift: u32,
    pub x_part: F2Set,
    pub y_part: F2Set,
    pub x_cert: AlgebraicVerdict,
    pub y_cert: AlgebraicVerdict,
}

impl TwoSetPiece {
    fn sort_key(&self) -> (AffineSubspace, u32, u32, Vec<u8>, Vec<u8>) {
        (
            self.space.clone(),
            self.x_shift,
            self.y_shift,
            self.x_part.to_bytes(),
            self.y_part.to_bytes(),
        )
    }
}

/// Pairwise disjoint certified rectangles covering most of `X x Y`.
#[derive(Debug, Clone)]
pub struct TwoSetDecomposition {
    pub pieces: Vec<TwoSetPiece>,
    /// Sum of `|Xi| * |Yi|` over the pieces.
    pub covered: u64,
    /// `|X| * |Y|` for the inputs.
    pub total: u64,
    pub params: SpreadParams,
    pub eta: Rat,
}

/// Splits `X x Y` into rectangles `Xi x Yi` with both sides certified
/// spread over cosets of a common subspace.
///
/// Each side is decomposed by density-increment extraction; whenever the
/// two sides disagree on their direction space, the coarser side is split
/// along cosets of the finer one and the pair is requeued one round
/// deeper. Directions strictly shrink with every requeue, so the
/// refinement reaches a fixpoint within `dim(v)` rounds. Every round gets
/// half the previous drop budget; the dropped mass stays below
/// `eta/2 * |X| * |Y|`. Needing more than `16 * ceil(log2(1/eta)/eps)`
/// split rounds aborts with an incomplete-decomposition error carrying
/// the pieces emitted so far.
pub fn uniformize_two_sets(
    x: &F2Set,
    y: &F2Set,
    v: &AffineSubspace,
    params: &SpreadParams,
    eta: &Rat,
    budgets: &Budgets,
) -> Result<TwoSetDecomposition> {
    let cap = 16 * ceil_inv_eps_log2_inv(eta, &params.eps)?.max(1);
    two_set_worker(x, y, v, v, params, eta, cap, budgets)
}

/// Worker with explicit coset spaces and a split-round cap. `sx` and `sy`
/// must share a direction and contain `x` and `y` respectively.
pub(super) fn two_set_worker(
    x: &F2Set,
    y: &F2Set,
    sx: &AffineSubspace,
    sy: &AffineSubspace,
    params: &SpreadParams,
    eta: &Rat,
    cap: u64,
    budgets: &Budgets,
) -> Result<TwoSetDecomposition> {
    if !eta.is_positive() {
        return Err(Error::invalid("eta must be positive"));
    }
    for (set, space, side) in [(x, sx, "x"), (y, sy, "y")] {
        if set.ambient_dim() != space.ambient_dim() {
            return Err(Error::DimensionMismatch {
                left: set.ambient_dim(),
                right: space.ambient_dim(),
            });
        }
        if set.iter().any(|m| !space.contains(m)) {
            return Err(Error::invalid(format!("{side} set leaves its coset")));
        }
    }
    if sx.direction() != sy.direction() {
        return Err(Error::invalid("coset spaces disagree on direction"));
    }
    let total = x.size() * y.size();
    let mut out = TwoSetDecomposition {
        pieces: Vec::new(),
        covered: 0,
        total,
        params: params.clone(),
        eta: *eta,
    };
    if total == 0 {
        return Ok(out);
    }
    let mut queue: VecDeque<(F2Set, F2Set, AffineSubspace, AffineSubspace, u32)> =
        VecDeque::new();
    queue.push_back((x.clone(), y.clone(), sx.clone(), sy.clone(), 0));
    // Requeues strictly shrink the direction space, so rectangle counts
    // are finite; the ceiling only stops a degenerate blow-up early.
    let max_rectangles = 1u64 << 20;
    let mut processed = 0u64;
    while let Some((xp, yp, csx, csy, depth)) = queue.pop_front() {
        if xp.is_empty() || yp.is_empty() {
            continue;
        }
        if depth as u64 > cap {
            out.pieces.sort_by_key(TwoSetPiece::sort_key);
            let covered = out.covered;
            return Err(Error::IncompleteDecomposition {
                cap: cap.min(u32::MAX as u64) as u32,
                covered,
                total,
                partial: Box::new(PartialDecomposition::Pairs(out)),
            });
        }
        processed += 1;
        if processed > max_rectangles {
            return Err(Error::budget(
                "two-set refinement rectangles",
                processed as u128,
                max_rectangles as u128,
            ));
        }
        // Depth d gets an eta * 2^-(d+3) share of the drop budget; the
        // shares sum to eta/4 per side. Depth is bounded by the ambient
        // dimension because requeues strictly shrink the direction.
        let scale = eta * rat(1, 1i128 << (depth + 3).min(60));
        let eta_x = scale * rat(xp.size() as i128, csx.size() as i128);
        let xdec = uniformize_one_set(&xp, &csx, params, &eta_x, budgets)?;
        for xpiece in xdec.pieces {
            let d = xpiece.space.direction();
            for rep in csy.coset_decompose(&d)? {
                let ypc = restrict_to_coset(&yp, rep, &d)?;
                if ypc.is_empty() {
                    continue;
                }
                let ycoset = coset_space(rep, &d)?;
                let eta_y = scale * rat(ypc.size() as i128, ycoset.size() as i128);
                let ydec = uniformize_one_set(&ypc, &ycoset, params, &eta_y, budgets)?;
                for ypiece in ydec.pieces {
                    let d2 = ypiece.space.direction();
                    if d2 == d {
                        out.covered += xpiece.part.size() * ypiece.part.size();
                        out.pieces.push(TwoSetPiece {
                            space: d.clone(),
                            x_shift: xpiece.space.offset(),
                            y_shift: ypiece.space.offset(),
                            x_part: xpiece.part.clone(),
                            y_part: ypiece.part,
                            x_cert: xpiece.cert.clone(),
                            y_cert: ypiece.cert,
                        });
                    } else {
                        // The y side refined further; split the x part
                        // along the finer cosets and revisit the pair.
                        for xrep in xpiece.space.coset_decompose(&d2)? {
                            let xpc = restrict_to_coset(&xpiece.part, xrep, &d2)?;
                            if xpc.is_empty() {
                                continue;
                            }
                            queue.push_back((
                                xpc,
                                ypiece.part.clone(),
                                coset_space(xrep, &d2)?,
                                ypiece.space.clone(),
                                depth + 1,
                            ));
                        }
                    }
                }
            }
        }
    }
    out.pieces.sort_by_key(TwoSetPiece::sort_key);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bitset;
    use crate::spread::{check_algebraic_spread, CheckMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(r: u32, num: i128, den: i128) -> SpreadParams {
        SpreadParams::new(r, rat(num, den)).unwrap()
    }

    fn check_piece_shape(dec: &TwoSetDecomposition, x: &F2Set, y: &F2Set) {
        let n = x.ambient_dim();
        let mut painted = Bitset::new(1usize << (2 * n));
        let mut recount = 0u64;
        for (i, p) in dec.pieces.iter().enumerate() {
            assert!(p.space.is_linear(), "piece {i} space is affine");
            assert!(p.x_part.is_subset_of(x).unwrap());
            assert!(p.y_part.is_subset_of(y).unwrap());
            for m in p.x_part.iter() {
                assert!(p.space.contains(m ^ p.x_shift), "piece {i} x strays");
            }
            for m in p.y_part.iter() {
                assert!(p.space.contains(m ^ p.y_shift), "piece {i} y strays");
            }
            assert!(p.x_cert.passed && p.y_cert.passed, "piece {i} cert failed");
            for xm in p.x_part.iter() {
                for ym in p.y_part.iter() {
                    let idx = ((xm as usize) << n) | ym as usize;
                    assert!(!painted.get(idx), "piece {i} overlaps another");
                    painted.set(idx);
                    recount += 1;
                }
            }
        }
        assert_eq!(recount, dec.covered, "covered miscounted");
    }

    #[test]
    fn full_space_pair_is_a_single_piece() {
        let n = 6;
        let v = AffineSubspace::full_space(n).unwrap();
        let x = F2Set::full(n).unwrap();
        let y = F2Set::full(n).unwrap();
        let dec =
            uniformize_two_sets(&x, &y, &v, &params(2, 1, 4), &rat(1, 8), &Budgets::default())
                .unwrap();
        assert_eq!(dec.pieces.len(), 1);
        assert_eq!(dec.covered, dec.total);
        assert_eq!(dec.pieces[0].space, v);
        assert_eq!(dec.pieces[0].x_shift, 0);
        check_piece_shape(&dec, &x, &y);
    }

    #[test]
    fn subspace_y_restricts_to_density_one_cosets() {
        // X fills the space, Y is a codim-1 subspace: the fixpoint lands on
        // cosets of that subspace with Y at density 1 inside its own coset.
        let n = 7;
        let v = AffineSubspace::full_space(n).unwrap();
        let h = AffineSubspace::span(n, 0, &[1, 2, 4, 8, 16, 32]).unwrap();
        let x = F2Set::full(n).unwrap();
        let y = F2Set::from_members(n, h.points()).unwrap();
        let dec =
            uniformize_two_sets(&x, &y, &v, &params(2, 1, 4), &rat(1, 8), &Budgets::default())
                .unwrap();
        assert_eq!(dec.pieces.len(), 2);
        assert_eq!(dec.covered, dec.total, "nothing should be dropped");
        for p in &dec.pieces {
            assert_eq!(p.space, h);
            assert_eq!(p.y_part.size(), p.space.size(), "y coset not full");
            assert_eq!(p.x_part.size(), p.space.size());
        }
        check_piece_shape(&dec, &x, &y);
    }

    #[test]
    fn random_quarter_density_pair_covers_seven_eighths() {
        let n = 8;
        let v = AffineSubspace::full_space(n).unwrap();
        let mut rx = ChaCha8Rng::seed_from_u64(6);
        let mut ry = ChaCha8Rng::seed_from_u64(7);
        let x = F2Set::random_density(n, 1, 4, &mut rx).unwrap();
        let y = F2Set::random_density(n, 1, 4, &mut ry).unwrap();
        let eta = rat(1, 8);
        let dec =
            uniformize_two_sets(&x, &y, &v, &params(2, 1, 4), &eta, &Budgets::default()).unwrap();
        assert!(!dec.pieces.is_empty());
        assert!(
            rat(dec.covered as i128, 1) >= (rat(1, 1) - eta) * rat(dec.total as i128, 1),
            "covered {} of {}",
            dec.covered,
            dec.total
        );
        check_piece_shape(&dec, &x, &y);
        // Certificates hold up when re-derived from scratch.
        for p in &dec.pieces {
            let sx = AffineSubspace::span(n, p.x_shift, p.space.basis()).unwrap();
            let again = check_algebraic_spread(
                &p.x_part,
                &sx,
                &dec.params,
                CheckMode::Exact,
                &Budgets::default(),
            )
            .unwrap();
            assert!(again.passed);
        }
    }

    #[test]
    fn empty_side_gives_an_empty_decomposition() {
        let n = 5;
        let v = AffineSubspace::full_space(n).unwrap();
        let x = F2Set::empty(n).unwrap();
        let y = F2Set::full(n).unwrap();
        let dec =
            uniformize_two_sets(&x, &y, &v, &params(1, 1, 2), &rat(1, 8), &Budgets::default())
                .unwrap();
        assert!(dec.pieces.is_empty());
        assert_eq!(dec.total, 0);
        assert_eq!(dec.covered, 0);
    }

    #[test]
    fn round_cap_reports_partial_progress() {
        // This instance needs one split round (y refines to a codim-1
        // subspace), so a cap of zero rounds cannot finish.
        let n = 7;
        let v = AffineSubspace::full_space(n).unwrap();
        let h = AffineSubspace::span(n, 0, &[1, 2, 4, 8, 16, 32]).unwrap();
        let x = F2Set::full(n).unwrap();
        let y = F2Set::from_members(n, h.points()).unwrap();
        let err = two_set_worker(
            &x,
            &y,
            &v,
            &v,
            &params(2, 1, 4),
            &rat(1, 8),
            0,
            &Budgets::default(),
        )
        .unwrap_err();
        match err {
            Error::IncompleteDecomposition {
                cap,
                covered,
                total,
                partial,
            } => {
                assert_eq!(cap, 0);
                assert_eq!(total, 128 * 64);
                assert!(covered < total);
                match *partial {
                    PartialDecomposition::Pairs(p) => assert_eq!(p.covered, covered),
                    PartialDecomposition::Triples(_) => panic!("wrong partial flavor"),
                }
            }
            other => panic!("expected incomplete decomposition, got {other}"),
        }
    }

    #[test]
    fn sets_outside_the_coset_are_rejected() {
        let n = 6;
        let h = AffineSubspace::span(n, 0, &[1, 2, 4, 8]).unwrap();
        let x = F2Set::full(n).unwrap();
        let y = F2Set::full(n).unwrap();
        let err = two_set_worker(
            &x,
            &y,
            &h,
            &h,
            &params(1, 1, 2),
            &rat(1, 8),
            100,
            &Budgets::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("leaves its coset"));
    }
}
