//! Algebraic spreadness: exhaustive subspace checks and the
//! density-increment extraction loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CheckMode, SpreadParams};
use crate::f2::{
    count_affine_subspaces, subspace_from_constraints, AffineSubspace, DualConstraintIter, F2Set,
};
use crate::rat::{rat, Rat};
use crate::{Budgets, Error, Result};

#[derive(Debug, Clone)]
pub struct AlgebraicVerdict {
    pub passed: bool,
    /// Max of (local density / global density) over examined subspaces.
    pub observed_ratio: Rat,
    /// A subspace violating the bound, present iff `passed` is false.
    pub witness: Option<AffineSubspace>,
    /// True when every affine subspace of codim 0..=r was examined.
    pub exhaustive: bool,
}

/// Coordinates of the members of `a` in the basis of `v`. Errors unless
/// `a` is contained in `v`.
fn member_coords(a: &F2Set, v: &AffineSubspace) -> Result<Vec<u32>> {
    if a.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: a.ambient_dim(),
            right: v.ambient_dim(),
        });
    }
    a.iter()
        .map(|m| {
            v.coords_of(m)
                .ok_or_else(|| Error::invalid(format!("set member {m:#x} outside the space")))
        })
        .collect()
}

#[inline]
fn parity(x: u32) -> u32 {
    x.count_ones() & 1
}

/// Bucket the members by the values of the constraint functionals: entry
/// `b` counts members `u` with `<rows[i], u> = b_i` for all `i`.
fn bucket_counts(coords: &[u32], rows: &[u32], counts: &mut [u64]) {
    counts.fill(0);
    for &u in coords {
        let mut idx = 0u32;
        for (i, &row) in rows.iter().enumerate() {
            idx |= parity(row & u) << i;
        }
        counts[idx as usize] += 1;
    }
}

/// Reduce an affine constraint system `<rows[i], u> = b_i` to the echelon
/// form `subspace_from_constraints` expects (pivots at lowest set bits,
/// strictly increasing, cleared from the other rows). None when the rows
/// are linearly dependent.
fn echelonize(rows: &[u32], b: u32) -> Option<(Vec<u32>, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(rows.len());
    for (k, &raw) in rows.iter().enumerate() {
        let mut row = raw;
        let mut bit = b >> k & 1;
        for &(r, rb) in &out {
            if row >> r.trailing_zeros() & 1 == 1 {
                row ^= r;
                bit ^= rb;
            }
        }
        if row == 0 {
            return None;
        }
        let p = row.trailing_zeros();
        for (r, rb) in out.iter_mut() {
            if *r >> p & 1 == 1 {
                *r ^= row;
                *rb ^= bit;
            }
        }
        out.push((row, bit));
    }
    out.sort_unstable_by_key(|&(r, _)| r.trailing_zeros());
    let mut rows2 = Vec::with_capacity(out.len());
    let mut b2 = 0u32;
    for (i, (r, rb)) in out.into_iter().enumerate() {
        rows2.push(r);
        b2 |= rb << i;
    }
    Some((rows2, b2))
}

/// Exhaustive or sampled check that `a` is `(r, eps)`-spread inside `v`.
///
/// Exact mode visits every affine subspace of codimension up to `r` (their
/// number is budgeted); densities on all `2^c` shifts of one direction are
/// counted in a single pass over the members. Requires `a` nonempty and
/// `a ⊆ v`.
pub fn check_algebraic_spread(
    a: &F2Set,
    v: &AffineSubspace,
    params: &SpreadParams,
    mode: CheckMode,
    budgets: &Budgets,
) -> Result<AlgebraicVerdict> {
    if a.is_empty() {
        return Err(Error::Empty("spread check on empty set"));
    }
    let coords = member_coords(a, v)?;
    let d = v.dim();
    let size = a.size();
    // Density 1 passes against every subspace; skip the enumeration.
    if size == v.size() {
        return Ok(AlgebraicVerdict {
            passed: true,
            observed_ratio: rat(1, 1),
            witness: None,
            exhaustive: true,
        });
    }
    let p = *params.eps.numer() as u128;
    let q = *params.eps.denom() as u128;

    match mode {
        CheckMode::Exact => {
            let rmax = params.r.min(d);
            let total: u128 = (0..=rmax).map(|c| count_affine_subspaces(d, c)).sum();
            if total > budgets.max_subspaces as u128 {
                return Err(Error::budget(
                    format!("spread check over codim 0..={rmax} in dim {d}"),
                    total,
                    budgets.max_subspaces as u128,
                ));
            }
            // Codim 0 contributes ratio exactly 1.
            let mut best_scaled = size as u128; // local_count * 2^c, max
            let mut best_codim = 0u32;
            let mut witness: Option<(Vec<u32>, u32)> = None;
            for c in 1..=rmax {
                let mut counts = vec![0u64; 1 << c];
                for rows in DualConstraintIter::new(d, c) {
                    bucket_counts(&coords, &rows, &mut counts);
                    for (b, &cnt) in counts.iter().enumerate() {
                        let scaled = (cnt as u128) << c;
                        // Violation: local > (1+eps) * global, i.e.
                        // cnt * 2^c * q > (q + p) * |a|.
                        let violated = scaled * q > (q + p) * size as u128;
                        if scaled > best_scaled || (violated && witness.is_none()) {
                            if scaled > best_scaled {
                                best_scaled = scaled;
                                best_codim = c;
                            }
                            if violated && witness.is_none() {
                                witness = Some((rows.clone(), b as u32));
                            }
                        }
                    }
                }
            }
            let _ = best_codim;
            let passed = best_scaled * q <= (q + p) * size as u128;
            let witness = if passed {
                None
            } else {
                let (rows, b) = witness.expect("failed check records a witness");
                Some(subspace_from_constraints(v, &rows, b)?)
            };
            Ok(AlgebraicVerdict {
                passed,
                observed_ratio: rat(best_scaled as i128, size as i128),
                witness,
                exhaustive: true,
            })
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rmax = params.r.min(d);
            let mut best_scaled = size as u128;
            let mut witness = None;
            if rmax > 0 {
                for _ in 0..samples {
                    let c = rng.random_range(1..=rmax);
                    // Random full-rank constraint system, echelonized so the
                    // witness constructor accepts it.
                    let (rows, b) = loop {
                        let cand: Vec<u32> = (0..c)
                            .map(|_| rng.random_range(1..(1u64 << d)) as u32)
                            .collect();
                        let braw = rng.random_range(0..(1u64 << c)) as u32;
                        if let Some(ech) = echelonize(&cand, braw) {
                            break ech;
                        }
                    };
                    let cnt = coords
                        .iter()
                        .filter(|&&u| {
                            rows.iter()
                                .enumerate()
                                .all(|(i, &row)| parity(row & u) == (b >> i) & 1)
                        })
                        .count() as u128;
                    let scaled = cnt << c;
                    if scaled > best_scaled {
                        best_scaled = scaled;
                        if scaled * q > (q + p) * size as u128 {
                            witness = Some(subspace_from_constraints(v, &rows, b)?);
                        }
                    }
                }
            }
            let passed = best_scaled * q <= (q + p) * size as u128;
            Ok(AlgebraicVerdict {
                passed,
                observed_ratio: rat(best_scaled as i128, size as i128),
                witness: if passed { None } else { witness },
                exhaustive: false,
            })
        }
    }
}

/// The subspace the extraction loop would descend into, or None when the
/// set is already spread.
///
/// Deterministic selection: scan codimension 1, 2, ..., r; at the first
/// codimension with any violation, take the subspace of maximal local
/// density, breaking ties by canonical form.
pub fn find_violating_subspace(
    a: &F2Set,
    v: &AffineSubspace,
    params: &SpreadParams,
    budgets: &Budgets,
) -> Result<Option<AffineSubspace>> {
    if a.is_empty() {
        return Err(Error::Empty("violation search on empty set"));
    }
    let coords = member_coords(a, v)?;
    let d = v.dim();
    let size = a.size() as u128;
    if size == v.size() as u128 {
        return Ok(None);
    }
    let p = *params.eps.numer() as u128;
    let q = *params.eps.denom() as u128;
    let rmax = params.r.min(d);
    let total: u128 = (1..=rmax).map(|c| count_affine_subspaces(d, c)).sum();
    if total > budgets.max_subspaces as u128 {
        return Err(Error::budget(
            format!("violation search over codim 1..={rmax} in dim {d}"),
            total,
            budgets.max_subspaces as u128,
        ));
    }
    for c in 1..=rmax {
        let mut counts = vec![0u64; 1 << c];
        // Best violation at this codim: max count, ties by canonical min.
        let mut best: Option<(u64, AffineSubspace)> = None;
        for rows in DualConstraintIter::new(d, c) {
            bucket_counts(&coords, &rows, &mut counts);
            for (b, &cnt) in counts.iter().enumerate() {
                let violated = ((cnt as u128) << c) * q > (q + p) * size;
                if !violated {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((bc, _)) => cnt > *bc,
                };
                let tie = matches!(&best, Some((bc, _)) if cnt == *bc);
                if better || tie {
                    let cand = subspace_from_constraints(v, &rows, b as u32)?;
                    best = match best {
                        Some((bc, bs)) if tie => {
                            Some((bc, if cand < bs { cand } else { bs }))
                        }
                        _ => Some((cnt, cand)),
                    };
                }
            }
        }
        if let Some((_, sub)) = best {
            return Ok(Some(sub));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone)]
pub struct ExtractStep {
    pub codim: u32,
    pub space: AffineSubspace,
    pub density_before: Rat,
    pub density_after: Rat,
}

#[derive(Debug, Clone)]
pub struct ExtractOutcome {
    pub space: AffineSubspace,
    pub subset: F2Set,
    pub log: Vec<ExtractStep>,
}

impl ExtractOutcome {
    pub fn iterations(&self) -> u64 {
        self.log.len() as u64
    }
}

/// Density-increment extraction: descend into violating subspaces until the
/// restricted set is `(r, eps)`-spread.
///
/// Returns the final space, `a` restricted to it, and the per-step log.
/// Each step strictly multiplies the density by more than `1 + eps` and
/// drops the dimension by at most `r`, so for `eps <= 1` the loop runs at
/// most `ceil(log2(1 / initial density) / eps)` times.
pub fn extract_spread_subset(
    a: &F2Set,
    v: &AffineSubspace,
    params: &SpreadParams,
    budgets: &Budgets,
) -> Result<ExtractOutcome> {
    if a.is_empty() {
        return Err(Error::Empty("extraction from empty set"));
    }
    let mut cur_set = a.clone();
    let mut cur_space = v.clone();
    let mut density = rat(cur_set.size() as i128, cur_space.size() as i128);
    let mut log = Vec::new();
    loop {
        match find_violating_subspace(&cur_set, &cur_space, params, budgets)? {
            None => {
                return Ok(ExtractOutcome {
                    space: cur_space,
                    subset: cur_set,
                    log,
                })
            }
            Some(sub) => {
                let restricted =
                    F2Set::from_members(a.ambient_dim(), sub.points().filter(|&p| cur_set.contains(p)))?;
                let new_density = rat(restricted.size() as i128, sub.size() as i128);
                log.push(ExtractStep {
                    codim: cur_space.dim() - sub.dim(),
                    space: sub.clone(),
                    density_before: density,
                    density_after: new_density,
                });
                debug_assert!(new_density > density);
                cur_set = restricted;
                cur_space = sub;
                density = new_density;
                if log.len() > 10_000 {
                    return Err(Error::invalid(
                        "extraction failed to terminate; this is a bug",
                    ));
                }
            }
        }
    }
}
