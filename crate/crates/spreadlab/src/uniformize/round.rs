//! Three-set decomposition rounds along the diagonal constraint
//! `x + y = z`, and the recursive driver that re-decomposes pieces whose
//! certificates fail.

use num::{BigRational, Signed};

use crate::f2::{diagonal_pair_count, AffineSubspace, F2Set};
use crate::rat::{ceil_inv_eps_log2_inv, rat, to_big, Rat};
use crate::spread::{check_algebraic_spread, CheckMode, SpreadParams};
use crate::{Budgets, Error, Result};

use super::{
    coset_space, restrict_to_coset, uniformize_one_set, DecompositionPiece,
    DecompositionResult, PartialDecomposition, PieceCerts,
};
use super::pair::two_set_worker;

/// Pieces tagged with their good flag, before assembly into a result.
struct RoundOutput {
    pieces: Vec<(DecompositionPiece, bool)>,
    total: u64,
}

/// Refinement schedules use dyadic parameters so that repeated squaring
/// cannot overflow the rational type. `next_round_eta` returns a power of
/// two at most `eta^2 / 100`, floored at `2^-24`: below that every
/// per-point drop budget at the supported dimensions is already under one
/// point, so smaller values change nothing.
fn next_round_eta(eta: &Rat) -> Rat {
    let mut k = 0u32;
    while k < 24 && *eta < rat(1, 1i128 << k) {
        k += 1;
    }
    rat(1, 1i128 << (2 * k + 7).min(24))
}

/// Power of two at most `eps / 10`, floored at `2^-40`.
fn next_round_eps(eps: &Rat) -> Rat {
    let mut j = 0u32;
    while j < 40 && *eps < rat(1, 1i128 << j) {
        j += 1;
    }
    rat(1, 1i128 << (j + 4).min(40))
}

/// Caps the size of eta's reduced denominator so downstream budget
/// arithmetic stays inside i128.
fn check_eta(eta: &Rat) -> Result<()> {
    if !eta.is_positive() || *eta > rat(1, 1) {
        return Err(Error::invalid("eta must lie in (0, 1]"));
    }
    if *eta.denom() > 1i128 << 24 {
        return Err(Error::invalid("eta denominator above 2^24"));
    }
    Ok(())
}

/// One decomposition round on sets living in cosets of a common direction:
/// `x` and `y` are split into spread rectangles, `z` is split inside each
/// rectangle's diagonal coset, and the rectangles are refined to the z
/// pieces' direction spaces. Pieces failing the size filter are discarded;
/// pieces failing the density filter or a certificate are kept, flagged
/// not good.
fn round_worker(
    x: &F2Set,
    y: &F2Set,
    z: &F2Set,
    sx: &AffineSubspace,
    sy: &AffineSubspace,
    sz: &AffineSubspace,
    params: &SpreadParams,
    eta: &Rat,
    budgets: &Budgets,
) -> Result<RoundOutput> {
    let total = diagonal_pair_count(x, y, z)?;
    let mut out = RoundOutput {
        pieces: Vec::new(),
        total,
    };
    if total == 0 {
        return Ok(out);
    }
    if z.iter().any(|m| !sz.contains(m)) {
        return Err(Error::invalid("z set leaves its coset"));
    }
    let d0 = sx.size();
    let alpha = rat(total as i128, (d0 * d0) as i128);
    // Rectangle losses cost at most one diagonal pair each; a budget of
    // eta * alpha / 4 on the rectangle side keeps the pair loss under
    // eta * total / 4.
    let eta2 = eta * alpha * rat(1, 4);
    let cap2 = 16 * ceil_inv_eps_log2_inv(&eta2, &params.eps)?.max(1);
    let rects = two_set_worker(x, y, sx, sy, params, &eta2, cap2, budgets)?;
    let kappa = rects
        .pieces
        .iter()
        .map(|p| {
            rat(p.x_part.size() as i128, p.space.size() as i128)
                .min(rat(p.y_part.size() as i128, p.space.size() as i128))
        })
        .fold(eta * alpha * rat(1, 2), Rat::min);
    let dens_floor = rat(1, 1) - rat(2, 5) * params.eps;
    for rect in &rects.pieces {
        let dt = &rect.space;
        let wz = rect.x_shift ^ rect.y_shift;
        // All x + y with x, y in this rectangle land in one z coset.
        let z_t = restrict_to_coset(z, wz, dt)?;
        if z_t.is_empty() {
            continue;
        }
        let s_t = diagonal_pair_count(&rect.x_part, &rect.y_part, &z_t)?;
        if s_t == 0 {
            continue;
        }
        let alpha_t = rat(s_t as i128, (dt.size() * dt.size()) as i128);
        // A dropped z point kills at most |Dt| pairs, so this budget keeps
        // the loss under eta * s_t / 4.
        let eta_z = eta * alpha_t * rat(1, 4);
        let sz_t = coset_space(wz, dt)?;
        let zdec = uniformize_one_set(&z_t, &sz_t, params, &eta_z, budgets)?;
        let dens_x = rat(rect.x_part.size() as i128, dt.size() as i128);
        let dens_y = rat(rect.y_part.size() as i128, dt.size() as i128);
        let sx_t = coset_space(rect.x_shift, dt)?;
        for zp in &zdec.pieces {
            let dp = zp.space.direction();
            // The x coset determines the y coset: their sum must hit the
            // z piece's coset.
            for a_rep in sx_t.coset_decompose(&dp)? {
                let x_i = restrict_to_coset(&rect.x_part, a_rep, &dp)?;
                if x_i.is_empty() {
                    continue;
                }
                let b_rep = dp.reduce_mod_direction(zp.space.offset() ^ a_rep);
                let y_i = restrict_to_coset(&rect.y_part, b_rep, &dp)?;
                if y_i.is_empty() {
                    continue;
                }
                let s_i = diagonal_pair_count(&x_i, &y_i, &zp.part)?;
                if s_i == 0 {
                    continue;
                }
                let dp_sq = BigRational::from_integer((dp.size() * dp.size()).into());
                let floor = to_big(&(eta * eta)) * to_big(&(alpha * alpha)) * to_big(&kappa) * dp_sq;
                if BigRational::from_integer(s_i.into()) < floor {
                    continue;
                }
                let cs_x = coset_space(a_rep, &dp)?;
                let cs_y = coset_space(b_rep, &dp)?;
                let dens_ok = rat(x_i.size() as i128, dp.size() as i128) >= dens_floor * dens_x
                    && rat(y_i.size() as i128, dp.size() as i128) >= dens_floor * dens_y;
                let x_cert =
                    check_algebraic_spread(&x_i, &cs_x, params, CheckMode::Exact, budgets)?;
                let y_cert =
                    check_algebraic_spread(&y_i, &cs_y, params, CheckMode::Exact, budgets)?;
                let certs = PieceCerts {
                    x: x_cert,
                    y: y_cert,
                    z: zp.cert.clone(),
                };
                let good = dens_ok && certs.all_passed();
                out.pieces.push((
                    DecompositionPiece {
                        space: dp.clone(),
                        x_shift: cs_x.offset(),
                        y_shift: cs_y.offset(),
                        xi: x_i,
                        yi: y_i,
                        zi: zp.part.clone(),
                        pair_count: s_i,
                        check_params: params.clone(),
                        certs,
                    },
                    good,
                ));
            }
        }
    }
    Ok(out)
}

fn validate_triple(
    x: &F2Set,
    y: &F2Set,
    z: &F2Set,
    v: &AffineSubspace,
    eta: &Rat,
) -> Result<()> {
    check_eta(eta)?;
    if !v.is_linear() {
        return Err(Error::invalid("three-set decomposition needs a linear space"));
    }
    for (set, side) in [(x, "x"), (y, "y"), (z, "z")] {
        if set.ambient_dim() != v.ambient_dim() {
            return Err(Error::DimensionMismatch {
                left: set.ambient_dim(),
                right: v.ambient_dim(),
            });
        }
        if set.iter().any(|m| !v.contains(m)) {
            return Err(Error::invalid(format!("{side} set leaves the space")));
        }
    }
    Ok(())
}

fn assemble(
    pieces: Vec<(DecompositionPiece, bool)>,
    total: u64,
    params: &SpreadParams,
    eta: &Rat,
) -> DecompositionResult {
    let covered = pieces.iter().map(|(p, _)| p.pair_count).sum();
    let good = pieces
        .iter()
        .enumerate()
        .filter_map(|(i, (_, g))| g.then_some(i))
        .collect();
    let mut result = DecompositionResult {
        pieces: pieces.into_iter().map(|(p, _)| p).collect(),
        good,
        covered,
        total,
        remainder: total - covered,
        params: params.clone(),
        eta: *eta,
    };
    result.canonicalize();
    result
}

/// One decomposition round on `x, y, z` inside the linear space `v`.
///
/// Pieces carry fresh spread certificates for the refined x and y parts
/// and the certificate the z part earned during its own extraction. The
/// `good` set marks pieces that also kept at least a `1 - 4 eps / 10`
/// share of their parent rectangle's density on both sides.
pub fn uniformize_three_sets_round(
    x: &F2Set,
    y: &F2Set,
    z: &F2Set,
    v: &AffineSubspace,
    params: &SpreadParams,
    eta: &Rat,
    budgets: &Budgets,
) -> Result<DecompositionResult> {
    validate_triple(x, y, z, v, eta)?;
    let out = round_worker(x, y, z, v, v, v, params, eta, budgets)?;
    Ok(assemble(out.pieces, out.total, params, eta))
}

/// Decomposes until everything retained is certified, re-running rounds on
/// pieces that fail with a tighter (eps, eta) schedule each level.
///
/// Pieces still failing at depth `depth_cap` (default
/// `ceil(20 log2(1/eta))`) are dropped into the remainder; if the final
/// remainder exceeds `eta * total` the result comes back inside an
/// incomplete-decomposition error instead.
pub fn uniformize_recursive(
    x: &F2Set,
    y: &F2Set,
    z: &F2Set,
    v: &AffineSubspace,
    params: &SpreadParams,
    eta: &Rat,
    depth_cap: Option<u32>,
    budgets: &Budgets,
) -> Result<DecompositionResult> {
    validate_triple(x, y, z, v, eta)?;
    let cap = depth_cap.unwrap_or_else(|| {
        let inv = 1.0 / crate::rat::to_f64(eta);
        (20.0 * inv.log2()).ceil().max(0.0) as u32
    });
    let total = diagonal_pair_count(x, y, z)?;
    struct Job {
        x: F2Set,
        y: F2Set,
        z: F2Set,
        sx: AffineSubspace,
        sy: AffineSubspace,
        sz: AffineSubspace,
        depth: u32,
        params: SpreadParams,
        eta: Rat,
    }
    let mut jobs = vec![Job {
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        sx: v.clone(),
        sy: v.clone(),
        sz: v.clone(),
        depth: 0,
        params: params.clone(),
        eta: *eta,
    }];
    let mut kept: Vec<(DecompositionPiece, bool)> = Vec::new();
    // Breadth is data-dependent; a generous hard ceiling keeps a
    // pathological instance from spinning forever.
    let max_jobs = 100_000u64;
    let mut processed = 0u64;
    while let Some(job) = jobs.pop() {
        processed += 1;
        if processed > max_jobs {
            let result = assemble(kept, total, params, eta);
            let covered = result.covered;
            return Err(Error::IncompleteDecomposition {
                cap: max_jobs as u32,
                covered,
                total,
                partial: Box::new(PartialDecomposition::Triples(result)),
            });
        }
        let out = round_worker(
            &job.x, &job.y, &job.z, &job.sx, &job.sy, &job.sz, &job.params, &job.eta, budgets,
        )?;
        for (piece, good) in out.pieces {
            if good {
                kept.push((piece, true));
            } else if job.depth < cap {
                jobs.push(Job {
                    sx: coset_space(piece.x_shift, &piece.space)?,
                    sy: coset_space(piece.y_shift, &piece.space)?,
                    sz: coset_space(piece.x_shift ^ piece.y_shift, &piece.space)?,
                    x: piece.xi,
                    y: piece.yi,
                    z: piece.zi,
                    depth: job.depth + 1,
                    params: SpreadParams::new(job.params.r, next_round_eps(&job.params.eps))?,
                    eta: next_round_eta(&job.eta),
                });
            }
        }
    }
    let result = assemble(kept, total, params, eta);
    if rat(result.remainder as i128, 1) > eta * rat(total as i128, 1) {
        let covered = result.covered;
        return Err(Error::IncompleteDecomposition {
            cap,
            covered,
            total,
            partial: Box::new(PartialDecomposition::Triples(result)),
        });
    }
    Ok(result)
}
