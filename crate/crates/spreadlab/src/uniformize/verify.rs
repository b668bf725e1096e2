//! Independent re-derivation of every claim a decomposition makes.

use crate::bits::Bitset;
use crate::f2::{diagonal_pair_count, AffineSubspace, F2Set};
use crate::spread::{check_algebraic_spread, CheckMode};
use crate::{Budgets, Error, Result};

use super::{coset_space, DecompositionResult};

/// Outcome of [`verify_decomposition`]: failed checks are described, not
/// raised, so a negative control can inspect all of them at once.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Individual comparisons performed.
    pub checks: u64,
    /// Diagonal pairs re-counted across the pieces.
    pub covered: u64,
    /// |S(X, Y, Z)| re-derived from the inputs.
    pub total: u64,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-derives certificates, containments, pairwise disjointness, and
/// coverage for a three-set decomposition against the original inputs.
///
/// Infrastructure problems (dimension mismatches, blown budgets) surface
/// as errors; everything the decomposition merely got wrong lands in the
/// report's failure list, naming the piece.
pub fn verify_decomposition(
    result: &DecompositionResult,
    x: &F2Set,
    y: &F2Set,
    z: &F2Set,
    v: &AffineSubspace,
    budgets: &Budgets,
) -> Result<VerificationReport> {
    let n = v.ambient_dim();
    for set in [x, y, z] {
        if set.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                left: set.ambient_dim(),
                right: n,
            });
        }
    }
    let pair_bits = 1u128 << (2 * n);
    if pair_bits > budgets.max_pair_bits as u128 {
        return Err(Error::budget(
            "pair bitset for disjointness",
            pair_bits,
            budgets.max_pair_bits as u128,
        ));
    }
    let mut report = VerificationReport {
        checks: 0,
        covered: 0,
        total: diagonal_pair_count(x, y, z)?,
        failures: Vec::new(),
    };
    let mut painted = Bitset::new(1usize << (2 * n));
    for (i, p) in result.pieces.iter().enumerate() {
        report.checks += 1;
        if !p.space.is_linear() {
            report
                .failures
                .push(format!("piece {i}: direction space is affine"));
        }
        report.checks += 1;
        if !v.direction().contains_subspace(&p.space) {
            report
                .failures
                .push(format!("piece {i}: direction space leaves the ambient space"));
        }
        let sides = [
            ("x", &p.xi, x, p.x_shift),
            ("y", &p.yi, y, p.y_shift),
            ("z", &p.zi, z, p.x_shift ^ p.y_shift),
        ];
        let mut in_coset = [true; 3];
        for (side, (name, part, original, shift)) in sides.into_iter().enumerate() {
            report.checks += 1;
            if part.is_empty() {
                report
                    .failures
                    .push(format!("piece {i}: {name} part is empty"));
            }
            report.checks += 1;
            if !part.is_subset_of(original)? {
                report
                    .failures
                    .push(format!("piece {i}: {name} part not inside the original set"));
            }
            report.checks += 1;
            if part.iter().any(|m| !p.space.contains(m ^ shift)) {
                in_coset[side] = false;
                report
                    .failures
                    .push(format!("piece {i}: {name} part leaves its coset"));
            }
        }
        report.checks += 1;
        let recount = diagonal_pair_count(&p.xi, &p.yi, &p.zi)?;
        if recount != p.pair_count {
            report.failures.push(format!(
                "piece {i}: pair count {} but recount {recount}",
                p.pair_count
            ));
        }
        report.covered += recount;
        // Disjointness: every diagonal pair may be claimed once.
        let mut clash = false;
        for xm in p.xi.iter() {
            for ym in p.yi.iter() {
                if p.zi.contains(xm ^ ym) {
                    let idx = ((xm as usize) << n) | ym as usize;
                    if painted.get(idx) {
                        clash = true;
                    }
                    painted.set(idx);
                }
            }
        }
        report.checks += 1;
        if clash {
            report.failures.push(format!(
                "piece {i}: diagonal pairs already covered by an earlier piece"
            ));
        }
        // Certificates, re-derived at the piece's own parameters. A side
        // that already failed containment has no meaningful certificate.
        let certs = [
            ("x", &p.xi, p.x_shift, &p.certs.x),
            ("y", &p.yi, p.y_shift, &p.certs.y),
            ("z", &p.zi, p.x_shift ^ p.y_shift, &p.certs.z),
        ];
        for (side, (name, part, shift, stored)) in certs.into_iter().enumerate() {
            if part.is_empty() || !in_coset[side] {
                continue;
            }
            report.checks += 1;
            let space = coset_space(shift, &p.space)?;
            let fresh =
                check_algebraic_spread(part, &space, &p.check_params, CheckMode::Exact, budgets)?;
            if fresh.passed != stored.passed {
                report.failures.push(format!(
                    "piece {i}: stored {name} certificate says passed={} but re-check says {}",
                    stored.passed, fresh.passed
                ));
            }
        }
    }
    for &g in &result.good {
        report.checks += 1;
        match result.pieces.get(g) {
            None => report.failures.push(format!("good index {g} out of range")),
            Some(p) if !p.certs.all_passed() => report
                .failures
                .push(format!("piece {g}: marked good but a certificate failed")),
            Some(_) => {}
        }
    }
    report.checks += 1;
    if report.covered != result.covered {
        report.failures.push(format!(
            "covered claims {} but pieces re-count to {}",
            result.covered, report.covered
        ));
    }
    report.checks += 1;
    if report.total != result.total {
        report.failures.push(format!(
            "total claims {} but inputs give {}",
            result.total, report.total
        ));
    }
    report.checks += 1;
    if result.remainder != result.total.saturating_sub(result.covered) {
        report.failures.push(format!(
            "remainder {} inconsistent with coverage",
            result.remainder
        ));
    }
    Ok(report)
}
