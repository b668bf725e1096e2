//! Hardness probes: corner-win fractions of individual squares, and the
//! concentration experiment that counts how often a strategy wins many more
//! coordinates than the base value predicts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::winmask;
use super::strategy::{PlayerCtx, Strategy};
use super::value::game_value_bruteforce;
use super::Game;
use crate::diagprod::Square;
use crate::prf::child_seed;
use crate::rat::{rat, rat_int, Rat};
use crate::{Budgets, Error, Result};

/// The coordinate-i question triples a square induces, one per corner,
/// with the third question equal to the sum of the first two.
///
/// When the square's side is nonzero at coordinate i these four triples are
/// exactly the four even-parity binary triples, each once: a square embeds
/// a full copy of the base query distribution into coordinate i.
pub fn square_coordinate_embedding(sq: &Square, i: u32) -> Result<[(u32, u32, u32); 4]> {
    let n = sq.w.ambient_dim();
    if i >= n {
        return Err(Error::invalid(format!(
            "coordinate {i} outside ambient dimension {n}"
        )));
    }
    Ok(sq.corners().map(|(cx, cy)| {
        let cz = cx ^ cy;
        ((cx >> i) & 1, (cy >> i) & 1, (cz >> i) & 1)
    }))
}

/// Fraction of a square's four corners at which the strategy wins
/// coordinate i, playing the n-fold repetition of `base` on the corner
/// questions (x, y, x + y).
///
/// Requires the side to be nonzero at i. Then each player sees only two
/// distinct questions across the corners, distinguished by their own
/// coordinate-i bit, so the restriction is a one-round strategy for the
/// base game; a base value below 1 forces the fraction below 1.
pub fn hard_square_check(base: &Game, s: &Strategy, sq: &Square, i: u32) -> Result<Rat> {
    base.require_ghz_support()?;
    let n = sq.w.ambient_dim();
    if i >= n {
        return Err(Error::invalid(format!(
            "coordinate {i} outside ambient dimension {n}"
        )));
    }
    if !sq.w.coord(i) {
        return Err(Error::invalid(format!(
            "coordinate {i} is trivial for this square: the side vanishes there"
        )));
    }
    debug_assert!({
        let mut triples = square_coordinate_embedding(sq, i)?;
        triples.sort_unstable();
        triples == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
    });
    let ctxs = [0; 3].map(|_| PlayerCtx {
        n,
        q_size: 2,
        a_size: 2,
    });
    let mut won = 0i128;
    for (cx, cy) in sq.corners() {
        let cz = cx ^ cy;
        let mask = winmask(base, &ctxs, s, [cx as u64, cy as u64, cz as u64], n)?;
        won += ((mask >> i) & 1) as i128;
    }
    Ok(rat(won, 4))
}

/// One battery member's result in a concentration experiment.
#[derive(Debug, Clone)]
pub struct ConcentrationRow {
    pub name: String,
    /// Minimum number of won coordinates that counts as a hit.
    pub threshold: u32,
    pub hits: u64,
    pub trials: u64,
    pub frequency: Rat,
    /// 95% Wilson score interval for the hit probability.
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Wilson score interval for a binomial proportion at `z` standard normal
/// quantiles (1.96 for 95%). Lies inside [0, 1] by construction.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "interval of zero trials");
    assert!(hits <= trials);
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// For each battery strategy, estimate Pr[at least ceil((v + eps) n)
/// of n coordinates are won], where v is the base game value, by playing
/// `trials` random n-fold queries. Questions are drawn as independent
/// uniform bit vectors x, y with z = x + y, which is the n-fold query
/// distribution of an even-parity-support game; nothing larger than a
/// u64 per player is materialized, so n may reach 64.
///
/// Strategy k plays with its own child stream of `seed`, so rows are
/// individually reproducible.
pub fn concentration_experiment(
    base: &Game,
    battery: &[(String, Strategy)],
    n: u32,
    eps: &Rat,
    trials: u64,
    seed: u64,
    budgets: &Budgets,
) -> Result<Vec<ConcentrationRow>> {
    base.require_ghz_support()?;
    if n == 0 || n > 64 {
        return Err(Error::invalid("coordinate count outside 1..=64"));
    }
    if trials == 0 {
        return Err(Error::invalid("concentration needs at least 1 trial"));
    }
    let (value, _) = game_value_bruteforce(base, budgets)?;
    let bar = (value + eps) * rat_int(n as i128);
    let threshold = bar.ceil().to_integer().clamp(0, n as i128 + 1) as u32;
    let ctxs = [0; 3].map(|_| PlayerCtx {
        n,
        q_size: 2,
        a_size: 2,
    });
    let q_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut rows = Vec::with_capacity(battery.len());
    for (k, (name, s)) in battery.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, k as u64));
        let mut hits = 0u64;
        for _ in 0..trials {
            let x = rng.random::<u64>() & q_mask;
            let y = rng.random::<u64>() & q_mask;
            let mask = winmask(base, &ctxs, s, [x, y, x ^ y], n)?;
            if mask.count_ones() >= threshold {
                hits += 1;
            }
        }
        let (wilson_low, wilson_high) = wilson_interval(hits, trials, 1.96);
        rows.push(ConcentrationRow {
            name: name.clone(),
            threshold,
            hits,
            trials,
            frequency: rat(hits as i128, trials as i128),
            wilson_low,
            wilson_high,
        });
    }
    Ok(rows)
}
