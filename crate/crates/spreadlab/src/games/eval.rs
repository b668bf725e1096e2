//! Strategy evaluation on repeated games: per-coordinate and overall win
//! probabilities, conditional variants over product events, and the
//! random-subset win average.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::strategy::{PlayerCtx, Strategy};
use super::{Game, RepeatedGame};
use crate::diagprod::build_diagonal_product;
use crate::f2::F2Set;
use crate::rat::{rat, rat_int, Rat};
use crate::{Budgets, Error, Result};

/// How to walk the repeated game's query distribution.
#[derive(Debug, Clone, Copy)]
pub enum EvalMode {
    Exact,
    Sampled { trials: u64, seed: u64 },
}

/// Win statistics of one strategy on one repeated game.
#[derive(Debug, Clone)]
pub struct WinProfile {
    /// Pr[coordinate i is won], i = 0..n.
    pub per_coordinate: Vec<Rat>,
    /// Pr[every coordinate is won].
    pub overall: Rat,
    /// True when the numbers are exact over the full query distribution.
    pub exact: bool,
    pub trials: Option<u64>,
}

fn player_ctxs(gn: &RepeatedGame) -> [PlayerCtx; 3] {
    let base = gn.base();
    let q = base.question_sizes();
    let a = base.answer_sizes();
    [0, 1, 2].map(|p| PlayerCtx {
        n: gn.reps(),
        q_size: q[p],
        a_size: a[p],
    })
}

/// Per-coordinate win flags for one question tuple, given packed per-player
/// question indices. Bit i of the result is set when coordinate i is won.
/// Questions are presented digit by digit to the base predicate.
pub(super) fn winmask(
    base: &Game,
    ctxs: &[PlayerCtx; 3],
    s: &Strategy,
    q: [u64; 3],
    n: u32,
) -> Result<u64> {
    let mut a = [
        s.maps[0].answer(q[0], &ctxs[0])?,
        s.maps[1].answer(q[1], &ctxs[1])?,
        s.maps[2].answer(q[2], &ctxs[2])?,
    ];
    let mut q = q;
    let qs = base.question_sizes().map(|k| k as u64);
    let asz = base.answer_sizes().map(|k| k as u64);
    let mut mask = 0u64;
    for i in 0..n {
        let qi = base.question_index(
            (q[0] % qs[0]) as u32,
            (q[1] % qs[1]) as u32,
            (q[2] % qs[2]) as u32,
        );
        let ai = base.answer_index(
            (a[0] % asz[0]) as u32,
            (a[1] % asz[1]) as u32,
            (a[2] % asz[2]) as u32,
        );
        if base.win_packed(qi, ai) {
            mask |= 1 << i;
        }
        for p in 0..3 {
            q[p] /= qs[p];
            a[p] /= asz[p];
        }
    }
    Ok(mask)
}

/// Walk every tuple of base support points, invoking `visit` with the packed
/// per-player question indices of each tuple. Exact enumeration only makes
/// sense for uniform queries here; the caller checked that.
fn for_each_support_tuple(
    gn: &RepeatedGame,
    mut visit: impl FnMut([u64; 3]) -> Result<()>,
) -> Result<()> {
    let base = gn.base();
    let s_count = base.support().len() as u64;
    let n = gn.reps();
    let qs = base.question_sizes().map(|k| k as u64);
    let total = s_count.pow(n);
    for t in 0..total {
        let mut q = [0u64; 3];
        let mut place = [1u64; 3];
        let mut rest = t;
        for _ in 0..n {
            let p = &base.support()[(rest % s_count) as usize];
            rest /= s_count;
            q[0] += p.x as u64 * place[0];
            q[1] += p.y as u64 * place[1];
            q[2] += p.z as u64 * place[2];
            for d in 0..3 {
                place[d] *= qs[d];
            }
        }
        visit(q)?;
    }
    Ok(())
}

/// Exact or sampled win profile of a strategy on a repeated game.
///
/// Exact mode enumerates all `support^n` question tuples and is available
/// while that count fits `budgets.max_eval_pairs` (and the query is
/// uniform; non-uniform bases are rejected toward sampled mode). Sampled
/// mode draws tuples with the given seed and flags the profile estimated.
pub fn evaluate_strategy(
    gn: &RepeatedGame,
    s: &Strategy,
    mode: EvalMode,
    budgets: &Budgets,
) -> Result<WinProfile> {
    let base = gn.base();
    let n = gn.reps();
    if n > 64 {
        return Err(Error::invalid("repetition count above 64 is unsupported"));
    }
    let s_count = base.support().len() as u64;
    match mode {
        EvalMode::Exact => {
            let total = (s_count as u128).pow(n);
            if total > budgets.max_eval_pairs as u128 {
                return Err(Error::budget(
                    "exact evaluation tuples (switch to sampled mode)",
                    total,
                    budgets.max_eval_pairs as u128,
                ));
            }
            if !base.is_uniform() {
                return Err(Error::invalid(
                    "exact evaluation of non-uniform queries is unsupported; use sampled mode",
                ));
            }
            let ctxs = player_ctxs(gn);
            let mut counts = vec![0u64; n as usize];
            let mut all = 0u64;
            let full = if n == 64 { u64::MAX } else { (1 << n) - 1 };
            for_each_support_tuple(gn, |q| {
                let mask = winmask(base, &ctxs, s, q, n)?;
                for (i, c) in counts.iter_mut().enumerate() {
                    *c += (mask >> i) & 1;
                }
                if mask == full {
                    all += 1;
                }
                Ok(())
            })?;
            let total = total as i128;
            let profile = WinProfile {
                per_coordinate: counts.iter().map(|&c| rat(c as i128, total)).collect(),
                overall: rat(all as i128, total),
                exact: true,
                trials: None,
            };
            debug_assert!(profile
                .per_coordinate
                .iter()
                .all(|p| profile.overall <= *p));
            Ok(profile)
        }
        EvalMode::Sampled { trials, seed } => {
            if trials == 0 {
                return Err(Error::invalid("sampled evaluation needs at least 1 trial"));
            }
            if !base.is_uniform() {
                return Err(Error::invalid(
                    "sampled evaluation draws support points uniformly; non-uniform queries are unsupported",
                ));
            }
            let ctxs = player_ctxs(gn);
            for ctx in &ctxs {
                if ctx.question_count().is_none() {
                    return Err(Error::invalid("question tuple space overflows u64"));
                }
            }
            let qs = base.question_sizes().map(|k| k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counts = vec![0u64; n as usize];
            let mut all = 0u64;
            let full = if n == 64 { u64::MAX } else { (1 << n) - 1 };
            for _ in 0..trials {
                let mut q = [0u64; 3];
                let mut place = [1u64; 3];
                for _ in 0..n {
                    let p = &base.support()[rng.random_range(0..s_count) as usize];
                    q[0] += p.x as u64 * place[0];
                    q[1] += p.y as u64 * place[1];
                    q[2] += p.z as u64 * place[2];
                    for d in 0..3 {
                        place[d] *= qs[d];
                    }
                }
                let mask = winmask(base, &ctxs, s, q, n)?;
                for (i, c) in counts.iter_mut().enumerate() {
                    *c += (mask >> i) & 1;
                }
                if mask == full {
                    all += 1;
                }
            }
            Ok(WinProfile {
                per_coordinate: counts.iter().map(|&c| rat(c as i128, trials as i128)).collect(),
                overall: rat(all as i128, trials as i128),
                exact: false,
                trials: Some(trials),
            })
        }
    }
}

/// Per-coordinate win probabilities conditioned on a product event.
#[derive(Debug, Clone)]
pub struct ConditionalWinReport {
    pub per_coordinate: Vec<Rat>,
    /// Mean of the per-coordinate conditional probabilities.
    pub mean: Rat,
    /// Number of (x, y) pairs in the conditioned query support.
    pub support_size: u64,
}

/// Conditional win probabilities Pr[coordinate i won | questions in
/// E x F x G], exact, for a game with the even-parity binary support.
///
/// Conditioning the product query on the event is the same as drawing
/// (x, y) uniformly from the diagonal product S(E, F, G) and setting
/// z = x + y, so the walk is exactly that.
pub fn conditional_win_experiment(
    base: &Game,
    s: &Strategy,
    e: &F2Set,
    f: &F2Set,
    g: &F2Set,
    budgets: &Budgets,
) -> Result<ConditionalWinReport> {
    base.require_ghz_support()?;
    let n = e.ambient_dim();
    let dp = build_diagonal_product(e, f, g, budgets)?;
    if dp.is_empty() {
        return Err(Error::ZeroMassEvent(
            "the event E x F x G supports no query".into(),
        ));
    }
    let ctxs = [0; 3].map(|_| PlayerCtx {
        n,
        q_size: 2,
        a_size: 2,
    });
    let mut counts = vec![0u64; n as usize];
    for (x, y) in dp.pairs() {
        let z = x ^ y;
        let mask = winmask(base, &ctxs, s, [x as u64, y as u64, z as u64], n)?;
        for (i, c) in counts.iter_mut().enumerate() {
            *c += (mask >> i) & 1;
        }
    }
    let size = dp.size() as i128;
    let per_coordinate: Vec<Rat> = counts.iter().map(|&c| rat(c as i128, size)).collect();
    let mean = per_coordinate.iter().sum::<Rat>() / rat_int(n as i128);
    Ok(ConditionalWinReport {
        per_coordinate,
        mean,
        support_size: dp.size(),
    })
}

/// Average win probability over uniformly random coordinate subsets of a
/// fixed size.
#[derive(Debug, Clone)]
pub struct SubsetWinEstimate {
    pub value: Rat,
    /// True when the inputs were enumerated exactly. The subset average is
    /// exact either way: counting subsets inside a win mask is a binomial
    /// coefficient, so subsets are never sampled.
    pub exact_inputs: bool,
    /// Standard error of the per-trial subset average when inputs are
    /// sampled; None in exact mode.
    pub std_error: Option<f64>,
}

/// Binomial coefficient, exact in u128 for n <= 64.
fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c = 1u128;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

/// E over uniform subsets S of size t of Pr[all coordinates in S won].
///
/// For each question tuple with w won coordinates, the fraction of size-t
/// subsets inside the win set is C(w,t)/C(n,t); averaging that over tuples
/// is the subset-averaged win probability. Exact when exact evaluation is
/// in budget, otherwise estimated over sampled tuples (`trials`, `seed`).
pub fn win_random_subset(
    gn: &RepeatedGame,
    s: &Strategy,
    t: u32,
    trials: u64,
    seed: u64,
    budgets: &Budgets,
) -> Result<SubsetWinEstimate> {
    let n = gn.reps();
    if t == 0 || t > n {
        return Err(Error::invalid(format!(
            "subset size {t} outside 1..={n}"
        )));
    }
    if n > 64 {
        return Err(Error::invalid("repetition count above 64 is unsupported"));
    }
    let base = gn.base();
    let s_count = base.support().len() as u64;
    let ctxs = player_ctxs(gn);
    let denom_subsets = binom(n as u64, t as u64);
    let exact_total = (s_count as u128).pow(n);
    if base.is_uniform() && exact_total <= budgets.max_eval_pairs as u128 {
        let mut hist = vec![0u64; n as usize + 1];
        for_each_support_tuple(gn, |q| {
            let mask = winmask(base, &ctxs, s, q, n)?;
            hist[mask.count_ones() as usize] += 1;
            Ok(())
        })?;
        let favorable: u128 = hist
            .iter()
            .enumerate()
            .map(|(w, &c)| c as u128 * binom(w as u64, t as u64))
            .sum();
        let value = rat(favorable as i128, (exact_total * denom_subsets) as i128);
        return Ok(SubsetWinEstimate {
            value,
            exact_inputs: true,
            std_error: None,
        });
    }
    if trials == 0 {
        return Err(Error::invalid("sampled subset average needs trials > 0"));
    }
    if !base.is_uniform() {
        return Err(Error::invalid(
            "sampled subset averages draw support points uniformly; non-uniform queries are unsupported",
        ));
    }
    let qs = base.question_sizes().map(|k| k as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut favorable = 0u128;
    let mut sum_sq = 0.0f64;
    for _ in 0..trials {
        let mut q = [0u64; 3];
        let mut place = [1u64; 3];
        for _ in 0..n {
            let p = &base.support()[rng.random_range(0..s_count) as usize];
            q[0] += p.x as u64 * place[0];
            q[1] += p.y as u64 * place[1];
            q[2] += p.z as u64 * place[2];
            for d in 0..3 {
                place[d] *= qs[d];
            }
        }
        let mask = winmask(base, &ctxs, s, q, n)?;
        let fav = binom(mask.count_ones() as u64, t as u64);
        favorable += fav;
        let frac = fav as f64 / denom_subsets as f64;
        sum_sq += frac * frac;
    }
    let value = rat(favorable as i128, (trials as u128 * denom_subsets) as i128);
    let mean = crate::rat::to_f64(&value);
    let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
    Ok(SubsetWinEstimate {
        value,
        exact_inputs: false,
        std_error: Some((var / trials as f64).sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{make_ghz_game, PlayerMap};
    use crate::rat::to_f64;

    fn ghz_n(n: u32) -> RepeatedGame {
        RepeatedGame::new(make_ghz_game(), n).unwrap()
    }

    /// All-ones answers win GHZ whenever x OR y OR z = 1: an optimal base
    /// strategy, repeated coordinatewise.
    fn all_ones(n: u32) -> Strategy {
        let mask = (1u64 << n) - 1;
        Strategy::new(
            PlayerMap::Constant(mask),
            PlayerMap::Constant(mask),
            PlayerMap::Constant(mask),
        )
    }

    fn exact(gn: &RepeatedGame, s: &Strategy) -> WinProfile {
        evaluate_strategy(gn, s, EvalMode::Exact, &Budgets::default()).unwrap()
    }

    #[test]
    fn product_optimal_strategy_wins_three_quarters_per_coordinate() {
        for n in 1..=5 {
            let gn = ghz_n(n);
            let p = exact(&gn, &all_ones(n));
            assert!(p.exact);
            assert!(p.per_coordinate.iter().all(|v| *v == rat(3, 4)));
            // Coordinates are independent under a product strategy.
            let expected = (0..n).fold(rat_int(1), |acc, _| acc * rat(3, 4));
            assert_eq!(p.overall, expected);
        }
    }

    #[test]
    fn constant_zero_strategy_wins_the_all_zero_query() {
        let gn = ghz_n(3);
        let z = Strategy::new(
            PlayerMap::Constant(0),
            PlayerMap::Constant(0),
            PlayerMap::Constant(0),
        );
        let p = exact(&gn, &z);
        assert!(p.per_coordinate.iter().all(|v| *v == rat(1, 4)));
        assert_eq!(p.overall, rat(1, 64));
    }

    #[test]
    fn seeded_profile_on_eight_repetitions_regression() {
        let gn = ghz_n(8);
        let p = exact(&gn, &Strategy::seeded(5));
        assert_eq!(p.overall, rat(285, 65536));
        let per: Vec<Rat> = [
            (16495, 32768),
            (4125, 8192),
            (8163, 16384),
            (8179, 16384),
            (8179, 16384),
            (16351, 32768),
            (16475, 32768),
            (8139, 16384),
        ]
        .iter()
        .map(|&(p, q)| rat(p, q))
        .collect();
        assert_eq!(p.per_coordinate, per);
    }

    #[test]
    fn sampled_mode_agrees_with_exact_within_four_standard_errors() {
        let gn = ghz_n(6);
        for (k, s) in [Strategy::seeded(1), all_ones(6)].iter().enumerate() {
            let p = exact(&gn, s);
            let q = evaluate_strategy(
                &gn,
                s,
                EvalMode::Sampled {
                    trials: 4000,
                    seed: 9 + k as u64,
                },
                &Budgets::default(),
            )
            .unwrap();
            assert!(!q.exact);
            for i in 0..6 {
                let exact_p = to_f64(&p.per_coordinate[i]);
                let se = (exact_p * (1.0 - exact_p) / 4000.0).sqrt();
                let diff = (to_f64(&q.per_coordinate[i]) - exact_p).abs();
                assert!(diff <= 4.0 * se + 1e-12, "coordinate {i}: {diff} vs {se}");
            }
            let exact_o = to_f64(&p.overall);
            let se = (exact_o * (1.0 - exact_o) / 4000.0).sqrt();
            assert!((to_f64(&q.overall) - exact_o).abs() <= 4.0 * se + 1e-12);
        }
    }

    #[test]
    fn exact_mode_over_budget_advises_sampling() {
        let gn = ghz_n(13);
        let err = evaluate_strategy(
            &gn,
            &Strategy::seeded(0),
            EvalMode::Exact,
            &Budgets::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("sampled"), "{err}");
    }

    #[test]
    fn subset_average_at_t1_is_the_per_coordinate_mean() {
        let gn = ghz_n(6);
        let s = Strategy::seeded(3);
        let p = exact(&gn, &s);
        let est = win_random_subset(&gn, &s, 1, 0, 0, &Budgets::default()).unwrap();
        assert!(est.exact_inputs);
        let mean = p.per_coordinate.iter().sum::<Rat>() / rat_int(6);
        assert_eq!(est.value, mean);
    }

    #[test]
    fn subset_average_of_product_strategy_is_a_power() {
        let gn = ghz_n(6);
        for t in 1..=3 {
            let est = win_random_subset(&gn, &all_ones(6), t, 0, 0, &Budgets::default()).unwrap();
            let expected = (0..t).fold(rat_int(1), |acc, _| acc * rat(3, 4));
            assert_eq!(est.value, expected, "t = {t}");
        }
    }

    #[test]
    fn subset_size_bounds_are_enforced() {
        let gn = ghz_n(6);
        let s = all_ones(6);
        assert!(win_random_subset(&gn, &s, 0, 0, 0, &Budgets::default()).is_err());
        assert!(win_random_subset(&gn, &s, 7, 0, 0, &Budgets::default()).is_err());
    }

    #[test]
    fn sampled_subset_average_tracks_exact() {
        let gn = ghz_n(6);
        let s = Strategy::seeded(4);
        let exact_est = win_random_subset(&gn, &s, 2, 0, 0, &Budgets::default()).unwrap();
        let tight = Budgets {
            max_eval_pairs: 100,
            ..Budgets::default()
        };
        let sampled = win_random_subset(&gn, &s, 2, 4000, 11, &tight).unwrap();
        assert!(!sampled.exact_inputs);
        let se = sampled.std_error.unwrap();
        let diff = (to_f64(&sampled.value) - to_f64(&exact_est.value)).abs();
        assert!(diff <= 4.0 * se.max(1e-6), "{diff} vs se {se}");
    }

    #[test]
    fn conditional_on_the_full_cube_matches_unconditional() {
        let full = F2Set::full(4).unwrap();
        let base = make_ghz_game();
        let s = all_ones(4);
        let report =
            conditional_win_experiment(&base, &s, &full, &full, &full, &Budgets::default())
                .unwrap();
        assert_eq!(report.support_size, 256);
        assert_eq!(report.mean, rat(3, 4));
        let gn = ghz_n(4);
        let p = exact(&gn, &s);
        assert_eq!(report.per_coordinate, p.per_coordinate);
        // And for a non-product strategy as well.
        let s = Strategy::seeded(8);
        let report =
            conditional_win_experiment(&base, &s, &full, &full, &full, &Budgets::default())
                .unwrap();
        let p = exact(&gn, &s);
        assert_eq!(report.per_coordinate, p.per_coordinate);
    }

    #[test]
    fn conditional_on_a_single_point_is_deterministic() {
        let mut e = F2Set::empty(4).unwrap();
        e.insert(0b0110);
        let mut f = F2Set::empty(4).unwrap();
        f.insert(0b0011);
        let mut g = F2Set::empty(4).unwrap();
        g.insert(0b0101);
        let base = make_ghz_game();
        let report = conditional_win_experiment(
            &base,
            &Strategy::seeded(2),
            &e,
            &f,
            &g,
            &Budgets::default(),
        )
        .unwrap();
        assert_eq!(report.support_size, 1);
        for p in &report.per_coordinate {
            assert!(*p == rat_int(0) || *p == rat_int(1));
        }
    }

    #[test]
    fn conditional_on_an_empty_event_is_rejected() {
        let mut e = F2Set::empty(4).unwrap();
        e.insert(0);
        let mut f = F2Set::empty(4).unwrap();
        f.insert(0);
        let mut g = F2Set::empty(4).unwrap();
        g.insert(1);
        let err = conditional_win_experiment(
            &make_ghz_game(),
            &Strategy::seeded(0),
            &e,
            &f,
            &g,
            &Budgets::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ZeroMassEvent(_)));
    }

    #[test]
    fn overall_never_exceeds_any_coordinate() {
        let gn = ghz_n(5);
        for seed in 0..6 {
            let p = exact(&gn, &Strategy::seeded(seed));
            for v in &p.per_coordinate {
                assert!(p.overall <= *v);
            }
        }
    }
}
