//! The fixed strategy battery used by one-sided hardness checks, and the
//! pieces it is assembled from.
//!
//! The bounds under test quantify over all strategies; experiments can
//! only try to falsify them. The battery is therefore fixed and seeded:
//! one product repetition of an optimal base strategy, 32 pseudorandom
//! strategies, 16 greedy local searches, and one constant strategy, for 50
//! total. Seed fan-out uses `prf::child_seed` with documented streams:
//! stream 0x100+k for random strategy k, 0x200+k and 0x300+k for the
//! init and moves of hill-climb k.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::strategy::{PlayerCtx, PlayerMap, Strategy};
use super::value::game_value_bruteforce;
use super::RepeatedGame;
use crate::prf::child_seed;
use crate::{Budgets, Error, Result};

/// Repeat a single-round witness strategy coordinatewise. The input maps
/// must be explicit tables over the base alphabets.
pub fn product_strategy(base_witness: &Strategy, base: &super::Game) -> Result<Strategy> {
    let q = base.question_sizes();
    let a = base.answer_sizes();
    let maps: Vec<PlayerMap> = base_witness
        .maps
        .iter()
        .zip(0..3)
        .map(|(m, p)| match m {
            PlayerMap::Table(t) if t.len() == q[p] as usize => {
                let per: Vec<u32> = t.iter().map(|&v| v as u32).collect();
                if per.iter().any(|&v| v >= a[p]) {
                    Err(Error::invalid("witness answer outside the base alphabet"))
                } else {
                    Ok(PlayerMap::PerCoord(per))
                }
            }
            _ => Err(Error::invalid(
                "product strategies are built from single-round table witnesses",
            )),
        })
        .collect::<Result<_>>()?;
    let mut maps = maps.into_iter();
    Ok(Strategy::new(
        maps.next().unwrap(),
        maps.next().unwrap(),
        maps.next().unwrap(),
    ))
}

/// The all-zero-answers strategy.
pub fn constant_zero_strategy() -> Strategy {
    Strategy::new(
        PlayerMap::Constant(0),
        PlayerMap::Constant(0),
        PlayerMap::Constant(0),
    )
}

/// `count` pseudorandom strategies with child seeds of `master`.
pub fn seeded_strategies(master: u64, count: u32) -> Vec<Strategy> {
    (0..count)
        .map(|k| Strategy::seeded(child_seed(master, 0x100 + k as u64)))
        .collect()
}

/// The frozen objective a hill-climb runs against: either every question
/// tuple (exact, small games) or a fixed sample of tuples. Holding the
/// sample fixed makes the climb a deterministic walk on a static landscape.
struct Objective {
    questions: Vec<[u64; 3]>,
    ctxs: [PlayerCtx; 3],
    n: u32,
}

const OBJECTIVE_SAMPLE: u64 = 512;
const EXACT_OBJECTIVE_CAP: u64 = 4096;

impl Objective {
    fn new(gn: &RepeatedGame, seed: u64) -> Result<Objective> {
        let base = gn.base();
        let n = gn.reps();
        let q = base.question_sizes();
        let a = base.answer_sizes();
        let ctxs = [0, 1, 2].map(|p| PlayerCtx {
            n,
            q_size: q[p],
            a_size: a[p],
        });
        for ctx in &ctxs {
            if ctx.question_count().is_none() || ctx.answer_count().is_none() {
                return Err(Error::invalid("tuple spaces overflow u64"));
            }
        }
        let s_count = base.support().len() as u64;
        let mut questions = Vec::new();
        let exact = (s_count as u128).pow(n) <= EXACT_OBJECTIVE_CAP as u128;
        let mut push_tuple = |digits: &mut dyn Iterator<Item = u64>| {
            let mut qv = [0u64; 3];
            let mut place = [1u64; 3];
            for d in digits {
                let p = &base.support()[d as usize];
                qv[0] += p.x as u64 * place[0];
                qv[1] += p.y as u64 * place[1];
                qv[2] += p.z as u64 * place[2];
                for i in 0..3 {
                    place[i] *= q[i] as u64;
                }
            }
            questions.push(qv);
        };
        if exact {
            let total = s_count.pow(n);
            for t in 0..total {
                let mut rest = t;
                push_tuple(&mut (0..n).map(|_| {
                    let d = rest % s_count;
                    rest /= s_count;
                    d
                }));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..OBJECTIVE_SAMPLE {
                push_tuple(&mut (0..n).map(|_| rng.random_range(0..s_count)));
            }
        }
        Ok(Objective { questions, ctxs, n })
    }

    /// Number of objective tuples the strategy wins outright.
    fn score(&self, base: &super::Game, s: &Strategy) -> Result<u64> {
        let full = if self.n == 64 {
            u64::MAX
        } else {
            (1 << self.n) - 1
        };
        let mut hits = 0;
        for &q in &self.questions {
            if super::eval::winmask(base, &self.ctxs, s, q, self.n)? == full {
                hits += 1;
            }
        }
        Ok(hits)
    }
}

/// Greedy local search on the overall win probability: `moves` single-entry
/// patches are proposed, each kept only if the frozen objective strictly
/// improves. Deterministic given (init, moves, seed).
pub fn hill_climb(
    gn: &RepeatedGame,
    init: Strategy,
    moves: u32,
    seed: u64,
    _budgets: &Budgets,
) -> Result<Strategy> {
    let base = gn.base();
    let objective = Objective::new(gn, child_seed(seed, 0))?;
    let mut maps = init.maps.map(|m| PlayerMap::Patched {
        base: Box::new(m),
        patches: BTreeMap::new(),
    });
    let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, 1));
    let strategy_of = |maps: &[PlayerMap; 3]| Strategy::new(maps[0].clone(), maps[1].clone(), maps[2].clone());
    let mut best = objective.score(base, &strategy_of(&maps))?;
    for m in 0..moves {
        let p = (m % 3) as usize;
        let ctx = objective.ctxs[p];
        // Patch a question that actually occurs in the objective so every
        // accepted move changes the landscape being climbed.
        let q = objective.questions[rng.random_range(0..objective.questions.len())][p];
        let mut new_answer = 0u64;
        let mut place = 1u64;
        for _ in 0..ctx.n {
            new_answer += rng.random_range(0..ctx.a_size as u64) * place;
            place *= ctx.a_size as u64;
        }
        let PlayerMap::Patched { patches, .. } = &mut maps[p] else {
            unreachable!("climb maps are always patched");
        };
        let previous = patches.insert(q, new_answer);
        let candidate = objective.score(base, &strategy_of(&maps))?;
        if candidate > best {
            best = candidate;
        } else {
            let PlayerMap::Patched { patches, .. } = &mut maps[p] else {
                unreachable!();
            };
            match previous {
                Some(old) => {
                    patches.insert(q, old);
                }
                None => {
                    patches.remove(&q);
                }
            }
        }
    }
    Ok(strategy_of(&maps))
}

/// The fixed 50-strategy battery for a repeated game: product-optimal,
/// 32 seeded random, 16 hill-climbed (200 moves each), one constant.
pub fn strategy_battery(
    gn: &RepeatedGame,
    master: u64,
    budgets: &Budgets,
) -> Result<Vec<(String, Strategy)>> {
    let base = gn.base();
    let (_, witness) = game_value_bruteforce(base, budgets)?;
    let mut battery = Vec::with_capacity(50);
    battery.push(("product-optimal".to_string(), product_strategy(&witness, base)?));
    for (k, s) in seeded_strategies(master, 32).into_iter().enumerate() {
        battery.push((format!("random-{k:02}"), s));
    }
    for k in 0..16u64 {
        let init = Strategy::seeded(child_seed(master, 0x200 + k));
        let climbed = hill_climb(gn, init, 200, child_seed(master, 0x300 + k), budgets)?;
        battery.push((format!("hillclimb-{k:02}"), climbed));
    }
    battery.push(("constant-zero".to_string(), constant_zero_strategy()));
    Ok(battery)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::eval::{evaluate_strategy, EvalMode};
    use crate::games::make_ghz_game;
    use crate::rat::{rat, to_f64};

    fn ghz_n(n: u32) -> RepeatedGame {
        RepeatedGame::new(make_ghz_game(), n).unwrap()
    }

    #[test]
    fn product_of_the_ghz_witness_wins_three_quarters_everywhere() {
        let base = make_ghz_game();
        let (v, w) = game_value_bruteforce(&base, &Budgets::default()).unwrap();
        assert_eq!(v, rat(3, 4));
        let gn = ghz_n(4);
        let s = product_strategy(&w, &base).unwrap();
        let p = evaluate_strategy(&gn, &s, EvalMode::Exact, &Budgets::default()).unwrap();
        assert!(p.per_coordinate.iter().all(|c| *c == rat(3, 4)));
        assert_eq!(p.overall, rat(81, 256));
    }

    #[test]
    fn product_strategy_requires_table_witnesses() {
        let base = make_ghz_game();
        let s = Strategy::seeded(0);
        assert!(product_strategy(&s, &base).is_err());
    }

    #[test]
    fn battery_is_fifty_distinctly_named_strategies() {
        let gn = ghz_n(3);
        let battery = strategy_battery(&gn, 77, &Budgets::default()).unwrap();
        assert_eq!(battery.len(), 50);
        let names: std::collections::BTreeSet<&str> =
            battery.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names.len(), 50);
        assert_eq!(battery[0].0, "product-optimal");
        assert_eq!(battery.iter().filter(|(n, _)| n.starts_with("random-")).count(), 32);
        assert_eq!(
            battery.iter().filter(|(n, _)| n.starts_with("hillclimb-")).count(),
            16
        );
        assert_eq!(battery[49].0, "constant-zero");
    }

    #[test]
    fn battery_is_reproducible_from_its_master_seed() {
        let gn = ghz_n(3);
        let a = strategy_battery(&gn, 9, &Budgets::default()).unwrap();
        let b = strategy_battery(&gn, 9, &Budgets::default()).unwrap();
        let ctx = PlayerCtx {
            n: 3,
            q_size: 2,
            a_size: 2,
        };
        for ((na, sa), (nb, sb)) in a.iter().zip(&b) {
            assert_eq!(na, nb);
            for p in 0..3 {
                for q in 0..8u64 {
                    assert_eq!(
                        sa.maps[p].answer(q, &ctx).unwrap(),
                        sb.maps[p].answer(q, &ctx).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn hill_climb_never_loses_ground() {
        // On a 2-repetition game the objective is exact, so the climbed
        // strategy's true overall win probability is at least the seed's.
        let gn = ghz_n(2);
        for k in 0..4 {
            let init = Strategy::seeded(k);
            let before =
                evaluate_strategy(&gn, &init, EvalMode::Exact, &Budgets::default()).unwrap();
            let after = hill_climb(&gn, init, 200, 31 + k, &Budgets::default()).unwrap();
            let after =
                evaluate_strategy(&gn, &after, EvalMode::Exact, &Budgets::default()).unwrap();
            assert!(
                after.overall >= before.overall,
                "seed {k}: {} < {}",
                to_f64(&after.overall),
                to_f64(&before.overall)
            );
        }
    }

    #[test]
    fn hill_climb_is_deterministic() {
        let gn = ghz_n(2);
        let a = hill_climb(&gn, Strategy::seeded(1), 50, 5, &Budgets::default()).unwrap();
        let b = hill_climb(&gn, Strategy::seeded(1), 50, 5, &Budgets::default()).unwrap();
        let ctx = PlayerCtx {
            n: 2,
            q_size: 2,
            a_size: 2,
        };
        for p in 0..3 {
            for q in 0..4u64 {
                assert_eq!(a.maps[p].answer(q, &ctx).unwrap(), b.maps[p].answer(q, &ctx).unwrap());
            }
        }
    }
}
