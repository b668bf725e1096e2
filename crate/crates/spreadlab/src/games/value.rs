//! Exact game values by exhaustive search over deterministic strategies.
//!
//! The main path enumerates the first two players' tables and gives the
//! third player their best response per question, which is optimal because
//! h(z) enters the winning probability independently for each z. The full
//! three-table search survives as a validation path for tiny games.

use super::strategy::{PlayerMap, Strategy};
use super::Game;
use crate::rat::{rat_int, Rat};
use crate::{Budgets, Error, Result};

/// Decode table index `idx` (mixed radix, `k` symbols per digit) into an
/// explicit question-to-answer table of length `len`.
fn decode_table(mut idx: u64, k: u32, len: u32) -> Vec<u32> {
    let mut t = Vec::with_capacity(len as usize);
    for _ in 0..len {
        t.push((idx % k as u64) as u32);
        idx /= k as u64;
    }
    t
}

fn table_count(k: u32, len: u32, what: &str) -> Result<u64> {
    (k as u64)
        .checked_pow(len)
        .ok_or_else(|| Error::invalid(format!("{what} strategy space overflows")))
}

/// Exact value and an optimal strategy, maximizing over all deterministic
/// strategies. Enumerates (f, g) pairs; h is the per-question best response.
/// The pair count is charged against `budgets.max_strategy_pairs`.
pub fn game_value_bruteforce(game: &Game, budgets: &Budgets) -> Result<(Rat, Strategy)> {
    let [qx, qy, qz] = game.question_sizes();
    let [ka, kb, kc] = game.answer_sizes();
    let f_count = table_count(ka, qx, "first player")?;
    let g_count = table_count(kb, qy, "second player")?;
    let pairs = f_count as u128 * g_count as u128;
    if pairs > budgets.max_strategy_pairs as u128 {
        return Err(Error::budget(
            "strategy pairs in brute-force valuation",
            pairs,
            budgets.max_strategy_pairs as u128,
        ));
    }
    // Support points grouped by the third player's question.
    let mut groups: Vec<Vec<(u32, u32, u32, &Rat)>> = vec![Vec::new(); qz as usize];
    for p in game.support() {
        groups[p.z as usize].push((p.x, p.y, game.question_index(p.x, p.y, p.z), &p.weight));
    }

    let mut best_value = rat_int(-1);
    let mut best_pair = (0u64, 0u64);
    // Uniform queries let the whole search run on integer hit counts.
    let uniform_weight = game.is_uniform().then(|| game.support()[0].weight.clone());
    let mut best_hits = 0u64;
    for f_idx in 0..f_count {
        let fa = decode_table(f_idx, ka, qx);
        for g_idx in 0..g_count {
            let ga = decode_table(g_idx, kb, qy);
            if let Some(w) = &uniform_weight {
                let mut hits = 0u64;
                for group in &groups {
                    let mut best_c = 0u64;
                    for c in 0..kc {
                        let cnt = group
                            .iter()
                            .filter(|&&(x, y, qidx, _)| {
                                game.win_packed(qidx, game.answer_index(fa[x as usize], ga[y as usize], c))
                            })
                            .count() as u64;
                        best_c = best_c.max(cnt);
                    }
                    hits += best_c;
                }
                if (f_idx, g_idx) == (0, 0) || hits > best_hits {
                    best_hits = hits;
                    best_pair = (f_idx, g_idx);
                    best_value = w * rat_int(hits as i128);
                }
            } else {
                let mut value = rat_int(0);
                for group in &groups {
                    let mut best_c: Option<Rat> = None;
                    for c in 0..kc {
                        let mut v = rat_int(0);
                        for &(x, y, qidx, w) in group {
                            if game.win_packed(qidx, game.answer_index(fa[x as usize], ga[y as usize], c)) {
                                v += w;
                            }
                        }
                        if best_c.as_ref().is_none_or(|b| v > *b) {
                            best_c = Some(v);
                        }
                    }
                    value += best_c.unwrap_or_else(|| rat_int(0));
                }
                if value > best_value {
                    best_value = value;
                    best_pair = (f_idx, g_idx);
                }
            }
        }
    }

    // Rebuild the witness: the argmax tables plus the best response per z.
    let fa = decode_table(best_pair.0, ka, qx);
    let ga = decode_table(best_pair.1, kb, qy);
    let mut ha = vec![0u32; qz as usize];
    for (z, group) in groups.iter().enumerate() {
        let mut best: Option<(Rat, u32)> = None;
        for c in 0..kc {
            let mut v = rat_int(0);
            for &(x, y, qidx, w) in group {
                if game.win_packed(qidx, game.answer_index(fa[x as usize], ga[y as usize], c)) {
                    v += w;
                }
            }
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, c));
            }
        }
        ha[z] = best.map_or(0, |(_, c)| c);
    }
    let witness = Strategy::new(
        PlayerMap::Table(fa.iter().map(|&a| a as u64).collect()),
        PlayerMap::Table(ga.iter().map(|&a| a as u64).collect()),
        PlayerMap::Table(ha.iter().map(|&a| a as u64).collect()),
    );
    Ok((best_value, witness))
}

/// Exact value by enumerating all three tables. Exponentially worse than
/// [`game_value_bruteforce`]; exists to validate the best-response step.
pub fn game_value_bruteforce_3way(game: &Game, budgets: &Budgets) -> Result<Rat> {
    let [qx, qy, qz] = game.question_sizes();
    let [ka, kb, kc] = game.answer_sizes();
    let f_count = table_count(ka, qx, "first player")?;
    let g_count = table_count(kb, qy, "second player")?;
    let h_count = table_count(kc, qz, "third player")?;
    let triples = f_count as u128 * g_count as u128 * h_count as u128;
    if triples > budgets.max_strategy_pairs as u128 {
        return Err(Error::budget(
            "strategy triples in 3-way valuation",
            triples,
            budgets.max_strategy_pairs as u128,
        ));
    }
    let mut best = rat_int(0);
    for f_idx in 0..f_count {
        let fa = decode_table(f_idx, ka, qx);
        for g_idx in 0..g_count {
            let ga = decode_table(g_idx, kb, qy);
            for h_idx in 0..h_count {
                let ha = decode_table(h_idx, kc, qz);
                let mut v = rat_int(0);
                for p in game.support() {
                    if game.win(
                        (p.x, p.y, p.z),
                        (fa[p.x as usize], ga[p.y as usize], ha[p.z as usize]),
                    ) {
                        v += &p.weight;
                    }
                }
                if v > best {
                    best = v;
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{make_ghz_game, QueryPoint, RepeatedGame};
    use crate::rat::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn witness_value(game: &Game, s: &Strategy) -> Rat {
        let ctx = |p: usize| super::super::PlayerCtx {
            n: 1,
            q_size: game.question_sizes()[p],
            a_size: game.answer_sizes()[p],
        };
        let mut v = rat_int(0);
        for p in game.support() {
            let a = s.maps[0].answer(p.x as u64, &ctx(0)).unwrap() as u32;
            let b = s.maps[1].answer(p.y as u64, &ctx(1)).unwrap() as u32;
            let c = s.maps[2].answer(p.z as u64, &ctx(2)).unwrap() as u32;
            if game.win((p.x, p.y, p.z), (a, b, c)) {
                v += &p.weight;
            }
        }
        v
    }

    #[test]
    fn ghz_value_is_three_quarters() {
        let g = make_ghz_game();
        let (v, w) = game_value_bruteforce(&g, &Budgets::default()).unwrap();
        assert_eq!(v, rat(3, 4));
        assert_eq!(witness_value(&g, &w), rat(3, 4));
    }

    #[test]
    fn constant_true_predicate_has_value_one() {
        let support = vec![
            QueryPoint {
                x: 0,
                y: 0,
                z: 0,
                weight: rat(1, 2),
            },
            QueryPoint {
                x: 1,
                y: 1,
                z: 0,
                weight: rat(1, 2),
            },
        ];
        let g = Game::new([2, 2, 2], [2, 2, 2], support, |_, _| true).unwrap();
        let (v, _) = game_value_bruteforce(&g, &Budgets::default()).unwrap();
        assert_eq!(v, rat_int(1));
    }

    #[test]
    fn best_response_matches_three_way_bruteforce() {
        // Random binary games, uniform and non-uniform queries alike: the
        // best-response search and the full three-table search must agree
        // exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for round in 0..20 {
            let mut pred = [[false; 8]; 8];
            for row in pred.iter_mut() {
                for cell in row.iter_mut() {
                    *cell = rng.random::<bool>();
                }
            }
            let mut support = Vec::new();
            let count = rng.random_range(2..=8u32);
            let mut triples: Vec<u32> = (0..8).collect();
            for k in 0..count {
                let pick = rng.random_range(0..triples.len());
                let t = triples.swap_remove(pick);
                let weight = if round % 2 == 0 {
                    rat(1, count as i128)
                } else if k == 0 {
                    // Non-uniform: first point takes the slack.
                    rat(1, 1) - rat(count as i128 - 1, 2 * count as i128)
                } else {
                    rat(1, 2 * count as i128)
                };
                support.push(QueryPoint {
                    x: t >> 2,
                    y: (t >> 1) & 1,
                    z: t & 1,
                    weight,
                });
            }
            let g = Game::new([2, 2, 2], [2, 2, 2], support, |q, a| {
                pred[((q.0 << 2) | (q.1 << 1) | q.2) as usize][((a.0 << 2) | (a.1 << 1) | a.2) as usize]
            })
            .unwrap();
            let (v, w) = game_value_bruteforce(&g, &Budgets::default()).unwrap();
            let v3 = game_value_bruteforce_3way(&g, &Budgets::default()).unwrap();
            assert_eq!(v, v3, "round {round}");
            assert_eq!(witness_value(&g, &w), v, "round {round} witness");
        }
    }

    #[test]
    fn ghz_squared_value_pinned() {
        let gn = RepeatedGame::new(make_ghz_game(), 2).unwrap();
        let flat = gn.flatten().unwrap();
        let (v, w) = game_value_bruteforce(&flat, &Budgets::default()).unwrap();
        assert_eq!(v, rat(5, 8));
        // Repetition can't help beyond the base value and can't hurt below
        // the product of base values.
        assert!(v <= rat(3, 4));
        assert!(v >= rat(9, 16));
        assert_eq!(witness_value(&flat, &w), v);
    }

    #[test]
    fn oversized_search_spaces_trip_the_budget() {
        let gn = RepeatedGame::new(make_ghz_game(), 3).unwrap();
        let flat = gn.flatten().unwrap();
        assert!(matches!(
            game_value_bruteforce(&flat, &Budgets::default()),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            game_value_bruteforce_3way(&make_ghz_game(), &Budgets { max_strategy_pairs: 10, ..Budgets::default() }),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
