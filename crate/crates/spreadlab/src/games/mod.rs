//! Finite three-player games with rational query distributions, their
//! parallel repetitions, deterministic strategies, and the experiments
//! built on top of them.
//!
//! Questions and answers are integers below the alphabet sizes; a game is
//! a query support with weights plus a total win predicate. Repetition is
//! never materialized unless asked for: [`RepeatedGame`] keeps the base
//! game and a count, and evaluation walks tuples of base support points.

mod battery;
mod eval;
mod hardness;
mod strategy;
mod value;

pub use battery::{
    constant_zero_strategy, hill_climb, product_strategy, seeded_strategies, strategy_battery,
};
pub use eval::{
    conditional_win_experiment, evaluate_strategy, win_random_subset, ConditionalWinReport,
    EvalMode, SubsetWinEstimate, WinProfile,
};
pub use hardness::{
    concentration_experiment, hard_square_check, square_coordinate_embedding, wilson_interval,
    ConcentrationRow,
};
pub use strategy::{PlayerCtx, PlayerMap, Strategy};
pub use value::{game_value_bruteforce, game_value_bruteforce_3way};

use serde::{Deserialize, Serialize};

use crate::rat::{format_rat, parse_rat, rat, rat_int, Rat};
use crate::{Error, Result};

/// Largest predicate table a [`Game`] will hold (question combos times
/// answer combos). Keeps flattened repetitions honest.
const MAX_PREDICATE_CELLS: u128 = 1 << 26;

/// One support point of the query distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPoint {
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub weight: Rat,
}

/// A finite 3-player game: question alphabet sizes, answer alphabet sizes,
/// a rational query distribution, and a win predicate on the full product.
#[derive(Debug, Clone)]
pub struct Game {
    q_sizes: [u32; 3],
    a_sizes: [u32; 3],
    support: Vec<QueryPoint>,
    uniform: bool,
    predicate: Vec<bool>,
}

impl Game {
    /// Build and validate a game. The predicate closure is evaluated on
    /// every (question, answer) combination and stored as a table.
    pub fn new(
        q_sizes: [u32; 3],
        a_sizes: [u32; 3],
        support: Vec<QueryPoint>,
        predicate: impl Fn((u32, u32, u32), (u32, u32, u32)) -> bool,
    ) -> Result<Game> {
        for &k in q_sizes.iter().chain(a_sizes.iter()) {
            if k == 0 {
                return Err(Error::invalid("alphabet of size 0"));
            }
        }
        let q_total = q_sizes.iter().map(|&k| k as u128).product::<u128>();
        let a_total = a_sizes.iter().map(|&k| k as u128).product::<u128>();
        if q_total * a_total > MAX_PREDICATE_CELLS {
            return Err(Error::budget(
                "predicate table cells",
                q_total * a_total,
                MAX_PREDICATE_CELLS,
            ));
        }
        if support.is_empty() {
            return Err(Error::Empty("query support"));
        }
        let mut seen = std::collections::HashSet::new();
        let mut sum = rat_int(0);
        for p in &support {
            if p.x >= q_sizes[0] || p.y >= q_sizes[1] || p.z >= q_sizes[2] {
                return Err(Error::invalid(format!(
                    "query point ({}, {}, {}) outside the alphabets",
                    p.x, p.y, p.z
                )));
            }
            if !seen.insert((p.x, p.y, p.z)) {
                return Err(Error::invalid(format!(
                    "query point ({}, {}, {}) listed twice",
                    p.x, p.y, p.z
                )));
            }
            if p.weight <= rat_int(0) {
                return Err(Error::invalid("query weight must be positive"));
            }
            sum += &p.weight;
        }
        if sum != rat_int(1) {
            return Err(Error::invalid(format!(
                "query weights sum to {}, not 1",
                format_rat(&sum)
            )));
        }
        let uniform = support.iter().all(|p| p.weight == support[0].weight);
        let mut table = Vec::with_capacity((q_total * a_total) as usize);
        for x in 0..q_sizes[0] {
            for y in 0..q_sizes[1] {
                for z in 0..q_sizes[2] {
                    for a in 0..a_sizes[0] {
                        for b in 0..a_sizes[1] {
                            for c in 0..a_sizes[2] {
                                table.push(predicate((x, y, z), (a, b, c)));
                            }
                        }
                    }
                }
            }
        }
        Ok(Game {
            q_sizes,
            a_sizes,
            support,
            uniform,
            predicate: table,
        })
    }

    pub fn question_sizes(&self) -> [u32; 3] {
        self.q_sizes
    }

    pub fn answer_sizes(&self) -> [u32; 3] {
        self.a_sizes
    }

    pub fn support(&self) -> &[QueryPoint] {
        &self.support
    }

    /// True when every support point carries the same weight.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    #[inline]
    pub fn question_index(&self, x: u32, y: u32, z: u32) -> u32 {
        (x * self.q_sizes[1] + y) * self.q_sizes[2] + z
    }

    #[inline]
    pub fn answer_index(&self, a: u32, b: u32, c: u32) -> u32 {
        (a * self.a_sizes[1] + b) * self.a_sizes[2] + c
    }

    #[inline]
    pub fn answer_combos(&self) -> u32 {
        self.a_sizes[0] * self.a_sizes[1] * self.a_sizes[2]
    }

    /// Predicate lookup by packed indices from `question_index` and
    /// `answer_index`.
    #[inline]
    pub fn win_packed(&self, q_index: u32, a_index: u32) -> bool {
        self.predicate[(q_index * self.answer_combos() + a_index) as usize]
    }

    pub fn win(&self, q: (u32, u32, u32), a: (u32, u32, u32)) -> bool {
        self.win_packed(self.question_index(q.0, q.1, q.2), self.answer_index(a.0, a.1, a.2))
    }

    /// True when the game has binary alphabets and the uniform even-parity
    /// query support {(0,0,0), (0,1,1), (1,0,1), (1,1,0)}. The repeated-game
    /// experiments that sample questions as (x, y, x+y) require this shape;
    /// the predicate is free.
    pub fn has_ghz_support(&self) -> bool {
        self.q_sizes == [2, 2, 2]
            && self.a_sizes == [2, 2, 2]
            && self.uniform
            && self.support.len() == 4
            && self
                .support
                .iter()
                .all(|p| p.z == (p.x ^ p.y) && p.weight == rat(1, 4))
    }

    pub fn require_ghz_support(&self) -> Result<()> {
        if self.has_ghz_support() {
            Ok(())
        } else {
            Err(Error::invalid(
                "operation requires binary alphabets with the uniform even-parity query support",
            ))
        }
    }

    pub fn from_json(text: &str) -> Result<Game> {
        let file: GameFile = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("game file: {e}")))?;
        file.into_game()
    }

    pub fn to_json(&self) -> String {
        GameFile::from_game(self).to_string_pretty()
    }
}

/// The GHZ game: uniform questions with x+y+z = 0 over bits, win when
/// a+b+c = x OR y OR z (mod 2).
pub fn make_ghz_game() -> Game {
    let support = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
        .into_iter()
        .map(|(x, y, z)| QueryPoint {
            x,
            y,
            z,
            weight: rat(1, 4),
        })
        .collect();
    Game::new([2, 2, 2], [2, 2, 2], support, |(x, y, z), (a, b, c)| {
        (a + b + c) % 2 == (x | y | z)
    })
    .expect("the GHZ game is well-formed")
}

/// n-fold parallel repetition of a base game. Questions are n-tuples asked
/// coordinatewise; the players win when they win every coordinate.
#[derive(Debug, Clone)]
pub struct RepeatedGame {
    base: Game,
    n: u32,
}

impl RepeatedGame {
    pub fn new(base: Game, n: u32) -> Result<RepeatedGame> {
        if n == 0 {
            return Err(Error::invalid("repetition count must be at least 1"));
        }
        let gn = RepeatedGame { base, n };
        // The product structure is cheap to verify explicitly for small n;
        // beyond that the flattened table would not fit anyway.
        if gn.flatten_cells().is_some_and(|c| c <= 1 << 16) {
            let flat = gn.flatten()?;
            debug_assert_eq!(
                flat.support().len(),
                gn.base.support.len().pow(n),
                "product support size"
            );
        }
        Ok(gn)
    }

    pub fn base(&self) -> &Game {
        &self.base
    }

    pub fn reps(&self) -> u32 {
        self.n
    }

    fn flatten_cells(&self) -> Option<u128> {
        let q: u128 = self
            .base
            .q_sizes
            .iter()
            .map(|&k| (k as u128).checked_pow(self.n))
            .try_fold(1u128, |acc, k| acc.checked_mul(k?))?;
        let a: u128 = self
            .base
            .a_sizes
            .iter()
            .map(|&k| (k as u128).checked_pow(self.n))
            .try_fold(1u128, |acc, k| acc.checked_mul(k?))?;
        q.checked_mul(a)
    }

    /// Materialize the repeated game as a plain [`Game`] over tuple
    /// alphabets: alphabet k becomes k^n with mixed-radix indices, query
    /// weights multiply across coordinates, and the predicate is the AND
    /// of the base predicate per coordinate.
    pub fn flatten(&self) -> Result<Game> {
        let n = self.n;
        let base = &self.base;
        let pow = |k: u32| -> Result<u32> {
            k.checked_pow(n)
                .ok_or_else(|| Error::invalid(format!("alphabet {k}^{n} overflows")))
        };
        let q_sizes = [pow(base.q_sizes[0])?, pow(base.q_sizes[1])?, pow(base.q_sizes[2])?];
        let a_sizes = [pow(base.a_sizes[0])?, pow(base.a_sizes[1])?, pow(base.a_sizes[2])?];
        let s = base.support.len();
        let tuples = (s as u64)
            .checked_pow(n)
            .ok_or_else(|| Error::invalid("product support overflows"))?;
        let mut support = Vec::with_capacity(tuples as usize);
        for t in 0..tuples {
            let (mut x, mut y, mut z) = (0u32, 0u32, 0u32);
            let mut w = rat_int(1);
            let (mut px, mut py, mut pz) = (1u32, 1u32, 1u32);
            let mut rest = t;
            for _ in 0..n {
                let p = &base.support[(rest % s as u64) as usize];
                rest /= s as u64;
                x += p.x * px;
                y += p.y * py;
                z += p.z * pz;
                px *= base.q_sizes[0];
                py *= base.q_sizes[1];
                pz *= base.q_sizes[2];
                w *= &p.weight;
            }
            support.push(QueryPoint { x, y, z, weight: w });
        }
        let bq = base.q_sizes;
        let ba = base.a_sizes;
        Game::new(q_sizes, a_sizes, support, |(x, y, z), (a, b, c)| {
            let (mut x, mut y, mut z) = (x, y, z);
            let (mut a, mut b, mut c) = (a, b, c);
            for _ in 0..n {
                let q = (x % bq[0], y % bq[1], z % bq[2]);
                let ans = (a % ba[0], b % ba[1], c % ba[2]);
                if !base.win(q, ans) {
                    return false;
                }
                x /= bq[0];
                y /= bq[1];
                z /= bq[2];
                a /= ba[0];
                b /= ba[1];
                c /= ba[2];
            }
            true
        })
    }
}

#[derive(Serialize, Deserialize)]
struct AlphabetsFile {
    x: u32,
    y: u32,
    z: u32,
    a: u32,
    b: u32,
    c: u32,
}

#[derive(Serialize, Deserialize)]
struct QueryRow {
    x: u32,
    y: u32,
    z: u32,
    weight_num: i64,
    weight_den: i64,
}

#[derive(Serialize, Deserialize)]
struct PredicateRow {
    x: u32,
    y: u32,
    z: u32,
    a: u32,
    b: u32,
    c: u32,
    win: bool,
}

/// On-disk JSON shape of a game. The predicate list must cover the full
/// question-answer product exactly once.
#[derive(Serialize, Deserialize)]
struct GameFile {
    alphabets: AlphabetsFile,
    query: Vec<QueryRow>,
    predicate: Vec<PredicateRow>,
}

impl GameFile {
    fn into_game(self) -> Result<Game> {
        let q_sizes = [self.alphabets.x, self.alphabets.y, self.alphabets.z];
        let a_sizes = [self.alphabets.a, self.alphabets.b, self.alphabets.c];
        let support = self
            .query
            .iter()
            .map(|r| {
                Ok(QueryPoint {
                    x: r.x,
                    y: r.y,
                    z: r.z,
                    weight: parse_rat(&format!("{}/{}", r.weight_num, r.weight_den))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut table = std::collections::HashMap::new();
        for r in &self.predicate {
            if table
                .insert(((r.x, r.y, r.z), (r.a, r.b, r.c)), r.win)
                .is_some()
            {
                return Err(Error::invalid(format!(
                    "predicate row for ({},{},{})/({},{},{}) listed twice",
                    r.x, r.y, r.z, r.a, r.b, r.c
                )));
            }
        }
        let expected = q_sizes.iter().chain(a_sizes.iter()).map(|&k| k as usize).product::<usize>();
        if table.len() != expected {
            return Err(Error::invalid(format!(
                "predicate covers {} of {} question-answer combinations",
                table.len(),
                expected
            )));
        }
        Game::new(q_sizes, a_sizes, support, |q, a| table[&(q, a)])
    }

    fn from_game(g: &Game) -> GameFile {
        let mut predicate = Vec::new();
        for x in 0..g.q_sizes[0] {
            for y in 0..g.q_sizes[1] {
                for z in 0..g.q_sizes[2] {
                    for a in 0..g.a_sizes[0] {
                        for b in 0..g.a_sizes[1] {
                            for c in 0..g.a_sizes[2] {
                                predicate.push(PredicateRow {
                                    x,
                                    y,
                                    z,
                                    a,
                                    b,
                                    c,
                                    win: g.win((x, y, z), (a, b, c)),
                                });
                            }
                        }
                    }
                }
            }
        }
        GameFile {
            alphabets: AlphabetsFile {
                x: g.q_sizes[0],
                y: g.q_sizes[1],
                z: g.q_sizes[2],
                a: g.a_sizes[0],
                b: g.a_sizes[1],
                c: g.a_sizes[2],
            },
            query: g
                .support
                .iter()
                .map(|p| QueryRow {
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    weight_num: *p.weight.numer() as i64,
                    weight_den: *p.weight.denom() as i64,
                })
                .collect(),
            predicate,
        }
    }

    fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("game files serialize")
    }
}
