//! Deterministic player strategies for repeated games.
//!
//! A player maps an n-tuple of base questions to an n-tuple of base
//! answers; both tuples travel as mixed-radix indices (digit i holds
//! coordinate i, least significant first). Maps over domains too large to
//! tabulate are carried as keyed pseudorandom functions or per-coordinate
//! rules instead of tables.

use std::collections::BTreeMap;

use crate::prf::{child_seed, splitmix64};
use crate::{Error, Result};

/// Evaluation context: repetitions and per-coordinate alphabet sizes of
/// the player's own question and answer alphabets.
#[derive(Debug, Clone, Copy)]
pub struct PlayerCtx {
    pub n: u32,
    pub q_size: u32,
    pub a_size: u32,
}

impl PlayerCtx {
    pub fn question_count(&self) -> Option<u64> {
        (self.q_size as u64).checked_pow(self.n)
    }

    pub fn answer_count(&self) -> Option<u64> {
        (self.a_size as u64).checked_pow(self.n)
    }
}

/// One player's map from question tuples to answer tuples.
#[derive(Debug, Clone)]
pub enum PlayerMap {
    /// Explicit table: entry q is the full answer index for question q.
    Table(Vec<u64>),
    /// A base-game table applied independently to every coordinate.
    PerCoord(Vec<u32>),
    /// Keyed pseudorandom map: deterministic, domain never materialized.
    Seeded(u64),
    /// The same answer tuple for every question.
    Constant(u64),
    /// A base map with point overrides, the form hill-climbing produces.
    Patched {
        base: Box<PlayerMap>,
        patches: BTreeMap<u64, u64>,
    },
}

impl PlayerMap {
    pub fn answer(&self, q: u64, ctx: &PlayerCtx) -> Result<u64> {
        let a_count = ctx
            .answer_count()
            .ok_or_else(|| Error::invalid("answer tuple space overflows u64"))?;
        match self {
            PlayerMap::Table(t) => t.get(q as usize).copied().ok_or_else(|| {
                Error::invalid(format!(
                    "strategy table has {} entries but question index is {q}",
                    t.len()
                ))
            }),
            PlayerMap::PerCoord(t) => {
                if t.len() != ctx.q_size as usize {
                    return Err(Error::invalid(format!(
                        "per-coordinate table has {} entries for alphabet {}",
                        t.len(),
                        ctx.q_size
                    )));
                }
                let mut q = q;
                let mut out = 0u64;
                let mut place = 1u64;
                for _ in 0..ctx.n {
                    let digit = t[(q % ctx.q_size as u64) as usize] as u64;
                    if digit >= ctx.a_size as u64 {
                        return Err(Error::invalid("per-coordinate answer outside alphabet"));
                    }
                    out += digit * place;
                    place *= ctx.a_size as u64;
                    q /= ctx.q_size as u64;
                }
                Ok(out)
            }
            PlayerMap::Seeded(seed) => {
                let mut state = child_seed(*seed, q);
                if ctx.a_size == 2 && ctx.n <= 64 {
                    let word = splitmix64(&mut state);
                    let mask = if ctx.n == 64 { u64::MAX } else { (1 << ctx.n) - 1 };
                    return Ok(word & mask);
                }
                let mut out = 0u64;
                let mut place = 1u64;
                for _ in 0..ctx.n {
                    out += (splitmix64(&mut state) % ctx.a_size as u64) * place;
                    place *= ctx.a_size as u64;
                }
                Ok(out)
            }
            PlayerMap::Constant(a) => {
                if *a >= a_count {
                    return Err(Error::invalid("constant answer outside the tuple space"));
                }
                Ok(*a)
            }
            PlayerMap::Patched { base, patches } => match patches.get(&q) {
                Some(&a) => Ok(a),
                None => base.answer(q, ctx),
            },
        }
    }
}

/// A full deterministic strategy: one map per player, in x, y, z order.
#[derive(Debug, Clone)]
pub struct Strategy {
    pub maps: [PlayerMap; 3],
}

impl Strategy {
    pub fn new(f: PlayerMap, g: PlayerMap, h: PlayerMap) -> Strategy {
        Strategy { maps: [f, g, h] }
    }

    /// Three explicit tables.
    pub fn tables(f: Vec<u64>, g: Vec<u64>, h: Vec<u64>) -> Strategy {
        Strategy::new(PlayerMap::Table(f), PlayerMap::Table(g), PlayerMap::Table(h))
    }

    /// Three keyed pseudorandom maps with per-player child seeds.
    pub fn seeded(master: u64) -> Strategy {
        Strategy::new(
            PlayerMap::Seeded(child_seed(master, 0)),
            PlayerMap::Seeded(child_seed(master, 1)),
            PlayerMap::Seeded(child_seed(master, 2)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BIN4: PlayerCtx = PlayerCtx {
        n: 4,
        q_size: 2,
        a_size: 2,
    };

    #[test]
    fn table_map_indexes_directly() {
        let t = PlayerMap::Table(vec![3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3]);
        assert_eq!(t.answer(0, &BIN4).unwrap(), 3);
        assert_eq!(t.answer(5, &BIN4).unwrap(), 9);
        assert!(t.answer(16, &BIN4).is_err());
    }

    #[test]
    fn per_coord_map_applies_the_base_table_digitwise() {
        // Base table: negation on bits.
        let m = PlayerMap::PerCoord(vec![1, 0]);
        assert_eq!(m.answer(0b0000, &BIN4).unwrap(), 0b1111);
        assert_eq!(m.answer(0b1010, &BIN4).unwrap(), 0b0101);
        // Ternary questions to binary answers: digit -> digit mod 2.
        let ctx = PlayerCtx {
            n: 2,
            q_size: 3,
            a_size: 2,
        };
        let m = PlayerMap::PerCoord(vec![0, 1, 0]);
        // Question 5 = digits (2, 1): answers (0, 1) = index 2.
        assert_eq!(m.answer(5, &ctx).unwrap(), 2);
        assert!(m.answer(0, &BIN4).is_err());
    }

    #[test]
    fn seeded_map_is_deterministic_and_seed_sensitive() {
        let a = PlayerMap::Seeded(7);
        let b = PlayerMap::Seeded(8);
        let ctx = PlayerCtx {
            n: 40,
            q_size: 2,
            a_size: 2,
        };
        let q = 0x12_3456_789A;
        assert_eq!(a.answer(q, &ctx).unwrap(), a.answer(q, &ctx).unwrap());
        assert_ne!(a.answer(q, &ctx).unwrap(), b.answer(q, &ctx).unwrap());
        assert!(a.answer(q, &ctx).unwrap() < (1 << 40));
        // The wide-alphabet path also stays inside the tuple space.
        let ctx3 = PlayerCtx {
            n: 5,
            q_size: 3,
            a_size: 3,
        };
        assert!(a.answer(100, &ctx3).unwrap() < 3u64.pow(5));
    }

    #[test]
    fn constant_and_patched_maps() {
        let c = PlayerMap::Constant(0b1100);
        assert_eq!(c.answer(7, &BIN4).unwrap(), 0b1100);
        assert!(PlayerMap::Constant(16).answer(0, &BIN4).is_err());
        let mut patches = BTreeMap::new();
        patches.insert(7u64, 0b0001u64);
        let p = PlayerMap::Patched {
            base: Box::new(c),
            patches,
        };
        assert_eq!(p.answer(7, &BIN4).unwrap(), 0b0001);
        assert_eq!(p.answer(6, &BIN4).unwrap(), 0b1100);
    }
}
