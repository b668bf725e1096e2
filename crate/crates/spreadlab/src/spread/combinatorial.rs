//! Combinatorial spreadness of bipartite relations: no large combinatorial
//! rectangle may carry mean noticeably above the global mean.
//!
//! A relation on `X x Y` is `(r, eps)`-spread when every nonempty rectangle
//! `S x T` with `|S| |T| 2^r >= |X| |Y|` has mean at most `(1 + eps)` times
//! the global mean. For fixed `S` the top-`t` column average is nonincreasing
//! in `t`, so only the smallest admissible `t` per `|S|` needs checking.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SpreadParams;
use crate::f2::F2Set;
use crate::rat::{rat, Rat};
use crate::{Budgets, Error, Result};

/// Dense 0/1 matrix with labeled rows and columns, rows packed in u64 words.
#[derive(Debug, Clone)]
pub struct BipartiteRelation {
    nr: u32,
    nc: u32,
    words_per_row: u32,
    bits: Vec<u64>,
    ones: u64,
    row_labels: Vec<u32>,
    col_labels: Vec<u32>,
}

impl BipartiteRelation {
    pub fn from_fn(
        row_labels: Vec<u32>,
        col_labels: Vec<u32>,
        mut f: impl FnMut(u32, u32) -> bool,
    ) -> Result<Self> {
        let nr = row_labels.len() as u32;
        let nc = col_labels.len() as u32;
        if nr == 0 || nc == 0 {
            return Err(Error::Empty("relation with no rows or no columns"));
        }
        let wpr = nc.div_ceil(64);
        let mut bits = vec![0u64; (nr * wpr) as usize];
        let mut ones = 0u64;
        for i in 0..nr {
            for j in 0..nc {
                if f(row_labels[i as usize], col_labels[j as usize]) {
                    bits[(i * wpr + j / 64) as usize] |= 1 << (j % 64);
                    ones += 1;
                }
            }
        }
        Ok(BipartiteRelation {
            nr,
            nc,
            words_per_row: wpr,
            bits,
            ones,
            row_labels,
            col_labels,
        })
    }

    pub fn nrows(&self) -> u32 {
        self.nr
    }

    pub fn ncols(&self) -> u32 {
        self.nc
    }

    pub fn ones(&self) -> u64 {
        self.ones
    }

    pub fn density(&self) -> Rat {
        rat(self.ones as i128, self.nr as i128 * self.nc as i128)
    }

    pub fn get(&self, i: u32, j: u32) -> bool {
        debug_assert!(i < self.nr && j < self.nc);
        self.bits[(i * self.words_per_row + j / 64) as usize] >> (j % 64) & 1 == 1
    }

    pub fn row_label(&self, i: u32) -> u32 {
        self.row_labels[i as usize]
    }

    pub fn col_label(&self, j: u32) -> u32 {
        self.col_labels[j as usize]
    }

    fn row(&self, i: u32) -> &[u64] {
        let w = self.words_per_row as usize;
        &self.bits[i as usize * w..(i as usize + 1) * w]
    }

    pub fn row_sum(&self, i: u32) -> u64 {
        self.row(i).iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn transpose(&self) -> Self {
        let wpr = self.nr.div_ceil(64);
        let mut bits = vec![0u64; (self.nc * wpr) as usize];
        for i in 0..self.nr {
            for j in 0..self.nc {
                if self.get(i, j) {
                    bits[(j * wpr + i / 64) as usize] |= 1 << (i % 64);
                }
            }
        }
        BipartiteRelation {
            nr: self.nc,
            nc: self.nr,
            words_per_row: wpr,
            bits,
            ones: self.ones,
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
        }
    }

    /// Number of ones inside the rectangle given by row and column indices.
    pub fn rectangle_sum(&self, rows: &[u32], cols: &[u32]) -> u64 {
        let tmask = self.col_mask(cols);
        rows.iter().map(|&i| self.row_sum_masked(i, &tmask)).sum()
    }

    fn col_mask(&self, cols: &[u32]) -> Vec<u64> {
        let mut mask = vec![0u64; self.words_per_row as usize];
        for &j in cols {
            mask[(j / 64) as usize] |= 1 << (j % 64);
        }
        mask
    }

    fn row_sum_masked(&self, i: u32, tmask: &[u64]) -> u64 {
        self.row(i)
            .iter()
            .zip(tmask)
            .map(|(w, m)| (w & m).count_ones() as u64)
            .sum()
    }

    fn col_sums_restricted(&self, rows: &[u32]) -> Vec<u64> {
        let mut sums = vec![0u64; self.nc as usize];
        for &i in rows {
            for (wi, &w) in self.row(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let j = wi * 64 + w.trailing_zeros() as usize;
                    sums[j] += 1;
                    w &= w - 1;
                }
            }
        }
        sums
    }
}

/// Relation `x_i R y_j <=> x_i + y_j in z` on the member lists of the sets.
pub fn sum_set_relation(
    x: &F2Set,
    y: &F2Set,
    z: &F2Set,
    budgets: &Budgets,
) -> Result<BipartiteRelation> {
    if x.ambient_dim() != y.ambient_dim() || y.ambient_dim() != z.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: x.ambient_dim(),
            right: if x.ambient_dim() != y.ambient_dim() {
                y.ambient_dim()
            } else {
                z.ambient_dim()
            },
        });
    }
    let cells = x.size() as u128 * y.size() as u128;
    if cells > budgets.max_pair_bits as u128 {
        return Err(Error::budget("sum-set relation cells", cells, budgets.max_pair_bits as u128));
    }
    let rows: Vec<u32> = x.iter().collect();
    let cols: Vec<u32> = y.iter().collect();
    BipartiteRelation::from_fn(rows, cols, |a, b| z.contains(a ^ b))
}

/// Rectangle witness: sorted row and column index lists into the relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rectangle {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CombMethod {
    /// Alternating maximization per admissible rectangle shape. Sound on
    /// failure (the witness is checked), may miss violations.
    Greedy,
    /// Every row subset via Gray-code updates; limited to 16 rows.
    Exhaustive,
    /// Random row subsets with best-response columns.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct CombinatorialVerdict {
    pub passed: bool,
    /// Max of (rectangle mean / global mean) over examined rectangles.
    pub observed_ratio: Rat,
    pub witness: Option<Rectangle>,
    pub exhaustive: bool,
}

#[derive(Debug, Clone)]
pub struct MarginalVerdict {
    pub passed: bool,
    /// Rows whose mean falls strictly below `(1 - eps)` times the global mean.
    pub bad_rows: Vec<u32>,
    pub bad_fraction: Rat,
}

/// Smallest column count admissible for a row subset of size `s`, or None
/// when even all columns are too few.
fn t_min(nr: u32, nc: u32, r: u32, s: u64) -> Option<u64> {
    let cells = nr as u128 * nc as u128;
    let t = if r >= 64 {
        1
    } else {
        let denom = (s as u128) << r;
        (cells.div_ceil(denom)).max(1)
    };
    (t <= nc as u128).then_some(t as u64)
}

/// Indices of the `k` largest sums, ties to the smaller index, returned sorted.
fn top_k(sums: &[u64], k: usize) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..sums.len() as u32).collect();
    idx.sort_by(|&a, &b| {
        sums[b as usize]
            .cmp(&sums[a as usize])
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Sum of the `t` largest values (selection, not full sort).
fn top_t_sum(sums: &[u64], t: usize) -> u64 {
    debug_assert!(t >= 1 && t <= sums.len());
    let mut buf = sums.to_vec();
    buf.select_nth_unstable_by(t - 1, |a, b| b.cmp(a));
    buf[..t].iter().sum()
}

struct RectScan<'a> {
    rel: &'a BipartiteRelation,
    p: u128,
    q: u128,
    best_scaled: (u128, u128),
    best_rect: Option<(u64, Rectangle)>,
    violation: Option<Rectangle>,
}

impl<'a> RectScan<'a> {
    fn new(rel: &'a BipartiteRelation, eps: &Rat) -> Self {
        RectScan {
            rel,
            p: *eps.numer() as u128,
            q: *eps.denom() as u128,
            best_scaled: (0, 1),
            best_rect: None,
            violation: None,
        }
    }

    /// Record a rectangle with the given sum; ratio compared as
    /// sum * nr * nc / (s * t * ones), first maximum kept.
    fn offer(&mut self, sum: u64, s: u64, t: u64, rect: impl FnOnce() -> Rectangle) {
        let cells = self.rel.nr as u128 * self.rel.nc as u128;
        let num = sum as u128 * cells;
        let den = s as u128 * t as u128 * self.rel.ones as u128;
        let better = num * self.best_scaled.1 > self.best_scaled.0 * den;
        let violated = num * self.q > (self.q + self.p) * den;
        if better || (violated && self.violation.is_none()) {
            let r = rect();
            if better {
                self.best_scaled = (num, den);
                self.best_rect = Some((sum, r.clone()));
            }
            if violated && self.violation.is_none() {
                self.violation = Some(r);
            }
        }
    }

    fn finish(self, exhaustive: bool) -> CombinatorialVerdict {
        let passed = self.best_scaled.0 * self.q <= (self.q + self.p) * self.best_scaled.1;
        let witness = if passed {
            None
        } else {
            // Prefer the max-ratio rectangle as the reported witness.
            self.best_rect.map(|(_, r)| r).or(self.violation)
        };
        CombinatorialVerdict {
            passed,
            observed_ratio: rat(self.best_scaled.0 as i128, self.best_scaled.1 as i128),
            witness,
            exhaustive,
        }
    }
}

fn greedy_rectangle(
    rel: &BipartiteRelation,
    s: u64,
    t: u64,
    start_rows: Vec<u32>,
) -> (u64, Rectangle) {
    let mut rows = start_rows;
    let mut cols = top_k(&rel.col_sums_restricted(&rows), t as usize);
    let mut sum = rel.rectangle_sum(&rows, &cols);
    for _ in 0..32 {
        let tmask = rel.col_mask(&cols);
        let rsums: Vec<u64> = (0..rel.nr).map(|i| rel.row_sum_masked(i, &tmask)).collect();
        let new_rows = top_k(&rsums, s as usize);
        let new_cols = top_k(&rel.col_sums_restricted(&new_rows), t as usize);
        let new_sum = rel.rectangle_sum(&new_rows, &new_cols);
        if new_sum <= sum {
            break;
        }
        rows = new_rows;
        cols = new_cols;
        sum = new_sum;
    }
    (sum, Rectangle { rows, cols })
}

/// Check `(r, eps)`-spreadness of a relation over admissible rectangles.
///
/// Greedy and sampled verdicts are one-sided: a reported violation is real
/// (the witness sum is exact), a pass is only as strong as the search.
pub fn check_combinatorial_spread(
    rel: &BipartiteRelation,
    params: &SpreadParams,
    method: CombMethod,
) -> Result<CombinatorialVerdict> {
    if rel.ones == 0 {
        return Ok(CombinatorialVerdict {
            passed: true,
            observed_ratio: rat(0, 1),
            witness: None,
            exhaustive: matches!(method, CombMethod::Exhaustive),
        });
    }
    let mut scan = RectScan::new(rel, &params.eps);
    match method {
        CombMethod::Greedy => {
            let full_rsums: Vec<u64> = (0..rel.nr).map(|i| rel.row_sum(i)).collect();
            let all_rows: Vec<u32> = (0..rel.nr).collect();
            let full_csums = rel.col_sums_restricted(&all_rows);
            for s in 1..=rel.nr as u64 {
                let Some(t) = t_min(rel.nr, rel.nc, params.r, s) else {
                    continue;
                };
                // Two starts: strongest rows overall, and the rows that best
                // answer the strongest columns overall.
                let start_a = top_k(&full_rsums, s as usize);
                let heavy_cols = top_k(&full_csums, t as usize);
                let cmask = rel.col_mask(&heavy_cols);
                let rsums_b: Vec<u64> =
                    (0..rel.nr).map(|i| rel.row_sum_masked(i, &cmask)).collect();
                let start_b = top_k(&rsums_b, s as usize);
                for start in [start_a, start_b] {
                    let (sum, rect) = greedy_rectangle(rel, s, t, start);
                    scan.offer(sum, s, t, || rect);
                }
            }
            Ok(scan.finish(false))
        }
        CombMethod::Exhaustive => {
            if rel.nr > 16 {
                return Err(Error::budget(
                    "exhaustive rectangle enumeration rows",
                    1u128 << rel.nr,
                    1 << 16,
                ));
            }
            let mut colsums = vec![0i64; rel.nc as usize];
            let mut members: Vec<u32> = Vec::with_capacity(rel.nr as usize);
            for i in 1u32..1 << rel.nr {
                let bit = i.trailing_zeros();
                let g = i ^ (i >> 1);
                let on = g >> bit & 1 == 1;
                for (wi, &w) in rel.row(bit).iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let j = wi * 64 + w.trailing_zeros() as usize;
                        colsums[j] += if on { 1 } else { -1 };
                        w &= w - 1;
                    }
                }
                let s = g.count_ones() as u64;
                let Some(t) = t_min(rel.nr, rel.nc, params.r, s) else {
                    continue;
                };
                let usums: Vec<u64> = colsums.iter().map(|&v| v as u64).collect();
                let sum = top_t_sum(&usums, t as usize);
                scan.offer(sum, s, t, || {
                    members.clear();
                    members.extend((0..rel.nr).filter(|&b| g >> b & 1 == 1));
                    Rectangle {
                        rows: members.clone(),
                        cols: top_k(&usums, t as usize),
                    }
                });
            }
            Ok(scan.finish(true))
        }
        CombMethod::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let s = sample(&mut rng, rel.nr as usize, 1).index(0) as u64 + 1;
                let Some(t) = t_min(rel.nr, rel.nc, params.r, s) else {
                    continue;
                };
                let mut rows: Vec<u32> = sample(&mut rng, rel.nr as usize, s as usize)
                    .iter()
                    .map(|v| v as u32)
                    .collect();
                rows.sort_unstable();
                let csums = rel.col_sums_restricted(&rows);
                let cols = top_k(&csums, t as usize);
                let sum = rel.rectangle_sum(&rows, &cols);
                scan.offer(sum, s, t, || Rectangle { rows, cols });
            }
            Ok(scan.finish(false))
        }
    }
}

/// Left-marginal spreadness: at most a `2^-r` fraction of rows may have
/// mean strictly below `(1 - eps)` times the global mean.
pub fn check_left_marginals(rel: &BipartiteRelation, r: u32, eps: &Rat) -> MarginalVerdict {
    let p = *eps.numer() as i128;
    let q = *eps.denom() as i128;
    let bad_rows: Vec<u32> = (0..rel.nr)
        .filter(|&i| {
            let lhs = rel.row_sum(i) as i128 * rel.nr as i128 * q;
            lhs < (q - p) * rel.ones as i128
        })
        .collect();
    let bad = bad_rows.len() as u128;
    let passed = if r >= 64 {
        bad == 0 || (rel.nr as u128) >= bad << 64.min(r)
    } else {
        bad << r <= rel.nr as u128
    };
    MarginalVerdict {
        passed,
        bad_fraction: rat(bad as i128, rel.nr as i128),
        bad_rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::{convolution_inner_product, diagonal_pair_count, F2Set};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(r: u32, num: i128, den: i128) -> SpreadParams {
        SpreadParams::new(r, rat(num, den)).unwrap()
    }

    fn random_rel(nr: u32, nc: u32, num: u64, den: u64, seed: u64) -> BipartiteRelation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BipartiteRelation::from_fn(
            (0..nr).collect(),
            (0..nc).collect(),
            |_, _| rng.random_range(0..den) < num,
        )
        .unwrap()
    }

    #[test]
    fn sum_set_relation_matches_pair_count_and_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let x = F2Set::random_density(6, 1, 2, &mut rng).unwrap();
            let y = F2Set::random_density(6, 1, 3, &mut rng).unwrap();
            let z = F2Set::random_density(6, 2, 3, &mut rng).unwrap();
            if x.is_empty() || y.is_empty() || z.is_empty() {
                continue;
            }
            let rel = sum_set_relation(&x, &y, &z, &Budgets::default()).unwrap();
            assert_eq!(rel.ones(), diagonal_pair_count(&x, &y, &z).unwrap());
            let conv = convolution_inner_product(&x, &y, &z).unwrap();
            assert_eq!(rel.density(), conv * z.density());
        }
    }

    #[test]
    fn block_matrix_exhaustive_witness() {
        // Ones exactly on {0,1} x {0,1} in a 4x4 matrix.
        let rel = BipartiteRelation::from_fn(
            (0..4).collect(),
            (0..4).collect(),
            |i, j| i < 2 && j < 2,
        )
        .unwrap();
        let v = check_combinatorial_spread(&rel, &params(2, 1, 1), CombMethod::Exhaustive).unwrap();
        assert!(!v.passed);
        assert_eq!(v.observed_ratio, rat(4, 1));
        let w = v.witness.unwrap();
        assert_eq!(w.rows, vec![0, 1]);
        assert_eq!(w.cols, vec![0, 1]);
        assert!(v.exhaustive);
    }

    #[test]
    fn planted_rectangle_found_by_greedy_and_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let prows = [2u32, 3, 5, 7];
        let pcols = [1u32, 4, 6, 10];
        let rel = BipartiteRelation::from_fn((0..16).collect(), (0..16).collect(), |i, j| {
            (prows.contains(&i) && pcols.contains(&j)) || rng.random_range(0..8u32) == 0
        })
        .unwrap();
        let pr = params(4, 1, 1);
        let g = check_combinatorial_spread(&rel, &pr, CombMethod::Greedy).unwrap();
        let e = check_combinatorial_spread(&rel, &pr, CombMethod::Exhaustive).unwrap();
        assert!(!g.passed && !e.passed);
        assert!(g.observed_ratio <= e.observed_ratio);
        // Witness soundness: recompute the rectangle sum and the inequality.
        for v in [&g, &e] {
            let w = v.witness.as_ref().unwrap();
            let sum = rel.rectangle_sum(&w.rows, &w.cols);
            let s = w.rows.len() as u128;
            let t = w.cols.len() as u128;
            assert!(s * t * (1 << pr.r) >= rel.nrows() as u128 * rel.ncols() as u128);
            assert!(
                sum as u128 * rel.nrows() as u128 * rel.ncols() as u128
                    > 2 * s * t * rel.ones() as u128
            );
        }
    }

    #[test]
    fn all_ones_passes_everywhere() {
        let rel = BipartiteRelation::from_fn((0..8).collect(), (0..8).collect(), |_, _| true)
            .unwrap();
        for method in [CombMethod::Greedy, CombMethod::Exhaustive] {
            let v = check_combinatorial_spread(&rel, &params(6, 1, 10), method).unwrap();
            assert!(v.passed);
            assert_eq!(v.observed_ratio, rat(1, 1));
        }
    }

    #[test]
    fn empty_relation_trivially_passes() {
        let rel =
            BipartiteRelation::from_fn((0..4).collect(), (0..4).collect(), |_, _| false).unwrap();
        let v = check_combinatorial_spread(&rel, &params(2, 1, 2), CombMethod::Exhaustive).unwrap();
        assert!(v.passed);
        assert_eq!(v.observed_ratio, rat(0, 1));
    }

    #[test]
    fn greedy_never_beats_exhaustive_and_never_lies() {
        for seed in 0..8 {
            let rel = random_rel(12, 10, 1, 3, seed);
            if rel.ones() == 0 {
                continue;
            }
            for pr in [params(2, 1, 2), params(3, 1, 1), params(5, 1, 4)] {
                let g = check_combinatorial_spread(&rel, &pr, CombMethod::Greedy).unwrap();
                let e = check_combinatorial_spread(&rel, &pr, CombMethod::Exhaustive).unwrap();
                assert!(g.observed_ratio <= e.observed_ratio);
                if e.passed {
                    assert!(g.passed, "greedy reported a violation the exhaustive scan refutes");
                }
            }
        }
    }

    #[test]
    fn sampled_is_deterministic_and_below_exhaustive() {
        let rel = random_rel(14, 14, 1, 2, 77);
        let pr = params(3, 1, 2);
        let m = CombMethod::Sampled { samples: 300, seed: 5 };
        let a = check_combinatorial_spread(&rel, &pr, m).unwrap();
        let b = check_combinatorial_spread(&rel, &pr, m).unwrap();
        assert_eq!(a.observed_ratio, b.observed_ratio);
        let e = check_combinatorial_spread(&rel, &pr, CombMethod::Exhaustive).unwrap();
        assert!(a.observed_ratio <= e.observed_ratio);
    }

    #[test]
    fn exhaustive_row_guard() {
        let rel = random_rel(17, 4, 1, 2, 1);
        assert!(matches!(
            check_combinatorial_spread(&rel, &params(2, 1, 2), CombMethod::Exhaustive),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn left_marginals_boundary() {
        // 256 rows, 4 columns, all ones except one all-zero row. The bad-row
        // fraction is exactly 2^-8: passes at r = 8, fails at r = 9.
        let rel = BipartiteRelation::from_fn(
            (0..256).collect(),
            (0..4).collect(),
            |i, _| i != 7,
        )
        .unwrap();
        let half = rat(1, 2);
        let v8 = check_left_marginals(&rel, 8, &half);
        assert!(v8.passed);
        assert_eq!(v8.bad_rows, vec![7]);
        assert_eq!(v8.bad_fraction, rat(1, 256));
        let v9 = check_left_marginals(&rel, 9, &half);
        assert!(!v9.passed);
    }

    #[test]
    fn left_marginals_threshold_is_strict() {
        // Rows at exactly (1 - eps) times the mean are not bad.
        // Row means 1/2 and 1, global mean 3/4, eps = 1/3: cutoff is 1/2.
        let rel = BipartiteRelation::from_fn(
            (0..4).collect(),
            (0..4).collect(),
            |i, j| i >= 2 || j < 2,
        )
        .unwrap();
        let v = check_left_marginals(&rel, 0, &rat(1, 3));
        assert!(v.bad_rows.is_empty());
        assert!(v.passed);
    }

    #[test]
    fn transpose_involution() {
        let rel = random_rel(9, 13, 1, 2, 3);
        let tt = rel.transpose().transpose();
        assert_eq!(tt.nrows(), rel.nrows());
        assert_eq!(tt.ncols(), rel.ncols());
        for i in 0..rel.nrows() {
            for j in 0..rel.ncols() {
                assert_eq!(tt.get(i, j), rel.get(i, j));
            }
        }
        assert_eq!(rel.transpose().ones(), rel.ones());
    }

    fn quarter_density_sum_set() -> BipartiteRelation {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = F2Set::random_density(8, 1, 4, &mut rng).unwrap();
        let full = F2Set::full(8).unwrap();
        sum_set_relation(&full, &full, &z, &Budgets::default()).unwrap()
    }

    #[test]
    fn random_sum_set_relation_is_spread_under_sampling() {
        // A random quarter-density shift set induces a relation on the
        // full 256x256 grid whose rectangle means hug the global mean.
        let rel = quarter_density_sum_set();
        let v = check_combinatorial_spread(
            &rel,
            &params(2, 1, 2),
            CombMethod::Sampled {
                samples: 10_000,
                seed: 3,
            },
        )
        .unwrap();
        assert!(v.passed, "ratio {}", v.observed_ratio);
        assert!(!v.exhaustive);
    }

    #[test]
    fn random_sum_set_relation_has_lower_bounded_marginals() {
        // Every row mean of the shift relation equals |Z| hits out of 256
        // columns, so no row falls 25% below the global mean.
        let rel = quarter_density_sum_set();
        let v = check_left_marginals(&rel, 4, &rat(1, 4));
        assert!(v.passed, "bad fraction {}", v.bad_fraction);
        assert!(v.bad_rows.is_empty());
    }
}
