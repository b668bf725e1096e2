//! Entropy bookkeeping and reference tail bounds: the binary-entropy gap,
//! marginal distances of a conditioned triple distribution, Chernoff
//! references for the concentration experiments, and the prefix-removal
//! distance between uniform distributions.
//!
//! Entropies are doubles (they feed inequalities with slack); l1 distances
//! are exact rationals (they feed identities).

use num::BigRational;
use rand::Rng;

use crate::bits::{coord_mask_word, Bitset};
use crate::rat::{rat, to_big, to_f64, Rat};
use crate::{Error, Result};

/// Largest ambient dimension for triple sets: the cube then has 2^30
/// triples, one bit each.
pub const MAX_TRIPLE_DIM: u32 = 10;

/// A subset of cube^3 for an n-bit cube, one bit per triple (x, y, w).
/// The random variables (X, Y, W) below are always uniform on the set.
#[derive(Debug, Clone)]
pub struct TripleSet {
    n: u32,
    bits: Bitset,
}

impl TripleSet {
    pub fn empty(n: u32) -> Result<TripleSet> {
        if n == 0 || n > MAX_TRIPLE_DIM {
            return Err(Error::invalid(format!(
                "triple-set dimension {n} outside 1..={MAX_TRIPLE_DIM}"
            )));
        }
        Ok(TripleSet {
            n,
            bits: Bitset::new(1usize << (3 * n)),
        })
    }

    /// The full cube: every triple present.
    pub fn full(n: u32) -> Result<TripleSet> {
        let mut t = TripleSet::empty(n)?;
        for i in 0..t.bits.len() {
            t.bits.set(i);
        }
        Ok(t)
    }

    /// Independent Bernoulli(num/den) membership per triple.
    pub fn random_density(n: u32, num: u64, den: u64, rng: &mut impl Rng) -> Result<TripleSet> {
        if den == 0 || num > den {
            return Err(Error::invalid(format!(
                "density {num}/{den} is not in [0, 1]"
            )));
        }
        let mut t = TripleSet::empty(n)?;
        for i in 0..t.bits.len() {
            if rng.random_range(0..den) < num {
                t.bits.set(i);
            }
        }
        Ok(t)
    }

    pub fn ambient_dim(&self) -> u32 {
        self.n
    }

    fn index(&self, x: u32, y: u32, w: u32) -> usize {
        debug_assert!(x >> self.n == 0 && y >> self.n == 0 && w >> self.n == 0);
        (((x as usize) << self.n | y as usize) << self.n) | w as usize
    }

    pub fn insert(&mut self, x: u32, y: u32, w: u32) {
        let i = self.index(x, y, w);
        self.bits.set(i);
    }

    pub fn contains(&self, x: u32, y: u32, w: u32) -> bool {
        self.bits.get(self.index(x, y, w))
    }

    pub fn count(&self) -> u64 {
        self.bits.count_ones()
    }

    /// Per-pair counts over the whole set: cnt[xy] is the number of w with
    /// (x, y, w) present, coord[i][xy] the number of those with bit i of w
    /// set. The w-range of one pair is contiguous (w varies fastest), so
    /// both are masked popcounts.
    fn pair_counts(&self) -> (Vec<u32>, Vec<Vec<u32>>) {
        let n = self.n;
        let pairs = 1usize << (2 * n);
        let mut cnt = vec![0u32; pairs];
        let mut coord = vec![vec![0u32; pairs]; n as usize];
        let words = self.bits.words();
        for xy in 0..pairs {
            if n >= 6 {
                let per_run = 1usize << (n - 6);
                let start = xy << (n - 6);
                for k in 0..per_run {
                    let wd = words[start + k];
                    cnt[xy] += wd.count_ones();
                    for i in 0..n {
                        coord[i as usize][xy] +=
                            (wd & coord_mask_word(i, k)).count_ones();
                    }
                }
            } else {
                let base = xy << n;
                let chunk = (words[base >> 6] >> (base & 63)) & ((1u64 << (1 << n)) - 1);
                cnt[xy] = chunk.count_ones();
                for i in 0..n {
                    coord[i as usize][xy] = (chunk & coord_mask_word(i, 0)).count_ones();
                }
            }
        }
        (cnt, coord)
    }
}

/// Per-coordinate distances between the (X, Y) marginal conditioned on
/// `bit i of W = 1` and the unconditioned marginal.
#[derive(Debug, Clone)]
pub struct ConditionalMarginalReport {
    /// ||P_{X,Y | W_i = 1} - P_{X,Y}||_1, None where Pr[W_i = 1] = 0.
    pub per_i: Vec<Option<Rat>>,
    /// Mean over coordinates with positive conditional mass; 0 when none
    /// qualify. Big rationals: the per-coordinate denominators share no
    /// common factor and their least common multiple outgrows i128.
    pub mean: BigRational,
    /// Coordinates excluded from the mean for lack of mass.
    pub zero_mass: Vec<u32>,
    pub triple_count: u64,
}

/// Exact marginal distances of the uniform distribution on a triple set.
///
/// For each coordinate, the distance is sum over (x, y) of
/// |c_i(x,y)/m_i - c(x,y)/M| with per-pair counts c and conditioned counts
/// c_i; the common-denominator form m_i M stays well inside i128.
pub fn conditional_marginal_report(t: &TripleSet) -> Result<ConditionalMarginalReport> {
    let total = t.count();
    if total == 0 {
        return Err(Error::Empty("conditional marginals of an empty triple set"));
    }
    let n = t.ambient_dim();
    let (cnt, coord) = t.pair_counts();
    let mut per_i: Vec<Option<Rat>> = Vec::with_capacity(n as usize);
    let mut zero_mass = Vec::new();
    let mut sum = BigRational::from_integer(0.into());
    let mut with_mass = 0i64;
    for i in 0..n {
        let ci = &coord[i as usize];
        let mi: u64 = ci.iter().map(|&c| c as u64).sum();
        if mi == 0 {
            zero_mass.push(i);
            per_i.push(None);
            continue;
        }
        let mut num = 0i128;
        for (c, c1) in cnt.iter().zip(ci) {
            num += (*c1 as i128 * total as i128 - *c as i128 * mi as i128).abs();
        }
        let d = rat(num, mi as i128 * total as i128);
        sum += to_big(&d);
        with_mass += 1;
        per_i.push(Some(d));
    }
    let mean = if with_mass == 0 {
        sum
    } else {
        sum / BigRational::from_integer(with_mass.into())
    };
    Ok(ConditionalMarginalReport {
        per_i,
        mean,
        zero_mass,
        triple_count: total,
    })
}

/// Entropies of the uniform distribution on a triple set, in bits.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    pub n: u32,
    pub triple_count: u64,
    /// H(X, Y, W) = log2 of the triple count.
    pub entropy: f64,
    pub h_x: f64,
    pub h_xy: f64,
    /// H(W | X, Y) = H(X, Y, W) - H(X, Y).
    pub h_w_given_xy: f64,
    /// H(W_i | X, Y) per coordinate.
    pub h_wi_given_xy: Vec<f64>,
}

/// 0 log 0 = 0.
fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    -plogp(p) - plogp(1.0 - p)
}

/// Joint, marginal, and per-coordinate conditional entropies of the uniform
/// distribution on a triple set.
pub fn entropy_report(t: &TripleSet) -> Result<EntropyReport> {
    let total = t.count();
    if total == 0 {
        return Err(Error::Empty("entropies of an empty triple set"));
    }
    let n = t.ambient_dim();
    let (cnt, coord) = t.pair_counts();
    let m = total as f64;
    let entropy = m.log2();
    let h_xy = -cnt.iter().map(|&c| plogp(c as f64 / m)).sum::<f64>();
    let mut x_mass = vec![0u64; 1 << n];
    for (xy, &c) in cnt.iter().enumerate() {
        x_mass[xy >> n] += c as u64;
    }
    let h_x = -x_mass.iter().map(|&c| plogp(c as f64 / m)).sum::<f64>();
    let h_wi_given_xy = (0..n as usize)
        .map(|i| {
            cnt.iter()
                .zip(&coord[i])
                .filter(|(c, _)| **c > 0)
                .map(|(&c, &c1)| (c as f64 / m) * binary_entropy(c1 as f64 / c as f64))
                .sum()
        })
        .collect();
    Ok(EntropyReport {
        n,
        triple_count: total,
        entropy,
        h_x,
        h_xy,
        h_w_given_xy: entropy - h_xy,
        h_wi_given_xy,
    })
}

/// Both sides of |p - 1/2|^2 <= 1 - H(p): the squared bias and the entropy
/// gap. The caller compares them.
pub fn binary_entropy_gap(p: &Rat) -> Result<(f64, f64)> {
    if *p < rat(0, 1) || *p > rat(1, 1) {
        return Err(Error::invalid(format!(
            "probability {}/{} outside [0, 1]",
            p.numer(),
            p.denom()
        )));
    }
    let bias = *p - rat(1, 2);
    let lhs = to_f64(&(bias * bias));
    let rhs = 1.0 - binary_entropy(to_f64(p));
    Ok((lhs, rhs))
}

/// Multiplicative Chernoff references for a sum of n independent Bernoulli
/// variables with mean mu: Pr[S <= (1-d) mu n] <= e^{-d^2 mu n / 2} and
/// Pr[S >= (1+d) mu n] <= e^{-d^2 mu n / 3}.
pub fn chernoff_reference(n: u32, mu: &Rat, delta: &Rat) -> Result<(f64, f64)> {
    if *mu <= rat(0, 1) || *mu > rat(1, 1) {
        return Err(Error::invalid("mean outside (0, 1]"));
    }
    if *delta <= rat(0, 1) || *delta >= rat(1, 1) {
        return Err(Error::invalid("deviation outside (0, 1)"));
    }
    let exponent = to_f64(&(delta * delta * mu)) * n as f64;
    Ok(((-exponent / 2.0).exp(), (-exponent / 3.0).exp()))
}

/// l1 distance between the uniform distribution on n outcomes and the
/// uniform distribution on the last n - t of them: exactly 2t/n.
pub fn uniform_prefix_distance(n: u64, t: u64) -> Result<Rat> {
    if n == 0 || t >= n {
        return Err(Error::invalid(format!(
            "prefix length {t} must be below the support size {n}"
        )));
    }
    Ok(rat(2 * t as i128, n as i128))
}
