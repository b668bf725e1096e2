//! Exact finitely-supported probability distributions.

use num::{One, Signed, Zero};

use crate::rat::{to_f64, Rat};
use crate::{Error, Result};

/// A probability distribution with finite support and exact rational
/// weights. Invariants: support sorted and duplicate-free, every weight
/// strictly positive, weights sum to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDistribution<K: Ord + Clone> {
    support: Vec<(K, Rat)>,
}

impl<K: Ord + Clone> FiniteDistribution<K> {
    /// Builds from weighted points. Duplicate keys are merged by addition,
    /// zero weights dropped; negative weights or a total different from 1
    /// are errors.
    pub fn from_weighted(pairs: impl IntoIterator<Item = (K, Rat)>) -> Result<Self> {
        let mut support: Vec<(K, Rat)> = pairs.into_iter().collect();
        support.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(K, Rat)> = Vec::with_capacity(support.len());
        for (k, w) in support {
            if w.is_negative() {
                return Err(Error::invalid("negative weight in distribution"));
            }
            match merged.last_mut() {
                Some((lk, lw)) if *lk == k => *lw += w,
                _ => merged.push((k, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        let total: Rat = merged.iter().map(|(_, w)| *w).sum();
        if total != Rat::one() {
            return Err(Error::invalid(format!(
                "distribution weights sum to {}/{} instead of 1",
                total.numer(),
                total.denom()
            )));
        }
        Ok(FiniteDistribution { support: merged })
    }

    pub fn uniform_on(keys: impl IntoIterator<Item = K>) -> Result<Self> {
        let mut keys: Vec<K> = keys.into_iter().collect();
        keys.sort();
        keys.dedup();
        if keys.is_empty() {
            return Err(Error::Empty("uniform distribution on empty support"));
        }
        let w = Rat::new(1, keys.len() as i128);
        Ok(FiniteDistribution {
            support: keys.into_iter().map(|k| (k, w)).collect(),
        })
    }

    pub fn point_mass(k: K) -> Self {
        FiniteDistribution {
            support: vec![(k, Rat::one())],
        }
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rat)> {
        self.support.iter().map(|(k, w)| (k, w))
    }

    pub fn weight_of(&self, k: &K) -> Rat {
        match self.support.binary_search_by(|(sk, _)| sk.cmp(k)) {
            Ok(i) => self.support[i].1,
            Err(_) => Rat::zero(),
        }
    }

    /// Exact `sum_k |p(k) - q(k)|` over the union of supports.
    pub fn l1_distance(&self, other: &FiniteDistribution<K>) -> Rat {
        let mut total = Rat::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.support.len() || j < other.support.len() {
            let cmp = match (self.support.get(i), other.support.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match cmp {
                std::cmp::Ordering::Less => {
                    total += self.support[i].1;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    total += other.support[j].1;
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    total += (self.support[i].1 - other.support[j].1).abs();
                    i += 1;
                    j += 1;
                }
            }
        }
        total
    }

    /// Exact `sum_k p(k)^2`.
    pub fn l2_norm_sq(&self) -> Rat {
        self.support.iter().map(|(_, w)| w * w).sum()
    }

    /// Shannon entropy in bits, as a float; `0 log 0 = 0` by support
    /// construction (zero weights never enter the support).
    pub fn entropy_bits(&self) -> f64 {
        -self
            .support
            .iter()
            .map(|(_, w)| {
                let p = to_f64(w);
                p * p.log2()
            })
            .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn uniform_and_point_mass() {
        let u = FiniteDistribution::uniform_on([3u32, 1, 2, 2]).unwrap();
        assert_eq!(u.support_size(), 3);
        assert_eq!(u.weight_of(&2), rat(1, 3));
        assert_eq!(u.weight_of(&9), rat(0, 1));
        let p = FiniteDistribution::point_mass(5u32);
        assert_eq!(p.l1_distance(&p), rat(0, 1));
        assert_eq!(p.l2_norm_sq(), rat(1, 1));
    }

    #[test]
    fn from_weighted_validates_total() {
        assert!(FiniteDistribution::from_weighted([(0u8, rat(1, 2))]).is_err());
        assert!(
            FiniteDistribution::from_weighted([(0u8, rat(1, 2)), (1, rat(-1, 2)), (2, rat(1, 1))])
                .is_err()
        );
        let d =
            FiniteDistribution::from_weighted([(0u8, rat(1, 4)), (0, rat(1, 4)), (1, rat(1, 2))])
                .unwrap();
        assert_eq!(d.support_size(), 2);
        assert_eq!(d.weight_of(&0), rat(1, 2));
    }

    #[test]
    fn l1_distance_exact_cases() {
        let a = FiniteDistribution::uniform_on(0u32..4).unwrap();
        let b = FiniteDistribution::uniform_on(2u32..6).unwrap();
        // Disjoint halves contribute 1/4 each: 2/4 + 2/4 = 1.
        assert_eq!(a.l1_distance(&b), rat(1, 1));
        assert_eq!(b.l1_distance(&a), rat(1, 1));
        let c = FiniteDistribution::uniform_on(0u32..2).unwrap();
        // |1/2-1/4|*2 + 1/4*2 = 1.
        assert_eq!(a.l1_distance(&c), rat(1, 1));
    }

    #[test]
    fn l2_and_entropy() {
        let u = FiniteDistribution::uniform_on(0u32..8).unwrap();
        assert_eq!(u.l2_norm_sq(), rat(1, 8));
        assert!((u.entropy_bits() - 3.0).abs() < 1e-12);
        let p = FiniteDistribution::point_mass(0u32);
        assert_eq!(p.entropy_bits(), 0.0);
    }
}
