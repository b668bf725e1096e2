//! Affine subspaces of `F2^n` in a canonical reduced echelon form.
//!
//! The basis is kept fully reduced with pivots (lowest set bits) strictly
//! increasing, and the offset has every pivot bit cleared. Two values are
//! equal as structs exactly when they are equal as point sets, so derived
//! `Eq`/`Hash`/`Ord` are semantic.

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::vector::check_dim;
use crate::rat::Rat;
use crate::{Error, Result};
use num::bigint::BigUint;
use num::ToPrimitive;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineSubspace {
    n: u32,
    offset: u32,
    basis: Vec<u32>,
}

#[inline]
fn pivot(v: u32) -> u32 {
    debug_assert!(v != 0);
    v.trailing_zeros()
}

impl AffineSubspace {
    /// The affine hull `offset + span(vecs)`. Dependent or zero vectors in
    /// `vecs` are absorbed, so this never fails on a valid ambient.
    pub fn span(n: u32, offset: u32, vecs: &[u32]) -> Result<Self> {
        check_dim(n)?;
        let limit = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if offset & !limit != 0 {
            return Err(Error::invalid(format!("offset {offset:#x} outside F2^{n}")));
        }
        let mut basis: Vec<u32> = Vec::new();
        for &raw in vecs {
            if raw & !limit != 0 {
                return Err(Error::invalid(format!("vector {raw:#x} outside F2^{n}")));
            }
            let mut v = raw;
            for &b in &basis {
                if (v >> pivot(b)) & 1 == 1 {
                    v ^= b;
                }
            }
            if v == 0 {
                continue;
            }
            let p = pivot(v);
            for b in &mut basis {
                if (*b >> p) & 1 == 1 {
                    *b ^= v;
                }
            }
            let pos = basis.partition_point(|b| pivot(*b) < p);
            basis.insert(pos, v);
        }
        let mut off = offset;
        for &b in &basis {
            if (off >> pivot(b)) & 1 == 1 {
                off ^= b;
            }
        }
        Ok(AffineSubspace {
            n,
            offset: off,
            basis,
        })
    }

    /// Like `span`, but rejects dependent input instead of absorbing it.
    pub fn from_basis(n: u32, offset: u32, basis: &[u32]) -> Result<Self> {
        let s = Self::span(n, offset, basis)?;
        if s.dim() as usize != basis.len() {
            return Err(Error::invalid(format!(
                "basis of {} vectors has rank {}",
                basis.len(),
                s.dim()
            )));
        }
        Ok(s)
    }

    pub fn full_space(n: u32) -> Result<Self> {
        let basis: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
        Self::span(n, 0, &basis)
    }

    pub fn single_point(n: u32, v: u32) -> Result<Self> {
        Self::span(n, v, &[])
    }

    /// Uniform-ish random subspace for tests and negative controls: `dim`
    /// random independent directions plus a random offset.
    pub fn random(n: u32, dim: u32, rng: &mut impl Rng) -> Result<Self> {
        check_dim(n)?;
        if dim > n {
            return Err(Error::invalid(format!("dim {dim} exceeds ambient {n}")));
        }
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut vecs = Vec::new();
        loop {
            let cand = Self::span(n, rng.random::<u32>() & mask, &vecs)?;
            if cand.dim() == dim {
                return Ok(cand);
            }
            vecs.push(rng.random::<u32>() & mask);
        }
    }

    pub fn ambient_dim(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    pub fn size(&self) -> u64 {
        1u64 << self.dim()
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn is_linear(&self) -> bool {
        self.offset == 0
    }

    /// The linear part (same basis, zero offset).
    pub fn direction(&self) -> AffineSubspace {
        AffineSubspace {
            n: self.n,
            offset: 0,
            basis: self.basis.clone(),
        }
    }

    /// Canonical representative of `v + direction`: `v` with every pivot
    /// bit eliminated. Members of the same coset reduce identically.
    pub fn reduce_mod_direction(&self, v: u32) -> u32 {
        let mut v = v;
        for &b in &self.basis {
            if (v >> pivot(b)) & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    pub fn contains(&self, v: u32) -> bool {
        self.reduce_mod_direction(v ^ self.offset) == 0
    }

    /// Is `other` a subset of `self`?
    pub fn contains_subspace(&self, other: &AffineSubspace) -> bool {
        self.n == other.n
            && self.contains(other.offset)
            && other
                .basis
                .iter()
                .all(|&b| self.reduce_mod_direction(b) == 0)
    }

    /// The point with coordinate vector `u` in the basis.
    #[inline]
    pub fn point_from_coords(&self, u: u32) -> u32 {
        let mut v = self.offset;
        let mut rem = u;
        while rem != 0 {
            let j = rem.trailing_zeros();
            rem &= rem - 1;
            v ^= self.basis[j as usize];
        }
        v
    }

    /// Coordinates of a member, or None for non-members. Pivot bits of
    /// `v ^ offset` read the coordinates directly off an echelon basis.
    pub fn coords_of(&self, v: u32) -> Option<u32> {
        let rel = v ^ self.offset;
        let mut u = 0u32;
        for (j, &b) in self.basis.iter().enumerate() {
            if (rel >> pivot(b)) & 1 == 1 {
                u |= 1 << j;
            }
        }
        if self.point_from_coords(u) == v {
            Some(u)
        } else {
            None
        }
    }

    /// All points, in Gray-code order (each step XORs one basis vector).
    pub fn points(&self) -> PointIter<'_> {
        PointIter {
            space: self,
            idx: 0,
            total: self.size(),
            current: self.offset,
        }
    }

    /// Density of `self` inside the full space.
    pub fn ambient_density(&self) -> Rat {
        Rat::new(1, 1i128 << (self.n - self.dim()))
    }

    /// Representatives of the cosets of a linear `w` that partition `self`.
    /// Requires `w` linear with `w <= direction(self)`. Representatives are
    /// canonical (reduced mod `w`) and sorted.
    pub fn coset_decompose(&self, w: &AffineSubspace) -> Result<Vec<u32>> {
        if !w.is_linear() {
            return Err(Error::invalid("coset_decompose needs a linear subspace"));
        }
        if w.n != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: w.n,
            });
        }
        let dir = self.direction();
        if !dir.contains_subspace(w) {
            return Err(Error::invalid(
                "coset_decompose: w is not inside the direction space",
            ));
        }
        // Complement of w inside direction(self): reduce our basis mod w,
        // re-echelonize the survivors.
        let reduced: Vec<u32> = self
            .basis
            .iter()
            .map(|&b| w.reduce_mod_direction(b))
            .collect();
        let comp = AffineSubspace::span(self.n, 0, &reduced)?;
        debug_assert_eq!(comp.dim(), self.dim() - w.dim());
        let mut reps: Vec<u32> = (0..comp.size())
            .map(|u| w.reduce_mod_direction(comp.point_from_coords(u as u32) ^ self.offset))
            .collect();
        reps.sort_unstable();
        reps.dedup();
        debug_assert_eq!(reps.len() as u64, comp.size());
        Ok(reps)
    }
}

pub struct PointIter<'a> {
    space: &'a AffineSubspace,
    idx: u64,
    total: u64,
    current: u32,
}

impl Iterator for PointIter<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.idx >= self.total {
            return None;
        }
        let out = self.current;
        self.idx += 1;
        if self.idx < self.total {
            // Gray transition: flip the basis vector at the lowest bit that
            // changes between consecutive Gray codes, which is tz(idx).
            let j = self.idx.trailing_zeros() as usize;
            self.current ^= self.space.basis[j];
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.total - self.idx) as usize;
        (rem, Some(rem))
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    n: u32,
    offset: u32,
    basis: Vec<u32>,
}

impl Serialize for AffineSubspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr {
            n: self.n,
            offset: self.offset,
            basis: self.basis.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AffineSubspace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SubspaceRepr::deserialize(deserializer)?;
        AffineSubspace::from_basis(repr.n, repr.offset, &repr.basis).map_err(D::Error::custom)
    }
}

/// Number of `r`-dimensional subspaces of `F2^d`, i.e. the Gaussian
/// binomial `[d choose r]_2`, exactly.
pub fn gaussian_binomial(d: u32, r: u32) -> u128 {
    if r > d {
        return 0;
    }
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..r {
        num *= (BigUint::from(1u32) << (d - i)) - 1u32;
        den *= (BigUint::from(1u32) << (r - i)) - 1u32;
    }
    (num / den)
        .to_u128()
        .expect("gaussian binomial exceeds u128 at desk scale")
}

/// Number of affine subspaces of codimension `r` inside a `d`-dimensional
/// space: one direction per dual `r`-subspace, times `2^r` shifts.
pub fn count_affine_subspaces(d: u32, r: u32) -> u128 {
    gaussian_binomial(d, r) << r
}

/// Enumerates the reduced-echelon bases of all `r`-dimensional subspaces of
/// the dual space `F2^d`; each item is the `r` constraint functionals. Every
/// codim-`r` direction inside a `d`-dimensional space is produced exactly
/// once.
pub struct DualConstraintIter {
    d: u32,
    r: u32,
    pivots: Vec<u32>,
    /// Free cells (row, column), fixed order; `counter` odometers over them.
    free_cells: Vec<(u32, u32)>,
    counter: u64,
    done: bool,
}

impl DualConstraintIter {
    pub fn new(d: u32, r: u32) -> Self {
        let done = r > d;
        let pivots: Vec<u32> = (0..r.min(d)).collect();
        let mut it = DualConstraintIter {
            d,
            r,
            pivots,
            free_cells: Vec::new(),
            counter: 0,
            done,
        };
        if !it.done {
            it.recompute_free_cells();
        }
        it
    }

    fn recompute_free_cells(&mut self) {
        self.free_cells.clear();
        for (i, &p) in self.pivots.iter().enumerate() {
            for c in (p + 1)..self.d {
                if !self.pivots.contains(&c) {
                    let _ = i;
                    self.free_cells.push((i as u32, c));
                }
            }
        }
        self.counter = 0;
    }

    fn advance_pivots(&mut self) -> bool {
        // Next combination of r pivot columns out of d, lexicographic.
        let r = self.r as usize;
        if r == 0 {
            return false;
        }
        let mut i = r;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if self.pivots[i] < self.d - (r as u32 - i as u32) {
                self.pivots[i] += 1;
                for j in (i + 1)..r {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                return true;
            }
        }
    }
}

impl Iterator for DualConstraintIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        if self.r == 0 {
            self.done = true;
            return Some(Vec::new());
        }
        let mut rows = vec![0u32; self.r as usize];
        for (i, &p) in self.pivots.iter().enumerate() {
            rows[i] = 1 << p;
        }
        for (k, &(row, col)) in self.free_cells.iter().enumerate() {
            if (self.counter >> k) & 1 == 1 {
                rows[row as usize] |= 1 << col;
            }
        }
        self.counter += 1;
        if self.counter >= (1u64 << self.free_cells.len()) {
            if !self.advance_pivots() {
                self.done = true;
            } else {
                self.recompute_free_cells();
            }
        }
        Some(rows)
    }
}

/// The affine subspace of `v` cut out by dual constraints: points whose
/// `v`-coordinates `u` satisfy `<rows[i], u> = b_i` for all `i`. Rows must
/// be echelon output from `DualConstraintIter` over `d = v.dim()`.
pub fn subspace_from_constraints(
    v: &AffineSubspace,
    rows: &[u32],
    b: u32,
) -> Result<AffineSubspace> {
    let d = v.dim();
    let r = rows.len() as u32;
    let mut pivots = Vec::with_capacity(rows.len());
    for &row in rows {
        if row == 0 || (d < 32 && row >> d != 0) {
            return Err(Error::invalid("constraint row outside dual space"));
        }
        pivots.push(pivot(row));
    }
    // Null-space basis in coordinates: one vector per free column.
    let mut dir_coords = Vec::with_capacity((d - r) as usize);
    for f in 0..d {
        if pivots.contains(&f) {
            continue;
        }
        let mut u = 1u32 << f;
        for (i, &row) in rows.iter().enumerate() {
            if (row >> f) & 1 == 1 {
                u |= 1 << pivots[i];
            }
        }
        dir_coords.push(u);
    }
    // Particular solution: pivot coordinates carry b.
    let mut u0 = 0u32;
    for (i, &p) in pivots.iter().enumerate() {
        if (b >> i) & 1 == 1 {
            u0 |= 1 << p;
        }
    }
    let offset = v.point_from_coords(u0);
    let dirs: Vec<u32> = dir_coords
        .iter()
        .map(|&u| v.point_from_coords(u) ^ v.offset())
        .collect();
    AffineSubspace::from_basis(v.ambient_dim(), offset, &dirs)
}

/// All affine subspaces of `v` with codimension exactly `codim`, canonical
/// and deduplicated by construction, sorted.
pub fn enumerate_affine_subspaces(
    v: &AffineSubspace,
    codim: u32,
    max_subspaces: u64,
) -> Result<Vec<AffineSubspace>> {
    let d = v.dim();
    if codim > d {
        return Ok(Vec::new());
    }
    let total = count_affine_subspaces(d, codim);
    if total > max_subspaces as u128 {
        return Err(Error::budget(
            format!("enumerate codim-{codim} subspaces of a dim-{d} space"),
            total,
            max_subspaces as u128,
        ));
    }
    let mut out = Vec::with_capacity(total as usize);
    for rows in DualConstraintIter::new(d, codim) {
        for b in 0..(1u32 << codim) {
            out.push(subspace_from_constraints(v, &rows, b)?);
        }
    }
    out.sort_unstable();
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}
