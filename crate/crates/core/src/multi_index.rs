//! Multi-indices counting derivative orders per independent variable.

use std::cmp::Ordering;
use std::fmt;

/// Largest number of independent variables supported.
pub const MAX_DIM: usize = 6;

/// A multi-index `(α₁,…,α_n)` of non-negative derivative counts.
///
/// Ordered graded-lexicographically: first by total order `|α|`, then so that
/// a larger count in an earlier direction sorts first (`u_x < u_t` for the
/// base order `x, t`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    len: u8,
    entries: [u8; MAX_DIM],
}

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_DIM, "at most {MAX_DIM} independent variables");
        MultiIndex {
            len: n as u8,
            entries: [0; MAX_DIM],
        }
    }

    pub fn from_slice(entries: &[u8]) -> Self {
        let mut m = Self::zero(entries.len());
        m.entries[..entries.len()].copy_from_slice(entries);
        m
    }

    /// `1_i`, the unit multi-index in direction `i` (0-based).
    pub fn unit(n: usize, i: usize) -> Self {
        Self::zero(n).incremented(i)
    }

    pub fn dim(&self) -> usize {
        self.len as usize
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries[..self.len as usize]
    }

    pub fn get(&self, i: usize) -> u8 {
        self.entries()[i]
    }

    /// `|α| = Σ α_i`.
    pub fn order(&self) -> u32 {
        self.entries().iter().map(|&e| e as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|&e| e == 0)
    }

    /// `α + 1_i`.
    pub fn incremented(mut self, i: usize) -> Self {
        assert!(i < self.dim(), "direction {i} out of range");
        self.entries[i] = self.entries[i].checked_add(1).expect("derivative order overflow");
        self
    }

    /// `α − 1_i`, or `None` when `α_i = 0`.
    pub fn decremented(mut self, i: usize) -> Option<Self> {
        let e = self.entries.get_mut(i).filter(|_| i < self.len as usize)?;
        *e = e.checked_sub(1)?;
        Some(self)
    }

    /// Componentwise `α ≤ β`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim()
            && self
                .entries()
                .iter()
                .zip(other.entries())
                .all(|(a, b)| a <= b)
    }

    /// `β − α` when `α ≤ β` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<Self> {
        if !other.divides(self) {
            return None;
        }
        let mut m = *self;
        for i in 0..self.dim() {
            m.entries[i] -= other.entries[i];
        }
        Some(m)
    }

    /// Componentwise maximum (least common multiple of the derivatives).
    pub fn join(&self, other: &MultiIndex) -> Self {
        assert_eq!(self.dim(), other.dim());
        let mut m = *self;
        for i in 0..self.dim() {
            m.entries[i] = m.entries[i].max(other.entries[i]);
        }
        m
    }

    /// Smallest direction with a nonzero count.
    pub fn first_direction(&self) -> Option<usize> {
        self.entries().iter().position(|&e| e > 0)
    }

    /// Largest direction with a nonzero count.
    pub fn last_direction(&self) -> Option<usize> {
        self.entries().iter().rposition(|&e| e > 0)
    }

    /// Directions listed with repetition, e.g. `(2,1) ↦ [0,0,1]`.
    pub fn directions(&self) -> Vec<usize> {
        self.entries()
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
            .collect()
    }

    /// Every multi-index of dimension `n` with `|α| ≤ max_order`, in ascending order.
    pub fn all_up_to(n: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(n)];
        let mut frontier = vec![MultiIndex::zero(n)];
        for _ in 0..max_order {
            let mut next = Vec::new();
            for m in &frontier {
                for i in 0..n {
                    let c = m.incremented(i);
                    if !next.contains(&c) {
                        next.push(c);
                    }
                }
            }
            out.extend(next.iter().copied());
            frontier = next;
        }
        out.sort();
        out
    }
}

impl std::ops::Add for MultiIndex {
    type Output = MultiIndex;
    fn add(mut self, rhs: MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), rhs.dim());
        for i in 0..self.dim() {
            self.entries[i] += rhs.entries[i];
        }
        self
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.order().cmp(&other.order()))
            .then_with(|| other.entries().cmp(self.entries()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries())
    }
}
