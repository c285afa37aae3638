//! Cost vectors, the dominance relations between them, and per-node
//! Pareto frontiers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Largest supported number of cost criteria.
pub const MAX_DIM: usize = 8;

/// A `d`-dimensional nonnegative integer cost.
///
/// Components beyond `dim` are kept at zero so that equality and hashing on
/// the whole struct agree with equality on the active components.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CostVector {
    dim: u8,
    comps: [u64; MAX_DIM],
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CostError {
    #[error("cost dimension {0} is outside 1..={MAX_DIM}")]
    BadDimension(usize),
    #[error("cost accumulation overflowed")]
    Overflow,
}

impl CostVector {
    pub fn zero(dim: usize) -> Result<Self, CostError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(CostError::BadDimension(dim));
        }
        Ok(CostVector { dim: dim as u8, comps: [0; MAX_DIM] })
    }

    pub fn from_slice(values: &[u64]) -> Result<Self, CostError> {
        let mut v = Self::zero(values.len())?;
        v.comps[..values.len()].copy_from_slice(values);
        Ok(v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn as_slice(&self) -> &[u64] {
        &self.comps[..self.dim as usize]
    }

    /// Componentwise sum, `None` on overflow.
    #[inline]
    pub fn checked_add(&self, other: &CostVector) -> Option<CostVector> {
        assert_eq!(self.dim, other.dim, "cost dimension mismatch");
        let mut out = *self;
        for i in 0..self.dim() {
            out.comps[i] = self.comps[i].checked_add(other.comps[i])?;
        }
        Some(out)
    }

    pub fn try_add(&self, other: &CostVector) -> Result<CostVector, CostError> {
        self.checked_add(other).ok_or(CostError::Overflow)
    }

    /// Sum of all components (saturating; used only as a sort key).
    pub fn component_sum(&self) -> u64 {
        self.as_slice().iter().fold(0u64, |a, &b| a.saturating_add(b))
    }
}

impl std::ops::Index<usize> for CostVector {
    type Output = u64;
    fn index(&self, i: usize) -> &u64 {
        &self.as_slice()[i]
    }
}

impl Ord for CostVector {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.dim, other.dim, "cost dimension mismatch");
        self.as_slice().cmp(other.as_slice())
    }
}

impl PartialOrd for CostVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.as_slice().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// `x ≤ y` componentwise and `x ≠ y`.
#[inline]
pub fn dominates(x: &CostVector, y: &CostVector) -> bool {
    dominates_or_equal(x, y) && x != y
}

/// `x ≤ y` componentwise.
#[inline]
pub fn dominates_or_equal(x: &CostVector, y: &CostVector) -> bool {
    assert_eq!(x.dim, y.dim, "cost dimension mismatch");
    x.as_slice().iter().zip(y.as_slice()).all(|(a, b)| a <= b)
}

/// Strict lexicographic comparison.
#[inline]
pub fn lex_less(x: &CostVector, y: &CostVector) -> bool {
    x.cmp(y) == Ordering::Less
}

/// Pairwise nondominated cost vectors in lexicographically nondecreasing
/// order, stored as one flat array of components.
///
/// For two and three criteria, queries that skip the first component only
/// need the minimal elements of the remaining components, so those are also
/// kept in a sorted staircase and answered in logarithmic time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Frontier {
    /// Zero until the first insertion.
    dim: usize,
    flat: Vec<u64>,
    tails: Option<Staircase>,
}

/// Minimal elements of a set of `(a, b)` pairs: `a` ascending, `b`
/// strictly descending. With `b` unused this is the running minimum of `a`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Staircase {
    steps: BTreeMap<u64, u64>,
}

impl Staircase {
    fn covers(&self, a: u64, b: u64) -> bool {
        self.steps.range(..=a).next_back().is_some_and(|(_, &v)| v <= b)
    }

    fn add(&mut self, a: u64, b: u64) {
        if self.covers(a, b) {
            return;
        }
        let dominated: Vec<u64> = self.steps.range(a..).take_while(|(_, &v)| v >= b).map(|(&k, _)| k).collect();
        for k in dominated {
            self.steps.remove(&k);
        }
        self.steps.insert(a, b);
    }
}

impl Frontier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.flat.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<CostVector> {
        let d = self.dim;
        self.flat.get(i * d..(i + 1) * d).map(|c| CostVector::from_slice(c).expect("stored dimension is valid"))
    }

    pub fn last(&self) -> Option<CostVector> {
        self.len().checked_sub(1).and_then(|i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = CostVector> + '_ {
        (0..self.len()).map(|i| self.get(i).expect("index below len"))
    }

    /// Heap bytes held, counting a staircase step as a `BTreeMap` entry.
    pub fn bytes(&self) -> usize {
        let steps = self.tails.as_ref().map_or(0, |t| t.steps.len() * 3 * std::mem::size_of::<u64>());
        self.flat.capacity() * std::mem::size_of::<u64>() + steps
    }

    fn set_dim(&mut self, v: &CostVector) {
        if self.dim == 0 {
            self.dim = v.dim();
        }
        assert_eq!(self.dim, v.dim(), "cost dimension mismatch");
        match self.dim {
            2 => self.tails.get_or_insert_with(Staircase::default).add(v[1], 0),
            3 => self.tails.get_or_insert_with(Staircase::default).add(v[1], v[2]),
            _ => {}
        }
    }

    /// Appends `v`. Callers guarantee `v` is lex-no-smaller than the last
    /// entry and not dominated-or-equal by any entry.
    pub fn push(&mut self, v: CostVector) {
        self.set_dim(&v);
        debug_assert!(self.last().is_none_or(|l| l <= v));
        self.flat.extend_from_slice(v.as_slice());
    }

    /// Inserts `v` at its lexicographic position.
    pub fn insert(&mut self, v: CostVector) {
        self.set_dim(&v);
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.get(mid).expect("index below len") <= v {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let at = lo * self.dim;
        self.flat.splice(at..at, v.as_slice().iter().copied());
    }

    /// True iff some member is `≤ y` componentwise.
    ///
    /// With `skip_first`, only components `2..d` are compared. This is exact
    /// when every member's first component is at most `y`'s, which holds
    /// whenever queries arrive in lexicographically nondecreasing order.
    pub fn dominates(&self, y: &CostVector, skip_first: bool) -> bool {
        self.dominates_from(0, y, skip_first)
    }

    /// [`Frontier::dominates`] restricted to the members at `start..`.
    pub fn dominates_from(&self, start: usize, y: &CostVector, skip_first: bool) -> bool {
        if self.is_empty() {
            return false;
        }
        assert_eq!(self.dim, y.dim(), "cost dimension mismatch");
        // first components are nondecreasing, so the last entry bounds them all
        debug_assert!(!skip_first || self.flat[self.flat.len() - self.dim] <= y[0]);
        if skip_first && start == 0 {
            if let Some(t) = &self.tails {
                return if self.dim == 2 { t.covers(y[1], 0) } else { t.covers(y[1], y[2]) };
            }
        }
        let flat = &self.flat[(start * self.dim).min(self.flat.len())..];
        let y = &y.comps;
        macro_rules! dispatch {
            ($($d:literal)*) => {
                match (self.dim, skip_first) {
                    $(($d, false) => scan::<$d, 0>(flat, y),
                      ($d, true) => scan::<$d, 1>(flat, y),)*
                    _ => unreachable!("dimension checked on insertion"),
                }
            };
        }
        dispatch!(1 2 3 4 5 6 7 8)
    }
}

// Fixed-width rows let the comparison loop unroll.
#[inline]
fn scan<const D: usize, const SKIP: usize>(flat: &[u64], y: &[u64; MAX_DIM]) -> bool {
    let (rows, _) = flat.as_chunks::<D>();
    rows.iter().any(|row| (SKIP..D).fold(true, |acc, i| acc & (row[i] <= y[i])))
}
