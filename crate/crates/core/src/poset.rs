//! Ordered tuples of filtration levels and pivot sets.
//!
//! Levels are `1..=t`, where `t = s + 1` stands for the whole sheaf `E`.
//! A tuple `i` is *below* `j` (written `i ⋞ j`) when `i_l ≥ j_l` for every
//! coordinate: small levels are deep inside the filtration, so `(1, …, 1)` is
//! the top element and `(t, …, t)` the bottom. The nonzero entries of the
//! matrix of `φ` form a down-set, determined by its maximal elements, the
//! pivots.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::{Error, Result};

/// Nondecreasing tuple of levels, e.g. `(1, 1, 4, 4)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedTuple(Vec<usize>);

impl OrderedTuple {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::UnsortedTuple(entries));
        }
        if let Some(&0) = entries.first() {
            return Err(Error::LevelOutOfRange {
                level: 0,
                max: usize::MAX,
            });
        }
        Ok(Self(entries))
    }

    /// Sorts arbitrary entries into an ordered tuple.
    pub fn sorted(mut entries: Vec<usize>) -> Result<Self> {
        entries.sort_unstable();
        Self::new(entries)
    }

    pub fn constant(level: usize, arity: usize) -> Self {
        Self(vec![level; arity])
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of coordinates at or below each level `1..=s`: `counts[l-1] = #{j : p_j ≤ l}`.
    /// These are the coefficients of the tuple's weight functional.
    pub fn level_counts(&self, s: usize) -> Vec<usize> {
        (1..=s)
            .map(|l| self.0.iter().filter(|&&e| e <= l).count())
            .collect()
    }

    /// `self ⋞ other`.
    pub fn is_below(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for OrderedTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleRelation {
    /// First argument is `⋞` the second.
    Below,
    /// Second argument is `⋞` the first.
    Above,
    Equal,
    Incomparable,
}

pub fn tuple_cmp(i: &OrderedTuple, j: &OrderedTuple) -> Result<TupleRelation> {
    if i.arity() != j.arity() {
        return Err(Error::ArityMismatch {
            expected: i.arity(),
            got: j.arity(),
        });
    }
    let mut below = true;
    let mut above = true;
    for (a, b) in i.0.iter().zip(&j.0) {
        match a.cmp(b) {
            Ordering::Less => below = false,
            Ordering::Greater => above = false,
            Ordering::Equal => {}
        }
    }
    Ok(match (below, above) {
        (true, true) => TupleRelation::Equal,
        (true, false) => TupleRelation::Below,
        (false, true) => TupleRelation::Above,
        (false, false) => TupleRelation::Incomparable,
    })
}

/// All ordered `arity`-tuples over `1..=t`, in lexicographic order.
pub fn ordered_tuples(arity: usize, t: usize) -> Vec<OrderedTuple> {
    let mut out = Vec::new();
    if t == 0 {
        return out;
    }
    let mut cur = vec![1usize; arity];
    loop {
        out.push(OrderedTuple(cur.clone()));
        // advance the rightmost coordinate that can still grow
        let Some(pos) = (0..arity).rev().find(|&p| cur[p] < t) else {
            break;
        };
        let v = cur[pos] + 1;
        for c in &mut cur[pos..] {
            *c = v;
        }
    }
    out
}

/// `binom(arity + t - 1, arity)`, saturating at `usize::MAX`.
pub fn ordered_tuple_count(arity: usize, t: usize) -> usize {
    if t == 0 {
        return usize::from(arity == 0);
    }
    let n = arity + t - 1;
    let k = arity.min(t - 1);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn check_tuple(p: &OrderedTuple, t: usize, arity: usize) -> Result<()> {
    if p.arity() != arity {
        return Err(Error::ArityMismatch {
            expected: arity,
            got: p.arity(),
        });
    }
    if let Some(&bad) = p.0.iter().find(|&&e| e < 1 || e > t) {
        return Err(Error::LevelOutOfRange { level: bad, max: t });
    }
    Ok(())
}

/// Nonempty antichain of pivots over levels `1..=t`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PivotSet {
    t: usize,
    arity: usize,
    pivots: Vec<OrderedTuple>,
}

impl PivotSet {
    /// Keeps the `⋞`-maximal elements of `raw`; dominated tuples are dropped.
    pub fn new(
        t: usize,
        arity: usize,
        raw: impl IntoIterator<Item = OrderedTuple>,
    ) -> Result<Self> {
        if t == 0 || arity == 0 {
            return Err(Error::InvalidArgument(format!(
                "need t ≥ 1 and arity ≥ 1, got t={t}, a={arity}"
            )));
        }
        let raw: BTreeSet<OrderedTuple> = raw.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::EmptyPivots);
        }
        for p in &raw {
            check_tuple(p, t, arity)?;
        }
        let pivots = raw
            .iter()
            .filter(|p| !raw.iter().any(|q| q != *p && p.is_below(q)))
            .cloned()
            .collect();
        Ok(Self { t, arity, pivots })
    }

    pub fn from_vecs(t: usize, arity: usize, raw: &[Vec<usize>]) -> Result<Self> {
        let tuples = raw
            .iter()
            .map(|v| OrderedTuple::new(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(t, arity, tuples)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn pivots(&self) -> &[OrderedTuple] {
        &self.pivots
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Whether `φ` survives on the tuple, i.e. it lies below some pivot.
    pub fn contains_below(&self, tuple: &OrderedTuple) -> bool {
        self.pivots.iter().any(|p| tuple.is_below(p))
    }

    pub fn is_antichain(&self) -> bool {
        self.pivots.iter().enumerate().all(|(i, p)| {
            self.pivots[i + 1..]
                .iter()
                .all(|q| matches!(tuple_cmp(p, q), Ok(TupleRelation::Incomparable)))
        })
    }
}

impl fmt::Display for PivotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.pivots.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

pub fn normalize_pivots(
    raw: impl IntoIterator<Item = OrderedTuple>,
    t: usize,
    arity: usize,
) -> Result<PivotSet> {
    PivotSet::new(t, arity, raw)
}

/// The full 0/1 table of `φ` over every ordered tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotTable {
    t: usize,
    arity: usize,
    entries: BTreeMap<OrderedTuple, bool>,
}

impl PivotTable {
    /// Builds a table from a predicate evaluated on every ordered tuple.
    pub fn from_fn(t: usize, arity: usize, mut f: impl FnMut(&OrderedTuple) -> bool) -> Self {
        let entries = ordered_tuples(arity, t).into_iter().map(|k| {
            let v = f(&k);
            (k, v)
        });
        Self {
            t,
            arity,
            entries: entries.collect(),
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, tuple: &OrderedTuple) -> bool {
        self.entries.get(tuple).copied().unwrap_or(false)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&OrderedTuple, bool)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn ones(&self) -> impl Iterator<Item = &OrderedTuple> {
        self.entries.iter().filter(|(_, &v)| v).map(|(k, _)| k)
    }
}

pub fn matrix_from_pivots(ps: &PivotSet) -> PivotTable {
    PivotTable::from_fn(ps.t, ps.arity, |k| ps.contains_below(k))
}

pub fn pivots_from_matrix(table: &PivotTable) -> Result<PivotSet> {
    let ones: Vec<&OrderedTuple> = table.ones().collect();
    if ones.is_empty() {
        return Err(Error::ZeroTable);
    }
    // closure under covering steps (raise one coordinate by one) is enough
    for tuple in &ones {
        for pos in 0..table.arity {
            let e = tuple.0[pos];
            let next_ok = pos + 1 == table.arity || tuple.0[pos + 1] > e;
            if e < table.t && next_ok {
                let mut lower = tuple.0.clone();
                lower[pos] += 1;
                let lower = OrderedTuple(lower);
                if !table.get(&lower) {
                    return Err(Error::NotDownwardClosed(format!(
                        "{tuple} is set but {lower} is not"
                    )));
                }
            }
        }
    }
    PivotSet::new(table.t, table.arity, ones.into_iter().cloned())
}

/// Induced pivots on the subfiltration that keeps the step indices in `keep`.
///
/// Each coordinate is rounded up to the nearest retained level (the full sheaf
/// at `t` is always retained), then levels are renumbered `1..=|keep|+1`.
pub fn project_pivots(ps: &PivotSet, keep: &[usize]) -> Result<PivotSet> {
    let s = ps.t - 1;
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "kept indices must be strictly increasing: {keep:?}"
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k < 1 || k > s) {
        return Err(Error::LevelOutOfRange { level: bad, max: s });
    }
    let new_t = keep.len() + 1;
    let relabel = |level: usize| match keep.iter().position(|&k| k >= level) {
        Some(pos) => pos + 1,
        None => new_t,
    };
    let projected = ps
        .pivots
        .iter()
        .map(|p| OrderedTuple(p.0.iter().map(|&e| relabel(e)).collect()));
    PivotSet::new(new_t, ps.arity, projected)
}
