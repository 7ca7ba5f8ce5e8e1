//! Rank-three tensors `φ : E^{⊗3} → O` on the projective line with
//! `E = L_1 ⊕ L_2 ⊕ L_3` split.
//!
//! Such a tensor is recorded by the degrees of the `L_i` and by the set of
//! summands `L_i ⊗ L_j ⊗ L_k` on which `φ` is nonzero. Semistability is
//! decided on the six flags `0 ⊂ L_i ⊂ L_i ⊕ L_j ⊂ E`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;

use crate::arith::Rat;
use crate::filtration::{FiltrationSpec, SheafData, StabilityParam};
use crate::poset::{
    ordered_tuples, pivots_from_matrix, tuple_cmp, OrderedTuple, PivotSet, PivotTable,
    TupleRelation,
};
use crate::stability::{
    check_k_semistable, decide_destabilizing, CheckVerdict, KCheck, Strictness,
};
use crate::{Error, Result};

/// A sorted triple of summand indices in `1..=3`.
pub type Multiset = [usize; 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Tensor {
    pub degrees: [i64; 3],
    pub support: BTreeSet<Multiset>,
    pub delta: Rat,
}

impl P1Tensor {
    /// Sorts each multiset; does not validate.
    pub fn new(
        degrees: [i64; 3],
        support: impl IntoIterator<Item = [usize; 3]>,
        delta: Rat,
    ) -> Self {
        let support = support
            .into_iter()
            .map(|mut m| {
                m.sort_unstable();
                m
            })
            .collect();
        Self {
            degrees,
            support,
            delta,
        }
    }

    fn degree_of(&self, m: &Multiset) -> i64 {
        m.iter().map(|&i| self.degrees[i - 1]).sum()
    }
}

/// Every multiset over `{1, 2, 3}`, in lexicographic order.
pub fn all_multisets() -> Vec<Multiset> {
    let mut out = Vec::with_capacity(10);
    for i in 1..=3 {
        for j in i..=3 {
            for k in j..=3 {
                out.push([i, j, k]);
            }
        }
    }
    out
}

pub fn validate_p1(tensor: &P1Tensor) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidTensor(msg));
    let [d1, d2, d3] = tensor.degrees;
    if !(d1 <= d2 && d2 <= d3) {
        return bad(format!(
            "degrees {:?} must be nondecreasing",
            tensor.degrees
        ));
    }
    if d1 + d2 + d3 != 0 {
        return bad(format!("degrees {:?} must sum to zero", tensor.degrees));
    }
    if !tensor.delta.is_positive() {
        return bad("delta must be positive".into());
    }
    if tensor.support.is_empty() {
        return bad("support must be nonempty".into());
    }
    for m in &tensor.support {
        if m.iter().any(|&i| !(1..=3).contains(&i)) || !m.is_sorted() {
            return bad(format!("{m:?} is not a sorted multiset over 1..=3"));
        }
        let d = tensor.degree_of(m);
        if d > 0 {
            return bad(format!(
                "summand {m:?} has degree {d} > 0 and admits no nonzero map"
            ));
        }
    }
    Ok(())
}

fn check_flag(i: usize, j: usize) -> Result<()> {
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) || i == j {
        return Err(Error::InvalidArgument(format!(
            "flag ({i},{i}{j}) needs distinct indices in 1..=3"
        )));
    }
    Ok(())
}

/// Whether some ordering of `m` puts `i` at every level-1 slot and a member of
/// `{i, j}` at every level-2 slot of `levels`.
fn fits(m: &Multiset, levels: &[usize], i: usize, j: usize) -> bool {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS.iter().any(|perm| {
        levels.iter().zip(perm).all(|(&level, &p)| {
            let f = m[p];
            match level {
                1 => f == i,
                2 => f == i || f == j,
                _ => true,
            }
        })
    })
}

/// Pivots of `φ` along the flag `0 ⊂ L_i ⊂ L_i ⊕ L_j ⊂ E`.
pub fn flag_pivots(tensor: &P1Tensor, i: usize, j: usize) -> Result<PivotSet> {
    check_flag(i, j)?;
    validate_p1(tensor)?;
    let table = PivotTable::from_fn(3, 3, |tuple| {
        tensor
            .support
            .iter()
            .any(|m| fits(m, tuple.entries(), i, j))
    });
    pivots_from_matrix(&table)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KValues {
    /// `k_i` for `i = 1, 2, 3`.
    pub single: [usize; 3],
    /// `k_12`, `k_13`, `k_23`.
    pub pair: [usize; 3],
}

impl KValues {
    pub fn pair_value(&self, i: usize, j: usize) -> usize {
        match (i.min(j), i.max(j)) {
            (1, 2) => self.pair[0],
            (1, 3) => self.pair[1],
            _ => self.pair[2],
        }
    }
}

pub fn k_values(tensor: &P1Tensor) -> KValues {
    let count = |m: &Multiset, i: usize| m.iter().filter(|&&f| f == i).count();
    let max_over = |g: &dyn Fn(&Multiset) -> usize| tensor.support.iter().map(g).max().unwrap_or(0);
    KValues {
        single: [1, 2, 3].map(|i| max_over(&|m| count(m, i))),
        pair: [(1, 2), (1, 3), (2, 3)].map(|(i, j)| max_over(&|m| count(m, i) + count(m, j))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagVerdict {
    pub i: usize,
    pub j: usize,
    pub pivots: PivotSet,
    pub verdict: CheckVerdict,
    pub k_checks: Vec<KCheck>,
}

impl FlagVerdict {
    pub fn violated(&self) -> bool {
        self.verdict.violated() || self.k_checks.iter().any(|k| !k.holds)
    }

    /// A short name for the first failing object: `L_i`, `L_i+L_j` or the flag.
    pub fn violation(&self) -> Option<String> {
        if let Some(k) = self.k_checks.iter().find(|k| !k.holds) {
            return Some(if k.level == 1 {
                format!("L_{}", self.i)
            } else {
                format!("L_{}+L_{}", self.i, self.j)
            });
        }
        self.verdict.violated().then(|| self.to_string())
    }
}

impl fmt::Display for FlagVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}{})", self.i, self.i, self.j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Verdict {
    pub strictness: Strictness,
    pub flags: Vec<FlagVerdict>,
}

impl P1Verdict {
    pub fn semistable(&self) -> bool {
        !self.flags.iter().any(FlagVerdict::violated)
    }

    pub fn first_violation(&self) -> Option<String> {
        self.flags.iter().find_map(FlagVerdict::violation)
    }
}

/// The flag filtration `(i, ij)` as discrete data.
pub fn flag_filtration(tensor: &P1Tensor, i: usize, j: usize) -> Result<FiltrationSpec> {
    check_flag(i, j)?;
    let d = |k: usize| tensor.degrees[k - 1];
    Ok(FiltrationSpec::new(
        3,
        SheafData::new(3, 0),
        vec![SheafData::new(1, d(i)), SheafData::new(2, d(i) + d(j))],
    ))
}

pub fn is_semistable_p1(tensor: &P1Tensor, strictness: Strictness) -> Result<P1Verdict> {
    validate_p1(tensor)?;
    let sp = StabilityParam::slope(tensor.delta.clone())?;
    let mut flags = Vec::with_capacity(6);
    for i in 1..=3 {
        for j in (1..=3).filter(|&j| j != i) {
            let fs = flag_filtration(tensor, i, j)?;
            let pivots = flag_pivots(tensor, i, j)?;
            let verdict = decide_destabilizing(&fs, &pivots, &sp, strictness)?;
            let k_checks = check_k_semistable(&fs, &pivots, &sp, strictness)?;
            flags.push(FlagVerdict {
                i,
                j,
                pivots,
                verdict,
                k_checks,
            });
        }
    }
    Ok(P1Verdict { strictness, flags })
}

/// All antichains of two tuples in the `a = 3`, `t = 3` poset.
pub fn enumerate_two_pivot_matrices() -> Vec<[OrderedTuple; 2]> {
    let tuples = ordered_tuples(3, 3);
    let mut out = Vec::new();
    for (n, p) in tuples.iter().enumerate() {
        for q in &tuples[n + 1..] {
            if matches!(tuple_cmp(p, q), Ok(TupleRelation::Incomparable)) {
                out.push([p.clone(), q.clone()]);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyRow {
    pub degrees: [i64; 3],
    pub support: BTreeSet<Multiset>,
    pub k: KValues,
    pub semistable: bool,
    /// The first failing flag or subsheaf when not semistable.
    pub violation: Option<String>,
}

impl ClassifyRow {
    /// For semistable rows with `d_3 > 0`: `k_3 = 2`, `d_2 = d_3 = -d_1/2`, `k_1 ≥ 1`.
    pub fn consistent_with_case_analysis(&self) -> bool {
        let [d1, d2, d3] = self.degrees;
        !self.semistable
            || d3 <= 0
            || (self.k.single[2] == 2 && d2 == d3 && 2 * d3 == -d1 && self.k.single[0] >= 1)
    }
}

/// Sorted degree triples with sum zero and `|d_1| ≤ bound`.
pub fn degree_triples(bound: u32) -> Vec<[i64; 3]> {
    let b = bound as i64;
    let mut out = Vec::new();
    for d1 in (-b..=0).rev() {
        for d2 in d1..=-d1 {
            let d3 = -d1 - d2;
            if d3 >= d2 {
                out.push([d1, d2, d3]);
            }
        }
    }
    out
}

/// Decides every tensor with `|d_1| ≤ bound` and every admissible support.
pub fn classify(delta: &Rat, bound: u32) -> Result<Vec<ClassifyRow>> {
    let mut rows = Vec::new();
    for degrees in degree_triples(bound) {
        let admissible: Vec<Multiset> = all_multisets()
            .into_iter()
            .filter(|m| m.iter().map(|&i| degrees[i - 1]).sum::<i64>() <= 0)
            .collect();
        for mask in 1u32..(1 << admissible.len()) {
            let support: BTreeSet<Multiset> = admissible
                .iter()
                .enumerate()
                .filter(|(n, _)| mask >> n & 1 == 1)
                .map(|(_, m)| *m)
                .collect();
            let tensor = P1Tensor {
                degrees,
                support,
                delta: delta.clone(),
            };
            let verdict = is_semistable_p1(&tensor, Strictness::Semi)?;
            rows.push(ClassifyRow {
                degrees,
                k: k_values(&tensor),
                semistable: verdict.semistable(),
                violation: verdict.first_violation(),
                support: tensor.support,
            });
        }
    }
    Ok(rows)
}
