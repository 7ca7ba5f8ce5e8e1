//! Counting ordered tuples: partitions, bounded partitions, antichain sizes and
//! Gaussian binomials.
//!
//! The ordered `a`-tuples over `1..=t` with entry sum `x` are exactly the
//! partitions of `x` into `a` parts of size at most `t`; their number is
//! `f(a, t, x)`. Tuples with equal sums are pairwise incomparable, so the
//! largest level set bounds the number of pivots.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poset::{ordered_tuple_count, ordered_tuples, tuple_cmp, OrderedTuple, TupleRelation};
use crate::{Error, Result};

/// Largest poset handled by [`brute_maxp`].
pub const BRUTE_MAXP_GUARD: usize = 24;

#[derive(Default)]
struct Memo {
    partitions: HashMap<(i64, i64), BigUint>,
    bounded: HashMap<(i64, i64, i64), BigUint>,
}

impl Memo {
    fn partitions(&mut self, k: i64, n: i64) -> BigUint {
        if k == 0 && n == 0 {
            return BigUint::one();
        }
        if k <= 0 || n <= 0 || k > n {
            return BigUint::zero();
        }
        if let Some(v) = self.partitions.get(&(k, n)) {
            return v.clone();
        }
        let v = self.partitions(k, n - k) + self.partitions(k - 1, n - 1);
        self.partitions.insert((k, n), v.clone());
        v
    }

    fn bounded(&mut self, a: i64, t: i64, x: i64) -> BigUint {
        if a < 1 || t < 1 || x < a || x > a * t {
            return BigUint::zero();
        }
        if t == 1 || a == 1 {
            // in range, there is exactly one tuple
            return BigUint::one();
        }
        if let Some(v) = self.bounded.get(&(a, t, x)) {
            return v.clone();
        }
        // drop the partitions whose largest part k exceeds t
        let mut excess = BigUint::zero();
        for k in t + 1..=x - a + 1 {
            excess += self.bounded(a - 1, k, x - k);
        }
        let v = self.partitions(a, x) - excess;
        self.bounded.insert((a, t, x), v.clone());
        v
    }
}

/// Number of partitions of `n` into exactly `k` positive parts.
pub fn partition_count(k: i64, n: i64) -> BigUint {
    Memo::default().partitions(k, n)
}

/// Number of partitions of `x` into exactly `a` parts, each at most `t`.
pub fn f_atx(a: usize, t: usize, x: usize) -> BigUint {
    Memo::default().bounded(a as i64, t as i64, x as i64)
}

/// `f(a, t, x)` for `x = a ..= a t`, sharing one memo table.
pub fn f_row(a: usize, t: usize) -> Vec<BigUint> {
    let mut memo = Memo::default();
    (a..=a * t)
        .map(|x| memo.bounded(a as i64, t as i64, x as i64))
        .collect()
}

/// Largest level set size, which is the largest antichain in the tuple poset.
pub fn maxp(a: usize, t: usize) -> BigUint {
    f_row(a, t).into_iter().max().unwrap_or_default()
}

/// Largest antichain found by exhaustive search.
pub fn brute_maxp(a: usize, t: usize) -> Result<usize> {
    let size = ordered_tuple_count(a, t);
    if size > BRUTE_MAXP_GUARD {
        return Err(Error::TooLarge {
            size,
            guard: BRUTE_MAXP_GUARD,
        });
    }
    let tuples = ordered_tuples(a, t);
    let n = tuples.len();
    let mut incomparable = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            incomparable[i][j] = tuple_cmp(&tuples[i], &tuples[j])? == TupleRelation::Incomparable;
        }
    }
    fn grow(candidates: &[usize], size: usize, best: &mut usize, inc: &[Vec<bool>]) {
        if size + candidates.len() <= *best {
            return;
        }
        if candidates.is_empty() {
            *best = size;
            return;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            let rest: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&w| inc[v][w])
                .collect();
            grow(&rest, size + 1, best, inc);
        }
    }
    let mut best = 0;
    grow(&(0..n).collect::<Vec<_>>(), 0, &mut best, &incomparable);
    Ok(best)
}

/// Polynomial in `q` with nonnegative integer coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly(Vec<BigUint>);

impl QPoly {
    pub fn new(mut coeffs: Vec<BigUint>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn one() -> Self {
        Self(vec![BigUint::one()])
    }

    /// `n_q = 1 + q + … + q^(n-1)`.
    pub fn q_integer(n: usize) -> Self {
        Self(vec![BigUint::one(); n])
    }

    pub fn q_factorial(n: usize) -> Self {
        (1..=n).fold(Self::one(), |acc, k| acc.mul(&Self::q_integer(k)))
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Value at `q = 1`.
    pub fn at_one(&self) -> BigUint {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let get = |p: &Self, i: usize| p.0.get(i).cloned().unwrap_or_default();
        Self::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::default();
        }
        let mut out = vec![BigUint::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::default();
        }
        let mut out = vec![BigUint::zero(); k];
        out.extend(self.0.iter().cloned());
        Self(out)
    }

    /// Exact quotient, or `None` if `divisor` does not divide `self` with a
    /// nonnegative integer quotient.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dlen = divisor.0.len();
        if dlen == 0 {
            return None;
        }
        if self.0.len() < dlen {
            return self.is_zero().then(Self::default);
        }
        let lead = BigInt::from(divisor.0[dlen - 1].clone());
        let d: Vec<BigInt> = divisor.0.iter().cloned().map(BigInt::from).collect();
        let mut rem: Vec<BigInt> = self.0.iter().cloned().map(BigInt::from).collect();
        let qlen = rem.len() - dlen + 1;
        let mut quot = vec![BigInt::zero(); qlen];
        for i in (0..qlen).rev() {
            let top = rem[i + dlen - 1].clone();
            if top.is_zero() {
                continue;
            }
            if (&top % &lead) != BigInt::zero() {
                return None;
            }
            let c = top / &lead;
            for (j, dj) in d.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
            quot[i] = c;
        }
        if rem.iter().any(|r| !r.is_zero()) || quot.iter().any(Signed::is_negative) {
            return None;
        }
        Some(Self::new(
            quot.into_iter()
                .map(|c| c.to_biguint().expect("checked nonnegative"))
                .collect(),
        ))
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (d, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{c}q")?,
                (_, true) => write!(f, "q^{d}")?,
                (_, false) => write!(f, "{c}q^{d}")?,
            }
        }
        Ok(())
    }
}

fn check_binomial_args(n: i64, k: i64) -> Result<(usize, usize)> {
    if k < 0 || n < 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    Ok((n as usize, k as usize))
}

/// `n_q! / (k_q! (n-k)_q!)` by exact polynomial division.
pub fn gaussian_binomial(n: i64, k: i64) -> Result<QPoly> {
    let (n, k) = check_binomial_args(n, k)?;
    // n_q … (n-k+1)_q / k_q!, which keeps the dividend small
    let numer = (n - k + 1..=n).fold(QPoly::one(), |acc, m| acc.mul(&QPoly::q_integer(m)));
    Ok(numer
        .div_exact(&QPoly::q_factorial(k))
        .expect("q-binomials are polynomials"))
}

/// The same coefficient via the q-Pascal rule `[n,k] = [n-1,k-1] + q^k [n-1,k]`.
pub fn gaussian_binomial_pascal(n: i64, k: i64) -> Result<QPoly> {
    let (n, k) = check_binomial_args(n, k)?;
    let mut row = vec![QPoly::one()];
    for m in 1..=n {
        let mut next = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let left = if j >= 1 {
                row[j - 1].clone()
            } else {
                QPoly::default()
            };
            let right = if j < m {
                row[j].shift(j)
            } else {
                QPoly::default()
            };
            next.push(left.add(&right));
        }
        row = next;
    }
    Ok(row.swap_remove(k))
}

/// Both sides of the q-binomial identity for the tuple poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QIdentity {
    pub binomial: QPoly,
    pub generating: QPoly,
}

impl QIdentity {
    pub fn holds(&self) -> bool {
        self.binomial == self.generating
    }
}

/// Compares `[a+t-1 choose a]_q` with `Σ_x f(a, t, x) q^(x-a)`.
pub fn verify_q_identity(a: usize, t: usize) -> Result<QIdentity> {
    if a < 1 || t < 1 {
        return Err(Error::InvalidArgument("a and t must be at least 1".into()));
    }
    let binomial = gaussian_binomial((a + t - 1) as i64, a as i64)?;
    Ok(QIdentity {
        binomial,
        generating: QPoly::new(f_row(a, t)),
    })
}

/// `f(a, t, x) = f(a, t-1, x) + f(a-1, t, x-t)`.
pub fn verify_pascal(a: usize, t: usize, x: usize) -> Result<bool> {
    if a < 2 || t < 2 {
        return Err(Error::InvalidArgument(
            "the recurrence needs a ≥ 2 and t ≥ 2".into(),
        ));
    }
    let mut memo = Memo::default();
    let (a, t, x) = (a as i64, t as i64, x as i64);
    let lhs = memo.bounded(a, t, x);
    let rhs = memo.bounded(a, t - 1, x) + memo.bounded(a - 1, t, x - t);
    Ok(lhs == rhs)
}

/// Ordered tuples with a fixed entry sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    pub a: usize,
    pub t: usize,
    pub x: usize,
    pub tuples: Vec<OrderedTuple>,
}

impl LevelSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn is_antichain(&self) -> bool {
        self.tuples.iter().enumerate().all(|(i, p)| {
            self.tuples[i + 1..]
                .iter()
                .all(|q| matches!(tuple_cmp(p, q), Ok(TupleRelation::Incomparable)))
        })
    }
}

pub fn level_set(a: usize, t: usize, x: usize) -> LevelSet {
    let tuples = ordered_tuples(a, t)
        .into_iter()
        .filter(|p| p.sum() == x)
        .collect();
    LevelSet { a, t, x, tuples }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumCheck {
    pub total: BigUint,
    pub binomial: BigUint,
    /// `⌊a (t+1) / 2⌋`.
    pub predicted_argmax: usize,
    pub max_value: BigUint,
    pub value_at_predicted: BigUint,
}

impl SumCheck {
    pub fn holds(&self) -> bool {
        self.total == self.binomial && self.value_at_predicted == self.max_value
    }
}

/// Checks `Σ_x f(a, t, x) = C(a+t-1, a)` and that the maximum is reached at
/// the middle sum (other maximisers are allowed).
pub fn sum_check(a: usize, t: usize) -> Result<SumCheck> {
    if a < 1 || t < 1 {
        return Err(Error::InvalidArgument("a and t must be at least 1".into()));
    }
    let row = f_row(a, t);
    let predicted_argmax = a * (t + 1) / 2;
    Ok(SumCheck {
        total: row.iter().sum(),
        binomial: num_integer::binomial(BigUint::from(a + t - 1), BigUint::from(a)),
        predicted_argmax,
        max_value: row.iter().max().cloned().unwrap_or_default(),
        value_at_predicted: row[predicted_argmax - a].clone(),
    })
}

/// Converts a small count to `u64`, for display and tests.
pub fn to_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}
