//! Exact vertex enumeration for small polytopes with integer constraint data.
//!
//! A polytope is given as `{x : A x = b, G x ≥ h}`. Every vertex is the unique
//! solution of the equalities together with `dim - rank(A)` tight
//! inequalities, so vertices are found by trying each such subset, solving
//! the square system exactly and keeping the feasible solutions. Square
//! systems are solved by fraction-free Gauss–Jordan elimination in `i128`,
//! with a `BigRational` fallback on overflow.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::Rat;

/// A linear constraint `coeffs · x (= or ≥) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

impl Constraint {
    pub fn new(coeffs: Vec<i64>, rhs: i64) -> Self {
        Self { coeffs, rhs }
    }

    fn eval(&self, x: &[Rat]) -> Rat {
        self.coeffs.iter().zip(x).fold(Rat::zero(), |acc, (&c, v)| {
            acc + v * Rat::from_integer(BigInt::from(c))
        })
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Solution of a square system as numerators over a shared nonzero denominator.
struct IntSolution {
    nums: Vec<i128>,
    den: i128,
}

enum Solve {
    Unique(IntSolution),
    Singular,
    Overflow,
}

fn solve_i128(rows: &[&Constraint]) -> Solve {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|c| {
            c.coeffs
                .iter()
                .map(|&v| v as i128)
                .chain(std::iter::once(c.rhs as i128))
                .collect()
        })
        .collect();
    let mut prev: i128 = 1;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| m[r][k] != 0) else {
            return Solve::Singular;
        };
        m.swap(k, p);
        let pivot_row = m[k].clone();
        let pivot = pivot_row[k];
        for (i, row) in m.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k];
            for (j, (cell, &pk)) in row.iter_mut().zip(&pivot_row).enumerate() {
                if j == k {
                    continue;
                }
                let lhs = pivot.checked_mul(*cell);
                let rhs = factor.checked_mul(pk);
                *cell = match (lhs, rhs) {
                    (Some(a), Some(b)) => match a.checked_sub(b) {
                        Some(d) => d / prev,
                        None => return Solve::Overflow,
                    },
                    _ => return Solve::Overflow,
                };
            }
            row[k] = 0;
        }
        prev = pivot;
    }
    // every diagonal entry now equals the determinant
    let den = m[0][0];
    Solve::Unique(IntSolution {
        nums: (0..n).map(|i| m[i][n]).collect(),
        den,
    })
}

fn solve_rational(rows: &[&Constraint]) -> Option<Vec<Rat>> {
    let n = rows.len();
    let to_rat = |v: i64| Rat::from_integer(BigInt::from(v));
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|c| {
            c.coeffs
                .iter()
                .map(|&v| to_rat(v))
                .chain(std::iter::once(to_rat(c.rhs)))
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, p);
        let pivot = m[k][k].clone();
        for x in &mut m[k][k..] {
            *x /= &pivot;
        }
        let pivot_row = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != k && !row[k].is_zero() {
                let factor = row[k].clone();
                for (x, p) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                    *x -= &factor * p;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Solves a square system exactly; `None` when it is singular.
pub fn solve_square(rows: &[&Constraint]) -> Option<Vec<Rat>> {
    match solve_i128(rows) {
        Solve::Unique(sol) => Some(
            sol.nums
                .iter()
                .map(|&x| Rat::new(BigInt::from(x), BigInt::from(sol.den)))
                .collect(),
        ),
        Solve::Singular => None,
        Solve::Overflow => solve_rational(rows),
    }
}

/// Rank of a set of integer rows.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    independent_rows(rows).len()
}

/// Indices of a maximal linearly independent subset of rows, greedily from the front.
pub fn independent_rows(rows: &[Vec<i64>]) -> Vec<usize> {
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut v: Vec<Rat> = row
            .iter()
            .map(|&x| Rat::from_integer(BigInt::from(x)))
            .collect();
        for (b, &pc) in basis.iter().zip(&pivots) {
            if !v[pc].is_zero() {
                let f = v[pc].clone();
                for (vj, bj) in v.iter_mut().zip(b) {
                    *vj -= &f * bj;
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            let lead = v[pc].clone();
            for x in &mut v {
                *x /= &lead;
            }
            basis.push(v);
            pivots.push(pc);
            chosen.push(idx);
        }
    }
    chosen
}

fn feasible_int(sol: &IntSolution, c: &Constraint, equality: bool) -> Option<bool> {
    let mut dot: i128 = 0;
    for (&a, &x) in c.coeffs.iter().zip(&sol.nums) {
        dot = dot.checked_add((a as i128).checked_mul(x)?)?;
    }
    let rhs = (c.rhs as i128).checked_mul(sol.den)?;
    // compare dot/den with rhs/den, flipping for a negative denominator
    let (l, r) = if sol.den < 0 { (rhs, dot) } else { (dot, rhs) };
    Some(if equality { l == r } else { l >= r })
}

fn feasible_rat(x: &[Rat], equalities: &[Constraint], inequalities: &[Constraint]) -> bool {
    equalities
        .iter()
        .all(|c| c.eval(x) == Rat::from_integer(BigInt::from(c.rhs)))
        && inequalities
            .iter()
            .all(|c| c.eval(x) >= Rat::from_integer(BigInt::from(c.rhs)))
}

/// All vertices of `{x ∈ ℚ^dim : equalities, inequalities}`, sorted and deduplicated.
///
/// The polytope is assumed bounded; unbounded directions are simply not reported.
pub fn enumerate_vertices(
    dim: usize,
    equalities: &[Constraint],
    inequalities: &[Constraint],
) -> Vec<Vec<Rat>> {
    let eq_rows: Vec<Vec<i64>> = equalities.iter().map(|c| c.coeffs.clone()).collect();
    let basis: Vec<&Constraint> = independent_rows(&eq_rows)
        .into_iter()
        .map(|i| &equalities[i])
        .collect();
    let mut out = BTreeSet::new();
    if basis.len() > dim {
        return Vec::new();
    }
    let need = dim - basis.len();
    let mut rows: Vec<&Constraint> = Vec::with_capacity(dim);
    for_each_combination(inequalities.len(), need, |combo| {
        rows.clear();
        rows.extend(basis.iter().copied());
        rows.extend(combo.iter().map(|&i| &inequalities[i]));
        match solve_i128(&rows) {
            Solve::Singular => {}
            Solve::Unique(sol) => {
                let checks = equalities
                    .iter()
                    .map(|c| feasible_int(&sol, c, true))
                    .chain(inequalities.iter().map(|c| feasible_int(&sol, c, false)))
                    .collect::<Option<Vec<bool>>>();
                match checks {
                    Some(v) if v.iter().all(|&ok| ok) => {
                        let den = BigInt::from(sol.den);
                        out.insert(
                            sol.nums
                                .iter()
                                .map(|&x| Rat::new(BigInt::from(x), den.clone()))
                                .collect(),
                        );
                    }
                    Some(_) => {}
                    None => {
                        if let Some(x) = solve_rational(&rows) {
                            if feasible_rat(&x, equalities, inequalities) {
                                out.insert(x);
                            }
                        }
                    }
                }
            }
            Solve::Overflow => {
                if let Some(x) = solve_rational(&rows) {
                    if feasible_rat(&x, equalities, inequalities) {
                        out.insert(x);
                    }
                }
            }
        }
    });
    out.into_iter().collect()
}

/// Barycentre of a nonempty point set.
pub fn barycenter(points: &[Vec<Rat>]) -> Vec<Rat> {
    let n = Rat::from_integer(BigInt::from(points.len()));
    let dim = points[0].len();
    (0..dim)
        .map(|i| points.iter().fold(Rat::zero(), |acc, p| acc + &p[i]) / &n)
        .collect()
}

/// Indices (0-based) where a point is strictly positive.
pub fn support(point: &[Rat]) -> Vec<usize> {
    point
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_positive())
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn simplex(dim: usize) -> (Vec<Constraint>, Vec<Constraint>) {
        let eq = vec![Constraint::new(vec![1; dim], 1)];
        let ineq = (0..dim)
            .map(|i| {
                let mut c = vec![0; dim];
                c[i] = 1;
                Constraint::new(c, 0)
            })
            .collect();
        (eq, ineq)
    }

    #[test]
    fn simplex_vertices_are_unit_vectors() {
        let (eq, ineq) = simplex(3);
        let v = enumerate_vertices(3, &eq, &ineq);
        assert_eq!(v.len(), 3);
        for p in &v {
            assert_eq!(p.iter().filter(|x| **x == int(1)).count(), 1);
        }
    }

    #[test]
    fn cut_simplex() {
        // x ≥ 0, y ≥ 0, x + y = 1, 2x - y ≥ 0
        let (eq, mut ineq) = simplex(2);
        ineq.push(Constraint::new(vec![2, -1], 0));
        let v = enumerate_vertices(2, &eq, &ineq);
        assert_eq!(v, vec![vec![rat(1, 3), rat(2, 3)], vec![int(1), int(0)]]);
    }

    #[test]
    fn combinations_count() {
        let mut n = 0;
        for_each_combination(6, 3, |_| n += 1);
        assert_eq!(n, 20);
        let mut z = 0;
        for_each_combination(3, 0, |c| {
            assert!(c.is_empty());
            z += 1
        });
        assert_eq!(z, 1);
    }

    #[test]
    fn integer_solver_agrees_with_rational_elimination() {
        let a = Constraint::new(vec![2, 1, -1], 8);
        let b = Constraint::new(vec![-3, -1, 2], -11);
        let c = Constraint::new(vec![-2, 1, 2], -3);
        let rows = [&a, &b, &c];
        let Solve::Unique(sol) = solve_i128(&rows) else {
            panic!()
        };
        let x: Vec<Rat> = sol
            .nums
            .iter()
            .map(|&n| Rat::new(n.into(), sol.den.into()))
            .collect();
        assert_eq!(Some(x.clone()), solve_rational(&rows));
        assert_eq!(x, vec![int(2), int(3), int(-1)]);
    }

    #[test]
    fn singular_detected() {
        let a = Constraint::new(vec![1, 2], 1);
        let b = Constraint::new(vec![2, 4], 3);
        assert!(solve_square(&[&a, &b]).is_none());
    }

    #[test]
    fn rank_of_rows() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4], vec![0, 1]]), 2);
        assert_eq!(independent_rows(&[vec![0, 0], vec![1, 1]]), vec![1]);
    }
}
