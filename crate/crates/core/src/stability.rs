//! Stability arithmetic for weighted filtrations.
//!
//! For a filtration with constants `c_i` (slope) or `C_i` (Hilbert) and a
//! pivot set `P`, the stability value at positive weights `α` is
//!
//! ```text
//! Σ_i α_i c_i + r·δ·R(α),     R(α) = max_{p ∈ P} Σ_j Σ_{l ≥ p_j} α_l
//! ```
//!
//! It is piecewise linear in `α`, linear on each region where one pivot
//! attains `R`. Deciding whether some positive weight makes it negative (or
//! zero) is done exactly, region by region, over the vertices of each region
//! intersected with the weight simplex.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{format_rat, int, primitive_integer_ray, Rat, UniPoly};
use crate::filtration::{FiltrationSpec, StabilityParam};
use crate::polytope::{barycenter, enumerate_vertices, support, Constraint};
use crate::poset::{ordered_tuple_count, ordered_tuples, project_pivots, OrderedTuple, PivotSet};
use crate::{Error, Result};

/// Strictly positive rational weights, one per filtration step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector(Vec<Rat>);

impl WeightVector {
    pub fn new(weights: Vec<Rat>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::NonPositiveWeight(i + 1));
        }
        Ok(Self(weights))
    }

    pub fn from_ints(weights: &[i64]) -> Result<Self> {
        Self::new(weights.iter().map(|&w| int(w)).collect())
    }

    pub fn as_slice(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, k: &Rat) -> Result<Self> {
        Self::new(self.0.iter().map(|w| w * k).collect())
    }
}

/// `γ = Σ_i α_i (r_i - r, …, r_i - r, r_i, …, r_i)`; nondecreasing, sums to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaVector(pub Vec<Rat>);

impl GammaVector {
    pub fn components(&self) -> &[Rat] {
        &self.0
    }
}

/// A stability value tagged with its mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityValue {
    Slope(Rat),
    Hilbert(UniPoly),
}

impl StabilityValue {
    fn from_poly(p: UniPoly, slope: bool) -> Self {
        if slope {
            Self::Slope(p.coeff(0))
        } else {
            Self::Hilbert(p)
        }
    }

    pub fn as_poly(&self) -> UniPoly {
        match self {
            Self::Slope(r) => UniPoly::constant(r.clone()),
            Self::Hilbert(p) => p.clone(),
        }
    }

    /// Sign of the value (asymptotic sign in Hilbert mode).
    pub fn signum(&self) -> Ordering {
        match self {
            Self::Slope(r) => r.cmp(&Rat::zero()),
            Self::Hilbert(p) => p.signum(),
        }
    }

    pub fn as_slope(&self) -> Option<&Rat> {
        match self {
            Self::Slope(r) => Some(r),
            Self::Hilbert(_) => None,
        }
    }
}

impl fmt::Display for StabilityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Slope(r) => write!(f, "{}", format_rat(r)),
            Self::Hilbert(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strictness {
    /// Semistability: violated by a value `≺ 0`.
    Semi,
    /// Stability: violated by a value `≼ 0`.
    Stable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Some strictly positive weight gives a value `≺ 0`.
    StrictlyDestabilized,
    /// No positive weight gives `≺ 0`, but one gives exactly `0`.
    MarginallyDestabilized,
    /// The closed-simplex minimum is `≻ 0`.
    StableOk,
    /// The minimum is `≼ 0` only on the boundary of the simplex; carries the
    /// 1-based step indices of a subfiltration reaching it.
    BoundaryWitness(Vec<usize>),
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Self::StrictlyDestabilized => "StrictlyDestabilized",
            Self::MarginallyDestabilized => "MarginallyDestabilized",
            Self::StableOk => "StableOk",
            Self::BoundaryWitness(_) => "BoundaryWitness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionOutcome {
    /// The region meets the simplex only on its boundary.
    NoPositivePoint,
    Negative,
    Zero,
    Positive,
}

/// Per-region summary, for auditing a decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionTrace {
    pub pivot: OrderedTuple,
    pub vertex_count: usize,
    pub min_value: Option<StabilityValue>,
    pub min_vertex: Option<Vec<Rat>>,
    pub outcome: RegionOutcome,
}

/// Exact minimum of the stability value over the closed weight simplex, with a
/// decision about strictly positive weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckVerdict {
    pub strictness: Strictness,
    pub min_value: StabilityValue,
    /// Point of the closed simplex where `min_value` is attained.
    pub witness: Vec<Rat>,
    pub attaining_pivot: OrderedTuple,
    pub classification: Classification,
    /// Strictly positive weight (normalised to sum one) realising the violation.
    pub violating_weight: Option<Vec<Rat>>,
    pub violating_value: Option<StabilityValue>,
    pub regions: Vec<RegionTrace>,
}

impl CheckVerdict {
    /// Whether the filtration itself, with some positive weights, violates.
    pub fn violated(&self) -> bool {
        match self.classification {
            Classification::StrictlyDestabilized => true,
            Classification::MarginallyDestabilized => self.strictness == Strictness::Stable,
            _ => false,
        }
    }

    /// Whether the boundary minimum exhibits a violating proper subfiltration.
    pub fn subfiltration_violated(&self) -> bool {
        match self.classification {
            Classification::BoundaryWitness(_) => {
                let sign = self.min_value.signum();
                sign == Ordering::Less
                    || (sign == Ordering::Equal && self.strictness == Strictness::Stable)
            }
            _ => false,
        }
    }
}

struct Prepared {
    slope: bool,
    rank: Rat,
    consts: Vec<UniPoly>,
    delta: UniPoly,
    pivots: Vec<OrderedTuple>,
    counts: Vec<Vec<i64>>,
}

impl Prepared {
    fn s(&self) -> usize {
        self.consts.len()
    }

    /// Coefficients `C_i + r δ x_k(i)` of the linear form on region `k`.
    fn region_form(&self, k: usize) -> Vec<UniPoly> {
        let rd = self.delta.scale(&self.rank);
        self.consts
            .iter()
            .zip(&self.counts[k])
            .map(|(c, &x)| c + &rd.scale(&int(x)))
            .collect()
    }

    fn r_of(&self, k: usize, w: &[Rat]) -> Rat {
        self.counts[k]
            .iter()
            .zip(w)
            .fold(Rat::zero(), |acc, (&x, a)| acc + a * int(x))
    }

    /// `(max R, index of the lexicographically first attaining pivot)`.
    fn r_max(&self, w: &[Rat]) -> (Rat, usize) {
        let mut best = (self.r_of(0, w), 0);
        for k in 1..self.pivots.len() {
            let v = self.r_of(k, w);
            if v > best.0 {
                best = (v, k);
            }
        }
        best
    }

    fn value(&self, w: &[Rat]) -> UniPoly {
        let (r, _) = self.r_max(w);
        let linear = self
            .consts
            .iter()
            .zip(w)
            .fold(UniPoly::zero(), |acc, (c, a)| &acc + &c.scale(a));
        &linear + &self.delta.scale(&(&self.rank * r))
    }
}

fn check_shapes(fs: &FiltrationSpec, ps: &PivotSet) -> Result<()> {
    fs.validate()?;
    if ps.t() != fs.levels() {
        return Err(Error::SizeMismatch {
            expected: fs.levels(),
            got: ps.t(),
        });
    }
    if ps.arity() != fs.arity {
        return Err(Error::ArityMismatch {
            expected: fs.arity,
            got: ps.arity(),
        });
    }
    Ok(())
}

fn check_weights(fs: &FiltrationSpec, w: &WeightVector) -> Result<()> {
    if w.len() != fs.len() {
        return Err(Error::SizeMismatch {
            expected: fs.len(),
            got: w.len(),
        });
    }
    Ok(())
}

fn constant_polys(fs: &FiltrationSpec, sp: &StabilityParam) -> Result<Vec<UniPoly>> {
    fs.validate()?;
    sp.check()?;
    let r = int(fs.rank() as i64);
    let a = int(fs.arity as i64);
    match sp {
        StabilityParam::Slope(delta) => {
            let d = int(fs.total.degree);
            Ok(fs
                .steps
                .iter()
                .map(|st| {
                    let ri = int(st.rank as i64);
                    UniPoly::constant(&ri * &d - &r * int(st.degree) - &a * delta * &ri)
                })
                .collect())
        }
        StabilityParam::Hilbert(delta) => {
            let (total, steps) = fs.hilbert_data()?;
            Ok(fs
                .steps
                .iter()
                .zip(&steps)
                .map(|(st, p)| {
                    let ri = int(st.rank as i64);
                    &(&total.scale(&ri) - &p.scale(&r)) - &delta.scale(&(&a * &ri))
                })
                .collect())
        }
    }
}

fn prepare(fs: &FiltrationSpec, ps: &PivotSet, sp: &StabilityParam) -> Result<Prepared> {
    check_shapes(fs, ps)?;
    let consts = constant_polys(fs, sp)?;
    let s = fs.len();
    Ok(Prepared {
        slope: sp.is_slope(),
        rank: int(fs.rank() as i64),
        consts,
        delta: sp.as_poly(),
        pivots: ps.pivots().to_vec(),
        counts: ps
            .pivots()
            .iter()
            .map(|p| p.level_counts(s).into_iter().map(|c| c as i64).collect())
            .collect(),
    })
}

/// `C_i = r_i P_E - r P_{E_i} - a δ r_i`, or `c_i = r_i d - r d_i - a δ̄ r_i` in slope mode.
pub fn constants(fs: &FiltrationSpec, sp: &StabilityParam) -> Result<Vec<StabilityValue>> {
    Ok(constant_polys(fs, sp)?
        .into_iter()
        .map(|p| StabilityValue::from_poly(p, sp.is_slope()))
        .collect())
}

pub fn gamma_vector(fs: &FiltrationSpec, w: &WeightVector) -> Result<GammaVector> {
    fs.validate()?;
    check_weights(fs, w)?;
    let r = fs.rank();
    let comps = (1..=r)
        .map(|pos| {
            fs.steps
                .iter()
                .zip(w.as_slice())
                .fold(Rat::zero(), |acc, (st, a)| {
                    let entry = if pos <= st.rank {
                        st.rank as i64 - r as i64
                    } else {
                        st.rank as i64
                    };
                    acc + a * int(entry)
                })
        })
        .collect();
    Ok(GammaVector(comps))
}

/// `R_α(p) = Σ_j Σ_{l ≥ p_j} α_l` for one tuple.
pub fn r_of_tuple(tuple: &OrderedTuple, w: &[Rat]) -> Rat {
    tuple
        .level_counts(w.len())
        .iter()
        .zip(w)
        .fold(Rat::zero(), |acc, (&x, a)| acc + a * int(x as i64))
}

/// Maximum of `R_α` over the pivots, with the lexicographically smallest attaining pivot.
pub fn r_value(
    fs: &FiltrationSpec,
    ps: &PivotSet,
    w: &WeightVector,
) -> Result<(Rat, OrderedTuple)> {
    check_shapes(fs, ps)?;
    check_weights(fs, w)?;
    let mut best: Option<(Rat, &OrderedTuple)> = None;
    for p in ps.pivots() {
        let v = r_of_tuple(p, w.as_slice());
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, p));
        }
    }
    let (v, p) = best.expect("pivot sets are nonempty");
    Ok((v, p.clone()))
}

/// `μ = -a Σ α_l r_l + r R_α`.
pub fn mu_via_pivots(fs: &FiltrationSpec, ps: &PivotSet, w: &WeightVector) -> Result<Rat> {
    let (r_max, _) = r_value(fs, ps, w)?;
    let weighted_ranks = fs
        .steps
        .iter()
        .zip(w.as_slice())
        .fold(Rat::zero(), |acc, (st, a)| acc + a * int(st.rank as i64));
    Ok(int(fs.rank() as i64) * r_max - int(fs.arity as i64) * weighted_ranks)
}

/// `μ = -min Σ_j γ_{rank(i_j)}` over every tuple on which `φ` survives,
/// enumerating the full table (at most `guard` tuples).
pub fn mu_via_gamma(
    fs: &FiltrationSpec,
    ps: &PivotSet,
    w: &WeightVector,
    guard: usize,
) -> Result<Rat> {
    check_shapes(fs, ps)?;
    let gamma = gamma_vector(fs, w)?;
    let size = ordered_tuple_count(fs.arity, fs.levels());
    if size > guard {
        return Err(Error::TooLarge { size, guard });
    }
    let mut min: Option<Rat> = None;
    for tuple in ordered_tuples(fs.arity, fs.levels()) {
        if !ps.contains_below(&tuple) {
            continue;
        }
        let sum = tuple.entries().iter().fold(Rat::zero(), |acc, &e| {
            acc + &gamma.0[fs.rank_at_level(e) - 1]
        });
        if min.as_ref().is_none_or(|m| sum < *m) {
            min = Some(sum);
        }
    }
    Ok(-min.expect("the bottom tuple is always present"))
}

/// `Σ α_i C_i + r δ R_α` (slope: `Σ α_i c_i + r δ̄ R_α`).
pub fn objective(
    fs: &FiltrationSpec,
    ps: &PivotSet,
    w: &WeightVector,
    sp: &StabilityParam,
) -> Result<StabilityValue> {
    let prep = prepare(fs, ps, sp)?;
    check_weights(fs, w)?;
    Ok(StabilityValue::from_poly(
        prep.value(w.as_slice()),
        prep.slope,
    ))
}

/// Critical filtrations are those whose `μ` differs from the sum of the
/// `μ` of their length-one pieces.
pub fn is_critical(fs: &FiltrationSpec, ps: &PivotSet, w: &WeightVector) -> Result<bool> {
    let mu = mu_via_pivots(fs, ps, w)?;
    let r = int(fs.rank() as i64);
    let a = int(fs.arity as i64);
    let mut sum = Rat::zero();
    for (i, (st, alpha)) in fs.steps.iter().zip(w.as_slice()).enumerate() {
        let k = k_of_level(ps, i + 1)?;
        sum += alpha * (&r * int(k as i64) - &a * int(st.rank as i64));
    }
    Ok(mu != sum)
}

/// `k(E_i, E)`: the largest number of coordinates at or below `level` in any pivot.
pub fn k_of_level(ps: &PivotSet, level: usize) -> Result<usize> {
    if level < 1 || level >= ps.t() {
        return Err(Error::LevelOutOfRange {
            level,
            max: ps.t() - 1,
        });
    }
    Ok(ps
        .pivots()
        .iter()
        .map(|p| p.entries().iter().filter(|&&e| e <= level).count())
        .max()
        .unwrap_or(0))
}

/// Outcome of the length-one condition for one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KCheck {
    pub level: usize,
    pub k: usize,
    /// `c_i + r δ̄ k_i` (or `C_i + r δ k_i`).
    pub value: StabilityValue,
    pub holds: bool,
}

pub fn check_k_semistable(
    fs: &FiltrationSpec,
    ps: &PivotSet,
    sp: &StabilityParam,
    strictness: Strictness,
) -> Result<Vec<KCheck>> {
    let prep = prepare(fs, ps, sp)?;
    let rd = prep.delta.scale(&prep.rank);
    (1..=prep.s())
        .map(|level| {
            let k = k_of_level(ps, level)?;
            let v = &prep.consts[level - 1] + &rd.scale(&int(k as i64));
            let holds = match strictness {
                Strictness::Semi => v.signum() != Ordering::Less,
                Strictness::Stable => v.signum() == Ordering::Greater,
            };
            Ok(KCheck {
                level,
                k,
                value: StabilityValue::from_poly(v, prep.slope),
                holds,
            })
        })
        .collect()
}

fn unit_row(s: usize, i: usize) -> Vec<i64> {
    let mut row = vec![0; s];
    row[i] = 1;
    row
}

fn region_vertices(prep: &Prepared, k: usize) -> Vec<Vec<Rat>> {
    let s = prep.s();
    let eq = [Constraint::new(vec![1; s], 1)];
    let mut ineq: Vec<Constraint> = (0..s).map(|i| Constraint::new(unit_row(s, i), 0)).collect();
    for j in 0..prep.pivots.len() {
        if j != k {
            let diff: Vec<i64> = prep.counts[k]
                .iter()
                .zip(&prep.counts[j])
                .map(|(a, b)| a - b)
                .collect();
            let c = Constraint::new(diff, 0);
            if !ineq.contains(&c) {
                ineq.push(c);
            }
        }
    }
    enumerate_vertices(s, &eq, &ineq)
}

fn dot_coeff(form: &[UniPoly], v: &[Rat], d: usize) -> Rat {
    form.iter()
        .zip(v)
        .fold(Rat::zero(), |acc, (g, x)| acc + g.coeff(d) * x)
}

fn dot_poly(form: &[UniPoly], v: &[Rat]) -> UniPoly {
    form.iter()
        .zip(v)
        .fold(UniPoly::zero(), |acc, (g, x)| &acc + &g.scale(x))
}

/// Lexicographic refinement on one region: is there a strictly positive point
/// with value `≺ 0`, or failing that `= 0`?
fn analyse_region(
    form: &[UniPoly],
    vertices: &[Vec<Rat>],
    s: usize,
) -> (RegionOutcome, Option<Vec<Rat>>) {
    let covers_all = |face: &[&Vec<Rat>]| {
        let mut covered = vec![false; s];
        for v in face {
            for i in support(v) {
                covered[i] = true;
            }
        }
        covered.into_iter().all(|c| c)
    };
    let top = form.iter().filter_map(UniPoly::degree).max().unwrap_or(0);
    let mut face: Vec<&Vec<Rat>> = vertices.iter().collect();
    for d in (0..=top).rev() {
        if !covers_all(&face) {
            return (RegionOutcome::NoPositivePoint, None);
        }
        let values: Vec<Rat> = face.iter().map(|v| dot_coeff(form, v, d)).collect();
        let (imin, m) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, m)| (i, m.clone()))
            .unwrap();
        match m.cmp(&Rat::zero()) {
            Ordering::Greater => return (RegionOutcome::Positive, None),
            Ordering::Less => {
                let owned: Vec<Vec<Rat>> = face.iter().map(|v| (*v).clone()).collect();
                let center = barycenter(&owned);
                let at_center = dot_coeff(form, &center, d);
                if at_center.is_negative() {
                    return (RegionOutcome::Negative, Some(center));
                }
                // move from the minimising vertex toward the centre just far
                // enough to become positive while keeping this coefficient < 0
                let eps = -&m / (int(2) * (&at_center - &m));
                let v = face[imin];
                let w = v
                    .iter()
                    .zip(&center)
                    .map(|(a, b)| (Rat::one() - &eps) * a + &eps * b)
                    .collect();
                return (RegionOutcome::Negative, Some(w));
            }
            Ordering::Equal => {
                face = face
                    .into_iter()
                    .zip(values)
                    .filter(|(_, x)| x.is_zero())
                    .map(|(v, _)| v)
                    .collect();
            }
        }
    }
    if !covers_all(&face) {
        return (RegionOutcome::NoPositivePoint, None);
    }
    let owned: Vec<Vec<Rat>> = face.iter().map(|v| (*v).clone()).collect();
    (RegionOutcome::Zero, Some(barycenter(&owned)))
}

/// Exact minimisation of the stability value over the closed weight simplex,
/// plus a decision about strictly positive weights.
pub fn decide_destabilizing(
    fs: &FiltrationSpec,
    ps: &PivotSet,
    sp: &StabilityParam,
    strictness: Strictness,
) -> Result<CheckVerdict> {
    let prep = prepare(fs, ps, sp)?;
    let s = prep.s();
    if s == 0 {
        return Err(Error::InvalidArgument(
            "the filtration must have at least one step".into(),
        ));
    }
    let mut regions = Vec::with_capacity(prep.pivots.len());
    let mut best: Option<(UniPoly, Vec<Rat>)> = None;
    let mut strict: Option<Vec<Rat>> = None;
    let mut zero: Option<Vec<Rat>> = None;
    for k in 0..prep.pivots.len() {
        let form = prep.region_form(k);
        let vertices = region_vertices(&prep, k);
        let mut region_min: Option<(UniPoly, &Vec<Rat>)> = None;
        for v in &vertices {
            let val = dot_poly(&form, v);
            if region_min.as_ref().is_none_or(|(m, _)| val < *m) {
                region_min = Some((val.clone(), v));
            }
            let better = match &best {
                None => true,
                Some((bv, bw)) => match val.cmp(bv) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    // prefer larger support, then lexicographic order
                    Ordering::Equal => {
                        let (ns, bs) = (support(v).len(), support(bw).len());
                        ns > bs || (ns == bs && v < bw)
                    }
                },
            };
            if better {
                best = Some((val, v.clone()));
            }
        }
        let (outcome, point) = if vertices.is_empty() {
            (RegionOutcome::NoPositivePoint, None)
        } else {
            analyse_region(&form, &vertices, s)
        };
        match outcome {
            RegionOutcome::Negative if strict.is_none() => strict = point,
            RegionOutcome::Zero if zero.is_none() => zero = point,
            _ => {}
        }
        regions.push(RegionTrace {
            pivot: prep.pivots[k].clone(),
            vertex_count: vertices.len(),
            min_value: region_min
                .as_ref()
                .map(|(m, _)| StabilityValue::from_poly(m.clone(), prep.slope)),
            min_vertex: region_min.map(|(_, v)| v.clone()),
            outcome,
        });
    }
    let (min_poly, witness) = best.expect("the weight simplex is covered by the regions");
    let (_, arg) = prep.r_max(&witness);
    let classification = if strict.is_some() {
        Classification::StrictlyDestabilized
    } else if zero.is_some() {
        Classification::MarginallyDestabilized
    } else if min_poly.signum() == Ordering::Greater {
        Classification::StableOk
    } else {
        Classification::BoundaryWitness(support(&witness).into_iter().map(|i| i + 1).collect())
    };
    let violating_weight = strict.or(zero);
    let violating_value = violating_weight
        .as_ref()
        .map(|w| StabilityValue::from_poly(prep.value(w), prep.slope));
    Ok(CheckVerdict {
        strictness,
        min_value: StabilityValue::from_poly(min_poly, prep.slope),
        witness,
        attaining_pivot: prep.pivots[arg].clone(),
        classification,
        violating_weight,
        violating_value,
        regions,
    })
}

/// The subfiltration keeping the step indices in `keep`, with its induced pivots.
pub fn restrict(
    fs: &FiltrationSpec,
    ps: &PivotSet,
    keep: &[usize],
) -> Result<(FiltrationSpec, PivotSet)> {
    check_shapes(fs, ps)?;
    let projected = project_pivots(ps, keep)?;
    Ok((fs.restrict(keep), projected))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub removed: usize,
    pub remaining: Vec<usize>,
    pub classification: Classification,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    /// 1-based step indices of a locally minimal destabilizing subfiltration.
    pub subset: Vec<usize>,
    pub pivots: PivotSet,
    pub verdict: CheckVerdict,
    pub trace: Vec<ReductionStep>,
}

/// Greedily drops steps (ascending index, first success restarts) while the
/// remaining subfiltration still violates.
pub fn reduce_destabilizer(
    fs: &FiltrationSpec,
    ps: &PivotSet,
    sp: &StabilityParam,
    strictness: Strictness,
) -> Result<Reduction> {
    let verdict = decide_destabilizing(fs, ps, sp, strictness)?;
    if !verdict.violated() {
        return Err(Error::NotViolating);
    }
    let mut current: Vec<usize> = (1..=fs.len()).collect();
    let mut current_verdict = verdict;
    let mut trace = Vec::new();
    'outer: loop {
        if current.len() == 1 {
            break;
        }
        for &idx in &current {
            let candidate: Vec<usize> = current.iter().copied().filter(|&i| i != idx).collect();
            let (sub_fs, sub_ps) = restrict(fs, ps, &candidate)?;
            let v = decide_destabilizing(&sub_fs, &sub_ps, sp, strictness)?;
            let violated = v.violated();
            trace.push(ReductionStep {
                removed: idx,
                remaining: candidate.clone(),
                classification: v.classification.clone(),
                violated,
            });
            if violated {
                current = candidate;
                current_verdict = v;
                continue 'outer;
            }
        }
        break;
    }
    let pivots = project_pivots(ps, &current)?;
    Ok(Reduction {
        subset: current,
        pivots,
        verdict: current_verdict,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// The equal-`R` subspace meets the nonnegative orthant away from zero.
    Splits {
        /// Primitive integer ray, the barycentre of the extreme rays.
        ray: Vec<BigInt>,
        extreme_rays: Vec<Vec<BigInt>>,
    },
    NoCertificate,
}

/// Whether `{β : R_β(p) equal for every pivot p}` contains a nonzero `β ≥ 0`.
pub fn check_splitting(fs: &FiltrationSpec, ps: &PivotSet) -> Result<Splitting> {
    check_shapes(fs, ps)?;
    let s = fs.len();
    if s == 0 {
        return Ok(Splitting::NoCertificate);
    }
    let counts: Vec<Vec<i64>> = ps
        .pivots()
        .iter()
        .map(|p| p.level_counts(s).into_iter().map(|c| c as i64).collect())
        .collect();
    let mut eq = vec![Constraint::new(vec![1; s], 1)];
    for other in &counts[1..] {
        eq.push(Constraint::new(
            counts[0].iter().zip(other).map(|(a, b)| a - b).collect(),
            0,
        ));
    }
    let ineq: Vec<Constraint> = (0..s).map(|i| Constraint::new(unit_row(s, i), 0)).collect();
    let vertices = enumerate_vertices(s, &eq, &ineq);
    if vertices.is_empty() {
        return Ok(Splitting::NoCertificate);
    }
    let ray = primitive_integer_ray(&barycenter(&vertices));
    let extreme_rays = vertices.iter().map(|v| primitive_integer_ray(v)).collect();
    Ok(Splitting::Splits { ray, extreme_rays })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pruning {
    /// 1-based indices of the surviving steps.
    pub kept: Vec<usize>,
    /// Removed steps with their (nonnegative) constants.
    pub removed: Vec<(usize, StabilityValue)>,
    /// The pruned instance; `None` when every step was removed.
    pub reduced: Option<(FiltrationSpec, PivotSet)>,
}

/// Drops every step whose constant is `≽ 0`; the pruned instance never has a
/// larger value at the restricted weights.
pub fn prune_nonnegative(
    fs: &FiltrationSpec,
    ps: &PivotSet,
    sp: &StabilityParam,
) -> Result<Pruning> {
    check_shapes(fs, ps)?;
    let consts = constants(fs, sp)?;
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (i, c) in consts.into_iter().enumerate() {
        if c.signum() == Ordering::Less {
            kept.push(i + 1);
        } else {
            removed.push((i + 1, c));
        }
    }
    let reduced = if kept.is_empty() {
        None
    } else {
        Some(restrict(fs, ps, &kept)?)
    };
    Ok(Pruning {
        kept,
        removed,
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::filtration::SheafData;

    fn rank6() -> (FiltrationSpec, PivotSet, StabilityParam) {
        let fs = FiltrationSpec::new(
            4,
            SheafData::new(6, 6),
            vec![
                SheafData::new(1, 1),
                SheafData::new(3, 3),
                SheafData::new(5, 5),
            ],
        );
        let ps = PivotSet::from_vecs(
            4,
            4,
            &[vec![1, 1, 4, 4], vec![2, 2, 2, 4], vec![3, 3, 3, 3]],
        )
        .unwrap();
        (fs, ps, StabilityParam::slope(int(1)).unwrap())
    }

    fn slope_values(v: &[StabilityValue]) -> Vec<Rat> {
        v.iter().map(|x| x.as_slope().unwrap().clone()).collect()
    }

    #[test]
    fn rank6_constants() {
        let (fs, _, sp) = rank6();
        assert_eq!(
            slope_values(&constants(&fs, &sp).unwrap()),
            vec![int(-4), int(-12), int(-20)]
        );
    }

    #[test]
    fn balanced_step_constant() {
        // d_i r = d r_i, so c_i = -a δ̄ r_i
        let fs = FiltrationSpec::new(3, SheafData::new(4, 8), vec![SheafData::new(2, 4)]);
        let sp = StabilityParam::slope(rat(1, 2)).unwrap();
        assert_eq!(slope_values(&constants(&fs, &sp).unwrap()), vec![int(-3)]);
    }

    #[test]
    fn hilbert_constant() {
        let fs = FiltrationSpec::new(
            2,
            SheafData::with_hilbert(2, 0, UniPoly::from_ints(&[2, 2])),
            vec![SheafData::with_hilbert(1, 0, UniPoly::from_ints(&[0, 1]))],
        );
        let sp = StabilityParam::hilbert(UniPoly::from_ints(&[1])).unwrap();
        assert_eq!(
            constants(&fs, &sp).unwrap(),
            vec![StabilityValue::Hilbert(UniPoly::zero())]
        );
        let ps = PivotSet::from_vecs(2, 2, &[vec![1, 2]]).unwrap();
        let w = WeightVector::from_ints(&[1]).unwrap();
        assert_eq!(
            objective(&fs, &ps, &w, &sp).unwrap(),
            StabilityValue::Hilbert(UniPoly::from_ints(&[2]))
        );
    }

    #[test]
    fn hilbert_mode_needs_polynomials() {
        let (fs, _, _) = rank6();
        let sp = StabilityParam::hilbert(UniPoly::from_ints(&[1])).unwrap();
        assert!(matches!(constants(&fs, &sp), Err(Error::ModeMismatch(_))));
    }

    #[test]
    fn gamma_examples() {
        let fs = FiltrationSpec::new(1, SheafData::new(2, 0), vec![SheafData::new(1, 0)]);
        let g = gamma_vector(&fs, &WeightVector::from_ints(&[1]).unwrap()).unwrap();
        assert_eq!(g.0, vec![int(-1), int(1)]);
        let (fs, _, _) = rank6();
        let g = gamma_vector(&fs, &WeightVector::from_ints(&[4, 2, 6]).unwrap()).unwrap();
        assert_eq!(g.0, [-32, -8, -8, 4, 4, 40].map(int).to_vec());
        assert!(gamma_vector(&fs, &WeightVector::from_ints(&[1]).unwrap()).is_err());
    }

    #[test]
    fn rank6_r_and_mu() {
        let (fs, ps, sp) = rank6();
        let w = WeightVector::from_ints(&[4, 2, 6]).unwrap();
        let (r, p) = r_value(&fs, &ps, &w).unwrap();
        assert_eq!(r, int(24));
        assert_eq!(p.entries(), &[1, 1, 4, 4]);
        assert_eq!(mu_via_pivots(&fs, &ps, &w).unwrap(), int(-16));
        assert_eq!(mu_via_gamma(&fs, &ps, &w, 1000).unwrap(), int(-16));
        assert_eq!(
            objective(&fs, &ps, &w, &sp).unwrap(),
            StabilityValue::Slope(int(-16))
        );
        assert!(matches!(
            mu_via_gamma(&fs, &ps, &w, 5),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn bottom_pivot_has_zero_r() {
        let (fs, _, _) = rank6();
        let ps = PivotSet::new(4, 4, [OrderedTuple::constant(4, 4)]).unwrap();
        let w = WeightVector::from_ints(&[4, 2, 6]).unwrap();
        assert_eq!(r_value(&fs, &ps, &w).unwrap().0, int(0));
        assert_eq!(mu_via_pivots(&fs, &ps, &w).unwrap(), int(-4 * 40));
        assert_eq!(mu_via_gamma(&fs, &ps, &w, 1000).unwrap(), int(-4 * 40));
    }

    #[test]
    fn top_pivot_r_counts_everything() {
        let (fs, _, _) = rank6();
        let ps = PivotSet::new(4, 4, [OrderedTuple::constant(1, 4)]).unwrap();
        let w = WeightVector::from_ints(&[1, 1, 1]).unwrap();
        assert_eq!(r_value(&fs, &ps, &w).unwrap().0, int(12));
    }

    #[test]
    fn single_step_mu_matches_k_formula() {
        // μ(0 ⊂ F ⊂ E, 1) = r k - a r_F
        let fs = FiltrationSpec::new(3, SheafData::new(5, 0), vec![SheafData::new(2, 0)]);
        let ps = PivotSet::from_vecs(2, 3, &[vec![1, 1, 2]]).unwrap();
        let w = WeightVector::from_ints(&[1]).unwrap();
        assert_eq!(mu_via_pivots(&fs, &ps, &w).unwrap(), int(5 * 2 - 3 * 2));
    }

    #[test]
    fn rank6_k_values() {
        let (fs, ps, sp) = rank6();
        let ks: Vec<usize> = (1..=3).map(|l| k_of_level(&ps, l).unwrap()).collect();
        assert_eq!(ks, vec![2, 3, 4]);
        assert!(k_of_level(&ps, 4).is_err());
        let checks = check_k_semistable(&fs, &ps, &sp, Strictness::Semi).unwrap();
        assert_eq!(
            checks
                .iter()
                .map(|c| c.value.as_slope().unwrap().clone())
                .collect::<Vec<_>>(),
            [8, 6, 4].map(int)
        );
        assert!(checks.iter().all(|c| c.holds));
    }

    #[test]
    fn k_extremes() {
        let bottom = PivotSet::new(3, 2, [OrderedTuple::constant(3, 2)]).unwrap();
        let top = PivotSet::new(3, 2, [OrderedTuple::constant(1, 2)]).unwrap();
        for l in 1..=2 {
            assert_eq!(k_of_level(&bottom, l).unwrap(), 0);
            assert_eq!(k_of_level(&top, l).unwrap(), 2);
        }
    }

    #[test]
    fn nonnegative_constant_passes_k_check() {
        let fs = FiltrationSpec::new(2, SheafData::new(2, 2), vec![SheafData::new(1, -3)]);
        let ps = PivotSet::new(2, 2, [OrderedTuple::constant(2, 2)]).unwrap();
        let sp = StabilityParam::slope(int(1)).unwrap();
        let c = constants(&fs, &sp).unwrap();
        assert!(c[0].signum() != Ordering::Less);
        assert!(check_k_semistable(&fs, &ps, &sp, Strictness::Semi).unwrap()[0].holds);
    }

    #[test]
    fn rank6_is_strictly_destabilized() {
        let (fs, ps, sp) = rank6();
        let v = decide_destabilizing(&fs, &ps, &sp, Strictness::Semi).unwrap();
        assert_eq!(v.classification, Classification::StrictlyDestabilized);
        assert!(v.violated());
        let w = v.violating_weight.clone().unwrap();
        assert!(w.iter().all(|x| x.is_positive()));
        assert_eq!(v.violating_value.unwrap().signum(), Ordering::Less);
        let normalized = WeightVector::new(vec![rat(1, 3), rat(1, 6), rat(1, 2)]).unwrap();
        assert_eq!(
            objective(&fs, &ps, &normalized, &sp).unwrap(),
            StabilityValue::Slope(rat(-4, 3))
        );
        assert!(v.min_value.as_slope().unwrap() <= &rat(-4, 3));
    }

    #[test]
    fn rank6_pair_subfiltration_min() {
        let (fs, ps, sp) = rank6();
        let (sub, sub_ps) = restrict(&fs, &ps, &[1, 2]).unwrap();
        let v = decide_destabilizing(&sub, &sub_ps, &sp, Strictness::Semi).unwrap();
        assert_eq!(v.classification, Classification::StableOk);
        assert_eq!(v.min_value, StabilityValue::Slope(rat(8, 3)));
        assert_eq!(v.witness, vec![rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn single_bottom_pivot_is_linear() {
        let fs = FiltrationSpec::new(
            2,
            SheafData::new(3, 0),
            vec![SheafData::new(1, 1), SheafData::new(2, -2)],
        );
        let ps = PivotSet::new(3, 2, [OrderedTuple::constant(3, 2)]).unwrap();
        let sp = StabilityParam::slope(int(1)).unwrap();
        let c = slope_values(&constants(&fs, &sp).unwrap());
        let v = decide_destabilizing(&fs, &ps, &sp, Strictness::Semi).unwrap();
        let min_c = c.iter().min().unwrap().clone();
        assert_eq!(v.min_value, StabilityValue::Slope(min_c.clone()));
        assert_eq!(
            v.classification == Classification::StrictlyDestabilized,
            min_c.is_negative()
        );
    }

    #[test]
    fn zero_only_at_a_vertex_is_a_boundary_witness() {
        let fs = FiltrationSpec::new(
            2,
            SheafData::new(6, 11),
            vec![
                SheafData::new(1, -6),
                SheafData::new(3, 7),
                SheafData::new(4, 4),
                SheafData::new(5, 2),
            ],
        );
        let ps = PivotSet::from_vecs(5, 2, &[vec![1, 2]]).unwrap();
        let sp = StabilityParam::slope(rat(3, 2)).unwrap();
        let v = decide_destabilizing(&fs, &ps, &sp, Strictness::Stable).unwrap();
        assert_eq!(v.min_value, StabilityValue::Slope(Rat::zero()));
        assert_eq!(v.classification, Classification::BoundaryWitness(vec![2]));
        assert!(v.violating_weight.is_none());
        assert_eq!(v.regions[0].outcome, RegionOutcome::NoPositivePoint);
    }

    #[test]
    fn reducer_keeps_sharp_example() {
        let (fs, ps, sp) = rank6();
        let red = reduce_destabilizer(&fs, &ps, &sp, Strictness::Semi).unwrap();
        assert_eq!(red.subset, vec![1, 2, 3]);
        assert_eq!(red.trace.len(), 3);
        assert!(red.trace.iter().all(|t| !t.violated));
    }

    #[test]
    fn reducer_refuses_non_violating() {
        let (fs, ps, sp) = rank6();
        let (sub, sub_ps) = restrict(&fs, &ps, &[1, 2]).unwrap();
        assert_eq!(
            reduce_destabilizer(&sub, &sub_ps, &sp, Strictness::Semi),
            Err(Error::NotViolating)
        );
    }

    #[test]
    fn splitting_rank6() {
        let (fs, ps, _) = rank6();
        let Splitting::Splits { ray, .. } = check_splitting(&fs, &ps).unwrap() else {
            panic!()
        };
        assert_eq!(ray, [2, 1, 3].map(BigInt::from).to_vec());
    }

    #[test]
    fn splitting_single_pivot() {
        let (fs, _, _) = rank6();
        let ps = PivotSet::from_vecs(4, 4, &[vec![1, 2, 3, 4]]).unwrap();
        let Splitting::Splits { ray, extreme_rays } = check_splitting(&fs, &ps).unwrap() else {
            panic!()
        };
        assert_eq!(ray, vec![BigInt::one(); 3]);
        assert_eq!(extreme_rays.len(), 3);
    }

    #[test]
    fn splitting_two_pivots_and_no_certificate() {
        let fs = FiltrationSpec::new(
            2,
            SheafData::new(3, 0),
            vec![SheafData::new(1, 0), SheafData::new(2, 0)],
        );
        let ps = PivotSet::from_vecs(3, 2, &[vec![1, 3], vec![2, 2]]).unwrap();
        let Splitting::Splits { ray, .. } = check_splitting(&fs, &ps).unwrap() else {
            panic!()
        };
        assert_eq!(ray, vec![BigInt::one(), BigInt::one()]);

        let fs5 = FiltrationSpec::new(
            5,
            SheafData::new(3, 0),
            vec![SheafData::new(1, 0), SheafData::new(2, 0)],
        );
        let ps5 = PivotSet::from_vecs(
            3,
            5,
            &[
                vec![1, 1, 1, 3, 3],
                vec![1, 1, 2, 2, 3],
                vec![2, 2, 2, 2, 2],
            ],
        )
        .unwrap();
        assert_eq!(
            check_splitting(&fs5, &ps5).unwrap(),
            Splitting::NoCertificate
        );
    }

    #[test]
    fn pruning_sign_test() {
        // r = 6, a = 4, δ̄ = 1; the middle step has a nonnegative constant
        let fs = FiltrationSpec::new(
            4,
            SheafData::new(6, 6),
            vec![
                SheafData::new(1, 1),
                SheafData::new(3, -5),
                SheafData::new(5, 5),
            ],
        );
        let sp = StabilityParam::slope(int(1)).unwrap();
        assert_eq!(
            slope_values(&constants(&fs, &sp).unwrap()),
            [-4, 36, -20].map(int).to_vec()
        );
        let ps = PivotSet::from_vecs(
            4,
            4,
            &[vec![1, 1, 4, 4], vec![2, 2, 2, 4], vec![3, 3, 3, 3]],
        )
        .unwrap();
        let pr = prune_nonnegative(&fs, &ps, &sp).unwrap();
        assert_eq!(pr.kept, vec![1, 3]);
        assert_eq!(pr.removed.len(), 1);
        let (rank6_fs, rank6_ps, _) = rank6();
        let unchanged = prune_nonnegative(&rank6_fs, &rank6_ps, &sp).unwrap();
        assert_eq!(unchanged.kept, vec![1, 2, 3]);
        assert_eq!(unchanged.reduced.unwrap().1, rank6_ps);
    }

    #[test]
    fn pruning_everything() {
        let fs = FiltrationSpec::new(1, SheafData::new(2, 0), vec![SheafData::new(1, -10)]);
        let ps = PivotSet::from_vecs(2, 1, &[vec![2]]).unwrap();
        let pr = prune_nonnegative(&fs, &ps, &StabilityParam::slope(int(1)).unwrap()).unwrap();
        assert!(pr.reduced.is_none());
    }

    #[test]
    fn criticality() {
        let (fs, ps, _) = rank6();
        let w = WeightVector::from_ints(&[4, 2, 6]).unwrap();
        assert!(is_critical(&fs, &ps, &w).unwrap());
        let single = PivotSet::from_vecs(4, 4, &[vec![1, 2, 3, 4]]).unwrap();
        assert!(!is_critical(&fs, &single, &w).unwrap());
    }

    #[test]
    fn weights_must_be_positive() {
        assert_eq!(
            WeightVector::from_ints(&[1, 0]),
            Err(Error::NonPositiveWeight(2))
        );
    }
}
