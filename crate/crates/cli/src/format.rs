//! JSON instance and report formats.
//!
//! Rationals travel as `"p/q"` strings (plain integers are also accepted on
//! input); polynomials as coefficient arrays, constant term first.

use std::fmt;

use destab::arith::{format_rat, int, parse_rat};
use destab::p1::{ClassifyRow, FlagVerdict, KValues, P1Tensor, P1Verdict};
use destab::stability::{
    CheckVerdict, Classification, KCheck, Reduction, ReductionStep, RegionOutcome, RegionTrace,
    Strictness, WeightVector,
};
use destab::{
    Error, FiltrationSpec, OrderedTuple, PivotSet, Rat, SheafData, StabilityParam, StabilityValue,
    UniPoly,
};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A rational that serializes as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRat(pub Rat);

impl Serialize for ExactRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for ExactRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExactRat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExactRat, E> {
                parse_rat(v)
                    .map(ExactRat)
                    .map_err(|_| E::custom(format!("invalid rational {v:?}")))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExactRat, E> {
                Ok(ExactRat(int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExactRat, E> {
                i64::try_from(v)
                    .map(|v| ExactRat(int(v)))
                    .map_err(|_| E::custom("integer out of range"))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExactRat, E> {
                Err(E::custom(format!(
                    "floating-point value {v} is not exact; write it as \"p/q\""
                )))
            }
        }
        d.deserialize_any(V)
    }
}

fn rats(v: &[Rat]) -> Vec<ExactRat> {
    v.iter().cloned().map(ExactRat).collect()
}

fn poly(coeffs: &[ExactRat]) -> UniPoly {
    UniPoly::from_coeffs(coeffs.iter().map(|c| c.0.clone()).collect())
}

fn poly_out(p: &UniPoly) -> Vec<ExactRat> {
    rats(p.coeffs())
}

fn tuple_out(p: &OrderedTuple) -> Vec<usize> {
    p.entries().to_vec()
}

fn pivots_out(ps: &PivotSet) -> Vec<Vec<usize>> {
    ps.pivots().iter().map(tuple_out).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Slope,
    Hilbert,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafFile {
    pub rank: usize,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<Vec<ExactRat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Scalar(ExactRat),
    Poly(Vec<ExactRat>),
}

impl From<&StabilityValue> for Number {
    fn from(v: &StabilityValue) -> Self {
        match v {
            StabilityValue::Slope(r) => Number::Scalar(ExactRat(r.clone())),
            StabilityValue::Hilbert(p) => Number::Poly(poly_out(p)),
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub mode: Mode,
    pub arity: usize,
    #[serde(default = "one")]
    pub multiplicity: usize,
    pub total: SheafFile,
    pub steps: Vec<SheafFile>,
    pub delta: Number,
    pub pivots: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<ExactRat>>,
}

/// A parsed instance, ready for the library.
#[derive(Clone, Debug)]
pub struct Problem {
    pub fs: FiltrationSpec,
    pub ps: PivotSet,
    pub sp: StabilityParam,
    pub weights: Option<WeightVector>,
}

/// An input problem located at a field.
#[derive(Debug)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for FieldError {}

fn field_err(field: impl Into<String>, e: impl fmt::Display) -> FieldError {
    FieldError {
        field: field.into(),
        message: e.to_string(),
    }
}

impl SheafFile {
    fn to_data(&self) -> SheafData {
        SheafData {
            rank: self.rank,
            degree: self.degree,
            hilbert: self.hilbert.as_deref().map(poly),
        }
    }

    fn from_data(d: &SheafData) -> Self {
        Self {
            rank: d.rank,
            degree: d.degree,
            hilbert: d.hilbert.as_ref().map(poly_out),
        }
    }
}

impl InstanceFile {
    pub fn to_problem(&self) -> Result<Problem, FieldError> {
        let fs = FiltrationSpec {
            arity: self.arity,
            multiplicity: self.multiplicity,
            total: self.total.to_data(),
            steps: self.steps.iter().map(SheafFile::to_data).collect(),
        };
        fs.validate().map_err(|e| field_err("steps", e))?;
        let sp = match (self.mode, &self.delta) {
            (Mode::Slope, Number::Scalar(d)) => StabilityParam::slope(d.0.clone()),
            (Mode::Slope, Number::Poly(_)) => {
                return Err(field_err("delta", "slope mode needs a scalar \"p/q\""));
            }
            (Mode::Hilbert, Number::Scalar(d)) => {
                StabilityParam::hilbert(UniPoly::constant(d.0.clone()))
            }
            (Mode::Hilbert, Number::Poly(c)) => StabilityParam::hilbert(poly(c)),
        }
        .map_err(|e| field_err("delta", e))?;
        if self.mode == Mode::Hilbert {
            if self.total.hilbert.is_none() {
                return Err(field_err("total.hilbert", "required in hilbert mode"));
            }
            if let Some(i) = self.steps.iter().position(|s| s.hilbert.is_none()) {
                return Err(field_err(
                    format!("steps[{i}].hilbert"),
                    "required in hilbert mode",
                ));
            }
        }
        let t = fs.levels();
        let mut tuples = Vec::with_capacity(self.pivots.len());
        for (i, p) in self.pivots.iter().enumerate() {
            let tuple =
                OrderedTuple::new(p.clone()).map_err(|e| field_err(format!("pivots[{i}]"), e))?;
            if tuple.arity() != self.arity {
                let e = Error::ArityMismatch {
                    expected: self.arity,
                    got: tuple.arity(),
                };
                return Err(field_err(format!("pivots[{i}]"), e));
            }
            if let Some(&bad) = p.iter().find(|&&e| e > t) {
                return Err(field_err(
                    format!("pivots[{i}]"),
                    Error::LevelOutOfRange { level: bad, max: t },
                ));
            }
            tuples.push(tuple);
        }
        let ps = PivotSet::new(t, self.arity, tuples).map_err(|e| field_err("pivots", e))?;
        let weights = match &self.weights {
            None => None,
            Some(w) => {
                if w.len() != fs.len() {
                    let e = Error::SizeMismatch {
                        expected: fs.len(),
                        got: w.len(),
                    };
                    return Err(field_err("weights", e));
                }
                Some(
                    WeightVector::new(w.iter().map(|x| x.0.clone()).collect())
                        .map_err(|e| field_err("weights", e))?,
                )
            }
        };
        Ok(Problem {
            fs,
            ps,
            sp,
            weights,
        })
    }

    pub fn from_problem(p: &Problem) -> Self {
        let (mode, delta) = match &p.sp {
            StabilityParam::Slope(d) => (Mode::Slope, Number::Scalar(ExactRat(d.clone()))),
            StabilityParam::Hilbert(q) => (Mode::Hilbert, Number::Poly(poly_out(q))),
        };
        Self {
            mode,
            arity: p.fs.arity,
            multiplicity: p.fs.multiplicity,
            total: SheafFile::from_data(&p.fs.total),
            steps: p.fs.steps.iter().map(SheafFile::from_data).collect(),
            delta,
            pivots: pivots_out(&p.ps),
            weights: p.weights.as_ref().map(|w| rats(w.as_slice())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrictnessOut {
    Semi,
    Stable,
}

impl From<Strictness> for StrictnessOut {
    fn from(s: Strictness) -> Self {
        match s {
            Strictness::Semi => Self::Semi,
            Strictness::Stable => Self::Stable,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationOut {
    pub weights: Vec<ExactRat>,
    pub value: Number,
    #[serde(rename = "R")]
    pub r: ExactRat,
    pub attaining_pivot: Vec<usize>,
    pub mu: ExactRat,
    /// Present when the full table fits under the enumeration guard.
    pub mu_via_gamma: Option<ExactRat>,
    pub critical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionOut {
    pub pivot: Vec<usize>,
    pub vertex_count: usize,
    pub min_value: Option<Number>,
    pub min_vertex: Option<Vec<ExactRat>>,
    pub outcome: String,
}

impl From<&RegionTrace> for RegionOut {
    fn from(r: &RegionTrace) -> Self {
        let outcome = match r.outcome {
            RegionOutcome::NoPositivePoint => "no_positive_point",
            RegionOutcome::Negative => "negative",
            RegionOutcome::Zero => "zero",
            RegionOutcome::Positive => "positive",
        };
        Self {
            pivot: tuple_out(&r.pivot),
            vertex_count: r.vertex_count,
            min_value: r.min_value.as_ref().map(Number::from),
            min_vertex: r.min_vertex.as_deref().map(rats),
            outcome: outcome.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionOut {
    pub classification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_subset: Option<Vec<usize>>,
    pub min_value: Number,
    pub witness: Vec<ExactRat>,
    pub attaining_pivot: Vec<usize>,
    pub violating_weight: Option<Vec<ExactRat>>,
    pub violating_value: Option<Number>,
    pub violated: bool,
    pub subfiltration_violated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<RegionOut>>,
}

impl DecisionOut {
    pub fn new(v: &CheckVerdict, trace: bool) -> Self {
        let boundary_subset = match &v.classification {
            Classification::BoundaryWitness(s) => Some(s.clone()),
            _ => None,
        };
        Self {
            classification: v.classification.name().into(),
            boundary_subset,
            min_value: Number::from(&v.min_value),
            witness: rats(&v.witness),
            attaining_pivot: tuple_out(&v.attaining_pivot),
            violating_weight: v.violating_weight.as_deref().map(rats),
            violating_value: v.violating_value.as_ref().map(Number::from),
            violated: v.violated(),
            subfiltration_violated: v.subfiltration_violated(),
            regions: trace.then(|| v.regions.iter().map(RegionOut::from).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KCheckOut {
    pub level: usize,
    pub k: usize,
    pub value: Number,
    pub holds: bool,
}

impl From<&KCheck> for KCheckOut {
    fn from(k: &KCheck) -> Self {
        Self {
            level: k.level,
            k: k.k,
            value: Number::from(&k.value),
            holds: k.holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub command: String,
    pub strictness: StrictnessOut,
    pub instance: InstanceFile,
    pub constants: Vec<Number>,
    pub k_checks: Vec<KCheckOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<DecisionOut>,
    pub violated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStepOut {
    pub removed: usize,
    pub remaining: Vec<usize>,
    pub classification: String,
    pub violated: bool,
}

impl From<&ReductionStep> for TraceStepOut {
    fn from(s: &ReductionStep) -> Self {
        Self {
            removed: s.removed,
            remaining: s.remaining.clone(),
            classification: s.classification.name().into(),
            violated: s.violated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceReport {
    pub command: String,
    pub strictness: StrictnessOut,
    pub instance: InstanceFile,
    pub subset: Vec<usize>,
    pub pivots: Vec<Vec<usize>>,
    pub decision: DecisionOut,
    pub trace: Vec<TraceStepOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl ReduceReport {
    pub fn new(
        instance: InstanceFile,
        strictness: Strictness,
        red: &Reduction,
        trace: bool,
    ) -> Self {
        Self {
            command: "reduce".into(),
            strictness: strictness.into(),
            instance,
            subset: red.subset.clone(),
            pivots: pivots_out(&red.pivots),
            decision: DecisionOut::new(&red.verdict, trace),
            trace: red.trace.iter().map(TraceStepOut::from).collect(),
            elapsed_ms: None,
        }
    }
}

fn one_rat() -> ExactRat {
    ExactRat(int(1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct P1File {
    pub degrees: [i64; 3],
    pub support: Vec<[usize; 3]>,
    #[serde(default = "one_rat")]
    pub delta: ExactRat,
}

impl P1File {
    pub fn to_tensor(&self) -> P1Tensor {
        P1Tensor::new(
            self.degrees,
            self.support.iter().copied(),
            self.delta.0.clone(),
        )
    }

    pub fn from_tensor(t: &P1Tensor) -> Self {
        Self {
            degrees: t.degrees,
            support: t.support.iter().copied().collect(),
            delta: ExactRat(t.delta.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KOut {
    pub single: [usize; 3],
    /// `k_12`, `k_13`, `k_23`.
    pub pair: [usize; 3],
}

impl From<&KValues> for KOut {
    fn from(k: &KValues) -> Self {
        Self {
            single: k.single,
            pair: k.pair,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagOut {
    pub flag: String,
    pub pivots: Vec<Vec<usize>>,
    pub decision: DecisionOut,
    pub k_checks: Vec<KCheckOut>,
    pub violated: bool,
    pub violation: Option<String>,
}

impl FlagOut {
    fn new(f: &FlagVerdict, trace: bool) -> Self {
        Self {
            flag: f.to_string(),
            pivots: pivots_out(&f.pivots),
            decision: DecisionOut::new(&f.verdict, trace),
            k_checks: f.k_checks.iter().map(KCheckOut::from).collect(),
            violated: f.violated(),
            violation: f.violation(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Report {
    pub command: String,
    pub strictness: StrictnessOut,
    pub tensor: P1File,
    pub semistable: bool,
    pub violation: Option<String>,
    pub k: KOut,
    pub flags: Vec<FlagOut>,
}

impl P1Report {
    pub fn new(tensor: &P1Tensor, k: &KValues, verdict: &P1Verdict, trace: bool) -> Self {
        Self {
            command: "p1 check".into(),
            strictness: verdict.strictness.into(),
            tensor: P1File::from_tensor(tensor),
            semistable: verdict.semistable(),
            violation: verdict.first_violation(),
            k: k.into(),
            flags: verdict
                .flags
                .iter()
                .map(|f| FlagOut::new(f, trace))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowOut {
    pub degrees: [i64; 3],
    pub support: Vec<[usize; 3]>,
    pub k: KOut,
    pub semistable: bool,
    pub violation: Option<String>,
}

impl From<&ClassifyRow> for RowOut {
    fn from(r: &ClassifyRow) -> Self {
        Self {
            degrees: r.degrees,
            support: r.support.iter().copied().collect(),
            k: (&r.k).into(),
            semistable: r.semistable,
            violation: r.violation.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub command: String,
    pub delta: ExactRat,
    pub bound: u32,
    /// Distinct degree triples having at least one semistable support.
    pub semistable_degrees: Vec<[i64; 3]>,
    pub rows: Vec<RowOut>,
}

pub(crate) fn rats_out(v: &[Rat]) -> Vec<ExactRat> {
    rats(v)
}

pub(crate) fn tuple_vec(p: &OrderedTuple) -> Vec<usize> {
    tuple_out(p)
}
