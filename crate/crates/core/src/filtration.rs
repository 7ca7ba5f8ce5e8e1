//! Discrete filtration data and the stability parameter.

use num_traits::Signed;

use crate::arith::{Rat, UniPoly};
use crate::{Error, Result};

/// Rank, degree and optionally the Hilbert polynomial of a sheaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafData {
    pub rank: usize,
    pub degree: i64,
    pub hilbert: Option<UniPoly>,
}

impl SheafData {
    pub fn new(rank: usize, degree: i64) -> Self {
        Self {
            rank,
            degree,
            hilbert: None,
        }
    }

    pub fn with_hilbert(rank: usize, degree: i64, hilbert: UniPoly) -> Self {
        Self {
            rank,
            degree,
            hilbert: Some(hilbert),
        }
    }
}

/// A filtration `0 ⊊ E_1 ⊊ … ⊊ E_s ⊊ E` of a tensor of arity `a`.
///
/// Steps are numbered `1..=s`; level `s + 1` is the full sheaf. The
/// multiplicity `b` is carried along but never enters the arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationSpec {
    pub arity: usize,
    pub multiplicity: usize,
    pub total: SheafData,
    pub steps: Vec<SheafData>,
}

impl FiltrationSpec {
    pub fn new(arity: usize, total: SheafData, steps: Vec<SheafData>) -> Self {
        Self {
            arity,
            multiplicity: 1,
            total,
            steps,
        }
    }

    /// Length `s` of the filtration.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of levels `t = s + 1`.
    pub fn levels(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn rank(&self) -> usize {
        self.total.rank
    }

    /// Rank of the sheaf at `level`, with level `t` being `E` itself.
    pub fn rank_at_level(&self, level: usize) -> usize {
        if level > self.steps.len() {
            self.total.rank
        } else {
            self.steps[level - 1].rank
        }
    }

    /// The subfiltration keeping the (1-based, increasing) step indices in `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        Self {
            arity: self.arity,
            multiplicity: self.multiplicity,
            total: self.total.clone(),
            steps: keep.iter().map(|&i| self.steps[i - 1].clone()).collect(),
        }
    }

    /// Reports the first violated invariant.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidFiltration(msg));
        if self.arity < 1 {
            return bad("arity must be at least 1".into());
        }
        if self.multiplicity < 1 {
            return bad("multiplicity must be at least 1".into());
        }
        if self.total.rank < 1 {
            return bad("total rank must be at least 1".into());
        }
        let r = self.total.rank;
        let mut prev = 0usize;
        for (i, step) in self.steps.iter().enumerate() {
            if step.rank <= prev {
                return bad(format!(
                    "step {} has rank {} but ranks must strictly increase from {}",
                    i + 1,
                    step.rank,
                    prev
                ));
            }
            if step.rank >= r {
                return bad(format!(
                    "step {} has rank {} but must be below the total rank {r}",
                    i + 1,
                    step.rank
                ));
            }
            prev = step.rank;
        }
        if let Some(p) = &self.total.hilbert {
            let n = p.degree();
            if p.signum() != std::cmp::Ordering::Greater {
                return bad(
                    "total Hilbert polynomial must have positive leading coefficient".into(),
                );
            }
            for (i, step) in self.steps.iter().enumerate() {
                if let Some(q) = &step.hilbert {
                    if q.degree() != n || q.signum() != std::cmp::Ordering::Greater {
                        return bad(format!(
                            "step {} Hilbert polynomial must have degree {:?} and positive leading coefficient",
                            i + 1,
                            n
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Hilbert polynomials of `E` and of every step; errors if any is missing.
    pub(crate) fn hilbert_data(&self) -> Result<(UniPoly, Vec<UniPoly>)> {
        let missing = |what: String| {
            Error::ModeMismatch(format!("Hilbert mode needs a polynomial for {what}"))
        };
        let total = self
            .total
            .hilbert
            .clone()
            .ok_or_else(|| missing("the total sheaf".into()))?;
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.hilbert
                    .clone()
                    .ok_or_else(|| missing(format!("step {}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((total, steps))
    }
}

pub fn validate_filtration(fs: &FiltrationSpec) -> Result<()> {
    fs.validate()
}

/// Stability parameter: `δ̄` for slope stability or the polynomial `δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityParam {
    Slope(Rat),
    Hilbert(UniPoly),
}

impl StabilityParam {
    pub fn slope(delta: Rat) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "slope parameter must be positive, got {delta}"
            )));
        }
        Ok(Self::Slope(delta))
    }

    pub fn hilbert(delta: UniPoly) -> Result<Self> {
        if delta.signum() != std::cmp::Ordering::Greater {
            return Err(Error::InvalidParameter(format!(
                "Hilbert parameter must have positive leading coefficient, got {delta}"
            )));
        }
        Ok(Self::Hilbert(delta))
    }

    pub fn is_slope(&self) -> bool {
        matches!(self, Self::Slope(_))
    }

    /// The parameter as a polynomial (a constant in slope mode).
    pub fn as_poly(&self) -> UniPoly {
        match self {
            Self::Slope(d) => UniPoly::constant(d.clone()),
            Self::Hilbert(p) => p.clone(),
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        match self {
            Self::Slope(d) => Self::slope(d.clone()).map(|_| ()),
            Self::Hilbert(p) => Self::hilbert(p.clone()).map(|_| ()),
        }
    }
}
