//! Exact stability arithmetic for tensor sheaves.
//!
//! A tensor `(E, φ)` is reduced to discrete data: the ranks, degrees (or
//! Hilbert polynomials) of a filtration `0 ⊊ E_1 ⊊ … ⊊ E_s ⊊ E`, and the
//! antichain of *pivots* recording on which ordered `a`-tuples of filtration
//! levels the morphism `φ` survives. Everything here is computed with
//! arbitrary-precision rationals; no floating point is used anywhere.
//!
//! Module map:
//!
//! - [`arith`]: rationals and polynomials ordered asymptotically.
//! - [`poset`]: ordered tuples, the dominance order and pivot sets.
//! - [`filtration`]: filtration data and the stability parameter.
//! - [`stability`]: constants, `μ`, the objective, exact decisions over the
//!   weight simplex, reduction to subfiltrations, splitting and pruning.
//! - [`combinatorics`]: bounded partitions, maximal antichains, q-binomials.
//! - [`p1`]: split rank-3 tensors of arity 3 on the projective line.

pub mod arith;
pub mod combinatorics;
mod error;
pub mod filtration;
pub mod p1;
pub mod polytope;
pub mod poset;
pub mod stability;

pub use arith::{format_rat, parse_rat, Rat, UniPoly};
pub use error::{Error, Result};
pub use filtration::{FiltrationSpec, SheafData, StabilityParam};
pub use poset::{OrderedTuple, PivotSet, PivotTable, TupleRelation};
pub use stability::{
    CheckVerdict, Classification, GammaVector, StabilityValue, Strictness, WeightVector,
};

/// Default cap on the number of ordered tuples enumerated by exhaustive routines.
pub const DEFAULT_ENUMERATION_GUARD: usize = 100_000;
