//! Exact umbral calculus on a finite-site model of a distribution space.
//!
//! Everything here is computed over arbitrary-precision rationals, so every
//! identity (binomial law, Sheffer expansions, operator isomorphism,
//! orthogonality) is checked as an exact equality rather than to a tolerance.
//!
//! The layers, bottom to top:
//!
//! * [`series`] — truncated formal power series in one variable: product,
//!   composition, compositional inverse, reciprocal, and the named series
//!   (exponential, `log(1+u)`, the Abel inverse, ...).
//! * [`tensor`] — symmetric tensors over `m` sites with multiset-indexed
//!   coefficients: the concrete carrier for tensor powers `ω⊗…⊗ω`, test
//!   function coefficients and all polynomial kernels.
//! * [`tenseries`] — truncated scalar- and vector-valued tensor power series
//!   with their product, reciprocal, compositions and compositional inverse.
//! * [`family`] — binomial-type polynomial families built from a vector
//!   series: coefficient arrays, basis changes, lowering and shift operators,
//!   and the isomorphism between shift-invariant operators and coefficient
//!   sequences.
//! * [`lifted`] — diagonal lifting of classical one-dimensional families
//!   (falling/rising factorials, Abel, Laguerre) and the set-partition
//!   evaluators that come with them.
//! * [`sheffer`] — Sheffer families on top of a binomial family (Hermite,
//!   Charlier, orthogonal Laguerre) and exact moment-based orthogonality.
//! * [`verify`] — seeded identity suites used by the CLI and the acceptance
//!   tests.

pub mod combinat;
pub mod error;
pub mod family;
pub mod json;
pub mod lifted;
pub mod rational;
pub mod series;
pub mod sheffer;
pub mod tenseries;
pub mod tensor;
pub mod verify;

pub use error::{Result, UmbraError};
pub use rational::Rational;

/// Default truncation degree for series arithmetic when nothing else is
/// configured (the CLI honours `UMBRA_DEGREE`).
pub const DEFAULT_DEGREE: usize = 8;
