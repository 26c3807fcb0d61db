//! Remainder-certified asymptotic expansions for ultraholomorphic Carleman
//! classes with uniform asymptotics.
//!
//! The numeric core is generic over the scalar type: exact rationals
//! ([`Rational`]), binary doubles, and MPFR-backed arbitrary precision
//! ([`Mpf`]). Type aliases at the crate root pick the usual instantiations.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the summation formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod basis_fn;
pub mod char_transform;
pub mod combinatorics;
pub mod error;
pub mod expansion;
pub mod io;
pub mod mpf;
pub mod scalar;
pub mod sector;
pub mod series;
pub mod verify;
pub mod weight_seq;

pub use error::{Error, Result};
pub use mpf::Mpf;
pub use scalar::{Precision, Rational, Real, Scalar};
pub use weight_seq::{Generator, TwoParamFit, WeightSequence};

pub use expansion::CertifiedExpansion;

/// Exact rational instantiations.
pub type ExpansionQ = CertifiedExpansion<Rational>;
pub type SequenceQ = WeightSequence<Rational>;

/// Arbitrary-precision instantiations.
pub type ExpansionMp = CertifiedExpansion<Mpf>;
pub type SequenceMp = WeightSequence<Mpf>;

/// Double-precision instantiations.
pub type ExpansionF64 = CertifiedExpansion<f64>;
pub type SequenceF64 = WeightSequence<f64>;
