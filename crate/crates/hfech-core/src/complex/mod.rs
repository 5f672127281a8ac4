//! Graded chain complexes over Z with relative Z/pZ gradings, signed
//! tensor products, filtration sub/quotients, long exact sequences, and
//! algebraic Morse reduction.

mod graded;
mod homology;
mod les;
mod morse;

pub use graded::{Commutation, GradedComplex, GradedEndo, Ses};
pub use homology::{induced_between, ComplexHomology, Slice};
pub use les::{
    connecting_map, les_gradings, long_exact_sequence, long_exact_sequence_precomputed,
    ses_homology, ExactnessFailure, LesNode, LesRow, SesHomology, Slot,
};
pub use morse::{morse_reduce, morse_reduce_greedy, MorseError, MorseReduction};

use crate::algebra::AlgebraError;
use crate::label::Label;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ComplexError {
    #[error("duplicate basis label {0}")]
    DuplicateLabel(Label),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("grading moduli {0} and {1} are incompatible")]
    GradingMismatch(u32, u32),
    #[error("not a subcomplex: differential of {from} escapes to {to}")]
    NotSubcomplex { from: Label, to: Label },
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A violation found by `verify`, with a witness basis element.
#[derive(Debug, Clone, Error)]
pub enum ComplexViolation {
    #[error("differential does not square to zero at {witness}")]
    NotSquareZero { witness: Label },
    #[error("differential entry {from} -> {to} does not lower the grading by 1")]
    WrongDegree { from: Label, to: Label },
    #[error("endomorphism entry {from} -> {to} violates its declared degree")]
    EndoDegree { from: Label, to: Label },
    #[error("endomorphism does not satisfy its declared commutation rule at {witness}")]
    EndoCommutation { witness: Label },
}
