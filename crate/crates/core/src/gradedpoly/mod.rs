//! Graded polynomial presentations with integer or rational coefficients,
//! answered one degree at a time by exact linear algebra.

mod piece;
mod poly;
mod presentation;

pub use piece::{GradedIdeal, GradedPieceReport, Piece};
pub use poly::{monomial_degree, monomials_of_degree, occurring_degrees, Monomial, Poly, PolyDisplay};
pub use presentation::{Generator, IdealComparison, Provenance, RingPresentation, Variable, Witness};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GradedError {
    #[error("nonpositive variable degree (variable {0})")]
    NonpositiveDegree(usize),
    #[error("generator {0} is not homogeneous")]
    Inhomogeneous(usize),
    #[error("mismatched variables")]
    MismatchedVariables,
    #[error("mismatched coefficient domains")]
    MismatchedCoefficients,
    #[error("generator has the wrong number of variables")]
    VariableCount,
}
