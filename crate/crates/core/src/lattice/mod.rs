//! Exact integer and rational linear algebra, and finitely generated
//! abelian groups presented by relation matrices.

mod echelon;
mod group;
mod matrix;
mod rational;
mod snf;

pub use echelon::RowEchelon;
pub use group::{coker, hom_apply, hom_preimage, AbElement, AbGroup};
pub use matrix::IntMatrix;
pub use rational::{
    frac, int_rank, lp_feasible, rat_vec, rational_rank, solve_rational, solve_rational_nonneg, to_rational, RatMatrix,
    VarSign,
};
pub use snf::{smith_normal_form, solve_integer, SnfDecomposition};

/// Coefficient ring for graded linear algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coefficients {
    Integers,
    Rationals,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("infinite group")]
    InfiniteGroup,
    #[error("columns are linearly dependent")]
    DependentColumns,
}
