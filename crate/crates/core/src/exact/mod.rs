//! Exact arithmetic kernel: rationals, sparse Laurent polynomials, the
//! graded-commutative algebra of cochains, and exact linear algebra.

pub mod grading;
pub mod linalg;
pub mod poly;
pub mod superalg;

pub use grading::{graded_block_split, BlockLabel, GenGrade, GradingVector};
pub use linalg::{exact_kernel_and_rank, sparse_rank, Matrix, RankAccumulator, SparseVec};
pub use poly::{int, rat, Monomial, PolyRing, Rational, SparsePoly, Var};
pub use superalg::{
    super_derivation_apply, DerivationTable, OddVar, Parity, SuperElement, SuperMonomial,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("negative exponent on non-invertible variable {var}")]
    NegativeExponent { var: String },
    #[error("unknown variable {var}")]
    UnknownVariable { var: Var },
    #[error("substitution of a negative power needs a unit image for variable {var}")]
    NotAUnit { var: Var },
    #[error("derivation table has no image for generator {generator}")]
    MissingGenerator { generator: String },
}
