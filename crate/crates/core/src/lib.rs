//! Jet rings of affine Poisson varieties, the induced Poisson vertex
//! λ-bracket, lifted Lie algebroid complexes on the loop space, and their
//! δ-reduced cohomology computed block by block with exact linear algebra.

pub mod exact;
pub mod jet;
pub mod poisson;
pub mod lambda;
pub mod complex;
pub mod lc;

/// Any error raised by the library, tagged with the module it came from.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("exact-core: {0}")]
    Exact(#[from] exact::ExactError),
    #[error("jet-core: {0}")]
    Jet(#[from] jet::JetError),
    #[error("poisson-algebroid: {0}")]
    Poisson(#[from] poisson::PoissonError),
    #[error("lambda-bracket: {0}")]
    Lambda(#[from] lambda::LambdaError),
    #[error("loop-complex: {0}")]
    Complex(#[from] complex::ComplexError),
    #[error("lc-cohomology: {0}")]
    Lc(#[from] lc::LcError),
}
