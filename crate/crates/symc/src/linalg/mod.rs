//! Exact linear algebra over `ℚ` and `ℚ(i)`.
//!
//! The kernel everything else stands on: Gaussian-rational scalars, dense
//! matrices, reduced-row-echelon subspaces with canonical bases, polynomial
//! arithmetic (minimal polynomials, squarefree parts, Bézout identities), and
//! seeded random sampling.  All arithmetic is exact; there are no floats
//! anywhere in the crate.

mod matrix;
mod modular;
mod poly;
mod sample;
mod scalar;
mod subspace;

pub use matrix::{minimal_polynomial, Matrix};
pub use poly::Polynomial;
pub use sample::{
    random_int_scalar, random_int_vector, random_matrix, random_scalar, random_vector,
    SeedMixer,
};
pub use scalar::Scalar;
pub use subspace::{CoordinateFrame, Subspace};

pub(crate) use modular::bracket_closure_certified;
pub(crate) use subspace::{size_reduce_rows, EchelonAccumulator};
