//! Exact constructions and deciders for matrix-pair similarity, weak
//! similarity of pairs, two-dimensional commuting matrix spaces and the
//! metabelian Lie algebras of bordered matrices built from them.

pub mod error;
pub mod field;
pub mod json;
pub mod lie;
pub mod matrix;
pub mod pencil;
pub mod random;
pub mod reduction;
pub mod suite;
pub mod similarity;

pub use error::{Error, Result};
pub use field::{Field, FieldError, Scalar};
pub use matrix::{BlockGrid, Matrix, MatrixError, Rref};
pub use pencil::{PencilTransform, TwoDimSpace, WeakWitness};
pub use similarity::{BudgetReport, CertificateKind, Decision, MatrixPair, SearchBudget, Verdict};
pub use lie::{LieAlgebra, LieIso};
