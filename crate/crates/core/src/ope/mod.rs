//! Chiral OPE calculus on canonical normal-ordered monomials.

mod algebra;
mod basis;
mod check;
mod engine;
mod field;
mod file;

pub use algebra::{Generator, Grading, OpeAlgebra, Parity};
pub use basis::{is_total_derivative, min_weight, reduce_mod_derivatives, weight_basis, DerivativeReduction};
pub use check::{
    apply_automorphism, central_charge, jacobi_bound, jacobi_check, off_grade, primary_check, series_is_graded,
    validate_table, IssueKind, JacobiReport, PrimaryFailure, SignMap, TableIssue, TableReport,
};
pub use engine::{OpeEngine, DEFAULT_FUEL};
pub use field::{Factor, FieldExpr, FieldMonomial, PoleSeries};
pub use file::{parse_algebra, parse_algebra_with, parse_field_expr};

use thiserror::Error;

use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpeError {
    #[error("no OPE given for the pair ({a}, {b})")]
    MissingPair { a: String, b: String },
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("generator {0} declared twice")]
    DuplicateGenerator(String),
    #[error("rewriting did not terminate within the fuel limit")]
    FuelExhausted,
    #[error("graded slice is infinite: {0}")]
    InfiniteSlice(String),
    #[error("{0}")]
    Scalar(#[from] ScalarError),
    #[error("{0}")]
    Invalid(String),
}
