//! Exact coefficients: rationals, sparse polynomials and rational functions
//! in named parameters.

mod poly;
mod ratfun;
mod roots;
mod vars;

pub use poly::{Monomial, MultiPoly, Rational};
pub use ratfun::RationalFunction;
pub use roots::rational_roots;
pub use vars::Var;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution hits a pole of {expr}")]
    Pole { expr: String },
    #[error("polynomial is not univariate (variables: {})", vars.join(", "))]
    NotUnivariate { vars: Vec<String> },
    #[error("the zero polynomial has every value as a root")]
    ZeroPolynomial,
    #[error("coefficients too large for rational-root enumeration")]
    CoefficientTooLarge,
}

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
