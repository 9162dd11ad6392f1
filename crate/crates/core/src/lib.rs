pub mod brst;
pub mod cft;
pub mod linalg;
pub mod oracle;
pub mod ope;
pub mod qla;
pub mod scalar;
pub mod syntax;

pub use ope::{FieldExpr, FieldMonomial, OpeAlgebra, OpeEngine, OpeError, Parity, PoleSeries};
pub use scalar::{rational_roots, rat, Monomial, MultiPoly, Rational, RationalFunction, Var};
