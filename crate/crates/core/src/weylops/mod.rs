//! Polynomials, differential operators with polynomial coefficients, and
//! their matrices in monomial or classical orthogonal-polynomial bases.

mod basis;
mod operator;
mod poly;

pub use basis::{expand_in_basis, op_matrix, op_matrix_between, BasisKind, BasisSpec};
pub use operator::DiffOperator;
pub use poly::Polynomial;
