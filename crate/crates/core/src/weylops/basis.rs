use serde::Serialize;

use super::{DiffOperator, Polynomial};
use crate::classical::{ClassicalCase, FamilyData};
use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Rational};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    Monomial,
    Jacobi {
        #[serde(with = "crate::exactnum::serde_rational")]
        omega1: Rational,
        #[serde(with = "crate::exactnum::serde_rational")]
        omega2: Rational,
    },
    Laguerre {
        #[serde(with = "crate::exactnum::serde_rational")]
        a: Rational,
    },
    Hermite,
}

/// Monic polynomial basis of degrees `0..size`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub size: usize,
}

impl BasisSpec {
    pub fn new(kind: BasisKind, size: usize) -> Self {
        Self { kind, size }
    }

    pub fn monomial(size: usize) -> Self {
        Self::new(BasisKind::Monomial, size)
    }

    /// The eigenbasis of the classical operator for `case`.
    pub fn for_case(case: &ClassicalCase, size: usize) -> Self {
        let kind = match case {
            ClassicalCase::Hypergeometric { .. } => {
                let (omega1, omega2) = case.omegas().expect("hypergeometric case has omegas");
                BasisKind::Jacobi { omega1, omega2 }
            }
            ClassicalCase::Laguerre { a } => BasisKind::Laguerre { a: a.clone() },
            ClassicalCase::Hermite => BasisKind::Hermite,
        };
        Self::new(kind, size)
    }

    pub fn with_size(&self, size: usize) -> Self {
        Self::new(self.kind.clone(), size)
    }

    pub fn polys(&self) -> Result<Vec<Polynomial<Rational>>> {
        let case = match &self.kind {
            BasisKind::Monomial => {
                return Ok((0..self.size)
                    .map(|k| Polynomial::monomial(k, num_traits::One::one()))
                    .collect())
            }
            BasisKind::Jacobi { omega1, omega2 } => ClassicalCase::from_omegas(omega1, omega2),
            BasisKind::Laguerre { a } => ClassicalCase::Laguerre { a: a.clone() },
            BasisKind::Hermite => ClassicalCase::Hermite,
        };
        if self.size == 0 {
            return Ok(Vec::new());
        }
        FamilyData::new(case).polys(self.size - 1)
    }

    /// Columns are the monomial coefficients of the basis polynomials.
    pub fn to_monomial(&self) -> Result<Matrix<Rational>> {
        let polys = self.polys()?;
        let cols: Vec<Vec<Rational>> = polys
            .iter()
            .map(|p| (0..self.size).map(|k| p.coeff(k)).collect())
            .collect();
        Ok(Matrix::from_columns(&cols, self.size))
    }

    /// Column `k` expands `x^k` in this basis.
    pub fn from_monomial(&self) -> Result<Matrix<Rational>> {
        let polys = self.polys()?;
        let cols = (0..self.size)
            .map(|k| {
                expand_in_basis(&Polynomial::monomial(k, num_traits::One::one()), &polys)
                    .expect("x^k lies in the span of a monic basis of size > k")
            })
            .collect::<Vec<_>>();
        Ok(Matrix::from_columns(&cols, self.size))
    }
}

/// Coordinates of `p` in a monic triangular basis, or the offending degree.
pub fn expand_in_basis(
    p: &Polynomial<Rational>,
    basis: &[Polynomial<Rational>],
) -> std::result::Result<Vec<Rational>, usize> {
    let mut coords = vec![num_traits::Zero::zero(); basis.len()];
    let mut rest = p.clone();
    while let Some(d) = rest.degree() {
        if d >= basis.len() {
            return Err(d);
        }
        let c = rest.coeff(d);
        rest = &rest - &basis[d].scale(&c);
        coords[d] = c;
    }
    Ok(coords)
}

/// Square matrix of `op` on the basis: column `n` expands `op(basis_n)`.
pub fn op_matrix(op: &DiffOperator<Rational>, basis: &BasisSpec) -> Result<Matrix<Rational>> {
    op_matrix_between(op, basis, basis.size)
}

/// Matrix of `op` from the first `domain` basis elements into the span of
/// all `basis.size` elements (rectangular when `domain < basis.size`).
pub fn op_matrix_between(
    op: &DiffOperator<Rational>,
    basis: &BasisSpec,
    domain: usize,
) -> Result<Matrix<Rational>> {
    if domain > basis.size {
        return Err(Error::Dimension(format!(
            "domain {domain} exceeds basis size {}",
            basis.size
        )));
    }
    let polys = basis.polys()?;
    let mut cols = Vec::with_capacity(domain);
    for (n, p) in polys.iter().take(domain).enumerate() {
        let image = op.apply(p);
        let coords = expand_in_basis(&image, &polys)
            .map_err(|degree| Error::SpaceNotPreserved { column: n, degree })?;
        cols.push(coords);
    }
    Ok(Matrix::from_columns(&cols, basis.size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn hyp_l() -> DiffOperator<Rational> {
        FamilyData::new(ClassicalCase::Hypergeometric { nu1: int(-5), nu2: int(2) }).operator()
    }

    #[test]
    fn x_escapes_monomial_span() {
        let err = op_matrix(&DiffOperator::x(), &BasisSpec::monomial(3)).unwrap_err();
        assert_eq!(err, Error::SpaceNotPreserved { column: 2, degree: 3 });
    }

    #[test]
    fn hypergeometric_is_diagonal_on_jacobi() {
        let basis = BasisSpec::new(BasisKind::Jacobi { omega1: int(1), omega2: int(2) }, 4);
        let m = op_matrix(&hyp_l(), &basis).unwrap();
        let mut expected = Matrix::zeros(4, 4);
        for (n, lam) in [0, -5, -12, -21].into_iter().enumerate() {
            expected[(n, n)] = int(lam);
        }
        assert_eq!(m, expected);
    }

    #[test]
    fn degree_preserving_operator_is_upper_triangular_on_monomials() {
        let m = op_matrix(&hyp_l(), &BasisSpec::monomial(6)).unwrap();
        for (i, j, v) in m.entries() {
            if i > j {
                assert_eq!(*v, int(0));
            }
        }
        assert_eq!(m[(3, 3)], int(-3 * 7));
    }

    #[test]
    fn basis_change_round_trips() {
        for kind in [
            BasisKind::Jacobi { omega1: rat(1, 3), omega2: rat(-1, 2) },
            BasisKind::Laguerre { a: rat(5, 2) },
            BasisKind::Hermite,
            BasisKind::Monomial,
        ] {
            let b = BasisSpec::new(kind, 7);
            let to = b.to_monomial().unwrap();
            let from = b.from_monomial().unwrap();
            assert_eq!(to.mul(&from), Matrix::identity(7));
            assert_eq!(from.mul(&to), Matrix::identity(7));
        }
    }

    #[test]
    fn rectangular_matrix_captures_raised_degree() {
        let basis = BasisSpec::monomial(4);
        let m = op_matrix_between(&DiffOperator::x(), &basis, 3).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 3));
        assert_eq!(m[(3, 2)], int(1));
    }
}
