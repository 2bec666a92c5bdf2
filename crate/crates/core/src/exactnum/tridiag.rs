use serde::Serialize;

use super::{Matrix, Rational, Scalar};
use crate::error::{Error, Result};
use crate::weylops::Polynomial;

/// Tridiagonal matrix: `sup[k]` sits at `(k, k+1)`, `sub[k]` at `(k+1, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct TridiagMatrix<T> {
    pub diag: Vec<T>,
    pub sup: Vec<T>,
    pub sub: Vec<T>,
}

impl<T: Scalar> TridiagMatrix<T> {
    pub fn new(diag: Vec<T>, sup: Vec<T>, sub: Vec<T>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || sup.len() + 1 != n || sub.len() + 1 != n {
            return Err(Error::Dimension(format!(
                "tridiagonal sizes diag={}, sup={}, sub={}",
                n,
                sup.len(),
                sub.len()
            )));
        }
        Ok(Self { diag, sup, sub })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let n = self.size();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i].clone();
            if i + 1 < n {
                m[(i, i + 1)] = self.sup[i].clone();
                m[(i + 1, i)] = self.sub[i].clone();
            }
        }
        m
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TridiagMatrix<U> {
        TridiagMatrix {
            diag: self.diag.iter().map(&f).collect(),
            sup: self.sup.iter().map(&f).collect(),
            sub: self.sub.iter().map(&f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            diag: self.diag.clone(),
            sup: self.sub.clone(),
            sub: self.sup.clone(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i].clone() * v[i].clone();
                if i > 0 {
                    acc = acc + self.sub[i - 1].clone() * v[i - 1].clone();
                }
                if i + 1 < n {
                    acc = acc + self.sup[i].clone() * v[i + 1].clone();
                }
                acc
            })
            .collect()
    }

    /// Products `sup[k]·sub[k]` of paired off-diagonal entries.
    pub fn off_diagonal_products(&self) -> Vec<T> {
        self.sup
            .iter()
            .zip(&self.sub)
            .map(|(a, b)| a.clone() * b.clone())
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].magnitude();
                if i > 0 {
                    s += self.sub[i - 1].magnitude();
                }
                if i + 1 < n {
                    s += self.sup[i].magnitude();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

impl TridiagMatrix<Rational> {
    /// Monic characteristic polynomial `det(tI - M)` by the continuant recurrence.
    pub fn char_poly(&self) -> Polynomial<Rational> {
        let t = Polynomial::x();
        let mut prev = Polynomial::one();
        let mut cur = &t - &Polynomial::constant(self.diag[0].clone());
        for k in 1..self.size() {
            let shifted = &t - &Polynomial::constant(self.diag[k].clone());
            let coupling = &self.sup[k - 1] * &self.sub[k - 1];
            let next = &(&shifted * &cur) - &prev.scale(&coupling);
            prev = cur;
            cur = next;
        }
        cur
    }

    pub fn to_f64(&self) -> TridiagMatrix<f64> {
        self.map(super::to_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    /// Characteristic polynomial by cofactor expansion of the dense matrix.
    fn dense_char_poly(m: &Matrix<Rational>) -> Polynomial<Rational> {
        fn det(entries: &[Vec<Polynomial<Rational>>]) -> Polynomial<Rational> {
            let n = entries.len();
            if n == 1 {
                return entries[0][0].clone();
            }
            let mut acc = Polynomial::zero();
            for j in 0..n {
                let minor: Vec<Vec<_>> = entries[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &entries[0][j] * &det(&minor);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        let n = m.rows();
        let entries: Vec<Vec<_>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = Polynomial::constant(-m[(i, j)].clone());
                        if i == j {
                            &c + &Polynomial::x()
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        det(&entries)
    }

    #[test]
    fn continuant_matches_cofactor_expansion() {
        let m = TridiagMatrix::new(
            vec![rat(33, 5), rat(193, 70), rat(-27, 7), int(2)],
            vec![int(3), rat(-1, 2), int(5)],
            vec![int(14), int(8), rat(2, 3)],
        )
        .unwrap();
        assert_eq!(m.char_poly(), dense_char_poly(&m.to_dense()));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(TridiagMatrix::new(vec![int(1)], vec![int(1)], vec![]).is_err());
        assert!(TridiagMatrix::<Rational>::new(vec![], vec![], vec![]).is_err());
    }
}
