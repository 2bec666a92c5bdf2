//! Scalar arithmetic and tridiagonal eigensolving.
//!
//! Everything that the algebraic identities touch is an exact [`Rational`].
//! Floating values appear only after an explicit conversion, for
//! eigenproblems whose roots are irrational.

mod eigen;
mod matrix;
mod roots;
mod tridiag;

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use eigen::{
    refined_eigenpairs, symmetrize_tridiag, tridiag_eigen, EigenMethod, RefinedEigenpair,
    RefinedSpectrum, Symmetrized, TridiagEigen, EIGEN_RESIDUAL_BOUND,
};
pub use matrix::Matrix;
pub use roots::{isolate_real_roots, squarefree_factors, sturm_sequence, RealRoot};
pub use tridiag::TridiagMatrix;

/// Exact rational scalar, arbitrary precision, always in lowest terms.
pub type Rational = BigRational;

/// Field operations shared by exact and floating scalars.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    fn magnitude(&self) -> f64;
}

impl Scalar for Rational {
    fn magnitude(&self) -> f64 {
        to_f64(self).abs()
    }
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Exact binary expansion of a finite float.
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(text.to_string());
    let trimmed = text.trim();
    let (numer, denom) = match trimmed.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (trimmed, "1"),
    };
    let numer: BigInt = numer.parse().map_err(|_| bad())?;
    let denom: BigInt = denom.parse().map_err(|_| bad())?;
    if !denom.is_positive() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

/// Formats as `"p/q"`, always with an explicit denominator.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Exact square root when `value` is the square of a rational.
pub fn rational_sqrt(value: &Rational) -> Option<Rational> {
    if value.is_negative() {
        return None;
    }
    let n = value.numer().sqrt();
    let d = value.denom().sqrt();
    if &(&n * &n) == value.numer() && &(&d * &d) == value.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Roots of `a t^2 + b t + c` classified by field.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticRoots {
    /// Both roots rational, ascending (equal for a double root).
    Rational(Rational, Rational),
    /// Real but irrational roots, ascending.
    Real(f64, f64),
    /// Complex conjugate pair `re ± i im`.
    Complex { re: f64, im: f64 },
    /// Leading coefficient zero: a single root of `b t + c`.
    Linear(Rational),
    /// `a = b = 0`.
    Degenerate,
}

/// Coefficients of a quadratic, kept so the roots can be audited later.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Quadratic {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> Rational {
        &self.b * &self.b - int(4) * &self.a * &self.c
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        (&self.a * t + &self.b) * t + &self.c
    }

    pub fn roots(&self) -> QuadraticRoots {
        if self.a.is_zero() {
            if self.b.is_zero() {
                return QuadraticRoots::Degenerate;
            }
            return QuadraticRoots::Linear(-&self.c / &self.b);
        }
        let disc = self.discriminant();
        let two_a = int(2) * &self.a;
        if let Some(root) = rational_sqrt(&disc) {
            let r1 = (-&self.b - &root) / &two_a;
            let r2 = (-&self.b + &root) / &two_a;
            return if r1 <= r2 {
                QuadraticRoots::Rational(r1, r2)
            } else {
                QuadraticRoots::Rational(r2, r1)
            };
        }
        let b = to_f64(&self.b);
        let a2 = to_f64(&two_a);
        let d = to_f64(&disc);
        if d > 0.0 {
            let s = d.sqrt();
            let (r1, r2) = ((-b - s) / a2, (-b + s) / a2);
            QuadraticRoots::Real(r1.min(r2), r1.max(r2))
        } else {
            QuadraticRoots::Complex {
                re: -b / a2,
                im: (-d).sqrt() / a2.abs(),
            }
        }
    }
}

/// Serde helpers writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::{format_rational, Rational};
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn serialize_vec<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_rational(v))?;
        }
        seq.end()
    }

    pub fn serialize_opt<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_str(&format_rational(v)),
            None => s.serialize_none(),
        }
    }
}

pub(crate) fn abs(value: &Rational) -> Rational {
    if value.is_negative() {
        -value.clone()
    } else {
        value.clone()
    }
}

pub fn pow2(exp: i64) -> Rational {
    let two = BigInt::from(2);
    if exp >= 0 {
        Rational::from_integer(num_traits::pow(two, exp as usize))
    } else {
        Rational::new(BigInt::one(), num_traits::pow(two, (-exp) as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-5/1").unwrap(), int(-5));
        assert_eq!(parse_rational("33/2").unwrap(), rat(33, 2));
        assert_eq!(parse_rational(" 4 ").unwrap(), int(4));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(format_rational(&int(2)), "2/1");
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
    }

    #[test]
    fn quadratic_classification() {
        // 6t^2 - 12t + 9/2 = 0
        let q = Quadratic::new(int(6), int(-12), rat(9, 2));
        assert_eq!(q.roots(), QuadraticRoots::Rational(rat(1, 2), rat(3, 2)));
        let q = Quadratic::new(int(1), int(0), int(-2));
        match q.roots() {
            QuadraticRoots::Real(a, b) => {
                assert!((a + 2f64.sqrt()).abs() < 1e-15);
                assert!((b - 2f64.sqrt()).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Quadratic::new(int(1), int(0), int(1)).roots(),
            QuadraticRoots::Complex { .. }
        ));
        assert_eq!(
            Quadratic::new(int(0), int(3), int(-1)).roots(),
            QuadraticRoots::Linear(rat(1, 3))
        );
        assert_eq!(Quadratic::new(int(0), int(0), int(-6)).roots(), QuadraticRoots::Degenerate);
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..200).prop_map(|(p, q)| rat(p, q))
    }

    proptest! {
        #[test]
        fn rational_round_trips(a in small_rational(), b in small_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
            prop_assert_eq!(parse_rational(&format_rational(&a)).unwrap(), a);
        }
    }
}
