use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::Polynomial;
use crate::exactnum::{Rational, Scalar};

/// Differential operator with polynomial coefficients, `Σ_k coeffs[k](x) ∂^k`.
///
/// Stored in normal order (derivatives to the right), which is canonical:
/// two operators are equal exactly when their coefficient lists are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator<T> {
    coeffs: Vec<Polynomial<T>>,
}

impl<T: Scalar> DiffOperator<T> {
    pub fn new(mut coeffs: Vec<Polynomial<T>>) -> Self {
        while coeffs.last().is_some_and(Polynomial::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::multiplication(Polynomial::one())
    }

    pub fn scalar(c: T) -> Self {
        Self::multiplication(Polynomial::constant(c))
    }

    /// Multiplication operator `f ↦ p·f`.
    pub fn multiplication(p: Polynomial<T>) -> Self {
        Self::new(vec![p])
    }

    /// The operator `X`, multiplication by `x`.
    pub fn x() -> Self {
        Self::multiplication(Polynomial::x())
    }

    /// `∂ = d/dx`.
    pub fn d() -> Self {
        Self::new(vec![Polynomial::zero(), Polynomial::one()])
    }

    /// `a2(x) ∂² + a1(x) ∂ + a0(x)`.
    pub fn second_order(a2: Polynomial<T>, a1: Polynomial<T>, a0: Polynomial<T>) -> Self {
        Self::new(vec![a0, a1, a2])
    }

    pub fn coeffs(&self) -> &[Polynomial<T>] {
        &self.coeffs
    }

    /// Coefficient of `∂^k` (zero beyond the order).
    pub fn coeff(&self, k: usize) -> Polynomial<T> {
        self.coeffs.get(k).cloned().unwrap_or_else(Polynomial::zero)
    }

    /// `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The constant `c` if the operator is `c·Id`.
    pub fn as_scalar(&self) -> Option<T> {
        match self.coeffs.as_slice() {
            [] => Some(T::zero()),
            [p] if p.degree() == Some(0) => Some(p.coeff(0)),
            _ => None,
        }
    }

    /// Largest power of `x` appearing in any coefficient.
    pub fn coefficient_degree(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(Polynomial::degree).max()
    }

    pub fn apply(&self, p: &Polynomial<T>) -> Polynomial<T> {
        let mut out = Polynomial::zero();
        let mut deriv = p.clone();
        for c in &self.coeffs {
            if deriv.is_zero() {
                break;
            }
            if !c.is_zero() {
                out = &out + &(c * &deriv);
            }
            deriv = deriv.derivative();
        }
        out
    }

    /// `self ∘ other`, normal-ordered with `∂^i g = Σ_k C(i,k) g^{(k)} ∂^{i-k}`.
    pub fn compose(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let order = self.coeffs.len() + other.coeffs.len() - 2;
        let mut out = vec![Polynomial::zero(); order + 1];
        for (j, g) in other.coeffs.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let mut g_deriv = g.clone();
            let mut derivs = Vec::with_capacity(self.coeffs.len());
            for _ in 0..self.coeffs.len() {
                derivs.push(g_deriv.clone());
                g_deriv = g_deriv.derivative();
            }
            for (i, f) in self.coeffs.iter().enumerate() {
                if f.is_zero() {
                    continue;
                }
                let mut binom: u64 = 1;
                for (k, gk) in derivs.iter().enumerate().take(i + 1) {
                    if !gk.is_zero() {
                        let c = T::from_u64(binom).expect("binomial fits the scalar");
                        let term = (f * gk).scale(&c);
                        let slot = i - k + j;
                        out[slot] = &out[slot] + &term;
                    }
                    binom = binom * (i - k) as u64 / (k + 1) as u64;
                }
            }
        }
        Self::new(out)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.compose(other) - &other.compose(self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.compose(other) + &other.compose(self)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::identity(), |acc, _| acc.compose(self))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DiffOperator<U> {
        DiffOperator::new(self.coeffs.iter().map(|p| p.map(&f)).collect())
    }

    /// Largest coefficient magnitude across all derivative orders.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Polynomial::max_abs).fold(0.0, f64::max)
    }

    /// Coefficient-wise comparison to tolerance, for floating parameter sweeps.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).max_abs() <= tol
    }
}

impl DiffOperator<Rational> {
    pub fn to_f64(&self) -> DiffOperator<f64> {
        self.map(crate::exactnum::to_f64)
    }
}

impl<T: Scalar> Add for &DiffOperator<T> {
    type Output = DiffOperator<T>;
    fn add(self, rhs: Self) -> DiffOperator<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffOperator::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &DiffOperator<T> {
    type Output = DiffOperator<T>;
    fn sub(self, rhs: Self) -> DiffOperator<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffOperator::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Neg for &DiffOperator<T> {
    type Output = DiffOperator<T>;
    fn neg(self) -> DiffOperator<T> {
        DiffOperator::new(self.coeffs.iter().map(|p| -p).collect())
    }
}

/// Operator composition.
impl<T: Scalar> Mul for &DiffOperator<T> {
    type Output = DiffOperator<T>;
    fn mul(self, rhs: Self) -> DiffOperator<T> {
        self.compose(rhs)
    }
}

impl fmt::Display for DiffOperator<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "[{c}]")?,
                1 => write!(f, "[{c}]∂")?,
                _ => write!(f, "[{c}]∂^{k}")?,
            }
        }
        Ok(())
    }
}

/// `{"coeffs": [[c_0, c_1, ...] for ∂^0, [..] for ∂^1, ...]}` with `"p/q"` entries.
impl Serialize for DiffOperator<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("coeffs", &self.coeffs)?;
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use proptest::prelude::*;

    fn poly(cs: &[i64]) -> Polynomial<Rational> {
        Polynomial::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn x_raises_degree() {
        assert_eq!(DiffOperator::x().apply(&poly(&[0, 0, 1])), poly(&[0, 0, 0, 1]));
    }

    #[test]
    fn hypergeometric_on_linear() {
        // x(1-x)∂² + (-5x + 2)∂ applied to x
        let l = DiffOperator::second_order(poly(&[0, 1, -1]), poly(&[2, -5]), Polynomial::zero());
        assert_eq!(l.apply(&poly(&[0, 1])), poly(&[2, -5]));
    }

    #[test]
    fn canonical_commutation() {
        let d = DiffOperator::<Rational>::d();
        let x = DiffOperator::x();
        assert_eq!(&d.compose(&x) - &x.compose(&d), DiffOperator::identity());
        assert_eq!(d.commutator(&x), DiffOperator::identity());
    }

    #[test]
    fn hermite_square() {
        // L = ∂² - 2x∂, L² = ∂⁴ - 4x∂³ + (4x² - 4)∂² + 4x∂
        let l = DiffOperator::second_order(poly(&[1]), poly(&[0, -2]), Polynomial::zero());
        let sq = l.compose(&l);
        let expected = DiffOperator::new(vec![
            Polynomial::zero(),
            poly(&[0, 4]),
            poly(&[-4, 0, 4]),
            poly(&[0, -4]),
            poly(&[1]),
        ]);
        assert_eq!(sq, expected);
        for k in 0..=6 {
            let xk = Polynomial::monomial(k, int(1));
            assert_eq!(sq.apply(&xk), l.apply(&l.apply(&xk)));
        }
        assert!(l.commutator(&l).is_zero());
    }

    #[test]
    fn scalar_detection() {
        assert_eq!(DiffOperator::scalar(rat(3, 2)).as_scalar(), Some(rat(3, 2)));
        assert_eq!(DiffOperator::<Rational>::zero().as_scalar(), Some(int(0)));
        assert_eq!(DiffOperator::<Rational>::x().as_scalar(), None);
    }

    #[test]
    fn json_shape() {
        let op = DiffOperator::second_order(poly(&[0, 1]), Polynomial::zero(), poly(&[3]));
        let v = serde_json::to_value(&op).unwrap();
        assert_eq!(v, serde_json::json!({"coeffs": [["3/1"], [], ["0/1", "1/1"]]}));
    }

    fn small_poly() -> impl Strategy<Value = Polynomial<Rational>> {
        prop::collection::vec((-6i64..6, 1i64..4), 0..4)
            .prop_map(|cs| Polynomial::new(cs.into_iter().map(|(p, q)| rat(p, q)).collect()))
    }

    fn small_op() -> impl Strategy<Value = DiffOperator<Rational>> {
        prop::collection::vec(small_poly(), 0..3).prop_map(DiffOperator::new)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn composition_matches_sequential_application(a in small_op(), b in small_op()) {
            let ab = a.compose(&b);
            for k in 0..=8 {
                let xk = Polynomial::monomial(k, int(1));
                prop_assert_eq!(ab.apply(&xk), a.apply(&b.apply(&xk)));
            }
        }

        #[test]
        fn composition_is_associative(a in small_op(), b in small_op(), c in small_op()) {
            prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        }
    }
}
