//! The hypergeometric, Laguerre and Hermite operators and their monic
//! polynomial eigenfamilies.
//!
//! Conventions: the hypergeometric operator is `x(1-x)∂² + (ν₁x + ν₂)∂`,
//! whose monic eigenpolynomials are the Jacobi polynomials on `[0, 1]` with
//! weight `x^ω₁ (1-x)^ω₂`, `ω₁ = ν₂ - 1`, `ω₂ = -1 - ν₁ - ν₂`. Laguerre uses
//! `x∂² + (a+1-x)∂` and Hermite `∂² - 2x∂`.

use std::sync::RwLock;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int, rat, Rational};
use crate::report::{Check, VerificationReport};
use crate::weylops::{DiffOperator, Polynomial};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ClassicalCase {
    Hypergeometric {
        #[serde(with = "crate::exactnum::serde_rational")]
        nu1: Rational,
        #[serde(with = "crate::exactnum::serde_rational")]
        nu2: Rational,
    },
    Laguerre {
        #[serde(with = "crate::exactnum::serde_rational")]
        a: Rational,
    },
    Hermite,
}

impl ClassicalCase {
    /// Hypergeometric case whose Jacobi parameters are `(ω₁, ω₂)`.
    pub fn from_omegas(omega1: &Rational, omega2: &Rational) -> Self {
        Self::Hypergeometric {
            nu1: -(omega1 + omega2 + int(2)),
            nu2: omega1 + int(1),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Hypergeometric { .. } => "hypergeometric",
            Self::Laguerre { .. } => "laguerre",
            Self::Hermite => "hermite",
        }
    }

    /// `(ω₁, ω₂)` for the hypergeometric case.
    pub fn omegas(&self) -> Option<(Rational, Rational)> {
        match self {
            Self::Hypergeometric { nu1, nu2 } => Some((nu2 - int(1), -int(1) - nu1 - nu2)),
            _ => None,
        }
    }

    pub fn operator(&self) -> DiffOperator<Rational> {
        let p = |cs: Vec<Rational>| Polynomial::new(cs);
        match self {
            Self::Hypergeometric { nu1, nu2 } => DiffOperator::second_order(
                p(vec![int(0), int(1), int(-1)]),
                p(vec![nu2.clone(), nu1.clone()]),
                Polynomial::zero(),
            ),
            Self::Laguerre { a } => DiffOperator::second_order(
                p(vec![int(0), int(1)]),
                p(vec![a + int(1), int(-1)]),
                Polynomial::zero(),
            ),
            Self::Hermite => DiffOperator::second_order(
                Polynomial::one(),
                p(vec![int(0), int(-2)]),
                Polynomial::zero(),
            ),
        }
    }

    /// Eigenvalue `λₙ` of the operator on the degree-`n` eigenpolynomial.
    /// Defined for every integer `n` (the tridiagonal coefficients use `λ₋₁`).
    pub fn lambda(&self, n: i64) -> Rational {
        let n = int(n);
        match self {
            Self::Hypergeometric { nu1, .. } => -(&n * (&n - nu1 - int(1))),
            Self::Laguerre { .. } => -n,
            Self::Hermite => int(-2) * n,
        }
    }

    fn omega_sum(&self) -> Option<Rational> {
        self.omegas().map(|(w1, w2)| w1 + w2)
    }
}

/// One row of the recurrence table emitted as CSV.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyRow {
    pub n: usize,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub lambda: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub b: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub u: Rational,
    #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_opt")]
    pub g: Option<Rational>,
    #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_opt")]
    pub e: Option<Rational>,
}

/// Recurrence data of a classical family, with memoized polynomials.
///
/// `xPₙ = Pₙ₊₁ + bₙPₙ + uₙPₙ₋₁` and `L Pₙ = λₙ Pₙ`.
#[derive(Debug)]
pub struct FamilyData {
    case: ClassicalCase,
    polys: RwLock<Vec<Polynomial<Rational>>>,
}

impl Clone for FamilyData {
    fn clone(&self) -> Self {
        let polys = self.polys.read().expect("poly cache poisoned").clone();
        Self {
            case: self.case.clone(),
            polys: RwLock::new(polys),
        }
    }
}

impl FamilyData {
    pub fn new(case: ClassicalCase) -> Self {
        Self {
            case,
            polys: RwLock::new(vec![Polynomial::one()]),
        }
    }

    pub fn case(&self) -> &ClassicalCase {
        &self.case
    }

    pub fn operator(&self) -> DiffOperator<Rational> {
        self.case.operator()
    }

    pub fn lambda(&self, n: i64) -> Rational {
        self.case.lambda(n)
    }

    pub fn omegas(&self) -> Option<(Rational, Rational)> {
        self.case.omegas()
    }

    pub fn b(&self, n: usize) -> Result<Rational> {
        match &self.case {
            ClassicalCase::Hypergeometric { .. } => {
                let (w1, w2) = self.case.omegas().expect("hypergeometric");
                let s = &w1 + &w2;
                if n == 0 {
                    // Limit form; the two-fraction expression is 0/0 when ω₁ + ω₂ = 0.
                    return checked_div(w1 + int(1), s + int(2), 0);
                }
                let k = int(2 * n as i64);
                let num = &w1 * &w1 - &w2 * &w2;
                let den = int(2) * (&s + &k) * (&s + &k + int(2));
                Ok(rat(1, 2) + checked_div(num, den, n as i64)?)
            }
            ClassicalCase::Laguerre { a } => Ok(int(2 * n as i64) + a + int(1)),
            ClassicalCase::Hermite => Ok(Rational::zero()),
        }
    }

    /// `uₙ` (zero at `n = 0`).
    pub fn u(&self, n: usize) -> Result<Rational> {
        if n == 0 {
            return Ok(Rational::zero());
        }
        let nn = int(n as i64);
        match &self.case {
            ClassicalCase::Hypergeometric { .. } => {
                let (w1, w2) = self.case.omegas().expect("hypergeometric");
                let s = &w1 + &w2;
                let two_n = int(2 * n as i64);
                let num = &nn * (&nn + &w1) * (&nn + &w2) * (&nn + &s);
                let t = &two_n + &s;
                let den = (&t - int(1)) * &t * &t * (&t + int(1));
                checked_div(num, den, n as i64)
            }
            ClassicalCase::Laguerre { a } => Ok(&nn * (&nn + a)),
            ClassicalCase::Hermite => Ok(nn / int(2)),
        }
    }

    /// Fails with the first pole among `b₀..b_{n_max}` and `u₁..u_{n_max}`.
    pub fn check_range(&self, n_max: usize) -> Result<()> {
        for n in 0..=n_max {
            self.b(n)?;
            self.u(n)?;
        }
        Ok(())
    }

    /// Monic eigenpolynomial of degree `n`, built from the recurrence.
    pub fn poly(&self, n: usize) -> Result<Polynomial<Rational>> {
        Ok(self.polys(n)?.swap_remove(n))
    }

    /// `P₀, …, P_{n_max}`.
    pub fn polys(&self, n_max: usize) -> Result<Vec<Polynomial<Rational>>> {
        {
            let cache = self.polys.read().expect("poly cache poisoned");
            if cache.len() > n_max {
                return Ok(cache[..=n_max].to_vec());
            }
        }
        let mut cache = self.polys.write().expect("poly cache poisoned");
        while cache.len() <= n_max {
            let k = cache.len() - 1;
            let pk = &cache[k];
            let mut next = &pk.shift(1) - &pk.scale(&self.b(k)?);
            if k > 0 {
                next = &next - &cache[k - 1].scale(&self.u(k)?);
            }
            cache.push(next);
        }
        Ok(cache[..=n_max].to_vec())
    }

    /// Structure coefficients `(Gₙ, Eₙ)` of
    /// `x(x-1)Pₙ' = nPₙ₊₁ + GₙPₙ + EₙPₙ₋₁` (hypergeometric case only).
    pub fn structure(&self, n: usize) -> Result<(Rational, Rational)> {
        let (w1, w2) = self
            .case
            .omegas()
            .ok_or(Error::UnsupportedCase(self.case.name()))?;
        if n == 0 {
            return Ok((Rational::zero(), Rational::zero()));
        }
        let s = &w1 + &w2;
        let nn = int(n as i64);
        let t = &s + int(2 * n as i64);
        let g_num = &nn * (&w1 - &w2) * (&s + &nn + int(1));
        let g = checked_div(g_num, &t * (&t + int(2)), n as i64)?;
        let e_num = -(&nn * (&w1 + &nn) * (&w2 + &nn) * (&s + &nn) * (&s + &nn + int(1)));
        let e_den = &t * &t * (&t + int(1)) * (&t - int(1));
        let e = checked_div(e_num, e_den, n as i64)?;
        Ok((g, e))
    }

    pub fn table(&self, n_max: usize) -> Result<Vec<FamilyRow>> {
        let hyp = self.case.omega_sum().is_some();
        (0..=n_max)
            .map(|n| {
                let (g, e) = if hyp {
                    let (g, e) = self.structure(n)?;
                    (Some(g), Some(e))
                } else {
                    (None, None)
                };
                Ok(FamilyRow {
                    n,
                    lambda: self.lambda(n as i64),
                    b: self.b(n)?,
                    u: self.u(n)?,
                    g,
                    e,
                })
            })
            .collect()
    }

    /// CSV with header `n,lambda,b,u,G,E`; `G`,`E` empty outside the
    /// hypergeometric case.
    pub fn table_csv(&self, n_max: usize) -> Result<String> {
        let mut out = String::from("n,lambda,b,u,G,E\n");
        let opt = |v: &Option<Rational>| v.as_ref().map(format_rational).unwrap_or_default();
        for row in self.table(n_max)? {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.n,
                format_rational(&row.lambda),
                format_rational(&row.b),
                format_rational(&row.u),
                opt(&row.g),
                opt(&row.e)
            ));
        }
        Ok(out)
    }
}

/// Exact checks of the family: `L Pₙ = λₙPₙ` with `Pₙ` monic of degree `n`,
/// and in the hypergeometric case the structure relation
/// `x(x-1)Pₙ' = nPₙ₊₁ + GₙPₙ + EₙPₙ₋₁`.
pub fn verify_family(data: &FamilyData, n_max: usize) -> Result<VerificationReport> {
    let op = data.operator();
    let polys = data.polys(n_max + 1)?;
    let mut report = VerificationReport::new();
    for (n, p) in polys.iter().take(n_max + 1).enumerate() {
        let monic = p.degree() == Some(n) && p.leading().is_some_and(|c| *c == int(1));
        let residual = &op.apply(p) - &p.scale(&data.lambda(n as i64));
        report.push(Check::from_bool(
            format!("L P_{n} = lambda_{n} P_{n}"),
            monic && residual.is_zero(),
            match (monic, residual.is_zero()) {
                (false, _) => "not monic of degree n".to_string(),
                (true, true) => "exact".to_string(),
                (true, false) => format!("residual {residual}"),
            },
        ));
    }
    if data.omegas().is_some() {
        let x2x = Polynomial::new(vec![int(0), int(-1), int(1)]);
        for n in 0..=n_max {
            let (g, e) = data.structure(n)?;
            let mut rhs = &polys[n + 1].scale(&int(n as i64)) + &polys[n].scale(&g);
            if n > 0 {
                rhs = &rhs + &polys[n - 1].scale(&e);
            }
            let residual = &(&x2x * &polys[n].derivative()) - &rhs;
            report.push(Check::from_bool(
                format!("structure relation n = {n}"),
                residual.is_zero(),
                if residual.is_zero() { "exact".to_string() } else { format!("residual {residual}") },
            ));
        }
    }
    Ok(report)
}

fn checked_div(num: Rational, den: Rational, index: i64) -> Result<Rational> {
    if den.is_zero() {
        Err(Error::ParameterPole { index })
    } else {
        Ok(num / den)
    }
}

/// The classical operator and its family data.
pub fn family(case: ClassicalCase) -> (DiffOperator<Rational>, FamilyData) {
    let data = FamilyData::new(case);
    (data.operator(), data)
}

pub fn jacobi_poly(data: &FamilyData, n: usize) -> Result<Polynomial<Rational>> {
    data.poly(n)
}

pub fn jacobi_structure(data: &FamilyData, n: usize) -> Result<(Rational, Rational)> {
    data.structure(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    fn canonical() -> FamilyData {
        FamilyData::new(ClassicalCase::Hypergeometric { nu1: int(-5), nu2: int(2) })
    }

    #[test]
    fn family_checks_pass() {
        for case in [
            ClassicalCase::Hypergeometric { nu1: int(-5), nu2: int(2) },
            ClassicalCase::Laguerre { a: rat(1, 3) },
            ClassicalCase::Hermite,
        ] {
            let report = verify_family(&FamilyData::new(case), 8).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn canonical_parameters() {
        let d = canonical();
        assert_eq!(d.omegas(), Some((int(1), int(2))));
        for n in 0..6 {
            assert_eq!(d.lambda(n), int(-n * (n + 4)));
        }
        assert_eq!(d.b(0).unwrap(), rat(2, 5));
        assert_eq!(d.u(1).unwrap(), rat(1, 25));
        assert_eq!(d.poly(1).unwrap(), Polynomial::new(vec![rat(-2, 5), int(1)]));
    }

    #[test]
    fn legendre_values() {
        let d = FamilyData::new(ClassicalCase::from_omegas(&int(0), &int(0)));
        assert_eq!(d.u(1).unwrap(), rat(1, 12));
        assert_eq!(d.b(0).unwrap(), rat(1, 2));
        assert_eq!(d.poly(2).unwrap(), Polynomial::new(vec![rat(1, 6), int(-1), int(1)]));
    }

    #[test]
    fn hermite_data() {
        let (l, d) = family(ClassicalCase::Hermite);
        assert_eq!(l, DiffOperator::second_order(
            Polynomial::one(),
            Polynomial::new(vec![int(0), int(-2)]),
            Polynomial::zero()
        ));
        assert_eq!(d.lambda(3), int(-6));
        assert_eq!(d.b(4).unwrap(), int(0));
        assert_eq!(d.u(3).unwrap(), rat(3, 2));
    }

    #[test]
    fn structure_edge_cases() {
        let d = canonical();
        assert_eq!(d.structure(0).unwrap(), (int(0), int(0)));
        let sym = FamilyData::new(ClassicalCase::from_omegas(&rat(3, 2), &rat(3, 2)));
        for n in 0..8 {
            assert_eq!(sym.structure(n).unwrap().0, int(0));
        }
        assert!(matches!(
            FamilyData::new(ClassicalCase::Hermite).structure(1),
            Err(Error::UnsupportedCase("hermite"))
        ));
    }

    #[test]
    fn structure_relation_at_n1() {
        let d = canonical();
        let (g, e) = d.structure(1).unwrap();
        let p = d.polys(2).unwrap();
        let lhs = &Polynomial::new(vec![int(0), int(-1), int(1)]) * &p[1].derivative();
        let rhs = &(&p[2] + &p[1].scale(&g)) + &p[0].scale(&e);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn poles_are_reported() {
        // ω₁ + ω₂ = -2 makes b₀ singular.
        let d = FamilyData::new(ClassicalCase::from_omegas(&int(-1), &int(-1)));
        assert_eq!(d.b(0), Err(Error::ParameterPole { index: 0 }));
        // ω₁ + ω₂ = -3: u₁ has (2 - 3 + 1) = 0 in its denominator.
        let d = FamilyData::new(ClassicalCase::from_omegas(&rat(-3, 2), &rat(-3, 2)));
        assert_eq!(d.u(1), Err(Error::ParameterPole { index: 1 }));
        assert!(d.check_range(3).is_err());
    }

    #[test]
    fn csv_table() {
        let csv = canonical().table_csv(1).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,lambda,b,u,G,E");
        assert_eq!(lines[1], "0,0/1,2/5,0/1,0/1,0/1");
        let lag = FamilyData::new(ClassicalCase::Laguerre { a: int(1) }).table_csv(1).unwrap();
        assert_eq!(lag.lines().nth(2).unwrap(), "1,-1/1,4/1,2/1,,");
    }
}
