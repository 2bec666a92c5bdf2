//! The Racah-Heun quadratic algebra generated by `L`, `M` and `Z = [L, M]`:
//!
//! ```text
//! [M, Z] = α₁{L,M} + α₂M² + γ₁L + δM + κL² + ε₁
//! [Z, L] = α₂{L,M} + α₁L² + γ₂M + δL + ε₂
//! ```
//!
//! Relations are checked as exact identities in a concrete realization,
//! either differential operators or finite matrices.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::classical::ClassicalCase;
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int, Matrix, Quadratic, QuadraticRoots, Rational};
use crate::report::{Check, VerificationReport};
use crate::tridiag::{build_m, TridiagConfig};
use crate::weylops::{DiffOperator, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureConstants {
    #[serde(with = "crate::exactnum::serde_rational")]
    pub alpha1: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub alpha2: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub gamma1: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub gamma2: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub delta: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub eps1: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub eps2: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub kappa: Rational,
}

impl StructureConstants {
    /// `κ = 0`: the relations are those of the Racah algebra.
    pub fn is_racah(&self) -> bool {
        self.kappa.is_zero()
    }

    fn from_vec(v: &[Rational]) -> Self {
        Self {
            alpha1: v[0].clone(),
            alpha2: v[1].clone(),
            gamma1: v[2].clone(),
            gamma2: v[3].clone(),
            delta: v[4].clone(),
            eps1: v[5].clone(),
            eps2: v[6].clone(),
            kappa: v[7].clone(),
        }
    }
}

/// Closed-form structure constants of `(L, M)` for each classical case.
pub fn structure_constants(cfg: &TridiagConfig) -> Result<StructureConstants> {
    cfg.validate()?;
    let (t1, t2, t3, t4) = (&cfg.tau1, &cfg.tau2, &cfg.tau3, &cfg.tau4);
    let t12 = t1 * t2;
    Ok(match &cfg.case {
        ClassicalCase::Hypergeometric { nu1, nu2 } => {
            let n1p2 = nu1 + int(2);
            StructureConstants {
                alpha1: int(-4) * t4 - int(2),
                alpha2: int(2),
                gamma1: int(4) * (&t12 + t3 * t4)
                    + t4 * &n1p2 * (int(2) * nu2 - t4 * nu1)
                    + nu2 * (int(2) - nu2),
                gamma2: int(-2) * nu1 - nu1 * nu1,
                delta: int(-2) * t3 + &n1p2 * (t4 * nu1 - nu2),
                eps1: int(2) * &t12 * nu2 * (nu1 + nu2)
                    + t3 * nu2 * (t4 * &n1p2 + int(2) - nu2),
                eps2: -(t3 * nu2 * &n1p2),
                kappa: int(6) * t4 * (t4 + int(1)),
            }
        }
        ClassicalCase::Laguerre { a } => StructureConstants {
            alpha1: int(-2),
            alpha2: int(0),
            gamma1: int(4) * &t12 + t4 * (int(4) * t3 - t4 - int(2) * a - int(2)) + int(1) - a * a,
            gamma2: int(-1),
            delta: a + int(1) - int(2) * t3 + t4,
            eps1: -(t3 * a * a) - a * (int(2) * &t12 + t3 * t4) + t3 * (int(1) - t4) - int(2) * &t12,
            eps2: (a + int(1)) * t3,
            kappa: int(6) * t4,
        },
        ClassicalCase::Hermite => StructureConstants {
            alpha1: int(0),
            alpha2: int(0),
            gamma1: int(4) * (int(1) - int(2) * t3 - t4 * t4),
            gamma2: int(-4),
            delta: int(4) * t4,
            eps1: int(2) * t3 * (int(2) - t3) - int(8) * &t12,
            eps2: int(0),
            kappa: int(-6),
        },
    })
}

/// An associative algebra in which `L` and `M` can be realized.
pub trait Realization: Clone + PartialEq {
    fn mul(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    /// Identity element compatible with `self`.
    fn unit(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Nonzero coordinates, keyed so that keys line up across elements.
    fn coords(&self) -> BTreeMap<(usize, usize), Rational>;
    fn coord_label(key: (usize, usize)) -> String;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }
}

impl Realization for DiffOperator<Rational> {
    fn mul(&self, other: &Self) -> Self {
        self.compose(other)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn scale(&self, c: &Rational) -> Self {
        DiffOperator::scale(self, c)
    }

    fn unit(&self) -> Self {
        DiffOperator::identity()
    }

    fn is_zero(&self) -> bool {
        DiffOperator::is_zero(self)
    }

    fn coords(&self) -> BTreeMap<(usize, usize), Rational> {
        let mut out = BTreeMap::new();
        for (k, p) in self.coeffs().iter().enumerate() {
            for (j, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out.insert((k, j), c.clone());
                }
            }
        }
        out
    }

    fn coord_label((k, j): (usize, usize)) -> String {
        format!("x^{j} d^{k}")
    }
}

impl Realization for Matrix<Rational> {
    fn mul(&self, other: &Self) -> Self {
        Matrix::mul(self, other)
    }

    fn add(&self, other: &Self) -> Self {
        Matrix::add(self, other)
    }

    fn scale(&self, c: &Rational) -> Self {
        Matrix::scale(self, c)
    }

    fn unit(&self) -> Self {
        Matrix::identity(self.rows())
    }

    fn is_zero(&self) -> bool {
        Matrix::is_zero(self)
    }

    fn coords(&self) -> BTreeMap<(usize, usize), Rational> {
        self.entries()
            .filter(|(_, _, v)| !v.is_zero())
            .map(|(i, j, v)| ((i, j), v.clone()))
            .collect()
    }

    fn coord_label((i, j): (usize, usize)) -> String {
        format!("entry ({i},{j})")
    }
}

/// The building blocks of both relations for a pair `(L, M)`.
struct Products<R> {
    z: R,
    mz: R,
    zl: R,
    lm: R,
    mm: R,
    ll: R,
    unit: R,
}

fn products<R: Realization>(l: &R, m: &R) -> Products<R> {
    let z = l.commutator(m);
    Products {
        mz: m.commutator(&z),
        zl: z.commutator(l),
        lm: l.anticommutator(m),
        mm: m.mul(m),
        ll: l.mul(l),
        unit: l.unit(),
        z,
    }
}

/// Residuals `[M,Z] - rhs₁` and `[Z,L] - rhs₂` under constants `sc`.
pub fn relation_residuals<R: Realization>(l: &R, m: &R, sc: &StructureConstants) -> (R, R) {
    let p = products(l, m);
    residuals_from(&p, l, m, sc)
}

fn residuals_from<R: Realization>(p: &Products<R>, l: &R, m: &R, sc: &StructureConstants) -> (R, R) {
    let rhs1 = p
        .lm
        .scale(&sc.alpha1)
        .add(&p.mm.scale(&sc.alpha2))
        .add(&l.scale(&sc.gamma1))
        .add(&m.scale(&sc.delta))
        .add(&p.ll.scale(&sc.kappa))
        .add(&p.unit.scale(&sc.eps1));
    let rhs2 = p
        .lm
        .scale(&sc.alpha2)
        .add(&p.ll.scale(&sc.alpha1))
        .add(&m.scale(&sc.gamma2))
        .add(&l.scale(&sc.delta))
        .add(&p.unit.scale(&sc.eps2));
    (p.mz.sub(&rhs1), p.zl.sub(&rhs2))
}

/// Solves for the eight structure constants from the coordinates of both
/// relations by exact elimination.
///
/// Errors with `FitInconsistent` (naming the first violated coordinate of
/// the best candidate) when no constants satisfy the relations, and with
/// `FitUnderdetermined` when the realization is too small to pin them down.
pub fn fit_structure_constants<R: Realization>(l: &R, m: &R) -> Result<StructureConstants> {
    let p = products(l, m);
    // Unknown order: α₁ α₂ γ₁ γ₂ δ ε₁ ε₂ κ.
    let rel1: [(usize, &R); 6] = [(0, &p.lm), (1, &p.mm), (2, l), (4, m), (7, &p.ll), (5, &p.unit)];
    let rel2: [(usize, &R); 5] = [(1, &p.lm), (0, &p.ll), (3, m), (4, l), (6, &p.unit)];
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (lhs, terms) in [(&p.mz, &rel1[..]), (&p.zl, &rel2[..])] {
        let lhs_c = lhs.coords();
        let term_c: Vec<_> = terms.iter().map(|(i, t)| (*i, t.coords())).collect();
        let mut keys: Vec<(usize, usize)> = lhs_c.keys().copied().collect();
        for (_, c) in &term_c {
            keys.extend(c.keys().copied());
        }
        keys.sort();
        keys.dedup();
        for key in keys {
            let mut row = vec![Rational::zero(); 9];
            for (i, c) in &term_c {
                if let Some(v) = c.get(&key) {
                    row[*i] += v;
                }
            }
            row[8] = lhs_c.get(&key).cloned().unwrap_or_else(Rational::zero);
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(Error::FitUnderdetermined { rank: 0 });
    }
    let (rref, pivots) = Matrix::from_rows(rows)?.rref();
    let mut solution = vec![Rational::zero(); 8];
    for (r, &c) in pivots.iter().enumerate() {
        if c < 8 {
            solution[c] = rref[(r, 8)].clone();
        }
    }
    let candidate = StructureConstants::from_vec(&solution);
    if pivots.contains(&8) {
        let (r1, r2) = residuals_from(&p, l, m, &candidate);
        let (relation, residual) = if r1.is_zero() { ("[Z,L]", r2) } else { ("[M,Z]", r1) };
        let coefficient = residual
            .coords()
            .into_iter()
            .next()
            .map(|(k, v)| format!("{} = {}", R::coord_label(k), format_rational(&v)))
            .unwrap_or_default();
        return Err(Error::FitInconsistent { relation: relation.to_string(), coefficient });
    }
    if pivots.len() < 8 {
        return Err(Error::FitUnderdetermined { rank: pivots.len() });
    }
    Ok(candidate)
}

/// `L` and `M` of a configuration.
pub fn generators(cfg: &TridiagConfig) -> Result<(DiffOperator<Rational>, DiffOperator<Rational>)> {
    Ok((cfg.l_operator(), build_m(cfg)?))
}

fn probe_check(name: &str, residual: &DiffOperator<Rational>, degree: usize) -> Check {
    let bad = (0..=degree).find(|&k| !residual.apply(&Polynomial::monomial(k, Rational::one())).is_zero());
    match bad {
        None => Check::pass(name, format!("annihilates 1, x, ..., x^{degree}")),
        Some(k) => Check::fail(name, format!("nonzero on x^{k}")),
    }
}

/// Checks the three defining relations in the differential realization by
/// normal-ordered coefficient comparison and by application to `x⁰..x^D`.
pub fn verify_algebra_with(
    l: &DiffOperator<Rational>,
    m: &DiffOperator<Rational>,
    sc: &StructureConstants,
    probe_degree: usize,
) -> VerificationReport {
    let p = products(l, m);
    let (r1, r2) = residuals_from(&p, l, m, sc);
    let r0 = Realization::sub(&l.commutator(m), &p.z);
    let mut report = VerificationReport::new();
    for (name, residual) in [("[L,M]=Z", r0), ("[M,Z]", r1), ("[Z,L]", r2)] {
        report.push(Check::operator_identity(name, residual.clone()));
        report.push(probe_check(&format!("{name} on probes"), &residual, probe_degree));
    }
    report
}

/// The relation suite for `cfg` with its closed-form constants, plus a
/// Jacobi-identity audit and an independent exact refit of the constants.
pub fn verify_algebra(cfg: &TridiagConfig, probe_degree: usize) -> Result<VerificationReport> {
    let (l, m) = generators(cfg)?;
    let sc = structure_constants(cfg)?;
    let mut report = verify_algebra_with(&l, &m, &sc, probe_degree);
    report.push(Check::operator_identity("jacobi identity", jacobi_identity(&l, &m)));
    match fit_structure_constants(&l, &m) {
        Ok(fitted) => report.push(Check::from_bool(
            "fitted constants",
            fitted == sc,
            if fitted == sc { "refit agrees with closed form".to_string() } else { format!("refit {fitted:?}") },
        )),
        Err(e) => report.push(Check::fail("fitted constants", e.to_string())),
    }
    Ok(report)
}

/// `[L,[M,Z]] + [M,[Z,L]] + [Z,[L,M]]` with `Z = [L, M]`; zero in any
/// associative algebra.
pub fn jacobi_identity<R: Realization>(l: &R, m: &R) -> R {
    let z = l.commutator(m);
    l.commutator(&m.commutator(&z))
        .add(&m.commutator(&z.commutator(l)))
        .add(&z.commutator(&l.commutator(m)))
}

/// Casimir element `Q₀ + Q₁` assembled from `(L, M)` and constants.
pub fn casimir_element<R: Realization>(l: &R, m: &R, sc: &StructureConstants) -> (R, R) {
    let p = products(l, m);
    let (a1, a2) = (&sc.alpha1, &sc.alpha2);
    let q0 = p
        .z
        .mul(&p.z)
        .add(&p.ll.anticommutator(m).scale(a1))
        .add(&p.mm.anticommutator(l).scale(a2))
        .add(&p.ll.scale(&(a1 * a1 + &sc.gamma1)))
        .add(&p.mm.scale(&(a2 * a2 + &sc.gamma2)))
        .add(&p.lm.scale(&(&sc.delta + a1 * a2)))
        .add(&l.scale(&(a1 * &sc.delta + int(2) * &sc.eps1)))
        .add(&m.scale(&(a2 * &sc.delta + int(2) * &sc.eps2)));
    let q1 = l
        .mul(&p.ll)
        .scale(&int(2))
        .sub(&p.ll.scale(a2))
        .sub(&l.scale(&sc.gamma2))
        .scale(&(&sc.kappa / int(3)));
    (q0, q1)
}

/// Closed-form value of the Casimir in the hypergeometric realization.
pub fn casimir_formula(cfg: &TridiagConfig) -> Option<Rational> {
    let ClassicalCase::Hypergeometric { nu1, nu2 } = &cfg.case else {
        return None;
    };
    let (t1, t2, t3, t4) = (&cfg.tau1, &cfg.tau2, &cfg.tau3, &cfg.tau4);
    let n1p2 = nu1 + int(2);
    Some(
        int(-2) * nu2 * t1 * t2 * &n1p2 * (nu1 + nu2)
            - nu2 * t3 * ((int(2) - nu2) * t3 + int(2) * &n1p2 * (t4 + int(1))),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct CasimirValue {
    /// The scalar `Q` reduces to, when it does.
    #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_opt")]
    pub q: Option<Rational>,
    /// Closed-form prediction (hypergeometric case only).
    #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_opt")]
    pub q_formula: Option<Rational>,
    /// Values `c_k` with `Q x^k = c_k x^k` read off by brute force, `k = 0..=probe`.
    #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_vec")]
    pub probe_values: Vec<Rational>,
    #[serde(rename = "Q")]
    pub operator: DiffOperator<Rational>,
    pub report: VerificationReport,
}

/// Number of monomials the Casimir is applied to by brute force.
pub const CASIMIR_PROBE_DEGREE: usize = 10;

pub fn casimir(cfg: &TridiagConfig) -> Result<CasimirValue> {
    let (l, m) = generators(cfg)?;
    let sc = structure_constants(cfg)?;
    let (q0, q1) = casimir_element(&l, &m, &sc);
    let q = &q0 + &q1;
    let mut report = VerificationReport::new();
    report.push(Check::operator_identity("[Q,L]", q.commutator(&l)));
    report.push(Check::operator_identity("[Q,M]", q.commutator(&m)));
    if sc.is_racah() {
        report.push(Check::from_bool("Q1 = 0 when kappa = 0", q1.is_zero(), ""));
    }
    let scalar = q.as_scalar();
    report.push(Check::from_bool(
        "Q scalar",
        scalar.is_some(),
        match &scalar {
            Some(v) => format!("Q = {}", format_rational(v)),
            None => format!("Q = {q}"),
        },
    ));
    let mut probe_values = Vec::new();
    let mut probes_constant = true;
    for k in 0..=CASIMIR_PROBE_DEGREE {
        let xk = Polynomial::monomial(k, Rational::one());
        let image = q.apply(&xk);
        let c = image.coeff(k);
        probes_constant &= image == xk.scale(&c);
        probe_values.push(c);
    }
    let constant = probes_constant && probe_values.windows(2).all(|w| w[0] == w[1]);
    report.push(Check::from_bool(
        "Q on probes",
        constant,
        format!("Q x^k = c x^k with one c for k = 0..={CASIMIR_PROBE_DEGREE}"),
    ));
    let q_formula = casimir_formula(cfg);
    match (&q_formula, &scalar) {
        (Some(f), Some(v)) => report.push(Check::from_bool(
            "Q = q (closed form)",
            f == v,
            format!("closed form {}, computed {}", format_rational(f), format_rational(v)),
        )),
        (Some(_), None) => report.push(Check::fail("Q = q (closed form)", "Q is not scalar")),
        (None, _) => report.push(Check::skipped("Q = q (closed form)", "no closed form for this case")),
    }
    Ok(CasimirValue {
        q: scalar,
        q_formula,
        probe_values,
        operator: q,
        report,
    })
}

/// Roots of `3α₂ρ² + 3α₁ρ + κ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoRoots {
    /// Rational roots (one entry for a linear equation or a double root).
    Rational {
        #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_vec")]
        roots: Vec<Rational>,
    },
    /// Real but irrational: `K` cannot be formed exactly.
    Irrational { roots: (f64, f64) },
    /// Negative `3α₁² - 4α₂κ`: the open complex case, no reduction.
    ComplexRho {
        #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_vec")]
        coefficients: Vec<Rational>,
    },
    /// `α₁ = α₂ = 0`.
    Unavailable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedPair<R> {
    #[serde(with = "crate::exactnum::serde_rational")]
    pub rho: Rational,
    #[serde(rename = "K")]
    pub k: R,
    pub constants: Option<StructureConstants>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Reduction<R> {
    /// `3α₁² - 4α₂κ`; positive means real `ρ`.
    #[serde(with = "crate::exactnum::serde_rational")]
    pub reality: Rational,
    pub roots: RhoRoots,
    pub reduced: Vec<ReducedPair<R>>,
    pub report: VerificationReport,
}

/// Reduction `K = M - ρL` that removes the `κL²` term.
pub fn racah_reduction<R: Realization + Serialize>(
    sc: &StructureConstants,
    m: &R,
    l: &R,
) -> Reduction<R> {
    let (a1, a2, kappa) = (&sc.alpha1, &sc.alpha2, &sc.kappa);
    let reality = int(3) * a1 * a1 - int(4) * a2 * kappa;
    let quad = Quadratic::new(int(3) * a2, int(3) * a1, kappa.clone());
    let roots = match quad.roots() {
        QuadraticRoots::Rational(r1, r2) if r1 == r2 => RhoRoots::Rational { roots: vec![r1] },
        QuadraticRoots::Rational(r1, r2) => RhoRoots::Rational { roots: vec![r1, r2] },
        QuadraticRoots::Linear(r) => RhoRoots::Rational { roots: vec![r] },
        QuadraticRoots::Real(r1, r2) => RhoRoots::Irrational { roots: (r1, r2) },
        QuadraticRoots::Complex { .. } => RhoRoots::ComplexRho {
            coefficients: vec![quad.a.clone(), quad.b.clone(), quad.c.clone()],
        },
        QuadraticRoots::Degenerate => RhoRoots::Unavailable,
    };
    let mut report = VerificationReport::new();
    let mut reduced = Vec::new();
    match &roots {
        RhoRoots::Rational { roots } => {
            for rho in roots {
                report.push(Check::from_bool(
                    format!("rho = {} solves 3a2 r^2 + 3a1 r + k", format_rational(rho)),
                    quad.eval(rho).is_zero(),
                    "",
                ));
                let k = m.sub(&l.scale(rho));
                let name = format!("kappa' = 0 at rho = {}", format_rational(rho));
                let constants = match fit_structure_constants(l, &k) {
                    Ok(c) => {
                        report.push(Check::from_bool(
                            name,
                            c.kappa.is_zero(),
                            format!("fitted kappa' = {}", format_rational(&c.kappa)),
                        ));
                        Some(c)
                    }
                    Err(e) => {
                        report.push(Check::fail(name, e.to_string()));
                        None
                    }
                };
                reduced.push(ReducedPair { rho: rho.clone(), k, constants });
            }
        }
        RhoRoots::Irrational { .. } => report.push(Check::skipped(
            "reduction",
            "real but irrational rho; K is not formed in exact arithmetic",
        )),
        RhoRoots::ComplexRho { .. } => {
            report.push(Check::skipped("reduction", "3a1^2 - 4a2k < 0: complex rho"))
        }
        RhoRoots::Unavailable => {
            report.push(Check::skipped("reduction", "a1 = a2 = 0: the quadratic degenerates"))
        }
    }
    Reduction { reality, roots, reduced, report }
}
