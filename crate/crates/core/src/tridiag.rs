//! The tridiagonalization `M = τ₁XL + τ₂LX + τ₃X + τ₄L` of a classical
//! operator, its Heun-equation parameters and its action on the eigenbasis
//! of `L`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::classical::{ClassicalCase, FamilyData};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int, rat, Quadratic, QuadraticRoots, Rational};
use crate::report::{Check, Residual, VerificationReport};
use crate::weylops::{op_matrix_between, BasisSpec, DiffOperator, Polynomial};

/// Parameters of `M`. Valid configurations have `τ₁ + τ₂ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagConfig {
    #[serde(flatten)]
    pub case: ClassicalCase,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub tau1: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub tau2: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub tau3: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub tau4: Rational,
}

impl TridiagConfig {
    pub fn new(
        case: ClassicalCase,
        tau1: Rational,
        tau2: Rational,
        tau3: Rational,
        tau4: Rational,
    ) -> Result<Self> {
        let cfg = Self { case, tau1, tau2, tau3, tau4 };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Normalized configuration with `τ₂ = 1 - τ₁`.
    pub fn from_tau1(case: ClassicalCase, tau1: Rational, tau3: Rational, tau4: Rational) -> Self {
        let tau2 = Rational::one() - &tau1;
        Self { case, tau1, tau2, tau3, tau4 }
    }

    /// Hypergeometric `ν = (-5, 2)`, `τ = (1/2, 1/2, 33/2, 1/2)`: truncates at `N = 2`.
    pub fn canonical() -> Self {
        Self::from_tau1(
            ClassicalCase::Hypergeometric { nu1: int(-5), nu2: int(2) },
            rat(1, 2),
            rat(33, 2),
            rat(1, 2),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let sum = &self.tau1 + &self.tau2;
        if sum.is_zero() {
            return Err(Error::DegenerateTau);
        }
        if !sum.is_one() {
            return Err(Error::NotNormalized { sum: format_rational(&sum) });
        }
        Ok(())
    }

    pub fn with_tau3(&self, tau3: Rational) -> Self {
        Self { tau3, ..self.clone() }
    }

    pub fn with_tau4(&self, tau4: Rational) -> Self {
        Self { tau4, ..self.clone() }
    }

    pub fn family(&self) -> FamilyData {
        FamilyData::new(self.case.clone())
    }

    pub fn l_operator(&self) -> DiffOperator<Rational> {
        self.case.operator()
    }

    pub fn lambda(&self, n: i64) -> Rational {
        self.case.lambda(n)
    }

    /// `ξₙ = τ₁λₙ₋₁ + τ₂λₙ + τ₃`, coefficient of `Pₙ` in `M Pₙ₋₁`.
    pub fn xi(&self, n: i64) -> Rational {
        &self.tau1 * self.lambda(n - 1) + &self.tau2 * self.lambda(n) + &self.tau3
    }

    /// `ζₙ = τ₁λₙ + τ₂λₙ₋₁ + τ₃`.
    pub fn zeta(&self, n: i64) -> Rational {
        &self.tau1 * self.lambda(n) + &self.tau2 * self.lambda(n - 1) + &self.tau3
    }

    /// `ηₙ = (τ₁+τ₂)λₙbₙ + τ₃bₙ + τ₄λₙ`, the diagonal entry.
    pub fn eta(&self, data: &FamilyData, n: usize) -> Result<Rational> {
        let lambda = self.lambda(n as i64);
        let b = data.b(n)?;
        Ok((&self.tau1 + &self.tau2) * &lambda * &b + &self.tau3 * &b + &self.tau4 * &lambda)
    }

    fn basis(&self, size: usize) -> BasisSpec {
        BasisSpec::for_case(&self.case, size)
    }
}

/// `τ₁XL + τ₂LX + τ₃X + τ₄L`, assembled by operator composition.
pub fn build_m(cfg: &TridiagConfig) -> Result<DiffOperator<Rational>> {
    cfg.validate()?;
    Ok(assemble(cfg))
}

fn assemble(cfg: &TridiagConfig) -> DiffOperator<Rational> {
    let l = cfg.l_operator();
    let x = DiffOperator::x();
    let xl = x.compose(&l).scale(&cfg.tau1);
    let lx = l.compose(&x).scale(&cfg.tau2);
    let terms = [xl, lx, x.scale(&cfg.tau3), l.scale(&cfg.tau4)];
    terms.iter().fold(DiffOperator::zero(), |acc, t| &acc + t)
}

/// Coefficients of the hypergeometric closed form
/// `x(1-x)(x+τ₄)∂² + (ρ₂x² + ρ₁x + ρ₀)∂ + r₁x + r₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeunCoefficients {
    #[serde(with = "crate::exactnum::serde_rational")]
    pub rho2: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub rho1: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub rho0: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub r1: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub r0: Rational,
}

pub fn heun_coefficients(cfg: &TridiagConfig) -> Result<HeunCoefficients> {
    let ClassicalCase::Hypergeometric { nu1, nu2 } = &cfg.case else {
        return Err(Error::UnsupportedCase(cfg.case.name()));
    };
    let (t1, t4) = (&cfg.tau1, &cfg.tau4);
    Ok(HeunCoefficients {
        rho2: nu1 + int(2) * t1 - int(2),
        rho1: int(2) - int(2) * t1 + nu2 + t4 * nu1,
        rho0: t4 * nu2,
        r1: &cfg.tau3 - t1 * nu1 + nu1,
        r0: nu2 * (int(1) - t1),
    })
}

/// The explicit normalized form of `M` for each case (requires `τ₁+τ₂ = 1`).
pub fn closed_form_m(cfg: &TridiagConfig) -> Result<DiffOperator<Rational>> {
    cfg.validate()?;
    let p = |cs: Vec<Rational>| Polynomial::new(cs);
    let (t1, t2, t3, t4) = (&cfg.tau1, &cfg.tau2, &cfg.tau3, &cfg.tau4);
    Ok(match &cfg.case {
        ClassicalCase::Hypergeometric { .. } => {
            let h = heun_coefficients(cfg)?;
            // x(1-x)(x+τ₄) = τ₄x + (1-τ₄)x² - x³
            DiffOperator::second_order(
                p(vec![int(0), t4.clone(), int(1) - t4, int(-1)]),
                p(vec![h.rho0, h.rho1, h.rho2]),
                p(vec![h.r0, h.r1]),
            )
        }
        ClassicalCase::Laguerre { a } => DiffOperator::second_order(
            p(vec![int(0), t4.clone(), int(1)]),
            p(vec![t4 * (int(1) + a), int(3) + a - t4 - int(2) * t1, int(-1)]),
            p(vec![int(1) - t1 + a * t2, t3 - t2]),
        ),
        ClassicalCase::Hermite => DiffOperator::second_order(
            p(vec![t4.clone(), int(1)]),
            p(vec![int(2) * t2, int(-2) * t4, int(-2)]),
            p(vec![int(0), t3 - int(2) * t2]),
        ),
    })
}

/// Generic Heun parameters of `Mψ = λψ` (hypergeometric case).
///
/// `q(λ) = q_lambda·λ + q_const`; `α, β` are the roots of
/// `t² - (γ+δ+ε-1)t + αβ`, so `α+β-γ-δ-ε+1 = 0` by construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeunParams {
    #[serde(with = "crate::exactnum::serde_rational")]
    pub gamma: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub delta: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub epsilon: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub d: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub alpha_beta: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub alpha_plus_beta: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub q_lambda: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub q_const: Rational,
    #[serde(skip)]
    pub alpha_beta_roots: QuadraticRoots,
}

impl HeunParams {
    pub fn q(&self, lambda: &Rational) -> Rational {
        &self.q_lambda * lambda + &self.q_const
    }

    /// `t² - (α+β)t + αβ`.
    pub fn alpha_beta_quadratic(&self) -> Quadratic {
        Quadratic::new(int(1), -self.alpha_plus_beta.clone(), self.alpha_beta.clone())
    }

    /// `ω₁ = γ - 1`, `ω₂ = δ - 1`.
    pub fn jacobi_omegas(&self) -> (Rational, Rational) {
        (&self.gamma - int(1), &self.delta - int(1))
    }
}

pub fn heun_params(cfg: &TridiagConfig) -> Result<HeunParams> {
    cfg.validate()?;
    let ClassicalCase::Hypergeometric { nu1, nu2 } = &cfg.case else {
        return Err(Error::UnsupportedCase(cfg.case.name()));
    };
    let gamma = nu2.clone();
    let delta = -(nu1 + nu2);
    let epsilon = int(2) * &cfg.tau2;
    let alpha_plus_beta = &gamma + &delta + &epsilon - int(1);
    let alpha_beta = -(&cfg.tau3) - nu1 * &cfg.tau2;
    let roots = Quadratic::new(int(1), -alpha_plus_beta.clone(), alpha_beta.clone()).roots();
    Ok(HeunParams {
        gamma,
        delta,
        epsilon,
        d: -cfg.tau4.clone(),
        alpha_beta,
        alpha_plus_beta,
        // Clearing the denominator x(x-1)(x-d) flips the sign of M - λ,
        // so the accessory parameter is τ₂ν₂ - λ.
        q_lambda: int(-1),
        q_const: &cfg.tau2 * nu2,
        alpha_beta_roots: roots,
    })
}

/// Heun equation multiplied through by `x(x-1)(x-d)`, as the operator
/// `x(x-1)(x-d)∂² + [γ(x-1)(x-d) + δx(x-d) + εx(x-1)]∂ + αβx - q` at `λ`.
pub fn heun_equation_operator(hp: &HeunParams, lambda: &Rational) -> DiffOperator<Rational> {
    let x = Polynomial::x();
    let lin = |c: &Rational| &x - &Polynomial::constant(c.clone());
    let x1 = lin(&int(1));
    let xd = lin(&hp.d);
    let a2 = &(&x * &x1) * &xd;
    let a1 = &(&(&x1 * &xd).scale(&hp.gamma) + &(&x * &xd).scale(&hp.delta)) + &(&x * &x1).scale(&hp.epsilon);
    let a0 = Polynomial::new(vec![-hp.q(lambda), hp.alpha_beta.clone()]);
    DiffOperator::second_order(a2, a1, a0)
}

/// Checks `-(M - λ) = x(x-1)(x-d)·[Heun form]` at two values of `λ`
/// (both sides are affine in `λ`, so two points settle it).
pub fn verify_heun_form(cfg: &TridiagConfig) -> Result<VerificationReport> {
    let m = build_m(cfg)?;
    let hp = heun_params(cfg)?;
    let mut report = VerificationReport::new();
    for lambda in [int(0), int(1)] {
        let lhs = -&(&m - &DiffOperator::scalar(lambda.clone()));
        let rhs = heun_equation_operator(&hp, &lambda);
        report.push(Check::operator_identity(
            format!("heun-form(lambda={})", format_rational(&lambda)),
            &lhs - &rhs,
        ));
    }
    let reg = &hp.alpha_plus_beta - &hp.gamma - &hp.delta - &hp.epsilon + int(1);
    report.push(Check::from_bool("regularity", reg.is_zero(), "alpha+beta-gamma-delta-epsilon+1"));
    Ok(report)
}

/// Singularity structure of `Mψ = λψ` in the confluent cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfluentForm {
    pub equation: &'static str,
    /// Leading coefficient of `M`; its roots are the finite singular points.
    pub leading: Polynomial<Rational>,
    #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_vec")]
    pub finite_singular_points: Vec<Rational>,
    /// `M` divided by its leading coefficient's leading term.
    pub monic_operator: DiffOperator<Rational>,
}

pub fn confluent_form(cfg: &TridiagConfig) -> Result<ConfluentForm> {
    let m = build_m(cfg)?;
    let leading = m.coeff(2);
    let lead = leading.leading().cloned().unwrap_or_else(Rational::one);
    let (equation, points) = match &cfg.case {
        ClassicalCase::Laguerre { .. } => ("confluent-heun", vec![int(0), -cfg.tau4.clone()]),
        ClassicalCase::Hermite => ("double-confluent-heun", vec![-cfg.tau4.clone()]),
        ClassicalCase::Hypergeometric { .. } => {
            return Err(Error::UnsupportedCase(cfg.case.name()));
        }
    };
    let mut points = points;
    points.sort();
    points.dedup();
    Ok(ConfluentForm {
        equation,
        leading,
        finite_singular_points: points,
        monic_operator: m.scale(&(Rational::one() / lead)),
    })
}

/// The Heun-equation view of `M` for any case.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum HeunForm {
    Generic(Box<HeunParams>),
    Confluent(ConfluentForm),
}

pub fn heun_form(cfg: &TridiagConfig) -> Result<HeunForm> {
    match cfg.case {
        ClassicalCase::Hypergeometric { .. } => heun_params(cfg).map(|p| HeunForm::Generic(Box::new(p))),
        _ => confluent_form(cfg).map(HeunForm::Confluent),
    }
}

/// One row of the tridiagonal action table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffRow {
    pub n: usize,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub lambda: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub b: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub u: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub xi: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub eta: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub zeta: Rational,
}

/// `M Pₙ = ξₙ₊₁Pₙ₊₁ + ηₙPₙ + ζₙuₙPₙ₋₁` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagCoeffs {
    pub rows: Vec<CoeffRow>,
}

impl TridiagCoeffs {
    pub fn xi(&self, n: usize) -> &Rational {
        &self.rows[n].xi
    }

    pub fn eta(&self, n: usize) -> &Rational {
        &self.rows[n].eta
    }

    pub fn zeta(&self, n: usize) -> &Rational {
        &self.rows[n].zeta
    }

    pub fn u(&self, n: usize) -> &Rational {
        &self.rows[n].u
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lambda,b,u,xi,eta,zeta\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                format_rational(&r.lambda),
                format_rational(&r.b),
                format_rational(&r.u),
                format_rational(&r.xi),
                format_rational(&r.eta),
                format_rational(&r.zeta)
            ));
        }
        out
    }
}

/// Rows `0..=n_max`; row `n` carries `ξₙ` (so `ξ₀` is present but unused).
pub fn tridiag_coeffs(cfg: &TridiagConfig, n_max: usize) -> Result<TridiagCoeffs> {
    let data = cfg.family();
    let rows = (0..=n_max)
        .map(|n| {
            let k = n as i64;
            Ok(CoeffRow {
                n,
                lambda: cfg.lambda(k),
                b: data.b(n)?,
                u: data.u(n)?,
                xi: cfg.xi(k),
                eta: cfg.eta(&data, n)?,
                zeta: cfg.zeta(k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TridiagCoeffs { rows })
}

/// Exact check of `M Pₙ = ξₙ₊₁Pₙ₊₁ + ηₙPₙ + ζₙuₙPₙ₋₁` for `n = 0..=n_max`.
pub fn verify_tridiagonal(cfg: &TridiagConfig, n_max: usize) -> Result<VerificationReport> {
    let coeffs = tridiag_coeffs(cfg, n_max + 1)?;
    verify_tridiagonal_with(cfg, n_max, &coeffs)
}

/// As [`verify_tridiagonal`] with a caller-supplied coefficient table
/// (rows `0..=n_max+1`), which makes fault injection possible.
pub fn verify_tridiagonal_with(
    cfg: &TridiagConfig,
    n_max: usize,
    coeffs: &TridiagCoeffs,
) -> Result<VerificationReport> {
    if coeffs.len() < n_max + 2 {
        return Err(Error::Dimension(format!(
            "coefficient table has {} rows, need {}",
            coeffs.len(),
            n_max + 2
        )));
    }
    let m = build_m(cfg)?;
    let polys = cfg.family().polys(n_max + 1)?;
    let mut report = VerificationReport::new();
    for n in 0..=n_max {
        let mut expected = &polys[n + 1].scale(coeffs.xi(n + 1)) + &polys[n].scale(coeffs.eta(n));
        if n > 0 {
            expected = &expected + &polys[n - 1].scale(&(coeffs.zeta(n) * coeffs.u(n)));
        }
        let residual = &m.apply(&polys[n]) - &expected;
        let name = format!("M P_{n}");
        report.push(if residual.is_zero() {
            Check::pass(name, "exact")
        } else {
            Check::fail(name, format!("residual {residual}")).with_residual(Residual::Polynomial(residual))
        });
    }
    Ok(report)
}

/// Exact check that the matrix of `M` on `P₀..P_{n_max}` (into
/// `P₀..P_{n_max+1}`) has exactly the entries `(ξₙ₊₁, ηₙ, ζₙuₙ)` and nothing
/// else.
pub fn verify_matrix_entries(cfg: &TridiagConfig, n_max: usize) -> Result<VerificationReport> {
    let m = build_m(cfg)?;
    let coeffs = tridiag_coeffs(cfg, n_max + 1)?;
    let mat = op_matrix_between(&m, &cfg.basis(n_max + 2), n_max + 1)?;
    let mut bad = Vec::new();
    for (i, j, v) in mat.entries() {
        let want = if i == j + 1 {
            coeffs.xi(i).clone()
        } else if i == j {
            coeffs.eta(j).clone()
        } else if j == i + 1 {
            coeffs.zeta(j) * coeffs.u(j)
        } else {
            Rational::zero()
        };
        if *v != want {
            bad.push(format!("({i},{j}): {} != {}", format_rational(v), format_rational(&want)));
        }
    }
    let mut report = VerificationReport::new();
    report.push(Check::from_bool(
        "matrix entries",
        bad.is_empty(),
        if bad.is_empty() { "exact".to_string() } else { bad.join("; ") },
    ));
    Ok(report)
}

/// Result of [`recover_taus`]: `m = scale·build_m(config) + shift·Id`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveredConfig {
    pub config: TridiagConfig,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub scale: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub shift: Rational,
    /// Jacobi parameters `(γ - 1, δ - 1)` in the hypergeometric case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omegas: Option<(String, String)>,
}

fn shape(msg: &str) -> Error {
    Error::NotHeunShaped(msg.to_string())
}

fn require(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(shape(msg))
    }
}

/// Recovers `(τ₁..τ₄)` and the affine normalization from an operator that
/// is tridiagonal on the eigenbasis of the classical operator of `case`.
pub fn recover_taus(m: &DiffOperator<Rational>, case: &ClassicalCase) -> Result<RecoveredConfig> {
    require(m.order().is_some_and(|o| o <= 2), "not a second-order operator")?;
    let (c2, c1, c0) = (m.coeff(2), m.coeff(1), m.coeff(0));
    let deg = |p: &Polynomial<Rational>| p.degree().unwrap_or(0);
    require(deg(&c1) <= 2 && deg(&c0) <= 1, "coefficient degrees exceed (3, 2, 1)")?;
    let c = |p: &Polynomial<Rational>, k| p.coeff(k);
    let (scale, tau1, tau3, tau4, shift) = match case {
        ClassicalCase::Hypergeometric { nu1, nu2 } => {
            require(deg(&c2) <= 3, "leading coefficient has degree above 3")?;
            let s = -c(&c2, 3);
            if s.is_zero() {
                return Err(if c2.eval(&int(0)).is_zero() && c2.eval(&int(1)).is_zero() {
                    Error::NotNormalizable
                } else {
                    shape("leading coefficient is not x(x-1)(x-a)")
                });
            }
            require(
                c(&c2, 0).is_zero() && c2.eval(&int(1)).is_zero(),
                "leading coefficient is not x(x-1)(x-a)",
            )?;
            let tau4 = c(&c2, 1) / &s;
            let rho2 = c(&c1, 2) / &s;
            let tau1 = (&rho2 - nu1 + int(2)) / int(2);
            require(
                c(&c1, 1) / &s == int(2) - int(2) * &tau1 + nu2 + &tau4 * nu1
                    && c(&c1, 0) / &s == &tau4 * nu2,
                "first-order coefficient does not match the operator L",
            )?;
            let tau3 = c(&c0, 1) / &s + &tau1 * nu1 - nu1;
            let shift = c(&c0, 0) - &s * nu2 * (int(1) - &tau1);
            (s, tau1, tau3, tau4, shift)
        }
        ClassicalCase::Laguerre { a } => {
            require(deg(&c2) <= 2, "leading coefficient has degree above 2")?;
            let s = c(&c2, 2);
            if s.is_zero() {
                return Err(Error::NotNormalizable);
            }
            require(c(&c2, 0).is_zero(), "leading coefficient is not x(x+t)")?;
            let tau4 = c(&c2, 1) / &s;
            let tau2 = (c(&c1, 1) / &s - a - int(1) + &tau4) / int(2);
            require(
                c(&c1, 2) == -s.clone() && c(&c1, 0) / &s == &tau4 * (a + int(1)),
                "first-order coefficient does not match the operator L",
            )?;
            let tau3 = c(&c0, 1) / &s + &tau2;
            let shift = c(&c0, 0) - &s * &tau2 * (a + int(1));
            (s, int(1) - tau2, tau3, tau4, shift)
        }
        ClassicalCase::Hermite => {
            require(deg(&c2) <= 1, "leading coefficient has degree above 1")?;
            let s = c(&c2, 1);
            if s.is_zero() {
                return Err(Error::NotNormalizable);
            }
            let tau4 = c(&c2, 0) / &s;
            require(
                c(&c1, 2) == int(-2) * &s && c(&c1, 1) == int(-2) * &s * &tau4,
                "first-order coefficient does not match the operator L",
            )?;
            let tau2 = c(&c1, 0) / (int(2) * &s);
            let tau3 = c(&c0, 1) / &s + int(2) * &tau2;
            (s, int(1) - tau2, tau3, tau4, c(&c0, 0))
        }
    };
    let config = TridiagConfig::from_tau1(case.clone(), tau1, tau3, tau4);
    let rebuilt = &build_m(&config)?.scale(&scale) + &DiffOperator::scalar(shift.clone());
    require(&rebuilt == m, "operator is not an affine image of a tridiagonalization")?;
    let omegas = match heun_params(&config) {
        Ok(hp) => {
            let (w1, w2) = hp.jacobi_omegas();
            Some((format_rational(&w1), format_rational(&w2)))
        }
        Err(_) => None,
    };
    Ok(RecoveredConfig { config, scale, shift, omegas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::TridiagMatrix;
    use crate::weylops::op_matrix;

    #[test]
    fn canonical_closed_form() {
        let cfg = TridiagConfig::canonical();
        let m = build_m(&cfg).unwrap();
        assert_eq!(m, closed_form_m(&cfg).unwrap());
        let h = heun_coefficients(&cfg).unwrap();
        assert_eq!((h.rho2, h.r1, h.r0), (int(-6), int(14), int(1)));
        assert_eq!(
            m.coeff(2),
            Polynomial::new(vec![int(0), rat(1, 2), rat(1, 2), int(-1)])
        );
    }

    #[test]
    fn racah_limit_leading_coefficient() {
        let cfg = TridiagConfig::canonical().with_tau4(int(0));
        let m = build_m(&cfg).unwrap();
        // x²(1-x)
        assert_eq!(m.coeff(2), Polynomial::new(vec![int(0), int(0), int(1), int(-1)]));
    }

    #[test]
    fn hermite_closed_form() {
        let cfg = TridiagConfig::from_tau1(ClassicalCase::Hermite, rat(1, 2), int(1), int(1));
        let m = build_m(&cfg).unwrap();
        let expect = DiffOperator::second_order(
            Polynomial::new(vec![int(1), int(1)]),
            Polynomial::new(vec![int(1), int(-2), int(-2)]),
            Polynomial::zero(),
        );
        assert_eq!(m, expect);
        assert_eq!(m, closed_form_m(&cfg).unwrap());
    }

    #[test]
    fn laguerre_closed_form() {
        let case = ClassicalCase::Laguerre { a: rat(3, 7) };
        let cfg = TridiagConfig::from_tau1(case, rat(2, 5), rat(-4, 3), rat(5, 2));
        assert_eq!(build_m(&cfg).unwrap(), closed_form_m(&cfg).unwrap());
    }

    #[test]
    fn degenerate_and_unnormalized_taus() {
        let case = ClassicalCase::Hermite;
        let err = TridiagConfig::new(case.clone(), rat(1, 2), rat(-1, 2), int(0), int(0));
        assert_eq!(err, Err(Error::DegenerateTau));
        let err = TridiagConfig::new(case, int(1), int(1), int(0), int(0));
        assert!(matches!(err, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn canonical_heun_params() {
        let hp = heun_params(&TridiagConfig::canonical()).unwrap();
        assert_eq!(
            (hp.gamma.clone(), hp.delta.clone(), hp.epsilon.clone(), hp.d.clone()),
            (int(2), int(3), int(1), rat(-1, 2))
        );
        assert_eq!(hp.alpha_beta, int(-14));
        assert_eq!(hp.alpha_beta_roots, QuadraticRoots::Rational(int(-2), int(7)));
        assert_eq!(hp.jacobi_omegas(), (int(1), int(2)));
        assert!(verify_heun_form(&TridiagConfig::canonical()).unwrap().passed());
    }

    #[test]
    fn heun_params_edge_cases() {
        let hp = heun_params(&TridiagConfig::canonical().with_tau4(int(0))).unwrap();
        assert!(hp.d.is_zero());
        let case = ClassicalCase::Hypergeometric { nu1: int(-3), nu2: int(0) };
        let hp = heun_params(&TridiagConfig::from_tau1(case, rat(1, 3), int(2), int(5))).unwrap();
        assert!(hp.gamma.is_zero());
    }

    #[test]
    fn canonical_coefficients() {
        let cfg = TridiagConfig::canonical();
        let t = tridiag_coeffs(&cfg, 3).unwrap();
        assert_eq!((t.xi(1), t.xi(2), t.xi(3)), (&int(14), &int(8), &int(0)));
        assert_eq!(t.eta(0), &rat(33, 5));
        assert_eq!((t.eta(1), t.eta(2)), (&rat(193, 70), &rat(-27, 7)));
        for n in 0..4 {
            assert_eq!(t.xi(n), t.zeta(n));
        }
    }

    #[test]
    fn canonical_matrix_on_jacobi_basis() {
        let cfg = TridiagConfig::canonical();
        let m = build_m(&cfg).unwrap();
        let mat = op_matrix(&m, &BasisSpec::for_case(&cfg.case, 3)).unwrap();
        assert_eq!((&mat[(1, 0)], &mat[(2, 1)]), (&int(14), &int(8)));
        assert_eq!(&mat[(0, 1)], &(int(14) * rat(1, 25)));
        assert_eq!(&mat[(1, 2)], &(int(8) * rat(5, 98)));
        let tri = TridiagMatrix::new(
            vec![mat[(0, 0)].clone(), mat[(1, 1)].clone(), mat[(2, 2)].clone()],
            vec![mat[(0, 1)].clone(), mat[(1, 2)].clone()],
            vec![mat[(1, 0)].clone(), mat[(2, 1)].clone()],
        )
        .unwrap();
        assert_eq!(tri.to_dense(), mat);
    }

    #[test]
    fn tridiagonal_identity_and_fault_injection() {
        let cfg = TridiagConfig::canonical();
        assert!(verify_tridiagonal(&cfg, 10).unwrap().passed());
        assert!(verify_matrix_entries(&cfg, 10).unwrap().passed());
        assert!(verify_tridiagonal(&cfg.with_tau4(int(0)), 10).unwrap().passed());

        let mut coeffs = tridiag_coeffs(&cfg, 11).unwrap();
        coeffs.rows[5].eta += int(1);
        let report = verify_tridiagonal_with(&cfg, 10, &coeffs).unwrap();
        let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        assert_eq!(failed, vec!["M P_5".to_string()]);
    }

    #[test]
    fn eta_without_lambda_factor_fails() {
        // (τ₁+τ₂)bₙ + τ₃bₙ + τ₄λₙ, without the λₙ in the first term
        let cfg = TridiagConfig::canonical();
        let data = cfg.family();
        let mut coeffs = tridiag_coeffs(&cfg, 6).unwrap();
        for n in 0..=6 {
            let b = data.b(n).unwrap();
            coeffs.rows[n].eta = &b + &cfg.tau3 * &b + &cfg.tau4 * cfg.lambda(n as i64);
        }
        assert!(!verify_tridiagonal_with(&cfg, 5, &coeffs).unwrap().passed());
    }

    #[test]
    fn recover_round_trips() {
        let cfg = TridiagConfig::canonical();
        let m = build_m(&cfg).unwrap();
        let r = recover_taus(&m, &cfg.case).unwrap();
        assert_eq!((r.config.clone(), r.scale, r.shift), (cfg.clone(), int(1), int(0)));
        assert_eq!(r.omegas, Some(("1/1".into(), "2/1".into())));

        let affine = &m.scale(&int(2)) + &DiffOperator::scalar(int(3));
        let r = recover_taus(&affine, &cfg.case).unwrap();
        assert_eq!((r.config, r.scale, r.shift), (cfg.clone(), int(2), int(3)));

        let racah = build_m(&cfg.with_tau4(int(0))).unwrap();
        assert!(recover_taus(&racah, &cfg.case).unwrap().config.tau4.is_zero());

        for case in [ClassicalCase::Laguerre { a: rat(1, 3) }, ClassicalCase::Hermite] {
            let cfg = TridiagConfig::from_tau1(case, rat(3, 4), rat(-2, 5), rat(7, 3));
            let m = &build_m(&cfg).unwrap().scale(&rat(-1, 2)) + &DiffOperator::scalar(int(5));
            let r = recover_taus(&m, &cfg.case).unwrap();
            assert_eq!((r.config, r.scale, r.shift), (cfg, rat(-1, 2), int(5)));
        }
    }

    #[test]
    fn recover_rejects_non_heun_shapes() {
        let case = TridiagConfig::canonical().case;
        let bad = DiffOperator::second_order(
            Polynomial::new(vec![int(1), int(0), int(0), int(1)]),
            Polynomial::zero(),
            Polynomial::zero(),
        );
        assert!(matches!(recover_taus(&bad, &case), Err(Error::NotHeunShaped(_))));
        // τ₁ + τ₂ = 0: quadratic leading coefficient τ₄x(1-x)
        let cfg = TridiagConfig {
            tau1: int(1),
            tau2: int(-1),
            ..TridiagConfig::canonical()
        };
        assert_eq!(recover_taus(&assemble(&cfg), &case), Err(Error::NotNormalizable));
    }
}
