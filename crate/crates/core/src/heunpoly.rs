//! Truncated Heun operators: the finite tridiagonal eigenproblem, the Heun
//! polynomials it produces, their expansion over the classical basis and the
//! Racah-Heun recurrence that governs the expansion.

use nalgebra::{Complex, DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::classical::ClassicalCase;
use crate::error::{Error, Result};
use crate::exactnum::{
    format_rational, from_f64, int, pow2, refined_eigenpairs, to_f64, Quadratic, QuadraticRoots,
    Rational, TridiagMatrix, EIGEN_RESIDUAL_BOUND,
};
use crate::report::{format_approx, Check, VerificationReport};
use crate::rhalgebra::structure_constants;
use crate::tridiag::{build_m, heun_coefficients, tridiag_coeffs, TridiagCoeffs, TridiagConfig};
use crate::weylops::{op_matrix, BasisSpec, Polynomial};

type CRat = Complex<Rational>;
pub type Complex64 = Complex<f64>;

/// Relative tolerance of every floating-point check in this module.
pub const EXPANSION_TOLERANCE: f64 = EIGEN_RESIDUAL_BOUND;

/// Below this fraction of the column norm `W_{n0}` counts as zero.
pub const ZERO_OVERLAP_THRESHOLD: f64 = 1e-12;

/// Binary digits to which real eigenvalues are isolated.
const REFINE_BITS: u32 = 96;

/// `τ₃` for which `ξ_{N+1} = τ₁λ_N + τ₂λ_{N+1} + τ₃` vanishes, with `τ₂ = 1 - τ₁`.
pub fn truncation_tau3(case: &ClassicalCase, tau1: &Rational, n: usize) -> Rational {
    let tau2 = Rational::one() - tau1;
    let n = n as i64;
    -(tau1 * case.lambda(n) + tau2 * case.lambda(n + 1))
}

/// The configuration truncating at degree `n`.
pub fn truncated_config(case: ClassicalCase, tau1: Rational, tau4: Rational, n: usize) -> TridiagConfig {
    let tau3 = truncation_tau3(&case, &tau1, n);
    TridiagConfig::from_tau1(case, tau1, tau3, tau4)
}

/// `M` restricted to polynomials of degree at most `n`, written in the
/// classical eigenbasis `P₀..P_n`. Column `s` holds `M P_s`.
#[derive(Debug, Clone, Serialize)]
pub struct TruncatedProblem {
    pub config: TridiagConfig,
    #[serde(rename = "N")]
    pub n: usize,
    /// Rows `0..=N` of the coefficient table.
    pub coeffs: TridiagCoeffs,
    #[serde(skip)]
    pub matrix: TridiagMatrix<Rational>,
}

impl TruncatedProblem {
    pub fn new(cfg: &TridiagConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        let xi = cfg.xi(n as i64 + 1);
        if !xi.is_zero() {
            return Err(Error::Truncation(format!(
                "xi_{} = {} (need 0; tau3 = {} truncates at N = {n})",
                n + 1,
                format_rational(&xi),
                format_rational(&truncation_tau3(&cfg.case, &cfg.tau1, n)),
            )));
        }
        let coeffs = tridiag_coeffs(cfg, n)?;
        let diag = (0..=n).map(|k| coeffs.eta(k).clone()).collect();
        let sup = (1..=n).map(|k| coeffs.zeta(k) * coeffs.u(k)).collect();
        let sub = (1..=n).map(|k| coeffs.xi(k).clone()).collect();
        Ok(Self {
            config: cfg.clone(),
            n,
            coeffs,
            matrix: TridiagMatrix::new(diag, sup, sub)?,
        })
    }

    pub fn size(&self) -> usize {
        self.n + 1
    }

    /// Truncation seen three ways: `ξ_{N+1} = 0`, the closed-form condition
    /// (hypergeometric case), and the operator matrix closing on exactly
    /// `N + 1` basis polynomials and matching the coefficient table.
    pub fn verify(&self) -> Result<VerificationReport> {
        let cfg = &self.config;
        let n = self.n;
        let mut report = VerificationReport::new();
        let xi = cfg.xi(n as i64 + 1);
        report.push(Check::from_bool(
            format!("xi_{} = 0", n + 1),
            xi.is_zero(),
            format_rational(&xi),
        ));
        if matches!(cfg.case, ClassicalCase::Hypergeometric { .. }) {
            let h = heun_coefficients(cfg)?;
            let nn = int(n as i64);
            let cond = -(&nn * (&nn - int(1))) + &h.rho2 * &nn + &h.r1;
            report.push(Check::from_bool(
                "-N(N-1) + rho2 N + r1 = 0",
                cond.is_zero(),
                format_rational(&cond),
            ));
        }
        let m = build_m(cfg)?;
        let basis = BasisSpec::for_case(&cfg.case, n + 1);
        match op_matrix(&m, &basis) {
            Ok(mat) => {
                let same = mat == self.matrix.to_dense();
                report.push(Check::from_bool(
                    "op_matrix on N+1 polynomials",
                    same,
                    if same { "matches (xi, eta, zeta u)" } else { "entries differ from the coefficient table" },
                ));
            }
            Err(e) => report.push(Check::fail("op_matrix on N+1 polynomials", e.to_string())),
        }
        match op_matrix(&m, &basis.with_size(n + 2)) {
            Err(Error::SpaceNotPreserved { column, degree }) => report.push(Check::pass(
                "op_matrix on N+2 polynomials escapes",
                format!("column {column} reaches degree {degree}"),
            )),
            Err(e) => report.push(Check::skipped("op_matrix on N+2 polynomials escapes", e.to_string())),
            Ok(_) => report.push(Check::fail(
                "op_matrix on N+2 polynomials escapes",
                "degree N+1 is also preserved",
            )),
        }
        Ok(report)
    }
}

/// One eigenpair of a truncated problem.
#[derive(Debug, Clone, Serialize)]
pub struct HeunEigenpair {
    #[serde(serialize_with = "serialize_complex")]
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    /// `W_{n,s}`, `s = 0..=N`, largest entry scaled to 1.
    #[serde(rename = "W", serialize_with = "serialize_complex_vec")]
    pub w: Vec<Complex64>,
    /// Monomial coefficients of `Qₙ = Σ W_{ns} P_s`.
    #[serde(rename = "Q", serialize_with = "serialize_complex_vec")]
    pub q: Vec<Complex64>,
    pub degree: usize,
    /// `‖AW − λ̃W‖∞ / (‖A‖∞‖W‖∞)` for the tridiagonal matrix `A`.
    pub residual: f64,
    /// `‖MQ − λ̃Q‖∞ / (‖M‖∞‖Q‖∞)` with `M` applied as a differential operator.
    pub operator_residual: f64,
    #[serde(skip)]
    value_exact: CRat,
    #[serde(skip)]
    w_exact: Vec<CRat>,
}

impl HeunEigenpair {
    pub fn is_real(&self) -> bool {
        self.eigenvalue.im == 0.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HeunEigensystem {
    #[serde(rename = "N")]
    pub n: usize,
    /// Ordered by real part, then imaginary part.
    pub pairs: Vec<HeunEigenpair>,
    /// Largest algebraic multiplicity, when above 1.
    pub degenerate: Option<usize>,
    pub report: VerificationReport,
}

impl HeunEigensystem {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.eigenvalue).collect()
    }

    /// `W` with `w[n][s] = W_{ns}`.
    pub fn w_matrix(&self) -> Vec<Vec<Complex64>> {
        self.pairs.iter().map(|p| p.w.clone()).collect()
    }

    pub fn eigenvalues_csv(&self) -> String {
        let mut out = String::from("n,re,im\n");
        for (n, p) in self.pairs.iter().enumerate() {
            let z = p.eigenvalue;
            out.push_str(&format!("{n},{},{}\n", format_approx(z.re), format_approx(z.im)));
        }
        out
    }

    /// Long format: one row per entry `W_{ns}`.
    pub fn w_csv(&self) -> String {
        let mut out = String::from("n,s,re,im\n");
        for (n, p) in self.pairs.iter().enumerate() {
            for (s, z) in p.w.iter().enumerate() {
                out.push_str(&format!("{n},{s},{},{}\n", format_approx(z.re), format_approx(z.im)));
            }
        }
        out
    }

    /// `DegenerateSpectrum` if some eigenvalue is repeated.
    pub fn require_simple(&self) -> Result<()> {
        match self.degenerate {
            Some(multiplicity) => Err(Error::DegenerateSpectrum { multiplicity }),
            None => Ok(()),
        }
    }
}

fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(None)?;
    map.serialize_entry("approx", &true)?;
    map.serialize_entry("value", &format_approx(z.re))?;
    if z.im != 0.0 {
        map.serialize_entry("imag", &format_approx(z.im))?;
    }
    map.end()
}

fn serialize_complex_vec<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Item<'a>(&'a Complex64);
    impl Serialize for Item<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            serialize_complex(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&Item(z))?;
    }
    seq.end()
}

fn real(x: Rational) -> CRat {
    Complex::new(x, Rational::zero())
}

fn approx(z: &CRat) -> Complex64 {
    Complex::new(to_f64(&z.re), to_f64(&z.im))
}

fn modulus(z: &CRat) -> f64 {
    approx(z).norm()
}

fn exact(z: Complex64) -> CRat {
    let conv = |v: f64| from_f64(v).unwrap_or_else(Rational::zero);
    Complex::new(conv(z.re), conv(z.im))
}

fn max_modulus(v: &[CRat]) -> f64 {
    v.iter().map(modulus).fold(0.0, f64::max)
}

fn round_bits(x: &Rational, bits: i64) -> Rational {
    let scale = pow2(bits);
    (x * &scale).round() / scale
}

fn eval_complex(p: &Polynomial<Rational>, z: &CRat) -> CRat {
    p.coeffs()
        .iter()
        .rev()
        .fold(CRat::zero(), |acc, c| acc * z.clone() + real(c.clone()))
}

/// Newton steps on the exact characteristic polynomial, rounded to a fixed
/// dyadic grid so the rationals stay small.
fn polish_complex_root(p: &Polynomial<Rational>, z: Complex64) -> CRat {
    let dp = p.derivative();
    let mut z = exact(z);
    for _ in 0..4 {
        let d = eval_complex(&dp, &z);
        if d.is_zero() {
            break;
        }
        let step = eval_complex(p, &z) / d;
        z -= step;
        z = Complex::new(round_bits(&z.re, 110), round_bits(&z.im, 110));
    }
    z
}

/// Inverse iteration in complex floating point at a known eigenvalue.
fn complex_eigenvector(a: &DMatrix<Complex64>, value: Complex64) -> Vec<Complex64> {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let shift = value + Complex::new(scale * 1e-14, 0.0);
    let shifted = a - DMatrix::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut v = DVector::from_element(n, Complex::new(1.0, 0.0));
    for _ in 0..3 {
        let Some(w) = lu.solve(&v) else { break };
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            break;
        }
        v = w;
        let big = v.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap_or(Complex::new(1.0, 0.0));
        v /= big;
    }
    v.iter().copied().collect()
}

fn normalize_exact(v: &mut [CRat]) {
    let Some(big) = v
        .iter()
        .max_by(|a, b| modulus(a).total_cmp(&modulus(b)))
        .cloned()
    else {
        return;
    };
    if !big.is_zero() {
        for x in v.iter_mut() {
            *x = x.clone() / big.clone();
        }
    }
}

fn tridiag_apply(m: &TridiagMatrix<Rational>, v: &[CRat]) -> Vec<CRat> {
    let n = m.size();
    (0..n)
        .map(|i| {
            let mut acc = v[i].clone() * m.diag[i].clone();
            if i > 0 {
                acc += v[i - 1].clone() * m.sub[i - 1].clone();
            }
            if i + 1 < n {
                acc += v[i + 1].clone() * m.sup[i].clone();
            }
            acc
        })
        .collect()
}

fn combine(polys: &[Polynomial<Rational>], w: &[CRat]) -> (Polynomial<Rational>, Polynomial<Rational>) {
    let mut re = Polynomial::zero();
    let mut im = Polynomial::zero();
    for (p, c) in polys.iter().zip(w) {
        re = &re + &p.scale(&c.re);
        im = &im + &p.scale(&c.im);
    }
    (re, im)
}

fn coeff_vec(p: &Polynomial<Rational>, len: usize) -> Vec<Rational> {
    (0..len).map(|k| p.coeff(k)).collect()
}

/// Eigenvalues and eigenvectors of the truncated problem, with the Heun
/// polynomials assembled and both residuals checked.
///
/// Real eigenvalues are isolated exactly and refined; their eigenvectors
/// come from an exact solve. Complex eigenvalues are polished on the exact
/// characteristic polynomial and get floating-point vectors.
pub fn heun_eigensystem(tp: &TruncatedProblem) -> Result<HeunEigensystem> {
    let size = tp.size();
    let spectrum = refined_eigenpairs(&tp.matrix, REFINE_BITS);
    let mut raw: Vec<(CRat, Vec<CRat>, usize)> = Vec::new();
    for pair in &spectrum.pairs {
        let w: Vec<CRat> = pair.vector.iter().cloned().map(real).collect();
        for _ in 0..pair.multiplicity {
            raw.push((real(pair.value.clone()), w.clone(), pair.multiplicity));
        }
    }
    if spectrum.complex_count > 0 {
        let dense = tp.matrix.to_f64().to_dense().to_nalgebra();
        let a = dense.map(|x| Complex::new(x, 0.0));
        let mut found: Vec<Complex64> = dense.complex_eigenvalues().iter().copied().collect();
        found.sort_by(|x, y| y.im.abs().total_cmp(&x.im.abs()));
        let cp = tp.matrix.char_poly();
        for z in found.into_iter().take(spectrum.complex_count) {
            let value = polish_complex_root(&cp, z);
            let mut w: Vec<CRat> = complex_eigenvector(&a, approx(&value)).into_iter().map(exact).collect();
            normalize_exact(&mut w);
            raw.push((value, w, 1));
        }
    }
    raw.sort_by(|x, y| {
        let (a, b) = (approx(&x.0), approx(&y.0));
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });

    let cfg = &tp.config;
    let m = build_m(cfg)?;
    let polys = cfg.family().polys(tp.n)?;
    let mono = op_matrix(&m, &BasisSpec::monomial(size))?;
    let mono_norm = (0..size)
        .map(|i| mono.row(i).iter().map(to_f64).map(f64::abs).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let a_norm = tp.matrix.norm_inf().max(f64::MIN_POSITIVE);

    let mut report = VerificationReport::new();
    let degenerate = raw.iter().map(|r| r.2).max().filter(|&k| k > 1);
    if let Some(k) = degenerate {
        report.flag(format!("DegenerateSpectrum({k}): repeated eigenvalue, eigenvector repeated"));
    }
    let mut pairs = Vec::with_capacity(raw.len());
    for (idx, (value, w, multiplicity)) in raw.into_iter().enumerate() {
        let aw = tridiag_apply(&tp.matrix, &w);
        let r: Vec<CRat> = aw.into_iter().zip(&w).map(|(x, y)| x - y.clone() * value.clone()).collect();
        let residual = max_modulus(&r) / (a_norm * max_modulus(&w));

        let (q_re, q_im) = combine(&polys, &w);
        let (l_re, l_im) = (&value.re, &value.im);
        let r_re = &(&m.apply(&q_re) - &q_re.scale(l_re)) + &q_im.scale(l_im);
        let r_im = &(&m.apply(&q_im) - &q_im.scale(l_re)) - &q_re.scale(l_im);
        let to_c = |re: &Polynomial<Rational>, im: &Polynomial<Rational>, len: usize| -> Vec<CRat> {
            coeff_vec(re, len)
                .into_iter()
                .zip(coeff_vec(im, len))
                .map(|(a, b)| Complex::new(a, b))
                .collect()
        };
        let q = to_c(&q_re, &q_im, size);
        let r_len = r_re.coeffs().len().max(r_im.coeffs().len()).max(1);
        let operator_residual = max_modulus(&to_c(&r_re, &r_im, r_len)) / (mono_norm * max_modulus(&q));
        let degree = q_re.degree().into_iter().chain(q_im.degree()).max().unwrap_or(0);

        report.push(Check::within(format!("A W_{idx} = lambda W_{idx}"), residual, EXPANSION_TOLERANCE));
        report.push(Check::within(format!("M Q_{idx} = lambda Q_{idx}"), operator_residual, EXPANSION_TOLERANCE));
        pairs.push(HeunEigenpair {
            eigenvalue: approx(&value),
            multiplicity,
            w: w.iter().map(approx).collect(),
            q: q.iter().map(approx).collect(),
            degree,
            residual,
            operator_residual,
            value_exact: value,
            w_exact: w,
        });
    }
    Ok(HeunEigensystem { n: tp.n, pairs, degenerate, report })
}

/// Monic recurrence `R̂ₙ₊₁ + BₙR̂ₙ + UₙR̂ₙ₋₁ = xR̂ₙ` with `Bₙ = ηₙ`,
/// `Uₙ = uₙξₙζₙ`, for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RacahHeunRecurrence {
    #[serde(rename = "B", serialize_with = "crate::exactnum::serde_rational::serialize_vec")]
    pub b: Vec<Rational>,
    #[serde(rename = "U", serialize_with = "crate::exactnum::serde_rational::serialize_vec")]
    pub u: Vec<Rational>,
    /// Indices `n ≥ 1` with `Uₙ ≤ 0`, outside the regime of a positive
    /// orthogonality measure.
    pub nonpositive_u: Vec<usize>,
}

impl RacahHeunRecurrence {
    pub fn n_max(&self) -> usize {
        self.b.len() - 1
    }

    pub fn is_positive(&self) -> bool {
        self.nonpositive_u.is_empty()
    }

    /// `R̂₀..R̂_k` for `k ≤ n_max + 1`.
    pub fn monic_polys(&self, k: usize) -> Result<Vec<Polynomial<Rational>>> {
        if k > self.n_max() + 1 {
            return Err(Error::Dimension(format!("degree {k} beyond n_max + 1 = {}", self.n_max() + 1)));
        }
        let mut out = vec![Polynomial::one()];
        for n in 0..k {
            let mut next = &out[n].shift(1) - &out[n].scale(&self.b[n]);
            if n > 0 {
                next = &next - &out[n - 1].scale(&self.u[n]);
            }
            out.push(next);
        }
        Ok(out)
    }

    /// `R̂_k(x)` for `k = 0..=degree` at each grid point.
    pub fn eval_grid(&self, points: &[Rational], degree: usize) -> Result<Vec<Vec<Rational>>> {
        let polys = self.monic_polys(degree)?;
        Ok(points.iter().map(|x| polys.iter().map(|p| p.eval(x)).collect()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,B,U\n");
        for (n, (b, u)) in self.b.iter().zip(&self.u).enumerate() {
            out.push_str(&format!("{n},{},{}\n", format_rational(b), format_rational(u)));
        }
        out
    }
}

pub fn racah_heun_recurrence(cfg: &TridiagConfig, n_max: usize) -> Result<RacahHeunRecurrence> {
    let coeffs = tridiag_coeffs(cfg, n_max)?;
    let b: Vec<Rational> = (0..=n_max).map(|n| coeffs.eta(n).clone()).collect();
    let u: Vec<Rational> = (0..=n_max)
        .map(|n| coeffs.u(n) * coeffs.xi(n) * coeffs.zeta(n))
        .collect();
    let nonpositive_u = (1..=n_max).filter(|&n| !u[n].is_positive()).collect();
    Ok(RacahHeunRecurrence { b, u, nonpositive_u })
}

/// `R₀..R_k` from `ζ_{s+1}u_{s+1}R_{s+1} + η_sR_s + ξ_sR_{s-1} = xR_s`,
/// `R₀ = 1`, `R₋₁ = 0`. Uses table rows `0..=k`.
pub fn nonmonic_polys(coeffs: &TridiagCoeffs, k: usize) -> Result<Vec<Polynomial<Rational>>> {
    if k >= coeffs.len() {
        return Err(Error::Dimension(format!("need {} table rows, have {}", k + 1, coeffs.len())));
    }
    let mut out = vec![Polynomial::one()];
    for s in 0..k {
        let lead = coeffs.zeta(s + 1) * coeffs.u(s + 1);
        if lead.is_zero() {
            return Err(Error::ParameterPole { index: s as i64 + 1 });
        }
        let mut next = &out[s].shift(1) - &out[s].scale(coeffs.eta(s));
        if s > 0 {
            next = &next - &out[s - 1].scale(coeffs.xi(s));
        }
        out.push(next.scale(&(Rational::one() / lead)));
    }
    Ok(out)
}

/// Checks of the expansion `Qₙ = Σ W_{ns}P_s`:
/// (i) the three-term recurrence of the columns of `W`;
/// (ii) `W_{ns} = W_{n0}R_s(λ̃ₙ)`, skipped (and flagged) when `W_{n0}` vanishes;
/// (iii) exactly, `R_s = δ_sR̂_s` with `δ₀ = 1`, `ζ_{s+1}u_{s+1}δ_{s+1} = δ_s`.
pub fn verify_expansion(
    es: &HeunEigensystem,
    rr: &RacahHeunRecurrence,
    tp: &TruncatedProblem,
) -> Result<VerificationReport> {
    let n = tp.n;
    let c = &tp.coeffs;
    let mut report = VerificationReport::new();
    let a_norm = tp.matrix.norm_inf().max(f64::MIN_POSITIVE);
    // A vanishing ζ_s u_s splits the matrix; R_s stops being defined there.
    let limit = (1..=n).find(|&s| (c.zeta(s) * c.u(s)).is_zero()).unwrap_or(n + 1);
    if limit <= n {
        report.flag(format!(
            "ReducibleRecurrence({limit}): zeta_s u_s = 0 at s = {limit}, R_s compared for s < {limit}"
        ));
    }
    let r = nonmonic_polys(c, limit - 1)?;

    for (idx, pair) in es.pairs.iter().enumerate() {
        let w = &pair.w_exact;
        let lambda = &pair.value_exact;
        let zero = CRat::zero();
        let get = |s: i64| if s < 0 || s > n as i64 { zero.clone() } else { w[s as usize].clone() };
        let rec: Vec<CRat> = (0..=n)
            .map(|s| {
                let k = s as i64;
                let up = if s < n { get(k + 1) * (c.zeta(s + 1) * c.u(s + 1)) } else { zero.clone() };
                up + get(k) * c.eta(s).clone() + get(k - 1) * c.xi(s).clone() - get(k) * lambda.clone()
            })
            .collect();
        let scale = max_modulus(w);
        report.push(Check::within(
            format!("W recurrence, n = {idx}"),
            max_modulus(&rec) / (a_norm * scale),
            EXPANSION_TOLERANCE,
        ));

        let name = format!("W_ns = W_n0 R_s(lambda_n), n = {idx}");
        if modulus(&w[0]) < ZERO_OVERLAP_THRESHOLD * scale {
            report.push(Check::skipped(&name, "W_n0 = 0"));
            report.flag(format!("ZeroLeadingOverlap({idx})"));
            continue;
        }
        let diff: Vec<CRat> = (0..limit)
            .map(|s| w[s].clone() - w[0].clone() * eval_complex(&r[s], lambda))
            .collect();
        report.push(Check::within(name, max_modulus(&diff) / scale, EXPANSION_TOLERANCE));
    }

    if rr.n_max() + 1 < n {
        return Err(Error::Dimension(format!("recurrence table too short for N = {n}")));
    }
    let monic = rr.monic_polys(n)?;
    let mut delta = Rational::one();
    let mut chain_bad = Vec::new();
    let mut without_u = Rational::one();
    let mut without_u_first_bad = None;
    for s in 0..limit {
        if s > 0 {
            delta /= c.zeta(s) * c.u(s);
            without_u /= c.zeta(s).clone();
        }
        if r[s].leading() != Some(&delta) || r[s] != monic[s].scale(&delta) {
            chain_bad.push(s);
        }
        if without_u_first_bad.is_none() && r[s].leading() != Some(&without_u) {
            without_u_first_bad = Some(s);
        }
    }
    report.push(Check::from_bool(
        "R_s = delta_s Rhat_s",
        chain_bad.is_empty(),
        if chain_bad.is_empty() {
            format!("exact for s = 0..{limit}")
        } else {
            format!("fails at s = {chain_bad:?}")
        },
    ));
    if let Some(s) = without_u_first_bad {
        report.flag(format!(
            "chain zeta_(s+1) delta_(s+1) = delta_s without the u factor misses the leading coefficient at s = {s}"
        ));
    }
    Ok(report)
}

/// Truncation, eigensystem and expansion checks for one configuration.
pub fn heun_suite(cfg: &TridiagConfig, n: usize) -> Result<(HeunEigensystem, RacahHeunRecurrence, VerificationReport)> {
    let tp = TruncatedProblem::new(cfg, n)?;
    let mut report = tp.verify()?;
    let es = heun_eigensystem(&tp)?;
    let rr = racah_heun_recurrence(cfg, n)?;
    report.extend(es.report.clone());
    report.extend(verify_expansion(&es, &rr, &tp)?);
    Ok((es, rr, report))
}

/// Wilson parameters matched to a `τ₄ = 0` hypergeometric configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilsonParameters {
    #[serde(with = "crate::exactnum::serde_rational")]
    pub mu1: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub mu2: Rational,
    #[serde(serialize_with = "crate::exactnum::serde_rational::serialize_vec")]
    pub a: Vec<Rational>,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub g: Rational,
    /// Shift of the affine change of variable `x ↦ γ - x`.
    #[serde(with = "crate::exactnum::serde_rational")]
    pub gamma: Rational,
}

impl WilsonParameters {
    fn from_mus(omega1: &Rational, omega2: &Rational, mu1: Rational, mu2: Rational) -> Result<Self> {
        use crate::exactnum::Matrix;
        let (o, l) = (int(1), int(0));
        let system = Matrix::from_rows(vec![
            vec![o.clone(), o.clone(), l.clone(), l.clone()],
            vec![l.clone(), l.clone(), o.clone(), o.clone()],
            vec![o.clone(), l.clone(), o.clone(), l.clone()],
            vec![l.clone(), o.clone(), o.clone(), l],
        ])?;
        let rhs = [omega1 + &o, omega2 + &o, &o - &mu1, &o - &mu2];
        let a = system.solve(&rhs).ok_or(Error::UnderdeterminedParameters)?;
        let g = a.iter().fold(Rational::zero(), |acc, x| acc + x);
        let gamma = (&a[0] + &a[1] - &a[0] * &a[0] - &a[1] * &a[1]) / int(2);
        Ok(Self { mu1, mu2, a, g, gamma })
    }

    /// `Aₙ = (n+g-1)(n+a₁+a₂)(n+a₁+a₃)(n+a₁+a₄) / ((2n+g-1)(2n+g))`.
    pub fn a_coef(&self, n: i64) -> Result<Rational> {
        let a = &self.a;
        let nn = int(n);
        let num = (&nn + &self.g - int(1)) * (&nn + &a[0] + &a[1]) * (&nn + &a[0] + &a[2]) * (&nn + &a[0] + &a[3]);
        let t = int(2 * n) + &self.g;
        let den = (&t - int(1)) * &t;
        if den.is_zero() {
            return Err(Error::ParameterPole { index: n });
        }
        Ok(num / den)
    }

    /// `Cₙ = n(n+a₂+a₃-1)(n+a₂+a₄-1)(n+a₃+a₄-1) / ((2n+g-2)(2n+g-1))`, `C₀ = 0`.
    pub fn c_coef(&self, n: i64) -> Result<Rational> {
        if n == 0 {
            return Ok(Rational::zero());
        }
        let a = &self.a;
        let nn = int(n);
        let m1 = &nn - int(1);
        let num = &nn * (&m1 + &a[1] + &a[2]) * (&m1 + &a[1] + &a[3]) * (&m1 + &a[2] + &a[3]);
        let t = int(2 * n) + &self.g;
        let den = (&t - int(2)) * (&t - int(1));
        if den.is_zero() {
            return Err(Error::ParameterPole { index: n });
        }
        Ok(num / den)
    }
}

/// Both assignments of `(μ₁, μ₂)` solving
/// `τ₂ = (1 + μ₁ - μ₂)/2`, `τ₃ = μ₁μ₂ + s(μ₁ + μ₂ - 1)/2` with `s = ω₁ + ω₂`.
pub fn wilson_parameters(cfg: &TridiagConfig) -> Result<Vec<WilsonParameters>> {
    let (w1, w2) = cfg.case.omegas().ok_or(Error::UnsupportedCase(cfg.case.name()))?;
    let s = &w1 + &w2;
    let k = int(2) * &cfg.tau2 - int(1);
    let quad = Quadratic::new(
        int(1),
        &s - &k,
        -(&s * (&k + int(1)) / int(2)) - &cfg.tau3,
    );
    let mus = match quad.roots() {
        QuadraticRoots::Rational(r1, r2) if r1 == r2 => vec![r1],
        QuadraticRoots::Rational(r1, r2) => vec![r1, r2],
        _ => {
            return Err(Error::IrrationalParameters {
                discriminant: format_rational(&quad.discriminant()),
            })
        }
    };
    mus.into_iter()
        .map(|mu1| {
            let mu2 = &mu1 - &k;
            WilsonParameters::from_mus(&w1, &w2, mu1, mu2)
        })
        .collect()
}

/// A `τ₄ = 0` hypergeometric configuration with prescribed Wilson data.
pub fn wilson_config(omega1: &Rational, omega2: &Rational, mu1: &Rational, mu2: &Rational) -> TridiagConfig {
    let s = omega1 + omega2;
    let tau2 = (int(1) + mu1 - mu2) / int(2);
    let tau3 = mu1 * mu2 + &s * (mu1 + mu2 - int(1)) / int(2);
    let case = ClassicalCase::from_omegas(omega1, omega2);
    TridiagConfig::from_tau1(case, int(1) - tau2, tau3, int(0))
}

#[derive(Debug, Clone, Serialize)]
pub struct WilsonComparison {
    pub parameters: Vec<WilsonParameters>,
    #[serde(rename = "n_max")]
    pub n_max: usize,
    /// `Uₙ = Aₙ₋₁Cₙ` holds for every parameter assignment.
    pub pairing_shifted_a: bool,
    /// `Uₙ = AₙCₙ₋₁` holds for every parameter assignment.
    pub pairing_shifted_c: bool,
    pub report: VerificationReport,
}

/// Compares the Racah-Heun recurrence of `cfg` at `τ₄ = 0` with the Wilson
/// recurrence under `x ↦ γ - x`, and when `τ₄ ≠ 0` checks that only the
/// diagonal coefficients move, by exactly `τ₄λₙ`.
pub fn wilson_compare(cfg: &TridiagConfig, n_max: usize) -> Result<WilsonComparison> {
    cfg.validate()?;
    let base = cfg.with_tau4(int(0));
    let rr = racah_heun_recurrence(&base, n_max)?;
    let parameters = wilson_parameters(&base)?;
    let mut report = VerificationReport::new();
    let (mut shifted_a, mut shifted_c) = (true, true);
    for (i, wp) in parameters.iter().enumerate() {
        let tag = format!("mu1 = {}", format_rational(&wp.mu1));
        let mut b_bad = Vec::new();
        let mut u_bad = Vec::new();
        let mut alt_ok = true;
        for n in 0..=n_max {
            let k = n as i64;
            let (an, cn) = (wp.a_coef(k)?, wp.c_coef(k)?);
            let b = &wp.gamma - (&an + &cn - &wp.a[0] * &wp.a[0]);
            if b != rr.b[n] {
                b_bad.push(n);
            }
            if n >= 1 {
                if rr.u[n] != wp.a_coef(k - 1)? * &cn {
                    u_bad.push(n);
                }
                if rr.u[n] != &an * wp.c_coef(k - 1)? {
                    alt_ok = false;
                }
            }
        }
        shifted_a &= u_bad.is_empty();
        shifted_c &= alt_ok;
        let detail = |bad: &[usize]| {
            if bad.is_empty() {
                format!("exact for n = 0..={n_max}")
            } else {
                format!("differs at n = {bad:?}")
            }
        };
        report.push(Check::from_bool(format!("B_n = gamma - (A_n + C_n - a1^2), {tag}"), b_bad.is_empty(), detail(&b_bad)));
        report.push(Check::from_bool(format!("U_n = A_(n-1) C_n, {tag}"), u_bad.is_empty(), detail(&u_bad)));
        if i == 0 {
            report.note_conversion(format!(
                "a = ({})",
                wp.a.iter().map(format_rational).collect::<Vec<_>>().join(", ")
            ));
        }
    }
    report.flag(format!(
        "pairing U_n = A_n C_(n-1) {}",
        if shifted_c { "also holds" } else { "does not hold" }
    ));
    if !cfg.tau4.is_zero() {
        report.extend(perturbation_identity(cfg, n_max)?);
    }
    Ok(WilsonComparison {
        parameters,
        n_max,
        pairing_shifted_a: shifted_a,
        pairing_shifted_c: shifted_c,
        report,
    })
}

/// `Bₙ(τ₄) - Bₙ(0) = τ₄λₙ` and `Uₙ(τ₄) = Uₙ(0)` for `n = 0..=n_max`.
pub fn perturbation_identity(cfg: &TridiagConfig, n_max: usize) -> Result<VerificationReport> {
    let rr = racah_heun_recurrence(cfg, n_max)?;
    let r0 = racah_heun_recurrence(&cfg.with_tau4(int(0)), n_max)?;
    let b_bad: Vec<usize> = (0..=n_max)
        .filter(|&n| &rr.b[n] - &r0.b[n] != &cfg.tau4 * cfg.lambda(n as i64))
        .collect();
    let u_bad: Vec<usize> = (0..=n_max).filter(|&n| rr.u[n] != r0.u[n]).collect();
    let mut report = VerificationReport::new();
    report.push(Check::from_bool(
        "B_n(tau4) - B_n(0) = tau4 lambda_n",
        b_bad.is_empty(),
        if b_bad.is_empty() { String::from("exact") } else { format!("differs at n = {b_bad:?}") },
    ));
    report.push(Check::from_bool(
        "U_n independent of tau4",
        u_bad.is_empty(),
        if u_bad.is_empty() { String::from("exact") } else { format!("differs at n = {u_bad:?}") },
    ));
    Ok(report)
}

/// `L` written in the eigenbasis of a truncated `M`.
#[derive(Debug, Clone, Serialize)]
pub struct DualBasisDemo {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub kappa: Rational,
    /// Largest `|L_mn|` with `|m - n| ≥ 2`, relative to the largest entry,
    /// minimized over orderings of the eigenbasis.
    pub far_relative: f64,
    /// Eigenbasis ordering that attains `far_relative`.
    pub ordering: Vec<usize>,
    /// Whether every ordering was tried (otherwise only ascending).
    pub exhaustive: bool,
}

/// Orderings are searched exhaustively up to this many basis vectors.
const EXHAUSTIVE_ORDERINGS: usize = 8;

pub fn dual_basis_demo(cfg: &TridiagConfig, n: usize) -> Result<DualBasisDemo> {
    let tp = TruncatedProblem::new(cfg, n)?;
    let es = heun_eigensystem(&tp)?;
    let kappa = structure_constants(cfg)?.kappa;
    let size = tp.size();
    let v = DMatrix::from_fn(size, size, |s, k| es.pairs[k].w[s]);
    let lam = DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            Complex::new(to_f64(&cfg.lambda(i as i64)), 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let inv = v
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Dimension("eigenvector matrix is singular".into()))?;
    let l = inv * lam * v;
    let largest = l.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let far = |order: &[usize]| {
        let mut worst: f64 = 0.0;
        for i in 0..size {
            for j in 0..size {
                if i.abs_diff(j) >= 2 {
                    worst = worst.max(l[(order[i], order[j])].norm());
                }
            }
        }
        worst / largest
    };
    let mut best: Vec<usize> = (0..size).collect();
    let mut best_far = far(&best);
    let exhaustive = size <= EXHAUSTIVE_ORDERINGS;
    if exhaustive {
        let mut perm: Vec<usize> = (0..size).collect();
        while next_permutation(&mut perm) {
            // An ordering and its reverse give the same band structure.
            if perm.first() > perm.last() {
                continue;
            }
            let f = far(&perm);
            if f < best_far {
                best_far = f;
                best = perm.clone();
            }
        }
    }
    Ok(DualBasisDemo { n, kappa, far_relative: best_far, ordering: best, exhaustive })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
