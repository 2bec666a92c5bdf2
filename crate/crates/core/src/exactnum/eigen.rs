use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::roots::isolate_real_roots;
use super::{abs, pow2, to_f64, Matrix, Rational, TridiagMatrix};
use crate::error::{Error, Result};

/// Relative residual `‖Mv − λv‖∞ / (‖M‖∞ ‖v‖∞)` every eigenpair must meet.
pub const EIGEN_RESIDUAL_BOUND: f64 = 1e-10;

/// A symmetric tridiagonal matrix similar to the input.
///
/// With `S = diag(scaling)`, `S · M · S⁻¹` equals `matrix`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Symmetrized {
    pub matrix: TridiagMatrix<f64>,
    pub scaling: Vec<f64>,
}

pub fn symmetrize_tridiag(m: &TridiagMatrix<Rational>) -> Result<Symmetrized> {
    let products = m.off_diagonal_products();
    if let Some(index) = products.iter().position(|p| !p.is_positive()) {
        return Err(Error::NonSymmetrizable { index });
    }
    let off: Vec<f64> = products.iter().map(|p| to_f64(p).sqrt()).collect();
    let mut scaling = vec![1.0];
    for k in 0..m.sup.len() {
        let ratio = to_f64(&(&m.sup[k] / &m.sub[k])).sqrt();
        scaling.push(scaling[k] * ratio);
    }
    Ok(Symmetrized {
        matrix: TridiagMatrix {
            diag: m.diag.iter().map(to_f64).collect(),
            sup: off.clone(),
            sub: off,
        },
        scaling,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    Symmetrized,
    CharacteristicPolynomial,
}

/// Approximate eigen-decomposition of a tridiagonal matrix.
///
/// `values[i]` pairs with column `i` of `vectors`; only real eigenvalues
/// get vectors, complex ones are listed separately as `(re, im)`.
#[derive(Debug, Clone, Serialize)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub multiplicities: Vec<usize>,
    pub complex: Vec<(f64, f64)>,
    pub method: EigenMethod,
    pub max_residual: f64,
}

impl TridiagEigen {
    pub fn is_degenerate(&self) -> bool {
        self.multiplicities.iter().any(|&m| m > 1)
    }

    pub fn residual_ok(&self) -> bool {
        self.max_residual <= EIGEN_RESIDUAL_BOUND
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn normalize(v: &mut [f64]) {
    let i = (0..v.len())
        .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
        .unwrap_or(0);
    let s = v[i];
    if s != 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

fn relative_residual(m: &TridiagMatrix<f64>, norm: f64, value: f64, v: &[f64]) -> f64 {
    let mv = m.mul_vec(v);
    let r = mv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - value * b).abs())
        .fold(0.0, f64::max);
    let scale = norm.max(f64::MIN_POSITIVE) * max_abs(v);
    if scale == 0.0 {
        f64::INFINITY
    } else {
        r / scale
    }
}

/// One step of inverse iteration with a slightly shifted pole.
fn inverse_iterate(dense: &DMatrix<f64>, value: f64, v: &[f64], norm: f64) -> Option<Vec<f64>> {
    let n = v.len();
    let shift = value + norm.max(1.0) * 1e-13;
    let a = dense - DMatrix::identity(n, n) * shift;
    let w = a.lu().solve(&DVector::from_column_slice(v))?;
    let mut w: Vec<f64> = w.iter().copied().collect();
    if w.iter().any(|x| !x.is_finite()) {
        return None;
    }
    normalize(&mut w);
    Some(w)
}

/// Right singular vector of `M − λI` for its smallest singular values.
fn near_null_vectors(dense: &DMatrix<f64>, value: f64, count: usize) -> Vec<Vec<f64>> {
    let n = dense.nrows();
    let a = dense - DMatrix::identity(n, n) * value;
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    order
        .into_iter()
        .take(count.max(1))
        .map(|i| {
            let mut v: Vec<f64> = vt.row(i).iter().copied().collect();
            normalize(&mut v);
            v
        })
        .collect()
}

/// Eigenvalues (ascending) and eigenvectors of `m`.
///
/// Symmetrizable matrices go through a symmetric solver; all others through
/// the exact characteristic polynomial and Sturm root isolation. Complex
/// eigenvalues are reported in `complex`, never dropped.
pub fn tridiag_eigen(m: &TridiagMatrix<Rational>) -> TridiagEigen {
    let approx = m.to_f64();
    let norm = approx.norm_inf();
    let dense = approx.to_dense().to_nalgebra();
    let (method, mut values, mut vectors, multiplicities, complex) = match symmetrize_tridiag(m) {
        Ok(sym) => {
            let t = sym.matrix.to_dense().to_nalgebra();
            let eig = t.symmetric_eigen();
            let mut order: Vec<usize> = (0..m.size()).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
            let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            let vectors = order
                .iter()
                .map(|&i| {
                    let mut v: Vec<f64> = eig
                        .eigenvectors
                        .column(i)
                        .iter()
                        .zip(&sym.scaling)
                        .map(|(y, s)| y / s)
                        .collect();
                    normalize(&mut v);
                    v
                })
                .collect();
            // Unreduced symmetric tridiagonal matrices have simple spectra.
            (EigenMethod::Symmetrized, values, vectors, vec![1; m.size()], Vec::new())
        }
        Err(_) => {
            let mut roots = isolate_real_roots(&m.char_poly());
            let mut values = Vec::new();
            let mut vectors = Vec::new();
            let mut mults = Vec::new();
            let scale = Rational::one() + abs(&super::from_f64(norm).unwrap_or_else(Rational::one));
            for r in &mut roots {
                r.refine(&(&scale * pow2(-64)));
                let value = r.approx();
                let vs = near_null_vectors(&dense, value, r.multiplicity);
                for k in 0..r.multiplicity {
                    values.push(value);
                    vectors.push(vs[k.min(vs.len() - 1)].clone());
                    mults.push(r.multiplicity);
                }
            }
            let real_count = values.len();
            let complex = if real_count < m.size() {
                let mut c: Vec<(f64, f64)> = dense
                    .complex_eigenvalues()
                    .iter()
                    .filter(|z| z.im.abs() > 0.0)
                    .map(|z| (z.re, z.im))
                    .collect();
                c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
                c
            } else {
                Vec::new()
            };
            (EigenMethod::CharacteristicPolynomial, values, vectors, mults, complex)
        }
    };
    let mut max_residual: f64 = 0.0;
    for (value, v) in values.iter_mut().zip(vectors.iter_mut()) {
        let mut res = relative_residual(&approx, norm, *value, v);
        for _ in 0..3 {
            if res <= EIGEN_RESIDUAL_BOUND * 1e-3 {
                break;
            }
            let Some(w) = inverse_iterate(&dense, *value, v, norm) else {
                break;
            };
            let r2 = relative_residual(&approx, norm, *value, &w);
            if r2 >= res {
                break;
            }
            *v = w;
            res = r2;
        }
        max_residual = max_residual.max(res);
    }
    TridiagEigen {
        values,
        vectors,
        multiplicities,
        complex,
        method,
        max_residual,
    }
}

/// A real eigenvalue known to high precision with an exactly computed
/// eigenvector.
#[derive(Debug, Clone)]
pub struct RefinedEigenpair {
    /// Rational approximation within `error_bound` of the true eigenvalue.
    pub value: Rational,
    pub error_bound: Rational,
    /// Exact eigenvector when `exact`, otherwise the exact solution of one
    /// inverse-iteration step at `value`. Largest entry normalized to 1.
    pub vector: Vec<Rational>,
    pub multiplicity: usize,
    pub exact: bool,
}

impl RefinedEigenpair {
    pub fn value_f64(&self) -> f64 {
        to_f64(&self.value)
    }

    pub fn vector_f64(&self) -> Vec<f64> {
        self.vector.iter().map(to_f64).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RefinedSpectrum {
    pub pairs: Vec<RefinedEigenpair>,
    /// Number of eigenvalues (with multiplicity) off the real line.
    pub complex_count: usize,
}

fn normalize_exact(v: &mut [Rational]) {
    let Some(big) = v.iter().max_by(|a, b| abs(a).cmp(&abs(b))).cloned() else {
        return;
    };
    if !big.is_zero() {
        v.iter_mut().for_each(|x| *x /= &big);
    }
}

/// Real eigenpairs with eigenvalues isolated to `bits` binary digits.
///
/// Rational roots are found exactly and get exact null vectors; irrational
/// roots get one exact inverse-iteration solve at the refined rational
/// approximation, which is accurate to roughly `bits` digits divided by the
/// spectral gap.
pub fn refined_eigenpairs(m: &TridiagMatrix<Rational>, bits: u32) -> RefinedSpectrum {
    let n = m.size();
    let dense = m.to_dense();
    let tol = pow2(-(bits as i64));
    let roots = isolate_real_roots(&m.char_poly());
    let real: usize = roots.iter().map(|r| r.multiplicity).sum();
    let ones = vec![Rational::one(); n];
    let pairs = roots
        .into_iter()
        .map(|mut r| {
            r.refine(&tol);
            let value = r.midpoint();
            let shifted = dense.sub(&Matrix::identity(n).scale(&value));
            let (mut vector, exact) = if r.is_exact() {
                let mut null = shifted.null_space();
                (null.swap_remove(0), true)
            } else {
                match shifted.solve(&ones) {
                    Some(v) => (v, false),
                    None => (shifted.null_space().swap_remove(0), true),
                }
            };
            normalize_exact(&mut vector);
            RefinedEigenpair {
                value,
                error_bound: r.width() / super::int(2),
                vector,
                multiplicity: r.multiplicity,
                exact,
            }
        })
        .collect();
    RefinedSpectrum { pairs, complex_count: n - real }
}
