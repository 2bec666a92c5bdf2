//! Cross-checks against independently computed values: orthogonal
//! polynomials by Gram-Schmidt on exact moments, the action of M by
//! hand-coded polynomial calculus, and eigenvalues against the exact
//! trace and determinant.

use heun_tridiag::classical::{ClassicalCase, FamilyData};
use heun_tridiag::exactnum::{int, rat, to_f64, Rational};
use heun_tridiag::heunpoly::{heun_eigensystem, truncated_config, Complex64, TruncatedProblem};
use heun_tridiag::tridiag::{tridiag_coeffs, TridiagConfig};
use num_traits::{One, Zero};

type P = Vec<Rational>;

fn trim(mut p: P) -> P {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn add(a: &P, b: &P) -> P {
    let n = a.len().max(b.len());
    trim((0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect())
}

fn scale(a: &P, c: &Rational) -> P {
    trim(a.iter().map(|x| x * c).collect())
}

fn mul(a: &P, b: &P) -> P {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn deriv(a: &P) -> P {
    trim(a.iter().enumerate().skip(1).map(|(k, c)| c * int(k as i64)).collect())
}

fn inner(a: &P, b: &P, moments: &[Rational]) -> Rational {
    mul(a, b).iter().enumerate().map(|(k, c)| c * &moments[k]).sum()
}

/// Monic orthogonal polynomials of degree `0..=n` from moments.
fn gram_schmidt(moments: &[Rational], n: usize) -> Vec<P> {
    let mut out: Vec<P> = Vec::new();
    for k in 0..=n {
        let mut p: P = vec![Rational::zero(); k + 1];
        p[k] = Rational::one();
        for q in &out {
            let c = inner(&p, q, moments) / inner(q, q, moments);
            p = add(&p, &scale(q, &-c));
        }
        out.push(p);
    }
    out
}

fn coeffs_of(p: &heun_tridiag::weylops::Polynomial<Rational>, len: usize) -> P {
    trim((0..len).map(|k| p.coeff(k)).collect())
}

#[test]
fn jacobi_matches_gram_schmidt() {
    // Weight x^w1 (1-x)^w2 on [0,1]: m_k = prod_{j<k} (w1+1+j)/(w1+w2+2+j).
    for (w1, w2) in [(int(1), int(2)), (rat(-1, 2), rat(1, 3)), (int(0), int(0))] {
        let mut moments = vec![Rational::one()];
        for j in 0..24 {
            let next = &moments[j] * (&w1 + int(1 + j as i64)) / (&w1 + &w2 + int(2 + j as i64));
            moments.push(next);
        }
        let case = ClassicalCase::from_omegas(&w1, &w2);
        let data = FamilyData::new(case);
        let gs = gram_schmidt(&moments, 10);
        let polys = data.polys(10).unwrap();
        for n in 0..=10 {
            assert_eq!(coeffs_of(&polys[n], n + 1), gs[n], "w = ({w1}, {w2}), n = {n}");
        }
    }
}

#[test]
fn laguerre_and_hermite_match_gram_schmidt() {
    let a = rat(2, 3);
    let mut lag = vec![Rational::one()];
    for j in 0..24 {
        let next = &lag[j] * (&a + int(1 + j as i64));
        lag.push(next);
    }
    // e^{-x²}: m_{2k} = (2k-1)!!/2^k, odd moments vanish.
    let mut her = vec![Rational::one(), Rational::zero()];
    for k in 1..12 {
        let prev = her[2 * k - 2].clone();
        her.push(prev * rat(2 * k as i64 - 1, 2));
        her.push(Rational::zero());
    }
    for (case, moments) in [(ClassicalCase::Laguerre { a: a.clone() }, lag), (ClassicalCase::Hermite, her)] {
        let gs = gram_schmidt(&moments, 10);
        let polys = FamilyData::new(case.clone()).polys(10).unwrap();
        for n in 0..=10 {
            assert_eq!(coeffs_of(&polys[n], n + 1), gs[n], "{case:?}, n = {n}");
        }
    }
}

/// `L p` written out by hand for each case.
fn apply_l(case: &ClassicalCase, p: &P) -> P {
    let (d1, d2) = (deriv(p), deriv(&deriv(p)));
    match case {
        ClassicalCase::Hypergeometric { nu1, nu2 } => add(
            &mul(&vec![int(0), int(1), int(-1)], &d2),
            &mul(&vec![nu2.clone(), nu1.clone()], &d1),
        ),
        ClassicalCase::Laguerre { a } => add(
            &mul(&vec![int(0), int(1)], &d2),
            &mul(&vec![a + int(1), int(-1)], &d1),
        ),
        ClassicalCase::Hermite => add(&d2, &mul(&vec![int(0), int(-2)], &d1)),
    }
}

fn apply_m(cfg: &TridiagConfig, p: &P) -> P {
    let x = vec![int(0), int(1)];
    let lp = apply_l(&cfg.case, p);
    let xlp = mul(&x, &lp);
    let lxp = apply_l(&cfg.case, &mul(&x, p));
    add(
        &add(&scale(&xlp, &cfg.tau1), &scale(&lxp, &cfg.tau2)),
        &add(&scale(&mul(&x, p), &cfg.tau3), &scale(&lp, &cfg.tau4)),
    )
}

/// Expands `q` in the monic basis `basis` by back substitution on degrees.
fn expand(q: &P, basis: &[P]) -> Vec<Rational> {
    let mut rest = q.clone();
    let mut out = vec![Rational::zero(); basis.len()];
    while let Some(lead) = rest.last().cloned() {
        let k = rest.len() - 1;
        out[k] = lead.clone();
        rest = add(&rest, &scale(&basis[k], &-lead));
    }
    out
}

#[test]
fn tridiagonal_entries_from_hand_calculus() {
    let configs = [
        TridiagConfig::canonical(),
        TridiagConfig::from_tau1(
            ClassicalCase::Hypergeometric { nu1: rat(-7, 3), nu2: rat(5, 4) },
            rat(-2, 5),
            rat(3, 7),
            rat(-5, 2),
        ),
        TridiagConfig::from_tau1(ClassicalCase::Laguerre { a: rat(-1, 3) }, rat(4, 3), rat(1, 2), rat(2, 9)),
        TridiagConfig::from_tau1(ClassicalCase::Hermite, rat(1, 6), rat(-3, 2), rat(7, 5)),
    ];
    let n_max = 9;
    for cfg in configs {
        let basis: Vec<P> = FamilyData::new(cfg.case.clone())
            .polys(n_max + 1)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(n, p)| coeffs_of(p, n + 1))
            .collect();
        let table = tridiag_coeffs(&cfg, n_max + 1).unwrap();
        for n in 0..=n_max {
            let c = expand(&apply_m(&cfg, &basis[n]), &basis);
            for (k, v) in c.iter().enumerate() {
                let want = if k == n + 1 {
                    table.xi(n + 1).clone()
                } else if k == n {
                    table.eta(n).clone()
                } else if k + 1 == n {
                    table.zeta(n) * table.u(n)
                } else {
                    Rational::zero()
                };
                assert_eq!(*v, want, "{cfg:?}: entry ({k}, {n})");
            }
        }
    }
}

/// Determinant by cofactor expansion along the first row.
fn det(m: &[Vec<Rational>]) -> Rational {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut total = Rational::zero();
    for j in 0..m.len() {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * det(&minor);
        total += if j % 2 == 0 { term } else { -term };
    }
    total
}

#[test]
fn eigenvalues_match_trace_and_determinant() {
    let hyp = |nu1, nu2| ClassicalCase::Hypergeometric { nu1: int(nu1), nu2: int(nu2) };
    let configs = [
        (TridiagConfig::canonical(), 2),
        (truncated_config(hyp(-11, 2), rat(1, 2), rat(1, 3), 5), 5),
        (truncated_config(ClassicalCase::Hermite, rat(1, 4), rat(-1, 3), 4), 4),
    ];
    for (cfg, n) in configs {
        let tp = TruncatedProblem::new(&cfg, n).unwrap();
        let dense = tp.matrix.to_dense();
        let size = tp.size();
        let es = heun_eigensystem(&tp).unwrap();
        assert_eq!(es.pairs.len(), size);
        // Sum of eigenvalues equals the trace; product equals the determinant.
        let trace: f64 = (0..size).map(|i| to_f64(&dense.row(i)[i])).sum();
        let sum: f64 = es.eigenvalues().iter().map(|z| z.re).sum();
        assert!((trace - sum).abs() <= 1e-9 * trace.abs().max(1.0), "trace {trace} vs {sum}");
        let rows: Vec<Vec<Rational>> = (0..size).map(|i| dense.row(i).to_vec()).collect();
        let d = to_f64(&det(&rows));
        let prod = es.eigenvalues().iter().fold(Complex64::new(1.0, 0.0), |a, z| a * z);
        assert!((prod.re - d).abs() <= 1e-9 * d.abs().max(1.0), "det {d} vs {prod}");
        assert!(prod.im.abs() <= 1e-9 * d.abs().max(1.0));
    }
}
