//! The eight acceptance criteria, one pass/fail line each.
//!
//! Runs without the libtest harness so the summary lines always print.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use heun_tridiag::batch::Execution;
use heun_tridiag::classical::ClassicalCase;
use heun_tridiag::exactnum::{int, rat, Rational};
use heun_tridiag::heunpoly::{
    dual_basis_demo, heun_suite, perturbation_identity, truncated_config, wilson_compare, wilson_config,
};
use heun_tridiag::report::VerificationReport;
use heun_tridiag::rhalgebra::{casimir, generators, racah_reduction, structure_constants, verify_algebra, RhoRoots};
use heun_tridiag::sampling::{self, CaseKind};
use heun_tridiag::su11::{mixed_operator_check, verify_total_relation, Su11Config};
use heun_tridiag::tridiag::{verify_matrix_entries, TridiagConfig};
use num_traits::Zero;
use rand::Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self { ok, detail: detail.into() }
    }
}

/// First failing check of the first failing report, for the summary line.
fn first_failure(reports: &[(String, VerificationReport)]) -> Option<String> {
    reports.iter().find_map(|(label, r)| {
        r.failures().next().map(|c| format!("{label}: {} ({})", c.name, c.detail))
    })
}

fn summarize(reports: Vec<(String, VerificationReport)>, what: &str) -> Outcome {
    match first_failure(&reports) {
        None => Outcome::new(true, format!("{} {what}", reports.len())),
        Some(f) => Outcome::new(false, f),
    }
}

fn labelled<T>(r: heun_tridiag::Result<T>, label: String, f: impl FnOnce(T) -> VerificationReport) -> (String, VerificationReport) {
    match r {
        Ok(v) => (label, f(v)),
        Err(e) => {
            let mut rep = VerificationReport::new();
            rep.push(heun_tridiag::report::Check::fail("error", e.to_string()));
            (label, rep)
        }
    }
}

fn configs(seed: u64, per_case: usize, n_max: usize) -> Vec<TridiagConfig> {
    let mut rng = sampling::rng(seed);
    CaseKind::ALL
        .iter()
        .flat_map(|&k| (0..per_case).map(move |_| k))
        .collect::<Vec<_>>()
        .into_iter()
        .map(|k| sampling::random_config(&mut rng, k, n_max))
        .collect()
}

fn tridiagonality(exec: Execution) -> Outcome {
    let cfgs = configs(1, 100, 25);
    let reports = exec.map(&cfgs, |c| {
        labelled(verify_matrix_entries(c, 25), format!("{c:?}"), |r| r)
    });
    summarize(reports, "configs exactly tridiagonal at N = 25")
}

fn algebra(exec: Execution) -> Outcome {
    let cfgs = configs(2, 50, 0);
    let reports = exec.map(&cfgs, |c| labelled(verify_algebra(c, 10), format!("{c:?}"), |r| r));
    summarize(reports, "configs satisfy all relations, probe degree 10")
}

fn casimir_criterion(exec: Execution) -> Outcome {
    let mut rng = sampling::rng(3);
    let cfgs: Vec<_> = (0..20)
        .map(|_| sampling::random_config(&mut rng, CaseKind::Hypergeometric, 0))
        .collect();
    let mut reports = exec.map(&cfgs, |c| {
        labelled(casimir(c), format!("{c:?}"), |v| {
            let mut r = v.report;
            r.push(heun_tridiag::report::Check::from_bool(
                "q from closed form",
                v.q.is_some() && v.q == v.q_formula,
                "",
            ));
            r
        })
    });
    let canonical = casimir(&TridiagConfig::canonical()).expect("canonical casimir");
    let brute = canonical.probe_values[0].clone();
    let mut r = canonical.report.clone();
    r.push(heun_tridiag::report::Check::from_bool(
        "canonical brute force",
        canonical.probe_values.iter().all(|v| *v == brute) && canonical.q == Some(brute.clone()),
        "",
    ));
    reports.push(("canonical".into(), r));
    let mut out = summarize(reports, "configs");
    if out.ok {
        out.detail = format!("{}; canonical q = {brute} (x^0..x^10)", out.detail);
    }
    out
}

fn reduction(exec: Execution) -> Outcome {
    let cfgs = configs(4, 30, 0);
    let reports = exec.map(&cfgs, |c| {
        let label = format!("{c:?}");
        match (generators(c), structure_constants(c)) {
            (Ok((l, m)), Ok(sc)) => {
                let red = racah_reduction(&sc, &m, &l);
                let mut r = red.report;
                if matches!(red.roots, RhoRoots::Rational { .. }) && red.reality > Rational::zero() {
                    let all_zero = red.reduced.iter().all(|p| p.constants.as_ref().is_some_and(|k| k.kappa.is_zero()));
                    r.push(heun_tridiag::report::Check::from_bool("kappa' = 0", all_zero, ""));
                }
                (label, r)
            }
            (Err(e), _) | (_, Err(e)) => labelled::<()>(Err(e), label, |_| unreachable!()),
        }
    });
    let reduced = reports.iter().filter(|(_, r)| r.find("kappa' = 0").is_some()).count();
    let cfg = TridiagConfig::canonical();
    let (l, m) = generators(&cfg).expect("generators");
    let red = racah_reduction(&structure_constants(&cfg).expect("constants"), &m, &l);
    let canonical_ok = red.roots == RhoRoots::Rational { roots: vec![rat(1, 2), rat(3, 2)] } && red.report.passed();
    let out = summarize(reports, "configs");
    Outcome::new(
        out.ok && canonical_ok,
        format!("{}, {reduced} reduced with kappa' = 0; canonical rho = {{1/2, 3/2}}: {canonical_ok}", out.detail),
    )
}

fn truncation(exec: Execution) -> Outcome {
    let mut rng = sampling::rng(5);
    let jobs: Vec<(TridiagConfig, usize)> = (0..30)
        .map(|i| {
            let n = rng.random_range(0..=12usize);
            (sampling::random_truncated(&mut rng, CaseKind::ALL[i % 3], n), n)
        })
        .collect();
    let reports = exec.map(&jobs, |(c, n)| {
        labelled(heun_suite(c, *n), format!("N = {n}, {c:?}"), |(_, _, r)| r)
    });
    let skipped: usize = reports
        .iter()
        .map(|(_, r)| r.flags.iter().filter(|f| f.starts_with("ZeroLeadingOverlap")).count())
        .sum();
    let mut out = summarize(reports, "truncated problems, N <= 12");
    out.detail = format!("{}; {skipped} zero-overlap skips", out.detail);
    out
}

fn wilson(exec: Execution) -> Outcome {
    let mut rng = sampling::rng(6);
    let jobs: Vec<(TridiagConfig, Rational)> = (0..10)
        .map(|_| {
            let (w1, w2, m1, m2) = sampling::random_wilson_data(&mut rng);
            let tau4 = sampling::rational_in(&mut rng, -2, 2, 7);
            (wilson_config(&w1, &w2, &m1, &m2), tau4)
        })
        .collect();
    let reports = exec.map(&jobs, |(c, tau4)| {
        let label = format!("{c:?}, tau4 = {tau4}");
        match (wilson_compare(c, 15), perturbation_identity(&c.with_tau4(tau4.clone()), 15)) {
            (Ok(cmp), Ok(p)) => {
                let mut r = cmp.report;
                r.extend(p);
                (label, r)
            }
            (Err(e), _) | (_, Err(e)) => labelled::<()>(Err(e), label, |_| unreachable!()),
        }
    });
    summarize(reports, "Wilson parameter sets match for n <= 15, tau4 shift exact")
}

fn su11(exec: Execution) -> Outcome {
    let mut rng = sampling::rng(7);
    let cfgs: Vec<Su11Config> = (0..20).map(|_| sampling::random_su11(&mut rng, 10)).collect();
    let mut reports = exec.map(&cfgs, |c| (format!("{c:?}"), verify_total_relation(c)));
    let base = Su11Config::new(rat(1, 2), rat(3, 4), rat(5, 4), 4, int(0));
    let mut betas = vec![int(0), int(1)];
    betas.extend((0..50).map(|_| sampling::random_generic_beta(&mut rng)));
    let cfgs: Vec<Su11Config> = betas.into_iter().map(|b| base.with_beta(b)).collect();
    reports.extend(exec.map(&cfgs, |c| {
        labelled(mixed_operator_check(c, 10), format!("beta = {}", c.beta), |m| m.report)
    }));
    summarize(reports, "checks: 20 total relations, kappa(beta) at 0, 1 and 50 generic beta")
}

fn leonard() -> Outcome {
    let case = ClassicalCase::Hypergeometric { nu1: int(-5), nu2: int(2) };
    let mut worst_racah: f64 = 0.0;
    let mut least_heun = f64::INFINITY;
    for n in 2..=6 {
        let racah = truncated_config(case.clone(), rat(1, 2), int(0), n);
        let heun = truncated_config(case.clone(), rat(1, 2), rat(1, 2), n);
        match (dual_basis_demo(&racah, n), dual_basis_demo(&heun, n)) {
            (Ok(a), Ok(b)) => {
                if !a.kappa.is_zero() || b.kappa != rat(9, 2) {
                    return Outcome::new(false, format!("unexpected kappa at N = {n}"));
                }
                worst_racah = worst_racah.max(a.far_relative);
                least_heun = least_heun.min(b.far_relative);
            }
            (Err(e), _) | (_, Err(e)) => return Outcome::new(false, format!("N = {n}: {e}")),
        }
    }
    Outcome::new(
        worst_racah <= 1e-10 && least_heun > 1e-6,
        format!("kappa = 0: max far entry {worst_racah:.2e}; kappa = 9/2: min far entry {least_heun:.2e} (N = 2..6)"),
    )
}

fn main() -> ExitCode {
    let exec = Execution::default();
    type Criterion = (&'static str, u64, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        ("tridiagonality", 60, Box::new(move || tridiagonality(exec))),
        ("racah-heun algebra", 120, Box::new(move || algebra(exec))),
        ("casimir", 120, Box::new(move || casimir_criterion(exec))),
        ("racah reduction", 30, Box::new(move || reduction(exec))),
        ("truncation and eigensystem", 60, Box::new(move || truncation(exec))),
        ("wilson limit", 30, Box::new(move || wilson(exec))),
        ("su(1,1) realization", 60, Box::new(move || su11(exec))),
        ("leonard-pair contrast", 10, Box::new(leonard)),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let ok = outcome.ok && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({}; {:.1} s, target < {budget} s{})",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over target" },
        );
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
