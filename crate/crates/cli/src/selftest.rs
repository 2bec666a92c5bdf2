//! The full invariant suite: fixed configurations for every module plus a
//! seeded sample of random ones. Jobs run through `batch::Execution`, so
//! the report is identical with or without the thread pool.

use heun_tridiag::batch::Execution;
use heun_tridiag::classical::{verify_family, ClassicalCase, FamilyData};
use heun_tridiag::exactnum::{
    format_rational, int, parse_rational, rat, symmetrize_tridiag, tridiag_eigen, Rational, EIGEN_RESIDUAL_BOUND,
};
use heun_tridiag::heunpoly::{heun_suite, truncated_config, wilson_compare, TruncatedProblem};
use heun_tridiag::report::{Check, VerificationReport};
use heun_tridiag::rhalgebra::{casimir, generators, racah_reduction, structure_constants, verify_algebra, Realization};
use heun_tridiag::sampling::{self, CaseKind};
use heun_tridiag::su11::{c23_as_hypergeometric, mixed_operator_check, verify_total_relation, Su11Config};
use heun_tridiag::tridiag::{verify_matrix_entries, verify_tridiagonal, TridiagConfig};
use heun_tridiag::weylops::{op_matrix, BasisSpec, DiffOperator, Polynomial};
use heun_tridiag::Result;
use serde_json::json;

use crate::commands::{construction_checks, count_failed, prefixed};
use crate::output::Output;

type Job = Box<dyn Fn() -> Result<VerificationReport> + Send + Sync>;

const PROBE_DEGREE: usize = 10;
const TABLE_DEGREE: usize = 12;

fn fixed_configs() -> Vec<(&'static str, TridiagConfig)> {
    vec![
        ("hypergeometric", TridiagConfig::canonical()),
        (
            "laguerre",
            TridiagConfig::from_tau1(ClassicalCase::Laguerre { a: rat(1, 3) }, rat(2, 3), rat(-5, 4), rat(3, 7)),
        ),
        ("hermite", TridiagConfig::from_tau1(ClassicalCase::Hermite, rat(-1, 2), rat(7, 3), rat(2, 5))),
    ]
}

fn truncated_problems() -> Vec<(&'static str, TridiagConfig, usize)> {
    let hyp = |nu1, nu2| ClassicalCase::Hypergeometric { nu1: int(nu1), nu2: int(nu2) };
    vec![
        ("canonical N=2", TridiagConfig::canonical(), 2),
        ("hypergeometric N=5", truncated_config(hyp(-11, 2), rat(1, 2), rat(1, 3), 5), 5),
        ("laguerre N=4", truncated_config(ClassicalCase::Laguerre { a: rat(1, 2) }, rat(1, 3), rat(1, 5), 4), 4),
        ("hermite N=4", truncated_config(ClassicalCase::Hermite, rat(1, 4), rat(-1, 3), 4), 4),
    ]
}

fn weyl_checks() -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let (x, d) = (DiffOperator::<Rational>::x(), DiffOperator::<Rational>::d());
    report.push(Check::operator_identity(
        "[D, X] = 1",
        &Realization::commutator(&d, &x) - &DiffOperator::identity(),
    ));
    let hyp = ClassicalCase::Hypergeometric { nu1: int(-5), nu2: int(2) }.operator();
    let mat = op_matrix(&hyp, &BasisSpec::monomial(6))?;
    let upper = mat.entries().all(|(i, j, v)| i <= j || num_traits::Zero::is_zero(v));
    report.push(Check::from_bool("L preserves degree on monomials", upper, "upper triangular"));
    let p = Polynomial::new(vec![int(1), int(-2), int(3)]);
    let composed = hyp.compose(&hyp).apply(&p) == hyp.apply(&hyp.apply(&p));
    report.push(Check::from_bool("compose agrees with repeated apply", composed, ""));
    Ok(report)
}

fn exactnum_checks() -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    for text in ["-33/2", "7", "0/5", "12345678901234567890/3"] {
        let r = parse_rational(text)?;
        let ok = parse_rational(&format_rational(&r))? == r;
        report.push(Check::from_bool(format!("rational round trip {text}"), ok, format_rational(&r)));
    }
    let tp = TruncatedProblem::new(&TridiagConfig::canonical(), 2)?;
    let eig = tridiag_eigen(&tp.matrix);
    report.push(Check::within("canonical eigen residual", eig.max_residual, EIGEN_RESIDUAL_BOUND));
    report.push(Check::from_bool(
        "canonical matrix symmetrizable",
        symmetrize_tridiag(&tp.matrix).is_ok(),
        "positive off-diagonal products",
    ));
    Ok(report)
}

fn tridiag_checks(cfg: &TridiagConfig) -> Result<VerificationReport> {
    let mut report = construction_checks(cfg)?;
    report.extend(verify_tridiagonal(cfg, TABLE_DEGREE)?);
    report.extend(verify_matrix_entries(cfg, TABLE_DEGREE)?);
    Ok(report)
}

fn algebra_checks(cfg: &TridiagConfig) -> Result<VerificationReport> {
    let mut report = verify_algebra(cfg, PROBE_DEGREE)?;
    report.extend(casimir(cfg)?.report);
    let sc = structure_constants(cfg)?;
    let (l, m) = generators(cfg)?;
    report.extend(racah_reduction(&sc, &m, &l).report);
    Ok(report)
}

fn su11_checks(cfg: &Su11Config) -> Result<VerificationReport> {
    let mut report = verify_total_relation(cfg);
    report.push(Check::from_bool("C23 is hypergeometric", c23_as_hypergeometric(cfg).is_ok(), ""));
    report.extend(mixed_operator_check(cfg, PROBE_DEGREE)?.report);
    Ok(report)
}

fn jobs(seed: u64, samples: usize) -> Vec<(String, Job)> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    for (name, cfg) in fixed_configs() {
        let case = cfg.case.clone();
        jobs.push((format!("classical {name}"), Box::new(move || verify_family(&FamilyData::new(case.clone()), TABLE_DEGREE))));
    }
    jobs.push(("weylops".into(), Box::new(weyl_checks)));
    jobs.push(("exactnum".into(), Box::new(exactnum_checks)));
    for (name, cfg) in fixed_configs() {
        let c = cfg.clone();
        jobs.push((format!("tridiag {name}"), Box::new(move || tridiag_checks(&c))));
        jobs.push((format!("rhalgebra {name}"), Box::new(move || algebra_checks(&cfg))));
    }
    for (name, cfg, n) in truncated_problems() {
        jobs.push((format!("heunpoly {name}"), Box::new(move || heun_suite(&cfg, n).map(|r| r.2))));
    }
    for tau4 in [int(0), rat(1, 10)] {
        let cfg = TridiagConfig::canonical().with_tau4(tau4.clone());
        jobs.push((
            format!("wilson tau4={}", format_rational(&tau4)),
            Box::new(move || wilson_compare(&cfg, TABLE_DEGREE).map(|w| w.report)),
        ));
    }
    let su11_fixed = [
        Su11Config::new(rat(1, 2), rat(1, 2), rat(1, 2), 1, int(0)),
        Su11Config::new(int(1), int(2), int(3), 4, int(1)),
        Su11Config::new(rat(1, 2), rat(3, 4), rat(5, 4), 3, rat(1, 3)),
    ];
    for (i, cfg) in su11_fixed.into_iter().enumerate() {
        jobs.push((format!("su11 fixed {i}"), Box::new(move || su11_checks(&cfg))));
    }

    let mut rng = sampling::rng(seed);
    for kind in CaseKind::ALL {
        for i in 0..samples {
            let cfg = sampling::random_config(&mut rng, kind, TABLE_DEGREE);
            jobs.push((format!("sampled {kind:?} {i} tridiag"), Box::new({
                let cfg = cfg.clone();
                move || {
                    let mut r = verify_matrix_entries(&cfg, TABLE_DEGREE)?;
                    r.extend(verify_tridiagonal(&cfg, TABLE_DEGREE)?);
                    Ok(r)
                }
            })));
            jobs.push((format!("sampled {kind:?} {i} algebra"), Box::new(move || verify_algebra(&cfg, PROBE_DEGREE))));
            let tcfg = sampling::random_truncated(&mut rng, kind, 4);
            jobs.push((format!("sampled {kind:?} {i} heunpoly"), Box::new(move || heun_suite(&tcfg, 4).map(|r| r.2))));
        }
    }
    for i in 0..samples {
        let cfg = sampling::random_su11(&mut rng, 4);
        jobs.push((format!("sampled su11 {i}"), Box::new(move || su11_checks(&cfg))));
    }
    jobs
}

pub fn selftest(seed: u64, samples: usize) -> Output {
    let mut out = Output::new("selftest", json!({ "seed": seed, "samples": samples }));
    let jobs = jobs(seed, samples);
    let reports = Execution::default().map(&jobs, |(_, job)| job());
    let mut summary = Vec::new();
    let mut csv = String::from("suite,checks,failed\n");
    for ((name, _), result) in jobs.iter().zip(reports) {
        let report = result.unwrap_or_else(|e| {
            let mut r = VerificationReport::new();
            r.push(Check::fail("run", format!("{}: {e}", e.kind())));
            r
        });
        let failed = count_failed(&report);
        summary.push(json!({ "suite": name, "checks": report.checks.len(), "failed": failed }));
        csv.push_str(&format!("{name},{},{failed}\n", report.checks.len()));
        out.report.extend(prefixed(name, report));
    }
    out.results = json!({ "suites": summary });
    out.tables = vec![("summary", csv)];
    out
}
