//! One function per subcommand. Each returns the assembled [`Output`];
//! a library error means the inputs were unusable and maps to exit code 2.

use heun_tridiag::classical::FamilyData;
use heun_tridiag::exactnum::{format_rational, parse_rational, Rational};
use heun_tridiag::heunpoly::{
    heun_suite, nonmonic_polys, perturbation_identity, racah_heun_recurrence, wilson_compare,
};
use heun_tridiag::report::{Check, Status, VerificationReport};
use heun_tridiag::rhalgebra::{casimir, generators, racah_reduction, structure_constants, verify_algebra};
use heun_tridiag::su11::{c23_as_hypergeometric, casimir_ops, mixed_operator_check, verify_total_relation};
use heun_tridiag::tridiag::{
    build_m, closed_form_m, heun_form, recover_taus, tridiag_coeffs, verify_heun_form, verify_matrix_entries,
    verify_tridiagonal, TridiagConfig,
};
use heun_tridiag::{Error, Result};
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::args::{ConfigArgs, Su11Args};
use crate::output::Output;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect())
}

/// `build_m` against the closed form, the Heun form, and recovery of the
/// τ's from the operator alone.
pub fn construction_checks(cfg: &TridiagConfig) -> Result<VerificationReport> {
    let m = build_m(cfg)?;
    let mut report = VerificationReport::new();
    report.push(Check::operator_identity("M = closed form", &m - &closed_form_m(cfg)?));
    if cfg.case.omegas().is_some() {
        report.extend(verify_heun_form(cfg)?);
    }
    let rec = recover_taus(&m, &cfg.case)?;
    let ok = rec.config == *cfg && rec.scale.is_one() && rec.shift.is_zero();
    report.push(Check::from_bool(
        "recover taus from M",
        ok,
        if ok { "exact".to_string() } else { format!("recovered {:?}", to_value(&rec)) },
    ));
    Ok(report)
}

pub fn construct(args: &ConfigArgs, n_max: usize) -> Result<Output> {
    let cfg = args.build(None)?;
    let mut out = Output::new("construct", json!({ "config": to_value(&cfg), "n_max": n_max }));
    let coeffs = tridiag_coeffs(&cfg, n_max)?;
    let family = FamilyData::new(cfg.case.clone());
    out.results = json!({
        "operator": to_value(&build_m(&cfg)?),
        "heun_form": to_value(&heun_form(&cfg)?),
        "coefficients": to_value(&coeffs.rows),
        "family": to_value(&family.table(n_max)?),
    });
    out.report = construction_checks(&cfg)?;
    out.report.extend(verify_matrix_entries(&cfg, n_max)?);
    out.tables = vec![("coeffs", coeffs.to_csv()), ("family", family.table_csv(n_max)?)];
    Ok(out)
}

const RELATIONS: [&str; 3] = ["[L,M]=Z", "[M,Z]", "[Z,L]"];

pub fn verify_algebra_cmd(args: &ConfigArgs, degree: usize) -> Result<Output> {
    let cfg = args.build(None)?;
    let mut out = Output::new("verify-algebra", json!({ "config": to_value(&cfg), "degree": degree }));
    let sc = structure_constants(&cfg)?;
    let report = verify_algebra(&cfg, degree)?;
    let relations: Vec<Value> = RELATIONS
        .iter()
        .filter_map(|name| report.find(name))
        .map(|c| json!({ "relation": c.name, "status": c.status, "residual": c.residual }))
        .collect();
    let (l, m) = generators(&cfg)?;
    let reduction = racah_reduction(&sc, &m, &l);
    out.results = json!({
        "constants": to_value(&sc),
        "racah": sc.is_racah(),
        "relations": relations,
        "reduction": {
            "reality": format_rational(&reduction.reality),
            "roots": to_value(&reduction.roots),
            "reduced": to_value(&reduction.reduced),
        },
    });
    out.report = report;
    out.report.extend(reduction.report);
    Ok(out)
}

pub fn casimir_cmd(args: &ConfigArgs) -> Result<Output> {
    let cfg = args.build(None)?;
    let mut out = Output::new("casimir", json!({ "config": to_value(&cfg) }));
    let cv = casimir(&cfg)?;
    let mut results = to_value(&cv);
    if let Value::Object(map) = &mut results {
        map.remove("report");
    }
    out.results = results;
    out.report = cv.report;
    Ok(out)
}

pub fn tridiag(args: &ConfigArgs, n_max: usize) -> Result<Output> {
    let cfg = args.build(None)?;
    let mut out = Output::new("tridiag", json!({ "config": to_value(&cfg), "n_max": n_max }));
    let coeffs = tridiag_coeffs(&cfg, n_max)?;
    out.results = json!({ "coefficients": to_value(&coeffs.rows) });
    out.report = verify_tridiagonal(&cfg, n_max)?;
    out.report.extend(verify_matrix_entries(&cfg, n_max)?);
    out.tables = vec![("coeffs", coeffs.to_csv())];
    Ok(out)
}

pub fn heun_polys(args: &ConfigArgs, n: usize) -> Result<Output> {
    let cfg = args.build(Some(n))?;
    let mut out = Output::new("heun-polys", json!({ "config": to_value(&cfg), "N": n }));
    let (es, rr, report) = heun_suite(&cfg, n)?;
    let mut eigensystem = to_value(&es);
    if let Value::Object(map) = &mut eigensystem {
        map.remove("report");
    }
    out.results = json!({ "eigensystem": eigensystem, "recurrence": to_value(&rr) });
    out.report = report;
    out.tables = vec![("eigenvalues", es.eigenvalues_csv()), ("w", es.w_csv()), ("recurrence", rr.to_csv())];
    Ok(out)
}

pub fn racah_heun(args: &ConfigArgs, n_max: usize, grid: &[String]) -> Result<Output> {
    let cfg = args.build(None)?;
    let points = grid.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>>>()?;
    let mut out = Output::new(
        "racah-heun",
        json!({ "config": to_value(&cfg), "n_max": n_max, "grid": rationals(&points) }),
    );
    let rr = racah_heun_recurrence(&cfg, n_max)?;
    let values = rr.eval_grid(&points, n_max)?;
    let mut report = perturbation_identity(&cfg, n_max)?;
    report.push(normalization_check(&cfg, n_max, &rr)?);
    if !rr.is_positive() {
        report.flag(format!("U_n <= 0 at n = {:?}", rr.nonpositive_u));
    }
    let mut grid_csv = String::from("x,k,value\n");
    for (x, row) in points.iter().zip(&values) {
        for (k, v) in row.iter().enumerate() {
            grid_csv.push_str(&format!("{},{k},{}\n", format_rational(x), format_rational(v)));
        }
    }
    out.results = json!({
        "recurrence": to_value(&rr),
        "grid": points.iter().zip(&values)
            .map(|(x, row)| json!({ "x": format_rational(x), "values": rationals(row) }))
            .collect::<Vec<_>>(),
    });
    out.report = report;
    out.tables = vec![("recurrence", rr.to_csv()), ("grid", grid_csv)];
    Ok(out)
}

/// The monic recurrence agrees with the normalized non-monic one.
fn normalization_check(
    cfg: &TridiagConfig,
    n_max: usize,
    rr: &heun_tridiag::heunpoly::RacahHeunRecurrence,
) -> Result<Check> {
    let name = "R_s / lead(R_s) = Rhat_s";
    let coeffs = tridiag_coeffs(cfg, n_max)?;
    let nonmonic = match nonmonic_polys(&coeffs, n_max) {
        Ok(p) => p,
        Err(Error::ParameterPole { index }) => {
            return Ok(Check::skipped(name, format!("ReducibleRecurrence({index})")));
        }
        Err(e) => return Err(e),
    };
    let monic = rr.monic_polys(n_max)?;
    let bad: Vec<usize> = nonmonic
        .iter()
        .zip(&monic)
        .enumerate()
        .filter(|(_, (r, m))| {
            let lead = r.leading().cloned().unwrap_or_else(Rational::one);
            r.scale(&(Rational::one() / lead)) != **m
        })
        .map(|(s, _)| s)
        .collect();
    Ok(Check::from_bool(
        name,
        bad.is_empty(),
        if bad.is_empty() { "exact".to_string() } else { format!("differs at s = {bad:?}") },
    ))
}

pub fn wilson(args: &ConfigArgs, n_max: usize) -> Result<Output> {
    let cfg = args.build(None)?;
    let mut out = Output::new("wilson-compare", json!({ "config": to_value(&cfg), "n_max": n_max }));
    let wc = wilson_compare(&cfg, n_max)?;
    out.results = json!({
        "parameters": to_value(&wc.parameters),
        "pairing_shifted_a": wc.pairing_shifted_a,
        "pairing_shifted_c": wc.pairing_shifted_c,
    });
    out.report = wc.report;
    Ok(out)
}

pub fn su11(args: &Su11Args, degree: usize) -> Result<Output> {
    let cfg = args.build()?;
    let mut out = Output::new("su11", json!({ "config": to_value(&cfg), "degree": degree }));
    let mut report = verify_total_relation(&cfg);
    let matched = c23_as_hypergeometric(&cfg)?;
    let mixed = mixed_operator_check(&cfg, degree)?;
    report.extend(mixed.report.clone());
    out.results = json!({
        "casimirs": rationals(&cfg.casimirs()),
        "total_constant": format_rational(&cfg.total_constant()),
        "operators": to_value(&casimir_ops(&cfg)),
        "c23_hypergeometric": to_value(&matched),
        "fitted": to_value(&mixed.fitted),
        "recovered": to_value(&mixed.recovered),
    });
    out.report = report;
    Ok(out)
}

/// Names each check `suite: name`.
pub fn prefixed(suite: &str, report: VerificationReport) -> VerificationReport {
    let mut out = VerificationReport::new();
    for mut c in report.checks {
        c.name = format!("{suite}: {}", c.name);
        out.push(c);
    }
    for f in report.flags {
        out.flag(format!("{suite}: {f}"));
    }
    for c in report.conversions {
        out.note_conversion(format!("{suite}: {c}"));
    }
    out
}

pub fn count_failed(report: &VerificationReport) -> usize {
    report.checks.iter().filter(|c| c.status == Status::Fail).count()
}
