//! Verification reports: one entry per checked identity.

use serde::{Serialize, Serializer};

use crate::exactnum::Rational;
use crate::weylops::{DiffOperator, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// A floating value that came out of an exact-to-approximate conversion.
///
/// Serialized as `{"approx": true, "value": "<17 significant digits>"}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx(pub f64);

impl Serialize for Approx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("approx", &true)?;
        map.serialize_entry("value", &format_approx(self.0))?;
        map.end()
    }
}

pub fn format_approx(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// What is left over when an identity fails (or the size of the
/// discrepancy when it holds only approximately).
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Residual {
    Operator(DiffOperator<Rational>),
    Polynomial(Polynomial<Rational>),
    Magnitude(Approx),
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Residual>,
}

impl Check {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(name, Status::Pass, detail)
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(name, Status::Fail, detail)
    }

    pub fn skipped(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(name, Status::Skipped, detail)
    }

    /// Pass iff `ok`.
    pub fn from_bool(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status,
            detail: detail.into(),
            residual: None,
        }
    }

    pub fn with_residual(mut self, residual: Residual) -> Self {
        self.residual = Some(residual);
        self
    }

    /// Exact operator identity: passes iff `residual` is the zero operator.
    pub fn operator_identity(name: impl Into<String>, residual: DiffOperator<Rational>) -> Self {
        if residual.is_zero() {
            Self::pass(name, "exact")
        } else {
            Self::fail(name, format!("nonzero residual {residual}"))
                .with_residual(Residual::Operator(residual))
        }
    }

    /// Approximate check against a relative bound.
    pub fn within(name: impl Into<String>, value: f64, bound: f64) -> Self {
        let ok = value <= bound;
        Self::from_bool(
            name,
            ok,
            format!("{} {} {}", format_approx(value), if ok { "<=" } else { ">" }, format_approx(bound)),
        )
        .with_residual(Residual::Magnitude(Approx(value)))
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Non-fatal observations, e.g. repeated eigenvalues.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    /// Exact-to-floating conversions performed while checking.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conversions: Vec<String>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn flag(&mut self, note: impl Into<String>) {
        self.flags.push(note.into());
    }

    pub fn note_conversion(&mut self, note: impl Into<String>) {
        self.conversions.push(note.into());
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.flags.extend(other.flags);
        self.conversions.extend(other.conversions);
    }

    /// True when no check failed (skipped checks do not count as failures).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approx_has_seventeen_digits() {
        let json = serde_json::to_string(&Approx(0.1)).unwrap();
        assert_eq!(json, r#"{"approx":true,"value":"1.0000000000000001e-1"}"#);
    }

    #[test]
    fn skipped_does_not_fail() {
        let mut r = VerificationReport::new();
        r.push(Check::pass("a", ""));
        r.push(Check::skipped("b", "W_n0 = 0"));
        assert!(r.passed());
        r.push(Check::operator_identity("c", DiffOperator::x()));
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
    }
}
