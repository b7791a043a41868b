//! Structured pass/fail records for the verification suites.

use serde::{Deserialize, Serialize};

/// How `measured` is compared with `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `measured <= bound + tolerance`
    AtMost,
    /// `measured >= bound - tolerance`
    AtLeast,
    /// `|measured - bound| <= tolerance`
    Equals,
    /// `measured < bound`, no slack.
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Case {
    pub fn new(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64, relation: Relation) -> Self {
        let pass = measured.is_finite()
            && match relation {
                Relation::AtMost => measured <= bound + tolerance,
                Relation::AtLeast => measured >= bound - tolerance,
                Relation::Equals => (measured - bound).abs() <= tolerance,
                Relation::Below => measured < bound,
            };
        Self {
            name: name.into(),
            measured,
            bound,
            tolerance,
            relation,
            pass,
        }
    }
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub pass: bool,
    pub cases: Vec<Case>,
    pub wall_time_ms: u64,
    pub config_echo: serde_json::Value,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, config_echo: serde_json::Value) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            pass: true,
            cases: Vec::new(),
            wall_time_ms: 0,
            config_echo,
        }
    }

    pub fn push(&mut self, case: Case) {
        self.pass &= case.pass;
        self.cases.push(case);
    }

    pub fn at_most(&mut self, name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) {
        self.push(Case::new(name, measured, bound, tolerance, Relation::AtMost));
    }

    pub fn at_least(&mut self, name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) {
        self.push(Case::new(name, measured, bound, tolerance, Relation::AtLeast));
    }

    pub fn equals(&mut self, name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) {
        self.push(Case::new(name, measured, expected, tolerance, Relation::Equals));
    }

    pub fn below(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.push(Case::new(name, measured, bound, 0.0, Relation::Below));
    }

    /// Appends another report's cases, prefixing their names with its suite.
    pub fn absorb(&mut self, other: VerificationReport) {
        for mut c in other.cases {
            c.name = format!("{}/{}", other.suite, c.name);
            self.push(c);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Case::new("a", 1.0, 1.0, 0.0, Relation::AtMost).pass);
        assert!(!Case::new("a", 1.1, 1.0, 0.05, Relation::AtMost).pass);
        assert!(Case::new("a", 0.96, 1.0, 0.05, Relation::AtLeast).pass);
        assert!(Case::new("a", 1.04, 1.0, 0.05, Relation::Equals).pass);
        assert!(!Case::new("a", 0.0, 0.0, 1.0, Relation::Below).pass);
        assert!(!Case::new("a", f64::NAN, 0.0, 1.0, Relation::AtMost).pass);
    }

    #[test]
    fn report_tracks_failures_and_round_trips() {
        let mut r = VerificationReport::new("demo", serde_json::json!({"tol": 1e-6}));
        r.at_most("ok", 1.0, 2.0, 0.0);
        assert!(r.pass);
        let mut inner = VerificationReport::new("inner", serde_json::Value::Null);
        inner.below("bad", 1.0, 0.0);
        r.absorb(inner);
        assert!(!r.pass);
        assert_eq!(r.failures().next().unwrap().name, "inner/bad");
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.schema, 1);
    }
}
