//! Versioned JSON reports. Timings never enter the report body, so two runs
//! on the same input with the same flags produce identical bytes.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "mvsheaf-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

/// Exit code for malformed invocations and unreadable documents.
pub const USAGE_EXIT: u8 = 3;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            pass,
            witness: None,
        }
    }

    pub fn with_witness(name: impl Into<String>, pass: bool, witness: Option<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            witness: if pass { None } else { witness },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub sha256: String,
    pub algebra: String,
    pub expression: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub input: Input,
    pub flags: Value,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    /// Module errors that stopped part of the command.
    pub errors: Vec<String>,
    pub details: Value,
}

impl Report {
    pub fn new(
        command: &str,
        input: Input,
        flags: Value,
        checks: Vec<Check>,
        errors: Vec<String>,
        details: Value,
    ) -> Self {
        let verdict = if !errors.is_empty() {
            Verdict::Inconclusive
        } else if checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            input,
            flags,
            verdict,
            checks,
            errors,
            details,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn errors_make_the_verdict_inconclusive() {
        let input = Input {
            sha256: String::new(),
            algebra: "A".into(),
            expression: "chain(1)".into(),
        };
        let r = Report::new(
            "x",
            input.clone(),
            Value::Null,
            vec![Check::new("c", false)],
            vec!["e".into()],
            Value::Null,
        );
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = Report::new(
            "x",
            input,
            Value::Null,
            vec![Check::new("c", false)],
            vec![],
            Value::Null,
        );
        assert_eq!(r.verdict.exit_code(), 1);
    }
}
