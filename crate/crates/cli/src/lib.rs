//! Report building and subcommands for the `twistss` binary.

pub mod analyze;
pub mod input;
pub mod massey_cmd;
pub mod selftest;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "n/a",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    pub fn new(check: &str, status: Status, detail: impl Into<String>) -> Self {
        Verdict {
            check: check.to_string(),
            status,
            detail: detail.into(),
        }
    }
}

/// Process exit code for a set of verdicts: 1 if any failed.
pub fn exit_code(verdicts: &[Verdict]) -> i32 {
    if verdicts.iter().any(|v| v.status == Status::Fail) {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_serialize_in_kebab_case() {
        assert_eq!(
            serde_json::to_string(&Status::NotApplicable).unwrap(),
            "\"not-applicable\""
        );
        assert_eq!(serde_json::from_str::<Status>("\"pass\"").unwrap(), Status::Pass);
    }

    #[test]
    fn not_applicable_does_not_fail() {
        let v = vec![
            Verdict::new("a", Status::Pass, ""),
            Verdict::new("b", Status::NotApplicable, ""),
        ];
        assert_eq!(exit_code(&v), 0);
        let mut w = v.clone();
        w.push(Verdict::new("c", Status::Fail, ""));
        assert_eq!(exit_code(&w), 1);
    }
}
