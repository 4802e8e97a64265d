use std::time::Duration;

use serde_json::{json, Value};

use lchoose::Error;

pub const EXIT_HOLDS: u8 = 0;
pub const EXIT_FAILS: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn holds(cond: bool) -> Self {
        if cond {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    fn code(self) -> u8 {
        match self {
            Verdict::Pass => EXIT_HOLDS,
            Verdict::Fail => EXIT_FAILS,
            Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }
}

/// What a command decided, before timing and error mapping.
pub struct Outcome {
    pub inputs: Value,
    pub verdict: Verdict,
    pub summary: String,
    pub details: Value,
}

pub struct Report {
    pub json: Value,
    pub code: u8,
    pub summary: String,
}

impl Report {
    pub fn finish(command: &str, result: Result<Outcome, Error>, took: Duration) -> Report {
        let runtime_ms = took.as_millis() as u64;
        match result {
            Ok(o) => Report {
                json: json!({
                    "command": command,
                    "inputs": o.inputs,
                    "verdict": o.verdict.name(),
                    "details": o.details,
                    "runtime_ms": runtime_ms,
                }),
                code: o.verdict.code(),
                summary: o.summary,
            },
            Err(e) => {
                let (verdict, code) = match &e {
                    Error::BudgetExceeded { .. } | Error::CapExceeded { .. } => ("inconclusive", EXIT_INCONCLUSIVE),
                    Error::Precondition(_) => ("fail", EXIT_FAILS),
                    _ => ("invalid", EXIT_INVALID),
                };
                Report {
                    json: json!({
                        "command": command,
                        "inputs": null,
                        "verdict": verdict,
                        "details": { "error": e.to_string() },
                        "runtime_ms": runtime_ms,
                    }),
                    code,
                    summary: format!("{command}: {e}"),
                }
            }
        }
    }
}
