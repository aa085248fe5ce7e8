use serde::Serialize;
use serde_json::Value;

use mfact::error::Error;

pub const SCHEMA: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Settings shared by every command.
#[derive(Clone, Debug, Serialize)]
pub struct SessionConfig {
    /// `None` keeps whatever an input file declares.
    pub field: Option<String>,
    pub prec: Option<u32>,
    pub seed: u64,
    pub cache: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

/// What a command hands back before it is wrapped into a [`Report`].
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub human: String,
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema: &'static str,
    pub command: &'a CommandEcho,
    pub config: &'a SessionConfig,
    pub status: Status,
    pub result: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl Report<'_> {
    /// Pretty JSON with keys sorted at every level, so equal inputs give
    /// byte-identical output.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value prints")
    }
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub schema: &'static str,
    pub error: ErrorBody,
}

pub const USAGE: i32 = 3;

pub fn error_kind(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Inconclusive(_) => ("inconclusive", 2),
        Error::Parse { .. } => ("parse", USAGE),
        Error::Invalid(_) => ("invalid", USAGE),
        Error::InvalidField(_) => ("field", USAGE),
        Error::Io(_) => ("io", USAGE),
        Error::Catalog(_) => ("catalog", 1),
        Error::TheoremViolation(_) => ("theorem", 1),
        Error::RingMismatch(_) | Error::PrecisionMismatch { .. } | Error::FieldMismatch | Error::DimensionMismatch(_) => {
            ("mismatch", 1)
        }
        Error::NonUnit(_) => ("non_unit", 1),
        Error::NotGraded(_) => ("not_graded", 1),
    }
}

impl ErrorReport {
    pub fn new(kind: &'static str, message: String, exit_code: i32) -> Self {
        ErrorReport {
            schema: SCHEMA,
            error: ErrorBody { kind, message, exit_code },
        }
    }

    pub fn from_error(e: &Error) -> Self {
        let (kind, code) = error_kind(e);
        Self::new(kind, e.to_string(), code)
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("error serializes");
        serde_json::to_string(&v).expect("value prints")
    }
}
