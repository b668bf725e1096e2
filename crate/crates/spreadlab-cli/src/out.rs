//! Failure-to-exit-code mapping and report plumbing shared by every
//! subcommand.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

/// A run that must stop: carries the process exit code and a message for
/// stderr.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

pub fn postcondition(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

impl From<spreadlab::Error> for Failure {
    fn from(e: spreadlab::Error) -> Failure {
        let code = match &e {
            spreadlab::Error::BudgetExceeded { .. } => 2,
            // The decomposition ran out of rounds before reaching its
            // coverage target: the promised postcondition is unmet.
            spreadlab::Error::IncompleteDecomposition { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        invalid(e.to_string())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Where a report goes. "json" or "csv" mean stdout in that format; any
/// other value is a file path, with a ".csv" extension selecting CSV.
pub enum Dest {
    Stdout(Format),
    File(PathBuf, Format),
}

pub fn parse_dest(arg: Option<&str>, csv_allowed: bool) -> Result<Dest, Failure> {
    let dest = match arg {
        None | Some("-") | Some("json") => Dest::Stdout(Format::Json),
        Some("csv") => Dest::Stdout(Format::Csv),
        Some(path) => {
            let p = PathBuf::from(path);
            let fmt = match p.extension().and_then(|e| e.to_str()) {
                Some("csv") => Format::Csv,
                _ => Format::Json,
            };
            Dest::File(p, fmt)
        }
    };
    if !csv_allowed && matches!(dest.format(), Format::Csv) {
        return Err(invalid("this subcommand reports JSON only"));
    }
    Ok(dest)
}

impl Dest {
    pub fn format(&self) -> Format {
        match self {
            Dest::Stdout(f) => *f,
            Dest::File(_, f) => *f,
        }
    }

    fn write(&self, bytes: &[u8]) -> Result<(), Failure> {
        match self {
            Dest::Stdout(_) => {
                std::io::stdout().write_all(bytes)?;
                Ok(())
            }
            Dest::File(path, _) => {
                fs::write(path, bytes)?;
                Ok(())
            }
        }
    }
}

/// Fixed outer shape of every JSON report. `wall_time_ms` is the one field
/// excused from byte-for-byte determinism.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    tool_version: &'static str,
    subcommand: &'a str,
    config: serde_json::Value,
    wall_time_ms: u64,
    report: T,
}

pub const SCHEMA_VERSION: u32 = 1;

pub fn emit_json<T: Serialize>(
    dest: &Dest,
    subcommand: &str,
    config: serde_json::Value,
    wall_time_ms: u64,
    report: T,
) -> Result<(), Failure> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config,
        wall_time_ms,
        report,
    };
    let mut text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| invalid(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    dest.write(text.as_bytes())
}

/// CSV rows with a frozen header; no envelope, plot-ready.
pub fn emit_csv(dest: &Dest, header: &str, rows: &[String]) -> Result<(), Failure> {
    let mut text = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    dest.write(text.as_bytes())
}
