//! Shared plumbing: exit-code taxonomy, stdio-aware file access,
//! ruleset loading.

use diachron_core::corpus::formats::write_atomic;
use diachron_core::RuleSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

/// Failures split by exit code: 1 for inputs that parsed but violate a
/// contract, 2 for usage and I/O problems. Success is plain `Ok(())`.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(msg) | Failure::Io(msg) => f.write_str(msg),
        }
    }
}

pub fn validation(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn is_stdio(path: &Path) -> bool {
    path == Path::new("-")
}

/// Read a file, or stdin when the path is `-`.
pub fn read_input(path: &Path) -> Result<String, Failure> {
    if is_stdio(path) {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Write to a file atomically, or to stdout when the path is `-`.
pub fn write_output(path: &Path, contents: &str) -> Result<(), Failure> {
    if is_stdio(path) {
        return std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| Failure::Io(format!("stdout: {e}")));
    }
    write_atomic(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// The built-in ruleset, or a parsed file when a path is given. A
/// missing file is an I/O failure; a file that reads but does not parse
/// is a validation failure.
pub fn load_ruleset(path: Option<&Path>) -> Result<RuleSet, Failure> {
    match path {
        None => Ok(RuleSet::builtin()),
        Some(p) => {
            let source = read_input(p)?;
            RuleSet::parse(&source).map_err(|e| validation(format!("{}: {e}", p.display())))
        }
    }
}

/// Ruleset identity echoed into manifests and reports.
pub fn ruleset_stamp(ruleset: &RuleSet) -> String {
    format!("{} {}", ruleset.name, ruleset.version)
}
