use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Failures of a CLI run, each with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files.
    Usage(String),
    Io(String),
    Lib(fiberlab::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(fiberlab::Error::InternalConsistency(_)) => 3,
            CliError::Io(_) | CliError::Lib(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<fiberlab::Error> for CliError {
    fn from(e: fiberlab::Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A JSON artifact: schema tag, surface id when relevant, then the payload's fields.
#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    schema: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    surface_id: Option<&'a str>,
    #[serde(flatten)]
    body: &'a T,
}

/// Version of every JSON schema written by this build.
pub const SCHEMA_VERSION: u32 = 1;

pub struct OutDir {
    dir: PathBuf,
    surface_id: Option<String>,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(dir: &Path, surface_id: Option<&str>) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(OutDir { dir: dir.to_path_buf(), surface_id: surface_id.map(str::to_string), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn text(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let p = self.path(name);
        std::fs::write(&p, contents).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        self.written.push(p);
        Ok(())
    }

    /// Writes `<name>.json` tagged with schema `fiberlab.<name>/<version>`.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> CliResult<()> {
        let a = Artifact { schema: format!("fiberlab.{name}/{SCHEMA_VERSION}"), surface_id: self.surface_id.as_deref(), body };
        let mut s = serde_json::to_string_pretty(&a).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        self.text(&format!("{name}.json"), &s)
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R], header: &[&str]) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(header).map_err(io)?;
        for r in rows {
            w.serialize(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        let s = String::from_utf8(bytes).expect("csv output is utf-8");
        self.text(&format!("{name}.csv"), &s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let usage = CliError::Usage("x".into()).exit_code();
        let lib = CliError::Lib(fiberlab::Error::InvalidArgument("x".into())).exit_code();
        let inconsistent = CliError::Lib(fiberlab::Error::InternalConsistency("x".into())).exit_code();
        assert_eq!((usage, lib, inconsistent), (2, 1, 3));
    }
}
