//! Output files. Everything is written to a temporary file in the target
//! directory and renamed into place, so readers never see partial output.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::{CliError, CliResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes `path` through `fill` atomically.
pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w).map_err(|e| CliError::io(path, e))?;
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    // Temporary files are created owner-only; results are ordinary files.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(path, std::fs::Permissions::from_mode(0o644)).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

/// `# `-prefixed header lines: tool version, command, full config echo and
/// derived quantities.
#[derive(Debug, Clone)]
pub struct Metadata {
    lines: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, cfg: &Config) -> Self {
        let mut lines = vec![format!("eitgap {TOOL_VERSION}"), format!("command = {command}")];
        lines.extend(cfg.to_toml().lines().filter(|l| !l.is_empty()).map(|l| format!("config: {l}")));
        Self { lines }
    }

    pub fn derived(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("derived: {key} = {value}"));
        self
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

/// A CSV column: name and unit.
pub type Column = (&'static str, &'static str);

/// RFC 4180 table with LF endings, preceded by the metadata block and a
/// `# columns:` schema line.
pub fn write_csv<I>(path: &Path, meta: &Metadata, columns: &[Column], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    write_atomic(path, |w| {
        for l in meta.lines() {
            writeln!(w, "# {l}")?;
        }
        let schema: Vec<String> = columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
        writeln!(w, "# columns: {}", schema.join(", "))?;
        let mut cw = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        cw.write_record(columns.iter().map(|c| c.0))?;
        for r in rows {
            cw.write_record(&r)?;
        }
        cw.flush()?;
        Ok(())
    })
}

/// Shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Plain-text `key = value` lines.
pub fn write_key_values(path: &Path, meta: &Metadata, pairs: &[(String, String)]) -> CliResult<()> {
    write_atomic(path, |w| {
        for l in meta.lines() {
            writeln!(w, "# {l}")?;
        }
        for (k, v) in pairs {
            writeln!(w, "{k} = {v}")?;
        }
        Ok(())
    })
}
