//! Output files: a primary file (or stdout) plus companion files named after
//! it, e.g. `run.csv` with `run.summary.json`.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Full-precision float: 17 significant digits, round-trips exactly.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        // `+ 0.0` folds -0 into 0
        format!("{:.16e}", x + 0.0)
    } else {
        format!("{x}")
    }
}

pub struct Sink {
    primary: Option<PathBuf>,
}

impl Sink {
    pub fn new(primary: Option<PathBuf>) -> Self {
        Self { primary }
    }

    pub fn write_primary(&self, text: &str) -> Result<(), CliError> {
        match &self.primary {
            Some(p) => write_file(p, text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .map_err(|e| CliError::io(Path::new("<stdout>"), e))
            }
        }
    }

    /// Writes `<stem>.<suffix>` next to the primary file. Without a primary
    /// file the text goes to stderr when `fallback_to_stderr` is set and is
    /// dropped otherwise.
    pub fn write_companion(
        &self,
        suffix: &str,
        text: &str,
        fallback_to_stderr: bool,
    ) -> Result<(), CliError> {
        match &self.primary {
            Some(p) => write_file(&companion_path(p, suffix), text),
            None if fallback_to_stderr => {
                eprint!("{text}");
                Ok(())
            }
            None => Ok(()),
        }
    }
}

pub fn companion_path(primary: &Path, suffix: &str) -> PathBuf {
    let stem = primary
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    primary.with_file_name(format!("{stem}.{suffix}"))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
