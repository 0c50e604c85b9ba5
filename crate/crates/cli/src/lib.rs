//! Pipelines behind the `gccha` command-line tool: analysis of paired signal
//! files, split-view image classification, process synthesis and a
//! stationarity report.

// Negated comparisons are used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyze;
pub mod classify;
pub mod diagnose;
pub mod images;
pub mod knn;
pub mod similarity;
pub mod synth_cmd;

use gccha_core::Error;

/// Failure of a CLI command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input files or arguments (exit code 2).
    #[error("invalid input: {0}")]
    Validation(String),
    /// A numerical step failed (exit code 3).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Writing outputs failed (exit code 1).
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn output_err(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

/// Creates `path`, mapping failures to [`CliError::Output`].
pub(crate) fn create(path: &std::path::Path) -> CliResult<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path).map(std::io::BufWriter::new).map_err(|e| output_err(path, e))
}

/// Caps the global rayon pool at `GCCHA_THREADS` when that variable is set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("GCCHA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("GCCHA_THREADS must be a positive integer, got '{v}'")))?;
    // A pool may already exist when called twice in one process; that is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
