//! On-disk formats: trajectory and table CSVs, SVG line charts and the
//! sweep manifest. Every file is written atomically.

mod csvfmt;
mod manifest;
mod svg;

pub use csvfmt::{
    format_f64, parse_trajectory_csv, read_trajectory_csv, table_csv, text_table_csv,
    trajectory_csv, write_trajectory_csv, Cell,
};
pub use manifest::{Manifest, TOOL_NAME};
pub use svg::{LineChart, Series};

use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("trajectory CSV schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl IoError {
    pub(crate) fn at(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
        move |source| IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Writes `bytes` to a temporary file beside `path`, then renames it into
/// place, so readers see either the old file or the complete new one.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(IoError::at(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(IoError::at(dir))?;
    tmp.write_all(bytes).map_err(IoError::at(path))?;
    tmp.as_file().sync_all().map_err(IoError::at(path))?;
    tmp.persist(path).map_err(|e| IoError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nested/out.txt");
        write_atomic(&p, b"first version, fairly long").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"second");
        let leftovers = std::fs::read_dir(p.parent().unwrap()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
