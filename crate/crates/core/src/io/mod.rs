//! File formats and synthetic case generation.
//!
//! A case lives in a directory as two files:
//!
//! * `case.toml` — structured config: network, plants, storage, prosumers,
//!   horizon header, optional initial state. Field names carry units.
//! * `traces.csv` — long-format time series: `slot,entity,quantity,value`,
//!   slot 1-based. Diff-friendly and language-neutral.
//!
//! A solved run lives in a directory as three files:
//!
//! * `dispatch.csv` — wide per-(slot, entity) table of the physical traces,
//! * `result.json` — the full machine-readable dispatch result,
//! * `metadata.json` — run provenance: variant, options, solver statistics,
//!   model counts, clipping report.
//!
//! All formats carry `format_version`; loaders reject unknown major
//! versions. Writes go through a temp file and rename, so a crashed run
//! never leaves a half-written artifact.

mod bundle;
pub mod generate;
mod results;

pub use bundle::{load_case, save_case};
pub use generate::{generate_case, SyntheticCaseSpec};
pub use results::{load_results, persist_results, RunMetadata};

use crate::model::Violation;
use thiserror::Error;

/// Format version written by this build; loaders accept any `1.x`.
pub const FORMAT_VERSION: &str = "1.0";

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: format version {found} not supported (need 1.x)")]
    Version { path: String, found: String },
    #[error("trace missing: {entity}/{quantity} slot {slot}")]
    MissingTrace {
        entity: String,
        quantity: String,
        slot: usize,
    },
    #[error("case failed validation: {} problem(s), first: {}", .0.len(), .0[0])]
    Validation(Vec<Violation>),
}

pub(crate) fn check_version(path: &str, version: &str) -> Result<(), IoError> {
    let major = version.split('.').next().unwrap_or("");
    if major == "1" {
        Ok(())
    } else {
        Err(IoError::Version {
            path: path.to_string(),
            found: version.to_string(),
        })
    }
}

/// Atomic file write: temp file in the target directory, then rename.
pub(crate) fn write_atomic(path: &std::path::Path, contents: &[u8]) -> Result<(), IoError> {
    let dir = path.parent().unwrap_or_else(|| std::path::Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::io::Write::write_all(&mut tmp, contents)?;
    tmp.persist(path).map_err(|e| IoError::Io(e.error))?;
    Ok(())
}
