//! Run configuration, output file formats and the pipelines behind the
//! command-line tool.
//!
//! Every writer emits floats with 17 significant digits so that files
//! round-trip bit for bit through their readers.

mod config;
mod field_table;
mod manifest;
mod series;
mod simulate;
mod snapshot;

pub use config::{ConfigOverrides, RunConfig, CONFIG_KEYS};
pub use field_table::{parse_sources, FieldRow, FieldTable, GridSpec};
pub use manifest::{Manifest, RunStatus};
pub use series::{DiagnosticsRow, DiagnosticsSeries};
pub use simulate::{simulate, snapshot_name, SimulationSummary, DIAGNOSTICS_FILE, MANIFEST_FILE};
pub use snapshot::{SnapshotFile, SnapshotRow, SNAPSHOT_COLUMNS};

/// Version stamped into every file header.
pub const FORMAT_VERSION: u32 = 1;

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Splits `# key = value`.
pub(crate) fn parse_header_line(line: &str) -> Option<(&str, &str)> {
    let body = line.strip_prefix('#')?;
    let (k, v) = body.split_once('=')?;
    Some((k.trim(), v.trim()))
}
