use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::config::{ConfigOverrides, RunConfig};
use crate::io::{fmt_f64, parse_header_line, FORMAT_VERSION};

/// One particle in a snapshot, in label order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotRow {
    pub label: usize,
    /// Wrapped into `[-L, L)`.
    pub x: f64,
    pub v: f64,
}

/// The state of a run at one output time, with the configuration that
/// produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotFile {
    pub config: RunConfig,
    pub time: f64,
    pub event_count: u64,
    pub rows: Vec<SnapshotRow>,
}

pub const SNAPSHOT_COLUMNS: &str = "label\tx\tv";

impl SnapshotFile {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# format_version = {FORMAT_VERSION}");
        for (k, v) in self.config.echo() {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "# time = {}", fmt_f64(self.time));
        let _ = writeln!(out, "# event_count = {}", self.event_count);
        let _ = writeln!(out, "{SNAPSHOT_COLUMNS}");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}", r.label, fmt_f64(r.x), fmt_f64(r.v));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses the output of [`SnapshotFile::to_text`]. `path` only labels
    /// error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut config_text = String::new();
        let mut version = None;
        let mut time = None;
        let mut event_count = None;
        let mut columns_seen = false;
        for (line, content) in lines.by_ref() {
            let Some((key, value)) = parse_header_line(content) else {
                if content.trim() != SNAPSHOT_COLUMNS {
                    return Err(Error::parse(path, line, format!("expected column header {SNAPSHOT_COLUMNS:?}")));
                }
                columns_seen = true;
                break;
            };
            let bad = |what: &str| Error::parse(path, line, format!("bad {what} {value:?}"));
            match key {
                "format_version" => {
                    let v: u32 = value.parse().map_err(|_| bad("format_version"))?;
                    if v != FORMAT_VERSION {
                        return Err(Error::parse(path, line, format!("unsupported format version {v}")));
                    }
                    version = Some(v);
                }
                "time" => time = Some(value.parse::<f64>().map_err(|_| bad("time"))?),
                "event_count" => event_count = Some(value.parse::<u64>().map_err(|_| bad("event_count"))?),
                _ => {
                    // Blank lines keep config line numbers aligned with the file.
                    while config_text.lines().count() + 1 < line {
                        config_text.push('\n');
                    }
                    let _ = writeln!(config_text, "{key} = {value}");
                }
            }
        }
        if !columns_seen {
            return Err(Error::parse(path, text.lines().count(), "missing column header"));
        }
        let missing = |what: &str| Error::parse(path, 1, format!("header lacks {what}"));
        version.ok_or_else(|| missing("format_version"))?;
        let time = time.ok_or_else(|| missing("time"))?;
        let event_count = event_count.ok_or_else(|| missing("event_count"))?;
        let config = RunConfig::parse(&config_text, path, &ConfigOverrides::default())?;

        let mut rows = Vec::with_capacity(config.domain.particle_count());
        for (line, content) in lines {
            if content.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(path, line, format!("expected 3 columns, got {}", fields.len())));
            }
            let label = fields[0]
                .parse::<usize>()
                .map_err(|_| Error::parse(path, line, format!("bad label {:?}", fields[0])))?;
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(path, line, format!("bad number {s:?}")));
            rows.push(SnapshotRow {
                label,
                x: num(fields[1])?,
                v: num(fields[2])?,
            });
        }
        let expected = config.domain.particle_count();
        if rows.len() != expected {
            return Err(Error::parse(
                path,
                text.lines().count(),
                format!("expected {expected} rows, got {}", rows.len()),
            ));
        }
        Ok(Self {
            config,
            time,
            event_count,
            rows,
        })
    }
}
