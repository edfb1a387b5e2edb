use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::DiagnosticsFrame;
use crate::io::{fmt_f64, parse_header_line, FORMAT_VERSION};

/// One line of the diagnostics series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub time: f64,
    pub xc_wrapped: f64,
    pub xc_cover: f64,
    pub vc: f64,
    /// Written as `nan` when friction is on.
    pub energy: Option<f64>,
    pub cluster_count: usize,
    pub events: u64,
}

impl From<&DiagnosticsFrame> for DiagnosticsRow {
    fn from(f: &DiagnosticsFrame) -> Self {
        Self {
            time: f.time,
            xc_wrapped: f.xc_wrapped,
            xc_cover: f.xc_cover,
            vc: f.vc,
            energy: f.energy,
            cluster_count: f.cluster_count,
            events: f.events,
        }
    }
}

/// Center-of-mass, energy and clustering history of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub rows: Vec<DiagnosticsRow>,
}

const COLUMNS: &str = "time\txc_wrapped\txc_cover\tvc\tenergy\tcluster_count\tevents";

impl DiagnosticsSeries {
    pub fn header() -> String {
        format!("# format_version = {FORMAT_VERSION}\n{COLUMNS}\n")
    }

    pub fn format_row(r: &DiagnosticsRow) -> String {
        let energy = r.energy.map_or_else(|| "nan".to_string(), fmt_f64);
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            fmt_f64(r.time),
            fmt_f64(r.xc_wrapped),
            fmt_f64(r.xc_cover),
            fmt_f64(r.vc),
            energy,
            r.cluster_count,
            r.events
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = Self::header();
        for r in &self.rows {
            let _ = write!(out, "{}", Self::format_row(r));
        }
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut rows = Vec::new();
        let mut columns_seen = false;
        for (idx, content) in text.lines().enumerate() {
            let line = idx + 1;
            if let Some((key, value)) = parse_header_line(content) {
                if key == "format_version" && value != FORMAT_VERSION.to_string() {
                    return Err(Error::parse(path, line, format!("unsupported format version {value}")));
                }
                continue;
            }
            if !columns_seen {
                if content.trim() != COLUMNS {
                    return Err(Error::parse(path, line, "expected diagnostics column header"));
                }
                columns_seen = true;
                continue;
            }
            if content.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = content.split('\t').collect();
            if f.len() != 7 {
                return Err(Error::parse(path, line, format!("expected 7 columns, got {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(path, line, format!("bad number {s:?}")));
            let energy = num(f[4])?;
            rows.push(DiagnosticsRow {
                time: num(f[0])?,
                xc_wrapped: num(f[1])?,
                xc_cover: num(f[2])?,
                vc: num(f[3])?,
                energy: (!energy.is_nan()).then_some(energy),
                cluster_count: f[5]
                    .parse()
                    .map_err(|_| Error::parse(path, line, format!("bad cluster count {:?}", f[5])))?,
                events: f[6]
                    .parse()
                    .map_err(|_| Error::parse(path, line, format!("bad event count {:?}", f[6])))?,
            });
        }
        if !columns_seen {
            return Err(Error::parse(path, 1, "missing column header"));
        }
        Ok(Self { rows })
    }
}
