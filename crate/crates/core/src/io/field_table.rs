use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::config::DomainConfig;
use crate::error::{Error, Result};
use crate::field::{primitive_cell_field, single_particle_potential, total_field_of};
use crate::io::{fmt_f64, parse_header_line, FORMAT_VERSION};
use crate::spectral::{series_field, series_potential, FourierTruncation};

/// Evenly spaced evaluation points, endpoints included: `xmin:xmax:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.xmin];
        }
        let step = (self.xmax - self.xmin) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.xmax } else { self.xmin + k as f64 * step })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("grid {s:?}: {why}; expected xmin:xmax:count"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("need three fields"));
        }
        let xmin: f64 = parts[0].trim().parse().map_err(|_| bad("bad xmin"))?;
        let xmax: f64 = parts[1].trim().parse().map_err(|_| bad("bad xmax"))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
        if !(xmin.is_finite() && xmax.is_finite()) || xmax < xmin {
            return Err(bad("need finite xmin <= xmax"));
        }
        if count == 0 {
            return Err(bad("count must be positive"));
        }
        Ok(Self { xmin, xmax, count })
    }
}

/// Reads source positions, one per line. `#` starts a comment; every value
/// must lie in `[-L, L)`.
pub fn parse_sources(text: &str, path: &Path, cfg: &DomainConfig) -> Result<Vec<f64>> {
    let l = cfg.half_length();
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let x: f64 = content
            .parse()
            .map_err(|_| Error::parse(path, line, format!("not a number: {content:?}")))?;
        if !(-l..l).contains(&x) {
            return Err(Error::parse(path, line, format!("source {x} outside [-{l}, {l})")));
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldRow {
    pub x: f64,
    /// Sum of closed-form single-sheet potentials.
    pub potential: f64,
    /// Closed-form total field.
    pub field: f64,
    pub series_potential: f64,
    pub series_field: f64,
    /// Sum of primitive-cell fields, the negative control.
    pub primitive_field: f64,
}

/// Closed-form and truncated-series potentials and fields on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldTable {
    pub n_max: usize,
    pub rows: Vec<FieldRow>,
}

const COLUMNS: &str = "x\tpotential\tfield\tseries_potential\tseries_field\tprimitive_field";

impl FieldTable {
    pub fn compute(sources: &[f64], grid: &GridSpec, trunc: FourierTruncation, cfg: &DomainConfig) -> Self {
        let rows = grid
            .points()
            .into_iter()
            .map(|x| FieldRow {
                x,
                potential: sources.iter().map(|&s| single_particle_potential(x, s, cfg)).sum(),
                field: total_field_of(x, sources, cfg),
                series_potential: series_potential(x, sources, trunc, cfg),
                series_field: series_field(x, sources, trunc, cfg),
                primitive_field: sources.iter().map(|&s| primitive_cell_field(x, s, cfg)).sum(),
            })
            .collect();
        Self {
            n_max: trunc.n_max(),
            rows,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# format_version = {FORMAT_VERSION}");
        let _ = writeln!(out, "# n_max = {}", self.n_max);
        let _ = writeln!(out, "{COLUMNS}");
        for r in &self.rows {
            let cols = [r.x, r.potential, r.field, r.series_potential, r.series_field, r.primitive_field];
            let line: Vec<String> = cols.iter().map(|&v| fmt_f64(v)).collect();
            let _ = writeln!(out, "{}", line.join("\t"));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut n_max = None;
        let mut rows = Vec::new();
        let mut columns_seen = false;
        for (idx, content) in text.lines().enumerate() {
            let line = idx + 1;
            if let Some((key, value)) = parse_header_line(content) {
                match key {
                    "n_max" => {
                        n_max = Some(value.parse().map_err(|_| Error::parse(path, line, "bad n_max"))?);
                    }
                    "format_version" if value != FORMAT_VERSION.to_string() => {
                        return Err(Error::parse(path, line, format!("unsupported format version {value}")));
                    }
                    _ => {}
                }
                continue;
            }
            if !columns_seen {
                if content.trim() != COLUMNS {
                    return Err(Error::parse(path, line, "expected field table column header"));
                }
                columns_seen = true;
                continue;
            }
            let v: Vec<f64> = content
                .split('\t')
                .map(|s| s.parse::<f64>().map_err(|_| Error::parse(path, line, format!("bad number {s:?}"))))
                .collect::<Result<_>>()?;
            if v.len() != 6 {
                return Err(Error::parse(path, line, format!("expected 6 columns, got {}", v.len())));
            }
            rows.push(FieldRow {
                x: v[0],
                potential: v[1],
                field: v[2],
                series_potential: v[3],
                series_field: v[4],
                primitive_field: v[5],
            });
        }
        let n_max = n_max.ok_or_else(|| Error::parse(path, 1, "header lacks n_max"))?;
        Ok(Self { n_max, rows })
    }
}
