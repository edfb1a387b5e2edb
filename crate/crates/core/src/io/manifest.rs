use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::FORMAT_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Complete,
    /// The engine failed; the files written so far are valid but stop early.
    Partial,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Complete => "complete",
            RunStatus::Partial => "partial",
        })
    }
}

impl FromStr for RunStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(RunStatus::Complete),
            "partial" => Ok(RunStatus::Partial),
            _ => Err(Error::InvalidArgument(format!("unknown run status {s:?}"))),
        }
    }
}

/// Provenance of one output directory. Carries no timestamps so reruns
/// compare equal byte for byte.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub library_version: String,
    pub seed: u64,
    pub rng: String,
    pub status: RunStatus,
    pub frames: usize,
    pub events: u64,
    pub final_time: f64,
    pub error: Option<String>,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format_version = {FORMAT_VERSION}");
        let _ = writeln!(out, "library_version = {}", self.library_version);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "rng = {}", self.rng);
        let _ = writeln!(out, "status = {}", self.status);
        let _ = writeln!(out, "frames = {}", self.frames);
        let _ = writeln!(out, "events = {}", self.events);
        let _ = writeln!(out, "final_time = {}", crate::io::fmt_f64(self.final_time));
        if let Some(e) = &self.error {
            // Keep the file line oriented.
            let _ = writeln!(out, "error = {}", e.replace('\n', " "));
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

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut m = Manifest {
            library_version: String::new(),
            seed: 0,
            rng: String::new(),
            status: RunStatus::Partial,
            frames: 0,
            events: 0,
            final_time: 0.0,
            error: None,
        };
        let mut seen = 0u32;
        for (idx, content) in text.lines().enumerate() {
            let line = idx + 1;
            if content.trim().is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::parse(path, line, "expected `key = value`"))?;
            let bad = || Error::parse(path, line, format!("bad {key} {value:?}"));
            match key {
                "format_version" => {
                    if value != FORMAT_VERSION.to_string() {
                        return Err(Error::parse(path, line, format!("unsupported format version {value}")));
                    }
                }
                "library_version" => m.library_version = value.to_string(),
                "seed" => m.seed = value.parse().map_err(|_| bad())?,
                "rng" => m.rng = value.to_string(),
                "status" => m.status = value.parse().map_err(|_| bad())?,
                "frames" => m.frames = value.parse().map_err(|_| bad())?,
                "events" => m.events = value.parse().map_err(|_| bad())?,
                "final_time" => m.final_time = value.parse().map_err(|_| bad())?,
                "error" => m.error = Some(value.to_string()),
                _ => return Err(Error::parse(path, line, format!("unknown key {key:?}"))),
            }
            seen += 1;
        }
        if seen < 8 {
            return Err(Error::parse(path, 1, "manifest is incomplete"));
        }
        Ok(m)
    }
}
