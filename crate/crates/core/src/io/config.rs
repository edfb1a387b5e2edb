use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{DomainConfig, Interaction};
use crate::error::{Error, Result};
use crate::experiment::{default_bins, BoundaryMode, Placement, WaterbagSpec};

/// Every recognised key, in the order they are echoed.
pub const CONFIG_KEYS: [&str; 16] = [
    "n_pairs",
    "half_length",
    "coupling",
    "gamma",
    "interaction",
    "velocity_half_width",
    "placement",
    "seed",
    "zero_mean_velocity",
    "zero_mean_position",
    "mode",
    "t_end",
    "snapshot_interval",
    "output_dir",
    "tolerance",
    "histogram_bins",
];

/// A complete simulation request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub waterbag: WaterbagSpec,
    pub mode: BoundaryMode,
    pub t_end: f64,
    pub snapshot_interval: f64,
    pub output_dir: PathBuf,
    pub tolerance: f64,
    pub histogram_bins: usize,
}

/// Command-line values that replace configuration keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub n_pairs: Option<usize>,
    pub gamma: Option<f64>,
    pub t_end: Option<f64>,
    pub seed: Option<u64>,
    pub mode: Option<BoundaryMode>,
    pub output_dir: Option<PathBuf>,
    pub tolerance: Option<f64>,
}

impl ConfigOverrides {
    fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Some(v) = self.n_pairs {
            out.push(("n_pairs", v.to_string()));
        }
        if let Some(v) = self.gamma {
            out.push(("gamma", format!("{v:e}")));
        }
        if let Some(v) = self.t_end {
            out.push(("t_end", format!("{v:e}")));
        }
        if let Some(v) = self.seed {
            out.push(("seed", v.to_string()));
        }
        if let Some(v) = self.mode {
            out.push(("mode", v.to_string()));
        }
        if let Some(v) = &self.output_dir {
            out.push(("output_dir", v.display().to_string()));
        }
        if let Some(v) = self.tolerance {
            out.push(("tolerance", format!("{v:e}")));
        }
        out
    }
}

/// Raw `key = value` pairs with the line each came from (0 for overrides).
struct Entries<'a> {
    path: &'a Path,
    values: BTreeMap<String, (String, usize)>,
}

impl Entries<'_> {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some((raw, line)) => raw.parse::<T>().map(Some).map_err(|e| self.error(*line, key, raw, e)),
        }
    }

    fn error(&self, line: usize, key: &str, raw: &str, reason: impl std::fmt::Display) -> Error {
        if line == 0 {
            Error::InvalidConfig(format!("override {key} = {raw:?}: {reason}"))
        } else {
            Error::parse(self.path, line, format!("{key} = {raw:?}: {reason}"))
        }
    }

    fn line(&self, key: &str) -> usize {
        self.values.get(key).map_or(0, |v| v.1)
    }

    fn check<T>(&self, key: &str, result: Result<T>) -> Result<T> {
        result.map_err(|e| match e {
            Error::InvalidConfig(msg) | Error::InvalidArgument(msg) => {
                let line = self.line(key);
                if line == 0 {
                    Error::InvalidConfig(msg)
                } else {
                    Error::parse(self.path, line, msg)
                }
            }
            other => other,
        })
    }
}

fn parse_bool(raw: &str) -> std::result::Result<bool, String> {
    match raw {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err("expected true or false".into()),
    }
}

impl RunConfig {
    /// Reads and parses a configuration file.
    pub fn load(path: &Path, overrides: &ConfigOverrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path, overrides)
    }

    /// Parses `key = value` lines; `#` starts a comment. `path` only labels
    /// error messages.
    pub fn parse(text: &str, path: &Path, overrides: &ConfigOverrides) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::parse(path, line, format!("expected `key = value`, got {content:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::parse(path, line, format!("unknown key {key:?}")));
            }
            if value.is_empty() {
                return Err(Error::parse(path, line, format!("missing value for {key}")));
            }
            if let Some((_, first)) = values.insert(key.to_string(), (value.to_string(), line)) {
                return Err(Error::parse(path, line, format!("{key} already set on line {first}")));
            }
        }
        for (key, value) in overrides.entries() {
            values.insert(key.to_string(), (value, 0));
        }
        Self::from_entries(&Entries { path, values })
    }

    fn from_entries(e: &Entries<'_>) -> Result<Self> {
        let n_pairs: usize = e
            .get("n_pairs")?
            .ok_or_else(|| Error::InvalidConfig(format!("{}: n_pairs is required", e.path.display())))?;
        if n_pairs == 0 {
            return Err(e.error(e.line("n_pairs"), "n_pairs", "0", "must be at least 1"));
        }
        let positive = |key: &str, default: f64| -> Result<f64> {
            let v: f64 = e.get(key)?.unwrap_or(default);
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(e.error(e.line(key), key, &v.to_string(), "must be positive"))
            }
        };
        let nonnegative = |key: &str, default: f64| -> Result<f64> {
            let v: f64 = e.get(key)?.unwrap_or(default);
            if v >= 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(e.error(e.line(key), key, &v.to_string(), "must be nonnegative"))
            }
        };
        let half_length = positive("half_length", n_pairs as f64)?;
        // Unit gap stiffness unless stated otherwise.
        let coupling = positive("coupling", half_length / n_pairs as f64)?;
        let gamma = nonnegative("gamma", 0.0)?;
        let _interaction: Interaction = e.get("interaction")?.unwrap_or_default();
        let domain = e.check("n_pairs", DomainConfig::new(half_length, n_pairs, coupling, gamma))?;

        let v0 = nonnegative("velocity_half_width", 0.5)?;
        let flag = |key: &str, default: bool| -> Result<bool> {
            match e.values.get(key) {
                None => Ok(default),
                Some((raw, line)) => parse_bool(raw).map_err(|m| e.error(*line, key, raw, m)),
            }
        };
        let waterbag = WaterbagSpec {
            count: domain.particle_count(),
            velocity_half_width: v0,
            placement: e.get::<Placement>("placement")?.unwrap_or_default(),
            seed: e.get("seed")?.unwrap_or(0),
            zero_mean_velocity: flag("zero_mean_velocity", true)?,
            zero_mean_position: flag("zero_mean_position", false)?,
        };

        let t_end = positive("t_end", 10.0)?;
        let snapshot_interval = positive("snapshot_interval", 1.0)?;
        let tolerance = positive("tolerance", 1e-12)?;
        let histogram_bins: usize = e.get("histogram_bins")?.unwrap_or_else(|| default_bins(&domain));
        if histogram_bins == 0 {
            return Err(e.error(e.line("histogram_bins"), "histogram_bins", "0", "must be positive"));
        }
        let output_dir = e
            .values
            .get("output_dir")
            .map_or_else(|| PathBuf::from("out"), |(raw, _)| PathBuf::from(raw));

        Ok(Self {
            domain,
            waterbag,
            mode: e.get("mode")?.unwrap_or_default(),
            t_end,
            snapshot_interval,
            output_dir,
            tolerance,
            histogram_bins,
        })
    }

    /// Resolved `(key, value)` pairs in [`CONFIG_KEYS`] order, parseable
    /// back into an identical configuration.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let d = &self.domain;
        let w = &self.waterbag;
        vec![
            ("n_pairs", d.n_pairs().to_string()),
            ("half_length", format!("{:.16e}", d.half_length())),
            ("coupling", format!("{:.16e}", d.coupling())),
            ("gamma", format!("{:.16e}", d.gamma())),
            ("interaction", d.interaction().to_string()),
            ("velocity_half_width", format!("{:.16e}", w.velocity_half_width)),
            ("placement", w.placement.to_string()),
            ("seed", w.seed.to_string()),
            ("zero_mean_velocity", w.zero_mean_velocity.to_string()),
            ("zero_mean_position", w.zero_mean_position.to_string()),
            ("mode", self.mode.to_string()),
            ("t_end", format!("{:.16e}", self.t_end)),
            ("snapshot_interval", format!("{:.16e}", self.snapshot_interval)),
            ("output_dir", self.output_dir.display().to_string()),
            ("tolerance", format!("{:.16e}", self.tolerance)),
            ("histogram_bins", self.histogram_bins.to_string()),
        ]
    }

    /// The configuration as a file this parser accepts.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.echo() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Output times `0, Δ, 2Δ, …` up to `t_end`, with `t_end` appended when
    /// the interval does not divide it.
    pub fn schedule(&self) -> Vec<f64> {
        let steps = (self.t_end / self.snapshot_interval * (1.0 + 1e-12)).floor() as usize;
        let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * self.snapshot_interval).collect();
        let last = times.last_mut().expect("schedule starts at zero");
        if self.t_end - *last > 1e-9 * self.snapshot_interval {
            times.push(self.t_end);
        } else {
            *last = self.t_end;
        }
        times
    }
}
