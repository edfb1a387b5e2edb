use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{Experiment, RNG_NAME};
use crate::io::config::RunConfig;
use crate::io::manifest::{Manifest, RunStatus};
use crate::io::series::{DiagnosticsRow, DiagnosticsSeries};
use crate::io::snapshot::{SnapshotFile, SnapshotRow};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.tsv";
pub const MANIFEST_FILE: &str = "manifest.txt";

pub fn snapshot_name(frame: usize) -> String {
    format!("snapshot_{frame:04}.tsv")
}

/// What a finished (or aborted) run left behind.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    pub output_dir: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub manifest: Manifest,
}

fn is_snapshot(name: &str) -> bool {
    name.strip_prefix("snapshot_")
        .and_then(|r| r.strip_suffix(".tsv"))
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

fn clear_old_snapshots(dir: &Path) -> Result<()> {
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry.file_name().to_str().is_some_and(is_snapshot) {
            let p = entry.path();
            std::fs::remove_file(&p).map_err(|e| Error::io(&p, e))?;
        }
    }
    Ok(())
}

/// Runs `config` and writes one snapshot per scheduled time, the
/// diagnostics series and a manifest into `config.output_dir`.
///
/// Snapshots left over from an earlier run in the same directory are
/// removed first. If the engine fails the files written so far are kept,
/// the manifest is marked partial and the engine error is returned.
pub fn simulate(config: &RunConfig) -> Result<SimulationSummary> {
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    clear_old_snapshots(dir)?;

    let experiment = Experiment {
        mode: config.mode,
        spec: config.waterbag,
        cfg: config.domain,
        tolerance: config.tolerance,
        bins: config.histogram_bins,
    };
    let schedule = config.schedule();

    let diag_path = dir.join(DIAGNOSTICS_FILE);
    let mut diag = BufWriter::new(File::create(&diag_path).map_err(|e| Error::io(&diag_path, e))?);
    diag.write_all(DiagnosticsSeries::header().as_bytes())
        .map_err(|e| Error::io(&diag_path, e))?;

    let mut snapshots = Vec::with_capacity(schedule.len());
    let mut last = (0.0, 0u64);
    let outcome = experiment.run_with(&schedule, |_, frame| {
        let snap = SnapshotFile {
            config: config.clone(),
            time: frame.time,
            event_count: frame.events,
            rows: frame
                .positions
                .iter()
                .zip(&frame.velocities)
                .enumerate()
                .map(|(label, (&x, &v))| SnapshotRow { label, x, v })
                .collect(),
        };
        let path = dir.join(snapshot_name(snapshots.len()));
        snap.write(&path)?;
        snapshots.push(path);
        diag.write_all(DiagnosticsSeries::format_row(&DiagnosticsRow::from(frame)).as_bytes())
            .map_err(|e| Error::io(&diag_path, e))?;
        last = (frame.time, frame.events);
        log::debug!("t = {} events = {}", frame.time, frame.events);
        Ok(())
    });
    diag.flush().map_err(|e| Error::io(&diag_path, e))?;

    let (status, error, final_time, events) = match &outcome {
        Ok(()) => (RunStatus::Complete, None, last.0, last.1),
        Err(Error::Run { time, events, .. }) => (RunStatus::Partial, outcome.as_ref().err().map(|e| e.to_string()), *time, *events),
        Err(e) => (RunStatus::Partial, Some(e.to_string()), last.0, last.1),
    };
    let manifest = Manifest {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.waterbag.seed,
        rng: RNG_NAME.to_string(),
        status,
        frames: snapshots.len(),
        events,
        final_time,
        error,
    };
    manifest.write(&dir.join(MANIFEST_FILE))?;
    outcome?;
    Ok(SimulationSummary {
        output_dir: dir.clone(),
        snapshots,
        manifest,
    })
}
