//! Initial conditions, periodic and mirror-symmetric runs, and the
//! diagnostics used to compare them.

mod diagnostics;
mod waterbag;

use serde::{Deserialize, Serialize};

pub use diagnostics::{
    center_of_mass_trace, cluster_count, count_variance, histogram, pearson, CenterOfMassJump, CenterOfMassTrace,
};
pub use waterbag::{make_waterbag, BoundaryMode, Placement, WaterbagSpec, RNG_NAME};

use crate::config::DomainConfig;
use crate::dynamics::Engine;
use crate::error::{Error, Result};
use crate::field::total_energy;
use crate::state::SystemState;

/// Everything recorded at one output time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsFrame {
    pub time: f64,
    pub histogram: Vec<u64>,
    /// Wrapped positions in label order.
    pub positions: Vec<f64>,
    /// Velocities in label order.
    pub velocities: Vec<f64>,
    pub xc_wrapped: f64,
    pub xc_cover: f64,
    pub vc: f64,
    /// Only tracked without friction, where it is conserved.
    pub energy: Option<f64>,
    pub cluster_count: usize,
    pub events: u64,
}

impl DiagnosticsFrame {
    pub fn from_state(
        state: &SystemState,
        cover_com: (f64, f64),
        events: u64,
        bins: usize,
        cfg: &DomainConfig,
    ) -> Result<Self> {
        let wrapped = state.wrapped_positions(cfg);
        let n = state.len();
        let mut positions = vec![0.0; n];
        let mut velocities = vec![0.0; n];
        for (slot, &label) in state.labels.iter().enumerate() {
            positions[label] = wrapped[slot];
            velocities[label] = state.velocities[slot];
        }
        Ok(Self {
            time: state.time,
            histogram: histogram(&wrapped, bins, cfg),
            xc_wrapped: wrapped.iter().sum::<f64>() / n as f64,
            xc_cover: cover_com.0,
            vc: cover_com.1,
            energy: (cfg.gamma() == 0.0).then(|| total_energy(state, cfg)),
            cluster_count: cluster_count(&wrapped, default_cluster_threshold(cfg), cfg)?,
            events,
            positions,
            velocities,
        })
    }
}

/// `L/(4N)`, a quarter of the mean gap.
pub fn default_cluster_threshold(cfg: &DomainConfig) -> f64 {
    0.25 * cfg.equilibrium_gap()
}

/// `2N/8` bins, at least one.
pub fn default_bins(cfg: &DomainConfig) -> usize {
    (cfg.particle_count() / 8).max(1)
}

/// One boundary-mode run from a waterbag start.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub mode: BoundaryMode,
    pub spec: WaterbagSpec,
    pub cfg: DomainConfig,
    pub tolerance: f64,
    pub bins: usize,
}

impl Experiment {
    pub fn new(mode: BoundaryMode, spec: WaterbagSpec, cfg: DomainConfig) -> Self {
        Self {
            mode,
            spec,
            bins: default_bins(&cfg),
            cfg,
            tolerance: 1e-12,
        }
    }

    pub fn initial_state(&self) -> Result<SystemState> {
        make_waterbag(&self.spec, self.mode, &self.cfg)
    }

    pub fn engine(&self) -> Result<Engine> {
        let state = self.initial_state()?;
        match self.mode {
            BoundaryMode::Periodic => Engine::new(&state, &self.cfg, self.tolerance),
            BoundaryMode::Symmetric => Engine::new_symmetric(&state, &self.cfg, self.tolerance),
        }
    }

    /// Frames at the scheduled times.
    pub fn run(&self, schedule: &[f64]) -> Result<Vec<DiagnosticsFrame>> {
        let mut frames = Vec::with_capacity(schedule.len());
        self.run_with(schedule, |_, frame| {
            frames.push(frame.clone());
            Ok(())
        })?;
        Ok(frames)
    }

    /// Streams each output state and its frame to `sink`. Engine failures
    /// are reported with the time and event count reached.
    pub fn run_with<F>(&self, schedule: &[f64], mut sink: F) -> Result<()>
    where
        F: FnMut(&SystemState, &DiagnosticsFrame) -> Result<()>,
    {
        if schedule.is_empty() {
            return Ok(());
        }
        if let Some(k) = schedule.windows(2).position(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::InvalidArgument(format!(
                "schedule must increase: entry {} ({}) follows {}",
                k + 1,
                schedule[k + 1],
                schedule[k]
            )));
        }
        if schedule[0].is_nan() || schedule[0] < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "schedule starts before t = 0: {}",
                schedule[0]
            )));
        }
        let mut engine = self.engine()?;
        for &t in schedule {
            let wrap_run = |e: Error, engine: &Engine| Error::Run {
                time: engine.time(),
                events: engine.event_count(),
                source: Box::new(e),
            };
            engine.advance_to(t).map_err(|e| wrap_run(e, &engine))?;
            let state = engine.state().map_err(|e| wrap_run(e, &engine))?;
            let frame = DiagnosticsFrame::from_state(
                &state,
                engine.center_of_mass(),
                engine.event_count(),
                self.bins,
                &self.cfg,
            )?;
            sink(&state, &frame)?;
        }
        Ok(())
    }
}

/// Frames of one run at the scheduled times, with default tolerance and
/// binning.
pub fn run_experiment(
    mode: BoundaryMode,
    spec: &WaterbagSpec,
    cfg: &DomainConfig,
    schedule: &[f64],
) -> Result<Vec<DiagnosticsFrame>> {
    Experiment::new(mode, *spec, *cfg).run(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_schedule_is_vacuous() {
        let cfg = DomainConfig::natural_units(4, 0.0).unwrap();
        let spec = WaterbagSpec::for_config(&cfg, 1);
        assert!(run_experiment(BoundaryMode::Periodic, &spec, &cfg, &[]).unwrap().is_empty());
    }

    #[test]
    fn rejects_unordered_schedules() {
        let cfg = DomainConfig::natural_units(4, 0.0).unwrap();
        let spec = WaterbagSpec::for_config(&cfg, 1);
        assert!(run_experiment(BoundaryMode::Periodic, &spec, &cfg, &[1.0, 1.0]).is_err());
        assert!(run_experiment(BoundaryMode::Periodic, &spec, &cfg, &[-1.0]).is_err());
    }

    #[test]
    fn frames_are_consistent() {
        let cfg = DomainConfig::natural_units(8, 0.0).unwrap();
        let spec = WaterbagSpec::for_config(&cfg, 4);
        let frames = run_experiment(BoundaryMode::Periodic, &spec, &cfg, &[0.0, 1.0, 2.0]).unwrap();
        for f in &frames {
            assert_eq!(f.histogram.iter().sum::<u64>(), 16);
            assert!(f.positions.iter().all(|x| (-8.0..8.0).contains(x)));
            assert!(f.energy.is_some());
        }
        let e0 = frames[0].energy.unwrap();
        assert!((frames[2].energy.unwrap() - e0).abs() <= 1e-9 * e0.abs());
    }

    #[test]
    fn symmetric_runs_keep_the_center_of_mass_at_rest() {
        let cfg = DomainConfig::natural_units(16, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let spec = WaterbagSpec {
            placement: Placement::UniformRandom,
            ..WaterbagSpec::for_config(&cfg, 8)
        };
        let frames = run_experiment(BoundaryMode::Symmetric, &spec, &cfg, &[1.0, 3.0, 6.0]).unwrap();
        assert!(frames.last().unwrap().events > 0);
        for f in &frames {
            let xc = f.positions.iter().sum::<f64>() / 32.0;
            let vc = f.velocities.iter().sum::<f64>() / 32.0;
            assert!(xc.abs() <= 1e-12 && vc.abs() <= 1e-12, "{xc} {vc}");
            assert!(f.energy.is_none());
        }
    }
}
