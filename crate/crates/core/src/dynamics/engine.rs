use serde::{Deserialize, Serialize};

use super::gaps::{neighbours, positions_from_gaps, velocities_from_gaps, GapView};
use super::propagator::{build_propagator, GapPropagator};
use super::queue::{CrossingEvent, EventQueue};
use crate::config::DomainConfig;
use crate::error::{Error, Result};
use crate::field::total_energy;
use crate::state::SystemState;

/// Closed-form center-of-mass motion, `v_c' + γ v_c = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterOfMassTrack {
    pub x_c0: f64,
    pub v_c0: f64,
    pub gamma: f64,
    pub t0: f64,
}

impl CenterOfMassTrack {
    /// Cover-line position and velocity at `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let tau = t - self.t0;
        if self.gamma == 0.0 {
            return (self.x_c0 + self.v_c0 * tau, self.v_c0);
        }
        let decay = (-self.gamma * tau).exp_m1();
        (
            self.x_c0 - self.v_c0 * decay / self.gamma,
            self.v_c0 * (decay + 1.0),
        )
    }
}

/// Mirror image of gap `g` under `x -> -x` for `n` slots.
#[inline]
pub(crate) fn mirror_gap(g: usize, n: usize) -> usize {
    if g == n - 1 {
        g
    } else {
        n - 2 - g
    }
}

/// Event-driven integrator over rank slots.
///
/// Each gap follows its own [`GapPropagator`] between crossings. A crossing
/// touches only the closing gap and its two neighbours, so an event costs
/// three rebuilds and `O(log N)` queue work. Slot positions live on the
/// covering line; wrapping is applied to output only.
///
/// In symmetric mode the configuration is kept invariant under
/// `(x, v) -> (-x, -v)`: every crossing is processed together with its mirror
/// and the touched gaps are averaged with their images before rebuilding.
#[derive(Clone, Debug)]
pub struct Engine {
    cfg: DomainConfig,
    tolerance: f64,
    time: f64,
    com: CenterOfMassTrack,
    gaps: Vec<GapPropagator>,
    queue: EventQueue,
    labels: Vec<usize>,
    events: u64,
    symmetric: bool,
    since_audit: usize,
}

impl Engine {
    pub fn new(state: &SystemState, cfg: &DomainConfig, tolerance: f64) -> Result<Self> {
        Self::build(state, cfg, tolerance, false)
    }

    /// Engine for a mirror-symmetric state. The state must already be
    /// symmetric to within `1e-9 L`; residual asymmetry is averaged away.
    pub fn new_symmetric(state: &SystemState, cfg: &DomainConfig, tolerance: f64) -> Result<Self> {
        let n = state.len();
        let scale = cfg.half_length();
        for r in 0..n {
            let m = n - 1 - r;
            let dx = (state.positions[r] + state.positions[m]).abs();
            let dv = (state.velocities[r] + state.velocities[m]).abs();
            let vscale = state.velocities[r].abs().max(1.0);
            if dx > 1e-9 * scale || dv > 1e-9 * vscale {
                return Err(Error::InvalidState(format!(
                    "state is not mirror symmetric at slot {r}: dx = {dx:e}, dv = {dv:e}"
                )));
            }
        }
        Self::build(state, cfg, tolerance, true)
    }

    fn build(state: &SystemState, cfg: &DomainConfig, tolerance: f64, symmetric: bool) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!("root tolerance must be positive, got {tolerance}")));
        }
        let mut view = GapView::from_state(state, cfg)?;
        let n = view.len();
        let (x_c0, v_c0) = if symmetric {
            for g in 0..n {
                let m = mirror_gap(g, n);
                if m > g {
                    let z = 0.5 * (view.z[g] + view.z[m]);
                    let w = 0.5 * (view.w[g] + view.w[m]);
                    view.z[g] = z;
                    view.z[m] = z;
                    view.w[g] = w;
                    view.w[m] = w;
                }
            }
            (0.0, 0.0)
        } else {
            state.center_of_mass()
        };
        let gaps = view
            .z
            .iter()
            .zip(&view.w)
            .map(|(&z, &w)| build_propagator(z, w, state.time, cfg))
            .collect::<Result<Vec<_>>>()?;
        let mut engine = Self {
            cfg: *cfg,
            tolerance,
            time: state.time,
            com: CenterOfMassTrack {
                x_c0,
                v_c0,
                gamma: cfg.gamma(),
                t0: state.time,
            },
            gaps,
            queue: EventQueue::new(n),
            labels: state.labels.clone(),
            events: 0,
            symmetric,
            since_audit: 0,
        };
        for g in 0..n {
            engine.reschedule(g)?;
        }
        Ok(engine)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Number of pair swaps processed so far.
    pub fn event_count(&self) -> u64 {
        self.events
    }

    pub fn config(&self) -> &DomainConfig {
        &self.cfg
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn propagator(&self, gap: usize) -> &GapPropagator {
        &self.gaps[gap]
    }

    pub fn center_of_mass_track(&self) -> CenterOfMassTrack {
        self.com
    }

    /// Cover-line center of mass at the current time.
    pub fn center_of_mass(&self) -> (f64, f64) {
        self.com.at(self.time)
    }

    /// Gap values at the current time, clamped to `z ≥ 0`.
    pub fn gaps(&self) -> GapView {
        let (z, w) = self
            .gaps
            .iter()
            .map(|p| {
                let (z, w) = p.eval(self.time);
                (z.max(0.0), w)
            })
            .unzip();
        GapView { z, w }
    }

    /// Slot-ordered state at the current time.
    pub fn state(&self) -> Result<SystemState> {
        let view = self.gaps();
        let (x_c, v_c) = self.center_of_mass();
        let mut positions = positions_from_gaps(&view.z, x_c, &self.cfg)?;
        let mut velocities = velocities_from_gaps(&view.w, v_c, &self.cfg)?;
        if self.symmetric {
            let n = positions.len();
            for r in 0..n / 2 {
                let m = n - 1 - r;
                let x = 0.5 * (positions[r] - positions[m]);
                let v = 0.5 * (velocities[r] - velocities[m]);
                positions[r] = x;
                positions[m] = -x;
                velocities[r] = v;
                velocities[m] = -v;
            }
        }
        Ok(SystemState {
            time: self.time,
            positions,
            velocities,
            labels: self.labels.clone(),
        })
    }

    /// Kinetic plus interaction energy per unit mass at the current time.
    pub fn energy(&self) -> Result<f64> {
        Ok(total_energy(&self.state()?, &self.cfg))
    }

    /// Earliest pending crossing.
    pub fn next_event(&mut self) -> Option<CrossingEvent> {
        self.queue.peek()
    }

    /// Processes the next crossing if it happens strictly before `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<Option<CrossingEvent>> {
        let Some(event) = self.queue.pop_before(t_limit) else {
            return Ok(None);
        };
        self.process(event)?;
        Ok(Some(event))
    }

    /// Processes every crossing before `t_target`, then moves the clock.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        if t_target < self.time {
            return Err(Error::InvalidArgument(format!(
                "cannot advance backwards from {} to {t_target}",
                self.time
            )));
        }
        while self.step(t_target)?.is_some() {}
        self.time = t_target;
        Ok(())
    }

    fn reschedule(&mut self, gap: usize) -> Result<()> {
        let next = self.gaps[gap]
            .next_crossing_time(self.time, self.tolerance)
            .map_err(|e| match e {
                Error::RootSolver { reason, propagator, .. } => Error::RootSolver {
                    gap,
                    reason,
                    propagator,
                },
                other => other,
            })?;
        self.queue.schedule(gap, next);
        Ok(())
    }

    fn process(&mut self, event: CrossingEvent) -> Result<()> {
        let n = self.gaps.len();
        let te = event.time;
        self.time = te;

        let j = event.gap_index;
        let mut crossing = vec![j];
        if self.symmetric {
            let m = mirror_gap(j, n);
            if m != j {
                crossing.push(m);
            }
        }

        // Touched gaps with their values at the event time.
        let mut touched: Vec<(usize, f64, f64)> = Vec::with_capacity(6);
        for &c in &crossing {
            let (prev, next) = neighbours(c, n);
            for g in [prev, c, next] {
                if !touched.iter().any(|t| t.0 == g) {
                    let (z, w) = self.gaps[g].eval(te);
                    touched.push((g, z, w));
                }
            }
        }
        let slot = |touched: &[(usize, f64, f64)], g: usize| touched.iter().position(|t| t.0 == g).unwrap();

        let z_tolerance = 1e-6 * self.cfg.equilibrium_gap();
        for &c in &crossing {
            let (prev, next) = neighbours(c, n);
            let (ic, ip, inx) = (slot(&touched, c), slot(&touched, prev), slot(&touched, next));
            let (z, old) = (touched[ic].1, touched[ic].2);
            if z.abs() > z_tolerance {
                return Err(Error::CrossingNotDue {
                    gap: c,
                    z,
                    tolerance: z_tolerance,
                });
            }
            touched[ic].1 = 0.0;
            touched[inx].1 += z;
            touched[ic].2 = -old;
            touched[ip].2 += old;
            touched[inx].2 += old;
            self.labels.swap(c, (c + 1) % n);
        }

        if self.symmetric {
            let snapshot = touched.clone();
            for t in touched.iter_mut() {
                let m = &snapshot[slot(&snapshot, mirror_gap(t.0, n))];
                t.1 = 0.5 * (t.1 + m.1);
                t.2 = 0.5 * (t.2 + m.2);
            }
        }

        for &(g, z, w) in &touched {
            self.gaps[g] = build_propagator(z.max(0.0), w, te, &self.cfg)?;
        }
        for &(g, _, _) in &touched {
            self.reschedule(g)?;
        }

        self.events += crossing.len() as u64;
        self.since_audit += crossing.len();
        if self.since_audit >= n {
            self.since_audit = 0;
            self.renormalize()?;
        }
        Ok(())
    }

    /// Restores `Σz = 2L` and `Σw = 0` against accumulated rounding by
    /// correcting the widest gap (and its mirror image).
    fn renormalize(&mut self) -> Result<()> {
        let n = self.gaps.len();
        let view = self.gaps();
        let (dz, dw) = view.closure_error(&self.cfg);
        if dz == 0.0 && dw == 0.0 {
            return Ok(());
        }
        let widest = (0..n)
            .max_by(|&a, &b| view.z[a].total_cmp(&view.z[b]).then(b.cmp(&a)))
            .unwrap();
        let mut targets = vec![widest];
        if self.symmetric {
            let m = mirror_gap(widest, n);
            if m != widest {
                targets.push(m);
            }
        }
        let share = targets.len() as f64;
        for &g in &targets {
            let z = view.z[g] - dz / share;
            let w = view.w[g] - dw / share;
            self.gaps[g] = build_propagator(z, w, self.time, &self.cfg)?;
        }
        for &g in &targets {
            self.reschedule(g)?;
        }
        Ok(())
    }
}
