use serde::{Deserialize, Serialize};

use crate::config::DomainConfig;
use crate::error::{Error, Result};

/// A point of the primitive cell `[-L, L)`; `±L` are the same point.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct TorusCoordinate(f64);

impl TorusCoordinate {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<TorusCoordinate> for f64 {
    fn from(c: TorusCoordinate) -> f64 {
        c.0
    }
}

/// Maps a covering-line coordinate into `[-L, L)`.
pub fn wrap_to_cell(x: f64, cfg: &DomainConfig) -> TorusCoordinate {
    TorusCoordinate(wrap(x, cfg.half_length()))
}

#[inline]
pub(crate) fn wrap(x: f64, half_length: f64) -> f64 {
    if (-half_length..half_length).contains(&x) {
        return x;
    }
    let period = 2.0 * half_length;
    let r = (x + half_length).rem_euclid(period) - half_length;
    // rem_euclid may round up to `period` for tiny negative inputs.
    if r >= half_length {
        -half_length
    } else {
        r
    }
}

/// Rank-ordered sheets on the covering line.
///
/// Slot `r` holds the `r`-th sheet from the left; `labels[r]` is the identity
/// of the sheet currently occupying it. Positions are not wrapped: the whole
/// configuration fits in a window of length `2L` but that window may sit
/// anywhere on the line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub time: f64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    pub labels: Vec<usize>,
}

impl SystemState {
    /// Builds a state with labels equal to the initial slot order.
    pub fn new(time: f64, positions: Vec<f64>, velocities: Vec<f64>, cfg: &DomainConfig) -> Result<Self> {
        let labels = (0..positions.len()).collect();
        let state = Self {
            time,
            positions,
            velocities,
            labels,
        };
        state.validate(cfg)?;
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Checks the ordering and window invariants.
    pub fn validate(&self, cfg: &DomainConfig) -> Result<()> {
        let n = cfg.particle_count();
        if self.positions.len() != n || self.velocities.len() != n || self.labels.len() != n {
            return Err(Error::InvalidState(format!(
                "expected {n} sheets, got {} positions, {} velocities, {} labels",
                self.positions.len(),
                self.velocities.len(),
                self.labels.len()
            )));
        }
        if self
            .positions
            .iter()
            .chain(&self.velocities)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidState("non-finite position or velocity".into()));
        }
        if let Some(r) = self.positions.windows(2).position(|p| p[1] < p[0]) {
            return Err(Error::InvalidState(format!(
                "positions out of order at slot {r}: {} > {}",
                self.positions[r],
                self.positions[r + 1]
            )));
        }
        // Rounding in a cumulative reconstruction may overshoot by ulps.
        let span = self.positions[n - 1] - self.positions[0];
        if span > cfg.period() * (1.0 + 1e-12) {
            return Err(Error::InvalidState(format!(
                "configuration spans {span}, more than one period {}",
                cfg.period()
            )));
        }
        Ok(())
    }

    /// Mean position and velocity on the covering line.
    pub fn center_of_mass(&self) -> (f64, f64) {
        let n = self.len() as f64;
        (
            self.positions.iter().sum::<f64>() / n,
            self.velocities.iter().sum::<f64>() / n,
        )
    }

    /// Positions mapped into the primitive cell, slot order preserved.
    pub fn wrapped_positions(&self, cfg: &DomainConfig) -> Vec<f64> {
        self.positions
            .iter()
            .map(|&x| wrap(x, cfg.half_length()))
            .collect()
    }

    /// Mean of the wrapped positions. Jumps by `±L/N` whenever a sheet
    /// crosses the cell boundary.
    pub fn wrapped_center_of_mass(&self, cfg: &DomainConfig) -> f64 {
        self.wrapped_positions(cfg).iter().sum::<f64>() / self.len() as f64
    }
}
