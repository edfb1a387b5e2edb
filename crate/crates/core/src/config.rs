//! Physical parameters of a periodic sheet system.
//!
//! Masses are equal and folded into a single coupling `g = 4πmG`, so the
//! mass never appears on its own. Natural units put the mean
//! gap at one (`L = N`) and the gap stiffness `A = gN/L` at one, which makes
//! the unit of time the inverse Jeans frequency.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Force law selector. Only gravity is supported; plasma signs are out of
/// scope but the key is kept so configuration files are explicit about it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interaction {
    #[default]
    Gravitational,
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("gravitational")
    }
}

impl FromStr for Interaction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gravitational" => Ok(Interaction::Gravitational),
            other => Err(Error::InvalidConfig(format!(
                "interaction must be \"gravitational\", got {other:?}"
            ))),
        }
    }
}

/// Geometry and coupling of a system of `2N` equal sheets on a ring of
/// circumference `2L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    half_length: f64,
    n_pairs: usize,
    coupling: f64,
    gamma: f64,
    interaction: Interaction,
}

impl DomainConfig {
    pub fn new(half_length: f64, n_pairs: usize, coupling: f64, gamma: f64) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "half_length must be positive and finite, got {half_length}"
            )));
        }
        if n_pairs == 0 {
            return Err(Error::InvalidConfig("n_pairs must be at least 1".into()));
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "coupling must be positive and finite, got {coupling}"
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be non-negative and finite, got {gamma}"
            )));
        }
        Ok(Self {
            half_length,
            n_pairs,
            coupling,
            gamma,
            interaction: Interaction::Gravitational,
        })
    }

    /// `L = N`, `g = 1`: unit mean gap and unit stiffness.
    pub fn natural_units(n_pairs: usize, gamma: f64) -> Result<Self> {
        Self::new(n_pairs as f64, n_pairs, 1.0, gamma)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    /// Number of sheets, `2N`.
    pub fn particle_count(&self) -> usize {
        2 * self.n_pairs
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn interaction(&self) -> Interaction {
        self.interaction
    }

    /// Gap stiffness `A = gN/L`.
    pub fn stiffness(&self) -> f64 {
        self.coupling * self.n_pairs as f64 / self.half_length
    }

    /// Equilibrium spacing `z* = L/N`.
    pub fn equilibrium_gap(&self) -> f64 {
        self.half_length / self.n_pairs as f64
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        Self::new(self.half_length, self.n_pairs, self.coupling, gamma)?;
        self.gamma = gamma;
        Ok(self)
    }
}
