//! Periodic one-dimensional self-gravitating sheets: torus-consistent
//! fields, Fourier and screened-sum cross-checks, and an exact event-driven
//! integrator.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod field;
pub mod io;
pub mod oracle;
pub mod spectral;
pub mod state;
pub mod summation;
pub mod validation;

pub use config::{DomainConfig, Interaction};
pub use dynamics::{
    build_propagator, positions_from_gaps, velocities_from_gaps, CenterOfMassTrack, CrossingEvent, Engine,
    GapPropagator, GapView,
};
pub use error::{Error, Result};
pub use state::{wrap_to_cell, SystemState, TorusCoordinate};
