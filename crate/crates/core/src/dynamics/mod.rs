//! Exact event-driven evolution of the periodic sheet system.

mod engine;
mod gaps;
mod propagator;
mod queue;

pub use engine::{CenterOfMassTrack, Engine};
pub use gaps::{positions_from_gaps, velocities_from_gaps, GapView};
pub use propagator::{build_propagator, characteristic_rates, GapPropagator};
pub use queue::{CrossingEvent, EventQueue};
