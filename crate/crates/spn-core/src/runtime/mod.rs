//! Executable net semantics: binding enumeration, enabledness, firing via
//! containment rewriting, the tick clock, engine constraints and run
//! statistics.

mod config;
mod engine;
mod events;
mod explore;
mod marking;

pub use config::{ConfigError, EngineConfig};
pub use engine::{ClockState, Runtime, RuntimeError, TransitionBinding};
pub use events::{render_event_log, FiringRecord, RunStats, TickReport};
pub use explore::{explore_spn, projected_fingerprints, PlaceTokens, SpnReachability};
pub use marking::Marking;

pub(crate) use engine::{color_accepts, compute_plan_with};
pub(crate) use explore::fingerprint as state_fingerprint;
