//! Two competing motivational subsystems, hunger and caution, drive a single
//! exploration output. The agent lives in a small stochastic world of food,
//! predators and neutral features, adapts its caution after predator
//! encounters and learns which features predict food or danger.
//!
//! Runs are pure functions of their configuration and seed.

pub mod config;
pub mod dynamics;
pub mod engine;
pub mod environment;
pub mod error;
pub mod learning;
pub mod plotdata;
pub mod presets;
pub mod rng;
pub mod sweep;
pub mod trace;

pub use config::RunConfig;
pub use dynamics::{MotivationalState, Params, Percepts, Subsystem};
pub use engine::{init, run, step, Simulation, WorldState};
pub use environment::{
    Directive, EnvConfig, EnvState, EventSchedule, Feature, InitialFeatures, ScheduledEvent,
};
pub use error::{Error, Result};
pub use learning::AssociativeWeights;
pub use presets::{run_preset, Preset};
pub use rng::RandomStream;
pub use trace::{Trace, TraceRow};
