//! The simulation loop.
//!
//! One iteration runs these phases in order:
//!
//! 1. environment: toggle features, sample food, sample predator (all using
//!    the previous exploration), then apply the schedule for this iteration;
//! 2. exploration from the previous activations;
//! 3. subsystem updates with this iteration's exploration and percepts;
//! 4. caution update from the clamped change in inhibitory activation;
//! 5. learning from the clamped activation changes;
//! 6. the trace row is recorded and the previous exploration advances.
//!
//! The order is part of the reproducibility contract: the same config and seed
//! always give a bit-identical trace.

use crate::config::RunConfig;
use crate::dynamics::{
    compute_exploration, net_input, update_caution, update_excitatory, update_inhibitory,
    MotivationalState, Percepts, Subsystem,
};
use crate::environment::{apply_schedule, sample_environment, EnvState};
use crate::error::Result;
use crate::learning::{apply_learning, AssociativeWeights};
use crate::rng::RandomStream;
use crate::trace::{Trace, TraceRow};

/// Complete state carried between iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldState {
    /// Iterations completed so far.
    pub t: u64,
    pub motivational: MotivationalState,
    pub env: EnvState,
    /// Percepts of the last completed iteration.
    pub percepts: Percepts,
    pub weights: AssociativeWeights,
    /// Exploration of the last completed iteration.
    pub e_prev: f64,
    /// Latched by a suppress-stochastic directive.
    pub suppressed: bool,
}

/// Validates `config` and builds the initial world and its random stream.
pub fn init(config: &RunConfig) -> Result<(WorldState, RandomStream)> {
    config.validate()?;
    let mut rng = RandomStream::new(config.seed);
    let env = config.env.initial_state(&mut rng);
    let world = WorldState {
        t: 0,
        motivational: MotivationalState::initial(&config.params),
        env,
        percepts: Percepts {
            tree: env.tree,
            rock: env.rock,
            sun: env.sun,
            ..Percepts::default()
        },
        weights: AssociativeWeights::default(),
        e_prev: 0.0,
        suppressed: false,
    };
    Ok((world, rng))
}

/// Advances `world` by one iteration and returns its trace row.
pub fn step(
    world: &mut WorldState,
    config: &RunConfig,
    rng: &mut RandomStream,
) -> Result<TraceRow> {
    let params = &config.params;
    let t = world.t + 1;

    let sampled = sample_environment(world.env, world.e_prev, &config.env, rng);
    let outcome = apply_schedule(
        world.env,
        sampled,
        &config.schedule,
        t,
        &mut world.suppressed,
    )?;
    let percepts = Percepts {
        food: outcome.food,
        predator: outcome.predator,
        tree: outcome.env.tree,
        rock: outcome.env.rock,
        sun: outcome.env.sun,
    };

    let prev = world.motivational;
    let exploration = compute_exploration(&prev, params);

    let net0 = net_input(Subsystem::Excitatory, &percepts, &world.weights, params);
    let net1 = net_input(Subsystem::Inhibitory, &percepts, &world.weights, params);
    let s0 = update_excitatory(prev.s0, exploration, net0, params);
    let s1 = update_inhibitory(prev.s1, exploration, net1, prev.k1, params);

    let k1 = if config.freeze_k1 {
        prev.k1
    } else {
        update_caution(prev.k1, s1, prev.s1, params)
    };

    if config.learning_enabled {
        world.weights = apply_learning(
            &world.weights,
            &percepts,
            s0 - prev.s0,
            s1 - prev.s1,
            params,
        );
    }

    world.t = t;
    world.motivational = MotivationalState { s0, s1, k1 };
    world.env = outcome.env;
    world.percepts = percepts;
    world.e_prev = exploration;

    Ok(TraceRow {
        t,
        e: exploration,
        s0,
        s1,
        k1,
        food: percepts.food,
        predator: percepts.predator,
        tree: percepts.tree,
        rock: percepts.rock,
        sun: percepts.sun,
        weights: world.weights.flat(),
    })
}

/// A configured run in progress.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: RunConfig,
    world: WorldState,
    rng: RandomStream,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        let (world, rng) = init(&config)?;
        Ok(Self { config, world, rng })
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn rng(&self) -> &RandomStream {
        &self.rng
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn is_finished(&self) -> bool {
        self.world.t >= self.config.iterations
    }

    pub fn step(&mut self) -> Result<TraceRow> {
        step(&mut self.world, &self.config, &mut self.rng)
    }
}

/// Runs `config.iterations` iterations.
pub fn run(config: &RunConfig) -> Result<Trace> {
    let mut sim = Simulation::new(config.clone())?;
    let mut rows = Vec::with_capacity(config.iterations as usize);
    while !sim.is_finished() {
        rows.push(sim.step()?);
    }
    Ok(Trace { rows })
}
