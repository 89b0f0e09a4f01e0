//! The stochastic world: neutral features that flicker in proportion to the
//! agent's own movement, food found only while exploring near trees, and
//! predators that appear near rocks whether or not the agent moves.
//!
//! Every iteration consumes exactly five uniforms from the environment stream,
//! in this order: tree toggle, rock toggle, sun toggle, food, predator. Scheduled
//! directives are applied afterwards and never touch the stream.

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Draws consumed by one environment phase.
pub const DRAWS_PER_ITERATION: u64 = 5;
/// Draws consumed when the initial features are random.
pub const SETUP_DRAWS: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    /// Predicts food.
    Tree,
    /// Predicts predators.
    Rock,
    /// Predicts nothing.
    Sun,
}

impl Feature {
    pub const ALL: [Feature; 3] = [Feature::Tree, Feature::Rock, Feature::Sun];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Tree => "tree",
            Feature::Rock => "rock",
            Feature::Sun => "sun",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Presence of the three neutral features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EnvState {
    pub tree: bool,
    pub rock: bool,
    pub sun: bool,
}

impl EnvState {
    pub fn new(tree: bool, rock: bool, sun: bool) -> Self {
        Self { tree, rock, sun }
    }

    pub fn get(&self, feature: Feature) -> bool {
        match feature {
            Feature::Tree => self.tree,
            Feature::Rock => self.rock,
            Feature::Sun => self.sun,
        }
    }

    pub fn set(&mut self, feature: Feature, present: bool) {
        match feature {
            Feature::Tree => self.tree = present,
            Feature::Rock => self.rock = present,
            Feature::Sun => self.sun = present,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialFeatures {
    /// Three fair coins drawn from the environment stream before iteration 1.
    Random,
    Fixed(EnvState),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvConfig {
    /// Toggle coefficient: each feature flips with probability `c1 * E_prev`.
    pub c1: f64,
    /// Food coefficient: `p(food) = min(1, c2 * E_prev)` while a tree is present.
    pub c2: f64,
    /// Predator coefficient: `p(predator) = c3` while a rock is present.
    pub c3: f64,
    pub initial_features: InitialFeatures,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            c1: 0.75,
            c2: 0.0,
            c3: 0.0,
            initial_features: InitialFeatures::Random,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.c1) {
            return Err(Error::invalid(
                "c1",
                format!("must be in [0, 1], got {}", self.c1),
            ));
        }
        if !(self.c2.is_finite() && self.c2 >= 0.0) {
            return Err(Error::invalid(
                "c2",
                format!("must be a finite number >= 0, got {}", self.c2),
            ));
        }
        if !(0.0..=1.0).contains(&self.c3) {
            return Err(Error::invalid(
                "c3",
                format!("must be in [0, 1], got {}", self.c3),
            ));
        }
        Ok(())
    }

    pub fn initial_state(&self, rng: &mut RandomStream) -> EnvState {
        match self.initial_features {
            InitialFeatures::Fixed(env) => env,
            InitialFeatures::Random => {
                let tree = rng.bernoulli(0.5);
                let rock = rng.bernoulli(0.5);
                let sun = rng.bernoulli(0.5);
                EnvState { tree, rock, sun }
            }
        }
    }
}

/// Features and salient events of one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnvOutcome {
    pub env: EnvState,
    pub food: bool,
    pub predator: bool,
}

pub fn toggle_neutral_features(
    env: EnvState,
    e_prev: f64,
    c1: f64,
    rng: &mut RandomStream,
) -> EnvState {
    let p = c1 * e_prev;
    let mut next = env;
    for feature in Feature::ALL {
        if rng.bernoulli(p) {
            next.set(feature, !env.get(feature));
        }
    }
    next
}

pub fn sample_food(env: &EnvState, e_prev: f64, c2: f64, rng: &mut RandomStream) -> bool {
    let p = if env.tree {
        (c2 * e_prev).min(1.0)
    } else {
        0.0
    };
    rng.bernoulli(p)
}

pub fn sample_predator(env: &EnvState, c3: f64, rng: &mut RandomStream) -> bool {
    let p = if env.rock { c3 } else { 0.0 };
    rng.bernoulli(p)
}

/// Stochastic part of the environment phase: toggles, then food, then predator.
pub fn sample_environment(
    prior: EnvState,
    e_prev: f64,
    config: &EnvConfig,
    rng: &mut RandomStream,
) -> EnvOutcome {
    let env = toggle_neutral_features(prior, e_prev, config.c1, rng);
    let food = sample_food(&env, e_prev, config.c2, rng);
    let predator = sample_predator(&env, config.c3, rng);
    EnvOutcome {
        env,
        food,
        predator,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Directive {
    ForceFood,
    ForcePredator,
    SetFeature {
        feature: Feature,
        present: bool,
    },
    /// From this iteration on, discard all stochastic outcomes (toggles,
    /// food, predator). Draws are still consumed.
    SuppressStochastic,
}

impl Directive {
    fn kind(&self) -> &'static str {
        match self {
            Directive::ForceFood => "force-food",
            Directive::ForcePredator => "force-predator",
            Directive::SetFeature { .. } => "set-feature",
            Directive::SuppressStochastic => "suppress-stochastic",
        }
    }

    /// Key under which iterations must be strictly increasing.
    fn ordering_key(&self) -> (&'static str, Option<Feature>) {
        match self {
            Directive::SetFeature { feature, .. } => (self.kind(), Some(*feature)),
            _ => (self.kind(), None),
        }
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directive::SetFeature { feature, present } => {
                write!(f, "set-feature({feature}, {})", u8::from(*present))
            }
            other => f.write_str(other.kind()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledEvent {
    pub at: u64,
    pub directive: Directive,
}

/// Scripted events keyed by iteration (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventSchedule {
    events: Vec<ScheduledEvent>,
}

impl EventSchedule {
    /// Builds a schedule, checking that iterations are `>= 1` and strictly
    /// increasing per directive type (per feature for `set-feature`).
    pub fn new(events: Vec<ScheduledEvent>) -> Result<Self> {
        let mut last: HashMap<(&'static str, Option<Feature>), u64> = HashMap::new();
        for (i, ev) in events.iter().enumerate() {
            if ev.at < 1 {
                return Err(Error::invalid(
                    format!("schedule[{i}].at"),
                    "iterations are numbered from 1",
                ));
            }
            let key = ev.directive.ordering_key();
            if let Some(&prev) = last.get(&key) {
                if ev.at <= prev {
                    return Err(Error::invalid(
                        format!("schedule[{i}].at"),
                        format!(
                            "{} at iteration {} does not follow the previous one at {}",
                            ev.directive, ev.at, prev
                        ),
                    ));
                }
            }
            last.insert(key, ev.at);
        }
        Ok(Self { events })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[ScheduledEvent] {
        &self.events
    }

    pub fn at(&self, t: u64) -> impl Iterator<Item = &Directive> {
        self.events
            .iter()
            .filter(move |e| e.at == t)
            .map(|e| &e.directive)
    }

    pub fn last_iteration(&self) -> Option<u64> {
        self.events.iter().map(|e| e.at).max()
    }
}

/// Applies the directives registered for iteration `t` on top of the sampled
/// outcome.
///
/// `suppressed` carries the suppress-stochastic latch across iterations. While
/// it is set, the sampled outcome is replaced by `prior` features and no
/// events. Feature overrides come next, then forced events; a forced event
/// without its gating feature is a schedule violation. A sampled event whose
/// gating feature was removed by an override is cancelled.
pub fn apply_schedule(
    prior: EnvState,
    sampled: EnvOutcome,
    schedule: &EventSchedule,
    t: u64,
    suppressed: &mut bool,
) -> Result<EnvOutcome> {
    let directives: Vec<&Directive> = schedule.at(t).collect();
    if directives.contains(&&Directive::SuppressStochastic) {
        *suppressed = true;
    }
    let mut out = if *suppressed {
        EnvOutcome {
            env: prior,
            food: false,
            predator: false,
        }
    } else {
        sampled
    };

    for d in &directives {
        if let Directive::SetFeature { feature, present } = d {
            out.env.set(*feature, *present);
        }
    }
    for d in &directives {
        match d {
            Directive::ForceFood => {
                if !out.env.tree {
                    return Err(Error::Schedule {
                        t,
                        message: "force-food requires the tree to be present".into(),
                    });
                }
                out.food = true;
            }
            Directive::ForcePredator => {
                if !out.env.rock {
                    return Err(Error::Schedule {
                        t,
                        message: "force-predator requires the rock to be present".into(),
                    });
                }
                out.predator = true;
            }
            _ => {}
        }
    }
    out.food &= out.env.tree;
    out.predator &= out.env.rock;
    Ok(out)
}
