//! Figure scenarios.
//!
//! The sampled presets only fix the environment coefficients; "high" food and
//! predator rates are artifact choices (c2 = 0.5, c3 = 0.25) and are echoed
//! in every summary. Each preset has a scripted twin that turns stochastic
//! events off and replays a fixed event timeline instead.

use crate::config::RunConfig;
use crate::engine::run;
use crate::environment::{
    Directive, EnvConfig, EnvState, EventSchedule, Feature, InitialFeatures, ScheduledEvent,
};
use crate::error::{Error, Result};
use crate::trace::{Trace, TraceSummary};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

pub const PRESET_ITERATIONS: u64 = 200;
/// "High" food coefficient.
pub const HIGH_FOOD: f64 = 0.5;
/// "High" predator coefficient.
pub const HIGH_PREDATION: f64 = 0.25;

/// Food period of the scripted satiety scenario.
pub const FIG2_FOOD_PERIOD: u64 = 10;
/// Predator encounters of the scripted caution scenario.
pub const FIG3_PREDATORS: [u64; 3] = [10, 22, 33];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Food, no predators, no learning.
    Fig2,
    /// Predators, no food, no learning.
    Fig3,
    /// Learning with food only.
    Fig4,
    /// Learning with predators and a frozen caution factor.
    Fig5,
    /// Learning with food and predators.
    Fig6,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    /// Parses `figN` or `figN-scripted`.
    pub fn parse_name(name: &str) -> Result<(Preset, bool)> {
        let (base, scripted) = match name.strip_suffix("-scripted") {
            Some(b) => (b, true),
            None => (name, false),
        };
        let preset = base.parse()?;
        Ok((preset, scripted))
    }

    fn coefficients(self) -> (f64, f64) {
        match self {
            Preset::Fig2 | Preset::Fig4 => (HIGH_FOOD, 0.0),
            Preset::Fig3 => (0.0, HIGH_PREDATION),
            Preset::Fig5 | Preset::Fig6 => (HIGH_FOOD, HIGH_PREDATION),
        }
    }

    pub fn config(self, seed: u64, scripted: bool) -> RunConfig {
        let (c2, c3) = self.coefficients();
        let mut config = RunConfig {
            seed,
            iterations: PRESET_ITERATIONS,
            env: EnvConfig {
                c2,
                c3,
                ..EnvConfig::default()
            },
            freeze_k1: self == Preset::Fig5,
            learning_enabled: !matches!(self, Preset::Fig2 | Preset::Fig3),
            ..RunConfig::default()
        };
        if scripted {
            let (features, schedule) = self.script();
            config.env.initial_features = InitialFeatures::Fixed(features);
            config.schedule = schedule;
        }
        config
    }

    fn script(self) -> (EnvState, EventSchedule) {
        use Directive::*;
        let set = |feature, present| SetFeature { feature, present };
        let (features, mut events): (EnvState, Vec<(u64, Directive)>) = match self {
            Preset::Fig2 => (
                EnvState::new(true, false, false),
                (1..=PRESET_ITERATIONS / FIG2_FOOD_PERIOD)
                    .map(|k| (k * FIG2_FOOD_PERIOD, ForceFood))
                    .collect(),
            ),
            Preset::Fig3 => (
                EnvState::new(false, true, false),
                FIG3_PREDATORS.iter().map(|&t| (t, ForcePredator)).collect(),
            ),
            Preset::Fig4 => (
                EnvState::new(true, true, true),
                vec![
                    (15, set(Feature::Rock, false)),
                    (24, ForceFood),
                    (80, ForceFood),
                    (80, set(Feature::Sun, false)),
                    (84, set(Feature::Tree, false)),
                    (155, set(Feature::Rock, true)),
                    (176, set(Feature::Sun, true)),
                    (184, set(Feature::Sun, false)),
                    (193, set(Feature::Tree, true)),
                    (195, ForceFood),
                ],
            ),
            Preset::Fig5 => (
                EnvState::new(true, true, true),
                vec![
                    (20, ForcePredator),
                    (30, set(Feature::Sun, false)),
                    (45, ForcePredator),
                    (60, set(Feature::Sun, true)),
                    (70, ForcePredator),
                    (100, set(Feature::Tree, false)),
                    (120, ForcePredator),
                    (130, set(Feature::Tree, true)),
                    (150, ForcePredator),
                    (160, set(Feature::Sun, false)),
                    (179, ForcePredator),
                ],
            ),
            Preset::Fig6 => (
                EnvState::new(true, true, false),
                vec![
                    (30, ForceFood),
                    (50, ForcePredator),
                    (60, set(Feature::Sun, true)),
                    (90, ForceFood),
                    (100, set(Feature::Sun, false)),
                    (120, ForcePredator),
                    (150, ForceFood),
                    (180, ForcePredator),
                ],
            ),
        };
        events.insert(0, (1, SuppressStochastic));
        let events = events
            .into_iter()
            .map(|(at, directive)| ScheduledEvent { at, directive })
            .collect();
        (
            features,
            EventSchedule::new(events).expect("preset schedules are well ordered"),
        )
    }

    fn notes(self, scripted: bool) -> Vec<String> {
        let mut notes = vec![format!(
            "c2 = {}, c3 = {} are artifact choices standing in for \"high\" / zero rates",
            self.coefficients().0,
            self.coefficients().1
        )];
        if scripted {
            notes.push(
                "stochastic outcomes suppressed from iteration 1; events follow the schedule"
                    .into(),
            );
        }
        if self == Preset::Fig5 {
            notes.push(
                "figure caption reads p(food) high, p(predator) = 0; this preset follows the narrative instead (high predation, caution factor held constant)"
                    .into(),
            );
        }
        notes
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "preset",
                    format!("unknown preset `{s}` (expected fig2..fig6)"),
                )
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PresetSummary {
    pub preset: String,
    pub scripted: bool,
    pub seed: u64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub freeze_k1: bool,
    pub learning_enabled: bool,
    pub initial_features: String,
    pub schedule: Vec<String>,
    pub notes: Vec<String>,
    #[serde(flatten)]
    pub trace: TraceSummary,
}

impl PresetSummary {
    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("summary serializes")
    }
}

pub struct PresetRun {
    pub config: RunConfig,
    pub trace: Trace,
    pub summary: PresetSummary,
}

pub fn run_preset(preset: Preset, seed: u64, scripted: bool) -> Result<PresetRun> {
    let config = preset.config(seed, scripted);
    let trace = run(&config)?;
    let initial_features = match config.env.initial_features {
        InitialFeatures::Random => "random".to_string(),
        InitialFeatures::Fixed(e) => format!(
            "[{}, {}, {}]",
            u8::from(e.tree),
            u8::from(e.rock),
            u8::from(e.sun)
        ),
    };
    let summary = PresetSummary {
        preset: preset.name().to_string(),
        scripted,
        seed,
        c1: config.env.c1,
        c2: config.env.c2,
        c3: config.env.c3,
        freeze_k1: config.freeze_k1,
        learning_enabled: config.learning_enabled,
        initial_features,
        schedule: config
            .schedule
            .events()
            .iter()
            .map(|e| format!("{}: {}", e.at, e.directive))
            .collect(),
        notes: preset.notes(scripted),
        trace: trace.summary(),
    };
    Ok(PresetRun {
        config,
        trace,
        summary,
    })
}
