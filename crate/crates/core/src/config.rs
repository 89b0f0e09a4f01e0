//! Run configuration: a flat YAML mapping. Omitted keys take the model
//! defaults, unknown keys are rejected.
//!
//! ```yaml
//! seed: 42
//! iterations: 200
//! k1_init: 0.5          # any model constant, see `Params`
//! c2: 0.5
//! c3: 0.25
//! initial_features: random   # or [tree, rock, sun] bits, e.g. [1, 0, 0]
//! freeze_k1: false
//! learning_enabled: true
//! schedule:
//!   - { at: 1, event: suppress-stochastic }
//!   - { at: 24, event: force-food }
//!   - { at: 30, event: set-feature, feature: sun, value: 1 }
//! ```

use crate::dynamics::Params;
use crate::environment::{
    Directive, EnvConfig, EnvState, EventSchedule, Feature, InitialFeatures, ScheduledEvent,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_yaml::Value;

pub const DEFAULT_ITERATIONS: u64 = 200;

/// Every accepted top-level key.
pub const KEYS: &[&str] = &[
    "seed",
    "iterations",
    "w_excit_motor",
    "w_inhib_motor",
    "w_feedback",
    "k0",
    "k1_init",
    "k1_min",
    "delta_caution",
    "eta",
    "w_food_excit",
    "w_pred_inhib",
    "s0_init",
    "s1_init",
    "c1",
    "c2",
    "c3",
    "initial_features",
    "schedule",
    "freeze_k1",
    "learning_enabled",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub iterations: u64,
    pub params: Params,
    pub env: EnvConfig,
    pub schedule: EventSchedule,
    /// Hold the caution factor at `k1_init` for the whole run.
    pub freeze_k1: bool,
    pub learning_enabled: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: DEFAULT_ITERATIONS,
            params: Params::default(),
            env: EnvConfig::default(),
            schedule: EventSchedule::empty(),
            freeze_k1: false,
            learning_enabled: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::invalid("iterations", "must be >= 1"));
        }
        self.params.validate()?;
        self.env.validate()?;
        if let Some(last) = self.schedule.last_iteration() {
            if last > self.iterations {
                return Err(Error::invalid(
                    "schedule",
                    format!(
                        "event at iteration {last} is past the end of the run ({})",
                        self.iterations
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_yaml::from_str(text).map_err(syntax_error)?;
        if value.is_null() {
            return Self::from_file(ConfigFile::default());
        }
        check_keys(&value)?;
        let file: ConfigFile = serde_yaml::from_str(text).map_err(syntax_error)?;
        Self::from_file(file)
    }

    /// Same rules as [`RunConfig::parse`] for an already-parsed YAML tree.
    pub fn from_value(value: Value) -> Result<Self> {
        if value.is_null() {
            return Self::from_file(ConfigFile::default());
        }
        check_keys(&value)?;
        let file: ConfigFile = serde_yaml::from_value(value).map_err(syntax_error)?;
        Self::from_file(file)
    }

    /// Every field written out explicitly.
    pub fn to_value(&self) -> Value {
        serde_yaml::to_value(ConfigFile::from(self)).expect("config serializes")
    }

    pub fn render(&self) -> String {
        serde_yaml::to_string(&ConfigFile::from(self)).expect("config serializes")
    }

    fn from_file(f: ConfigFile) -> Result<Self> {
        let d = RunConfig::default();
        let dp = d.params;
        let params = Params {
            w_excit_motor: f.w_excit_motor.unwrap_or(dp.w_excit_motor),
            w_inhib_motor: f.w_inhib_motor.unwrap_or(dp.w_inhib_motor),
            w_feedback: f.w_feedback.unwrap_or(dp.w_feedback),
            k0: f.k0.unwrap_or(dp.k0),
            k1_init: f.k1_init.unwrap_or(dp.k1_init),
            k1_min: f.k1_min.unwrap_or(dp.k1_min),
            delta_caution: f.delta_caution.unwrap_or(dp.delta_caution),
            eta: f.eta.unwrap_or(dp.eta),
            w_food_excit: f.w_food_excit.unwrap_or(dp.w_food_excit),
            w_pred_inhib: f.w_pred_inhib.unwrap_or(dp.w_pred_inhib),
            s0_init: f.s0_init.unwrap_or(dp.s0_init),
            s1_init: f.s1_init.unwrap_or(dp.s1_init),
        };
        let initial_features = match f.initial_features {
            None => d.env.initial_features,
            Some(repr) => repr.into_initial()?,
        };
        let env = EnvConfig {
            c1: f.c1.unwrap_or(d.env.c1),
            c2: f.c2.unwrap_or(d.env.c2),
            c3: f.c3.unwrap_or(d.env.c3),
            initial_features,
        };
        let schedule = match f.schedule {
            None => EventSchedule::empty(),
            Some(events) => EventSchedule::new(
                events
                    .into_iter()
                    .enumerate()
                    .map(|(i, e)| e.into_event(i))
                    .collect::<Result<_>>()?,
            )?,
        };
        let config = RunConfig {
            seed: f.seed.unwrap_or(d.seed),
            iterations: f.iterations.unwrap_or(d.iterations),
            params,
            env,
            schedule,
            freeze_k1: f.freeze_k1.unwrap_or(d.freeze_k1),
            learning_enabled: f.learning_enabled.unwrap_or(d.learning_enabled),
        };
        config.validate()?;
        Ok(config)
    }
}

fn syntax_error(e: serde_yaml::Error) -> Error {
    let (line, column) = e
        .location()
        .map(|l| (l.line(), l.column()))
        .unwrap_or((0, 0));
    Error::Syntax {
        line,
        column,
        message: e.to_string(),
    }
}

fn check_keys(value: &Value) -> Result<()> {
    let Value::Mapping(map) = value else {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: "configuration must be a mapping of keys to values".into(),
        });
    };
    for key in map.keys() {
        match key.as_str() {
            Some(k) if KEYS.contains(&k) => {}
            Some(k) => return Err(Error::UnknownKey { key: k.to_string() }),
            None => {
                return Err(Error::UnknownKey {
                    key: serde_yaml::to_string(key)
                        .unwrap_or_default()
                        .trim()
                        .to_string(),
                })
            }
        }
    }
    Ok(())
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_excit_motor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_inhib_motor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_feedback: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k1_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k1_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_caution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_food_excit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_pred_inhib: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s0_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s1_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_features: Option<InitialFeaturesRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schedule: Option<Vec<EventRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    freeze_k1: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    learning_enabled: Option<bool>,
}

impl From<&RunConfig> for ConfigFile {
    fn from(c: &RunConfig) -> Self {
        let p = &c.params;
        ConfigFile {
            seed: Some(c.seed),
            iterations: Some(c.iterations),
            w_excit_motor: Some(p.w_excit_motor),
            w_inhib_motor: Some(p.w_inhib_motor),
            w_feedback: Some(p.w_feedback),
            k0: Some(p.k0),
            k1_init: Some(p.k1_init),
            k1_min: Some(p.k1_min),
            delta_caution: Some(p.delta_caution),
            eta: Some(p.eta),
            w_food_excit: Some(p.w_food_excit),
            w_pred_inhib: Some(p.w_pred_inhib),
            s0_init: Some(p.s0_init),
            s1_init: Some(p.s1_init),
            c1: Some(c.env.c1),
            c2: Some(c.env.c2),
            c3: Some(c.env.c3),
            initial_features: Some(match c.env.initial_features {
                InitialFeatures::Random => InitialFeaturesRepr::Marker("random".into()),
                InitialFeatures::Fixed(e) => {
                    InitialFeaturesRepr::Bits([e.tree, e.rock, e.sun].map(u8::from))
                }
            }),
            schedule: Some(c.schedule.events().iter().map(EventRepr::from).collect()),
            freeze_k1: Some(c.freeze_k1),
            learning_enabled: Some(c.learning_enabled),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum InitialFeaturesRepr {
    Marker(String),
    Bits([u8; 3]),
}

fn bit(field: &str, v: u8) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::invalid(field, format!("must be 0 or 1, got {v}"))),
    }
}

impl InitialFeaturesRepr {
    fn into_initial(self) -> Result<InitialFeatures> {
        match self {
            InitialFeaturesRepr::Marker(m) if m == "random" => Ok(InitialFeatures::Random),
            InitialFeaturesRepr::Marker(m) => Err(Error::invalid(
                "initial_features",
                format!("expected `random` or three bits [tree, rock, sun], got `{m}`"),
            )),
            InitialFeaturesRepr::Bits([t, r, s]) => Ok(InitialFeatures::Fixed(EnvState::new(
                bit("initial_features", t)?,
                bit("initial_features", r)?,
                bit("initial_features", s)?,
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum EventKind {
    ForceFood,
    ForcePredator,
    SetFeature,
    SuppressStochastic,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventRepr {
    at: u64,
    event: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature: Option<Feature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<u8>,
}

impl EventRepr {
    fn into_event(self, index: usize) -> Result<ScheduledEvent> {
        let field = |name: &str| format!("schedule[{index}].{name}");
        let directive = match self.event {
            EventKind::SetFeature => {
                let feature = self
                    .feature
                    .ok_or_else(|| Error::invalid(field("feature"), "required for set-feature"))?;
                let value = self
                    .value
                    .ok_or_else(|| Error::invalid(field("value"), "required for set-feature"))?;
                Directive::SetFeature {
                    feature,
                    present: bit(&field("value"), value)?,
                }
            }
            other => {
                if self.feature.is_some() || self.value.is_some() {
                    return Err(Error::invalid(
                        field("event"),
                        "only set-feature takes `feature` and `value`",
                    ));
                }
                match other {
                    EventKind::ForceFood => Directive::ForceFood,
                    EventKind::ForcePredator => Directive::ForcePredator,
                    EventKind::SuppressStochastic => Directive::SuppressStochastic,
                    EventKind::SetFeature => unreachable!(),
                }
            }
        };
        Ok(ScheduledEvent {
            at: self.at,
            directive,
        })
    }
}

impl From<&ScheduledEvent> for EventRepr {
    fn from(e: &ScheduledEvent) -> Self {
        let (event, feature, value) = match e.directive {
            Directive::ForceFood => (EventKind::ForceFood, None, None),
            Directive::ForcePredator => (EventKind::ForcePredator, None, None),
            Directive::SuppressStochastic => (EventKind::SuppressStochastic, None, None),
            Directive::SetFeature { feature, present } => (
                EventKind::SetFeature,
                Some(feature),
                Some(u8::from(present)),
            ),
        };
        EventRepr {
            at: e.at,
            event,
            feature,
            value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document_gives_defaults() {
        for text in ["", "\n", "# nothing here\n"] {
            let c = RunConfig::parse(text).unwrap();
            assert_eq!(c, RunConfig::default());
            assert_eq!(c.params.s0_init, 0.9);
            assert_eq!(c.params.k0, 1.05);
            assert_eq!(c.iterations, 200);
        }
    }

    #[test]
    fn k1_init_below_floor() {
        let err = RunConfig::parse("k1_init: 0.4\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Invalid { .. }));
        assert!(msg.contains("k1_init") && msg.contains("k1_min"), "{msg}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = RunConfig::parse("c2: 0.5\nspeed: 3\n").unwrap_err();
        assert!(
            matches!(err, Error::UnknownKey { ref key } if key == "speed"),
            "{err}"
        );
    }

    #[test]
    fn unknown_key_inside_schedule_rejected() {
        let err = RunConfig::parse("schedule:\n  - { at: 3, event: force-food, when: now }\n")
            .unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }), "{err}");
    }

    #[test]
    fn syntax_error_has_location() {
        let err = RunConfig::parse("c2: 0.5\nc3: [0.1\n").unwrap_err();
        match err {
            Error::Syntax { line, .. } => assert!(line >= 2, "line {line}"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn range_errors_name_field() {
        for (text, field) in [
            ("c3: 1.5", "c3"),
            ("c1: -0.1", "c1"),
            ("iterations: 0", "iterations"),
            ("w_feedback: 0.1", "w_feedback"),
            ("initial_features: [1, 2, 0]", "initial_features"),
            ("initial_features: sometimes", "initial_features"),
        ] {
            let err = RunConfig::parse(text).unwrap_err();
            assert!(
                matches!(&err, Error::Invalid { field: f, .. } if f == field),
                "{text}: {err}"
            );
        }
    }

    #[test]
    fn schedule_parses() {
        let c = RunConfig::parse(
            "initial_features: [1, 0, 1]\nschedule:\n  - { at: 1, event: suppress-stochastic }\n  - { at: 24, event: force-food }\n  - { at: 30, event: set-feature, feature: sun, value: 0 }\n",
        )
        .unwrap();
        assert_eq!(
            c.env.initial_features,
            InitialFeatures::Fixed(EnvState::new(true, false, true))
        );
        assert_eq!(c.schedule.events().len(), 3);
        assert_eq!(
            c.schedule.events()[2].directive,
            Directive::SetFeature {
                feature: Feature::Sun,
                present: false
            }
        );
    }

    #[test]
    fn schedule_field_errors() {
        assert!(
            RunConfig::parse("schedule:\n  - { at: 2, event: set-feature, feature: sun }\n")
                .is_err()
        );
        assert!(
            RunConfig::parse("schedule:\n  - { at: 2, event: force-food, feature: sun }\n")
                .is_err()
        );
        assert!(
            RunConfig::parse("iterations: 10\nschedule:\n  - { at: 11, event: force-food }\n")
                .is_err()
        );
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            any::<u64>(),
            1u64..500,
            (0.01f64..2.0, -2.0f64..-0.01, -1.0f64..-0.001, 0.1f64..3.0),
            (0.1f64..1.0, 0.0f64..2.0, 0.0f64..1.0, 0.0f64..1.0),
            (0.0f64..1.0, 0.0f64..5.0, 0.0f64..1.0),
            proptest::option::of(any::<[bool; 3]>()),
            any::<(bool, bool)>(),
            proptest::collection::vec((1u64..=500, 0u8..6), 0..6),
        )
            .prop_map(
                |(seed, iterations, motor, caution, env, feats, flags, events)| {
                    let (w_ex, w_in, w_f, k0) = motor;
                    let (k1_min, k1_extra, delta, eta) = caution;
                    let mut c = RunConfig {
                        seed,
                        iterations,
                        freeze_k1: flags.0,
                        learning_enabled: flags.1,
                        ..RunConfig::default()
                    };
                    c.params.w_excit_motor = w_ex;
                    c.params.w_inhib_motor = w_in;
                    c.params.w_feedback = w_f;
                    c.params.k0 = k0;
                    c.params.k1_min = k1_min;
                    c.params.k1_init = k1_min + k1_extra;
                    c.params.delta_caution = delta;
                    c.params.eta = eta;
                    c.env.c1 = env.0;
                    c.env.c2 = env.1;
                    c.env.c3 = env.2;
                    c.env.initial_features = match feats {
                        None => InitialFeatures::Random,
                        Some([t, r, s]) => InitialFeatures::Fixed(EnvState::new(t, r, s)),
                    };
                    let mut evs: Vec<ScheduledEvent> = events
                        .into_iter()
                        .filter(|(at, _)| *at <= iterations)
                        .map(|(at, k)| ScheduledEvent {
                            at,
                            directive: match k {
                                0 => Directive::ForceFood,
                                1 => Directive::ForcePredator,
                                2 => Directive::SuppressStochastic,
                                3 => Directive::SetFeature {
                                    feature: Feature::Tree,
                                    present: true,
                                },
                                4 => Directive::SetFeature {
                                    feature: Feature::Rock,
                                    present: false,
                                },
                                _ => Directive::SetFeature {
                                    feature: Feature::Sun,
                                    present: true,
                                },
                            },
                        })
                        .collect();
                    evs.sort_by_key(|e| e.at);
                    evs.dedup();
                    c.schedule = EventSchedule::new(evs).expect("sorted and deduplicated");
                    c
                },
            )
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(c in arb_config()) {
            let text = c.render();
            let back = RunConfig::parse(&text).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
