//! Associations between neutral features and the two subsystems.
//!
//! A food event strengthens feature → excitatory links by `eta * |Δs0|` for
//! every feature in view; a predator event does the same for feature →
//! inhibitory links with `|Δs1|`. Weights only ever grow.

use crate::dynamics::{Params, Percepts, Subsystem, SATURATION};
use crate::environment::Feature;
use serde::{Deserialize, Serialize};

/// Learnable weights indexed by feature (tree, rock, sun) and subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AssociativeWeights {
    w: [[f64; 2]; 3],
}

fn feature_index(f: Feature) -> usize {
    match f {
        Feature::Tree => 0,
        Feature::Rock => 1,
        Feature::Sun => 2,
    }
}

fn subsystem_index(s: Subsystem) -> usize {
    match s {
        Subsystem::Excitatory => 0,
        Subsystem::Inhibitory => 1,
    }
}

impl AssociativeWeights {
    pub fn get(&self, feature: Feature, subsystem: Subsystem) -> f64 {
        self.w[feature_index(feature)][subsystem_index(subsystem)]
    }

    pub fn set(&mut self, feature: Feature, subsystem: Subsystem, value: f64) {
        self.w[feature_index(feature)][subsystem_index(subsystem)] = value;
    }

    /// Column order used in traces: tree_ex, tree_in, rock_ex, rock_in, sun_ex, sun_in.
    pub fn flat(&self) -> [f64; 6] {
        let w = &self.w;
        [w[0][0], w[0][1], w[1][0], w[1][1], w[2][0], w[2][1]]
    }

    pub fn from_flat(v: [f64; 6]) -> Self {
        Self {
            w: [[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]],
        }
    }
}

/// `delta_s0` / `delta_s1` are this iteration's post-clamp activation changes.
pub fn apply_learning(
    weights: &AssociativeWeights,
    percepts: &Percepts,
    delta_s0: f64,
    delta_s1: f64,
    params: &Params,
) -> AssociativeWeights {
    let mut next = *weights;
    let events = [
        (percepts.food, Subsystem::Excitatory, delta_s0),
        (percepts.predator, Subsystem::Inhibitory, delta_s1),
    ];
    for (fired, subsystem, delta) in events {
        if !fired {
            continue;
        }
        for feature in Feature::ALL {
            if percepts.feature(feature) {
                let w = (next.get(feature, subsystem) + params.eta * delta.abs()).min(SATURATION);
                next.set(feature, subsystem, w);
            }
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn food_with_tree_and_sun() {
        let p = Params::default();
        let percepts = Percepts {
            food: true,
            tree: true,
            sun: true,
            ..Default::default()
        };
        let w = apply_learning(&AssociativeWeights::default(), &percepts, -0.3, 0.0, &p);
        assert!((w.get(Feature::Tree, Subsystem::Excitatory) - 0.015).abs() < 1e-15);
        assert!((w.get(Feature::Sun, Subsystem::Excitatory) - 0.015).abs() < 1e-15);
        assert_eq!(w.get(Feature::Rock, Subsystem::Excitatory), 0.0);
        for f in Feature::ALL {
            assert_eq!(w.get(f, Subsystem::Inhibitory), 0.0);
        }
    }

    #[test]
    fn no_event_no_change() {
        let p = Params::default();
        let mut w = AssociativeWeights::default();
        w.set(Feature::Rock, Subsystem::Inhibitory, 0.2);
        let percepts = Percepts {
            tree: true,
            rock: true,
            sun: true,
            ..Default::default()
        };
        assert_eq!(apply_learning(&w, &percepts, 0.7, -0.4, &p), w);
    }

    #[test]
    fn predator_with_rock() {
        let p = Params::default();
        let mut w = AssociativeWeights::default();
        w.set(Feature::Rock, Subsystem::Inhibitory, 0.1);
        let percepts = Percepts {
            predator: true,
            rock: true,
            ..Default::default()
        };
        let next = apply_learning(&w, &percepts, 0.0, 0.5, &p);
        assert!((next.get(Feature::Rock, Subsystem::Inhibitory) - 0.125).abs() < 1e-15);
        assert_eq!(next.get(Feature::Tree, Subsystem::Inhibitory), 0.0);
        assert_eq!(next.get(Feature::Sun, Subsystem::Inhibitory), 0.0);
    }

    #[test]
    fn both_events_update_both_columns() {
        let p = Params::default();
        let percepts = Percepts {
            food: true,
            predator: true,
            tree: true,
            rock: true,
            sun: false,
        };
        let w = apply_learning(&AssociativeWeights::default(), &percepts, -0.2, 0.4, &p);
        assert_eq!(
            w.flat(),
            [0.05 * 0.2, 0.05 * 0.4, 0.05 * 0.2, 0.05 * 0.4, 0.0, 0.0]
        );
    }

    fn percepts() -> impl Strategy<Value = Percepts> {
        any::<[bool; 5]>().prop_map(|b| Percepts {
            food: b[0] && b[2],
            predator: b[1] && b[3],
            tree: b[2],
            rock: b[3],
            sun: b[4],
        })
    }

    proptest! {
        #[test]
        fn weights_never_decrease(
            start in proptest::array::uniform6(0.0f64..1.0),
            pc in percepts(),
            d0 in -3.0f64..3.0,
            d1 in -3.0f64..3.0,
        ) {
            let w = AssociativeWeights::from_flat(start);
            let next = apply_learning(&w, &pc, d0, d1, &Params::default());
            for (a, b) in w.flat().iter().zip(next.flat()) {
                prop_assert!(b >= *a);
            }
        }

        #[test]
        fn channels_are_separate(pc in percepts(), d0 in -3.0f64..3.0, d1 in -3.0f64..3.0) {
            let w = AssociativeWeights::default();
            let next = apply_learning(&w, &pc, d0, d1, &Params::default());
            for f in Feature::ALL {
                if !pc.food || !pc.feature(f) {
                    prop_assert_eq!(next.get(f, Subsystem::Excitatory), 0.0);
                }
                if !pc.predator || !pc.feature(f) {
                    prop_assert_eq!(next.get(f, Subsystem::Inhibitory), 0.0);
                }
            }
        }
    }
}
