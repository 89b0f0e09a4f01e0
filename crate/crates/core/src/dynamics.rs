//! Motivational dynamics: the exploration output, the two subsystem updates and
//! the adaptive caution factor. Everything here is a pure function.

use crate::environment::Feature;
use crate::error::{Error, Result};
use crate::learning::AssociativeWeights;
use serde::{Deserialize, Serialize};

/// Smallest representable exploration value on the moving branch.
pub const E_FLOOR: f64 = 0.5 + f64::EPSILON / 2.0;
/// Largest `f64` strictly below one.
pub const E_CEILING: f64 = 1.0 - f64::EPSILON / 2.0;

/// Fixed model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Excitatory subsystem → motor unit.
    pub w_excit_motor: f64,
    /// Inhibitory subsystem → motor unit.
    pub w_inhib_motor: f64,
    /// Motor → subsystem feedback (fatigue / reassurance).
    pub w_feedback: f64,
    /// Hunger growth factor.
    pub k0: f64,
    pub k1_init: f64,
    pub k1_min: f64,
    /// Step size of the caution update.
    pub delta_caution: f64,
    /// Associative learning rate.
    pub eta: f64,
    /// Food unit → excitatory subsystem (satiety).
    pub w_food_excit: f64,
    /// Predator unit → inhibitory subsystem.
    pub w_pred_inhib: f64,
    pub s0_init: f64,
    pub s1_init: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            w_excit_motor: 0.5,
            w_inhib_motor: -0.5,
            w_feedback: -0.1,
            k0: 1.05,
            k1_init: 0.5,
            k1_min: 0.5,
            delta_caution: 0.2,
            eta: 0.05,
            w_food_excit: -0.5,
            w_pred_inhib: 0.9,
            s0_init: 0.9,
            s1_init: 0.9,
        }
    }
}

fn require(ok: bool, field: &str, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(field, message))
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("w_excit_motor", self.w_excit_motor),
            ("w_inhib_motor", self.w_inhib_motor),
            ("w_feedback", self.w_feedback),
            ("k0", self.k0),
            ("k1_init", self.k1_init),
            ("k1_min", self.k1_min),
            ("delta_caution", self.delta_caution),
            ("eta", self.eta),
            ("w_food_excit", self.w_food_excit),
            ("w_pred_inhib", self.w_pred_inhib),
            ("s0_init", self.s0_init),
            ("s1_init", self.s1_init),
        ];
        for (name, v) in fields {
            require(v.is_finite(), name, "must be a finite number")?;
        }
        require(self.k0 > 0.0, "k0", "must be > 0")?;
        require(self.k1_min > 0.0, "k1_min", "must be > 0")?;
        if self.k1_init < self.k1_min {
            return Err(Error::invalid(
                "k1_init",
                format!("must be >= k1_min ({}), got {}", self.k1_min, self.k1_init),
            ));
        }
        require(self.eta >= 0.0, "eta", "must be >= 0")?;
        require(self.delta_caution >= 0.0, "delta_caution", "must be >= 0")?;
        require(self.w_excit_motor > 0.0, "w_excit_motor", "must be > 0")?;
        require(self.w_inhib_motor < 0.0, "w_inhib_motor", "must be < 0")?;
        require(self.w_feedback < 0.0, "w_feedback", "must be < 0")?;
        require(self.w_food_excit < 0.0, "w_food_excit", "must be < 0")?;
        require(self.w_pred_inhib > 0.0, "w_pred_inhib", "must be > 0")?;
        require(self.s0_init >= 0.0, "s0_init", "must be >= 0")?;
        require(self.s1_init >= 0.0, "s1_init", "must be >= 0")?;
        Ok(())
    }
}

/// Evolving activations of the two subsystems plus the current caution factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotivationalState {
    /// Excitatory (hunger) activation.
    pub s0: f64,
    /// Inhibitory (caution) activation.
    pub s1: f64,
    /// Retention factor of the inhibitory subsystem.
    pub k1: f64,
}

impl MotivationalState {
    pub fn initial(params: &Params) -> Self {
        Self {
            s0: params.s0_init,
            s1: params.s1_init,
            k1: params.k1_init,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    Excitatory,
    Inhibitory,
}

/// Binary perception-unit activations for one iteration.
///
/// Unit order is food (0), predator (1), tree (2), rock (3), sun (4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Percepts {
    pub food: bool,
    pub predator: bool,
    pub tree: bool,
    pub rock: bool,
    pub sun: bool,
}

impl Percepts {
    pub fn feature(&self, feature: Feature) -> bool {
        match feature {
            Feature::Tree => self.tree,
            Feature::Rock => self.rock,
            Feature::Sun => self.sun,
        }
    }

    /// Activations in unit order.
    pub fn activations(&self) -> [f64; 5] {
        [self.food, self.predator, self.tree, self.rock, self.sun].map(|b| f64::from(u8::from(b)))
    }

    /// Food needs a tree in view, a predator needs a rock.
    pub fn is_consistent(&self) -> bool {
        (!self.food || self.tree) && (!self.predator || self.rock)
    }
}

/// Motor output. Zero unless the excitatory activation exceeds the inhibitory
/// one; otherwise the logistic of the weighted activations, kept inside the
/// open interval `(0.5, 1)` where rounding would land on an endpoint.
pub fn compute_exploration(state: &MotivationalState, params: &Params) -> f64 {
    if state.s0 <= state.s1 {
        return 0.0;
    }
    let drive = params.w_excit_motor * state.s0 + params.w_inhib_motor * state.s1;
    let e = 1.0 / (1.0 + libm::exp(-drive));
    e.clamp(E_FLOOR, E_CEILING)
}

/// Summed weighted input to `subsystem` over all five perception units.
pub fn net_input(
    subsystem: Subsystem,
    percepts: &Percepts,
    learned: &AssociativeWeights,
    params: &Params,
) -> f64 {
    let (food, predator) = match subsystem {
        Subsystem::Excitatory => (params.w_food_excit, 0.0),
        Subsystem::Inhibitory => (0.0, params.w_pred_inhib),
    };
    let weights = [
        food,
        predator,
        learned.get(Feature::Tree, subsystem),
        learned.get(Feature::Rock, subsystem),
        learned.get(Feature::Sun, subsystem),
    ];
    weights
        .iter()
        .zip(percepts.activations())
        .fold(0.0, |acc, (w, a)| acc + w * a)
}

/// Caution above 1 makes the inhibitory activation grow without bound, and
/// caution grows with it. Activations, caution and learned weights saturate at
/// the largest finite value instead of overflowing.
pub const SATURATION: f64 = f64::MAX;

pub fn update_excitatory(s0_prev: f64, exploration: f64, net: f64, params: &Params) -> f64 {
    (params.k0 * (s0_prev + params.w_feedback * exploration + net)).clamp(0.0, SATURATION)
}

pub fn update_inhibitory(
    s1_prev: f64,
    exploration: f64,
    net: f64,
    k1: f64,
    params: &Params,
) -> f64 {
    (k1 * (s1_prev + params.w_feedback * exploration + net)).clamp(0.0, SATURATION)
}

/// Caution rises with the inhibitory activation and relaxes toward `k1_min`.
pub fn update_caution(k1_prev: f64, s1_new: f64, s1_prev: f64, params: &Params) -> f64 {
    (k1_prev + params.delta_caution * (s1_new - s1_prev)).clamp(params.k1_min, SATURATION)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(s0: f64, s1: f64) -> MotivationalState {
        MotivationalState { s0, s1, k1: 0.5 }
    }

    fn logistic(x: f64) -> f64 {
        1.0 / (1.0 + libm::exp(-x))
    }

    #[test]
    fn exploration_examples() {
        let p = Params::default();
        assert_eq!(compute_exploration(&state(0.9, 0.9), &p), 0.0);
        assert!((compute_exploration(&state(0.9, 0.0), &p) - 0.610639).abs() < 1e-6);
        assert!((compute_exploration(&state(2.0, 1.0), &p) - 0.622459).abs() < 1e-6);
        assert_eq!(compute_exploration(&state(0.9, 0.0), &p), logistic(0.45));
    }

    #[test]
    fn exploration_stays_inside_open_interval() {
        let p = Params::default();
        // Tiny margin: the logistic rounds to exactly 0.5.
        let e = compute_exploration(&state(1.0 + f64::EPSILON, 1.0), &p);
        assert!(e > 0.5 && e < 0.5 + 1e-15);
        // Huge margin: the logistic rounds to exactly 1.0.
        let e = compute_exploration(&state(500.0, 0.0), &p);
        assert!(e < 1.0 && e > 1.0 - 1e-15);
    }

    #[test]
    fn net_input_examples() {
        let p = Params::default();
        let w = AssociativeWeights::default();
        let food = Percepts {
            food: true,
            tree: true,
            ..Default::default()
        };
        assert_eq!(net_input(Subsystem::Excitatory, &food, &w, &p), -0.5);
        let pred = Percepts {
            predator: true,
            rock: true,
            ..Default::default()
        };
        assert_eq!(net_input(Subsystem::Inhibitory, &pred, &w, &p), 0.9);
        assert_eq!(
            net_input(Subsystem::Excitatory, &Percepts::default(), &w, &p),
            0.0
        );

        let mut learned = AssociativeWeights::default();
        learned.set(Feature::Rock, Subsystem::Inhibitory, 0.170);
        let rock = Percepts {
            rock: true,
            ..Default::default()
        };
        assert_eq!(net_input(Subsystem::Inhibitory, &rock, &learned, &p), 0.170);
        assert_eq!(net_input(Subsystem::Excitatory, &rock, &learned, &p), 0.0);
    }

    #[test]
    fn excitatory_examples() {
        let p = Params::default();
        assert!((update_excitatory(0.9, 0.0, 0.0, &p) - 0.945).abs() < 1e-12);
        assert!((update_excitatory(0.9, 0.6, 0.0, &p) - 0.882).abs() < 1e-12);
        assert!((update_excitatory(0.9, 0.0, -0.5, &p) - 0.42).abs() < 1e-12);
        assert_eq!(update_excitatory(0.1, 0.0, -0.5, &p), 0.0);
    }

    #[test]
    fn inhibitory_examples() {
        let p = Params::default();
        assert!((update_inhibitory(0.9, 0.0, 0.0, 0.5, &p) - 0.45).abs() < 1e-12);
        assert!((update_inhibitory(0.45, 0.0, 0.9, 0.5, &p) - 0.675).abs() < 1e-12);
        assert_eq!(update_inhibitory(0.0, 0.0, 0.0, 0.5, &p), 0.0);
    }

    #[test]
    fn caution_examples() {
        let p = Params::default();
        assert_eq!(update_caution(0.5, 0.7, 0.7, &p), 0.5);
        assert!((update_caution(0.5, 0.9, 0.45, &p) - 0.59).abs() < 1e-12);
        assert_eq!(update_caution(0.55, 0.5, 0.9, &p), 0.5);
    }

    #[test]
    fn runaway_caution_saturates() {
        let p = Params::default();
        let s1 = update_inhibitory(1e300, 0.0, 1e300, 1e300, &p);
        assert_eq!(s1, SATURATION);
        assert_eq!(update_caution(SATURATION, s1, 0.0, &p), SATURATION);
        assert_eq!(
            update_inhibitory(SATURATION, 0.0, SATURATION, SATURATION, &p),
            SATURATION
        );
        assert_eq!(
            update_caution(SATURATION, SATURATION, SATURATION, &p),
            SATURATION
        );
        assert_eq!(
            update_excitatory(SATURATION, 0.0, SATURATION, &p),
            SATURATION
        );
    }

    #[test]
    fn default_params_validate() {
        Params::default().validate().unwrap();
    }

    #[test]
    fn k1_init_below_floor_names_both_fields() {
        let p = Params {
            k1_init: 0.4,
            ..Params::default()
        };
        let msg = p.validate().unwrap_err().to_string();
        assert!(msg.contains("k1_init") && msg.contains("k1_min"), "{msg}");
    }

    #[test]
    fn sign_conventions_enforced() {
        for bad in [
            Params {
                w_excit_motor: -0.5,
                ..Params::default()
            },
            Params {
                w_inhib_motor: 0.5,
                ..Params::default()
            },
            Params {
                w_feedback: 0.1,
                ..Params::default()
            },
            Params {
                k0: 0.0,
                ..Params::default()
            },
            Params {
                eta: -0.01,
                ..Params::default()
            },
            Params {
                s0_init: f64::NAN,
                ..Params::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn threshold_equivalence(s0 in 0.0f64..10.0, s1 in 0.0f64..10.0) {
            let e = compute_exploration(&state(s0, s1), &Params::default());
            prop_assert_eq!(e == 0.0, s0 <= s1);
            prop_assert!(e == 0.0 || (e > 0.5 && e < 1.0));
        }

        #[test]
        fn exploration_monotone(s0 in 0.0f64..10.0, s1 in 0.0f64..10.0, d in 0.0f64..5.0) {
            let p = Params::default();
            let e = compute_exploration(&state(s0, s1), &p);
            prop_assert!(compute_exploration(&state(s0 + d, s1), &p) >= e);
            if s0 > s1 + d {
                prop_assert!(compute_exploration(&state(s0, s1 + d), &p) <= e);
            }
        }

        #[test]
        fn updates_non_negative(prev in 0.0f64..10.0, e in 0.0f64..1.0, net in -100.0f64..100.0, k1 in 0.5f64..2.0) {
            let p = Params::default();
            prop_assert!(update_excitatory(prev, e, net, &p) >= 0.0);
            prop_assert!(update_inhibitory(prev, e, net, k1, &p) >= 0.0);
        }

        #[test]
        fn caution_floor(k1 in 0.5f64..3.0, a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let p = Params::default();
            prop_assert!(update_caution(k1, a, b, &p) >= p.k1_min);
        }

        #[test]
        fn fatigue_strictly_decreasing(prev in 0.5f64..5.0, e1 in 0.5f64..0.99, gap in 0.01f64..0.4) {
            let p = Params::default();
            let e2 = (e1 + gap).min(0.999);
            prop_assume!(e2 > e1);
            prop_assert!(update_excitatory(prev, e2, 0.0, &p) < update_excitatory(prev, e1, 0.0, &p));
            prop_assert!(update_inhibitory(prev, e2, 0.0, 0.5, &p) < update_inhibitory(prev, e1, 0.0, 0.5, &p));
        }
    }

    #[test]
    fn geometric_regimes() {
        let p = Params::default();
        let mut s0 = 0.9;
        let mut s1 = 0.9;
        for _ in 0..20 {
            let n0 = update_excitatory(s0, 0.0, 0.0, &p);
            let n1 = update_inhibitory(s1, 0.0, 0.0, 0.5, &p);
            assert_eq!(n0, p.k0 * s0);
            assert_eq!(n1, 0.5 * s1);
            s0 = n0;
            s1 = n1;
        }
    }
}
