use core::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Degree of belief that something significant is happening.
///
/// Ordered `NotSignificant < Weak < Medium < Strong`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefLevel {
    NotSignificant,
    Weak,
    Medium,
    Strong,
}

impl BeliefLevel {
    pub const ALL: [BeliefLevel; 4] = [
        BeliefLevel::NotSignificant,
        BeliefLevel::Weak,
        BeliefLevel::Medium,
        BeliefLevel::Strong,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BeliefLevel::NotSignificant => "not_significant",
            BeliefLevel::Weak => "weak",
            BeliefLevel::Medium => "medium",
            BeliefLevel::Strong => "strong",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        BeliefLevel::ALL.into_iter().find(|l| l.as_str() == s)
    }

    /// Marker colour under the given palette, as a `#RRGGBB` string.
    pub fn colour(self, palette: Palette) -> &'static str {
        match (palette, self) {
            (Palette::Default, BeliefLevel::Strong) => "#FF0000",
            (Palette::Default, BeliefLevel::Medium) => "#FFBF00",
            (Palette::Default, BeliefLevel::Weak) => "#FFFF00",
            (Palette::Default, BeliefLevel::NotSignificant) => "#0000FF",
            (Palette::Accessible, BeliefLevel::Strong) => "#D55E00",
            (Palette::Accessible, BeliefLevel::Medium) => "#E69F00",
            (Palette::Accessible, BeliefLevel::Weak) => "#F0E442",
            (Palette::Accessible, BeliefLevel::NotSignificant) => "#0072B2",
        }
    }

    /// Human name of the default colour (red, amber, yellow, blue).
    pub fn colour_name(self) -> &'static str {
        match self {
            BeliefLevel::Strong => "red",
            BeliefLevel::Medium => "amber",
            BeliefLevel::Weak => "yellow",
            BeliefLevel::NotSignificant => "blue",
        }
    }
}

impl fmt::Display for BeliefLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Colour palette for belief markers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    #[default]
    Default,
    /// Colour-blind friendly variants.
    Accessible,
}

impl Palette {
    pub fn as_str(self) -> &'static str {
        match self {
            Palette::Default => "default",
            Palette::Accessible => "accessible",
        }
    }
}

/// Lower-bound-inclusive probability thresholds for belief levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefThresholds {
    pub strong: f64,
    pub medium: f64,
    pub weak: f64,
}

impl Default for BeliefThresholds {
    fn default() -> Self {
        BeliefThresholds { strong: 0.8, medium: 0.5, weak: 0.2 }
    }
}

impl BeliefThresholds {
    pub fn new(strong: f64, medium: f64, weak: f64) -> Result<Self, Error> {
        let t = BeliefThresholds { strong, medium, weak };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let BeliefThresholds { strong, medium, weak } = *self;
        if 0.0 < weak && weak < medium && medium < strong && strong <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidThresholds { strong, medium, weak })
        }
    }
}

fn check_probability(p: f64) -> Result<(), Error> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

/// Map a probability onto a belief level.
pub fn classify_belief(p: f64, thresholds: &BeliefThresholds) -> Result<BeliefLevel, Error> {
    check_probability(p)?;
    thresholds.validate()?;
    Ok(if p >= thresholds.strong {
        BeliefLevel::Strong
    } else if p >= thresholds.medium {
        BeliefLevel::Medium
    } else if p >= thresholds.weak {
        BeliefLevel::Weak
    } else {
        BeliefLevel::NotSignificant
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn level(p: f64) -> BeliefLevel {
        classify_belief(p, &BeliefThresholds::default()).unwrap()
    }

    #[test]
    fn default_threshold_examples() {
        assert_eq!(level(0.0), BeliefLevel::NotSignificant);
        assert_eq!(level(1.0), BeliefLevel::Strong);
        assert_eq!(level(0.5), BeliefLevel::Medium);
        assert_eq!(level(0.4999), BeliefLevel::Weak);
        assert_eq!(level(0.8), BeliefLevel::Strong);
        assert_eq!(level(0.2), BeliefLevel::Weak);
        assert_eq!(level(0.1999), BeliefLevel::NotSignificant);
    }

    #[test]
    fn rejects_bad_inputs() {
        let t = BeliefThresholds::default();
        assert!(matches!(classify_belief(1.2, &t), Err(Error::ProbabilityOutOfRange(_))));
        assert!(classify_belief(-0.01, &t).is_err());
        assert!(classify_belief(f64::NAN, &t).is_err());
        let bad = BeliefThresholds { strong: 0.5, medium: 0.5, weak: 0.2 };
        assert!(matches!(classify_belief(0.3, &bad), Err(Error::InvalidThresholds { .. })));
        assert!(BeliefThresholds::new(1.1, 0.5, 0.2).is_err());
        assert!(BeliefThresholds::new(0.8, 0.5, 0.0).is_err());
        assert!(BeliefThresholds::new(1.0, 0.5, 0.01).is_ok());
    }

    #[test]
    fn every_level_has_two_colours() {
        for l in BeliefLevel::ALL {
            let a = l.colour(Palette::Default);
            let b = l.colour(Palette::Accessible);
            assert_eq!(a.len(), 7);
            assert_eq!(b.len(), 7);
            assert_ne!(a, b);
        }
        assert_eq!(BeliefLevel::Strong.colour(Palette::Accessible), "#D55E00");
        assert_eq!(BeliefLevel::NotSignificant.colour(Palette::Accessible), "#0072B2");
    }

    #[test]
    fn level_names_round_trip() {
        for l in BeliefLevel::ALL {
            assert_eq!(BeliefLevel::parse(l.as_str()), Some(l));
            let json = serde_json::to_string(&l).unwrap();
            assert_eq!(json, alloc::format!("\"{}\"", l.as_str()));
        }
    }

    proptest! {
        #[test]
        fn monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(level(lo) <= level(hi));
        }

        #[test]
        fn palette_never_changes_level(p in 0.0f64..=1.0) {
            // Levels depend only on the probability; palettes only pick colours.
            let l = level(p);
            for palette in [Palette::Default, Palette::Accessible] {
                let colour = l.colour(palette);
                let back = BeliefLevel::ALL.into_iter().find(|x| x.colour(palette) == colour);
                prop_assert_eq!(back, Some(l));
            }
        }
    }
}
