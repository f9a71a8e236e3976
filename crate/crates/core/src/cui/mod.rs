//! Deterministic conversational command interpreter.
//!
//! [`interpret`] turns an utterance into an [`Intent`] with no regard to
//! session state; [`execute`] applies it to a [`Session`] and produces the
//! reply text plus exactly one [`UiDirective`] for the console.

mod grammar;

use alloc::format;
use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use grammar::interpret;

use crate::analytics::{EventDetail, RunStore};
use crate::model::{BeliefLevel, Palette};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorView {
    #[default]
    Type,
    Owner,
}

impl SensorView {
    pub fn as_str(self) -> &'static str {
        match self {
            SensorView::Type => "type",
            SensorView::Owner => "owner",
        }
    }

    pub fn toggled(self) -> Self {
        match self {
            SensorView::Type => SensorView::Owner,
            SensorView::Owner => SensorView::Type,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "by", content = "value", rename_all = "snake_case")]
pub enum EventFilter {
    Level(BeliefLevel),
    EventType(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "range", rename_all = "lowercase")]
pub enum TimelineRange {
    All,
    /// The most recent `ms` milliseconds.
    Last { ms: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "arg", rename_all = "snake_case")]
pub enum Intent {
    ShowSensorsBy(SensorView),
    SetPalette(Palette),
    /// `None` clears the filter.
    FilterEvents(Option<EventFilter>),
    DescribeEvent(String),
    ShowTimeline(TimelineRange),
    Help,
    /// Carries the raw utterance.
    Unknown(String),
}

/// Compact form used by the fixture corpus, e.g. `show_sensors_by(owner)`.
impl fmt::Display for Intent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Intent::ShowSensorsBy(v) => write!(f, "show_sensors_by({})", v.as_str()),
            Intent::SetPalette(p) => write!(f, "set_palette({})", p.as_str()),
            Intent::FilterEvents(None) => f.write_str("filter_events(none)"),
            Intent::FilterEvents(Some(EventFilter::Level(l))) => write!(f, "filter_events(level={l})"),
            Intent::FilterEvents(Some(EventFilter::EventType(t))) => write!(f, "filter_events(type={t})"),
            Intent::DescribeEvent(id) => write!(f, "describe_event({id})"),
            Intent::ShowTimeline(TimelineRange::All) => f.write_str("show_timeline(all)"),
            Intent::ShowTimeline(TimelineRange::Last { ms }) => write!(f, "show_timeline(last={ms})"),
            Intent::Help => f.write_str("help"),
            Intent::Unknown(_) => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum UiDirective {
    SetSensorView { view: SensorView },
    SetPalette { palette: Palette },
    SetFilter { filter: Option<EventFilter> },
    FocusEvent { id: String },
    ShowTimeline { range: TimelineRange },
    None,
}

/// Console view state owned by the server, one per console connection.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub sensor_view: SensorView,
    pub palette: Palette,
    pub filter: Option<EventFilter>,
    pub focused_event: Option<String>,
}

impl Session {
    /// Applies a directive to the view state; `None` and timelines leave it as is.
    pub fn apply(&mut self, directive: &UiDirective) {
        match directive {
            UiDirective::SetSensorView { view } => self.sensor_view = *view,
            UiDirective::SetPalette { palette } => self.palette = *palette,
            UiDirective::SetFilter { filter } => self.filter = filter.clone(),
            UiDirective::FocusEvent { id } => self.focused_event = Some(id.clone()),
            UiDirective::ShowTimeline { .. } | UiDirective::None => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reply {
    pub reply: String,
    pub directive: UiDirective,
}

pub const HELP_TEXT: &str = "You can ask me to: show sensors by type or by owner; \
switch to the accessible (colour-blind) or default palette; \
show only strong/medium/weak events or only events of a type, or clear the filter; \
describe an event by id; show the timeline (optionally for the last N minutes).";

fn level_name(l: BeliefLevel) -> &'static str {
    match l {
        BeliefLevel::NotSignificant => "not significant",
        other => other.as_str(),
    }
}

/// Executes an intent against the session, consulting the run store for
/// event details.
pub fn execute(intent: &Intent, session: &mut Session, store: &RunStore) -> Reply {
    let (reply, directive) = match intent {
        Intent::ShowSensorsBy(view) => (
            format!("Showing sensors by {}.", view.as_str()),
            UiDirective::SetSensorView { view: *view },
        ),
        Intent::SetPalette(palette) => (
            format!("Switched to the {} colour palette.", palette.as_str()),
            UiDirective::SetPalette { palette: *palette },
        ),
        Intent::FilterEvents(filter) => {
            let reply = match filter {
                None => String::from("Showing all events."),
                Some(EventFilter::Level(l)) => format!("Showing only {} events.", level_name(*l)),
                Some(EventFilter::EventType(t)) => format!("Showing only {t} events."),
            };
            (reply, UiDirective::SetFilter { filter: filter.clone() })
        }
        Intent::DescribeEvent(id) => match store.event_detail(id) {
            Ok(detail) => (describe(&detail), UiDirective::FocusEvent { id: id.clone() }),
            Err(_) => (format!("There is no such event: {id}."), UiDirective::None),
        },
        Intent::ShowTimeline(range) => {
            let reply = match range {
                TimelineRange::All => String::from("Showing the event timeline."),
                TimelineRange::Last { ms } => format!("Showing the event timeline for the last {} s.", ms / 1_000),
            };
            (reply, UiDirective::ShowTimeline { range: *range })
        }
        Intent::Help => (String::from(HELP_TEXT), UiDirective::None),
        Intent::Unknown(raw) => (
            format!("Sorry, I did not understand \"{raw}\". Say \"help\" to see what I can do."),
            UiDirective::None,
        ),
    };
    session.apply(&directive);
    Reply { reply, directive }
}

fn describe(detail: &EventDetail) -> String {
    match detail {
        EventDetail::Simple { event, sensor } => {
            let owner = sensor.as_ref().map(|s| s.owner.as_str()).unwrap_or("unknown");
            format!(
                "Event {}: {} detected by sensor {} ({}) with confidence {:.2}.",
                event.id, event.event_type, event.sensor_id, owner, event.confidence
            )
        }
        EventDetail::Complex { event, constituents, .. } => format!(
            "Complex event {}: {} with probability {:.2} ({}), from {} simple events.",
            event.id,
            event.fluent,
            event.probability,
            level_name(event.belief),
            constituents.len()
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paper_commands() {
        assert_eq!(interpret("show sensors by owner"), Intent::ShowSensorsBy(SensorView::Owner));
        assert_eq!(interpret("Show sensors by type"), Intent::ShowSensorsBy(SensorView::Type));
        assert_eq!(interpret("use colourblind colours"), Intent::SetPalette(Palette::Accessible));
    }

    #[test]
    fn empty_is_unknown() {
        assert_eq!(interpret(""), Intent::Unknown(String::new()));
        assert_eq!(interpret("   "), Intent::Unknown(String::from("   ")));
    }

    #[test]
    fn describe_keeps_id_case() {
        assert_eq!(interpret("describe event ev-17"), Intent::DescribeEvent("ev-17".into()));
        assert_eq!(interpret("Explain CE-Shooting-1"), Intent::DescribeEvent("CE-Shooting-1".into()));
    }

    #[test]
    fn execute_templates() {
        let store = RunStore::default();
        let mut s = Session::default();
        let r = execute(&Intent::ShowSensorsBy(SensorView::Owner), &mut s, &store);
        assert_eq!(r.reply, "Showing sensors by owner.");
        assert_eq!(r.directive, UiDirective::SetSensorView { view: SensorView::Owner });
        assert_eq!(s.sensor_view, SensorView::Owner);

        let r = execute(&Intent::SetPalette(Palette::Accessible), &mut s, &store);
        assert_eq!(r.directive, UiDirective::SetPalette { palette: Palette::Accessible });
        assert_eq!(s.palette, Palette::Accessible);

        let r = execute(&interpret("frobnicate"), &mut s, &store);
        assert!(r.reply.contains("help"));
        assert_eq!(r.directive, UiDirective::None);
    }

    #[test]
    fn describing_a_missing_event() {
        let mut s = Session::default();
        let before = s.clone();
        let r = execute(&Intent::DescribeEvent("ev-404".into()), &mut s, &RunStore::default());
        assert!(r.reply.to_lowercase().contains("no such event"));
        assert_eq!(r.directive, UiDirective::None);
        assert_eq!(s, before);
    }

    #[test]
    fn directives_serialize_with_op_tags() {
        let d = UiDirective::SetSensorView { view: SensorView::Owner };
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"op":"set_sensor_view","view":"owner"}"#);
        assert_eq!(serde_json::to_string(&UiDirective::None).unwrap(), r#"{"op":"none"}"#);
    }

    fn session() -> impl Strategy<Value = Session> {
        (any::<bool>(), any::<bool>(), proptest::option::of("[a-z]{1,6}")).prop_map(|(o, a, f)| Session {
            sensor_view: if o { SensorView::Owner } else { SensorView::Type },
            palette: if a { Palette::Accessible } else { Palette::Default },
            filter: f.map(EventFilter::EventType),
            focused_event: None,
        })
    }

    proptest! {
        #[test]
        fn interpret_is_pure(u in "[a-z -]{0,30}") {
            prop_assert_eq!(interpret(&u), interpret(&u));
        }

        #[test]
        fn view_toggle_is_an_involution(start in session()) {
            let store = RunStore::default();
            let mut s = start.clone();
            let away = Intent::ShowSensorsBy(start.sensor_view.toggled());
            let back = Intent::ShowSensorsBy(start.sensor_view);
            execute(&away, &mut s, &store);
            prop_assert_ne!(s.sensor_view, start.sensor_view);
            execute(&back, &mut s, &store);
            prop_assert_eq!(s, start);
        }
    }
}
