//! Keyword grammar for analyst utterances.
//!
//! Utterances are lowercased and split into words (letters, digits, `-`
//! and `_`). Intents are tried in this order and the first match wins:
//!
//! | # | intent             | matches when                                                         |
//! |---|--------------------|----------------------------------------------------------------------|
//! | 1 | `help`             | `help`, `commands`, `?`, or "what can you do"                        |
//! | 2 | `describe_event`   | describe/explain/detail(s)/inspect/focus/about/zoom + an event id    |
//! | 3 | `show_timeline`    | `timeline` or `chronology`, optionally "last N seconds/minutes/hours" |
//! | 4 | `set_palette`      | colour-blind/accessible words, or a colour word + default/normal/reset |
//! | 5 | `filter_events`    | clear/remove/reset filter, "all events", or filter/only/just + level, colour or type |
//! | 6 | `show_sensors_by`  | owner/flag/country/nation/partner words, or type/kind + sensor/icon/view |
//! | 7 | `unknown`          | anything else, including the empty utterance                          |
//!
//! The event id in `describe_event` is the word after `event`, otherwise the
//! last word after the trigger that contains a digit or a hyphen. Its
//! original casing is kept.

use alloc::string::String;
use alloc::vec::Vec;

use super::{EventFilter, Intent, SensorView, TimelineRange};
use crate::model::{BeliefLevel, Palette};

struct Word {
    lower: String,
    raw: String,
}

fn words(utterance: &str) -> Vec<Word> {
    utterance
        .split(|c: char| !(c.is_alphanumeric() || c == '-' || c == '_' || c == '?'))
        .flat_map(|w| {
            // a trailing question mark is punctuation, a lone one is a word
            let w = if w.len() > 1 { w.trim_matches('?') } else { w };
            let w = w.trim_matches('-');
            (!w.is_empty()).then(|| Word { lower: w.to_lowercase(), raw: String::from(w) })
        })
        .collect()
}

fn has(ws: &[Word], options: &[&str]) -> bool {
    ws.iter().any(|w| options.contains(&w.lower.as_str()))
}

fn has_phrase(ws: &[Word], phrase: &[&str]) -> bool {
    ws.windows(phrase.len())
        .any(|win| win.iter().zip(phrase).all(|(w, p)| w.lower == *p))
}

/// Pure mapping from an utterance to an intent.
pub fn interpret(utterance: &str) -> Intent {
    let ws = words(utterance);
    if ws.is_empty() {
        return Intent::Unknown(String::from(utterance));
    }
    help(&ws)
        .or_else(|| describe(&ws))
        .or_else(|| timeline(&ws))
        .or_else(|| palette(&ws))
        .or_else(|| filter(&ws))
        .or_else(|| sensors(&ws))
        .unwrap_or_else(|| Intent::Unknown(String::from(utterance)))
}

fn help(ws: &[Word]) -> Option<Intent> {
    (has(ws, &["help", "commands", "?"]) || has_phrase(ws, &["what", "can", "you", "do"]))
        .then_some(Intent::Help)
}

fn looks_like_id(w: &Word) -> bool {
    w.raw.chars().any(|c| c.is_ascii_digit() || c == '-')
}

const DESCRIBE: &[&str] = &[
    "describe", "explain", "detail", "details", "inspect", "focus", "about", "zoom",
];

fn describe(ws: &[Word]) -> Option<Intent> {
    let trigger = ws.iter().position(|w| DESCRIBE.contains(&w.lower.as_str()))?;
    let rest = &ws[trigger + 1..];
    let after_event = rest
        .iter()
        .position(|w| w.lower == "event")
        .and_then(|i| rest.get(i + 1))
        .filter(|w| !["on", "with", "id"].contains(&w.lower.as_str()));
    let id = after_event.or_else(|| rest.iter().rev().find(|w| looks_like_id(w)))?;
    Some(Intent::DescribeEvent(id.raw.clone()))
}

fn unit_ms(word: &str) -> Option<i64> {
    match word {
        "s" | "sec" | "secs" | "second" | "seconds" => Some(1_000),
        "min" | "mins" | "minute" | "minutes" => Some(60_000),
        "h" | "hr" | "hrs" | "hour" | "hours" => Some(3_600_000),
        _ => None,
    }
}

fn timeline(ws: &[Word]) -> Option<Intent> {
    if !has(ws, &["timeline", "chronology"]) {
        return None;
    }
    let last = ws.iter().position(|w| w.lower == "last" || w.lower == "past");
    let range = last
        .and_then(|i| {
            let next = ws.get(i + 1)?;
            if let Ok(n) = next.lower.parse::<i64>() {
                let unit = unit_ms(&ws.get(i + 2)?.lower)?;
                (n > 0).then_some(TimelineRange::Last { ms: n * unit })
            } else {
                unit_ms(&next.lower).map(|unit| TimelineRange::Last { ms: unit })
            }
        })
        .unwrap_or(TimelineRange::All);
    Some(Intent::ShowTimeline(range))
}

fn palette(ws: &[Word]) -> Option<Intent> {
    let accessible = has(
        ws,
        &[
            "colourblind", "colorblind", "colour-blind", "color-blind", "accessible",
            "accessibility", "deuteranopia", "protanopia", "tritanopia",
        ],
    ) || has_phrase(ws, &["colour", "blind"])
        || has_phrase(ws, &["color", "blind"]);
    if accessible {
        return Some(Intent::SetPalette(Palette::Accessible));
    }
    let colour_word = has(ws, &["palette", "colour", "color", "colours", "colors", "scheme"]);
    let default_word = has(ws, &["default", "normal", "standard", "original", "reset", "regular", "usual"]);
    (colour_word && default_word).then_some(Intent::SetPalette(Palette::Default))
}

fn level_word(w: &str) -> Option<BeliefLevel> {
    match w {
        "strong" | "red" | "high" => Some(BeliefLevel::Strong),
        "medium" | "amber" | "moderate" => Some(BeliefLevel::Medium),
        "weak" | "yellow" | "low" => Some(BeliefLevel::Weak),
        "insignificant" | "blue" => Some(BeliefLevel::NotSignificant),
        _ => None,
    }
}

const FILLER: &[&str] = &[
    "the", "a", "an", "by", "to", "on", "events", "event", "show", "me", "only", "just",
    "filter", "type", "of", "with", "for", "please", "level",
];

fn filter(ws: &[Word]) -> Option<Intent> {
    let clear = (has(ws, &["clear", "remove", "reset", "drop", "no"]) && has(ws, &["filter", "filters"]))
        || has(ws, &["unfilter"])
        || (has(ws, &["all", "every", "everything"]) && has(ws, &["events", "event"]));
    if clear {
        return Some(Intent::FilterEvents(None));
    }
    if !has(ws, &["filter", "only", "just"]) {
        return None;
    }
    if has_phrase(ws, &["not", "significant"]) {
        return Some(Intent::FilterEvents(Some(EventFilter::Level(BeliefLevel::NotSignificant))));
    }
    if let Some(l) = ws.iter().find_map(|w| level_word(&w.lower)) {
        return Some(Intent::FilterEvents(Some(EventFilter::Level(l))));
    }
    // "type X" names the event type explicitly; otherwise the first
    // non-filler word is taken as the type.
    let explicit = ws
        .iter()
        .position(|w| w.lower == "type")
        .and_then(|i| ws.get(i + 1))
        .filter(|w| !FILLER.contains(&w.lower.as_str()));
    let named = explicit.or_else(|| ws.iter().find(|w| !FILLER.contains(&w.lower.as_str())))?;
    Some(Intent::FilterEvents(Some(EventFilter::EventType(named.lower.clone()))))
}

fn sensors(ws: &[Word]) -> Option<Intent> {
    let owner = has(
        ws,
        &[
            "owner", "owners", "ownership", "owned", "flag", "flags", "country", "countries",
            "nation", "nations", "nationality", "partner", "partners", "coalition",
        ],
    );
    if owner {
        return Some(Intent::ShowSensorsBy(SensorView::Owner));
    }
    let kind = has(ws, &["type", "types", "kind", "kinds", "category", "categories", "modality"]);
    let context = has(ws, &["sensor", "sensors", "icon", "icons", "view", "glyphs", "markers"]);
    (kind && context).then_some(Intent::ShowSensorsBy(SensorView::Type))
}
