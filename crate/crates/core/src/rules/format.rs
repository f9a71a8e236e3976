use alloc::string::String;
use core::fmt::Write;

use super::{Rule, RuleSet};

/// Canonical source for a rule set; `parse_rules` reads it back unchanged.
pub fn format_rules(rules: &RuleSet) -> String {
    let mut out = String::new();
    for f in &rules.fluents {
        let _ = writeln!(out, "fluent {f}");
    }
    if !rules.fluents.is_empty() && !rules.rules.is_empty() {
        out.push('\n');
    }
    for r in &rules.rules {
        out.push_str(&format_rule(r));
        out.push('\n');
    }
    out
}

/// One rule on a single line, as shown in proof traces.
pub fn format_rule(rule: &Rule) -> String {
    let mut out = String::new();
    let _ = write!(out, "{} {} when ", rule.kind.keyword(), rule.fluent);
    for (i, p) in rule.patterns.iter().enumerate() {
        if i > 0 {
            out.push_str(" and ");
        }
        out.push_str(&p.event_type);
        let mut constraints = alloc::vec::Vec::new();
        if p.min_confidence > 0.0 {
            constraints.push(alloc::format!("confidence >= {}", p.min_confidence));
        }
        if let Some(m) = p.modality {
            constraints.push(alloc::format!("modality = {}", m.as_str()));
        }
        if !constraints.is_empty() {
            let _ = write!(out, "({})", constraints.join(", "));
        }
    }
    if let Some(w) = rule.window {
        if w.within_ms % 1_000 == 0 {
            let _ = write!(out, " within {}s", w.within_ms / 1_000);
        } else {
            let _ = write!(out, " within {}ms", w.within_ms);
        }
        let _ = write!(out, ", {}m", w.within_m);
    }
    out
}
