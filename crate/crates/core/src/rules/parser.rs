use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::{describe, tokenize, Token, TokenKind};
use super::{Diagnostic, EventPattern, Rule, RuleKind, RuleSet, Window};
use crate::model::Modality;

pub(crate) const KEYWORDS: &[&str] = &[
    "fluent", "initiate", "terminate", "when", "and", "within", "confidence", "modality",
];

/// Parses `.sue-rules` source into a validated [`RuleSet`].
///
/// Grammar:
///
/// ```text
/// ruleset     := (fluent_decl | rule)*
/// fluent_decl := "fluent" IDENT
/// rule        := ("initiate" | "terminate") IDENT "when" pattern ("and" pattern)* window?
/// pattern     := IDENT ("(" constraint ("," constraint)* ")")?
/// constraint  := "confidence" ">=" NUMBER | "modality" "=" IDENT
/// window      := "within" DURATION "," DISTANCE
/// DURATION    := NUMBER ("ms" | "s" | "m")      -- "m" is minutes here
/// DISTANCE    := NUMBER ("m" | "km")            -- "m" is meters here
/// ```
///
/// Newlines are ordinary whitespace and `#` starts a comment. Parsing is
/// all-or-nothing: any diagnostic means no rule set.
pub fn parse_rules(source: &str) -> Result<RuleSet, Vec<Diagnostic>> {
    let (tokens, mut diags) = tokenize(source);
    let mut parser = Parser { tokens, pos: 0, diags: Vec::new(), attempted: BTreeSet::new() };
    let items = parser.items();
    diags.append(&mut parser.diags);

    let mut fluents: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut rules = Vec::new();
    let mut rule_sites = Vec::new();
    for item in items {
        match item {
            Item::Fluent { name, line, column } => {
                if fluents.contains_key(&name) {
                    diags.push(Diagnostic::new(line, column, format!("duplicate fluent '{name}'")));
                } else {
                    fluents.insert(name, (line, column));
                }
            }
            Item::Rule { rule, fluent_at } => {
                rule_sites.push(fluent_at);
                rules.push(rule);
            }
        }
    }
    for (rule, &(line, column)) in rules.iter().zip(&rule_sites) {
        if !fluents.contains_key(&rule.fluent) {
            diags.push(Diagnostic::new(line, column, format!("undeclared fluent '{}'", rule.fluent)));
        }
    }
    for (name, &(line, column)) in &fluents {
        // a malformed initiate rule already has its own diagnostic
        let initiated = parser.attempted.contains(name)
            || rules.iter().any(|r| r.kind == RuleKind::Initiates && &r.fluent == name);
        if !initiated {
            diags.push(Diagnostic::new(line, column, format!("fluent '{name}' has no initiate rule")));
        }
    }

    if diags.is_empty() {
        Ok(RuleSet { fluents: fluents.into_keys().collect(), rules })
    } else {
        diags.sort_by_key(|d| (d.line, d.column));
        Err(diags)
    }
}

enum Item {
    Fluent { name: String, line: usize, column: usize },
    Rule { rule: Rule, fluent_at: (usize, usize) },
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    /// Fluents named by an initiate rule, including rules that failed to parse.
    attempted: BTreeSet<String>,
}

type Parsed<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw)
    }

    fn error_here(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::new(t.line, t.column, format!("expected {expected}, found {}", describe(&t.kind)))
    }

    fn expect_keyword(&mut self, kw: &str) -> Parsed<()> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(&format!("'{kw}'")))
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Parsed<()> {
        if self.peek().kind == kind {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(&describe(&kind)))
        }
    }

    /// A non-keyword identifier, with its position.
    fn ident(&mut self, what: &str) -> Parsed<(String, usize, usize)> {
        let t = self.peek().clone();
        match t.kind {
            TokenKind::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok((s, t.line, t.column))
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn number(&mut self, what: &str) -> Parsed<(f64, usize, usize)> {
        let t = self.peek().clone();
        match t.kind {
            TokenKind::Number(n) => {
                self.bump();
                Ok((n, t.line, t.column))
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn unit(&mut self, allowed: &[&str], what: &str) -> Parsed<String> {
        match &self.peek().kind {
            TokenKind::Ident(s) if allowed.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn items(&mut self) -> Vec<Item> {
        let mut items = Vec::new();
        loop {
            let start = self.pos;
            let result = if self.at_keyword("fluent") {
                self.fluent_decl()
            } else if self.at_keyword("initiate") || self.at_keyword("terminate") {
                self.rule()
            } else if self.peek().kind == TokenKind::Eof {
                break;
            } else {
                Err(self.error_here("'fluent', 'initiate' or 'terminate'"))
            };
            match result {
                Ok(item) => items.push(item),
                Err(d) => {
                    self.diags.push(d);
                    if self.pos == start {
                        self.bump();
                    }
                    self.recover();
                }
            }
        }
        items
    }

    /// Skips to the start of the next declaration.
    fn recover(&mut self) {
        while self.peek().kind != TokenKind::Eof
            && !["fluent", "initiate", "terminate"].iter().any(|k| self.at_keyword(k))
        {
            self.bump();
        }
    }

    fn fluent_decl(&mut self) -> Parsed<Item> {
        self.expect_keyword("fluent")?;
        let (name, line, column) = self.ident("fluent name")?;
        Ok(Item::Fluent { name, line, column })
    }

    fn rule(&mut self) -> Parsed<Item> {
        let start = self.peek().clone();
        let kind = if self.at_keyword("initiate") { RuleKind::Initiates } else { RuleKind::Terminates };
        self.bump();
        let (fluent, line, column) = self.ident("fluent name")?;
        if kind == RuleKind::Initiates {
            self.attempted.insert(fluent.clone());
        }
        self.expect_keyword("when")?;
        let mut patterns = alloc::vec![self.pattern()?];
        while self.at_keyword("and") {
            self.bump();
            patterns.push(self.pattern()?);
        }
        let window = if self.at_keyword("within") { Some(self.window()?) } else { None };
        if patterns.len() > 1 && window.is_none() {
            return Err(Diagnostic::new(
                start.line,
                start.column,
                "conjunction requires a window ('within DURATION, DISTANCE')",
            ));
        }
        Ok(Item::Rule {
            rule: Rule { kind, fluent, patterns, window },
            fluent_at: (line, column),
        })
    }

    fn pattern(&mut self) -> Parsed<EventPattern> {
        let (event_type, _, _) = self.ident("event type")?;
        let mut pattern = EventPattern::new(event_type);
        if self.peek().kind != TokenKind::LParen {
            return Ok(pattern);
        }
        self.bump();
        loop {
            if self.at_keyword("confidence") {
                self.bump();
                self.expect(TokenKind::Ge)?;
                let (c, line, column) = self.number("confidence threshold")?;
                if !(0.0..=1.0).contains(&c) {
                    return Err(Diagnostic::new(line, column, "confidence out of range [0, 1]"));
                }
                pattern.min_confidence = c;
            } else if self.at_keyword("modality") {
                self.bump();
                self.expect(TokenKind::Eq)?;
                let t = self.peek().clone();
                let name = match &t.kind {
                    TokenKind::Ident(s) => s.clone(),
                    _ => return Err(self.error_here("modality name")),
                };
                let m = Modality::parse(&name).ok_or_else(|| {
                    Diagnostic::new(t.line, t.column, format!("unknown modality '{name}'"))
                })?;
                self.bump();
                pattern.modality = Some(m);
            } else {
                return Err(self.error_here("'confidence' or 'modality'"));
            }
            if self.peek().kind == TokenKind::Comma {
                self.bump();
                continue;
            }
            self.expect(TokenKind::RParen)?;
            return Ok(pattern);
        }
    }

    fn window(&mut self) -> Parsed<Window> {
        self.expect_keyword("within")?;
        let (d, dl, dc) = self.number("duration")?;
        let unit = self.unit(&["ms", "s", "m"], "duration unit ('ms', 's' or 'm')")?;
        let factor = match unit.as_str() {
            "ms" => 1.0,
            "s" => 1_000.0,
            _ => 60_000.0,
        };
        let ms = d * factor;
        let whole = libm::round(ms);
        if libm::fabs(ms - whole) > 1e-6 {
            return Err(Diagnostic::new(dl, dc, "duration must be a whole number of milliseconds"));
        }
        if whole <= 0.0 {
            return Err(Diagnostic::new(dl, dc, "window duration must be positive"));
        }
        self.expect(TokenKind::Comma)?;
        let (dist, ml, mc) = self.number("distance")?;
        let unit = self.unit(&["m", "km"], "distance unit ('m' or 'km')")?;
        let within_m = if unit == "km" { dist * 1_000.0 } else { dist };
        if !(within_m > 0.0 && within_m.is_finite()) {
            return Err(Diagnostic::new(ml, mc, "window distance must be positive"));
        }
        Ok(Window { within_ms: whole as u64, within_m })
    }
}
