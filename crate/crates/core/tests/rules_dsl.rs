mod support;

use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use proptest::test_runner::Config;
use support::{any_ruleset, respace};
use sue_core::rules::{format_rules, parse_rules, Diagnostic};

proptest! {
    #![proptest_config(Config { cases: 1000, failure_persistence: None, ..Config::default() })]

    #[test]
    fn parse_inverts_format(rules in any_ruleset()) {
        let text = format_rules(&rules);
        let back = parse_rules(&text).map_err(|d| TestCaseError::fail(format!("{d:?}\n{text}")))?;
        prop_assert_eq!(&back, &rules);
        prop_assert_eq!(format_rules(&back), text);
    }
}

proptest! {
    #![proptest_config(Config { cases: 300, failure_persistence: None, ..Config::default() })]

    #[test]
    fn layout_and_comments_do_not_matter(
        (rules, text) in any_ruleset().prop_flat_map(|r| {
            let t = format_rules(&r);
            (Just(r), respace(&t))
        })
    ) {
        prop_assert_eq!(parse_rules(&text).unwrap(), rules);
    }
}

/// Expected diagnostics live in `# expect LINE:COL message` comment lines.
pub fn expected_diagnostics(source: &str) -> Vec<Diagnostic> {
    source
        .lines()
        .filter_map(|l| l.strip_prefix("# expect "))
        .map(|rest| {
            let (pos, message) = rest.split_once(' ').unwrap();
            let (line, column) = pos.split_once(':').unwrap();
            Diagnostic::new(line.parse().unwrap(), column.parse().unwrap(), message)
        })
        .collect()
}

#[test]
fn malformed_fixtures_report_positions() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/rules");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("rules") {
            continue;
        }
        let source = fs::read_to_string(&path).unwrap();
        let expected = expected_diagnostics(&source);
        assert!(!expected.is_empty(), "{} has no expectations", path.display());
        let got = parse_rules(&source).expect_err(&path.display().to_string());
        assert_eq!(got, expected, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 8);
}
