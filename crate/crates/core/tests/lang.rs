mod common;

use proptest::prelude::*;

use cspauto::automodels::{builtin_env, ATTACKER_SOURCE, GATEWAY_SOURCE};
use cspauto::lang::{self, DiagnosticKind, Diagnostics};

const WORDS: &[&str] = &[
    "channel", "set", "STOP", "SKIP", "P", "Q", "a", "b", "c", "x", "->", "[]", "|~|", "||", "|||", "[|", "|]", "[",
    "]", "(", ")", "{", "}", "..", ".", "!", "?", ":", ",", "=", "0", "1", "2", "\n", "-- note\n",
];

fn spans_inside(text: &str, diags: &Diagnostics) {
    assert!(!diags.0.is_empty());
    for d in &diags.0 {
        assert!(d.span.start <= d.span.end, "{d:?}");
        assert!(d.span.end <= text.len(), "{d:?} past {}", text.len());
        assert!(d.span.line >= 1 && d.span.column >= 1);
        let line = text[..d.span.start].matches('\n').count() + 1;
        assert_eq!(d.span.line as usize, line, "{d:?}");
    }
}

fn kinds(text: &str) -> Vec<DiagnosticKind> {
    lang::parse(text).unwrap_err().0.iter().map(|d| d.kind).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = lang::parse_bytes(&bytes);
    }

    #[test]
    fn arbitrary_text_reports_spans_inside_the_input(text in "\\PC{0,120}") {
        if let Err(d) = lang::parse(&text) {
            spans_inside(&text, &d);
        }
    }

    #[test]
    fn token_soup_reports_spans_inside_the_input(words in proptest::collection::vec(0..WORDS.len(), 0..60)) {
        let text = words.iter().map(|&i| WORDS[i]).collect::<Vec<_>>().join(" ");
        match lang::parse(&text) {
            Ok(env) => {
                let printed = lang::print(&env);
                prop_assert_eq!(lang::parse(&printed).unwrap(), env);
            }
            Err(d) => spans_inside(&text, &d),
        }
    }
}

#[test]
fn shipped_models_parse_to_the_builtin_environment() {
    let env = lang::parse(&format!("{GATEWAY_SOURCE}\n{ATTACKER_SOURCE}")).unwrap();
    assert_eq!(env, builtin_env());
    assert!(lang::parse(ATTACKER_SOURCE).is_err());
}

#[test]
fn deep_nesting_is_a_syntax_error() {
    let n = 10_000;
    let text = format!("P = {}STOP{}\n", "(".repeat(n), ")".repeat(n));
    assert_eq!(kinds(&text), [DiagnosticKind::SyntaxError]);
    let text = format!("channel a\nP = {}STOP\n", "a -> ".repeat(n));
    assert_eq!(kinds(&text), [DiagnosticKind::SyntaxError]);
}

#[test]
fn nesting_below_the_limit_parses_and_prints() {
    for text in [
        format!("channel a\nP = {}STOP\n", "a -> ".repeat(250)),
        format!("channel a\nP = {}STOP{}\n", "(a -> STOP [] ".repeat(80), ")".repeat(80)),
    ] {
        let env = lang::parse(&text).unwrap();
        let printed = lang::print(&env);
        assert_eq!(lang::parse(&printed).unwrap(), env);
    }
}

#[test]
fn resolution_errors_are_classified() {
    assert_eq!(kinds("P = a -> STOP\n"), [DiagnosticKind::UnknownChannel]);
    assert_eq!(kinds("channel c : {0..2}\nP = c -> STOP\n"), [DiagnosticKind::ArityMismatch]);
    assert_eq!(kinds("channel c : {0..2}\nP = c.7 -> STOP\n"), [DiagnosticKind::ValueOutOfDomain]);
    assert_eq!(kinds("channel a\nP = a -> Q\n"), [DiagnosticKind::UnboundReference]);
    assert_eq!(kinds("channel a\nP = Q\nQ = P [] a -> STOP\n"), [DiagnosticKind::UnguardedRecursion]);
    assert_eq!(kinds("channel a\nchannel a\n"), [DiagnosticKind::DuplicateDeclaration]);
    assert_eq!(kinds("channel c : Nope\n"), [DiagnosticKind::UnknownSet]);
}

#[test]
fn syntax_errors_recover_at_declarations() {
    let d = lang::parse("channel a\nP = a -> -> STOP\nQ = ( STOP\nR = a -> STOP\nS = a -> STOP\n").unwrap_err();
    assert_eq!(d.0.len(), 2);
    assert!(d.0.iter().all(|x| x.kind == DiagnosticKind::SyntaxError));
    assert_eq!((d.0[0].span.line, d.0[0].span.column), (2, 10));
    assert_eq!((d.0[1].span.line, d.0[1].span.column), (4, 1));
}

#[test]
fn invalid_utf8_points_at_the_byte() {
    let d = lang::parse_bytes(b"channel a\nP = \xff\n").unwrap_err();
    assert_eq!(d.0[0].kind, DiagnosticKind::SyntaxError);
    assert_eq!((d.0[0].span.line, d.0[0].span.column), (2, 5));
}

#[test]
fn random_environments_round_trip() {
    let mut r = common::rng(21);
    for _ in 0..200 {
        let env = common::EnvGen::data().env(&mut r);
        let text = lang::print(&env);
        assert_eq!(lang::parse(&text).unwrap(), env, "{text}");
    }
}
