//! XML and CAPL-style serialisation of test suites.

use std::fmt::Write as _;

use thiserror::Error;

use crate::automodels::{is_attacker_event, ThreatActor};
use crate::kernel::{is_lower_ident, Event, Value};
use crate::testgen::TestCase;

pub const GENERATOR: &str = "cspauto";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Channel name used for the termination event in emitted steps.
pub const TICK_CHANNEL: &str = "_tick";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteMeta {
    pub scenario: String,
    pub actor: Option<ThreatActor>,
}

impl SuiteMeta {
    fn actor_name(&self) -> &str {
        self.actor.map_or("none", ThreatActor::name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Inject,
    Observe,
}

impl Role {
    pub fn of(event: &Event) -> Role {
        if is_attacker_event(event) {
            Role::Inject
        } else {
            Role::Observe
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Inject => "inject",
            Role::Observe => "observe",
        }
    }
}

fn channel_of(event: &Event) -> &str {
    match event {
        Event::Tick => TICK_CHANNEL,
        other => other.channel().unwrap_or("_tau"),
    }
}

fn args_of(event: &Event) -> String {
    event
        .components()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn emit_xml(suite: &[TestCase], meta: &SuiteMeta) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<testsuite scenario=\"{}\" actor=\"{}\" generator=\"{GENERATOR}\" version=\"{VERSION}\">",
        escape(&meta.scenario),
        escape(meta.actor_name()),
    );
    for tc in suite {
        let _ = writeln!(out, "  <testcase id=\"{}\">", escape(&tc.id));
        for (index, event) in tc.events.events().iter().enumerate() {
            let _ = writeln!(
                out,
                "    <step index=\"{index}\" role=\"{}\" channel=\"{}\" args=\"{}\"/>",
                Role::of(event).as_str(),
                escape(channel_of(event)),
                escape(&args_of(event)),
            );
        }
        out.push_str("  </testcase>\n");
    }
    out.push_str("</testsuite>\n");
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("malformed XML: {0}")]
    Malformed(String),
    #[error("schema violation: {0}")]
    Schema(String),
}

/// A test suite document read back from XML.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteDocument {
    pub scenario: String,
    pub actor: Option<String>,
    pub version: String,
    pub cases: Vec<(String, Vec<Event>)>,
}

fn schema(msg: impl Into<String>) -> EmitError {
    EmitError::Schema(msg.into())
}

fn attributes<'a>(node: roxmltree::Node<'a, '_>, expected: &[&str]) -> Result<Vec<&'a str>, EmitError> {
    let names: Vec<&str> = node.attributes().map(|a| a.name()).collect();
    if names != expected {
        return Err(schema(format!(
            "<{}> has attributes {names:?}, expected {expected:?}",
            node.tag_name().name()
        )));
    }
    Ok(node.attributes().map(|a| a.value()).collect())
}

fn elements<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &str) -> Result<Vec<roxmltree::Node<'a, 'i>>, EmitError> {
    let mut out = Vec::new();
    for child in node.children() {
        if child.is_element() {
            if child.tag_name().name() != name || child.tag_name().namespace().is_some() {
                return Err(schema(format!("unexpected element <{}>", child.tag_name().name())));
            }
            out.push(child);
        } else if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
            return Err(schema("unexpected text content"));
        }
    }
    Ok(out)
}

fn step_event(channel: &str, args: &str) -> Result<Event, EmitError> {
    if channel == TICK_CHANNEL {
        return if args.is_empty() {
            Ok(Event::Tick)
        } else {
            Err(schema("termination step carries arguments"))
        };
    }
    if !is_lower_ident(channel) {
        return Err(schema(format!("invalid channel `{channel}`")));
    }
    let components: Option<Vec<Value>> = if args.is_empty() {
        Some(Vec::new())
    } else {
        args.split(',').map(Value::parse).collect()
    };
    components
        .map(|c| Event::visible(channel, c))
        .ok_or_else(|| schema(format!("invalid args `{args}`")))
}

/// Checks a document against the test suite schema and reads it back.
pub fn validate_xml(text: &str) -> Result<SuiteDocument, EmitError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| EmitError::Malformed(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "testsuite" || root.tag_name().namespace().is_some() {
        return Err(schema("root element must be <testsuite>"));
    }
    let attrs = attributes(root, &["scenario", "actor", "generator", "version"])?;
    if attrs[2] != GENERATOR {
        return Err(schema(format!("unknown generator `{}`", attrs[2])));
    }
    let mut cases = Vec::new();
    for tc in elements(root, "testcase")? {
        let id = attributes(tc, &["id"])?[0].to_string();
        let mut events = Vec::new();
        for (i, step) in elements(tc, "step")?.into_iter().enumerate() {
            let a = attributes(step, &["index", "role", "channel", "args"])?;
            if a[0] != i.to_string() {
                return Err(schema(format!("step index `{}` out of sequence in test case {id}", a[0])));
            }
            let event = step_event(a[2], a[3])?;
            if Role::of(&event).as_str() != a[1] {
                return Err(schema(format!("step {i} of {id} has role `{}`", a[1])));
            }
            if !elements(step, "")?.is_empty() {
                return Err(schema("step elements must be empty"));
            }
            events.push(event);
        }
        cases.push((id, events));
    }
    Ok(SuiteDocument {
        scenario: attrs[0].to_string(),
        actor: (attrs[1] != "none").then(|| attrs[1].to_string()),
        version: attrs[3].to_string(),
        cases,
    })
}

pub fn emit_capl(suite: &[TestCase], meta: &SuiteMeta) -> String {
    let mut out = String::new();
    out.push_str("/*\n");
    let _ = writeln!(out, " * scenario:   {}", ascii(&meta.scenario));
    let _ = writeln!(out, " * actor:      {}", ascii(meta.actor_name()));
    let _ = writeln!(out, " * generator:  {GENERATOR} {VERSION}");
    let _ = writeln!(out, " * test cases: {}", suite.len());
    out.push_str(" */\n");
    for tc in suite {
        let _ = write!(out, "\ntestcase testcase_{}()\n{{\n", ascii(&tc.id));
        for (i, event) in tc.events.events().iter().enumerate() {
            let channel = ascii(channel_of(event));
            let args = ascii(&args_of(event));
            match Role::of(event) {
                Role::Inject => {
                    let _ = writeln!(out, "  output(msg_{channel}); // step {i}: inject {channel}({args})");
                }
                Role::Observe => {
                    let _ = writeln!(
                        out,
                        "  testWaitForMessage(msg_{channel}, TIMEOUT_MS); // step {i}: observe {channel}({args})"
                    );
                }
            }
        }
        out.push_str("}\n");
    }
    out
}

/// Replaces anything outside printable ASCII.
fn ascii(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_graphic() || c == ' ' { c } else { '?' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Trace;

    fn meta() -> SuiteMeta {
        SuiteMeta {
            scenario: "attack1".into(),
            actor: None,
        }
    }

    fn spoof_case() -> TestCase {
        TestCase::new("attack1", None, Trace::new(vec![Event::parse("spoofing.engine_cu.2").unwrap()]))
    }

    #[test]
    fn empty_suite_xml() {
        let text = emit_xml(&[], &meta());
        assert_eq!(
            text,
            format!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
                 <testsuite scenario=\"attack1\" actor=\"none\" generator=\"cspauto\" version=\"{VERSION}\">\n\
                 </testsuite>\n"
            )
        );
        let doc = validate_xml(&text).unwrap();
        assert!(doc.cases.is_empty());
        assert_eq!(doc.actor, None);
    }

    #[test]
    fn single_spoof_step() {
        let tc = spoof_case();
        let text = emit_xml(std::slice::from_ref(&tc), &meta());
        assert!(text.contains(r#"<step index="0" role="inject" channel="spoofing" args="engine_cu,2"/>"#));
        let doc = validate_xml(&text).unwrap();
        assert_eq!(doc.cases, vec![(tc.id.clone(), tc.events.events().to_vec())]);
    }

    #[test]
    fn observe_and_tick_round_trip() {
        let tc = TestCase::new(
            "x",
            Some(ThreatActor::Thief),
            Trace::new(vec![Event::named("gateway_canhs1"), Event::Tick]),
        );
        let m = SuiteMeta {
            scenario: "a<b&\"c\"".into(),
            actor: Some(ThreatActor::Thief),
        };
        let text = emit_xml(std::slice::from_ref(&tc), &m);
        assert!(text.contains(r#"role="observe" channel="_tick" args="""#));
        let doc = validate_xml(&text).unwrap();
        assert_eq!(doc.scenario, m.scenario);
        assert_eq!(doc.actor.as_deref(), Some("Thief"));
        assert_eq!(doc.cases[0].1, tc.events.events());
    }

    #[test]
    fn schema_violations_are_reported() {
        assert!(matches!(validate_xml("<testsuite"), Err(EmitError::Malformed(_))));
        assert!(matches!(validate_xml("<suite/>"), Err(EmitError::Schema(_))));
        let bad_order = r#"<testsuite actor="none" scenario="s" generator="cspauto" version="1"/>"#;
        assert!(matches!(validate_xml(bad_order), Err(EmitError::Schema(_))));
        let bad_role = r#"<testsuite scenario="s" actor="none" generator="cspauto" version="1">
            <testcase id="x"><step index="0" role="observe" channel="spoofing" args="engine_cu,2"/></testcase>
            </testsuite>"#;
        assert!(matches!(validate_xml(bad_role), Err(EmitError::Schema(_))));
        let bad_index = r#"<testsuite scenario="s" actor="none" generator="cspauto" version="1">
            <testcase id="x"><step index="1" role="observe" channel="a" args=""/></testcase>
            </testsuite>"#;
        assert!(matches!(validate_xml(bad_index), Err(EmitError::Schema(_))));
    }

    #[test]
    fn capl_layout() {
        let empty = emit_capl(&[], &meta());
        assert!(empty.starts_with("/*\n") && empty.ends_with(" */\n"));
        assert!(!empty.contains("testcase"));
        let tc = spoof_case();
        let text = emit_capl(std::slice::from_ref(&tc), &meta());
        assert_eq!(text.matches("testcase testcase_").count(), 1);
        assert_eq!(text.matches("output(msg_spoofing)").count(), 1);
        assert!(text.ends_with("}\n"));
        assert!(text.is_ascii());
        assert_eq!(text, emit_capl(std::slice::from_ref(&tc), &meta()));
    }
}
