//! Test cases read off the traces of an attack composition.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::automodels::{compose_attack, is_attacker_event, target_bus, AttackScenario, AutomodelsError, ThreatActor};
use crate::kernel::{build_lts, Event, KernelError, Limits, Lts, Value};
use crate::semantics::{accepts, traces_up_to, Trace};

pub const DEFAULT_DEPTH: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TestgenError {
    #[error("state space exceeds {max_states} states; raise the state limit")]
    Truncated { max_states: usize },
    #[error("event on `{channel}` has no component {index}")]
    ComponentOutOfRange { channel: String, index: usize },
    #[error(transparent)]
    Scenario(#[from] AutomodelsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// One stimulus sequence. Attacker events are injection points; the rest
/// are observations of the system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCase {
    pub id: String,
    pub scenario: String,
    pub actor: Option<ThreatActor>,
    pub events: Trace,
    pub attacker_events: Vec<Event>,
    pub target_buses: BTreeSet<String>,
}

impl TestCase {
    pub fn new(scenario: &str, actor: Option<ThreatActor>, events: Trace) -> Self {
        let attacker_events: Vec<Event> = events.events().iter().filter(|e| is_attacker_event(e)).cloned().collect();
        let target_buses = attacker_events
            .iter()
            .filter_map(|e| target_bus(e).map(str::to_string))
            .collect();
        TestCase {
            id: content_id(scenario, actor, &events),
            scenario: scenario.to_string(),
            actor,
            events,
            attacker_events,
            target_buses,
        }
    }
}

/// First 16 hex digits of a SHA-256 over scenario, actor and trace.
fn content_id(scenario: &str, actor: Option<ThreatActor>, events: &Trace) -> String {
    let mut h = Sha256::new();
    h.update(scenario.as_bytes());
    h.update([0]);
    h.update(actor.map_or("", ThreatActor::name).as_bytes());
    for e in events.events() {
        h.update([0]);
        h.update(e.to_string().as_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// State space of the composed scenario; refuses truncated spaces.
pub fn scenario_lts(scenario: &AttackScenario, limits: Limits) -> Result<Lts, TestgenError> {
    let term = compose_attack(scenario)?;
    let lts = build_lts(&term, &scenario.env, limits)?;
    if lts.is_truncated() {
        return Err(TestgenError::Truncated {
            max_states: limits.max_states,
        });
    }
    Ok(lts)
}

/// One test case per trace of length at most `depth` that exercises an
/// attacker capability, in canonical trace order.
pub fn generate_tests(
    scenario: &AttackScenario,
    depth: usize,
    maximal_only: bool,
    limits: Limits,
) -> Result<Vec<TestCase>, TestgenError> {
    let lts = scenario_lts(scenario, limits)?;
    Ok(tests_from_lts(scenario, &lts, depth, maximal_only))
}

pub fn tests_from_lts(scenario: &AttackScenario, lts: &Lts, depth: usize, maximal_only: bool) -> Vec<TestCase> {
    let kept: BTreeSet<Trace> = traces_up_to(lts, depth)
        .traces
        .into_iter()
        .filter(|t| t.events().iter().any(is_attacker_event))
        .collect();
    let selected: Vec<&Trace> = if maximal_only {
        kept.iter()
            .filter(|t| {
                !kept
                    .range::<Trace, _>((std::ops::Bound::Excluded(*t), std::ops::Bound::Unbounded))
                    .any(|u| t.is_prefix_of(u))
            })
            .collect()
    } else {
        kept.iter().collect()
    };
    selected
        .into_iter()
        .map(|t| TestCase::new(&scenario.name, scenario.actor, t.clone()))
        .collect()
}

/// Variants of `tc` with component `index` of every `channel` event
/// replaced by each of `values`. Variants the scenario cannot perform are
/// dropped.
pub fn enumerate_payload_variants(
    tc: &TestCase,
    scenario: &AttackScenario,
    channel: &str,
    index: usize,
    values: &[Value],
    limits: Limits,
) -> Result<Vec<TestCase>, TestgenError> {
    for e in tc.events.events() {
        if e.channel() == Some(channel) && e.components().len() <= index {
            return Err(TestgenError::ComponentOutOfRange {
                channel: channel.to_string(),
                index,
            });
        }
    }
    let lts = scenario_lts(scenario, limits)?;
    let mut out = Vec::new();
    for v in values {
        let events: Vec<Event> = tc
            .events
            .events()
            .iter()
            .map(|e| match e {
                Event::Visible {
                    channel: c,
                    components,
                } if c == channel => {
                    let mut components = components.clone();
                    components[index] = v.clone();
                    Event::visible(c.clone(), components)
                }
                other => other.clone(),
            })
            .collect();
        let trace = Trace::new(events);
        if accepts(&lts, &trace) {
            out.push(TestCase::new(&tc.scenario, tc.actor, trace));
        }
    }
    Ok(out)
}
