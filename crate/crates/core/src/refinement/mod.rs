//! Traces and stable-failures refinement with shortest counterexamples.
//!
//! The specification is normalised; the implementation is explored on the
//! fly as tau-closed state sets, so every trace corresponds to exactly one
//! product pair. Breadth-first search in canonical event order visits
//! traces shortest first and lexicographically least among equals, which
//! makes the first violation found the canonical witness.

mod normalize;

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::kernel::{Event, EventSet, Lts, StateId};
use crate::semantics::{after, maximal_refusal, moves_from, refusals_after, tau_closure, Trace};

pub use normalize::{normalize, NodeId, NormNode, NormalizedSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Traces,
    Failures,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RefinementError {
    #[error("specification state space is truncated")]
    SpecTruncated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The implementation can perform `event` after `witness`; the
    /// specification cannot.
    FailsTraces { witness: Trace, event: Event },
    /// After `witness` the implementation can refuse `refusal`; the
    /// specification cannot.
    FailsFailures { witness: Trace, refusal: EventSet },
    /// After `witness` the process can reach a state with no transitions
    /// that was not entered by termination.
    Deadlocks { witness: Trace },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }
}

fn fmt_set(set: &EventSet) -> String {
    let items: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::FailsTraces { witness, event } => {
                write!(f, "fails (traces): after {witness} the implementation performs {event}")
            }
            Verdict::FailsFailures { witness, refusal } => write!(
                f,
                "fails (failures): after {witness} the implementation refuses {}",
                fmt_set(refusal)
            ),
            Verdict::Deadlocks { witness } => write!(f, "deadlocks after {witness}"),
            Verdict::Inconclusive { reason } => write!(f, "inconclusive: {reason}"),
        }
    }
}

fn truncation(spec: &Lts, implementation: &Lts) -> Option<Verdict> {
    let which = match (spec.is_truncated(), implementation.is_truncated()) {
        (false, false) => return None,
        (true, false) => "specification",
        (false, true) => "implementation",
        (true, true) => "specification and implementation",
    };
    Some(Verdict::Inconclusive {
        reason: format!("{which} state space truncated by exploration limits"),
    })
}

/// Default refusal universe: every visible event either system can perform.
pub fn default_sigma(spec: &Lts, implementation: &Lts) -> EventSet {
    let mut sigma = spec.visible_events();
    sigma.extend(implementation.visible_events());
    sigma
}

/// `spec ⊑T implementation`.
pub fn check_traces_refinement(spec: &Lts, implementation: &Lts) -> Verdict {
    check(spec, implementation, Model::Traces, &EventSet::new())
}

/// `spec ⊑F implementation` over the refusal universe `sigma`.
pub fn check_failures_refinement(spec: &Lts, implementation: &Lts, sigma: &EventSet) -> Verdict {
    check(spec, implementation, Model::Failures, sigma)
}

pub fn check_refinement(spec: &Lts, implementation: &Lts, model: Model, sigma: &EventSet) -> Verdict {
    check(spec, implementation, model, sigma)
}

fn check(spec: &Lts, implementation: &Lts, model: Model, sigma: &EventSet) -> Verdict {
    if let Some(v) = truncation(spec, implementation) {
        return v;
    }
    let norm = match normalize(spec, model) {
        Ok(n) => n,
        Err(e) => return Verdict::Inconclusive { reason: e.to_string() },
    };

    let start = tau_closure(implementation, [implementation.initial()]);
    let mut visited: HashSet<(BTreeSet<StateId>, NodeId)> = HashSet::new();
    visited.insert((start.clone(), norm.root()));
    let mut queue = VecDeque::from([(Trace::empty(), start, norm.root())]);

    while let Some((trace, states, node_id)) = queue.pop_front() {
        let node = norm.node(node_id);
        let moves = moves_from(implementation, &states);

        if let Some(event) = moves.keys().find(|e| !node.successors.contains_key(*e)) {
            return Verdict::FailsTraces {
                witness: trace,
                event: event.clone(),
            };
        }

        if model == Model::Failures {
            let violation = states
                .iter()
                .filter(|&&s| implementation.is_stable(s))
                .filter(|&&s| {
                    let offered = implementation.initials(s);
                    !node
                        .acceptances
                        .iter()
                        .any(|acc| acc.iter().filter(|e| sigma.contains(*e)).all(|e| offered.contains(e)))
                })
                .map(|&s| maximal_refusal(implementation, s, sigma))
                .min();
            if let Some(refusal) = violation {
                return Verdict::FailsFailures {
                    witness: trace,
                    refusal,
                };
            }
        }

        for (event, targets) in moves {
            let spec_next = node.successors[&event];
            if visited.insert((targets.clone(), spec_next)) {
                queue.push_back((trace.extended(event), targets, spec_next));
            }
        }
    }
    Verdict::Holds
}

/// Holds when no reachable stable state is stuck, except states entered
/// by a tick.
pub fn deadlock_free(lts: &Lts) -> Verdict {
    if lts.is_truncated() {
        return Verdict::Inconclusive {
            reason: "state space truncated by exploration limits".into(),
        };
    }
    let start = tau_closure(lts, [lts.initial()]);
    let mut visited = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(Trace::empty(), start)]);
    while let Some((trace, states)) = queue.pop_front() {
        if states.iter().any(|&s| lts.successors(s).is_empty()) {
            return Verdict::Deadlocks { witness: trace };
        }
        for (event, targets) in moves_from(lts, &states) {
            if event == Event::Tick {
                continue;
            }
            if visited.insert(targets.clone()) {
                queue.push_back((trace.extended(event), targets));
            }
        }
    }
    Verdict::Holds
}

/// Re-runs a counterexample against both systems and confirms it exhibits
/// the violation it claims. `Holds` and `Inconclusive` trivially replay.
pub fn witness_replays(spec: &Lts, implementation: &Lts, sigma: &EventSet, verdict: &Verdict) -> bool {
    match verdict {
        Verdict::Holds | Verdict::Inconclusive { .. } => true,
        Verdict::FailsTraces { witness, event } => {
            let t = witness.extended(event.clone());
            after(implementation, &t).is_some() && after(spec, &t).is_none()
        }
        Verdict::FailsFailures { witness, refusal } => {
            let Ok(imp) = refusals_after(implementation, witness, sigma) else {
                return false;
            };
            let spec_refuses = refusals_after(spec, witness, sigma).is_ok_and(|r| r.contains(refusal));
            imp.contains(refusal) && !spec_refuses
        }
        Verdict::Deadlocks { witness } => after(implementation, witness)
            .is_some_and(|states| states.iter().any(|&s| implementation.successors(s).is_empty())),
    }
}
