//! Trace, refusal and stable-failure semantics read off an [`Lts`].
//!
//! Refusal universes are an explicit `sigma` parameter and never contain
//! tick. Truncated systems still produce results, flagged as lower bounds.

mod trace;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kernel::{Event, EventSet, Lts, StateId};

pub use trace::Trace;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("{0} is not a trace of the process")]
    TraceNotFound(Trace),
}

/// Tau-closure of a set of states.
pub fn tau_closure(lts: &Lts, states: impl IntoIterator<Item = StateId>) -> BTreeSet<StateId> {
    let mut closed: BTreeSet<StateId> = BTreeSet::new();
    let mut stack: Vec<StateId> = states.into_iter().collect();
    while let Some(s) = stack.pop() {
        if closed.insert(s) {
            stack.extend(
                lts.successors(s)
                    .iter()
                    .filter(|t| t.event == Event::Tau)
                    .map(|t| t.target),
            );
        }
    }
    closed
}

/// Tau-closed successor set of `from` under the non-tau `event`.
pub fn step_set(lts: &Lts, from: &BTreeSet<StateId>, event: &Event) -> BTreeSet<StateId> {
    let direct = from.iter().flat_map(|&s| {
        lts.successors(s)
            .iter()
            .filter(move |t| t.event == *event)
            .map(|t| t.target)
    });
    tau_closure(lts, direct.collect::<Vec<_>>())
}

/// Non-tau events offered by some member of `states`, grouped with their
/// tau-closed successor sets, in canonical event order.
pub fn moves_from(lts: &Lts, states: &BTreeSet<StateId>) -> BTreeMap<Event, BTreeSet<StateId>> {
    let mut direct: BTreeMap<Event, Vec<StateId>> = BTreeMap::new();
    for &s in states {
        for t in lts.successors(s) {
            if t.event != Event::Tau {
                direct.entry(t.event.clone()).or_default().push(t.target);
            }
        }
    }
    direct
        .into_iter()
        .map(|(e, targets)| (e, tau_closure(lts, targets)))
        .collect()
}

/// States the process may be in after `trace`; `None` if it is not a trace.
pub fn after(lts: &Lts, trace: &Trace) -> Option<BTreeSet<StateId>> {
    let mut current = tau_closure(lts, [lts.initial()]);
    for event in trace.events() {
        current = step_set(lts, &current, event);
        if current.is_empty() {
            return None;
        }
    }
    Some(current)
}

pub fn accepts(lts: &Lts, trace: &Trace) -> bool {
    after(lts, trace).is_some()
}

/// A bounded trace set; `truncated` marks it as a lower bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    pub traces: BTreeSet<Trace>,
    pub truncated: bool,
}

/// All traces of length at most `depth`, in canonical order.
pub fn traces_up_to(lts: &Lts, depth: usize) -> TraceSet {
    let mut traces = BTreeSet::from([Trace::empty()]);
    let mut frontier = vec![(Trace::empty(), tau_closure(lts, [lts.initial()]))];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (trace, states) in frontier {
            for (event, targets) in moves_from(lts, &states) {
                let extended = trace.extended(event.clone());
                traces.insert(extended.clone());
                if event != Event::Tick {
                    next.push((extended, targets));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    TraceSet {
        traces,
        truncated: lts.is_truncated(),
    }
}

/// Keeps only the maximal sets (no member strictly contained in another),
/// sorted and deduplicated.
pub fn maximal_antichain(sets: impl IntoIterator<Item = EventSet>) -> Vec<EventSet> {
    let all: BTreeSet<EventSet> = sets.into_iter().collect();
    all.iter()
        .filter(|s| !all.iter().any(|o| o != *s && s.is_subset(o)))
        .cloned()
        .collect()
}

/// Keeps only the minimal sets, sorted and deduplicated.
pub fn minimal_antichain(sets: impl IntoIterator<Item = EventSet>) -> Vec<EventSet> {
    let all: BTreeSet<EventSet> = sets.into_iter().collect();
    all.iter()
        .filter(|s| !all.iter().any(|o| o != *s && o.is_subset(s)))
        .cloned()
        .collect()
}

/// Visible initials of `state` restricted to `sigma`, subtracted from `sigma`.
pub fn maximal_refusal(lts: &Lts, state: StateId, sigma: &EventSet) -> EventSet {
    let initials = lts.initials(state);
    sigma.difference(&initials).cloned().collect()
}

/// A subset-closed family of refusals, stored by its maximal elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefusalSet {
    sigma: EventSet,
    maximal: Vec<EventSet>,
}

impl RefusalSet {
    pub fn from_maximal(sigma: EventSet, maximal: impl IntoIterator<Item = EventSet>) -> Self {
        let mut maximal = maximal_antichain(maximal);
        if maximal.is_empty() {
            maximal.push(EventSet::new());
        }
        RefusalSet { sigma, maximal }
    }

    pub fn maximal(&self) -> &[EventSet] {
        &self.maximal
    }

    pub fn sigma(&self) -> &EventSet {
        &self.sigma
    }

    pub fn contains(&self, refusal: &EventSet) -> bool {
        refusal.is_subset(&self.sigma) && self.maximal.iter().any(|m| refusal.is_subset(m))
    }

    /// The explicit subset-closed family. Exponential in the size of the
    /// maximal sets; meant for small universes.
    pub fn members(&self) -> BTreeSet<EventSet> {
        let mut out = BTreeSet::new();
        for m in &self.maximal {
            let items: Vec<&Event> = m.iter().collect();
            for mask in 0u64..(1u64 << items.len()) {
                out.insert(
                    items
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, e)| (*e).clone())
                        .collect(),
                );
            }
        }
        out
    }
}

/// Refusals of the process after `trace`: the union over the stable states
/// it may be in of everything those states refuse.
pub fn refusals_after(lts: &Lts, trace: &Trace, sigma: &EventSet) -> Result<RefusalSet, SemanticsError> {
    let states = after(lts, trace).ok_or_else(|| SemanticsError::TraceNotFound(trace.clone()))?;
    let maximal = states
        .into_iter()
        .filter(|&s| lts.is_stable(s))
        .map(|s| maximal_refusal(lts, s, sigma));
    Ok(RefusalSet::from_maximal(sigma.clone(), maximal))
}

/// Stable failures up to a trace length, stored as maximal refusals per trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureSet {
    pub failures: BTreeMap<Trace, Vec<EventSet>>,
    pub truncated: bool,
}

impl FailureSet {
    /// Subset-closed membership: `(trace, refusal)` is a failure when some
    /// recorded maximal refusal for `trace` contains `refusal`.
    pub fn contains(&self, trace: &Trace, refusal: &EventSet) -> bool {
        self.failures
            .get(trace)
            .is_some_and(|ms| ms.iter().any(|m| refusal.is_subset(m)))
    }

    /// Flattened `(trace, maximal refusal)` pairs in canonical order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Trace, &EventSet)> {
        self.failures.iter().flat_map(|(t, ms)| ms.iter().map(move |m| (t, m)))
    }
}

pub fn failures_up_to(lts: &Lts, depth: usize, sigma: &EventSet) -> FailureSet {
    let mut failures: BTreeMap<Trace, Vec<EventSet>> = BTreeMap::new();
    let mut record = |trace: &Trace, states: &BTreeSet<StateId>| {
        let refusals: Vec<EventSet> = states
            .iter()
            .filter(|&&s| lts.is_stable(s))
            .map(|&s| maximal_refusal(lts, s, sigma))
            .collect();
        if !refusals.is_empty() {
            failures.insert(trace.clone(), maximal_antichain(refusals));
        }
    };
    let mut frontier = vec![(Trace::empty(), tau_closure(lts, [lts.initial()]))];
    record(&Trace::empty(), &frontier[0].1);
    for _ in 0..depth {
        let mut next = Vec::new();
        for (trace, states) in frontier {
            for (event, targets) in moves_from(lts, &states) {
                let extended = trace.extended(event.clone());
                record(&extended, &targets);
                if event != Event::Tick {
                    next.push((extended, targets));
                }
            }
        }
        frontier = next;
    }
    FailureSet {
        failures,
        truncated: lts.is_truncated(),
    }
}

/// No tau anywhere and no label leading to two different states.
pub fn is_deterministic(lts: &Lts) -> bool {
    (0..lts.state_count()).all(|s| {
        let succ = lts.successors(s);
        succ.iter().all(|t| t.event != Event::Tau)
            && succ
                .windows(2)
                .all(|w| w[0].event != w[1].event || w[0].target == w[1].target)
    })
}
