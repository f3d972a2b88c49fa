use std::collections::{BTreeSet, HashMap, VecDeque};

use super::env::Environment;
use super::event::Event;
use super::step::step;
use super::term::Term;
use super::KernelError;

pub type StateId = usize;

/// Exploration bounds for [`build_lts`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Limits {
    pub const DEFAULT_MAX_STATES: usize = 100_000;
    pub const DEFAULT_MAX_DEPTH: usize = 1_000;
    /// States nested deeper than this are not explored.
    pub const MAX_TERM_DEPTH: usize = 256;
    /// States with more term nodes than this are not explored.
    pub const MAX_TERM_SIZE: usize = 10_000;
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_states: Self::DEFAULT_MAX_STATES,
            max_depth: Self::DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub source: StateId,
    pub event: Event,
    pub target: StateId,
}

/// An explicit labelled transition system whose states are canonical terms.
///
/// Transitions are grouped by source state; within a source they are in
/// canonical (event, target term) order.
#[derive(Clone, Debug)]
pub struct Lts {
    initial: StateId,
    states: Vec<Term>,
    transitions: Vec<Transition>,
    offsets: Vec<usize>,
    truncated: bool,
}

impl Lts {
    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, id: StateId) -> &Term {
        &self.states[id]
    }

    pub fn states(&self) -> &[Term] {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn successors(&self, state: StateId) -> &[Transition] {
        &self.transitions[self.offsets[state]..self.offsets[state + 1]]
    }

    /// A state is stable when it has no outgoing tau.
    pub fn is_stable(&self, state: StateId) -> bool {
        self.successors(state).iter().all(|t| t.event != Event::Tau)
    }

    /// Non-tau events offered by `state`.
    pub fn initials(&self, state: StateId) -> BTreeSet<Event> {
        self.successors(state)
            .iter()
            .filter(|t| t.event != Event::Tau)
            .map(|t| t.event.clone())
            .collect()
    }

    /// Visible events labelling some transition.
    pub fn visible_events(&self) -> BTreeSet<Event> {
        self.transitions
            .iter()
            .filter(|t| t.event.is_visible())
            .map(|t| t.event.clone())
            .collect()
    }

    /// True when both systems have the same numbering and transition lists.
    /// Construction is canonical, so this is isomorphism for systems built
    /// from structurally equal inputs.
    pub fn same_shape(&self, other: &Lts) -> bool {
        self.initial == other.initial
            && self.states.len() == other.states.len()
            && self.transitions == other.transitions
            && self.truncated == other.truncated
    }
}

/// Breadth-first expansion of `term`. States are deduplicated by structural
/// term identity and numbered in discovery order.
pub fn build_lts(term: &Term, env: &Environment, limits: Limits) -> Result<Lts, KernelError> {
    let mut index: HashMap<Term, StateId> = HashMap::new();
    let mut states: Vec<Term> = vec![term.clone()];
    let mut depth: Vec<usize> = vec![0];
    index.insert(term.clone(), 0);

    let mut per_state: Vec<Vec<Transition>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;

    while let Some(source) = queue.pop_front() {
        let moves = step(&states[source], env)?;
        if per_state.len() <= source {
            per_state.resize_with(source + 1, Vec::new);
        }
        if depth[source] >= limits.max_depth {
            if !moves.is_empty() {
                truncated = true;
            }
            continue;
        }
        let mut out = Vec::with_capacity(moves.len());
        for (event, target_term) in moves {
            let target = match index.get(&target_term) {
                Some(&id) => id,
                None => {
                    if states.len() >= limits.max_states
                        || !target_term.within_bounds(Limits::MAX_TERM_DEPTH, Limits::MAX_TERM_SIZE)
                    {
                        truncated = true;
                        continue;
                    }
                    let id = states.len();
                    index.insert(target_term.clone(), id);
                    states.push(target_term);
                    depth.push(depth[source] + 1);
                    queue.push_back(id);
                    id
                }
            };
            out.push(Transition {
                source,
                event,
                target,
            });
        }
        per_state[source] = out;
    }
    per_state.resize_with(states.len(), Vec::new);

    let mut offsets = Vec::with_capacity(states.len() + 1);
    let mut transitions = Vec::new();
    offsets.push(0);
    for ts in per_state {
        transitions.extend(ts);
        offsets.push(transitions.len());
    }
    Ok(Lts {
        initial: 0,
        states,
        transitions,
        offsets,
        truncated,
    })
}
