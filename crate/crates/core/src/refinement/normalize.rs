use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::kernel::{Event, EventSet, Lts, StateId};
use crate::semantics::{minimal_antichain, moves_from, tau_closure};

use super::{Model, RefinementError};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormNode {
    /// Tau-closed set of specification states this node stands for.
    pub members: BTreeSet<StateId>,
    /// Non-tau events offered by some member.
    pub initials: BTreeSet<Event>,
    /// Minimal acceptance sets: visible initials of the stable members.
    /// Only populated for the failures model.
    pub acceptances: Vec<EventSet>,
    pub successors: BTreeMap<Event, NodeId>,
}

/// Deterministic, tau-free view of a specification, rooted at node 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedSpec {
    pub model: Model,
    pub nodes: Vec<NormNode>,
}

impl NormalizedSpec {
    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &NormNode {
        &self.nodes[id]
    }
}

/// Tau-closure plus subset construction, numbering nodes breadth-first in
/// canonical event order.
pub fn normalize(lts: &Lts, model: Model) -> Result<NormalizedSpec, RefinementError> {
    if lts.is_truncated() {
        return Err(RefinementError::SpecTruncated);
    }
    let root = tau_closure(lts, [lts.initial()]);
    let mut index: HashMap<BTreeSet<StateId>, NodeId> = HashMap::from([(root.clone(), 0)]);
    let mut nodes = vec![new_node(lts, root, model)];
    let mut queue = VecDeque::from([0]);
    while let Some(id) = queue.pop_front() {
        let moves = moves_from(lts, &nodes[id].members);
        for (event, targets) in moves {
            let target = match index.get(&targets) {
                Some(&t) => t,
                None => {
                    let t = nodes.len();
                    index.insert(targets.clone(), t);
                    nodes.push(new_node(lts, targets, model));
                    queue.push_back(t);
                    t
                }
            };
            nodes[id].successors.insert(event, target);
        }
    }
    Ok(NormalizedSpec { model, nodes })
}

fn new_node(lts: &Lts, members: BTreeSet<StateId>, model: Model) -> NormNode {
    let initials = members.iter().flat_map(|&s| lts.initials(s)).collect();
    let acceptances = match model {
        Model::Traces => Vec::new(),
        Model::Failures => minimal_antichain(
            members
                .iter()
                .filter(|&&s| lts.is_stable(s))
                .map(|&s| lts.initials(s).into_iter().filter(Event::is_visible).collect()),
        ),
    };
    NormNode {
        members,
        initials,
        acceptances,
        successors: BTreeMap::new(),
    }
}
