use std::collections::{BTreeMap, VecDeque};

use super::env::Environment;
use super::KernelError;

/// Checks that every recursion passes through a prefix before re-entering
/// a definition. On failure reports a shortest cycle of unguarded
/// references, starting from the earliest-declared name on it.
pub fn check_guarded(env: &Environment) -> Result<(), KernelError> {
    let mut graph: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (name, body) in &env.definitions {
        for r in body.references() {
            if !env.definitions.contains_key(&r) {
                return Err(KernelError::UnboundReference(r));
            }
        }
        graph.insert(name, body.unguarded_references().into_iter().collect());
    }

    let mut best: Option<Vec<String>> = None;
    for name in env.definitions.keys() {
        if let Some(cycle) = shortest_cycle_through(&graph, name) {
            if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                best = Some(cycle);
            }
        }
    }
    match best {
        Some(cycle) => Err(KernelError::UnguardedRecursion(cycle)),
        None => Ok(()),
    }
}

fn shortest_cycle_through(graph: &BTreeMap<&str, Vec<String>>, start: &str) -> Option<Vec<String>> {
    let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        for next in &graph[node] {
            if next == start {
                let mut path = vec![node.to_string()];
                let mut cur = node;
                while cur != start {
                    cur = parent[cur];
                    path.push(cur.to_string());
                }
                path.reverse();
                return Some(path);
            }
            if !parent.contains_key(next.as_str()) {
                parent.insert(next, node);
                queue.push_back(next);
            }
        }
    }
    None
}
