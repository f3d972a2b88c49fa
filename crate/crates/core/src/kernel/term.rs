use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::event::{Event, Value};

/// A shared, immutable process term. Structural equality is state identity.
pub type Term = Arc<Process>;

/// A set of visible events, used for synchronisation sets and alphabets.
pub type EventSet = BTreeSet<Event>;

/// A data component in an event pattern: either ground or an input variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Value(Value),
    Var(String),
}

/// One field after the channel name in a prefix.
///
/// `c.x` and `c!x` both become [`Field::Out`]; `c?x:S` becomes [`Field::In`],
/// which binds `x` in the remaining fields and in the continuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Out(Component),
    In { var: String, domain: Vec<Value> },
}

/// CSP process terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Stop,
    Skip,
    /// Event prefix; with any [`Field::In`] this is an input prefix.
    Prefix {
        channel: String,
        fields: Vec<Field>,
        cont: Term,
    },
    ExtChoice(Term, Term),
    IntChoice(Term, Term),
    SyncParallel(Term, Term),
    GenParallel {
        left: Term,
        sync: Arc<EventSet>,
        right: Term,
    },
    AlphaParallel {
        left: Term,
        left_alpha: Arc<EventSet>,
        right_alpha: Arc<EventSet>,
        right: Term,
    },
    Interleave(Term, Term),
    Ref(String),
}

impl Process {
    pub fn stop() -> Term {
        Arc::new(Process::Stop)
    }

    pub fn skip() -> Term {
        Arc::new(Process::Skip)
    }

    pub fn reference(name: impl Into<String>) -> Term {
        Arc::new(Process::Ref(name.into()))
    }

    /// Ground prefix `event -> cont`. Panics on tau/tick.
    pub fn prefix(event: Event, cont: Term) -> Term {
        match event {
            Event::Visible {
                channel,
                components,
            } => Arc::new(Process::Prefix {
                channel,
                fields: components
                    .into_iter()
                    .map(|v| Field::Out(Component::Value(v)))
                    .collect(),
                cont,
            }),
            other => panic!("cannot prefix with {other}"),
        }
    }

    pub fn prefix_fields(channel: impl Into<String>, fields: Vec<Field>, cont: Term) -> Term {
        Arc::new(Process::Prefix {
            channel: channel.into(),
            fields,
            cont,
        })
    }

    pub fn ext_choice(left: Term, right: Term) -> Term {
        Arc::new(Process::ExtChoice(left, right))
    }

    pub fn int_choice(left: Term, right: Term) -> Term {
        Arc::new(Process::IntChoice(left, right))
    }

    pub fn sync_parallel(left: Term, right: Term) -> Term {
        Arc::new(Process::SyncParallel(left, right))
    }

    pub fn gen_parallel(left: Term, sync: EventSet, right: Term) -> Term {
        Arc::new(Process::GenParallel {
            left,
            sync: Arc::new(sync),
            right,
        })
    }

    pub fn alpha_parallel(
        left: Term,
        left_alpha: EventSet,
        right_alpha: EventSet,
        right: Term,
    ) -> Term {
        Arc::new(Process::AlphaParallel {
            left,
            left_alpha: Arc::new(left_alpha),
            right_alpha: Arc::new(right_alpha),
            right,
        })
    }

    pub fn interleave(left: Term, right: Term) -> Term {
        Arc::new(Process::Interleave(left, right))
    }

    /// Indexed external choice, expanded to a right-nested binary chain.
    /// The empty choice is `STOP`.
    pub fn ext_choice_all(branches: impl IntoIterator<Item = Term>) -> Term {
        fold_right(branches.into_iter().collect(), Process::ext_choice).unwrap_or_else(Process::stop)
    }

    /// Indexed internal choice; `None` for an empty index set.
    pub fn int_choice_all(branches: impl IntoIterator<Item = Term>) -> Option<Term> {
        fold_right(branches.into_iter().collect(), Process::int_choice)
    }

    /// Names of processes referenced anywhere in the term.
    pub fn references(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_refs(&mut out, false);
        out
    }

    /// Names referenced without an enclosing prefix.
    pub fn unguarded_references(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_refs(&mut out, true);
        out
    }

    fn collect_refs(&self, out: &mut BTreeSet<String>, stop_at_prefix: bool) {
        match self {
            Process::Stop | Process::Skip => {}
            Process::Ref(name) => {
                out.insert(name.clone());
            }
            Process::Prefix { cont, .. } => {
                if !stop_at_prefix {
                    cont.collect_refs(out, stop_at_prefix);
                }
            }
            _ => {
                for child in self.children() {
                    child.collect_refs(out, stop_at_prefix);
                }
            }
        }
    }

    /// Direct operand terms of a binary operator (empty for leaves and prefixes).
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Process::ExtChoice(l, r)
            | Process::IntChoice(l, r)
            | Process::SyncParallel(l, r)
            | Process::Interleave(l, r)
            | Process::GenParallel { left: l, right: r, .. }
            | Process::AlphaParallel { left: l, right: r, .. } => vec![l, r],
            _ => Vec::new(),
        }
    }

    /// Whether the term nests at most `max_depth` levels and has at most
    /// `max_nodes` nodes, counting shared subterms once per occurrence.
    /// Stops early once either bound is exceeded.
    pub fn within_bounds(&self, max_depth: usize, max_nodes: usize) -> bool {
        let mut budget = max_nodes;
        self.fits(max_depth, &mut budget)
    }

    fn fits(&self, depth: usize, budget: &mut usize) -> bool {
        if depth == 0 || *budget == 0 {
            return false;
        }
        *budget -= 1;
        match self {
            Process::Prefix { cont, .. } => cont.fits(depth - 1, budget),
            other => other.children().into_iter().all(|c| c.fits(depth - 1, budget)),
        }
    }

    /// Rebuilds a binary operator with new operands, keeping its sets.
    pub(crate) fn with_children(&self, left: Term, right: Term) -> Term {
        Arc::new(match self {
            Process::ExtChoice(..) => Process::ExtChoice(left, right),
            Process::IntChoice(..) => Process::IntChoice(left, right),
            Process::SyncParallel(..) => Process::SyncParallel(left, right),
            Process::Interleave(..) => Process::Interleave(left, right),
            Process::GenParallel { sync, .. } => Process::GenParallel {
                left,
                sync: sync.clone(),
                right,
            },
            Process::AlphaParallel {
                left_alpha,
                right_alpha,
                ..
            } => Process::AlphaParallel {
                left,
                left_alpha: left_alpha.clone(),
                right_alpha: right_alpha.clone(),
                right,
            },
            other => panic!("with_children on non-binary term {other:?}"),
        })
    }

    /// Variables occurring free in the term.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Process::Prefix { fields, cont, .. } => {
                let mark = bound.len();
                for field in fields {
                    match field {
                        Field::Out(Component::Var(v)) if !bound.contains(v) => {
                            out.insert(v.clone());
                        }
                        Field::Out(_) => {}
                        Field::In { var, .. } => bound.push(var.clone()),
                    }
                }
                cont.collect_free(bound, out);
                bound.truncate(mark);
            }
            _ => {
                for child in self.children() {
                    child.collect_free(bound, out);
                }
            }
        }
    }
}

fn fold_right(mut items: Vec<Term>, join: fn(Term, Term) -> Term) -> Option<Term> {
    let mut acc = items.pop()?;
    while let Some(next) = items.pop() {
        acc = join(next, acc);
    }
    Some(acc)
}

/// Substitutes values for free variables. Returns `None` when nothing changed,
/// so unchanged subterms stay shared.
pub(crate) fn substitute(term: &Term, bindings: &BTreeMap<String, Value>) -> Option<Term> {
    if bindings.is_empty() {
        return None;
    }
    match term.as_ref() {
        Process::Stop | Process::Skip | Process::Ref(_) => None,
        Process::Prefix {
            channel,
            fields,
            cont,
        } => {
            let mut scope = bindings.clone();
            let mut changed = false;
            let mut new_fields = Vec::with_capacity(fields.len());
            for field in fields {
                match field {
                    Field::Out(Component::Var(v)) if scope.contains_key(v) => {
                        new_fields.push(Field::Out(Component::Value(scope[v].clone())));
                        changed = true;
                    }
                    Field::In { var, .. } => {
                        scope.remove(var);
                        new_fields.push(field.clone());
                    }
                    _ => new_fields.push(field.clone()),
                }
            }
            let new_cont = substitute(cont, &scope);
            if !changed && new_cont.is_none() {
                return None;
            }
            Some(Arc::new(Process::Prefix {
                channel: channel.clone(),
                fields: new_fields,
                cont: new_cont.unwrap_or_else(|| cont.clone()),
            }))
        }
        other => {
            let children = other.children();
            let (l, r) = (children[0], children[1]);
            let nl = substitute(l, bindings);
            let nr = substitute(r, bindings);
            if nl.is_none() && nr.is_none() {
                return None;
            }
            Some(other.with_children(
                nl.unwrap_or_else(|| l.clone()),
                nr.unwrap_or_else(|| r.clone()),
            ))
        }
    }
}
