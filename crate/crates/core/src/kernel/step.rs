//! Structured operational semantics: one-step transitions of a closed term.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::env::Environment;
use super::event::{Event, Value};
use super::term::{substitute, Component, Field, Process, Term};
use super::KernelError;

/// A single outgoing transition of a term.
pub type Move = (Event, Term);

/// All one-step transitions of `term`, sorted by event and then target term
/// and free of duplicates.
///
/// References unfold transparently: `step(Ref(N))` is `step(body(N))`.
pub fn step(term: &Term, env: &Environment) -> Result<Vec<Move>, KernelError> {
    let mut out = Vec::new();
    step_into(term, env, &mut Vec::new(), &mut out)?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn step_into(
    term: &Term,
    env: &Environment,
    unfolding: &mut Vec<String>,
    out: &mut Vec<Move>,
) -> Result<(), KernelError> {
    match term.as_ref() {
        Process::Stop => {}
        Process::Skip => out.push((Event::Tick, Process::stop())),
        Process::Ref(name) => {
            if let Some(pos) = unfolding.iter().position(|n| n == name) {
                return Err(KernelError::UnguardedRecursion(unfolding[pos..].to_vec()));
            }
            let body = env
                .definition(name)
                .ok_or_else(|| KernelError::UnboundReference(name.clone()))?;
            unfolding.push(name.clone());
            let result = step_into(body, env, unfolding, out);
            unfolding.pop();
            result?;
        }
        Process::Prefix {
            channel,
            fields,
            cont,
        } => fire_prefix(channel, fields, cont, out)?,
        Process::IntChoice(l, r) => {
            out.push((Event::Tau, l.clone()));
            out.push((Event::Tau, r.clone()));
        }
        Process::ExtChoice(l, r) => {
            for (e, l2) in moves_of(l, env, unfolding)? {
                let target = if e == Event::Tau {
                    Process::ext_choice(l2, r.clone())
                } else {
                    l2
                };
                out.push((e, target));
            }
            for (e, r2) in moves_of(r, env, unfolding)? {
                let target = if e == Event::Tau {
                    Process::ext_choice(l.clone(), r2)
                } else {
                    r2
                };
                out.push((e, target));
            }
        }
        Process::SyncParallel(l, r) => {
            parallel(term, l, r, env, unfolding, out, &|_| Sync::Both)?;
        }
        Process::Interleave(l, r) => {
            parallel(term, l, r, env, unfolding, out, &|_| Sync::Either)?;
        }
        Process::GenParallel { left, sync, right } => {
            parallel(term, left, right, env, unfolding, out, &|e| {
                if sync.contains(e) {
                    Sync::Both
                } else {
                    Sync::Either
                }
            })?;
        }
        Process::AlphaParallel {
            left,
            left_alpha,
            right_alpha,
            right,
        } => {
            parallel(term, left, right, env, unfolding, out, &|e| {
                match (left_alpha.contains(e), right_alpha.contains(e)) {
                    (true, true) => Sync::Both,
                    (true, false) => Sync::LeftOnly,
                    (false, true) => Sync::RightOnly,
                    (false, false) => Sync::Neither,
                }
            })?;
        }
    }
    Ok(())
}

fn moves_of(
    term: &Term,
    env: &Environment,
    unfolding: &mut Vec<String>,
) -> Result<Vec<Move>, KernelError> {
    let mut out = Vec::new();
    step_into(term, env, unfolding, &mut out)?;
    Ok(out)
}

/// How a parallel operator treats a visible event.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Sync {
    /// Both sides must perform it together.
    Both,
    /// Either side performs it alone.
    Either,
    /// Only the left side may perform it, alone.
    LeftOnly,
    /// Only the right side may perform it, alone.
    RightOnly,
    /// Blocked.
    Neither,
}

fn parallel(
    whole: &Process,
    l: &Term,
    r: &Term,
    env: &Environment,
    unfolding: &mut Vec<String>,
    out: &mut Vec<Move>,
    rule: &dyn Fn(&Event) -> Sync,
) -> Result<(), KernelError> {
    let left = moves_of(l, env, unfolding)?;
    let right = moves_of(r, env, unfolding)?;
    let mut left_ticks = false;
    let mut right_ticks = false;

    for (e, l2) in &left {
        match e {
            Event::Tau => out.push((Event::Tau, whole.with_children(l2.clone(), r.clone()))),
            Event::Tick => left_ticks = true,
            visible => match rule(visible) {
                Sync::Either | Sync::LeftOnly => {
                    out.push((visible.clone(), whole.with_children(l2.clone(), r.clone())))
                }
                Sync::Both => {
                    for (_, r2) in right.iter().filter(|(f, _)| f == visible) {
                        out.push((visible.clone(), whole.with_children(l2.clone(), r2.clone())));
                    }
                }
                Sync::RightOnly | Sync::Neither => {}
            },
        }
    }
    for (e, r2) in &right {
        match e {
            Event::Tau => out.push((Event::Tau, whole.with_children(l.clone(), r2.clone()))),
            Event::Tick => right_ticks = true,
            visible => {
                if matches!(rule(visible), Sync::Either | Sync::RightOnly) {
                    out.push((visible.clone(), whole.with_children(l.clone(), r2.clone())));
                }
            }
        }
    }
    // distributed termination
    if left_ticks && right_ticks {
        out.push((Event::Tick, Process::stop()));
    }
    Ok(())
}

/// Fires a (possibly input) prefix: one transition per binder instantiation.
fn fire_prefix(
    channel: &str,
    fields: &[Field],
    cont: &Term,
    out: &mut Vec<Move>,
) -> Result<(), KernelError> {
    let mut partial: Vec<(Vec<Value>, BTreeMap<String, Value>)> = vec![(Vec::new(), BTreeMap::new())];
    for field in fields {
        let mut next = Vec::with_capacity(partial.len());
        for (components, bindings) in partial {
            match field {
                Field::Out(Component::Value(v)) => {
                    let mut c = components;
                    c.push(v.clone());
                    next.push((c, bindings));
                }
                Field::Out(Component::Var(x)) => {
                    let v = bindings
                        .get(x)
                        .cloned()
                        .ok_or_else(|| KernelError::FreeVariable(x.clone()))?;
                    let mut c = components;
                    c.push(v);
                    next.push((c, bindings));
                }
                Field::In { var, domain } => {
                    for v in domain {
                        let mut c = components.clone();
                        c.push(v.clone());
                        let mut b = bindings.clone();
                        b.insert(var.clone(), v.clone());
                        next.push((c, b));
                    }
                }
            }
        }
        partial = next;
    }
    for (components, bindings) in partial {
        let target = substitute(cont, &bindings).unwrap_or_else(|| Arc::clone(cont));
        out.push((
            Event::Visible {
                channel: channel.to_string(),
                components,
            },
            target,
        ));
    }
    Ok(())
}

/// Visible and tick events offered immediately (before any tau).
pub fn initials(term: &Term, env: &Environment) -> Result<Vec<Event>, KernelError> {
    let mut events: Vec<Event> = step(term, env)?
        .into_iter()
        .map(|(e, _)| e)
        .filter(|e| *e != Event::Tau)
        .collect();
    events.dedup();
    Ok(events)
}
