use std::collections::BTreeSet;

use super::env::{Domain, Environment};
use super::event::{Event, Value};
use super::term::{Component, EventSet, Field, Process, Term};
use super::KernelError;

/// Visible events occurring syntactically in the full unfolding of `term`.
///
/// Input prefixes contribute every instantiation over their binder domains;
/// a variable used after its binder ranges over the binder's whole domain.
/// Synchronisation sets of parallel operators are not included.
pub fn alphabet(term: &Term, env: &Environment) -> Result<EventSet, KernelError> {
    let mut out = BTreeSet::new();
    let mut visited = BTreeSet::new();
    collect(term, env, &mut Vec::new(), &mut visited, &mut out)?;
    Ok(out)
}

fn collect(
    term: &Term,
    env: &Environment,
    scope: &mut Vec<(String, Domain)>,
    visited: &mut BTreeSet<String>,
    out: &mut EventSet,
) -> Result<(), KernelError> {
    match term.as_ref() {
        Process::Stop | Process::Skip => Ok(()),
        Process::Ref(name) => {
            if visited.insert(name.clone()) {
                let body = env
                    .definition(name)
                    .ok_or_else(|| KernelError::UnboundReference(name.clone()))?;
                // definitions are closed, so the enclosing scope is irrelevant
                collect(body, env, &mut Vec::new(), visited, out)?;
            }
            Ok(())
        }
        Process::Prefix {
            channel,
            fields,
            cont,
        } => {
            let mark = scope.len();
            let mut rows: Vec<Vec<Value>> = vec![Vec::new()];
            for field in fields {
                let choices: Domain = match field {
                    Field::Out(Component::Value(v)) => vec![v.clone()],
                    Field::Out(Component::Var(x)) => scope
                        .iter()
                        .rev()
                        .find(|(n, _)| n == x)
                        .map(|(_, d)| d.clone())
                        .ok_or_else(|| KernelError::FreeVariable(x.clone()))?,
                    Field::In { var, domain } => {
                        scope.push((var.clone(), domain.clone()));
                        domain.clone()
                    }
                };
                rows = rows
                    .into_iter()
                    .flat_map(|row| {
                        choices.iter().map(move |v| {
                            let mut r = row.clone();
                            r.push(v.clone());
                            r
                        })
                    })
                    .collect();
            }
            out.extend(rows.into_iter().map(|c| Event::Visible {
                channel: channel.clone(),
                components: c,
            }));
            let result = collect(cont, env, scope, visited, out);
            scope.truncate(mark);
            result
        }
        other => {
            for child in other.children() {
                collect(child, env, scope, visited, out)?;
            }
            Ok(())
        }
    }
}
