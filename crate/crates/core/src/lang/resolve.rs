//! Turns the syntax tree into a checked [`Environment`].

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;

use super::diagnostic::{Diagnostic, DiagnosticKind, Span};
use super::parser::{BinOp, Decl, FieldExpr, ProcExpr, ProcExprKind, SetExpr, SetExprKind, ValueExpr};
use crate::kernel::{
    check_guarded, domain, int_range, Component, Domain, Environment, Event, EventSet, Field,
    KernelError, Process, SetItems, Term, Value,
};

pub struct Resolved {
    pub env: Environment,
    pub spans: IndexMap<String, Span>,
}

struct Resolver<'a> {
    decls: &'a [Decl],
    set_decls: BTreeMap<&'a str, &'a SetExpr>,
    env: Environment,
    errors: Vec<Diagnostic>,
}

pub fn resolve(decls: &[Decl]) -> (Resolved, Vec<Diagnostic>) {
    let mut r = Resolver {
        decls,
        set_decls: BTreeMap::new(),
        env: Environment::new(),
        errors: Vec::new(),
    };
    let spans = r.run();
    let mut errors = r.errors;
    errors.sort_by_key(|d| d.span.start);
    (Resolved { env: r.env, spans }, errors)
}

fn err(kind: DiagnosticKind, span: Span, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(kind, span, message)
}

impl<'a> Resolver<'a> {
    fn run(&mut self) -> IndexMap<String, Span> {
        let mut spans: IndexMap<String, Span> = IndexMap::new();
        let mut seen: BTreeMap<(u8, &str), ()> = BTreeMap::new();
        for decl in self.decls {
            let (key, name) = match decl {
                Decl::Set { name, value, .. } => {
                    self.set_decls.entry(name).or_insert(value);
                    (0, name)
                }
                Decl::Channel { name, .. } => (1, name),
                Decl::Proc { name, .. } => (2, name),
            };
            if seen.insert((key, name.as_str()), ()).is_some() {
                self.errors.push(err(
                    DiagnosticKind::DuplicateDeclaration,
                    decl.span(),
                    format!("`{name}` is declared more than once"),
                ));
            }
        }

        // sets, then channels, so definitions can be checked in any order
        for decl in self.decls {
            if let Decl::Set { name, value, .. } = decl {
                if self.env.sets.contains_key(name) {
                    continue;
                }
                if let Some(items) = self.set_items(value, &mut Vec::new()) {
                    self.env.sets.insert(name.clone(), items);
                }
            }
        }
        for decl in self.decls {
            if let Decl::Channel { name, domains, .. } = decl {
                if self.env.channels.contains_key(name) {
                    continue;
                }
                let resolved: Option<Vec<Domain>> = domains.iter().map(|d| self.value_domain(d)).collect();
                if let Some(ds) = resolved {
                    self.env.channels.insert(name.clone(), ds);
                }
            }
        }
        let proc_names: BTreeSet<&str> = self
            .decls
            .iter()
            .filter_map(|d| match d {
                Decl::Proc { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect();
        for decl in self.decls {
            if let Decl::Proc { name, body, span } = decl {
                if spans.contains_key(name) {
                    continue;
                }
                let term = self.process(body, &proc_names, &mut Vec::new());
                spans.insert(name.clone(), *span);
                if let Some(t) = term {
                    self.env.definitions.insert(name.clone(), t);
                }
            }
        }

        if self.errors.is_empty() {
            if let Err(KernelError::UnguardedRecursion(cycle)) = check_guarded(&self.env) {
                let span = spans.get(&cycle[0]).copied().unwrap_or_default();
                self.errors.push(err(
                    DiagnosticKind::UnguardedRecursion,
                    span,
                    format!("recursion through {} is not guarded by any event", cycle.join(" -> ")),
                ));
            }
        }
        spans
    }

    /// Resolves a set expression into dotted items. `stack` detects cycles
    /// between named sets.
    fn set_items(&mut self, set: &SetExpr, stack: &mut Vec<String>) -> Option<SetItems> {
        match &set.kind {
            SetExprKind::Range(lo, hi) => Some(int_range(*lo, *hi).into_iter().map(|v| vec![v]).collect()),
            SetExprKind::Literal(items) => Some(
                items
                    .iter()
                    .map(|item| item.path.iter().map(literal_value).collect())
                    .collect(),
            ),
            SetExprKind::Named(name) => {
                if let Some(items) = self.env.sets.get(name) {
                    return Some(items.clone());
                }
                let Some(&decl) = self.set_decls.get(name.as_str()) else {
                    self.errors.push(err(
                        DiagnosticKind::UnknownSet,
                        set.span,
                        format!("no set named `{name}`"),
                    ));
                    return None;
                };
                if stack.contains(name) {
                    self.errors.push(err(
                        DiagnosticKind::UnknownSet,
                        set.span,
                        format!("set `{name}` is defined in terms of itself"),
                    ));
                    return None;
                }
                stack.push(name.clone());
                let items = self.set_items(decl, stack);
                stack.pop();
                items
            }
        }
    }

    fn value_domain(&mut self, set: &SetExpr) -> Option<Domain> {
        let items = self.set_items(set, &mut Vec::new())?;
        let mut values = Vec::with_capacity(items.len());
        for path in items {
            match <[Value; 1]>::try_from(path) {
                Ok([v]) => values.push(v),
                Err(path) => {
                    let text: Vec<String> = path.iter().map(ToString::to_string).collect();
                    self.errors.push(err(
                        DiagnosticKind::SyntaxError,
                        set.span,
                        format!("`{}` is an event, not a value", text.join(".")),
                    ));
                    return None;
                }
            }
        }
        Some(domain(values))
    }

    /// Resolves a set used as a synchronisation alphabet. An item naming a
    /// channel with fewer components than declared stands for all of the
    /// channel's completions.
    fn event_set(&mut self, set: &SetExpr) -> Option<EventSet> {
        let items = self.set_items(set, &mut Vec::new())?;
        let mut out = EventSet::new();
        let mut ok = true;
        for path in items {
            let channel = match path.first() {
                Some(Value::Atom(c)) => c.clone(),
                _ => {
                    self.errors.push(err(
                        DiagnosticKind::SyntaxError,
                        set.span,
                        "integers cannot appear in an event set",
                    ));
                    ok = false;
                    continue;
                }
            };
            let Some(domains) = self.env.channels.get(&channel).cloned() else {
                self.errors.push(err(
                    DiagnosticKind::UnknownChannel,
                    set.span,
                    format!("undeclared channel `{channel}`"),
                ));
                ok = false;
                continue;
            };
            let given = &path[1..];
            if given.len() > domains.len() {
                self.errors.push(err(
                    DiagnosticKind::ArityMismatch,
                    set.span,
                    format!("channel `{channel}` takes {} component(s), found {}", domains.len(), given.len()),
                ));
                ok = false;
                continue;
            }
            for (i, v) in given.iter().enumerate() {
                if domains[i].binary_search(v).is_err() {
                    self.errors.push(err(
                        DiagnosticKind::ValueOutOfDomain,
                        set.span,
                        format!("`{v}` is not in the domain of component {i} of `{channel}`"),
                    ));
                    ok = false;
                }
            }
            let mut rows = vec![given.to_vec()];
            for dom in &domains[given.len()..] {
                rows = rows
                    .into_iter()
                    .flat_map(|row| {
                        dom.iter().map(move |v| {
                            let mut r = row.clone();
                            r.push(v.clone());
                            r
                        })
                    })
                    .collect();
            }
            out.extend(rows.into_iter().map(|c| Event::visible(channel.clone(), c)));
        }
        ok.then_some(out)
    }

    fn process(&mut self, expr: &ProcExpr, procs: &BTreeSet<&str>, scope: &mut Vec<String>) -> Option<Term> {
        match &expr.kind {
            ProcExprKind::Stop => Some(Process::stop()),
            ProcExprKind::Skip => Some(Process::skip()),
            ProcExprKind::Name(name) => {
                if procs.contains(name.as_str()) {
                    Some(Process::reference(name.clone()))
                } else {
                    self.errors.push(err(
                        DiagnosticKind::UnboundReference,
                        expr.span,
                        format!("no process named `{name}`"),
                    ));
                    None
                }
            }
            ProcExprKind::Prefix {
                channel,
                channel_span,
                fields,
                cont,
            } => {
                let mark = scope.len();
                let fields = self.fields(channel, *channel_span, fields, scope);
                let cont = self.process(cont, procs, scope);
                scope.truncate(mark);
                Some(Process::prefix_fields(channel.clone(), fields?, cont?))
            }
            ProcExprKind::Binary(op, l, r) => {
                let l = self.process(l, procs, scope);
                let r = self.process(r, procs, scope);
                let (l, r) = (l?, r?);
                Some(match op {
                    BinOp::ExtChoice => Process::ext_choice(l, r),
                    BinOp::IntChoice => Process::int_choice(l, r),
                    BinOp::Parallel => Process::sync_parallel(l, r),
                    BinOp::Interleave => Process::interleave(l, r),
                })
            }
            ProcExprKind::GenParallel(l, sync, r) => {
                let sync = self.event_set(sync);
                let l = self.process(l, procs, scope);
                let r = self.process(r, procs, scope);
                Some(Process::gen_parallel(l?, sync?, r?))
            }
            ProcExprKind::AlphaParallel(l, la, ra, r) => {
                let la = self.event_set(la);
                let ra = self.event_set(ra);
                let l = self.process(l, procs, scope);
                let r = self.process(r, procs, scope);
                Some(Process::alpha_parallel(l?, la?, ra?, r?))
            }
        }
    }

    fn fields(
        &mut self,
        channel: &str,
        channel_span: Span,
        fields: &[FieldExpr],
        scope: &mut Vec<String>,
    ) -> Option<Vec<Field>> {
        let Some(domains) = self.env.channels.get(channel).cloned() else {
            self.errors.push(err(
                DiagnosticKind::UnknownChannel,
                channel_span,
                format!("undeclared channel `{channel}`"),
            ));
            return None;
        };
        if domains.len() != fields.len() {
            let span = fields.last().map_or(channel_span, |f| channel_span.to(field_span(f)));
            self.errors.push(err(
                DiagnosticKind::ArityMismatch,
                span,
                format!("channel `{channel}` takes {} component(s), found {}", domains.len(), fields.len()),
            ));
            return None;
        }
        let mut out = Vec::with_capacity(fields.len());
        let mut ok = true;
        for (index, (field, dom)) in fields.iter().zip(&domains).enumerate() {
            match field {
                FieldExpr::Dot(v, span) | FieldExpr::Bang(v, span) => {
                    let component = match v {
                        ValueExpr::Name(n) if scope.contains(n) => Component::Var(n.clone()),
                        other => {
                            let value = literal_value(other);
                            if dom.binary_search(&value).is_err() {
                                self.errors.push(err(
                                    DiagnosticKind::ValueOutOfDomain,
                                    *span,
                                    format!("`{value}` is not in the domain of component {index} of `{channel}`"),
                                ));
                                ok = false;
                            }
                            Component::Value(value)
                        }
                    };
                    out.push(Field::Out(component));
                }
                FieldExpr::Query { var, domain, span } => {
                    let values = match domain {
                        None => Some(dom.clone()),
                        Some(set) => self.value_domain(set),
                    };
                    let Some(values) = values else {
                        ok = false;
                        continue;
                    };
                    if let Some(bad) = values.iter().find(|v| dom.binary_search(v).is_err()) {
                        self.errors.push(err(
                            DiagnosticKind::ValueOutOfDomain,
                            *span,
                            format!("`{bad}` is not in the domain of component {index} of `{channel}`"),
                        ));
                        ok = false;
                    }
                    scope.push(var.clone());
                    out.push(Field::In {
                        var: var.clone(),
                        domain: values,
                    });
                }
            }
        }
        ok.then_some(out)
    }
}

fn field_span(f: &FieldExpr) -> Span {
    match f {
        FieldExpr::Dot(_, s) | FieldExpr::Bang(_, s) | FieldExpr::Query { span: s, .. } => *s,
    }
}

fn literal_value(v: &ValueExpr) -> Value {
    match v {
        ValueExpr::Name(n) => Value::Atom(n.clone()),
        ValueExpr::Int(n) => Value::Int(*n),
    }
}
