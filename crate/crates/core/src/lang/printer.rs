//! Canonical text form of an [`Environment`].

use std::fmt::Write as _;

use crate::kernel::{Component, Environment, Event, EventSet, Field, Process, Term, Value};

const EXT: u8 = 1;
const INT: u8 = 2;
const PAR: u8 = 3;
const PREFIX: u8 = 4;
const ATOM: u8 = 5;

/// Sets, then channels, a blank line, then one definition per line.
pub fn print(env: &Environment) -> String {
    let mut out = String::new();
    for (name, items) in &env.sets {
        let paths: Vec<Vec<Value>> = items.iter().cloned().collect();
        let _ = writeln!(out, "set {name} = {}", path_set(&paths));
    }
    for (name, domains) in &env.channels {
        out.push_str("channel ");
        out.push_str(name);
        for d in domains {
            out.push_str(" : ");
            out.push_str(&value_set(env, d));
        }
        out.push('\n');
    }
    if !out.is_empty() && !env.definitions.is_empty() {
        out.push('\n');
    }
    for (name, body) in &env.definitions {
        let _ = writeln!(out, "{name} = {}", process(env, body));
    }
    out
}

/// Prints one process term using `env` for set names.
pub fn process(env: &Environment, term: &Term) -> String {
    let mut out = String::new();
    Printer { env, out: &mut out }.term(term);
    out
}

fn level(term: &Process) -> u8 {
    match term {
        Process::ExtChoice(..) => EXT,
        Process::IntChoice(..) => INT,
        Process::SyncParallel(..)
        | Process::Interleave(..)
        | Process::GenParallel { .. }
        | Process::AlphaParallel { .. } => PAR,
        Process::Prefix { .. } => PREFIX,
        Process::Stop | Process::Skip | Process::Ref(_) => ATOM,
    }
}

struct Printer<'a> {
    env: &'a Environment,
    out: &'a mut String,
}

impl Printer<'_> {
    fn term(&mut self, term: &Term) {
        match term.as_ref() {
            Process::Stop => self.out.push_str("STOP"),
            Process::Skip => self.out.push_str("SKIP"),
            Process::Ref(n) => self.out.push_str(n),
            Process::Prefix {
                channel,
                fields,
                cont,
            } => {
                self.out.push_str(channel);
                for f in fields {
                    match f {
                        Field::Out(Component::Value(v)) => {
                            let _ = write!(self.out, ".{v}");
                        }
                        Field::Out(Component::Var(x)) => {
                            let _ = write!(self.out, ".{x}");
                        }
                        Field::In { var, domain } => {
                            let _ = write!(self.out, "?{var}:{}", value_set(self.env, domain));
                        }
                    }
                }
                self.out.push_str(" -> ");
                self.operand(cont, PREFIX, false);
            }
            Process::ExtChoice(l, r) => self.binary(l, " [] ", r, EXT),
            Process::IntChoice(l, r) => self.binary(l, " |~| ", r, INT),
            Process::SyncParallel(l, r) => self.binary(l, " || ", r, PAR),
            Process::Interleave(l, r) => self.binary(l, " ||| ", r, PAR),
            Process::GenParallel { left, sync, right } => {
                let op = format!(" [| {} |] ", event_set(self.env, sync));
                self.binary(left, &op, right, PAR);
            }
            Process::AlphaParallel {
                left,
                left_alpha,
                right_alpha,
                right,
            } => {
                let op = format!(
                    " [ {} || {} ] ",
                    event_set(self.env, left_alpha),
                    event_set(self.env, right_alpha)
                );
                self.binary(left, &op, right, PAR);
            }
        }
    }

    fn binary(&mut self, l: &Term, op: &str, r: &Term, lvl: u8) {
        self.operand(l, lvl, true);
        self.out.push_str(op);
        self.operand(r, lvl, false);
    }

    fn operand(&mut self, t: &Term, lvl: u8, left: bool) {
        let inner = level(t);
        let paren = if left { inner <= lvl } else { inner < lvl };
        if paren {
            self.out.push('(');
            self.term(t);
            self.out.push(')');
        } else {
            self.term(t);
        }
    }
}

fn value_set(env: &Environment, domain: &[Value]) -> String {
    for (name, items) in &env.sets {
        if items.len() == domain.len() && items.iter().zip(domain).all(|(p, v)| p.len() == 1 && &p[0] == v) {
            return name.clone();
        }
    }
    let paths: Vec<Vec<Value>> = domain.iter().map(|v| vec![v.clone()]).collect();
    path_set(&paths)
}

fn event_set(env: &Environment, events: &EventSet) -> String {
    let paths: Vec<Vec<Value>> = events
        .iter()
        .filter_map(|e| match e {
            Event::Visible {
                channel,
                components,
            } => {
                let mut p = vec![Value::Atom(channel.clone())];
                p.extend(components.iter().cloned());
                Some(p)
            }
            _ => None,
        })
        .collect();
    for (name, items) in &env.sets {
        if items.len() == paths.len() && items.iter().eq(paths.iter()) {
            return name.clone();
        }
    }
    path_set(&paths)
}

/// `{lo..hi}` for a contiguous run of two or more integers, otherwise a
/// literal list. `paths` must be sorted.
fn path_set(paths: &[Vec<Value>]) -> String {
    let ints: Option<Vec<i32>> = paths
        .iter()
        .map(|p| match p.as_slice() {
            [Value::Int(n)] => Some(*n),
            _ => None,
        })
        .collect();
    if let Some(ints) = ints {
        if ints.len() >= 2 && ints.windows(2).all(|w| w[1] == w[0] + 1) {
            return format!("{{{}..{}}}", ints[0], ints[ints.len() - 1]);
        }
    }
    let items: Vec<String> = paths
        .iter()
        .map(|p| p.iter().map(ToString::to_string).collect::<Vec<_>>().join("."))
        .collect();
    format!("{{{}}}", items.join(", "))
}
