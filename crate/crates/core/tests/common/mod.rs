#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use cspauto::kernel::{
    domain, int_range, Component, Domain, Environment, Event, EventSet, Field, Lts, Process, StateId, Term, Value,
};

pub const SEED: u64 = 0x5eed_c500;

pub fn rng(stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

pub fn ev(s: &str) -> Event {
    Event::parse(s).unwrap_or_else(|| panic!("bad event {s}"))
}

pub fn evs(items: &[&str]) -> Vec<Event> {
    items.iter().map(|s| ev(s)).collect()
}

pub fn set(items: &[&str]) -> EventSet {
    items.iter().map(|s| ev(s)).collect()
}

/// `A = a -> b -> STOP`, `B = b -> B` over channels `a` and `b`.
pub fn ab_env() -> Environment {
    let mut env = Environment::new();
    env.declare_channel("a", vec![]);
    env.declare_channel("b", vec![]);
    env.define("A", Process::prefix(ev("a"), Process::prefix(ev("b"), Process::stop())));
    env.define("B", Process::prefix(ev("b"), Process::reference("B")));
    env
}

// Random environments

/// Random closed, guarded environments. Plain mode uses only `a`, `b`, `c`;
/// data mode adds `d : {0..2}` and `e : {x, y} : {0..1}` with input prefixes.
pub struct EnvGen {
    pub data: bool,
    pub defs: usize,
    pub depth: usize,
    fresh: usize,
}

#[derive(Clone)]
struct Scope(Vec<(String, Domain)>);

impl EnvGen {
    pub fn plain() -> Self {
        EnvGen {
            data: false,
            defs: 3,
            depth: 4,
            fresh: 0,
        }
    }

    pub fn data() -> Self {
        EnvGen {
            data: true,
            defs: 3,
            depth: 4,
            fresh: 0,
        }
    }

    pub fn env(&mut self, r: &mut ChaCha8Rng) -> Environment {
        let mut env = Environment::new();
        for c in ["a", "b", "c"] {
            env.declare_channel(c, vec![]);
        }
        if self.data {
            let atoms = domain([Value::atom("x"), Value::atom("y")]);
            env.declare_set("Vals", int_range(0, 2).into_iter().map(|v| vec![v]).collect());
            env.declare_set("Atoms", atoms.iter().map(|v| vec![v.clone()]).collect());
            env.declare_set(
                "Sync",
                [vec![Value::atom("a")], vec![Value::atom("d"), Value::int(1)]].into(),
            );
            env.declare_channel("d", vec![int_range(0, 2)]);
            env.declare_channel("e", vec![atoms, int_range(0, 1)]);
        }
        let n = r.gen_range(1..=self.defs);
        let names: Vec<String> = (0..n).map(|i| format!("P{i}")).collect();
        for name in &names {
            self.fresh = 0;
            let body = self.term(r, &env, &names, self.depth, false, &Scope(Vec::new()));
            env.define(name.clone(), body);
        }
        env
    }

    /// All events the declared channels admit.
    pub fn universe(env: &Environment) -> Vec<Event> {
        env.channels
            .keys()
            .flat_map(|c| env.channel_events(c).unwrap())
            .collect()
    }

    fn event_set(&self, r: &mut ChaCha8Rng, env: &Environment) -> EventSet {
        if self.data && r.gen_bool(0.2) {
            return [ev("a"), ev("d.1")].into();
        }
        Self::universe(env).into_iter().filter(|_| r.gen_bool(0.35)).collect()
    }

    /// A closed term over `env` that may refer to its definitions.
    pub fn root(&mut self, r: &mut ChaCha8Rng, env: &Environment) -> Term {
        let names: Vec<String> = env.definitions.keys().cloned().collect();
        self.fresh = 0;
        self.term(r, env, &names, self.depth, true, &Scope(Vec::new()))
    }

    fn term(
        &mut self,
        r: &mut ChaCha8Rng,
        env: &Environment,
        names: &[String],
        depth: usize,
        guarded: bool,
        scope: &Scope,
    ) -> Term {
        let leaf = depth == 0 || r.gen_bool(0.15);
        if leaf {
            return match r.gen_range(0..4) {
                0 => Process::stop(),
                1 => Process::skip(),
                _ if guarded => Process::reference(names.choose(r).unwrap().clone()),
                _ => Process::stop(),
            };
        }
        match r.gen_range(0..10) {
            0..=3 => self.prefix(r, env, names, depth, scope),
            4 => Process::ext_choice(
                self.term(r, env, names, depth - 1, guarded, scope),
                self.term(r, env, names, depth - 1, guarded, scope),
            ),
            5 => Process::int_choice(
                self.term(r, env, names, depth - 1, guarded, scope),
                self.term(r, env, names, depth - 1, guarded, scope),
            ),
            6 => Process::sync_parallel(
                self.term(r, env, names, depth - 1, guarded, scope),
                self.term(r, env, names, depth - 1, guarded, scope),
            ),
            7 => Process::interleave(
                self.term(r, env, names, depth - 1, guarded, scope),
                self.term(r, env, names, depth - 1, guarded, scope),
            ),
            8 => {
                let sync = self.event_set(r, env);
                Process::gen_parallel(
                    self.term(r, env, names, depth - 1, guarded, scope),
                    sync,
                    self.term(r, env, names, depth - 1, guarded, scope),
                )
            }
            _ => {
                let la = self.event_set(r, env);
                let ra = self.event_set(r, env);
                Process::alpha_parallel(
                    self.term(r, env, names, depth - 1, guarded, scope),
                    la,
                    ra,
                    self.term(r, env, names, depth - 1, guarded, scope),
                )
            }
        }
    }

    fn field(&mut self, r: &mut ChaCha8Rng, dom: &Domain, scope: &mut Scope) -> Field {
        let usable: Vec<&String> = scope
            .0
            .iter()
            .filter(|(_, d)| d.iter().all(|v| dom.contains(v)))
            .map(|(n, _)| n)
            .collect();
        match r.gen_range(0..3) {
            0 if !usable.is_empty() => Field::Out(Component::Var((*usable.choose(r).unwrap()).clone())),
            1 => {
                let mut sub: Vec<Value> = dom.iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
                if sub.is_empty() {
                    sub.push(dom.choose(r).unwrap().clone());
                }
                let var = format!("v{}", self.fresh);
                self.fresh += 1;
                let sub = domain(sub);
                scope.0.push((var.clone(), sub.clone()));
                Field::In { var, domain: sub }
            }
            _ => Field::Out(Component::Value(dom.choose(r).unwrap().clone())),
        }
    }

    fn prefix(&mut self, r: &mut ChaCha8Rng, env: &Environment, names: &[String], depth: usize, scope: &Scope) -> Term {
        let channels: Vec<&String> = env.channels.keys().collect();
        let channel = (*channels.choose(r).unwrap()).clone();
        let domains = env.channels[&channel].clone();
        let mut inner = scope.clone();
        let fields: Vec<Field> = domains.iter().map(|d| self.field(r, d, &mut inner)).collect();
        let cont = self.term(r, env, names, depth - 1, true, &inner);
        Process::prefix_fields(channel, fields, cont)
    }
}

// Brute-force trace and failure enumeration over raw transitions

/// Every state reachable from `from` by tau steps, including `from`.
fn tau_reach(lts: &Lts, from: StateId, out: &mut BTreeSet<StateId>) {
    if !out.insert(from) {
        return;
    }
    for t in lts.successors(from) {
        if t.event == Event::Tau {
            tau_reach(lts, t.target, out);
        }
    }
}

/// States reachable by performing exactly `trace` (taus anywhere).
pub fn states_after(lts: &Lts, trace: &[Event]) -> BTreeSet<StateId> {
    let mut current = BTreeSet::new();
    tau_reach(lts, lts.initial(), &mut current);
    for e in trace {
        let mut next = BTreeSet::new();
        for &s in &current {
            for t in lts.successors(s) {
                if &t.event == e {
                    tau_reach(lts, t.target, &mut next);
                }
            }
        }
        current = next;
    }
    current
}

/// Depth-first enumeration of every path, recording visible labels. Each
/// (state, trace) pair is expanded once.
pub fn dfs_traces(lts: &Lts, depth: usize) -> BTreeSet<Vec<Event>> {
    fn go(
        lts: &Lts,
        s: StateId,
        trace: &mut Vec<Event>,
        depth: usize,
        seen: &mut HashSet<(StateId, Vec<Event>)>,
        out: &mut BTreeSet<Vec<Event>>,
    ) {
        if !seen.insert((s, trace.clone())) {
            return;
        }
        out.insert(trace.clone());
        if trace.last() == Some(&Event::Tick) {
            return;
        }
        for t in lts.successors(s) {
            if t.event == Event::Tau {
                go(lts, t.target, trace, depth, seen, out);
            } else if trace.len() < depth {
                trace.push(t.event.clone());
                go(lts, t.target, trace, depth, seen, out);
                trace.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(lts, lts.initial(), &mut Vec::new(), depth, &mut HashSet::new(), &mut out);
    out
}

/// Maximal elements of a trace set under the prefix order.
pub fn maximal_traces(traces: &BTreeSet<Vec<Event>>) -> BTreeSet<Vec<Event>> {
    traces
        .iter()
        .filter(|t| !traces.iter().any(|u| u.len() > t.len() && u.starts_with(t)))
        .cloned()
        .collect()
}

/// Refusal of each stable state after `trace`, over `sigma`.
pub fn stable_refusals(lts: &Lts, trace: &[Event], sigma: &EventSet) -> Vec<EventSet> {
    states_after(lts, trace)
        .into_iter()
        .filter(|&s| lts.successors(s).iter().all(|t| t.event != Event::Tau))
        .map(|s| {
            let offered: BTreeSet<&Event> = lts.successors(s).iter().map(|t| &t.event).collect();
            sigma.iter().filter(|e| !offered.contains(e)).cloned().collect()
        })
        .collect()
}

/// Explicit failures: every trace paired with every subset of a stable refusal.
pub fn explicit_failures(lts: &Lts, depth: usize, sigma: &EventSet) -> BTreeSet<(Vec<Event>, EventSet)> {
    let mut out = BTreeSet::new();
    for t in dfs_traces(lts, depth) {
        for refusal in stable_refusals(lts, &t, sigma) {
            for sub in subsets(&refusal) {
                out.insert((t.clone(), sub));
            }
        }
    }
    out
}

pub fn subsets(s: &EventSet) -> Vec<EventSet> {
    let items: Vec<&Event> = s.iter().collect();
    (0u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| (*e).clone())
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Trace { witness: Vec<Event>, event: Event },
    Failure { witness: Vec<Event> },
}

impl Violation {
    pub fn witness(&self) -> &[Event] {
        match self {
            Violation::Trace { witness, .. } | Violation::Failure { witness } => witness,
        }
    }
}

/// The least violation, found by walking the implementation's traces in
/// shortlex order and tracking the reachable states of both sides for each
/// trace separately. Witnesses are shorter than `depth`.
pub fn oracle_refinement(spec: &Lts, imp: &Lts, depth: usize, failures: Option<&EventSet>) -> Option<Violation> {
    let mut layer = vec![(Vec::new(), states_after(imp, &[]), states_after(spec, &[]))];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, imp_states, spec_states) in layer {
            let offered: BTreeSet<&Event> = imp_states
                .iter()
                .flat_map(|&s| lts_visible(imp, s))
                .collect();
            for &e in &offered {
                let spec_next = step_set(spec, &spec_states, e);
                if spec_next.is_empty() {
                    return Some(Violation::Trace {
                        witness: w,
                        event: e.clone(),
                    });
                }
            }
            if let Some(sigma) = failures {
                let spec_refusals = stable_refusals(spec, &w, sigma);
                let uncovered = stable_refusals(imp, &w, sigma)
                    .into_iter()
                    .any(|x| !spec_refusals.iter().any(|y| x.is_subset(y)));
                if uncovered {
                    return Some(Violation::Failure { witness: w });
                }
            }
            for &e in &offered {
                let mut t = w.clone();
                t.push(e.clone());
                next.push((t, step_set(imp, &imp_states, e), step_set(spec, &spec_states, e)));
            }
        }
        layer = next;
    }
    None
}

fn lts_visible(lts: &Lts, s: StateId) -> impl Iterator<Item = &Event> {
    lts.successors(s).iter().map(|t| &t.event).filter(|e| **e != Event::Tau)
}

/// States reachable from `from` by `e` followed by any taus.
fn step_set(lts: &Lts, from: &BTreeSet<StateId>, e: &Event) -> BTreeSet<StateId> {
    let mut out = BTreeSet::new();
    for &s in from {
        for t in lts.successors(s) {
            if &t.event == e {
                tau_reach(lts, t.target, &mut out);
            }
        }
    }
    out
}

/// Words over {s, g, e} up to `depth` whose non-`s` letters form a prefix of
/// `g g e`: the restricted attacker/gateway product written down directly.
pub fn shuffle_oracle(depth: usize) -> BTreeSet<Vec<Event>> {
    let spoof = ev("spoofing.engine_cu.2");
    let system = evs(&["gateway_canhs1", "gateway_canhs1", "engine_cu"]);
    let mut out = BTreeSet::new();
    let mut layer: Vec<Vec<Event>> = vec![Vec::new()];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for w in layer {
            let done = w.iter().filter(|e| **e != spoof).count();
            if w.len() < depth {
                next.push([w.clone(), vec![spoof.clone()]].concat());
                if done < system.len() {
                    next.push([w.clone(), vec![system[done].clone()]].concat());
                }
            }
            out.insert(w);
        }
        layer = next;
    }
    out
}

/// The network model as a hand-written adjacency table. Primed names are
/// the anonymous states after each network's link event.
pub const GATEWAY_TABLE: &[(&str, &[(&str, &str)])] = &[
    (
        "GATEWAY",
        &[
            ("gateway_canhs1", "CANHS1"),
            ("gateway_canhs2", "CANHS2"),
            ("gateway_canls", "CANLS"),
            ("gateway_flexray", "FLEXRAY"),
        ],
    ),
    ("CANHS1", &[("gateway_canhs1", "CANHS1'")]),
    ("CANHS1'", &[("engine_cu", "STOP"), ("gearbox", "STOP"), ("head_unit", "STOP")]),
    ("CANHS2", &[("gateway_canhs2", "CANHS2'")]),
    ("CANHS2'", &[("can_ecu30", "STOP"), ("canhs_most", "MOST")]),
    ("CANLS", &[("gateway_canls", "CANLS'")]),
    ("CANLS'", &[("can_ecu32", "STOP"), ("canls_lin", "LIN")]),
    ("FLEXRAY", &[("gateway_flexray", "FLEXRAY'")]),
    ("FLEXRAY'", &[("video", "STOP"), ("radar", "STOP")]),
    ("MOST", &[("canhs_most", "MOST'")]),
    ("MOST'", &[("dvd", "STOP"), ("mp3", "STOP"), ("radio", "STOP"), ("media", "STOP")]),
    ("LIN", &[("canls_lin", "LIN'")]),
    ("LIN'", &[("lin_sensor", "STOP"), ("lin_actuator", "STOP")]),
    ("STOP", &[]),
];

/// All label paths from `GATEWAY` in the table, up to `depth` events.
pub fn gateway_paths(depth: usize) -> BTreeSet<Vec<String>> {
    fn go(state: &str, path: &mut Vec<String>, depth: usize, out: &mut BTreeSet<Vec<String>>) {
        out.insert(path.clone());
        if path.len() == depth {
            return;
        }
        let (_, edges) = GATEWAY_TABLE.iter().find(|(s, _)| *s == state).unwrap();
        for (label, target) in edges.iter() {
            path.push(label.to_string());
            go(target, path, depth, out);
            path.pop();
        }
    }
    let mut out = BTreeSet::new();
    go("GATEWAY", &mut Vec::new(), depth, &mut out);
    out
}
