//! Built-in vehicle network and attacker models, threat actors, and attack
//! scenario composition.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::kernel::{
    alphabet, domain, int_range, Environment, Event, EventSet, Field, KernelError, Process, SetItems,
    Term, Value,
};

/// The shipped model sources, in load order.
pub const GATEWAY_SOURCE: &str = include_str!("../../models/gateway.cspa");
pub const ATTACKER_SOURCE: &str = include_str!("../../models/attacker.cspa");

/// Every bus system named in the network model.
pub const ALL_BUSES: [&str; 13] = [
    "engine_cu",
    "gearbox",
    "head_unit",
    "can_ecu30",
    "can_ecu32",
    "video",
    "radar",
    "dvd",
    "mp3",
    "radio",
    "media",
    "lin_sensor",
    "lin_actuator",
];

const LINKS: [&str; 6] = [
    "gateway_canhs1",
    "gateway_canhs2",
    "gateway_canls",
    "gateway_flexray",
    "canhs_most",
    "canls_lin",
];

/// Process names of the network model, in definition order.
pub const SYSTEM_PROCESSES: [&str; 7] = ["GATEWAY", "CANHS1", "CANHS2", "CANLS", "FLEXRAY", "MOST", "LIN"];

pub const SCENARIOS: [&str; 1] = ["attack1"];

pub const MAX_PAYLOAD: i32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Capability {
    Spoofing,
    Block,
    Eavesdrop,
    ChangeFunctionality,
}

impl Capability {
    pub const ALL: [Capability; 4] = [
        Capability::Spoofing,
        Capability::Block,
        Capability::Eavesdrop,
        Capability::ChangeFunctionality,
    ];

    pub fn channel(self) -> &'static str {
        match self {
            Capability::Spoofing => "spoofing",
            Capability::Block => "block",
            Capability::Eavesdrop => "eavesdrop",
            Capability::ChangeFunctionality => "change_functionality",
        }
    }

    pub fn from_channel(channel: &str) -> Option<Capability> {
        Capability::ALL.into_iter().find(|c| c.channel() == channel)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ThreatActor {
    OwnerDriver,
    EvilMechanic,
    Thief,
    RemoteAttacker,
}

impl ThreatActor {
    pub const ALL: [ThreatActor; 4] = [
        ThreatActor::OwnerDriver,
        ThreatActor::EvilMechanic,
        ThreatActor::Thief,
        ThreatActor::RemoteAttacker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThreatActor::OwnerDriver => "OwnerDriver",
            ThreatActor::EvilMechanic => "EvilMechanic",
            ThreatActor::Thief => "Thief",
            ThreatActor::RemoteAttacker => "RemoteAttacker",
        }
    }

    pub fn capabilities(self) -> BTreeSet<Capability> {
        use Capability::*;
        match self {
            ThreatActor::OwnerDriver => Capability::ALL.into(),
            ThreatActor::Thief | ThreatActor::RemoteAttacker => [Spoofing, Block, Eavesdrop].into(),
            ThreatActor::EvilMechanic => [ChangeFunctionality].into(),
        }
    }
}

/// Channel names the actor may use.
pub fn actor_capabilities(actor: ThreatActor) -> BTreeSet<&'static str> {
    actor.capabilities().into_iter().map(Capability::channel).collect()
}

impl fmt::Display for ThreatActor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown threat actor `{0}`")]
pub struct UnknownActor(pub String);

impl FromStr for ThreatActor {
    type Err = UnknownActor;

    /// Accepts `OwnerDriver`, `owner_driver` and `owner-driver` alike.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| *c != '_' && *c != '-').collect();
        ThreatActor::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(&key))
            .ok_or_else(|| UnknownActor(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AutomodelsError {
    #[error("attack path is empty")]
    EmptyAttackPath,
    #[error("the {side} shares no event with the attack path")]
    EmptyRestriction { side: &'static str },
    #[error("attacker uses `{channel}`, which {actor} cannot")]
    CapabilityViolation { actor: ThreatActor, channel: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// How the attack path restricts the two sides of the composition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CompositionMode {
    /// Both sides get the attack path as their alphabet.
    #[default]
    Literal,
    /// Each side gets the part of the attack path it can perform.
    SharedOnly,
}

fn event(name: &str) -> Event {
    Event::named(name)
}

fn bus_domain() -> Vec<Value> {
    domain(ALL_BUSES.iter().map(|b| Value::atom(*b)))
}

fn choice_of_stops(events: &[&str]) -> Term {
    Process::ext_choice_all(events.iter().map(|e| Process::prefix(event(e), Process::stop())))
}

fn link(first: &str, body: Term) -> Term {
    Process::prefix(event(first), body)
}

/// The network model plus the full attacker and `Attack1`.
pub fn builtin_env() -> Environment {
    let mut env = Environment::new();
    env.declare_set("All_Buses", ALL_BUSES.iter().map(|b| vec![Value::atom(*b)]).collect());
    let path: SetItems = [
        vec![Value::atom("gateway_canhs1")],
        vec![Value::atom("engine_cu")],
        vec![Value::atom("spoofing"), Value::atom("engine_cu"), Value::int(2)],
    ]
    .into();
    env.declare_set("AttackPath", path);

    for name in LINKS.iter().chain(&ALL_BUSES) {
        env.declare_channel(*name, vec![]);
    }
    env.declare_channel("spoofing", vec![bus_domain(), int_range(0, MAX_PAYLOAD)]);
    for cap in &Capability::ALL[1..] {
        env.declare_channel(cap.channel(), vec![bus_domain()]);
    }

    let r = Process::reference;
    env.define(
        "GATEWAY",
        Process::ext_choice_all([
            link("gateway_canhs1", r("CANHS1")),
            link("gateway_canhs2", r("CANHS2")),
            link("gateway_canls", r("CANLS")),
            link("gateway_flexray", r("FLEXRAY")),
        ]),
    );
    env.define(
        "CANHS1",
        link("gateway_canhs1", choice_of_stops(&["engine_cu", "gearbox", "head_unit"])),
    );
    env.define(
        "CANHS2",
        link(
            "gateway_canhs2",
            Process::ext_choice(
                Process::prefix(event("can_ecu30"), Process::stop()),
                link("canhs_most", r("MOST")),
            ),
        ),
    );
    env.define(
        "CANLS",
        link(
            "gateway_canls",
            Process::ext_choice(
                Process::prefix(event("can_ecu32"), Process::stop()),
                link("canls_lin", r("LIN")),
            ),
        ),
    );
    env.define("FLEXRAY", link("gateway_flexray", choice_of_stops(&["video", "radar"])));
    env.define("MOST", link("canhs_most", choice_of_stops(&["dvd", "mp3", "radio", "media"])));
    env.define("LIN", link("canls_lin", choice_of_stops(&["lin_sensor", "lin_actuator"])));

    let all: Vec<&str> = ALL_BUSES.to_vec();
    env.define(
        "Attacker",
        attacker_body("Attacker", &all, &(0..=MAX_PAYLOAD).collect::<Vec<_>>(), &Capability::ALL),
    );
    let attack_path = attack_path_events(&env);
    env.define(
        "Attack1",
        Process::alpha_parallel(r("Attacker"), attack_path.clone(), attack_path, r("GATEWAY")),
    );
    env
}

/// The `AttackPath` set of `env` read as events.
fn attack_path_events(env: &Environment) -> EventSet {
    env.sets
        .get("AttackPath")
        .map(|items| {
            items
                .iter()
                .filter_map(|p| match p.split_first() {
                    Some((Value::Atom(c), rest)) => Some(Event::visible(c.clone(), rest.to_vec())),
                    _ => None,
                })
                .collect()
        })
        .unwrap_or_default()
}

/// Body of a looping attacker named `name`: an external choice over one
/// input-prefix branch per capability, each returning to `name`. Channels
/// must be declared with the full bus and payload domains.
pub fn attacker_body(name: &str, buses: &[&str], payloads: &[i32], capabilities: &[Capability]) -> Term {
    let buses = domain(buses.iter().map(|b| Value::atom(*b)));
    let payloads = domain(payloads.iter().copied().map(Value::Int));
    let caps: BTreeSet<Capability> = capabilities.iter().copied().collect();
    Process::ext_choice_all(caps.into_iter().map(|cap| {
        let mut fields = vec![Field::In {
            var: "b".into(),
            domain: buses.clone(),
        }];
        if cap == Capability::Spoofing {
            fields.push(Field::In {
                var: "c".into(),
                domain: payloads.clone(),
            });
        }
        Process::prefix_fields(cap.channel(), fields, Process::reference(name))
    }))
}

/// An attacker restricted to `buses` and `payloads`, with all four
/// capabilities. Returns the built-in environment with the attacker added
/// as `name`, and a reference to it.
pub fn attacker_process(buses: &[&str], payloads: &[i32]) -> (Environment, Term) {
    let mut env = builtin_env();
    let name = "RestrictedAttacker";
    env.define(name, attacker_body(name, buses, payloads, &Capability::ALL));
    (env, Process::reference(name))
}

/// An attacker composed with a system under an attack path.
#[derive(Clone, Debug)]
pub struct AttackScenario {
    pub name: String,
    pub env: Environment,
    pub attacker: Term,
    pub system: Term,
    pub attack_path: EventSet,
    pub mode: CompositionMode,
    pub actor: Option<ThreatActor>,
}

impl AttackScenario {
    /// The full attacker against `GATEWAY` on `AttackPath`.
    pub fn attack1(mode: CompositionMode) -> Self {
        let env = builtin_env();
        let attack_path = attack_path_events(&env);
        AttackScenario {
            name: "attack1".into(),
            env,
            attacker: Process::reference("Attacker"),
            system: Process::reference("GATEWAY"),
            attack_path,
            mode,
            actor: None,
        }
    }

    pub fn builtin(name: &str, mode: CompositionMode) -> Result<Self, AutomodelsError> {
        match name.to_ascii_lowercase().as_str() {
            "attack1" => Ok(Self::attack1(mode)),
            _ => Err(AutomodelsError::UnknownScenario(name.to_string())),
        }
    }

    /// Replaces the attacker by one limited to the actor's capabilities over
    /// every bus and payload.
    pub fn with_actor(mut self, actor: ThreatActor) -> Self {
        let name = format!("Attacker_{}", actor.name());
        let caps: Vec<Capability> = actor.capabilities().into_iter().collect();
        let body = attacker_body(&name, &ALL_BUSES, &(0..=MAX_PAYLOAD).collect::<Vec<_>>(), &caps);
        self.env.define(name.clone(), body);
        self.attacker = Process::reference(name);
        self.actor = Some(actor);
        self
    }

    /// Channels the attacker side can use.
    pub fn attacker_channels(&self) -> Result<BTreeSet<String>, KernelError> {
        Ok(alphabet(&self.attacker, &self.env)?
            .iter()
            .filter_map(|e| e.channel().map(str::to_string))
            .collect())
    }
}

/// Builds the alphabetised parallel composition of the scenario.
pub fn compose_attack(s: &AttackScenario) -> Result<Term, AutomodelsError> {
    if s.attack_path.is_empty() {
        return Err(AutomodelsError::EmptyAttackPath);
    }
    if let Some(actor) = s.actor {
        let allowed = actor_capabilities(actor);
        if let Some(channel) = s.attacker_channels()?.into_iter().find(|c| !allowed.contains(c.as_str())) {
            return Err(AutomodelsError::CapabilityViolation { actor, channel });
        }
    }
    let (left, right) = match s.mode {
        CompositionMode::Literal => (s.attack_path.clone(), s.attack_path.clone()),
        CompositionMode::SharedOnly => {
            let a = alphabet(&s.attacker, &s.env)?;
            let b = alphabet(&s.system, &s.env)?;
            let left: EventSet = s.attack_path.intersection(&a).cloned().collect();
            let right: EventSet = s.attack_path.intersection(&b).cloned().collect();
            if left.is_empty() {
                return Err(AutomodelsError::EmptyRestriction { side: "attacker" });
            }
            if right.is_empty() {
                return Err(AutomodelsError::EmptyRestriction { side: "system" });
            }
            (left, right)
        }
    };
    Ok(Process::alpha_parallel(s.attacker.clone(), left, right, s.system.clone()))
}

/// True when the event belongs to an attacker capability channel.
pub fn is_attacker_event(event: &Event) -> bool {
    event.channel().and_then(Capability::from_channel).is_some()
}

/// Bus atom targeted by an attacker event.
pub fn target_bus(event: &Event) -> Option<&str> {
    if !is_attacker_event(event) {
        return None;
    }
    match event.components().first() {
        Some(Value::Atom(b)) => Some(b),
        _ => None,
    }
}
