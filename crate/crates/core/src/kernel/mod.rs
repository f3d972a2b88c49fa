//! Process terms, their operational semantics, and explicit state spaces.

mod alphabet;
mod env;
mod event;
mod guard;
mod lts;
mod step;
mod term;

use thiserror::Error;

pub use alphabet::alphabet;
pub use env::{domain, int_range, Domain, Environment, SetItems};
pub use event::{is_lower_ident, is_upper_ident, Event, Value};
pub use guard::check_guarded;
pub use lts::{build_lts, Limits, Lts, StateId, Transition};
pub use step::{initials, step, Move};
pub use term::{Component, EventSet, Field, Process, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("reference to undefined process `{0}`")]
    UnboundReference(String),
    #[error("unguarded recursion through {}", .0.join(" -> "))]
    UnguardedRecursion(Vec<String>),
    #[error("variable `{0}` is not bound by any input prefix")]
    FreeVariable(String),
    #[error("undeclared channel `{0}`")]
    UnknownChannel(String),
    #[error("channel `{channel}` expects {expected} component(s), found {found}")]
    ArityMismatch {
        channel: String,
        expected: usize,
        found: usize,
    },
    #[error("value `{value}` is outside the domain of component {index} of channel `{channel}`")]
    ValueOutOfDomain {
        channel: String,
        index: usize,
        value: Value,
    },
}
