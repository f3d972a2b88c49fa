use std::collections::BTreeSet;
use std::sync::Arc;

use indexmap::IndexMap;

use super::event::{Event, Value};
use super::term::{Component, Field, Process, Term};
use super::{check_guarded, KernelError};

/// A finite set of values, kept sorted and duplicate free.
pub type Domain = Vec<Value>;

/// Elements of a declared `set`: dotted value paths. A path of length one is
/// a plain value; longer paths (`spoofing.engine_cu.2`) denote events.
pub type SetItems = BTreeSet<Vec<Value>>;

/// Process definitions plus the declarations they are checked against.
///
/// Maps keep declaration order so printing follows the source layout.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    pub sets: IndexMap<String, SetItems>,
    pub channels: IndexMap<String, Vec<Domain>>,
    pub definitions: IndexMap<String, Term>,
}

/// Sorts and deduplicates a value list into a [`Domain`].
pub fn domain(values: impl IntoIterator<Item = Value>) -> Domain {
    let set: BTreeSet<Value> = values.into_iter().collect();
    set.into_iter().collect()
}

pub fn int_range(lo: i32, hi: i32) -> Domain {
    (lo..=hi).map(Value::Int).collect()
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn definition(&self, name: &str) -> Option<&Term> {
        self.definitions.get(name)
    }

    pub fn define(&mut self, name: impl Into<String>, body: Term) -> &mut Self {
        self.definitions.insert(name.into(), body);
        self
    }

    pub fn declare_channel(&mut self, name: impl Into<String>, domains: Vec<Domain>) -> &mut Self {
        self.channels.insert(name.into(), domains);
        self
    }

    pub fn declare_set(&mut self, name: impl Into<String>, items: SetItems) -> &mut Self {
        self.sets.insert(name.into(), items);
        self
    }

    /// A declared set read as a value domain; `None` if any item is dotted.
    pub fn set_as_domain(&self, name: &str) -> Option<Domain> {
        let items = self.sets.get(name)?;
        items
            .iter()
            .map(|path| match path.as_slice() {
                [v] => Some(v.clone()),
                _ => None,
            })
            .collect()
    }

    /// Every event the channel declaration admits.
    pub fn channel_events(&self, channel: &str) -> Option<Vec<Event>> {
        let domains = self.channels.get(channel)?;
        let mut out = vec![Vec::new()];
        for dom in domains {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Value>| {
                    dom.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v.clone());
                        p
                    })
                })
                .collect();
        }
        Some(out.into_iter().map(|c| Event::visible(channel, c)).collect())
    }

    /// Checks references, channel conformance and guardedness. Collects
    /// every problem found rather than stopping at the first.
    pub fn validate(&self) -> Result<(), Vec<KernelError>> {
        let mut errors = Vec::new();
        for body in self.definitions.values() {
            self.validate_term(body, &mut errors);
            if let Some(v) = body.free_variables().into_iter().next() {
                errors.push(KernelError::FreeVariable(v));
            }
        }
        if errors.is_empty() {
            if let Err(e) = check_guarded(self) {
                errors.push(e);
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    pub(crate) fn validate_term(&self, term: &Term, errors: &mut Vec<KernelError>) {
        match term.as_ref() {
            Process::Stop | Process::Skip => {}
            Process::Ref(name) => {
                if !self.definitions.contains_key(name) {
                    errors.push(KernelError::UnboundReference(name.clone()));
                }
            }
            Process::Prefix {
                channel,
                fields,
                cont,
            } => {
                self.validate_prefix(channel, fields, errors);
                self.validate_term(cont, errors);
            }
            other => {
                match other {
                    Process::GenParallel { sync, .. } => self.validate_event_set(sync, errors),
                    Process::AlphaParallel {
                        left_alpha,
                        right_alpha,
                        ..
                    } => {
                        self.validate_event_set(left_alpha, errors);
                        self.validate_event_set(right_alpha, errors);
                    }
                    _ => {}
                }
                for child in other.children() {
                    self.validate_term(child, errors);
                }
            }
        }
    }

    fn validate_prefix(&self, channel: &str, fields: &[Field], errors: &mut Vec<KernelError>) {
        let Some(domains) = self.channels.get(channel) else {
            errors.push(KernelError::UnknownChannel(channel.to_string()));
            return;
        };
        if domains.len() != fields.len() {
            errors.push(KernelError::ArityMismatch {
                channel: channel.to_string(),
                expected: domains.len(),
                found: fields.len(),
            });
            return;
        }
        for (index, (field, dom)) in fields.iter().zip(domains).enumerate() {
            let values: Vec<&Value> = match field {
                Field::Out(Component::Value(v)) => vec![v],
                Field::Out(Component::Var(_)) => continue,
                Field::In { domain, .. } => domain.iter().collect(),
            };
            for v in values {
                if dom.binary_search(v).is_err() {
                    errors.push(KernelError::ValueOutOfDomain {
                        channel: channel.to_string(),
                        index,
                        value: v.clone(),
                    });
                }
            }
        }
    }

    fn validate_event_set(&self, set: &Arc<super::term::EventSet>, errors: &mut Vec<KernelError>) {
        for event in set.iter() {
            if let Event::Visible {
                channel,
                components,
            } = event
            {
                let fields: Vec<Field> = components
                    .iter()
                    .map(|v| Field::Out(Component::Value(v.clone())))
                    .collect();
                self.validate_prefix(channel, &fields, errors);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_events_enumerate_domains() {
        let mut env = Environment::new();
        env.declare_channel("c", vec![domain([Value::atom("x"), Value::atom("y")]), int_range(0, 2)]);
        env.declare_channel("d", vec![]);
        assert_eq!(env.channel_events("c").unwrap().len(), 6);
        assert_eq!(env.channel_events("d").unwrap(), vec![Event::named("d")]);
        assert!(env.channel_events("e").is_none());
    }

    #[test]
    fn validate_reports_each_problem() {
        let mut env = Environment::new();
        env.declare_channel("a", vec![]);
        env.declare_channel("c", vec![int_range(0, 1)]);
        env.define(
            "P",
            Process::ext_choice(
                Process::prefix(Event::named("b"), Process::stop()),
                Process::ext_choice(
                    Process::prefix(Event::visible("c", vec![Value::int(5)]), Process::reference("Q")),
                    Process::prefix(Event::visible("a", vec![Value::int(0)]), Process::stop()),
                ),
            ),
        );
        let errors = env.validate().unwrap_err();
        assert!(errors.contains(&KernelError::UnknownChannel("b".into())));
        assert!(errors.contains(&KernelError::UnboundReference("Q".into())));
        assert!(errors.iter().any(|e| matches!(e, KernelError::ValueOutOfDomain { .. })));
        assert!(errors.iter().any(|e| matches!(e, KernelError::ArityMismatch { expected: 0, found: 1, .. })));
    }

    #[test]
    fn validate_accepts_guarded_recursion() {
        let mut env = Environment::new();
        env.declare_channel("b", vec![]);
        env.define("B", Process::prefix(Event::named("b"), Process::reference("B")));
        assert_eq!(env.validate(), Ok(()));
    }
}
