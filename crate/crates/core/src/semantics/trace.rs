use std::cmp::Ordering;
use std::fmt;

use crate::kernel::Event;

/// A finite sequence of visible events, optionally ending in tick.
///
/// Traces order shortest first, then lexicographically by canonical event
/// order, so a `BTreeSet<Trace>` iterates in canonical listing order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Trace(Vec<Event>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    /// Panics if `events` contains tau or a tick before the end.
    pub fn new(events: Vec<Event>) -> Self {
        assert!(!events.contains(&Event::Tau), "tau in trace");
        if let Some(pos) = events.iter().position(|e| *e == Event::Tick) {
            assert_eq!(pos + 1, events.len(), "tick must be last");
        }
        Trace(events)
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_terminated(&self) -> bool {
        self.0.last() == Some(&Event::Tick)
    }

    pub fn extended(&self, event: Event) -> Trace {
        let mut events = self.0.clone();
        events.push(event);
        Trace::new(events)
    }

    pub fn is_prefix_of(&self, other: &Trace) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefixes(&self) -> impl Iterator<Item = Trace> + '_ {
        (0..=self.0.len()).map(|n| Trace(self.0[..n].to_vec()))
    }

    pub fn into_events(self) -> Vec<Event> {
        self.0
    }
}

impl From<Vec<Event>> for Trace {
    fn from(events: Vec<Event>) -> Self {
        Trace::new(events)
    }
}

impl Ord for Trace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Trace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(">")
    }
}
