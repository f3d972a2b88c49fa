use std::fmt;

/// A data value carried on a channel.
///
/// Integers order before atoms; within a kind the natural order applies.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i32),
    Atom(String),
}

/// Returns true when `s` is a lowercase identifier (`[a-z][A-Za-z0-9_]*`).
pub fn is_lower_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Returns true when `s` is an uppercase identifier (`[A-Z][A-Za-z0-9_]*`).
pub fn is_upper_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('A'..='Z'))
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Value {
    /// Builds an atom. Panics if `name` is not a lowercase identifier.
    pub fn atom(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(is_lower_ident(&name), "invalid atom `{name}`");
        Value::Atom(name)
    }

    pub fn int(n: i32) -> Self {
        Value::Int(n)
    }

    /// Parses the textual form used by `args=` lists and the printer.
    pub fn parse(text: &str) -> Option<Self> {
        if is_lower_ident(text) {
            return Some(Value::Atom(text.to_string()));
        }
        text.parse::<i32>().ok().map(Value::Int)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Atom(a) => f.write_str(a),
        }
    }
}

/// A transition label.
///
/// The derived order is the canonical event order used everywhere: visible
/// events by channel name then components, followed by tick and tau.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Visible {
        channel: String,
        components: Vec<Value>,
    },
    Tick,
    Tau,
}

impl Event {
    pub fn visible(channel: impl Into<String>, components: Vec<Value>) -> Self {
        let channel = channel.into();
        assert!(is_lower_ident(&channel), "invalid channel `{channel}`");
        Event::Visible {
            channel,
            components,
        }
    }

    /// A visible event without data components.
    pub fn named(channel: impl Into<String>) -> Self {
        Event::visible(channel, Vec::new())
    }

    pub fn is_visible(&self) -> bool {
        matches!(self, Event::Visible { .. })
    }

    pub fn channel(&self) -> Option<&str> {
        match self {
            Event::Visible { channel, .. } => Some(channel),
            _ => None,
        }
    }

    pub fn components(&self) -> &[Value] {
        match self {
            Event::Visible { components, .. } => components,
            _ => &[],
        }
    }

    /// Parses the dotted form `chan.v1.v2`, or `tick`.
    pub fn parse(text: &str) -> Option<Self> {
        if text == "tick" {
            return Some(Event::Tick);
        }
        let mut parts = text.split('.');
        let channel = parts.next()?;
        if !is_lower_ident(channel) {
            return None;
        }
        let components = parts.map(Value::parse).collect::<Option<Vec<_>>>()?;
        Some(Event::visible(channel, components))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Visible {
                channel,
                components,
            } => {
                f.write_str(channel)?;
                for c in components {
                    write!(f, ".{c}")?;
                }
                Ok(())
            }
            Event::Tick => f.write_str("tick"),
            Event::Tau => f.write_str("tau"),
        }
    }
}
