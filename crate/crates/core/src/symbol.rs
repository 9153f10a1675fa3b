//! Interned identifiers for agents, atoms, worlds, decision points and events.

use std::fmt;
use std::sync::Arc;

macro_rules! symbol {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: impl AsRef<str>) -> Self {
                let name = name.as_ref();
                debug_assert!(!name.is_empty(), concat!(stringify!($name), " must be non-empty"));
                $name(Arc::from(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), &*self.0)
            }
        }

        impl serde::Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }
    };
}

symbol!(
    /// An agent name.
    AgentId
);
symbol!(
    /// A propositional atom.
    PropId
);
symbol!(
    /// A world name, unique within one model.
    WorldId
);
symbol!(
    /// Identifier of a declared decision point.
    PointId
);
symbol!(
    /// Name of an event inside its decision point.
    EventName
);

/// One choice: an event of a decision point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub point: PointId,
    pub event: EventName,
}

impl Step {
    pub fn new(point: impl AsRef<str>, event: impl AsRef<str>) -> Self {
        Step {
            point: PointId::new(point),
            event: EventName::new(event),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.point, self.event)
    }
}

impl fmt::Debug for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A sequence of steps, i.e. a composed action `a;b;...`.
///
/// Traces inside formulas are non-empty; the empty trace only appears as the
/// history of a world of an un-updated model.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventTrace(pub Vec<Step>);

impl EventTrace {
    pub fn empty() -> Self {
        EventTrace(Vec::new())
    }

    pub fn single(step: Step) -> Self {
        EventTrace(vec![step])
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&Step> {
        self.0.last()
    }

    /// All steps but the last.
    pub fn prefix(&self) -> EventTrace {
        match self.0.split_last() {
            Some((_, init)) => EventTrace(init.to_vec()),
            None => EventTrace::empty(),
        }
    }

    pub fn concat(&self, other: &EventTrace) -> EventTrace {
        let mut steps = self.0.clone();
        steps.extend(other.0.iter().cloned());
        EventTrace(steps)
    }

    pub fn push(&self, step: Step) -> EventTrace {
        let mut steps = self.0.clone();
        steps.push(step);
        EventTrace(steps)
    }

    pub fn starts_with(&self, other: &EventTrace) -> bool {
        self.0.starts_with(&other.0)
    }

    pub fn common_prefix_len(&self, other: &EventTrace) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }
}

impl fmt::Display for EventTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, step) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for EventTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl From<Step> for EventTrace {
    fn from(step: Step) -> Self {
        EventTrace::single(step)
    }
}
