use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The two verification properties a benchmark can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Property {
    /// Every assertion holds on every execution.
    ReachSafety,
    /// No runtime exception escapes.
    ExceptionProperty,
}

impl Property {
    pub const ALL: [Property; 2] = [Property::ReachSafety, Property::ExceptionProperty];

    pub fn name(self) -> &'static str {
        match self {
            Property::ReachSafety => "ReachSafety",
            Property::ExceptionProperty => "ExceptionProperty",
        }
    }

    /// Reference to the competition-provided property file, relative to a
    /// benchmark's task definition.
    pub fn property_file(self) -> &'static str {
        match self {
            Property::ReachSafety => "../properties/assert.prp",
            Property::ExceptionProperty => "../properties/runtime-exception.prp",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown property `{0}`")]
pub struct UnknownProperty(pub String);

impl FromStr for Property {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownProperty(s.to_string()))
    }
}

/// Parses the lowercase verdict spellings `true` and `false`.
pub fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}
