use serde::{Deserialize, Serialize};
use std::fmt;

/// Verdict of a budget-limited search over an infinite object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "lowercase")]
pub enum TriBool {
    True,
    False,
    Unknown(String),
}

impl TriBool {
    pub fn unknown(reason: impl Into<String>) -> Self {
        TriBool::Unknown(reason.into())
    }

    pub fn is_true(&self) -> bool {
        matches!(self, TriBool::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, TriBool::False)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, TriBool::Unknown(_))
    }

    pub fn known(&self) -> Option<bool> {
        match self {
            TriBool::True => Some(true),
            TriBool::False => Some(false),
            TriBool::Unknown(_) => None,
        }
    }

    /// Kleene conjunction.
    pub fn and(self, other: TriBool) -> TriBool {
        match (self, other) {
            (TriBool::False, _) | (_, TriBool::False) => TriBool::False,
            (TriBool::True, TriBool::True) => TriBool::True,
            (TriBool::Unknown(r), _) | (_, TriBool::Unknown(r)) => TriBool::Unknown(r),
        }
    }

    /// Kleene disjunction.
    pub fn or(self, other: TriBool) -> TriBool {
        match (self, other) {
            (TriBool::True, _) | (_, TriBool::True) => TriBool::True,
            (TriBool::False, TriBool::False) => TriBool::False,
            (TriBool::Unknown(r), _) | (_, TriBool::Unknown(r)) => TriBool::Unknown(r),
        }
    }

    pub fn not(self) -> TriBool {
        match self {
            TriBool::True => TriBool::False,
            TriBool::False => TriBool::True,
            u => u,
        }
    }
}

impl From<bool> for TriBool {
    fn from(b: bool) -> Self {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriBool::True => f.write_str("true"),
            TriBool::False => f.write_str("false"),
            TriBool::Unknown(r) => write!(f, "unknown ({r})"),
        }
    }
}
