use serde::{Deserialize, Serialize};

/// Three-valued verdict for a property. A capped or partial run is never
/// reported as `Holds`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict<W> {
    Holds,
    Fails { witness: W },
    Inconclusive { reason: String },
}

impl<W> Verdict<W> {
    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Fails { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails { .. } => "fails",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// `true`, `false`, or undecided because a cap or budget was hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tristate {
    True,
    False,
    Inconclusive,
}

impl From<Option<bool>> for Tristate {
    fn from(v: Option<bool>) -> Self {
        match v {
            Some(true) => Tristate::True,
            Some(false) => Tristate::False,
            None => Tristate::Inconclusive,
        }
    }
}
