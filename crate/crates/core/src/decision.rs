use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arm::ArmId;

/// Why an arm was pulled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// One of the first `K` steps, pulling arm `t` at step `t`.
    Init,
    /// A reserved slot of the strict policy's block schedule.
    Prescheduled,
    /// The arm maximizing the UCB index.
    UcbArgmax,
    /// The stochastic policy's uniform draw over all arms.
    UniformDraw,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Init => "init",
            Provenance::Prescheduled => "prescheduled",
            Provenance::UcbArgmax => "ucb-argmax",
            Provenance::UniformDraw => "uniform-draw",
        }
    }

    pub fn slot_class(self) -> SlotClass {
        match self {
            Provenance::Init => SlotClass::Init,
            Provenance::Prescheduled => SlotClass::Prescheduled,
            Provenance::UcbArgmax | Provenance::UniformDraw => SlotClass::Free,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coarse classification of a step for regret accounting: free slots form the
/// index set the strict regret is summed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotClass {
    Init,
    Prescheduled,
    Free,
}

/// One allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub arm: ArmId,
    pub provenance: Provenance,
    /// The UCB argmax at this step, recorded even when another arm was pulled.
    /// `None` during initialization, when some arm has no index yet.
    pub ucb_argmax_arm: Option<ArmId>,
}

impl Decision {
    pub fn init(arm: ArmId) -> Self {
        Self {
            arm,
            provenance: Provenance::Init,
            ucb_argmax_arm: None,
        }
    }
}

/// Which allocation rule drives an episode or session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Strict,
    Stochastic,
    #[serde(alias = "ucb")]
    Unconstrained,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Strict => "strict",
            PolicyKind::Stochastic => "stochastic",
            PolicyKind::Unconstrained => "unconstrained",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(PolicyKind::Strict),
            "stochastic" => Ok(PolicyKind::Stochastic),
            "ucb" | "unconstrained" => Ok(PolicyKind::Unconstrained),
            other => Err(format!("unknown policy {other:?}")),
        }
    }
}
