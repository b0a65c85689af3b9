use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifier of one arm (one teammate, when arms are people).
///
/// Stored as a zero-based index; serialized and displayed 1-indexed so that
/// snapshots, traces and HTTP payloads read `1..=K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u32", try_from = "u32")]
pub struct ArmId(usize);

impl ArmId {
    pub const fn from_index(index: usize) -> Self {
        Self(index)
    }

    /// Builds an arm from its 1-based number. Returns `None` for 0.
    pub fn from_number(number: usize) -> Option<Self> {
        number.checked_sub(1).map(Self)
    }

    pub const fn index(self) -> usize {
        self.0
    }

    pub const fn number(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl From<ArmId> for u32 {
    fn from(arm: ArmId) -> u32 {
        arm.number() as u32
    }
}

impl TryFrom<u32> for ArmId {
    type Error = String;

    fn try_from(number: u32) -> Result<Self, Self::Error> {
        ArmId::from_number(number as usize).ok_or_else(|| "arm numbers start at 1".to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_one_indexed() {
        let arm = ArmId::from_index(0);
        assert_eq!(serde_json::to_string(&arm).unwrap(), "1");
        let back: ArmId = serde_json::from_str("3").unwrap();
        assert_eq!(back.index(), 2);
        assert!(serde_json::from_str::<ArmId>("0").is_err());
    }
}
