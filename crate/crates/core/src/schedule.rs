//! Preschedule blocks for the strict policy.
//!
//! After the `K` initialization steps, time is cut into blocks of `d = 1/v`
//! steps starting at `tau_1 = K + 1`. Inside every block the offsets in `S`
//! (a `K`-subset of `1..=d`) are reserved, offset `o` always going to arm
//! `g(o)`. The remaining offsets are free for the UCB argmax.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arm::ArmId;
use crate::config::FairnessConfig;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("v = 0 has no preschedule blocks")]
    Unconstrained,
    #[error("invalid slots {slots:?}: need {num_arms} distinct offsets in 1..={block_length}")]
    InvalidSlots {
        slots: Vec<u64>,
        num_arms: usize,
        block_length: u64,
    },
    #[error("slot assignment is not a bijection onto arms 1..={num_arms}")]
    NotBijective { num_arms: usize },
    #[error("schedule count overflows u64")]
    Overflow,
}

/// The `(S, g)` pair plus block geometry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct Schedule {
    block_length: u64,
    first_block_start: u64,
    /// `(offset, g(offset))` sorted by offset.
    reserved: Vec<(u64, ArmId)>,
}

#[derive(Serialize, Deserialize)]
struct RawSchedule {
    block_length: u64,
    slots: Vec<u64>,
    assignment: BTreeMap<u64, ArmId>,
    first_block_start: u64,
}

impl TryFrom<RawSchedule> for Schedule {
    type Error = ScheduleError;

    fn try_from(raw: RawSchedule) -> Result<Self, Self::Error> {
        let num_arms = raw.slots.len();
        if raw.first_block_start != num_arms as u64 + 1 {
            return Err(ScheduleError::InvalidSlots {
                slots: raw.slots,
                num_arms,
                block_length: raw.block_length,
            });
        }
        let mut arms = Vec::with_capacity(num_arms);
        for slot in &raw.slots {
            match raw.assignment.get(slot) {
                Some(arm) => arms.push(*arm),
                None => return Err(ScheduleError::NotBijective { num_arms }),
            }
        }
        if raw.assignment.len() != num_arms {
            return Err(ScheduleError::NotBijective { num_arms });
        }
        Schedule::from_parts(num_arms, raw.block_length, &raw.slots, &arms)
    }
}

impl From<Schedule> for RawSchedule {
    fn from(s: Schedule) -> Self {
        RawSchedule {
            block_length: s.block_length,
            slots: s.slots(),
            assignment: s.assignment(),
            first_block_start: s.first_block_start,
        }
    }
}

impl Schedule {
    /// Builds the schedule for `cfg`. Omitted slots default to the evenly
    /// spaced offsets `1 + m*floor(d/K)`; an omitted assignment maps the
    /// slots, in ascending order, to arms `1..=K`. A given assignment is
    /// aligned with the (given or default) slot list.
    pub fn build(
        cfg: &FairnessConfig,
        slots: Option<&[u64]>,
        assignment: Option<&[ArmId]>,
    ) -> Result<Self, ScheduleError> {
        let d = cfg.block_length().ok_or(ScheduleError::Unconstrained)?;
        let k = cfg.num_arms();
        let slots: Vec<u64> = match slots {
            Some(s) => s.to_vec(),
            None => default_slots(k, d),
        };
        let arms: Vec<ArmId> = match assignment {
            Some(a) => a.to_vec(),
            None => {
                let mut order: Vec<usize> = (0..slots.len()).collect();
                order.sort_by_key(|&i| slots[i]);
                let mut arms = vec![ArmId::from_index(0); slots.len()];
                for (rank, &i) in order.iter().enumerate() {
                    arms[i] = ArmId::from_index(rank);
                }
                arms
            }
        };
        Self::from_parts(k, d, &slots, &arms)
    }

    /// `slots[i]` is reserved for `arms[i]`.
    pub fn from_parts(
        num_arms: usize,
        block_length: u64,
        slots: &[u64],
        arms: &[ArmId],
    ) -> Result<Self, ScheduleError> {
        let invalid = || ScheduleError::InvalidSlots {
            slots: slots.to_vec(),
            num_arms,
            block_length,
        };
        if num_arms == 0 || slots.len() != num_arms || block_length < num_arms as u64 {
            return Err(invalid());
        }
        if arms.len() != num_arms {
            return Err(ScheduleError::NotBijective { num_arms });
        }
        let mut reserved: Vec<(u64, ArmId)> = slots.iter().copied().zip(arms.iter().copied()).collect();
        reserved.sort_by_key(|&(slot, _)| slot);
        if reserved
            .iter()
            .enumerate()
            .any(|(i, &(slot, _))| slot == 0 || slot > block_length || (i > 0 && reserved[i - 1].0 == slot))
        {
            return Err(invalid());
        }
        let mut seen = vec![false; num_arms];
        for &(_, arm) in &reserved {
            if arm.index() >= num_arms || seen[arm.index()] {
                return Err(ScheduleError::NotBijective { num_arms });
            }
            seen[arm.index()] = true;
        }
        Ok(Self {
            block_length,
            first_block_start: num_arms as u64 + 1,
            reserved,
        })
    }

    pub fn block_length(&self) -> u64 {
        self.block_length
    }

    pub fn first_block_start(&self) -> u64 {
        self.first_block_start
    }

    pub fn num_arms(&self) -> usize {
        (self.first_block_start - 1) as usize
    }

    /// Ascending offsets in `S`.
    pub fn slots(&self) -> Vec<u64> {
        self.reserved.iter().map(|&(slot, _)| slot).collect()
    }

    /// `g` as an offset -> arm map.
    pub fn assignment(&self) -> BTreeMap<u64, ArmId> {
        self.reserved.iter().copied().collect()
    }

    /// Start step of block `j >= 1`.
    pub fn block_start(&self, j: u64) -> u64 {
        self.first_block_start + (j - 1) * self.block_length
    }

    /// `(block index j, offset t - tau_j + 1)` for step `t`, or `None` during
    /// the initialization steps.
    pub fn locate(&self, step: u64) -> Option<(u64, u64)> {
        if step < self.first_block_start {
            return None;
        }
        let rel = step - self.first_block_start;
        Some((rel / self.block_length + 1, rel % self.block_length + 1))
    }

    /// The arm reserved for step `t`, if `t` falls on an offset in `S`.
    pub fn prescheduled_arm(&self, step: u64) -> Option<ArmId> {
        let (_, offset) = self.locate(step)?;
        self.reserved
            .binary_search_by_key(&offset, |&(slot, _)| slot)
            .ok()
            .map(|i| self.reserved[i].1)
    }
}

fn default_slots(num_arms: usize, block_length: u64) -> Vec<u64> {
    let spacing = block_length / num_arms as u64;
    (0..num_arms as u64).map(|m| 1 + m * spacing).collect()
}

/// Number of distinct `(S, g)` choices: `d!/(d-K)!`.
pub fn count_schedules(cfg: &FairnessConfig) -> Result<u64, ScheduleError> {
    let d = cfg.block_length().ok_or(ScheduleError::Unconstrained)?;
    let k = cfg.num_arms() as u64;
    ((d - k + 1)..=d).try_fold(1u64, |acc, x| acc.checked_mul(x).ok_or(ScheduleError::Overflow))
}

/// Every `(S, g)` for `cfg`, as ordered choices of one distinct offset per
/// arm, in lexicographic order of `(offset of arm 1, offset of arm 2, ...)`.
pub fn enumerate_schedules(cfg: &FairnessConfig) -> Result<Schedules, ScheduleError> {
    let d = cfg.block_length().ok_or(ScheduleError::Unconstrained)?;
    let k = cfg.num_arms();
    Ok(Schedules {
        num_arms: k,
        block_length: d,
        next: Some((1..=k as u64).collect()),
    })
}

/// Iterator returned by [`enumerate_schedules`].
#[derive(Debug, Clone)]
pub struct Schedules {
    num_arms: usize,
    block_length: u64,
    next: Option<Vec<u64>>,
}

impl Schedules {
    fn advance(&self, current: &[u64]) -> Option<Vec<u64>> {
        let d = self.block_length;
        let k = current.len();
        for pos in (0..k).rev() {
            let used = &current[..pos];
            let candidate = (current[pos] + 1..=d).find(|x| !used.contains(x));
            if let Some(c) = candidate {
                let mut next = current[..pos].to_vec();
                next.push(c);
                let mut fill = 1;
                while next.len() < k {
                    if !next.contains(&fill) {
                        next.push(fill);
                    }
                    fill += 1;
                }
                return Some(next);
            }
        }
        None
    }
}

impl Iterator for Schedules {
    type Item = Schedule;

    fn next(&mut self) -> Option<Schedule> {
        let current = self.next.take()?;
        self.next = self.advance(&current);
        let arms: Vec<ArmId> = (0..self.num_arms).map(ArmId::from_index).collect();
        Some(
            Schedule::from_parts(self.num_arms, self.block_length, &current, &arms)
                .expect("enumerated offsets are distinct and in range"),
        )
    }
}
