use fairbandit_core::{EnvSpec, FairnessConfig};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::regret::pseudo_regret_curve;
use crate::trace::RunTrace;

/// One row per step `t` of the aggregated curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub t: u64,
    /// Mean cumulative pseudo-regret over runs.
    pub mean_regret: f64,
    /// Standard error of that mean (0 for a single run).
    pub stderr: f64,
    /// Mean over runs of `n_t(i) / t`, per arm.
    pub pull_fraction: Vec<f64>,
    /// Minimum over runs of `n_t(i)`, per arm.
    pub min_pulls: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub num_arms: usize,
    pub rows: Vec<CurveRow>,
}

impl AggregateStats {
    pub fn final_row(&self) -> Option<&CurveRow> {
        self.rows.last()
    }
}

/// Streaming fold of traces in a fixed order.
///
/// Regret moments use Welford's update, so the result depends only on the
/// sequence of pushed traces.
#[derive(Debug, Clone)]
pub struct Accumulator {
    num_arms: usize,
    horizon: u64,
    runs: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    fraction_sum: Vec<Vec<f64>>,
    min_pulls: Vec<Vec<u64>>,
}

impl Accumulator {
    pub fn new(num_arms: usize, horizon: u64) -> Self {
        let t = horizon as usize;
        Self {
            num_arms,
            horizon,
            runs: 0,
            mean: vec![0.0; t],
            m2: vec![0.0; t],
            fraction_sum: vec![vec![0.0; num_arms]; t],
            min_pulls: vec![vec![u64::MAX; num_arms]; t],
        }
    }

    pub fn push(
        &mut self,
        trace: &RunTrace,
        env: &EnvSpec,
        cfg: &FairnessConfig,
    ) -> Result<(), HarnessError> {
        if trace.horizon() != self.horizon {
            return Err(HarnessError::InconsistentTraces("horizon"));
        }
        if trace.num_arms != self.num_arms {
            return Err(HarnessError::InconsistentTraces("arm count"));
        }
        let curve = pseudo_regret_curve(trace, env, cfg)?;
        self.runs += 1;
        let n = self.runs as f64;
        for (i, &x) in curve.iter().enumerate() {
            let delta = x - self.mean[i];
            self.mean[i] += delta / n;
            self.m2[i] += delta * (x - self.mean[i]);
        }
        let mut counts = vec![0u64; self.num_arms];
        for (i, step) in trace.steps.iter().enumerate() {
            counts[step.decision.arm.index()] += 1;
            let t = (i + 1) as f64;
            for (a, &c) in counts.iter().enumerate() {
                self.fraction_sum[i][a] += c as f64 / t;
                self.min_pulls[i][a] = self.min_pulls[i][a].min(c);
            }
        }
        Ok(())
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn finish(self) -> Result<AggregateStats, HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::EmptyInput);
        }
        let n = self.runs as f64;
        let rows = (0..self.horizon as usize)
            .map(|i| {
                let stderr = if self.runs > 1 {
                    (self.m2[i] / (n - 1.0)).sqrt() / n.sqrt()
                } else {
                    0.0
                };
                CurveRow {
                    t: i as u64 + 1,
                    mean_regret: self.mean[i],
                    stderr,
                    pull_fraction: self.fraction_sum[i].iter().map(|s| s / n).collect(),
                    min_pulls: self.min_pulls[i].clone(),
                }
            })
            .collect();
        Ok(AggregateStats {
            num_arms: self.num_arms,
            rows,
        })
    }
}

/// Mean/stderr of cumulative regret, mean pull fractions and minimum pull
/// counts at every step, over homogeneous traces.
pub fn aggregate(
    traces: &[RunTrace],
    env: &EnvSpec,
    cfg: &FairnessConfig,
) -> Result<AggregateStats, HarnessError> {
    let first = traces.first().ok_or(HarnessError::EmptyInput)?;
    let mut acc = Accumulator::new(first.num_arms, first.horizon());
    for t in traces {
        acc.push(t, env, cfg)?;
    }
    acc.finish()
}
