//! Seeded Monte-Carlo experiments for the rate-constrained UCB policies:
//! episode simulation, regret accounting under both benchmarks, curve
//! aggregation, invariant fuzzing, a naive oracle for tiny instances, and
//! CSV/JSON export.

pub mod aggregate;
pub mod error;
pub mod experiment;
pub mod export;
pub mod fuzz;
pub mod oracle;
pub mod regret;
pub mod trace;

pub use aggregate::{aggregate, Accumulator, AggregateStats, CurveRow};
pub use error::HarnessError;
pub use experiment::{run_episode, run_experiment, ExperimentConfig};
pub use export::{export, import, read_csv, read_json, write_csv, write_json, ExportFormat};
pub use fuzz::{
    fairness_fuzz, fairness_fuzz_with, regret_fuzz, sample_instance, Counterexample, FuzzInstance,
    FuzzReport, Selector,
};
pub use oracle::{
    brute_force_oracle, oracle_sweep, tiny_instance, OracleMismatch, OracleReport,
    ORACLE_MAX_HORIZON,
};
pub use regret::{
    pseudo_regret_curve, regret_report, stochastic_regret, stochastic_regret_curve, strict_regret,
    strict_regret_curve, RegretReport,
};
pub use trace::{RunTrace, StepRecord};
