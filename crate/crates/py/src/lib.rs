//! Python module `fairbandit`. Arms are 1-based on the Python side.

use fairbandit_core as core;
use fairbandit_core::{ArmId, PolicyKind, Rate};
use fairbandit_sim as sim;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_rate(rate: &str) -> PyResult<Rate> {
    rate.parse().map_err(err)
}

fn parse_policy(policy: &str) -> PyResult<PolicyKind> {
    policy.parse().map_err(err)
}

fn arm(number: usize) -> PyResult<ArmId> {
    ArmId::from_number(number).ok_or_else(|| err(format!("arm {number} is not 1-based")))
}

#[pyclass(name = "FairnessConfig", module = "fairbandit", frozen)]
struct PyFairnessConfig {
    inner: core::FairnessConfig,
}

#[pymethods]
impl PyFairnessConfig {
    /// `rate` is a fraction string such as "1/4", or "0".
    #[new]
    fn new(num_arms: usize, rate: &str, horizon: u64) -> PyResult<Self> {
        let inner = core::FairnessConfig::new(num_arms, parse_rate(rate)?, horizon).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    #[getter]
    fn horizon(&self) -> u64 {
        self.inner.horizon()
    }

    #[getter]
    fn block_length(&self) -> Option<u64> {
        self.inner.block_length()
    }

    #[getter]
    fn min_rate(&self) -> String {
        self.inner.min_rate().to_string()
    }

    #[getter]
    fn exploit_mass(&self) -> f64 {
        self.inner.exploit_mass()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("config serializes")
    }

    fn __repr__(&self) -> String {
        format!(
            "FairnessConfig(num_arms={}, rate='{}', horizon={})",
            self.inner.num_arms(),
            self.inner.min_rate(),
            self.inner.horizon()
        )
    }
}

#[pyclass(name = "Schedule", module = "fairbandit", frozen)]
struct PySchedule {
    inner: core::Schedule,
}

#[pymethods]
impl PySchedule {
    /// Default evenly spaced schedule unless `slots` and `assign` are given.
    #[new]
    #[pyo3(signature = (config, slots=None, assign=None))]
    fn new(
        config: &PyFairnessConfig,
        slots: Option<Vec<u64>>,
        assign: Option<Vec<usize>>,
    ) -> PyResult<Self> {
        let arms = assign
            .map(|a| a.into_iter().map(arm).collect::<PyResult<Vec<_>>>())
            .transpose()?;
        let inner = core::Schedule::build(&config.inner, slots.as_deref(), arms.as_deref())
            .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn block_length(&self) -> u64 {
        self.inner.block_length()
    }

    #[getter]
    fn slots(&self) -> Vec<u64> {
        self.inner.slots()
    }

    /// offset -> arm
    fn assignment(&self) -> Vec<(u64, usize)> {
        self.inner
            .assignment()
            .into_iter()
            .map(|(o, a)| (o, a.number()))
            .collect()
    }

    fn prescheduled_arm(&self, step: u64) -> Option<usize> {
        self.inner.prescheduled_arm(step).map(|a| a.number())
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("schedule serializes")
    }
}

#[pyclass(name = "Decision", module = "fairbandit", frozen)]
struct PyDecision {
    inner: core::Decision,
}

#[pymethods]
impl PyDecision {
    #[getter]
    fn arm(&self) -> usize {
        self.inner.arm.number()
    }

    #[getter]
    fn provenance(&self) -> &'static str {
        self.inner.provenance.as_str()
    }

    #[getter]
    fn ucb_argmax_arm(&self) -> Option<usize> {
        self.inner.ucb_argmax_arm.map(|a| a.number())
    }

    fn __repr__(&self) -> String {
        format!("Decision(arm={}, provenance='{}')", self.arm(), self.provenance())
    }
}

#[pyclass(name = "Allocator", module = "fairbandit")]
struct PyAllocator {
    inner: core::Allocator,
}

#[pymethods]
impl PyAllocator {
    /// `policy` is "strict", "stochastic" or "ucb".
    #[new]
    #[pyo3(signature = (policy, config, seed=0, schedule=None))]
    fn new(
        policy: &str,
        config: &PyFairnessConfig,
        seed: u64,
        schedule: Option<&PySchedule>,
    ) -> PyResult<Self> {
        let rng = core::StreamRng::for_episode(seed, 0, core::Channel::Policy);
        let inner = core::Allocator::new(
            parse_policy(policy)?,
            config.inner,
            schedule.map(|s| s.inner.clone()),
            rng,
        )
        .map_err(err)?;
        Ok(Self { inner })
    }

    fn decide(&mut self) -> PyResult<PyDecision> {
        Ok(PyDecision {
            inner: self.inner.decide().map_err(err)?,
        })
    }

    fn observe(&mut self, decision: &PyDecision, reward: f64) -> PyResult<()> {
        self.inner.observe(&decision.inner, reward).map_err(err)
    }

    #[getter]
    fn clock(&self) -> u64 {
        self.inner.state().clock()
    }

    #[getter]
    fn is_finished(&self) -> bool {
        self.inner.is_finished()
    }

    #[getter]
    fn pull_counts(&self) -> Vec<u64> {
        self.inner.state().pull_counts()
    }

    #[getter]
    fn nonprescheduled_pull_counts(&self) -> Vec<u64> {
        self.inner.state().nonprescheduled_pull_counts()
    }

    fn empirical_means(&self) -> PyResult<Vec<f64>> {
        (0..self.inner.config().num_arms())
            .map(|i| self.inner.state().empirical_mean(ArmId::from_index(i)).map_err(err))
            .collect()
    }

    fn ucb_indices(&self) -> PyResult<Vec<f64>> {
        let horizon = self.inner.config().horizon();
        (0..self.inner.config().num_arms())
            .map(|i| {
                self.inner
                    .state()
                    .ucb_index(ArmId::from_index(i), horizon)
                    .map_err(err)
            })
            .collect()
    }

    /// Full state, including the random stream position.
    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("allocator serializes")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: serde_json::from_str(text).map_err(err)?,
        })
    }
}

#[pyfunction]
fn count_schedules(num_arms: usize, rate: &str) -> PyResult<u64> {
    let cfg = core::FairnessConfig::new(num_arms, parse_rate(rate)?, num_arms.max(1) as u64)
        .map_err(err)?;
    core::count_schedules(&cfg).map_err(err)
}

#[pyfunction]
fn min_pull_lower_bound(t: u64, config: &PyFairnessConfig) -> u64 {
    core::min_pull_lower_bound(t, &config.inner)
}

#[pyfunction]
#[pyo3(signature = (cumulative_score, turns, normalizer=core::DEFAULT_SCORE_NORMALIZER))]
fn teammate_reward(cumulative_score: f64, turns: u64, normalizer: f64) -> PyResult<f64> {
    core::teammate_reward(&core::TeammateScore {
        cumulative_score,
        turns,
        normalizer,
    })
    .map_err(err)
}

/// Bernoulli arms with the given means. Returns per-step curves.
#[pyfunction]
#[pyo3(signature = (policy, means, rate, horizon, runs, seed=0, env_seed=0))]
#[allow(clippy::too_many_arguments)]
fn run_experiment<'py>(
    py: Python<'py>,
    policy: &str,
    means: Vec<f64>,
    rate: &str,
    horizon: u64,
    runs: u64,
    seed: u64,
    env_seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let env = core::EnvSpec::bernoulli(&means, env_seed).map_err(err)?;
    let fairness =
        core::FairnessConfig::new(means.len(), parse_rate(rate)?, horizon).map_err(err)?;
    let cfg = sim::ExperimentConfig::new(parse_policy(policy)?, fairness, env, runs, seed)
        .map_err(err)?;
    let stats = py.detach(|| sim::run_experiment(&cfg)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("t", stats.rows.iter().map(|r| r.t).collect::<Vec<_>>())?;
    out.set_item(
        "mean_regret",
        stats.rows.iter().map(|r| r.mean_regret).collect::<Vec<_>>(),
    )?;
    out.set_item("stderr", stats.rows.iter().map(|r| r.stderr).collect::<Vec<_>>())?;
    out.set_item(
        "pull_fraction",
        stats.rows.iter().map(|r| r.pull_fraction.clone()).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "min_pulls",
        stats.rows.iter().map(|r| r.min_pulls.clone()).collect::<Vec<_>>(),
    )?;
    Ok(out)
}

/// Strict pull-floor fuzz. Returns (passed, steps_checked, counterexample_json).
#[pyfunction]
fn fairness_fuzz(py: Python<'_>, trials: u64, seed: u64) -> (bool, u64, Option<String>) {
    let report = py.detach(|| sim::fairness_fuzz(trials, seed));
    let cx = report
        .counterexample
        .as_ref()
        .map(|c| serde_json::to_string(c).expect("counterexample serializes"));
    (report.passed(), report.steps_checked, cx)
}

#[pymodule]
fn fairbandit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFairnessConfig>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyDecision>()?;
    m.add_class::<PyAllocator>()?;
    m.add_function(wrap_pyfunction!(count_schedules, m)?)?;
    m.add_function(wrap_pyfunction!(min_pull_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(teammate_reward, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(fairness_fuzz, m)?)?;
    m.add("DEFAULT_SCORE_NORMALIZER", core::DEFAULT_SCORE_NORMALIZER)?;
    Ok(())
}
