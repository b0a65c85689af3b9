use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fairbandit_core::{
    count_schedules, enumerate_schedules, ArmId, EnvSpec, FairnessConfig, PolicyKind, Rate,
    Schedule,
};
use fairbandit_sim::{
    export, fairness_fuzz, oracle_sweep, regret_fuzz, run_experiment, ExperimentConfig,
    ExportFormat, HarnessError,
};

const USAGE: u8 = 2;
const FAILED: u8 = 1;
const ENUMERATE_LIMIT: u64 = 1000;

#[derive(Parser)]
#[command(name = "fairbandit", version, about = "Rate-constrained UCB simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run R seeded episodes and export aggregated curves.
    Sim {
        #[arg(long)]
        policy: PolicyKind,
        /// JSON file: an environment object or a plain list of Bernoulli means.
        #[arg(long)]
        arms: PathBuf,
        /// Minimum pull rate, e.g. 1/4 or 0.
        #[arg(long)]
        rate: Rate,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value_t = 100)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reserved block offsets, 1-based, comma separated.
        #[arg(long, value_delimiter = ',', requires = "assign")]
        slots: Option<Vec<u64>>,
        /// Arm (1-based) for each reserved offset, comma separated.
        #[arg(long, value_delimiter = ',', requires = "slots")]
        assign: Option<Vec<usize>>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
    },
    /// Check the strict pull floor and regret monotonicity on random configs.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the simulator against the naive oracle on tiny instances.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        instances: u64,
    },
    /// Count (and list, when small) the valid (S, g) schedules.
    Schedules {
        #[arg(long)]
        arms: usize,
        #[arg(long)]
        rate: Rate,
    },
}

fn load_env(path: &PathBuf) -> Result<EnvSpec, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let parsed = if value.is_array() {
        serde_json::from_value::<Vec<f64>>(value)
            .map_err(|e| e.to_string())
            .and_then(|means| EnvSpec::bernoulli(&means, 0).map_err(|e| e.to_string()))
    } else {
        serde_json::from_value::<EnvSpec>(value).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn sim(
    policy: PolicyKind,
    arms: PathBuf,
    rate: Rate,
    horizon: u64,
    runs: u64,
    seed: u64,
    slots: Option<Vec<u64>>,
    assign: Option<Vec<usize>>,
    out: PathBuf,
    format: ExportFormat,
) -> Result<(), (u8, String)> {
    let usage = |e: String| (USAGE, e);
    let env = load_env(&arms).map_err(usage)?;
    let fairness =
        FairnessConfig::new(env.num_arms(), rate, horizon).map_err(|e| usage(e.to_string()))?;
    let mut cfg = ExperimentConfig::new(policy, fairness, env, runs, seed)
        .map_err(|e| usage(e.to_string()))?;
    if let (Some(slots), Some(assign)) = (slots, assign) {
        if policy != PolicyKind::Strict {
            return Err(usage("--slots/--assign only apply to the strict policy".into()));
        }
        let arms: Vec<ArmId> = assign
            .iter()
            .map(|&n| ArmId::from_number(n).ok_or_else(|| format!("arm {n} is not 1-based")))
            .collect::<Result<_, _>>()
            .map_err(usage)?;
        let schedule = Schedule::build(&fairness, Some(&slots), Some(&arms))
            .map_err(|e| usage(e.to_string()))?;
        cfg = cfg.with_schedule(schedule).map_err(|e| usage(e.to_string()))?;
    }
    let stats = run_experiment(&cfg).map_err(|e| (FAILED, e.to_string()))?;
    export(&stats, format, &out).map_err(|e| match e {
        HarnessError::Io(_) => usage(e.to_string()),
        other => (FAILED, other.to_string()),
    })?;
    if let Some(last) = stats.final_row() {
        println!(
            "policy={} runs={} T={} mean_regret={} stderr={}",
            policy, runs, last.t, last.mean_regret, last.stderr
        );
    }
    Ok(())
}

fn fuzz(trials: u64, seed: u64) -> Result<(), (u8, String)> {
    let reports = [
        fairness_fuzz(trials, seed),
        regret_fuzz(trials, seed, PolicyKind::Stochastic),
        regret_fuzz(trials, seed, PolicyKind::Strict),
    ];
    let mut ok = true;
    for r in &reports {
        if r.passed() {
            println!("PASS {} ({} trials, {} steps)", r.check, r.trials, r.steps_checked);
        } else {
            ok = false;
            println!("FAIL {}", r.check);
            println!("{}", serde_json::to_string_pretty(&r.counterexample).unwrap_or_default());
        }
    }
    if ok {
        Ok(())
    } else {
        Err((FAILED, "invariant violated".into()))
    }
}

fn oracle_check(seed: u64, instances: u64) -> Result<(), (u8, String)> {
    let report = oracle_sweep(instances, seed).map_err(|e| (FAILED, e.to_string()))?;
    match report.mismatch {
        None => {
            println!("PASS oracle agrees on {} instances", report.instances);
            Ok(())
        }
        Some(m) => {
            println!("FAIL oracle mismatch");
            println!("{}", serde_json::to_string_pretty(&m).unwrap_or_default());
            Err((FAILED, "oracle mismatch".into()))
        }
    }
}

fn schedules(arms: usize, rate: Rate) -> Result<(), (u8, String)> {
    let usage = |e: String| (USAGE, e);
    // horizon is irrelevant to the schedule space
    let cfg = FairnessConfig::new(arms, rate, 1.max(arms as u64)).map_err(|e| usage(e.to_string()))?;
    let count = count_schedules(&cfg).map_err(|e| usage(e.to_string()))?;
    println!("{count}");
    if count <= ENUMERATE_LIMIT {
        for s in enumerate_schedules(&cfg).map_err(|e| usage(e.to_string()))? {
            let pairs: Vec<String> = s
                .assignment()
                .iter()
                .map(|(slot, arm)| format!("{slot}:{arm}"))
                .collect();
            println!("{}", pairs.join(" "));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sim {
            policy,
            arms,
            rate,
            horizon,
            runs,
            seed,
            slots,
            assign,
            out,
            format,
        } => sim(policy, arms, rate, horizon, runs, seed, slots, assign, out, format),
        Command::Fuzz { trials, seed } => fuzz(trials, seed),
        Command::OracleCheck { seed, instances } => oracle_check(seed, instances),
        Command::Schedules { arms, rate } => schedules(arms, rate),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
