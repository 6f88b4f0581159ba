//! `aoinet`: closed-form analysis and slot-level simulation of status-update
//! aging in a cognitive shared-access network with RF energy harvesting.
//!
//! Exit codes: 0 success, 1 a requested check failed (validation rows,
//! sweep rows with errors), 2 bad usage or unreadable/invalid inputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use aoinet_core::scenario::Scenario;
use aoinet_core::sim::{run_replications, run_replications_with, Estimate, SimMetrics, SlotOutcome};
use aoinet_core::sweep::{run_sweep, SweepOptions, SweepSpec};
use aoinet_core::validate::validate_scenario;
use aoinet_core::{analyze, PolicyKind, TrafficConfig};

#[derive(Parser)]
#[command(
    name = "aoinet",
    version,
    about = "Age-of-information analysis for a shared-access network with energy-harvesting nodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form model; prints key=value lines.
    Analyze(AnalyzeArgs),
    /// Run the slot-level simulator; prints key=value lines.
    Simulate(SimulateArgs),
    /// Simulate, then score every closed form against the run.
    Validate(ValidateArgs),
    /// Evaluate a parameter grid; writes CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario TOML file; omit for the built-in reference deployment.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override the update policy: fcfs, qr, or gw.
    #[arg(long)]
    policy: Option<PolicyKind>,
    /// Override slots per replication.
    #[arg(long)]
    slots: Option<u64>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the replication count.
    #[arg(long)]
    replications: Option<u32>,
    /// Worker threads: 1 = serial, 0 = one per core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write a per-slot CSV trace of the first replication here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sweep definition TOML (axes over scenario parameters).
    #[arg(long)]
    sweep: PathBuf,
    /// Output CSV path; omit for stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also simulate every grid point.
    #[arg(long)]
    simulate: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        // A reader closing the pipe early (`aoinet ... | head`) is not an error.
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|cause| cause.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn load_scenario(common: &CommonArgs) -> anyhow::Result<(Scenario, String)> {
    let (mut scenario, origin) = match &common.scenario {
        Some(path) => (
            Scenario::from_path(path)?,
            path.display().to_string(),
        ),
        None => (Scenario::default(), "builtin-default".to_string()),
    };
    if let Some(policy) = common.policy {
        scenario.traffic.policy = policy;
    }
    if let Some(slots) = common.slots {
        scenario.sim.slots = slots;
    }
    if let Some(seed) = common.seed {
        scenario.sim.seed = seed;
    }
    if let Some(replications) = common.replications {
        scenario.sim.replications = replications;
    }
    scenario.validate()?;
    Ok((scenario, origin))
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<ExitCode> {
    let (scenario, _) = load_scenario(&args.common)?;
    let report = analyze(&scenario.network, &scenario.traffic)?;
    let mut out = std::io::stdout().lock();
    for (key, value) in report.key_values() {
        writeln!(out, "{key}={value}")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let (scenario, _) = load_scenario(&args.common)?;
    let metrics = match &args.trace {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("creating trace file {}", path.display()))?;
            let mut writer = BufWriter::new(file);
            writeln!(
                writer,
                "slot,age,queue_len,attempted,delivered,active_nodes,\
                 pair_successes,arrivals,drops,full_batteries"
            )?;
            let mut trace_err: Option<std::io::Error> = None;
            let metrics = run_replications_with(
                &scenario.network,
                &scenario.traffic,
                scenario.sim.slots,
                scenario.sim.seed,
                scenario.sim.replications,
                args.common.jobs,
                |o: &SlotOutcome| {
                    if trace_err.is_none() {
                        if let Err(e) = writeln!(
                            writer,
                            "{},{},{},{},{},{},{},{},{},{}",
                            o.slot,
                            o.age,
                            o.queue_len,
                            o.attempted,
                            o.delivered,
                            o.active_nodes,
                            o.pair_successes,
                            o.arrivals,
                            o.drops,
                            o.full_batteries
                        ) {
                            trace_err = Some(e);
                        }
                    }
                },
            )?;
            if let Some(e) = trace_err {
                bail!("writing trace: {e}");
            }
            writer.flush()?;
            metrics
        }
        None => run_replications(
            &scenario.network,
            &scenario.traffic,
            scenario.sim.slots,
            scenario.sim.seed,
            scenario.sim.replications,
            args.common.jobs,
        )?,
    };
    let mut out = std::io::stdout().lock();
    for line in metric_lines(&scenario.traffic, &metrics) {
        writeln!(out, "{line}")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn metric_lines(traffic: &TrafficConfig, m: &SimMetrics) -> Vec<String> {
    let est = |name: &str, e: &Estimate| {
        [
            format!("{name}={}", e.value),
            format!("{name}_ci={}", e.ci_halfwidth),
        ]
    };
    let mut lines = vec![
        format!("policy={}", traffic.policy.name()),
        format!("slots={}", m.slots),
        format!("warmup_slots={}", m.warmup_slots),
        format!("replications={}", m.replications),
        format!("nodes={}", m.nodes),
    ];
    lines.extend(est("mean_age", &m.mean_age));
    lines.extend(est("mu_p", &m.emp_mu_p));
    lines.extend(est("p_sx", &m.emp_p_sx));
    lines.extend(est("p_ch", &m.emp_p_ch));
    lines.extend(est("p_tr", &m.emp_p_tr));
    lines.extend(est("drop_fraction", &m.emp_drop));
    lines.extend(est("throughput", &m.emp_throughput));
    for (i, v) in m.queue_occupancy.iter().enumerate() {
        let label = if i == 3 { "3plus".to_string() } else { i.to_string() };
        lines.push(format!("occupancy_{label}={v}"));
    }
    lines.push(format!("arrivals={}", m.arrivals));
    lines.push(format!("delivered={}", m.delivered));
    lines.push(format!("dropped={}", m.dropped));
    lines.push(format!("in_system={}", m.in_system));
    lines.push(format!("pt_attempts={}", m.pt_attempts));
    lines.push(format!("pair_attempts={}", m.pair_attempts));
    lines.push(format!("divergent={}", m.divergent));
    lines
}

fn cmd_validate(args: ValidateArgs) -> anyhow::Result<ExitCode> {
    let (scenario, origin) = load_scenario(&args.common)?;
    let report = validate_scenario(&scenario, args.common.jobs)?;
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "validating {} ({} slots x {} replications, seed {})",
        origin, scenario.sim.slots, scenario.sim.replications, scenario.sim.seed
    )?;
    for line in report.summary_lines() {
        writeln!(out, "{line}")?;
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<ExitCode> {
    let (scenario, origin) = load_scenario(&args.common)?;
    let spec = SweepSpec::from_path(&args.sweep)?;
    let opts = SweepOptions {
        simulate: args.simulate,
        threads: args.common.jobs,
        origin,
    };
    let stats = match &args.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("creating output file {}", path.display()))?;
            run_sweep(&scenario, &spec, &opts, BufWriter::new(file))?
        }
        None => run_sweep(&scenario, &spec, &opts, std::io::stdout().lock())?,
    };
    eprintln!(
        "sweep: {} rows ({} ok, {} unstable, {} errors)",
        stats.rows, stats.ok, stats.unstable, stats.errors
    );
    Ok(if stats.errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
