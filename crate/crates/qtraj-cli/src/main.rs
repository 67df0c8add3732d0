//! Command-line harness producing the experiment datasets as CSV.
//!
//! Every file starts with a `#`-prefixed run manifest (command line, seed,
//! trajectory count, sub-steps, version) so a dataset can be reproduced
//! bit-exactly. Values are printed with 12 significant digits. Wall time is
//! logged to stderr to keep the CSV bytes reproducible.
//!
//! Exit codes: 0 success, 1 configuration error, 2 when some rows failed
//! (rate too large for the model) or an oracle check did not pass. Trajectory
//! parallelism honors `RAYON_NUM_THREADS`.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use qtraj::analytics;
use qtraj::noise::{NoiseChannel, NoiseModel};
use qtraj::oracle;
use qtraj::protocols::{
    baker_fidelity_experiment, baker_kf_scan, build_chain_initial, kf_power_law_fit,
    swap_chain_schedule, teleport_fidelity, BakerSetup, ChainInit, MeasurementMode,
    NoisePlacement, TeleportSetup,
};
use qtraj::state::{random_state, StateVector};
use qtraj::trajectory::{
    ensemble_density_matrix, ensemble_observable, ensemble_observables_vec, stream_rng, Schedule,
    TrajectoryConfig,
};

/// Default cap on register size; larger runs need --allow-large.
const DEFAULT_QUBIT_CAP: usize = 12;
const CHAIN_SEED_SALT: u64 = 0x00c0_ffee_c0ff_ee00;
const INIT_SEED_SALT: u64 = 0x5eed_0000_5eed_0000;

#[derive(Parser)]
#[command(
    name = "qtraj",
    version,
    about = "Quantum-trajectory experiments for noisy multi-qubit protocols",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Damping-cascade class populations versus rate (one row per γ, class).
    Cascade(CascadeArgs),
    /// Random-state fidelity under the generalized phase flip channel.
    Phaseflip(PhaseflipArgs),
    /// Teleportation fidelity through a noisy swap chain.
    Teleport(TeleportArgs),
    /// Baker's-map forward/backward fidelity versus rate.
    Baker(BakerArgs),
    /// Map steps until the baker fidelity drops to a target, versus n.
    BakerKf(BakerKfArgs),
    /// Trajectory ensemble versus exact density-matrix evolution.
    OracleCheck(OracleCheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Trajectories per ensemble.
    #[arg(long, short = 't')]
    trajectories: Option<usize>,
    /// Master seed for the per-trajectory RNG streams.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Noise sub-steps per gate interval.
    #[arg(long, default_value_t = 1)]
    sub_steps: usize,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Permit registers above the default 12-qubit cap.
    #[arg(long, default_value_t = false)]
    allow_large: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DampingModel {
    Shared,
    Independent,
}

impl DampingModel {
    fn noise_model(self) -> NoiseModel {
        match self {
            DampingModel::Shared => NoiseModel::AmpShared,
            DampingModel::Independent => NoiseModel::AmpIndependent,
        }
    }
}

#[derive(Args)]
struct CascadeArgs {
    #[arg(long, value_enum)]
    model: DampingModel,
    #[arg(long, short = 'n', default_value_t = 6)]
    qubits: usize,
    /// Dimensionless rates γ per noise interval (comma list, repeatable).
    #[arg(long, value_delimiter = ',', required = true)]
    gamma: Vec<f64>,
    /// Noise intervals to evolve; defaults to 2n (shared) or n (independent).
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct PhaseflipArgs {
    #[arg(long, short = 'n', default_value_t = 6)]
    qubits: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    gamma: Vec<f64>,
    /// Noise intervals to evolve; defaults to 2n².
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Averaged,
    Sampled,
}

#[derive(Args)]
struct TeleportArgs {
    #[arg(long, value_enum)]
    model: DampingModel,
    #[arg(long, short = 'n', default_value_t = 10)]
    qubits: usize,
    /// Input-state amplitude a as RE or RE,IM; defaults to 1/√2.
    #[arg(long, value_parser = parse_complex)]
    a: Option<Complex64>,
    /// Input-state amplitude b as RE or RE,IM; defaults to 1/√2.
    #[arg(long, value_parser = parse_complex)]
    b: Option<Complex64>,
    #[arg(long, value_delimiter = ',', required = true)]
    gamma: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Averaged)]
    mode: Mode,
    /// Let the noise interval elapse after each swap instead of before.
    #[arg(long, default_value_t = false)]
    noise_after_swap: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BakerArgs {
    #[arg(long, short = 'n', default_value_t = 10)]
    qubits: usize,
    /// Forward/backward map-step pairs.
    #[arg(long, short = 'k', default_value_t = 1)]
    map_steps: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    gamma: Vec<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BakerKfArgs {
    /// Register sizes to scan (comma list).
    #[arg(long, value_delimiter = ',', required = true)]
    qubits: Vec<usize>,
    #[arg(long)]
    gamma: f64,
    /// Fidelity threshold A.
    #[arg(long, default_value_t = 0.9)]
    target: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Scenario {
    /// Free decay of |1…1⟩ under shared damping.
    AmpShared,
    /// Free decay of |1…1⟩ under independent damping.
    AmpIndependent,
    /// Free dephasing of a random state.
    Phaseflip,
    /// Noisy swap chain, shared damping.
    TeleportShared,
    /// Noisy swap chain, independent damping.
    TeleportIndependent,
    /// One forward baker step with per-gate phase flips.
    Baker,
}

#[derive(Args)]
struct OracleCheckArgs {
    #[arg(long, value_enum)]
    scenario: Scenario,
    #[arg(long, short = 'n', default_value_t = 4)]
    qubits: usize,
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    #[command(flatten)]
    common: CommonArgs,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => re
            .trim()
            .parse::<f64>()
            .map(|r| Complex64::new(r, 0.0))
            .map_err(|e| e.to_string()),
        [re, im] => {
            let re = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
            let im = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
            Ok(Complex64::new(re, im))
        }
        _ => Err("expected RE or RE,IM".into()),
    }
}

fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

struct CsvOutput {
    lines: Vec<String>,
    row_errors: usize,
}

impl CsvOutput {
    fn new(manifest: &[(&str, String)], note: &str, header: &str) -> Self {
        let mut lines = Vec::new();
        for (key, value) in manifest {
            lines.push(format!("# {key}: {value}"));
        }
        if !note.is_empty() {
            lines.push(format!("# {note}"));
        }
        lines.push(header.to_string());
        Self {
            lines,
            row_errors: 0,
        }
    }

    fn push_row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    fn push_comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    fn push_row_error(&mut self, context: &str, err: impl std::fmt::Display) {
        self.row_errors += 1;
        self.push_comment(&format!("row-error {context}: {err}"));
    }

    fn write(&self, out: &Option<String>) -> Result<()> {
        let mut body = String::new();
        for line in &self.lines {
            writeln!(body, "{line}").unwrap();
        }
        match out {
            Some(path) => {
                fs::write(path, body).with_context(|| format!("writing {path}"))?
            }
            None => print!("{body}"),
        }
        Ok(())
    }
}

fn manifest(command_line: &str, seed: u64, trajectories: usize, sub_steps: usize) -> Vec<(&'static str, String)> {
    vec![
        ("command", command_line.to_string()),
        ("seed", seed.to_string()),
        ("trajectories", trajectories.to_string()),
        ("sub_steps", sub_steps.to_string()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
    ]
}

fn reconstruct_command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn check_qubit_cap(n: usize, common: &CommonArgs) -> Result<()> {
    if n > DEFAULT_QUBIT_CAP && !common.allow_large {
        bail!(
            "{n} qubits exceed the default cap of {DEFAULT_QUBIT_CAP}; \
             pass --allow-large for big (slow, memory-heavy) runs"
        );
    }
    Ok(())
}

fn class_populations(state: &StateVector, n: usize) -> Vec<f64> {
    // class k holds the basis states reached by exactly k decays from |1…1⟩
    let mut w = vec![0.0; n + 1];
    for (j, amp) in state.amplitudes().iter().enumerate() {
        let ups = j.count_ones() as usize;
        w[n - ups] += amp.norm_sqr();
    }
    w
}

fn run_cascade(args: &CascadeArgs) -> Result<usize> {
    let n = args.qubits;
    check_qubit_cap(n, &args.common)?;
    let model = args.model.noise_model();
    let steps = args.steps.unwrap_or(match args.model {
        DampingModel::Shared => 2 * n,
        DampingModel::Independent => n,
    });
    let n_traj = args.common.trajectories.unwrap_or(400);
    let mut csv = CsvOutput::new(
        &manifest(
            &reconstruct_command_line(),
            args.common.seed,
            n_traj,
            args.common.sub_steps,
        ),
        &format!("x_aux: cascade class index, steps: {steps}"),
        "gamma,x_aux,mean,std_error,theory",
    );

    let initial = StateVector::basis(n, (1 << n) - 1)?;
    for &gamma in &args.gamma {
        let channel = match NoiseChannel::from_gate_rate(model, n, gamma, args.common.sub_steps) {
            Ok(c) => c,
            Err(e) => {
                csv.push_row_error(&format!("gamma={gamma}"), e);
                continue;
            }
        };
        let config = TrajectoryConfig::new(channel, n_traj, args.common.seed)?;
        let schedule = Schedule::noise_intervals(steps);
        let estimates =
            ensemble_observables_vec(&initial, &schedule, &config, |s| class_populations(s, n))?;
        let rate_time = gamma * steps as f64;
        let theory = match args.model {
            DampingModel::Shared => analytics::cascade_shared(n, rate_time)?,
            DampingModel::Independent => analytics::cascade_independent(n, n, rate_time)?,
        };
        for (k, est) in estimates.iter().enumerate() {
            csv.push_row(&[
                fmt12(gamma),
                k.to_string(),
                fmt12(est.mean),
                est.std_error.map(fmt12).unwrap_or_default(),
                fmt12(theory.probabilities[k]),
            ]);
        }
    }
    csv.write(&args.common.out)?;
    Ok(csv.row_errors)
}

fn run_phaseflip(args: &PhaseflipArgs) -> Result<usize> {
    let n = args.qubits;
    check_qubit_cap(n, &args.common)?;
    let steps = args.steps.unwrap_or(2 * n * n);
    let n_traj = args.common.trajectories.unwrap_or(400);
    let mut csv = CsvOutput::new(
        &manifest(
            &reconstruct_command_line(),
            args.common.seed,
            n_traj,
            args.common.sub_steps,
        ),
        &format!("x_aux: noise intervals ({steps})"),
        "gamma,x_aux,mean,std_error,theory,fbar,fbar_theory",
    );

    let initial = random_state(n, &mut stream_rng(args.common.seed ^ INIT_SEED_SALT, 0))?;
    let f_inf = 0.5f64.powi(n as i32);
    for &gamma in &args.gamma {
        let channel = match NoiseChannel::from_gate_rate(
            NoiseModel::PhaseFlip,
            n,
            gamma,
            args.common.sub_steps,
        ) {
            Ok(c) => c,
            Err(e) => {
                csv.push_row_error(&format!("gamma={gamma}"), e);
                continue;
            }
        };
        let config = TrajectoryConfig::new(channel, n_traj, args.common.seed)?;
        let schedule = Schedule::noise_intervals(steps);
        let est = ensemble_observable(&initial, &schedule, &config, |s| {
            qtraj::state::fidelity_pure(s, &initial).expect("dimensions match")
        })?;
        let theory = analytics::phaseflip_fidelity(n, gamma * steps as f64)?;
        csv.push_row(&[
            fmt12(gamma),
            steps.to_string(),
            fmt12(est.mean),
            est.std_error.map(fmt12).unwrap_or_default(),
            fmt12(theory.value),
            fmt12(est.mean - f_inf),
            fmt12(theory.value - theory.asymptote),
        ]);
    }
    csv.write(&args.common.out)?;
    Ok(csv.row_errors)
}

fn run_teleport(args: &TeleportArgs) -> Result<usize> {
    let n = args.qubits;
    check_qubit_cap(n, &args.common)?;
    let h = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let a = args.a.unwrap_or(h);
    let b = args.b.unwrap_or(h);
    let model = args.model.noise_model();
    let swaps = n.checked_sub(2).filter(|&k| k >= 1).ok_or_else(|| {
        anyhow!("teleportation needs a chain of at least 3 qubits, got {n}")
    })?;
    let n_traj = args.common.trajectories.unwrap_or(400);
    let mut csv = CsvOutput::new(
        &manifest(
            &reconstruct_command_line(),
            args.common.seed,
            n_traj,
            args.common.sub_steps,
        ),
        "x_aux: swap count, asymptote F_inf = 1/2",
        "gamma,x_aux,mean,std_error,theory,fbar,fbar_theory",
    );

    for &gamma in &args.gamma {
        let channel = match NoiseChannel::from_gate_rate(model, n, gamma, args.common.sub_steps) {
            Ok(c) => c,
            Err(e) => {
                csv.push_row_error(&format!("gamma={gamma}"), e);
                continue;
            }
        };
        let mut setup = TeleportSetup::new(n, a, b, channel)?
            .with_chain_init(ChainInit::RandomPerTrajectory {
                chain_seed: args.common.seed ^ CHAIN_SEED_SALT,
            })
            .with_mode(match args.mode {
                Mode::Averaged => MeasurementMode::Averaged,
                Mode::Sampled => MeasurementMode::Sampled,
            });
        if args.noise_after_swap {
            setup = setup.with_placement(NoisePlacement::AfterSwap);
        }
        let est = teleport_fidelity(&setup, n_traj, args.common.seed)?;
        let theory = match args.model {
            DampingModel::Independent => {
                Some(analytics::teleport_fidelity_independent(gamma, swaps)?.value)
            }
            DampingModel::Shared => None,
        };
        csv.push_row(&[
            fmt12(gamma),
            swaps.to_string(),
            fmt12(est.mean),
            est.std_error.map(fmt12).unwrap_or_default(),
            theory.map(fmt12).unwrap_or_default(),
            fmt12(est.mean - 0.5),
            theory.map(|t| fmt12(t - 0.5)).unwrap_or_default(),
        ]);
    }
    csv.write(&args.common.out)?;
    Ok(csv.row_errors)
}

fn run_baker(args: &BakerArgs) -> Result<usize> {
    let n = args.qubits;
    check_qubit_cap(n, &args.common)?;
    let n_traj = args.common.trajectories.unwrap_or(500);
    let mut csv = CsvOutput::new(
        &manifest(
            &reconstruct_command_line(),
            args.common.seed,
            n_traj,
            args.common.sub_steps,
        ),
        &format!("x_aux: map-step pairs ({})", args.map_steps),
        "gamma,x_aux,mean,std_error,theory",
    );

    for &gamma in &args.gamma {
        let channel = match NoiseChannel::from_gate_rate(
            NoiseModel::PhaseFlip,
            n,
            gamma,
            args.common.sub_steps,
        ) {
            Ok(c) => c,
            Err(e) => {
                csv.push_row_error(&format!("gamma={gamma}"), e);
                continue;
            }
        };
        let setup = BakerSetup::new(
            n,
            args.map_steps,
            channel,
            args.common.seed ^ INIT_SEED_SALT,
        )?;
        let est = baker_fidelity_experiment(&setup, n_traj, args.common.seed)?;
        let theory = analytics::baker_fidelity(n, gamma, args.map_steps)?;
        csv.push_row(&[
            fmt12(gamma),
            args.map_steps.to_string(),
            fmt12(est.mean),
            est.std_error.map(fmt12).unwrap_or_default(),
            fmt12(theory.value),
        ]);
    }
    csv.write(&args.common.out)?;
    Ok(csv.row_errors)
}

fn run_baker_kf(args: &BakerKfArgs) -> Result<usize> {
    for &n in &args.qubits {
        check_qubit_cap(n, &args.common)?;
    }
    let n_traj = args.common.trajectories.unwrap_or(500);
    let mut csv = CsvOutput::new(
        &manifest(
            &reconstruct_command_line(),
            args.common.seed,
            n_traj,
            args.common.sub_steps,
        ),
        "x_aux: qubit count; mean: fitted k_f; crossing: bracketing estimate",
        "gamma,x_aux,mean,std_error,theory,crossing,below_first_step",
    );

    let estimates = baker_kf_scan(
        &args.qubits,
        args.gamma,
        args.target,
        n_traj,
        args.common.sub_steps,
        args.common.seed,
    )?;
    for e in &estimates {
        let theory = analytics::baker_kf(e.n_qubits, args.gamma, args.target)?;
        csv.push_row(&[
            fmt12(args.gamma),
            e.n_qubits.to_string(),
            fmt12(e.k_f),
            e.std_error.map(fmt12).unwrap_or_default(),
            fmt12(theory),
            fmt12(e.k_f_crossing),
            (e.below_first_step as u8).to_string(),
        ]);
    }
    if estimates.len() >= 2 {
        let (exponent, prefactor) = kf_power_law_fit(&estimates);
        csv.push_comment(&format!("fit_exponent: {}", fmt12(exponent)));
        csv.push_comment(&format!("fit_prefactor: {}", fmt12(prefactor)));
        csv.push_comment(&format!(
            "prefactor_theory: {}",
            fmt12(-args.target.ln() / (2.0 * args.gamma))
        ));
    }
    csv.write(&args.common.out)?;
    Ok(csv.row_errors)
}

fn run_oracle_check(args: &OracleCheckArgs) -> Result<usize> {
    let n = args.qubits;
    if n > 6 {
        bail!("oracle checks are capped at 6 qubits, got {n}");
    }
    let n_traj = args.common.trajectories.unwrap_or(2000);
    if n_traj < 2 {
        bail!("oracle checks need at least 2 trajectories for a standard error");
    }
    let seed = args.common.seed;
    let sub_steps = args.common.sub_steps;
    let gamma = args.gamma;

    // scenario → (initial state, schedule, channel)
    let (initial, schedule, channel) = match args.scenario {
        Scenario::AmpShared | Scenario::AmpIndependent => {
            let model = if args.scenario == Scenario::AmpShared {
                NoiseModel::AmpShared
            } else {
                NoiseModel::AmpIndependent
            };
            let channel = NoiseChannel::from_gate_rate(model, n, gamma, sub_steps)?;
            let steps = if model == NoiseModel::AmpShared { 2 * n } else { n };
            (
                StateVector::basis(n, (1 << n) - 1)?,
                Schedule::noise_intervals(steps),
                channel,
            )
        }
        Scenario::Phaseflip => {
            let channel =
                NoiseChannel::from_gate_rate(NoiseModel::PhaseFlip, n, gamma, sub_steps)?;
            (
                random_state(n, &mut stream_rng(seed ^ INIT_SEED_SALT, 0))?,
                Schedule::noise_intervals(2 * n * n),
                channel,
            )
        }
        Scenario::TeleportShared | Scenario::TeleportIndependent => {
            let model = if args.scenario == Scenario::TeleportShared {
                NoiseModel::AmpShared
            } else {
                NoiseModel::AmpIndependent
            };
            let channel = NoiseChannel::from_gate_rate(model, n, gamma, sub_steps)?;
            let setup = TeleportSetup::plus_state(n, channel.clone())?;
            let chain = build_chain_initial(
                &setup,
                &mut stream_rng(seed ^ CHAIN_SEED_SALT, 0),
            )?;
            (chain, swap_chain_schedule(&setup), channel)
        }
        Scenario::Baker => {
            let channel =
                NoiseChannel::from_gate_rate(NoiseModel::PhaseFlip, n, gamma, sub_steps)?;
            let setup = BakerSetup::new(n, 1, channel.clone(), seed ^ INIT_SEED_SALT)?;
            let forward_only = {
                // forward half of the round trip exercises gates and noise
                let mut schedule = Schedule::new();
                let seq =
                    qtraj::circuits::baker_sequence(n, qtraj::circuits::BakerDirection::Forward)?;
                for op in seq.ops() {
                    schedule.push_gate(*op);
                    if !matches!(op, qtraj::circuits::GateOp::Swap { .. }) {
                        schedule.push_noise();
                    }
                }
                schedule
            };
            (setup.initial_state()?, forward_only, channel)
        }
    };

    let config = TrajectoryConfig::new(channel.clone(), n_traj, seed)?;
    let (rho_traj, se) = ensemble_density_matrix(&initial, &schedule, &config)?;
    let rho_oracle = oracle::run_schedule(&initial.outer_product(), &schedule, &channel)?;

    let dim = rho_traj.dim();
    let mut max_dev = 0.0f64;
    let mut max_ratio = 0.0f64;
    let mut failures = 0usize;
    for j in 0..dim {
        for k in 0..dim {
            let dev = (rho_traj.elements()[(j, k)] - rho_oracle.elements()[(j, k)]).norm();
            let bound = 5.0 * se[(j, k)] + 1e-9;
            max_dev = max_dev.max(dev);
            max_ratio = max_ratio.max(dev / bound);
            if dev > bound {
                failures += 1;
            }
        }
    }
    let verdict = if failures == 0 { "PASS" } else { "FAIL" };

    let mut lines = Vec::new();
    for (k, v) in manifest(&reconstruct_command_line(), seed, n_traj, sub_steps) {
        lines.push(format!("# {k}: {v}"));
    }
    lines.push(format!("scenario: {:?}", args.scenario));
    lines.push(format!("qubits: {n}"));
    lines.push(format!("gamma: {}", fmt12(gamma)));
    lines.push(format!("entries_checked: {}", dim * dim));
    lines.push(format!("max_deviation: {}", fmt12(max_dev)));
    lines.push(format!("max_sigma_ratio: {}", fmt12(max_ratio)));
    lines.push(format!("entries_beyond_5_sigma: {failures}"));
    lines.push(format!("verdict: {verdict}"));
    let body = lines.join("\n") + "\n";
    match &args.common.out {
        Some(path) => fs::write(path, &body).with_context(|| format!("writing {path}"))?,
        None => print!("{body}"),
    }
    Ok(failures.min(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Cascade(args) => run_cascade(args),
        Command::Phaseflip(args) => run_phaseflip(args),
        Command::Teleport(args) => run_teleport(args),
        Command::Baker(args) => run_baker(args),
        Command::BakerKf(args) => run_baker_kf(args),
        Command::OracleCheck(args) => run_oracle_check(args),
    };
    match outcome {
        Ok(0) => {
            eprintln!("done in {:.3?}", started.elapsed());
            ExitCode::SUCCESS
        }
        Ok(row_errors) => {
            eprintln!(
                "done in {:.3?} with {row_errors} failed row(s)",
                started.elapsed()
            );
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
