//! Command-line driver: runs presets, checks invariants and lists setups.
//!
//! Exit codes: 0 on success, 2 when an invariant is violated, 1 on any
//! other error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use frontflow::diagnostics::{csv_header, StepRecord};
use frontflow::scenario::{check_invariants, Checkpoint};
use frontflow::stepper::{initial_record, run, Scheme, StopReason};
use frontflow::{FlowError, Preset, RunConfig, Scenario};

/// Environment variable naming the root directory of run outputs.
const OUT_ENV: &str = "FRONTFLOW_OUT";

/// Relative energy slack below which a step breaks the energy law.
const ENERGY_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "frontflow", version, about = "Front-tracking multiphase Navier-Stokes solver with triple junctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Linear,
    Sp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Runs a preset and writes the step records, checkpoints and final network.
    Run(RunArgs),
    /// Runs a few steps with tightened tolerances and checks the invariants.
    Check {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 3)]
        steps: usize,
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
        #[arg(long, value_enum)]
        xfem: Option<Switch>,
    },
    /// Lists the presets with their desk-scale settings.
    Info,
    /// Prints the default configuration file of a preset.
    Config {
        #[arg(long)]
        preset: String,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    preset: Option<String>,
    /// Configuration file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    xfem: Option<Switch>,
    /// `n,k,l`: time step 1e-3/n, fine level k, coarse level l.
    #[arg(long)]
    adapt: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    /// End time.
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    wall_clock: Option<f64>,
    #[arg(long)]
    checkpoint_every: Option<usize>,
    /// Output directory; defaults to `$FRONTFLOW_OUT/<preset>` or `runs/<preset>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continues from a checkpoint written with the same configuration.
    #[arg(long)]
    resume: Option<PathBuf>,
}

fn preset(name: &str) -> Result<Preset> {
    Preset::from_name(name).map_err(|e| anyhow!("{e}\n\n{}", Cli::command().render_usage()))
}

fn apply_switches(cfg: &mut RunConfig, scheme: Option<SchemeArg>, xfem: Option<Switch>) {
    if let Some(s) = scheme {
        cfg.scheme = match s {
            SchemeArg::Linear => Scheme::Linear,
            SchemeArg::Sp => Scheme::StructurePreserving,
        };
    }
    if let Some(x) = xfem {
        cfg.xfem = matches!(x, Switch::On);
    }
}

fn parse_adapt(s: &str) -> Result<(u32, u32, u32)> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("--adapt expects n,k,l, got '{s}'"))?;
    match parts[..] {
        [n, k, l] => Ok((n, k, l)),
        _ => bail!("--adapt expects three values n,k,l, got '{s}'"),
    }
}

fn run_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), p) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cfg = RunConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
            if let Some(p) = p {
                if preset(p)? != cfg.preset {
                    bail!("--preset {p} disagrees with the configuration file ({})", cfg.preset.name());
                }
            }
            cfg
        }
        (None, Some(p)) => RunConfig::preset(preset(p)?),
        (None, None) => bail!("either --preset or --config is required\n\n{}", Cli::command().render_usage()),
    };
    apply_switches(&mut cfg, args.scheme, args.xfem);
    if let Some(a) = &args.adapt {
        let (n, k, l) = parse_adapt(a)?;
        cfg.set_adapt(n, k, l)?;
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    if let Some(t) = args.t_end {
        cfg.t_end = t;
    }
    if let Some(v) = args.vertices {
        cfg.vertices = v;
    }
    if args.max_steps.is_some() {
        cfg.max_steps = args.max_steps;
    }
    if args.wall_clock.is_some() {
        cfg.wall_clock = args.wall_clock;
    }
    if let Some(c) = args.checkpoint_every {
        cfg.checkpoint_every = c;
    }
    Ok(cfg)
}

fn out_dir(args: &RunArgs, cfg: &RunConfig) -> PathBuf {
    args.out.clone().unwrap_or_else(|| {
        let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
        root.join(cfg.preset.name())
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Outcome of a command that completed without an error.
enum Outcome {
    Ok,
    Violated,
}

fn energy_violations(records: &[StepRecord]) -> Vec<usize> {
    records
        .iter()
        .skip(1)
        .filter(|r| r.energy_slack < -ENERGY_TOL * r.energy.abs())
        .map(|r| r.step)
        .collect()
}

fn cmd_run(args: &RunArgs) -> Result<Outcome> {
    let cfg = run_config(args)?;
    let sc = Scenario::from_config(&cfg)?;
    let hash = cfg.trajectory_hash();
    let initial = match &args.resume {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Checkpoint::from_text(&text)?.restore(&hash)?
        }
        None => sc.initial_state()?,
    };
    let dir = out_dir(args, &cfg);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(&dir.join("config.txt"), &cfg.to_text())?;

    let csv_path = dir.join("records.csv");
    let mut csv = BufWriter::new(File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?);
    writeln!(csv, "{}", csv_header(initial.net.num_regions(), initial.net.junctions().len()))?;
    writeln!(csv, "{}", initial_record(&initial, &sc.params)?.csv_row())?;
    log::info!(
        "{}: {} scheme, xfem {}, dt {}, T {}, adapt ({}, {}), {} interface vertices",
        cfg.preset.name(),
        cfg.scheme.keyword(),
        cfg.xfem,
        cfg.dt,
        cfg.t_end,
        cfg.fine,
        cfg.coarse,
        initial.net.total_vertices()
    );

    let every = cfg.checkpoint_every;
    let mut io_error: Option<anyhow::Error> = None;
    let result = run(initial, &sc.params, &sc.config, |o| {
        let r = &o.record;
        if let Err(e) = writeln!(csv, "{}", r.csv_row()).and_then(|_| csv.flush()) {
            io_error.get_or_insert(e.into());
        }
        if every > 0 && r.step % every == 0 {
            let path = dir.join(format!("checkpoint_{:06}.txt", r.step));
            if let Err(e) = write_file(&path, &Checkpoint::capture(&o.state, &hash).to_text()) {
                io_error.get_or_insert(e);
            }
        }
        log::debug!("step {} t {:.6} E {:.10} u_max {:.3e} picard {}", r.step, r.t, r.energy, r.u_max, r.picard_iters);
        Ok(())
    });
    csv.flush()?;
    if let Some(e) = io_error {
        return Err(e);
    }
    let out = result?;
    write_file(&dir.join("checkpoint_final.txt"), &Checkpoint::capture(&out.state, &hash).to_text())?;
    write_file(&dir.join("final_network.txt"), &out.state.net.to_text())?;
    match out.stop {
        StopReason::Completed => {}
        StopReason::StepCap => log::info!("stopped at the step cap"),
        StopReason::WallClock => log::info!("stopped at the wall-clock budget"),
    }
    let last = out.records.last().expect("initial record");
    log::info!(
        "{} steps to t = {:.6}; E = {:.10}, max |vdelta| {:.3e}; output in {}",
        out.records.len() - 1,
        last.t,
        last.energy,
        out.records.iter().map(StepRecord::max_volume_change).fold(0.0, f64::max),
        dir.display()
    );
    let bad = energy_violations(&out.records);
    if bad.is_empty() {
        Ok(Outcome::Ok)
    } else {
        eprintln!("energy law violated at steps {bad:?}");
        Ok(Outcome::Violated)
    }
}

fn cmd_check(name: &str, steps: usize, scheme: Option<SchemeArg>, xfem: Option<Switch>) -> Result<Outcome> {
    let mut cfg = RunConfig::preset(preset(name)?);
    apply_switches(&mut cfg, scheme, xfem);
    let sc = Scenario::from_config(&cfg)?;
    let checks = check_invariants(&sc, steps)?;
    for c in &checks {
        println!("{:<28} {}  {}", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail);
    }
    Ok(if checks.iter().all(|c| c.passed) { Outcome::Ok } else { Outcome::Violated })
}

fn cmd_info() {
    println!("{:<24} {:>9} {:>6} {:>8} {:>6}  description", "preset", "dt", "adapt", "vertices", "T");
    for p in Preset::ALL {
        let (dt, fine, coarse, t) = p.desk_settings();
        println!(
            "{:<24} {:>9} {:>6} {:>8} {:>6}  {}",
            p.name(),
            dt,
            format!("{fine},{coarse}"),
            p.default_vertices(),
            t,
            p.description()
        );
    }
    println!("\nOutputs go to --out, or ${OUT_ENV}/<preset>, or runs/<preset>.");
}

fn is_violation(e: &anyhow::Error) -> bool {
    e.chain().any(|c| match c.downcast_ref::<FlowError>() {
        Some(FlowError::AssumptionViolated(_)) => true,
        Some(FlowError::AtStep { source, .. }) => matches!(**source, FlowError::AssumptionViolated(_)),
        _ => false,
    })
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Check { preset, steps, scheme, xfem } => cmd_check(&preset, steps, scheme, xfem),
        Command::Info => {
            cmd_info();
            Ok(Outcome::Ok)
        }
        Command::Config { preset: name } => {
            print!("{}", RunConfig::preset(preset(&name)?).to_text());
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_violation(&e) { 2 } else { 1 })
        }
    }
}
