use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use anivisc_core::estimates::{run_suite, SuiteConfig, SuiteName};
use anivisc_core::harness::{
    build_initial_data, export_report, run_remainder_experiment, time_partition, verify_pressure_bounds,
    InitialDataSpec, SweepConfig, UappSeries,
};
use anivisc_core::lp::{besov_norm_vector, BesovSpec};
use anivisc_core::solvers::{assemble_uapp, ApproxSolver, NshSolver, Scheme, StepperConfig};
use anivisc_core::spectral::{read_checkpoint, relative_divergence, write_checkpoint};

#[derive(Parser)]
#[command(name = "anivisc", version, about = "Navier-Stokes without vertical viscosity: solvers and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the full system from the slowly varying data and write checkpoints.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the slice model, write u_app checkpoints and the pressure sizes.
    Approx {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the ε-sweep and write sweep.csv and report.json.
    RemainderSweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Anisotropic Besov norm of a checkpointed velocity field.
    Besov {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, allow_negative_numbers = true)]
        sprime: f64,
    },
    /// Run inequality suites and print a JSON report; fails if any check fails.
    Verify {
        /// Comma-separated: bernstein, product, estimate11, trilinear, energy.
        #[arg(long, default_value = "bernstein,product,estimate11,trilinear,energy")]
        suite: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Greedy time partition of u_app for a given Cbar.
    Partition {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1e-3)]
        cbar: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON initial data spec; the default profiles when absent.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    n_h: usize,
    #[arg(long, default_value_t = 32)]
    n_v: usize,
    /// Stretch exponent, ε = 2^-m.
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    /// Steps between snapshots.
    #[arg(long, default_value_t = 10)]
    stride: usize,
    #[arg(long)]
    rk2: bool,
}

impl RunArgs {
    fn spec(&self) -> Result<InitialDataSpec> {
        match &self.data {
            None => Ok(InitialDataSpec::default()),
            Some(p) => read_json(p),
        }
    }

    fn stepper(&self) -> StepperConfig {
        StepperConfig {
            dt: self.dt,
            t_end: self.t_end,
            scheme: if self.rk2 { Scheme::Rk2 } else { Scheme::Rk4 },
            snapshot_stride: self.stride,
            dealias: true,
        }
    }
}

#[derive(Serialize)]
struct SnapshotEntry {
    time: f64,
    file: String,
    energy: f64,
}

#[derive(Serialize)]
struct SnapshotIndex {
    m: u32,
    grid: [usize; 3],
    stepper: StepperConfig,
    snapshots: Vec<SnapshotEntry>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn simulate(run: &RunArgs, out: &Path) -> Result<()> {
    let data = build_initial_data(&run.spec()?, run.n_h, run.n_v, run.m)?;
    fs::create_dir_all(out)?;
    let stepper = run.stepper();
    let mut solver = NshSolver::new(&data.state, stepper)?;
    let mut snapshots = Vec::new();
    solver.run(|s| {
        let file = format!("u_{:06}.ansh", s.steps_taken());
        write_checkpoint(&out.join(&file), &s.state())?;
        snapshots.push(SnapshotEntry {
            time: s.time(),
            file,
            energy: s.energy(),
        });
        Ok(())
    })?;
    let index = SnapshotIndex {
        m: run.m,
        grid: data.state.grid().dims(),
        stepper,
        snapshots,
    };
    write_json(&out.join("index.json"), &index)?;
    eprintln!("wrote {} checkpoints to {}", index.snapshots.len(), out.display());
    Ok(())
}

fn approx(run: &RunArgs, out: &Path) -> Result<()> {
    let data = build_initial_data(&run.spec()?, run.n_h, run.n_v, run.m)?;
    fs::create_dir_all(out)?;
    let stepper = run.stepper();
    let traj = ApproxSolver::new(&data.uh, &data.w3, stepper)?.run()?;
    let mut snapshots = Vec::new();
    for (i, (&t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        let u = assemble_uapp(&s.uh, &s.w3, run.m, t)?;
        let file = format!("uapp_{i:05}.ansh");
        write_checkpoint(&out.join(&file), &u)?;
        snapshots.push(SnapshotEntry {
            time: t,
            file,
            energy: 0.5 * u.l2_norm().powi(2),
        });
    }
    let index = SnapshotIndex {
        m: run.m,
        grid: data.state.grid().dims(),
        stepper,
        snapshots,
    };
    write_json(&out.join("index.json"), &index)?;
    let pressure = verify_pressure_bounds(&traj, run.m)?;
    write_json(&out.join("pressure.json"), &pressure)?;
    print_json(&pressure)
}

fn remainder_sweep(config: &Path, out: &Path) -> Result<()> {
    let cfg: SweepConfig = read_json(config)?;
    let report = run_remainder_experiment(&cfg)?;
    let (csv, json) = export_report(&report, out)?;
    eprintln!("wrote {} and {}", csv.display(), json.display());
    if let Some(fit) = report.slope {
        eprintln!("slope {:.4}, fit residual {:.3e}", fit.slope, fit.residual);
    }
    Ok(())
}

#[derive(Serialize)]
struct BesovOutput {
    checkpoint: String,
    time: f64,
    grid: [usize; 3],
    s: f64,
    sprime: f64,
    norm: f64,
    relative_divergence: f64,
}

fn besov(path: &Path, s: f64, sprime: f64) -> Result<()> {
    let state = read_checkpoint(path)?;
    let norm = besov_norm_vector(&state.components, &BesovSpec::anisotropic(s, sprime));
    print_json(&BesovOutput {
        checkpoint: path.display().to_string(),
        time: state.time,
        grid: state.grid().dims(),
        s,
        sprime,
        norm,
        relative_divergence: relative_divergence(&state.components),
    })
}

fn verify(suite: &str, cfg: SuiteConfig) -> Result<bool> {
    let names = suite
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<std::result::Result<Vec<SuiteName>, _>>()?;
    if names.is_empty() {
        bail!("no suite named");
    }
    let summaries = run_suite(&names, &cfg)?;
    print_json(&summaries)?;
    Ok(summaries.iter().all(|s| s.pass))
}

#[derive(Serialize)]
struct PartitionOutput {
    m: u32,
    cbar: f64,
    k: usize,
    times: Vec<f64>,
    products: Vec<f64>,
    bound: f64,
}

fn partition(run: &RunArgs, cbar: f64) -> Result<()> {
    let data = build_initial_data(&run.spec()?, run.n_h, run.n_v, run.m)?;
    let traj = ApproxSolver::new(&data.uh, &data.w3, run.stepper())?.run()?;
    let mut series = UappSeries::default();
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        series.push(t, &assemble_uapp(&s.uh, &s.w3, run.m, t)?.components)?;
    }
    let p = time_partition(&series.plain, cbar)?;
    print_json(&PartitionOutput {
        m: run.m,
        cbar,
        k: p.k(),
        times: p.times,
        products: p.products,
        bound: p.bound,
    })
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("ANIVISC_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .with_context(|| format!("ANIVISC_THREADS must be a positive integer, got {value:?}"))?;
    if n == 0 {
        bail!("ANIVISC_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Simulate { run, out } => simulate(&run, &out)?,
        Command::Approx { run, out } => approx(&run, &out)?,
        Command::RemainderSweep { config, out } => remainder_sweep(&config, &out)?,
        Command::Besov { checkpoint, s, sprime } => besov(&checkpoint, s, sprime)?,
        Command::Verify { suite, n, samples, seed } => return verify(&suite, SuiteConfig { n, samples, seed }),
        Command::Partition { run, cbar } => partition(&run, cbar)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
