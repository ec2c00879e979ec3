use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hrn_sim::channel::{build_correlation, psd_sqrt};
use hrn_sim::config::{self, ConfigFile, Preset};
use hrn_sim::geometry::{scenario_variances, side_length};
use hrn_sim::linkbudget::IrsPlacement;
use hrn_sim::montecarlo::run_sweep;
use hrn_sim::oracle::{self, CheckOutcome};
use hrn_sim::report::write_csv;

#[derive(Parser)]
#[command(
    name = "hrn-sim",
    version,
    about = "Relay / IRS / hybrid link-budget Monte Carlo simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write the results as CSV.
    Run {
        /// TOML experiment file. Optional when --preset is given.
        #[arg(long, required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = ["fig2a", "fig2b", "fig2c"])]
        preset: Option<String>,
        /// Overrides the master seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores). Output does not depend on it.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        threads: Option<u64>,
    },
    /// Check the closed forms against independent oracles.
    Verify {
        /// Unit cells for the trace checks (a perfect square).
        #[arg(long, default_value_t = 64)]
        m: usize,
        /// Monte Carlo draws for the trace checks.
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Random phase configurations for the statistical-CSI check.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
}

fn run(
    config: Option<PathBuf>,
    out: PathBuf,
    preset: Option<String>,
    seed: Option<u64>,
    threads: Option<u64>,
) -> hrn_sim::Result<()> {
    let preset = preset.as_deref().and_then(Preset::parse);
    let mut experiment = config::load(config.as_deref(), preset)?;
    if let Some(seed) = seed {
        experiment.master_seed = seed;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        pool = pool.num_threads(t as usize);
    }
    let pool = pool
        .build()
        .map_err(|e| hrn_sim::Error::InvalidArgument(e.to_string()))?;
    let result = pool.install(|| run_sweep(&experiment))?;
    let file = std::fs::File::create(&out)?;
    write_csv(&result, std::io::BufWriter::new(file))?;
    eprintln!("wrote {} rows to {}", result.rows.len(), out.display());
    Ok(())
}

fn verify(m: usize, n: usize, trials: usize) -> hrn_sim::Result<Vec<CheckOutcome>> {
    let m_d = side_length(m).ok_or_else(|| {
        hrn_sim::Error::InvalidArgument(format!("--m {m} is not a perfect square"))
    })?;
    let exp = ConfigFile::default().to_experiment()?;
    let dep = &exp.deployment;
    let mu = exp.system.mu;
    let grid = dep.grid(m_d, IrsPlacement::NearRelay)?;
    let r = build_correlation(&grid, dep.wavelength)?;
    let root = psd_sqrt(&r)?;
    let v = scenario_variances(&dep.layout(IrsPlacement::NearRelay)?, &grid, &exp.pathloss)?;

    let mut checks = Vec::new();
    let (mc, formula) = oracle::irs_trace_agreement(&r, &root, v.id, v.si, mu, n, 1)?;
    checks.push(oracle::relative_check(
        format!("IRS ergodic SNR vs trace, M = {m}, N = {n}"),
        mc,
        formula,
        0.02,
    ));
    let (mc, formula) = oracle::hrn_trace_agreement(&r, &root, v.sr, v.ir, v.si, mu, n, 2)?;
    checks.push(oracle::relative_check(
        format!("hybrid first hop vs trace, M = {m}, N = {n}"),
        mc,
        formula,
        0.02,
    ));
    checks.push(oracle::scsi_suite(&r, mu, trials, 3)?);
    checks.push(oracle::brute_force_suite(&[1, 2, 3], 16, 100, mu, 4)?);
    checks.push(oracle::power_split_suite(1000, 1000, 5)?);
    Ok(checks)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            preset,
            seed,
            threads,
        } => run(config, out, preset, seed, threads),
        Command::Verify { m, n, trials } => verify(m, n as usize, trials as usize).map(|checks| {
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().any(|c| !c.passed) {
                eprintln!("verification failed");
                std::process::exit(1);
            }
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
