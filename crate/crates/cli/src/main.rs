use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dtlab_cli::commands::{self, SimulateChecks};
use dtlab_cli::{exit_code, CliError, EXIT_USAGE};
use dtlab_rmt::EnsembleConfig;

#[derive(Parser)]
#[command(
    name = "dtlab",
    version,
    about = "Numerics for the quasinilpotent DT-operator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint density table (with --k) or the marginal law of T*T (without).
    Density {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact moments of ((T^k)^* T^k)^n against the closed form.
    Moments {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and print a JSON report.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hilbert-Schmidt distance between F(S_k) and D0 for each k.
    Distance {
        #[arg(long, value_delimiter = ',', default_value = "3,6,12,24")]
        k: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo run of the random-matrix model.
    Simulate {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest power k for S_k and ||T^k||.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Extra probes beyond the spectral checks.
        #[arg(long, value_enum, value_delimiter = ',')]
        checks: Vec<Probe>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The sequence a_{n+1} = a_n F(et/a_n).
    Recursion {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Lambert,
    Spectral,
    Poly,
    Joint,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Lambert => "lambert",
            Suite::Spectral => "spectral",
            Suite::Poly => "poly",
            Suite::Joint => "joint",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Probe {
    Fsk,
    Covariance,
    Moments,
    Decay,
}

fn open(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Density { k, grid, out } => {
            let mut w = open(&out)?;
            let ok = commands::density(k, grid, &mut w)?;
            w.flush()?;
            Ok(ok)
        }
        Command::Moments { k, nmax, out } => {
            let mut w = open(&out)?;
            let ok = commands::moments(k, nmax, &mut w)?;
            w.flush()?;
            Ok(ok)
        }
        Command::Verify { suite, out } => {
            let mut w = open(&out)?;
            let ok = commands::verify(suite.name(), &mut w)?;
            w.flush()?;
            Ok(ok)
        }
        Command::Distance { k, out } => {
            let mut w = open(&out)?;
            let ok = commands::distance(&k, &mut w)?;
            w.flush()?;
            Ok(ok)
        }
        Command::Simulate {
            n,
            samples,
            seed,
            k,
            checks,
            out,
        } => {
            let cfg = EnsembleConfig::new(n, samples, seed, k)?;
            let probes = SimulateChecks {
                fsk: checks.contains(&Probe::Fsk),
                covariance: checks.contains(&Probe::Covariance),
                moments: checks.contains(&Probe::Moments),
                decay: checks.contains(&Probe::Decay),
            };
            let mut w = open(&out)?;
            let ok = commands::simulate(&cfg, probes, &mut w)?;
            w.flush()?;
            Ok(ok)
        }
        Command::Recursion { t, iters, out } => {
            let mut w = open(&out)?;
            let ok = commands::recursion(t, iters, &mut w)?;
            w.flush()?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(passed) => ExitCode::from(exit_code(passed) as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
