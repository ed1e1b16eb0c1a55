//! Benchmark driver: runs selectors on generated or file inputs and writes CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cartesian_topk::bench::{self, BenchConfig, Distribution};
use cartesian_topk::{Algorithm, Error};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(version, about = "k smallest sums of m arrays, one pick per array")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Comma-separated selector names, or `all`.
    #[arg(long, default_value = "all", value_delimiter = ',')]
    algorithm: Vec<String>,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Layer growth rate for fast-soft-tree, in (1, 2).
    #[arg(long, default_value_t = 1.05)]
    alpha: f64,
    /// uniform, exponential or file.
    #[arg(long, default_value = "uniform")]
    distribution: String,
    /// One array per line; implies `--distribution file`.
    #[arg(long)]
    input_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    /// Check every result against the brute-force oracle when it fits.
    #[arg(long)]
    validate: bool,
    /// Print mean pops per tree level to stderr.
    #[arg(long)]
    stats: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a gnuplot script plotting wall time against k from a CSV.
    Gnuplot {
        csv: String,
        /// Series to plot.
        #[arg(long, default_value = "all", value_delimiter = ',')]
        algorithm: Vec<String>,
    },
}

fn algorithms(names: &[String]) -> Result<Vec<Algorithm>, Error> {
    let mut out = Vec::new();
    for name in names {
        if name == "all" {
            out.extend(Algorithm::ALL);
        } else {
            out.push(name.parse()?);
        }
    }
    Ok(out)
}

fn config(cli: &Cli) -> Result<BenchConfig, Error> {
    let mut distribution: Distribution = cli.distribution.parse()?;
    if cli.input_file.is_some() {
        distribution = Distribution::File;
    }
    Ok(BenchConfig {
        algorithms: algorithms(&cli.algorithm)?,
        m: cli.m,
        n: cli.n,
        k: cli.k,
        alpha: cli.alpha,
        distribution,
        input_file: cli.input_file.clone(),
        seed: cli.seed,
        replicates: cli.replicates,
        validate: cli.validate,
    })
}

fn execute(cli: Cli) -> Result<(), Error> {
    if let Some(Command::Gnuplot { csv, algorithm }) = &cli.command {
        let names: Vec<&str> = algorithms(algorithm)?.iter().map(|a| a.name()).collect();
        print!("{}", bench::gnuplot_script(csv, &names));
        return Ok(());
    }
    let config = config(&cli)?;
    let rows = bench::run(&config)?;
    match &cli.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut out = BufWriter::new(file);
            bench::write_csv(&mut out, &rows)?;
            out.flush()?;
        }
        None => bench::write_csv(io::stdout().lock(), &rows)?,
    }
    if cli.stats {
        for algorithm in &config.algorithms {
            let means = bench::mean_pops_per_level(&rows, algorithm.name());
            if !means.is_empty() {
                let cols: Vec<String> = means.iter().map(|v| format!("{v:.2}")).collect();
                eprintln!("{algorithm}: {}", cols.join(" "));
            }
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) | Error::ContractViolation(_) | Error::GuardExceeded { .. } => 1,
        Error::Parse { .. } | Error::NonFinite(_) | Error::Io(_) => 2,
        Error::Validation(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
