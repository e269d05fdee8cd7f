use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mahler::fields::Rational;
use mahler_cli::{run_newton, run_selftest, run_solve, Report, RunOptions};

#[derive(Parser)]
#[command(
    name = "mahler",
    version,
    about = "Solution bases of linear Mahler equations over Hahn series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Newton data, factorization and a basis of solutions.
    Solve {
        /// Equation file, `-` for standard input.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Newton polygon, slopes, characteristic polynomials and exponents only.
    Newton {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve and verify random operators with known factorizations.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Exponent ceiling below which solutions are certified.
    #[arg(long, default_value = "8", value_parser = parse_rational)]
    precision: Rational,
    /// Number of terms kept in each accumulating geometric sum.
    #[arg(long, default_value_t = 8)]
    depth: usize,
    /// Check residuals, the defining equations and independence.
    #[arg(long)]
    verify: bool,
    /// Largest accepted width of an uncertified gap (default p^-(depth/2)).
    #[arg(long, value_parser = parse_rational)]
    epsilon: Option<Rational>,
    /// Ceiling for the expansion of the coefficients (default 2·precision + 8).
    #[arg(long, value_parser = parse_rational)]
    expansion: Option<Rational>,
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| format!("not a rational number: {e}"))
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            precision: self.precision.clone(),
            depth: self.depth,
            verify: self.verify,
            epsilon: self.epsilon.clone(),
            expansion: self.expansion.clone(),
        }
    }
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn emit(report: &Report, json: bool) -> ExitCode {
    let text = if json {
        serde_json::to_string_pretty(&report.json).expect("report serializes") + "\n"
    } else {
        report.pretty.clone()
    };
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, json) = match &cli.command {
        Command::Solve { input, common } | Command::Newton { input, common } => {
            let text = match read_input(input) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", input.display());
                    return ExitCode::from(2);
                }
            };
            let report = match &cli.command {
                Command::Solve { .. } => run_solve(&text, &common.options()),
                _ => run_newton(&text, &common.options()),
            };
            (report, common.json)
        }
        Command::Selftest { seed, count, common } => (run_selftest(*seed, *count, &common.options()), common.json),
    };
    emit(&report, json)
}
