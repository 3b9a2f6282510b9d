//! Command-line driver: parse circuit programs, simulate or sample them,
//! inspect matrix elements, run verification suites, and emit gate reports.

mod error;
mod exec;
mod json;
mod program;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fockrail_core::klm;
use fockrail_core::verify;

use crate::error::ProgramError;
use crate::exec::DriverError;

#[derive(Parser)]
#[command(
    name = "fockrail",
    about = "Exact simulation of loop-based linear optical circuits",
    version
)]
struct Cli {
    /// Print classified errors as JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the exact outcome distribution of a program.
    Simulate {
        file: PathBuf,
        /// Photon cap for coherent preparations.
        #[arg(long)]
        truncation: Option<u32>,
        /// Write the result as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw seeded shots from a program's distribution.
    Sample {
        file: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        /// Photon cap for coherent preparations.
        #[arg(long)]
        truncation: Option<u32>,
        /// Write the result as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate one matrix element of the program's generating operator.
    Element {
        file: PathBuf,
        /// Input occupation: internal modes, then one entry per time-bin.
        #[arg(long = "in")]
        input: String,
        /// Output occupation: one entry per time-bin, then internal modes.
        #[arg(long = "out")]
        output: String,
        /// Write the result as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a named verification suite; exits 0 only if every check passes.
    Verify {
        /// One of: interchange, functor, hom, ns, cz, exph, singleloop.
        suite: String,
    },
    /// Print the construction report of a named gate.
    Gate {
        /// One of: ns, cz.
        name: String,
        /// Write the report as JSON to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

// Exit codes: 0 success, 1 runtime/verification failure, 2 usage (clap),
// 3 parse error, 4 semantic error, 5 io error.
const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_SEMANTIC: u8 = 4;
const EXIT_IO: u8 = 5;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(failure) => {
            report_failure(&failure, cli.json_errors);
            ExitCode::from(match &failure {
                Failure::Program(e) => {
                    if e.class.is_parse() {
                        EXIT_PARSE
                    } else {
                        EXIT_SEMANTIC
                    }
                }
                Failure::Core(_) => EXIT_FAIL,
                Failure::Io(_, _) => EXIT_IO,
            })
        }
    }
}

enum Failure {
    Program(ProgramError),
    Core(fockrail_core::Error),
    Io(PathBuf, std::io::Error),
}

impl From<DriverError> for Failure {
    fn from(e: DriverError) -> Self {
        match e {
            DriverError::Program(p) => Failure::Program(p),
            DriverError::Core(c) => Failure::Core(c),
        }
    }
}

impl From<ProgramError> for Failure {
    fn from(e: ProgramError) -> Self {
        Failure::Program(e)
    }
}

fn report_failure(failure: &Failure, json_errors: bool) {
    match failure {
        Failure::Program(e) => {
            if json_errors {
                eprintln!("{}", json::error(e));
            } else {
                eprintln!("error: {e}");
            }
        }
        Failure::Core(e) => eprintln!("error: {e}"),
        Failure::Io(path, e) => eprintln!("error: {}: {e}", path.display()),
    }
}

fn read_program(path: &Path) -> Result<program::CircuitProgram, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    Ok(program::parse(&text)?)
}

fn write_output(path: Option<&Path>, doc: &str) -> Result<(), Failure> {
    if let Some(path) = path {
        std::fs::write(path, format!("{doc}\n"))
            .map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Simulate { file, truncation, json } => {
            let program = read_program(file)?;
            let dist = exec::simulate(&program, *truncation)?;
            let cap = exec::effective_truncation(&program, *truncation);
            println!("outcomes over {} time-bins:", program.timebins);
            for (occ, p) in dist.sorted_entries() {
                println!("  {:?}  probability {:.12}", occ.counts(), p);
            }
            println!("total {:.12}, residual {:.3e}", dist.total(), dist.residual());
            write_output(json.as_deref(), &json::distribution(&dist, cap))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample { file, shots, seed, truncation, json } => {
            let program = read_program(file)?;
            let threads = exec::thread_count();
            let out = exec::sample(&program, *shots, *seed, *truncation, threads)?;
            println!(
                "{shots} shots (seed {seed}): {} kept, {} discarded, {} overflow",
                out.histogram.shots() - out.histogram.overflow(),
                out.discarded,
                out.histogram.overflow()
            );
            for (occ, n) in out.histogram.sorted_counts() {
                println!("  {:?}  count {n}", occ.counts());
            }
            let doc = match (&out.ditstream, program.encoding) {
                (Some(dits), Some((d, _))) => {
                    println!("ditstream (arity {d}):");
                    for (occ, n) in dits.sorted_counts() {
                        println!("  {:?}  count {n}", occ.counts());
                    }
                    json::histogram(
                        dits,
                        "ditstream",
                        Some(d),
                        out.discarded,
                        out.residual,
                        *seed,
                        out.truncation,
                    )
                }
                _ => json::histogram(
                    &out.histogram,
                    "histogram",
                    None,
                    out.discarded,
                    out.residual,
                    *seed,
                    out.truncation,
                ),
            };
            write_output(json.as_deref(), &doc)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Element { file, input, output, json } => {
            let program = read_program(file)?;
            let internal = 2 * program.loops - 1;
            let modes = internal + program.timebins;
            let n_in = exec::parse_occupation(input, modes)?;
            let n_out = exec::parse_occupation(output, modes)?;
            let amp = exec::element(&program, &n_in, &n_out)?;
            println!("element = {:+.12} {:+.12}i", amp.re, amp.im);
            println!("|element|^2 = {:.12}", amp.norm_sqr());
            write_output(json.as_deref(), &json::element(amp))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let Some(report) = verify::run_suite(suite) else {
                return Err(Failure::Program(ProgramError::global(
                    error::ErrorClass::InvalidValue,
                    format!(
                        "unknown suite `{suite}` (expected one of {})",
                        verify::SUITES.join(", ")
                    ),
                )));
            };
            let mut all_passed = true;
            for check in &report.checks {
                let status = if check.passed() { "PASS" } else { "FAIL" };
                println!(
                    "[{status}] {}: {:.3e} (threshold {:.1e})",
                    check.label, check.value, check.threshold
                );
                all_passed &= check.passed();
            }
            if all_passed {
                println!("suite {}: PASS", report.name);
                Ok(ExitCode::SUCCESS)
            } else {
                println!("suite {}: FAIL", report.name);
                Ok(ExitCode::from(EXIT_FAIL))
            }
        }
        Command::Gate { name, report } => {
            let gate_report = match name.as_str() {
                "ns" => klm::nonlinear_sign().report,
                "cz" => klm::controlled_z().report,
                other => {
                    return Err(Failure::Program(ProgramError::global(
                        error::ErrorClass::InvalidValue,
                        format!("unknown gate `{other}` (expected ns or cz)"),
                    )))
                }
            };
            println!("success probability = {:.12}", gate_report.success_probability);
            for (m, c) in gate_report.coefficients.iter().enumerate() {
                println!("  p[{m}] = {:+.12} {:+.12}i", c.re, c.im);
            }
            println!("max deviation from target = {:.3e}", gate_report.max_deviation);
            write_output(report.as_deref(), &json::gate_report(&gate_report))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
