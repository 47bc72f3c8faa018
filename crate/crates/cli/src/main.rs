use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conic_forge::sim::{run, verify, SimConfig, VERIFY_TOL};
use conic_forge_cli::batch::{jobs_for, run_batch, CSV_HEADER};
use conic_forge_cli::gen::{generate, modes_for, GenError, GenOptions, Mode};
use conic_forge_cli::io::{load_scenario, load_trace, save_scenario, save_trace, TraceFile};
use conic_forge_cli::render::render_all;

/// Conic pattern formation by robots with crash faults.
#[derive(Parser)]
#[command(name = "conic-forge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SimArgs {
    /// Round budget before a run counts as non-terminating.
    #[arg(long, default_value_t = 4)]
    max_rounds: usize,
    /// Geometric tolerance of the checker.
    #[arg(long, env = "CONIC_FORGE_TOL", default_value_t = VERIFY_TOL)]
    tol: f64,
    /// Give each robot a fresh random frame every round.
    #[arg(long)]
    frames: bool,
    /// Let random frames flip handedness too.
    #[arg(long, requires = "frames")]
    mirrored: bool,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            max_rounds: self.max_rounds,
            random_frames: self.frames,
            mirrored_frames: self.mirrored,
            tol: self.tol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file.
    Gen {
        #[arg(long)]
        f: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "typeO")]
        mode: Mode,
        /// Crash between 1 and f - 1 robots instead of exactly f.
        #[arg(long)]
        at_most_f: bool,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a scenario and verify the result.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
        /// Accept a symmetric initial configuration.
        #[arg(long)]
        allow_reflective_initial: bool,
        /// Where to write the trace.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate and run many scenarios, writing one CSV row each.
    Batch {
        /// Fault counts to cover; all of 1..=5 when omitted.
        #[arg(long, value_delimiter = ',')]
        f: Vec<usize>,
        /// Scenarios per (f, mode).
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to one mode.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        at_most_f: bool,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one SVG per round of a trace.
    Render {
        trace: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Re-verify a saved trace.
    Check {
        trace: PathBuf,
        #[arg(long, env = "CONIC_FORGE_TOL", default_value_t = VERIFY_TOL)]
        tol: f64,
    },
}

/// Exit status 2: bad arguments or unreadable input.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Usage> {
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| Usage(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn print_checks(trace: &conic_forge::sim::RoundTrace) {
    for c in &trace.checks {
        println!(
            "{} {}: {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        );
    }
}

fn execute(cli: Cli) -> Result<bool, Usage> {
    match cli.command {
        Command::Gen {
            f,
            n,
            seed,
            mode,
            at_most_f,
            out,
        } => {
            let s = generate(f, n, seed, mode, GenOptions { at_most_f }).map_err(|e| match e {
                GenError::Usage(m) => Usage(m),
                other => Usage(other.to_string()),
            })?;
            match &out {
                Some(p) => save_scenario(p, &s)?,
                None => emit(&None, &(serde_json::to_string_pretty(&s)? + "\n"))?,
            }
            Ok(true)
        }
        Command::Run {
            scenario,
            sim,
            allow_reflective_initial,
            out,
        } => {
            let mut s = load_scenario(&scenario)?;
            s.options.allow_reflective_initial |= allow_reflective_initial;
            s.validate()?;
            let config = sim.config();
            let trace = run(&s, &config);
            println!("{:?}", trace.verdict);
            print_checks(&trace);
            let ok = trace.verdict.is_success();
            if let Some(p) = out {
                save_trace(
                    &p,
                    &TraceFile {
                        scenario: s,
                        config,
                        trace,
                    },
                )?;
            }
            Ok(ok)
        }
        Command::Batch {
            f,
            count,
            seed,
            mode,
            at_most_f,
            sim,
            out,
        } => {
            let fs_: Vec<usize> = if f.is_empty() { (1..=5).collect() } else { f };
            let mut jobs = Vec::new();
            for &f in &fs_ {
                if !(1..=5).contains(&f) {
                    return Err(Usage(format!("f = {f} is outside 1..=5")));
                }
                let modes = match mode {
                    Some(m) if m.supports(f) => vec![m],
                    Some(_) => continue,
                    None => modes_for(f),
                };
                let ns: Vec<usize> = if f == 1 {
                    (2..=10).collect()
                } else {
                    (2 * f + 1..=2 * f + 9).collect()
                };
                for m in modes {
                    jobs.extend(jobs_for(f, m, &ns, count, seed, GenOptions { at_most_f }));
                }
            }
            let results = run_batch(&jobs, &sim.config());
            let mut csv = String::from(CSV_HEADER);
            csv.push('\n');
            for (i, r) in results.iter().enumerate() {
                csv.push_str(&r.csv_row(i));
                csv.push('\n');
            }
            emit(&out, &csv)?;
            let failed = results.iter().filter(|r| !r.passed()).count();
            eprintln!(
                "{} of {} scenarios passed",
                results.len() - failed,
                results.len()
            );
            Ok(failed == 0)
        }
        Command::Render { trace, out } => {
            let file = load_trace(&trace)?;
            fs::create_dir_all(&out)?;
            for (r, svg) in render_all(&file).iter().enumerate() {
                let path = out.join(format!("round_{r}.svg"));
                fs::write(&path, svg)?;
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Check { trace, tol } => {
            let mut file = load_trace(&trace)?;
            file.trace.checks = verify(&file.trace, &file.scenario, tol);
            print_checks(&file.trace);
            Ok(file.trace.checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
