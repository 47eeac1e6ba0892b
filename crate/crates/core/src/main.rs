use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use symcurrent::report::{write_report, write_trajectory};
use symcurrent::runner::{exit_code, run, Verdict};
use symcurrent::scenario::{bundled, bundled_names, Overrides, Scenario};
use symcurrent::Error;

/// Evolve dual Schrödinger fields and check generalized continuity equations.
#[derive(Parser)]
#[command(name = "symcurrent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a bundled scenario by name) and write reports.
    Run {
        config: String,
        /// Output directory; defaults to the scenario's `output` or `out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the time step.
        #[arg(long)]
        dt: Option<f64>,
        /// Override the number of steps taken in each time direction.
        #[arg(long)]
        steps: Option<usize>,
        /// Halve every spacing and the time step this many times.
        #[arg(long, default_value_t = 0)]
        refine: u32,
        /// Seed for random initial conditions and phase samples.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and build a scenario without evolving it.
    Validate {
        config: String,
        #[arg(long, default_value_t = 0)]
        refine: u32,
    },
    /// List the bundled scenarios.
    ListScenarios,
    /// Show a bundled scenario.
    Describe { scenario: String },
}

/// Loads a path, falling back to a bundled scenario of that name.
fn load(config: &str) -> Result<(Scenario, Option<PathBuf>), Error> {
    let path = Path::new(config);
    if path.exists() {
        let base = path.parent().map(Path::to_path_buf);
        return Ok((Scenario::load(path)?, base));
    }
    match bundled(config) {
        Some(s) => Ok((s, None)),
        None => Scenario::load(path).map(|s| (s, None)),
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code(err) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListScenarios => {
            for name in bundled_names() {
                let s = bundled(name).expect("bundled");
                println!("{name:<30} {}", s.description);
            }
            ExitCode::SUCCESS
        }
        Command::Describe { scenario } => match bundled(&scenario) {
            Some(s) => {
                println!("{}\n\n{}\n", s.name, s.description);
                println!("{}", s.to_json());
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: no bundled scenario `{scenario}`; try `list-scenarios`");
                ExitCode::from(1)
            }
        },
        Command::Validate { config, refine } => {
            let result = load(&config).and_then(|(s, base)| s.prepare(refine, base.as_deref()).map(|p| (s, p)));
            match result {
                Ok((s, p)) => {
                    let dims: Vec<String> = p.grid.axes().iter().map(|a| a.n.to_string()).collect();
                    println!(
                        "{}: ok (grid {}, dt {}, {} steps each way, {} kinds)",
                        s.name,
                        dims.join("x"),
                        p.scenario.dt,
                        p.scenario.steps,
                        s.kinds.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Run {
            config,
            out,
            dt,
            steps,
            refine,
            seed,
        } => {
            let overrides = Overrides { dt, steps, refine, seed };
            let prepared = load(&config).and_then(|(mut s, base)| {
                s.apply(&overrides)?;
                s.prepare(refine, base.as_deref())
            });
            let prepared = match prepared {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            let dir = out
                .or_else(|| prepared.scenario.output.clone())
                .unwrap_or_else(|| Path::new("out").join(&prepared.scenario.name));
            let stride = prepared.scenario.stride;
            match run(prepared) {
                Ok(result) => {
                    if let Err(e) = write_report(&result, &dir) {
                        return fail(&e);
                    }
                    println!("{} -> {}", result.prepared.scenario.name, dir.display());
                    for k in &result.kinds {
                        println!("{}", k.line());
                    }
                    println!(
                        "mixed expectation variation {:.3e}",
                        result.mixed_expectation_variation()
                    );
                    let violated = result
                        .kinds
                        .iter()
                        .filter(|k| k.verdict == Verdict::Violated && !k.negative_control)
                        .count();
                    if violated > 0 {
                        println!("{violated} applicable kind(s) not conserved");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    if let Error::FieldOverflow { window, .. } = &e {
                        if write_trajectory(window, stride, &dir).is_ok() {
                            eprintln!("partial window written to {}", dir.display());
                        }
                    }
                    fail(&e)
                }
            }
        }
    }
}
