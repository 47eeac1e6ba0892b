//! Runs a bundled scenario end to end and writes the same report files as
//! `symcurrent run`. Pass a scenario name (default `pt_linear_gain_loss`)
//! and optionally an output directory.

use std::path::PathBuf;

use symcurrent::report::write_report;
use symcurrent::runner::run;
use symcurrent::scenario::{bundled, bundled_names};

fn main() -> symcurrent::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "pt_linear_gain_loss".into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join(&name));
    let Some(scenario) = bundled(&name) else {
        eprintln!("unknown scenario; bundled: {}", bundled_names().collect::<Vec<_>>().join(", "));
        std::process::exit(1);
    };

    let result = run(scenario.prepare(0, None)?)?;
    for k in &result.kinds {
        println!("{}", k.line());
    }
    println!("mixed expectation variation {:.3e}", result.mixed_expectation_variation());
    let files = write_report(&result, &out)?;
    println!("{} files written under {}", files.len(), out.display());
    Ok(())
}
