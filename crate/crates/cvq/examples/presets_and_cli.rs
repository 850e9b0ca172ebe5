//! Driving the command-line layer from code.
//!
//! Everything the `cvq` binary does is reachable as a library call:
//! parse arguments with clap, run them with `execute`, and get a table back
//! instead of text on stdout. Presets resolve the same way for both.

use clap::Parser;
use cvq::cli::{anchors, execute, Cli};
use cvq::presets::PresetFile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let presets = PresetFile::builtin();
    println!("built-in presets: {}", presets.names().collect::<Vec<_>>().join(", "));

    let mut p = presets.resolve("table1")?;
    p.apply_override("r=0.8")?;
    for a in anchors(&p)?.iter().take(4) {
        println!("  {:<24} {:>10.3}  target {:>6} +/- {:<4} {}", a.name, a.value, a.target, a.tol, if a.pass() { "ok" } else { "off" });
    }

    let cli = Cli::try_parse_from(["cvq", "teleport", "--protocol", "bare,swap", "--sweep", "L", "100", "500", "5"])?;
    let outcome = execute(&cli).map_err(|e| format!("{e:?}"))?;
    print!("\n{}", outcome.report.to_csv());

    let col = outcome.report.column("F_swap").expect("requested protocol has a column");
    println!("swap column index {col}, {} rows", outcome.report.rows.len());
    Ok(())
}
