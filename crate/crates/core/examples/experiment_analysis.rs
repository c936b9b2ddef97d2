//! Summary of the four-level photonic experiment data, optionally from a
//! user-supplied CSV: `cargo run --example experiment_analysis -- path.csv`.

use std::path::PathBuf;

use qrac::cli::{render_experiment, ExperimentCliReport, Format};
use qrac::experiment::{analyze, load_table2, prepare_optics_state, LogicalMap};

fn main() -> qrac::error::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from);
    let records = load_table2(path.as_deref())?;

    let first = &records[0];
    println!("{} prepared amplitudes:", first.label);
    for (k, a) in prepare_optics_state(&first.setting)
        .amps()
        .iter()
        .enumerate()
    {
        println!("  {:<4} {:+.4}{:+.4}i", LogicalMap::MODES[k], a.re, a.im);
    }
    println!();

    let report = ExperimentCliReport {
        command: "experiment",
        report: analyze(&records)?,
    };
    print!("{}", render_experiment(&report, Format::Text)?);
    Ok(())
}
