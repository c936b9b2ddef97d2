//! Known (d+1)^(d) -> 1 quantum codes against the optimal classical strategy.

use qrac::cli::{render_table1, table1_report, Format};

fn main() -> qrac::error::Result<()> {
    print!("{}", render_table1(&table1_report()?, Format::Text)?);
    Ok(())
}
