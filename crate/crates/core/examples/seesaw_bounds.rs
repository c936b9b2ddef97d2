//! Numerical lower bounds from the see-saw against the explicit constructions.

use qrac::qrac2::success2_closed;
use qrac::qrac3::success3;
use qrac::seesaw::{objective, seesaw_run};

fn main() -> qrac::error::Result<()> {
    let seed = 2024;
    for d in 2..=4 {
        let r = seesaw_run(2, d, 20, 500, seed)?;
        println!(
            "n=2 d={d}: see-saw {:.8}  construction {:.8}  ({} iterations)",
            r.best,
            success2_closed(d)?,
            r.iterations
        );
    }
    for d in 2..=3 {
        let r = seesaw_run(3, d, 40, 500, seed)?;
        println!(
            "n=3 d={d}: see-saw {:.8}  construction {:.8}  certificate {:.8}",
            r.best,
            success3(d)?.summary.average,
            objective(&r.certificate)
        );
    }
    Ok(())
}
