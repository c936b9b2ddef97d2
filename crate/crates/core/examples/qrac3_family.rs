//! The 3^(d) -> 1 family: per-orbit optimization and the ratio curve for both
//! families as CSV (d, n=2 ratio, n=3 ratio).

use qrac::classical::classical_success;
use qrac::qrac2::advantage2;
use qrac::qrac3::{advantage3, Qrac3Code};

fn main() -> qrac::error::Result<()> {
    let code = Qrac3Code::new(3)?;
    println!("d=3 optimized base states:");
    for o in code.optimized() {
        let a = &o.ansatz;
        println!(
            "  a={} r={:+.6} t={:+.6} ({:?}) P={:.6}",
            a.a, a.r, a.t, a.branch, o.probability
        );
    }
    let s = code.summary();
    println!(
        "average {:.6}, worst {:.6}, classical {:.6}",
        s.average,
        s.worst,
        classical_success(3, 3)?.value
    );
    println!("question spread {:.1e}\n", code.question_spread()?);

    println!("d,ratio_n2,ratio_n3");
    for d in 2..=20 {
        println!("{d},{:.6},{:.6}", advantage2(d)?, advantage3(d)?);
    }
    Ok(())
}
