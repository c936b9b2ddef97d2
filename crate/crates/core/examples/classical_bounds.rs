//! Optimal classical success for n symbols of d levels, with the exhaustive
//! search cross-check on small instances.

use qrac::classical::{brute_force_optimal, classical_success, closed_form_success};

fn main() -> qrac::error::Result<()> {
    for (n, d) in [(2, 2), (2, 4), (3, 2), (3, 3), (4, 3), (9, 8), (20, 5)] {
        let p = classical_success(n, d)?;
        println!("n={n:>2} d={d}: {} = {:.6}", p.exact, p.value);
    }

    println!("\nclosed forms for two and three symbols:");
    for d in [2, 3, 5, 10] {
        println!(
            "  d={d:>2}: n=2 {:.6}  n=3 {:.6}",
            closed_form_success(2, d)?,
            closed_form_success(3, d)?
        );
    }

    println!("\nexhaustive search:");
    for (n, d) in [(2, 2), (3, 2), (2, 3)] {
        let best = brute_force_optimal(n, d)?;
        let formula = classical_success(n, d)?;
        println!(
            "  n={n} d={d}: {}/{} (formula {}, equal: {})",
            best.correct,
            best.trials,
            formula.exact,
            best.exact() == formula.exact
        );
    }
    Ok(())
}
