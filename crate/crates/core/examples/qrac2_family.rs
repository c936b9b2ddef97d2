//! The 2^(d) -> 1 family: simulated success, closed form and advantage.

use qrac::qrac2::{advantage2, success2_closed, success2_simulated, Qrac2Code};

fn main() -> qrac::error::Result<()> {
    let code = Qrac2Code::new(4)?;
    println!("d=4 encoding of (0, 0):");
    for (k, a) in code.state(0, 0).amps().iter().enumerate() {
        println!("  |{k}>  {:+.4}", a.re);
    }

    println!("\n d   simulated   closed      advantage");
    let mut best = (0, 0.0);
    for d in 2..=16 {
        let sim = success2_simulated(d)?;
        let adv = advantage2(d)?;
        if adv > best.1 {
            best = (d, adv);
        }
        println!(
            "{d:>2}   {:.8}  {:.8}  {adv:.6}",
            sim.average,
            success2_closed(d)?
        );
    }
    println!("\nlargest advantage {:.6} at d = {}", best.1, best.0);
    Ok(())
}
