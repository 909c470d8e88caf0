//! Exhaustive check that the window conditions force the residue block.
//!
//! cargo run --release --example fracgame -- [m_max]

use spsdense::blocks::fracgame_scan;
use spsdense::{ExponentC, Precision};

fn main() -> spsdense::Result<()> {
    let m_max: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let c: ExponentC = "3/2".parse()?;
    let scan = fracgame_scan(c, 2..=50, 1..=4, 1..=m_max, Precision::default())?;
    println!("m <= {m_max}, R in 2..=50, H in 1..=4");
    println!("instances              {}", scan.instances);
    println!("condition (i) true     {}", scan.cond_i_true);
    println!("windows evaluated      {}", scan.evaluated);
    println!("all conditions true    {}", scan.all_true);
    println!("endpoint hits          {}", scan.boundary_hits);
    println!("counterexamples        {}", scan.counterexamples.len());
    for rep in &scan.counterexamples {
        println!("{}", serde_json::to_string(rep).expect("report serializes"));
    }
    Ok(())
}
