//! Exact star discrepancy of the residue point sets against the
//! Erdős–Turán–Koksma bound, plus the sampling estimator past the exact budget.
//!
//! cargo run --release --example discrepancy -- [N]

use spsdense::discrepancy::{
    build_residue_pointset, discrepancy, etks_bound, DiscrepancyMode, EtksParams, EXACT_BUDGET,
};
use spsdense::ExponentC;

fn main() -> spsdense::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    for c in ["3/2", "5/2"] {
        let c: ExponentC = c.parse()?;
        let dim = c.floor() as usize + 1;
        // stay inside the exact budget for this dimension
        let n = n.min(EXACT_BUDGET[dim - 1] as u64);
        for r in [3u64, 5, 7] {
            let x = build_residue_pointset(c, r, n)?;
            let d = discrepancy(&x, DiscrepancyMode::Exact)?;
            let bounds: Vec<String> = [1, 2, 4, 8]
                .iter()
                .map(|&k_max| Ok(format!("K={k_max}: {:.3}", etks_bound(&x, EtksParams { k_max }, None)?.value)))
                .collect::<spsdense::Result<_>>()?;
            println!("c = {c}, s = {dim}, R = {r}, N = {n}: D = {:.5}  ETKS {}", d.value_f64, bounds.join(", "));
        }
    }

    let c: ExponentC = "5/2".parse()?;
    let x = build_residue_pointset(c, 3, 1000)?;
    let est = discrepancy(&x, DiscrepancyMode::ExactOrEstimate { samples: 20_000, seed: 1 })?;
    println!("c = {c}, N = 1000 is past the exact budget: {} {:.5}", est.mode, est.value_f64);
    Ok(())
}
