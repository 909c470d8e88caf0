//! Weyl sums S(N; k, R) with certified error, their size relative to
//! N^(1-θ), and the Kusmin–Landau / van der Corput bounds.
//!
//! cargo run --release --example exponential_sums

use spsdense::discrepancy::{
    estimate_vdc_params, exp_sum, kusmin_landau_bound, vdc_bound, vdc_order, vdc_target, ExpSumSpec,
};
use spsdense::ExponentC;

fn main() -> spsdense::Result<()> {
    let c: ExponentC = "3/2".parse()?;
    println!("c = {c}, theta = {:.6}", c.theta());
    for n in [100u64, 1_000, 10_000, 100_000] {
        let mut worst = (0.0f64, vec![0, 0]);
        for k0 in -3i64..=3 {
            for k1 in -3i64..=3 {
                if (k0, k1) == (0, 0) {
                    continue;
                }
                let v = exp_sum(&ExpSumSpec { c, n, modulus: 5, k: vec![k0, k1] }, 1e-8)?;
                if v.ratio > worst.0 {
                    worst = (v.ratio, vec![k0, k1]);
                }
            }
        }
        println!("N = {n:>6}: max |S|/N^(1-theta) = {:.4} at k = {:?}", worst.0, worst.1);
    }

    let n = 10_000;
    let kl = kusmin_landau_bound(c, 1.5 / 5.0, n)?;
    println!("Kusmin-Landau for k = (0, 1), R = 5, N = {n}: {kl:?}");

    let c: ExponentC = "7/2".parse()?;
    let spec = ExpSumSpec { c, n, modulus: 3, k: vec![1, 0, 0, 0] };
    let p = estimate_vdc_params(&spec)?;
    let b = vdc_bound(&p, n);
    let s = exp_sum(&spec, 1e-8)?;
    println!(
        "van der Corput for c = {c}, q = {:?}: bound {:.1} (terms {:?}), target N^(1-theta) = {:.1}, |S| = {:.1}",
        vdc_order(c, &spec.k),
        b.total,
        b.terms,
        vdc_target(c, n),
        s.abs
    );
    Ok(())
}
