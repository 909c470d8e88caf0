//! Partial sums S_n of φ(⌊m^c⌋)/⌊m^c⌋ and how their fractional parts
//! spread over [0, 1).
//!
//! cargo run --release --example totient_series -- [n_max]

use num_rational::BigRational;
use spsdense::totient::{density_probe, partial_sums};
use spsdense::ExponentC;

fn main() -> spsdense::Result<()> {
    let n_max: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let c: ExponentC = "3/2".parse()?;
    let s = partial_sums(c, n_max)?;
    for n in [1u64, 2, 3, 10, 100, 1000].into_iter().filter(|&n| n <= n_max) {
        let (f, phi) = s.term(n);
        println!("n = {n:>5}: floor = {f:>8}, phi = {phi:>8}, {{S_n}} ~ {:.12}", s.frac_f64(n));
    }
    println!("S_{n_max} has integer part {} and {{S}} ~ {:.12}", s.total().integer_part(), s.total().frac_f64());

    let mut bins = [0u64; 10];
    for n in 1..=n_max {
        bins[((s.frac_f64(n) * 10.0) as usize).min(9)] += 1;
    }
    println!("decile counts of {{S_n}}: {bins:?}");

    let eps = BigRational::new(1.into(), 100.into());
    for i in 0..10 {
        let t = BigRational::new(i.into(), 10.into());
        match density_probe(&s, &t, &eps)? {
            Some(w) => println!("t = {:.1}: n = {} with {{S_n}} = {:.6}", i as f64 / 10.0, w.n, w.frac),
            None => println!("t = {:.1}: no n <= {n_max}", i as f64 / 10.0),
        }
    }
    Ok(())
}
