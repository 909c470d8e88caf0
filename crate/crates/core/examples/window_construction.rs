//! Prime families, the modulus R and the residue r for a block length H,
//! checked on synthetic values, plus the large-prime product.
//!
//! cargo run --release --example window_construction -- [H]

use num_bigint::BigUint;
use spsdense::totient::{
    build_prime_families, build_window, large_prime_product, verify_window_values, FamilyOptions, MertensQuery,
};
use spsdense::Error;

fn main() -> spsdense::Result<()> {
    let big_h: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    match build_prime_families(21, FamilyOptions::default()) {
        Err(e @ Error::PrimeBudget { .. }) => println!("H = 21: {e}"),
        other => println!("H = 21: {other:?}"),
    }

    let opts = FamilyOptions { allow_small_h: true, ..FamilyOptions::default() };
    let w = build_window(build_prime_families(big_h, opts)?)?;
    println!("toy window H = {big_h}: L = {}, R has {} digits", w.cutoff, w.modulus.to_string().len());
    for f in &w.families {
        println!("  h = {:>2}: {} primes, ratio {:.5}", f.h, f.primes.len(), num_traits::ToPrimitive::to_f64(&f.ratio).unwrap());
    }
    let q = 1_000_000_007u64;
    let values: Vec<BigUint> = w.families.iter().map(|f| &f.product * f.h * q).collect();
    println!("synthetic n_h = h P_h q pass: {}", verify_window_values(&w, &values)?.all_pass);

    for n in [6_469_693_230u64, 1_000_000, 999_983 * 7] {
        let r = large_prime_product(&MertensQuery::new(n.into(), 0.75, 0.5)?)?;
        println!("n = {n}: primes >= {:.3} give {} ({:.5}) >= 1/2: {}", r.threshold, r.value, r.value_f64, r.satisfied);
    }
    Ok(())
}
