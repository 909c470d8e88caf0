//! Certified floors of m^c, exact hits at perfect powers, and the Taylor
//! remainder bound.
//!
//! cargo run --release --example floor_powers

use spsdense::kernel::{check_taylor_remainder, floor_pow, taylor_expand, ExponentC, Precision};

fn main() -> spsdense::Result<()> {
    let prec = Precision::default();
    for c in ["3/2", "5/2", "7/3", "11/10"] {
        let c: ExponentC = c.parse()?;
        print!("c = {c}:");
        for m in [2u64, 4, 8, 27, 1000, 123_456_789] {
            let f = floor_pow(m, c, 1e-20, prec)?;
            let frac = f.frac_enclosure.as_ref().map_or(f64::NAN, |iv| iv.mid_f64());
            let tag = if f.exact_integer { " (exact)" } else { "" };
            print!("  {m}^c = {} + {frac:.6}{tag}", f.floor_value);
        }
        println!();
    }

    let c: ExponentC = "7/3".parse()?;
    let (m, h) = (1_000_000u64, 7u64);
    let t = taylor_expand(m, h, c, 256);
    println!(
        "(m+h)^c - polynomial part for m = {m}, h = {h}: remainder ~ {:.3e}, bound {:.3e}",
        t.remainder().mid_f64(),
        t.remainder_bound.mid_f64()
    );
    let r = check_taylor_remainder(m, h, c, prec)?;
    println!("certified 0 <= r <= bound: {} (decided at {} bits)", r.holds(), r.bits);
    Ok(())
}
