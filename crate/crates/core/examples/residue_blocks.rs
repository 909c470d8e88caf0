//! Residues of ⌊n^c⌋ mod R and the first arithmetic-progression blocks.
//!
//! cargo run --release --example residue_blocks -- [search_limit]

use spsdense::blocks::{find_ap_block, missing_block_scan, residue_sequence, BlockQuery};
use spsdense::ExponentC;

fn main() -> spsdense::Result<()> {
    let limit: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let c: ExponentC = "3/2".parse()?;
    println!("floor(n^(3/2)) mod 7, n = 1..20: {:?}", residue_sequence(c, 7, 1, 20)?);
    println!("missing length-2 blocks mod 3 up to n = 10: {:?}", missing_block_scan(c, 3, 2, 10)?);
    for block_len in 1..=2u32 {
        let (mut pairs, mut found) = (0, 0);
        for modulus in 2..=20u64 {
            let mut row = Vec::new();
            for residue in 0..modulus {
                let q = BlockQuery { c, modulus, block_len, residue, search_limit: limit };
                pairs += 1;
                match find_ap_block(&q)? {
                    Some(w) => {
                        assert!(w.verified);
                        found += 1;
                        row.push(w.m.to_string());
                    }
                    None => row.push("-".into()),
                }
            }
            println!("H={block_len} R={modulus:>2}: {}", row.join(" "));
        }
        println!("H={block_len}: {found}/{pairs} residue classes have a witness below {limit}");
    }
    Ok(())
}
