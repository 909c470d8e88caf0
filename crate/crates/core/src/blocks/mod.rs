//! Residues of `⌊n^c⌋` modulo `R`: sequences, arithmetic-progression block
//! witnesses, and scans for blocks that never show up.

mod fracgame;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{floor_value_big, floor_value_small, ExponentC};

pub use fracgame::{check_fracgame, fracgame_scan, Condition, FracgameContext, FracgameReport, FracgameScan};

/// Numbers of `m` handled by one worker before results are merged.
const CHUNK: u64 = 1 << 15;

/// Default budget for `find_ap_block`.
pub const DEFAULT_SEARCH_LIMIT: u64 = 10_000_000;

/// `⌊n^c⌋ mod R`.
pub fn floor_mod(n: u64, c: ExponentC, modulus: u64) -> u64 {
    match floor_value_small(n, c) {
        Some(f) => f % modulus,
        None => (floor_value_big(&BigUint::from(n), c) % modulus)
            .to_u64()
            .expect("residue fits the modulus"),
    }
}

/// `⌊n^c⌋ mod R` for `n` in `n_from..=n_to`.
pub fn residue_sequence(c: ExponentC, modulus: u64, n_from: u64, n_to: u64) -> Result<Vec<u64>> {
    if modulus == 0 {
        return Err(Error::Domain("modulus must be at least 1".into()));
    }
    if n_from == 0 || n_from > n_to {
        return Err(Error::Domain(format!("invalid range {n_from}..={n_to}")));
    }
    Ok(residues_unchecked(c, modulus, n_from, n_to))
}

fn residues_unchecked(c: ExponentC, modulus: u64, n_from: u64, n_to: u64) -> Vec<u64> {
    let len = n_to - n_from + 1;
    let chunks = len.div_ceil(CHUNK);
    let parts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let lo = n_from + i * CHUNK;
            let hi = (lo + CHUNK - 1).min(n_to);
            (lo..=hi).map(|n| floor_mod(n, c, modulus)).collect()
        })
        .collect();
    parts.concat()
}

/// A request for the smallest `m <= search_limit` with
/// `⌊(m+h)^c⌋ ≡ r + h (mod R)` for every `h` in `1..=H`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockQuery {
    pub c: ExponentC,
    pub modulus: u64,
    pub block_len: u32,
    pub residue: u64,
    pub search_limit: u64,
}

impl BlockQuery {
    pub fn validate(&self) -> Result<()> {
        if self.modulus == 0 {
            return Err(Error::Domain("modulus must be at least 1".into()));
        }
        if self.residue >= self.modulus {
            return Err(Error::Domain(format!(
                "residue {} is not reduced modulo {}",
                self.residue, self.modulus
            )));
        }
        if self.block_len == 0 {
            return Err(Error::Domain("block length must be at least 1".into()));
        }
        if self.search_limit < self.block_len as u64 + 1 {
            return Err(Error::Domain(format!(
                "search limit {} is below H+1 = {}",
                self.search_limit,
                self.block_len + 1
            )));
        }
        Ok(())
    }

    fn target(&self, h: u32) -> u64 {
        ((self.residue as u128 + h as u128) % self.modulus as u128) as u64
    }
}

/// One witness `m` with the observed residues `⌊(m+h)^c⌋ mod R`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BlockWitness {
    pub m: u64,
    pub verified: bool,
    pub per_h: Vec<(u32, u64)>,
}

/// Recomputes the residues of a candidate witness through the big-integer
/// root alone, independently of the search path.
pub fn verify_block(q: &BlockQuery, m: u64) -> BlockWitness {
    let per_h: Vec<(u32, u64)> = (1..=q.block_len)
        .map(|h| {
            let f = floor_value_big(&BigUint::from(m + h as u64), q.c);
            (h, (f % q.modulus).to_u64().expect("reduced"))
        })
        .collect();
    let verified = per_h.iter().all(|&(h, v)| v == q.target(h));
    BlockWitness { m, verified, per_h }
}

/// Smallest witness in `1..=search_limit`, or `None` when the range holds
/// none. A `None` says nothing about larger `m`.
pub fn find_ap_block(q: &BlockQuery) -> Result<Option<BlockWitness>> {
    q.validate()?;
    let batch = rayon::current_num_threads().max(1) as u64;
    let mut start = 1u64;
    while start <= q.search_limit {
        let found = (0..batch)
            .into_par_iter()
            .filter_map(|i| {
                let lo = start.checked_add(i * CHUNK)?;
                if lo > q.search_limit {
                    return None;
                }
                let hi = (lo + CHUNK - 1).min(q.search_limit);
                scan_chunk(q, lo, hi)
            })
            .min();
        if let Some(m) = found {
            return Ok(Some(verify_block(q, m)));
        }
        start = start.saturating_add(batch * CHUNK);
    }
    Ok(None)
}

fn scan_chunk(q: &BlockQuery, lo: u64, hi: u64) -> Option<u64> {
    let h = q.block_len as u64;
    let res = residues_unchecked(q.c, q.modulus, lo + 1, hi + h);
    (lo..=hi).find(|&m| {
        let base = (m - lo) as usize;
        (1..=q.block_len).all(|j| res[base + j as usize - 1] == q.target(j))
    })
}

/// Smallest witness for every residue class at once, scanning `m` upwards
/// until all classes are covered or `search_limit` is reached.
pub fn first_witnesses(c: ExponentC, modulus: u64, block_len: u32, search_limit: u64) -> Result<Vec<Option<u64>>> {
    let probe = BlockQuery {
        c,
        modulus,
        block_len,
        residue: 0,
        search_limit,
    };
    probe.validate()?;
    let mut first: Vec<Option<u64>> = vec![None; modulus as usize];
    let mut missing = modulus as usize;
    let h = block_len as u64;
    let mut lo = 1u64;
    while lo <= search_limit && missing > 0 {
        let hi = (lo + CHUNK - 1).min(search_limit);
        let res = residues_unchecked(c, modulus, lo + 1, hi + h);
        for m in lo..=hi {
            let base = (m - lo) as usize;
            let r = (res[base] + modulus - 1 % modulus) % modulus;
            if first[r as usize].is_some() {
                continue;
            }
            let ok = (2..=block_len).all(|j| res[base + j as usize - 1] == (r + j as u64) % modulus);
            if ok {
                first[r as usize] = Some(m);
                missing -= 1;
            }
        }
        lo = hi + 1;
    }
    Ok(first)
}

/// Per-modulus coverage of the residue classes by witnesses found in range.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageRow {
    pub modulus: u64,
    pub block_len: u32,
    pub witnesses: Vec<Option<u64>>,
}

impl CoverageRow {
    pub fn found(&self) -> usize {
        self.witnesses.iter().filter(|w| w.is_some()).count()
    }
}

pub fn block_coverage(c: ExponentC, moduli: &[u64], block_len: u32, search_limit: u64) -> Result<Vec<CoverageRow>> {
    moduli
        .iter()
        .map(|&r| {
            Ok(CoverageRow {
                modulus: r,
                block_len,
                witnesses: first_witnesses(c, r, block_len, search_limit)?,
            })
        })
        .collect()
}

/// Upper bound on `R^H` accepted by [`missing_block_scan`].
pub const MISSING_BLOCK_BUDGET: u64 = 1 << 24;

/// Length-`H` residue blocks that never occur as
/// `(⌊(m+1)^c⌋, …, ⌊(m+H)^c⌋) mod R` with `m+H <= n_to`.
///
/// Blocks are returned in lexicographic order. This is a finite-range
/// observation only.
pub fn missing_block_scan(c: ExponentC, modulus: u64, block_len: u32, n_to: u64) -> Result<Vec<Vec<u64>>> {
    if modulus == 0 || block_len == 0 {
        return Err(Error::Domain("modulus and block length must be positive".into()));
    }
    if n_to < block_len as u64 {
        return Err(Error::Domain(format!("n_to = {n_to} is below the block length {block_len}")));
    }
    let total = (modulus as u128).checked_pow(block_len).unwrap_or(u128::MAX);
    if total > MISSING_BLOCK_BUDGET as u128 {
        return Err(Error::EnumerationBudget(format!(
            "R^H = {modulus}^{block_len} exceeds {MISSING_BLOCK_BUDGET} blocks"
        )));
    }
    let total = total as usize;
    let res = residues_unchecked(c, modulus, 1, n_to);
    let mut seen = vec![false; total];
    for window in res.windows(block_len as usize) {
        let code = window.iter().fold(0usize, |acc, &v| acc * modulus as usize + v as usize);
        seen[code] = true;
    }
    let decode = |mut code: usize| {
        let mut block = vec![0u64; block_len as usize];
        for slot in block.iter_mut().rev() {
            *slot = (code % modulus as usize) as u64;
            code /= modulus as usize;
        }
        block
    };
    Ok(seen
        .iter()
        .enumerate()
        .filter(|(_, &s)| !s)
        .map(|(code, _)| decode(code))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_halves() -> ExponentC {
        ExponentC::new(3, 2).unwrap()
    }

    #[test]
    fn residue_sequence_examples() {
        let c = three_halves();
        assert_eq!(residue_sequence(c, 1, 1, 5).unwrap(), vec![0; 5]);
        assert_eq!(residue_sequence(c, 3, 1, 10).unwrap(), vec![1, 2, 2, 2, 2, 2, 0, 1, 0, 1]);
        assert_eq!(residue_sequence(c, 10, 1, 5).unwrap(), vec![1, 2, 5, 8, 1]);
        assert!(residue_sequence(c, 3, 0, 4).is_err());
        assert!(residue_sequence(c, 3, 5, 4).is_err());
    }

    #[test]
    fn residue_sequence_crosses_chunks() {
        let c = ExponentC::new(7, 3).unwrap();
        let n_to = 2 * CHUNK + 17;
        let seq = residue_sequence(c, 97, 1, n_to).unwrap();
        for n in [1, CHUNK, CHUNK + 1, 2 * CHUNK, n_to] {
            let f = floor_value_big(&BigUint::from(n), c);
            assert_eq!(seq[n as usize - 1], (f % 97u32).to_u64().unwrap());
        }
    }

    fn q(modulus: u64, h: u32, r: u64, limit: u64) -> BlockQuery {
        BlockQuery {
            c: three_halves(),
            modulus,
            block_len: h,
            residue: r,
            search_limit: limit,
        }
    }

    #[test]
    fn find_ap_block_examples() {
        let w = find_ap_block(&q(3, 2, 2, 100)).unwrap().unwrap();
        assert_eq!(w.m, 6);
        assert!(w.verified);
        assert_eq!(w.per_h, vec![(1, 0), (2, 1)]);
        let w = find_ap_block(&q(2, 1, 0, 10)).unwrap().unwrap();
        assert_eq!(w.m, 2);
        let w = find_ap_block(&q(1, 3, 0, 4)).unwrap().unwrap();
        assert_eq!(w.m, 1);
    }

    #[test]
    fn find_ap_block_is_minimal() {
        for modulus in 2..9u64 {
            for r in 0..modulus {
                let query = q(modulus, 2, r, 5000);
                let got = find_ap_block(&query).unwrap().map(|w| w.m);
                let brute = (1..=5000u64).find(|&m| verify_block(&query, m).verified);
                assert_eq!(got, brute, "R={modulus} r={r}");
            }
        }
    }

    #[test]
    fn not_found_is_not_an_error() {
        // ⌊n^{3/2}⌋ mod 2 never gives a block of length 40 in this tiny range
        assert_eq!(find_ap_block(&q(2, 40, 0, 50)).unwrap(), None);
        assert!(find_ap_block(&q(3, 2, 3, 100)).is_err());
        assert!(find_ap_block(&q(3, 4, 0, 4)).is_err());
    }

    #[test]
    fn first_witnesses_agree_with_find() {
        for modulus in [2u64, 5, 7, 12] {
            let firsts = first_witnesses(three_halves(), modulus, 2, 20_000).unwrap();
            for (r, m) in firsts.iter().enumerate() {
                let direct = find_ap_block(&q(modulus, 2, r as u64, 20_000)).unwrap().map(|w| w.m);
                assert_eq!(*m, direct);
            }
        }
    }

    #[test]
    fn missing_block_examples() {
        let c = three_halves();
        assert!(missing_block_scan(c, 1, 2, 100).unwrap().is_empty());
        assert!(missing_block_scan(c, 3, 1, 10).unwrap().is_empty());
        let missing = missing_block_scan(c, 3, 2, 10).unwrap();
        assert_eq!(missing, vec![vec![0, 0], vec![0, 2], vec![1, 1], vec![2, 1]]);
        assert!(missing_block_scan(c, 1000, 3, 100).is_err());
    }
}
