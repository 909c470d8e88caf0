//! Sufficient conditions on the fractional parts of `γ_c(ℓ) m^{c-ℓ} / R`
//! forcing `⌊(m+h)^c⌋ ≡ r + h (mod R)` for `h = 1..=H`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{floor_value_big, floor_value_small, gamma_any, pow_enclosure, ExponentC, Interval, Location, Precision, Window};

/// Outcome of one window condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub holds: bool,
    pub status: Location,
    pub bits: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct FracgameReport {
    pub m: u64,
    pub c: ExponentC,
    pub modulus: u64,
    pub block_len: u32,
    pub residue: u64,
    pub cond_i: bool,
    pub cond_ii: Condition,
    pub cond_iii: Condition,
    /// Keyed by `ℓ` in `2..=⌊c⌋`.
    pub cond_iv: BTreeMap<u32, Condition>,
    pub all_conditions: bool,
    pub conclusion_holds: bool,
    /// Some window decision landed exactly on an endpoint.
    pub boundary_hit: bool,
}

/// `γ_c(ℓ) m^{c-ℓ}` split as `floor + frac` with the fractional part
/// enclosed.
#[derive(Clone, Debug)]
struct Split {
    floor: BigInt,
    frac: Interval,
    bits: u32,
}

fn split(m: &BigUint, c: ExponentC, gamma: &BigRational, ell: u32, first: u32, prec: Precision) -> Result<Split> {
    let mut step = |bits: u32| {
        let e = pow_enclosure(m, c.shifted(ell), bits).scale(gamma);
        let frac = e.fract()?;
        Some(Split {
            floor: e.floor_bounds().0,
            frac,
            bits,
        })
    };
    prec.refine_from(first, &mut step)
}

/// Per-`m` state shared by every `(R, H, r)` examined at that `m`.
#[derive(Clone, Debug)]
pub struct FracgameContext {
    m: u64,
    m_big: BigUint,
    c: ExponentC,
    prec: Precision,
    gamma: Vec<BigRational>,
    splits: Vec<Split>,
    /// `⌊(m+h)^c⌋` for `h = 1..=h_max`.
    floors: Vec<BigUint>,
    cond_i: Vec<bool>,
}

impl FracgameContext {
    pub fn new(m: u64, c: ExponentC, h_max: u32, prec: Precision) -> Result<Self> {
        if m == 0 || h_max == 0 {
            return Err(Error::Domain("m and H must be positive".into()));
        }
        let m_big = BigUint::from(m);
        let gamma: Vec<BigRational> = (0..=c.floor()).map(|ell| gamma_any(c, ell)).collect();
        let splits = gamma
            .iter()
            .enumerate()
            .map(|(ell, g)| split(&m_big, c, g, ell as u32, prec.start_bits, prec))
            .collect::<Result<Vec<_>>>()?;
        let floors = (1..=h_max as u64)
            .map(|h| match floor_value_small(m + h, c) {
                Some(f) => BigUint::from(f),
                None => floor_value_big(&BigUint::from(m + h), c),
            })
            .collect();
        let cond_i = (1..=h_max).map(|h| cond_i_exact(&m_big, c, h)).collect();
        Ok(FracgameContext {
            m,
            m_big,
            c,
            prec,
            gamma,
            splits,
            floors,
            cond_i,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn h_max(&self) -> u32 {
        self.floors.len() as u32
    }

    pub fn cond_i(&self, block_len: u32) -> bool {
        self.cond_i[block_len as usize - 1]
    }

    /// `⌊m^c⌋ mod R`: the only `r` for which condition (ii) can hold.
    pub fn forced_residue(&self, modulus: u64) -> u64 {
        let r = BigInt::from(modulus);
        let f = &self.splits[0].floor % &r;
        f.to_u64().expect("reduced residue")
    }

    pub fn conclusion(&self, modulus: u64, block_len: u32, residue: u64) -> bool {
        let rm = BigUint::from(modulus);
        (1..=block_len).all(|h| {
            let want = BigUint::from((residue as u128 + h as u128) % modulus as u128);
            &self.floors[h as usize - 1] % &rm == want
        })
    }

    /// Decides `{γ_ℓ m^{c-ℓ} / R} ∈ [a, b)` by way of
    /// `{V/R} = ((⌊V⌋ mod R) + {V}) / R`.
    fn decide(&self, ell: u32, modulus: u64, w: &Window) -> Result<Condition> {
        let base = &self.splits[ell as usize];
        let rm = BigInt::from(modulus);
        let inv_r = BigRational::new(1.into(), rm.clone());
        let shift = Interval::integer(&base.floor % &rm);
        let locate = |s: &Split| shift.add(&s.frac).scale(&inv_r).locate(w);
        let status = locate(base);
        if status.is_decided() {
            return Ok(self.condition(status, base.bits));
        }
        let mut step = |bits: u32| {
            let s = split(&self.m_big, self.c, &self.gamma[ell as usize], ell, bits, self.prec).ok()?;
            let status = locate(&s);
            status.is_decided().then_some((status, s.bits))
        };
        let (status, bits) = self.prec.refine_from(base.bits * 2, &mut step)?;
        Ok(self.condition(status, bits))
    }

    fn condition(&self, status: Location, bits: u32) -> Condition {
        Condition {
            holds: status.holds(),
            status,
            bits,
        }
    }

    fn window_ii(modulus: u64, residue: u64) -> Window {
        let a = BigRational::new(residue.into(), modulus.into());
        let b = &a + BigRational::new(1.into(), (4 * modulus).into());
        Window::new(a, b)
    }

    fn window_iii(modulus: u64, block_len: u32) -> Window {
        let a = BigRational::new(1.into(), modulus.into());
        let b = &a + BigRational::new(1.into(), BigInt::from(4 * modulus) * block_len);
        Window::new(a, b)
    }

    fn window_iv(&self, modulus: u64, block_len: u32, ell: u32) -> Window {
        // 1/(4cRH^ℓ) = d / (4nRH^ℓ)
        let den = BigInt::from(4u64 * self.c.num() as u64 * modulus) * Pow::pow(BigInt::from(block_len), ell);
        Window::new(BigRational::from_integer(0.into()), BigRational::new(self.c.den().into(), den))
    }

    fn check_args(&self, modulus: u64, block_len: u32, residue: u64) -> Result<()> {
        if modulus == 0 || residue >= modulus {
            return Err(Error::Domain(format!("residue {residue} is not reduced modulo {modulus}")));
        }
        if block_len == 0 || block_len > self.h_max() {
            return Err(Error::Domain(format!(
                "block length {block_len} outside 1..={}",
                self.h_max()
            )));
        }
        Ok(())
    }

    /// Every condition decided, without short-circuiting.
    pub fn check(&self, modulus: u64, block_len: u32, residue: u64) -> Result<FracgameReport> {
        self.check_args(modulus, block_len, residue)?;
        let cond_i = self.cond_i(block_len);
        let cond_ii = self.decide(0, modulus, &Self::window_ii(modulus, residue))?;
        let cond_iii = self.decide(1, modulus, &Self::window_iii(modulus, block_len))?;
        let mut cond_iv = BTreeMap::new();
        for ell in 2..=self.c.floor() {
            let w = self.window_iv(modulus, block_len, ell);
            cond_iv.insert(ell, self.decide(ell, modulus, &w)?);
        }
        let conds = || [cond_ii, cond_iii].into_iter().chain(cond_iv.values().copied());
        let all_conditions = cond_i && conds().all(|c| c.holds);
        let boundary_hit = conds().any(|c| c.status.is_endpoint());
        Ok(FracgameReport {
            m: self.m,
            c: self.c,
            modulus,
            block_len,
            residue,
            cond_i,
            cond_ii,
            cond_iii,
            cond_iv,
            all_conditions,
            conclusion_holds: self.conclusion(modulus, block_len, residue),
            boundary_hit,
        })
    }

    /// Same decision as `check(..).all_conditions`, stopping at the first
    /// failed condition. The flag reports an endpoint hit among the
    /// conditions evaluated.
    pub fn all_hold(&self, modulus: u64, block_len: u32, residue: u64) -> Result<(bool, bool)> {
        self.check_args(modulus, block_len, residue)?;
        if !self.cond_i(block_len) {
            return Ok((false, false));
        }
        let mut boundary = false;
        let mut windows = vec![(0, Self::window_ii(modulus, residue)), (1, Self::window_iii(modulus, block_len))];
        windows.extend((2..=self.c.floor()).map(|ell| (ell, self.window_iv(modulus, block_len, ell))));
        for (ell, w) in windows {
            let cond = self.decide(ell, modulus, &w)?;
            boundary |= cond.status.is_endpoint();
            if !cond.holds {
                return Ok((false, boundary));
            }
        }
        Ok((true, boundary))
    }
}

/// `m^{1-{c}} > 4(cH)^{c+1}`, compared after raising both sides to the
/// `d`-th power: `m^{d-f} d^{n+d} > 4^d (nH)^{n+d}` with `c = n/d`,
/// `f = n mod d`.
fn cond_i_exact(m: &BigUint, c: ExponentC, block_len: u32) -> bool {
    let (n, d) = (c.num(), c.den());
    let f = n % d;
    let lhs = Pow::pow(m, d - f) * Pow::pow(BigUint::from(d), n + d);
    let rhs = Pow::pow(BigUint::from(4u32), d) * Pow::pow(BigUint::from(n as u64 * block_len as u64), n + d);
    lhs > rhs
}

pub fn check_fracgame(
    m: u64,
    c: ExponentC,
    modulus: u64,
    block_len: u32,
    residue: u64,
    prec: Precision,
) -> Result<FracgameReport> {
    FracgameContext::new(m, c, block_len.max(1), prec)?.check(modulus, block_len, residue)
}

/// Aggregate of an exhaustive scan over `(m, R, H, r)`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FracgameScan {
    /// All `(m, R, H, r)` tuples covered, including those settled without
    /// evaluating any window.
    pub instances: u64,
    /// Tuples with condition (i) true.
    pub cond_i_true: u64,
    /// Tuples with (i) true whose `r` differs from `⌊m^c⌋ mod R`, so (ii)
    /// is false by the congruence identity.
    pub excluded_by_congruence: u64,
    /// Tuples whose windows were evaluated.
    pub evaluated: u64,
    pub all_true: u64,
    pub boundary_hits: u64,
    pub counterexamples: Vec<FracgameReport>,
}

impl FracgameScan {
    fn merge(mut self, other: FracgameScan) -> FracgameScan {
        self.instances += other.instances;
        self.cond_i_true += other.cond_i_true;
        self.excluded_by_congruence += other.excluded_by_congruence;
        self.evaluated += other.evaluated;
        self.all_true += other.all_true;
        self.boundary_hits += other.boundary_hits;
        self.counterexamples.extend(other.counterexamples);
        self
    }
}

const SCAN_CHUNK: u64 = 512;

/// Scans every `m`, `R`, `H` in the given ranges and every `r < R`.
///
/// For fixed `(m, R)` condition (ii) pins `r` to `⌊m^c⌋ mod R`, so only that
/// residue has its windows evaluated.
pub fn fracgame_scan(
    c: ExponentC,
    moduli: RangeInclusive<u64>,
    block_lens: RangeInclusive<u32>,
    m_range: RangeInclusive<u64>,
    prec: Precision,
) -> Result<FracgameScan> {
    let (m_lo, m_hi) = (*m_range.start(), *m_range.end());
    if m_lo == 0 || m_lo > m_hi || *moduli.start() == 0 || *block_lens.start() == 0 {
        return Err(Error::Domain("scan ranges must be non-empty and positive".into()));
    }
    let h_max = *block_lens.end();
    let chunks = (m_hi - m_lo) / SCAN_CHUNK + 1;
    let parts = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let lo = m_lo + i * SCAN_CHUNK;
            let hi = (lo + SCAN_CHUNK - 1).min(m_hi);
            let mut acc = FracgameScan::default();
            for m in lo..=hi {
                let ctx = FracgameContext::new(m, c, h_max, prec)?;
                for modulus in moduli.clone() {
                    let r = ctx.forced_residue(modulus);
                    for h in block_lens.clone() {
                        acc.instances += modulus;
                        if !ctx.cond_i(h) {
                            continue;
                        }
                        acc.cond_i_true += modulus;
                        acc.excluded_by_congruence += modulus - 1;
                        acc.evaluated += 1;
                        let (all, boundary) = ctx.all_hold(modulus, h, r)?;
                        acc.boundary_hits += boundary as u64;
                        if all {
                            acc.all_true += 1;
                            if !ctx.conclusion(modulus, h, r) {
                                acc.counterexamples.push(ctx.check(modulus, h, r)?);
                            }
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(FracgameScan::default(), FracgameScan::merge))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c32() -> ExponentC {
        ExponentC::new(3, 2).unwrap()
    }

    #[test]
    fn spec_style_examples() {
        let rep = check_fracgame(6, c32(), 3, 2, 2, Precision::default()).unwrap();
        assert!(!rep.cond_ii.holds);
        assert_eq!(rep.cond_ii.status, Location::Outside);
        assert!(rep.conclusion_holds);
        assert!(!rep.all_conditions);
        let rep = check_fracgame(1, c32(), 3, 2, 0, Precision::default()).unwrap();
        assert!(!rep.cond_i);
    }

    #[test]
    fn cond_i_thresholds() {
        // 4 (3H/2)^{5/2} < m^{1/2}  <=>  m > 16 (3H/2)^5
        let c = c32();
        for (h, threshold) in [(1u32, 121.5f64), (2, 3888.0), (3, 29524.5)] {
            let below = threshold.floor() as u64;
            let above = below + 1;
            assert!(!cond_i_exact(&BigUint::from(below), c, h), "H={h}");
            assert!(cond_i_exact(&BigUint::from(above), c, h), "H={h}");
        }
    }

    #[test]
    fn perfect_powers_hit_the_lower_endpoint() {
        // m = 4: m^{3/2} = 8, so {8/R} = (8 mod R)/R is exactly the window's
        // closed end for r = 8 mod R.
        let rep = check_fracgame(4, c32(), 5, 1, 3, Precision::default()).unwrap();
        assert_eq!(rep.cond_ii.status, Location::AtLower);
        assert!(rep.cond_ii.holds);
        assert!(rep.boundary_hit);
    }

    #[test]
    fn all_hold_matches_full_check() {
        let c = ExponentC::new(7, 3).unwrap();
        for m in [200u64, 4097, 9001] {
            let ctx = FracgameContext::new(m, c, 2, Precision::default()).unwrap();
            for modulus in 1..12u64 {
                for r in 0..modulus {
                    for h in 1..=2 {
                        let full = ctx.check(modulus, h, r).unwrap();
                        let (all, _) = ctx.all_hold(modulus, h, r).unwrap();
                        assert_eq!(all, full.all_conditions);
                        if r != ctx.forced_residue(modulus) {
                            assert!(!full.cond_ii.holds);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn small_scan_has_no_counterexamples() {
        let scan = fracgame_scan(c32(), 2..=12, 1..=2, 100..=6000, Precision::default()).unwrap();
        assert!(scan.counterexamples.is_empty());
        assert!(scan.all_true > 0);
        assert_eq!(scan.evaluated + scan.excluded_by_congruence, scan.cond_i_true);
    }
}
