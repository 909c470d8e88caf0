//! Exact discrepancy by the critical-grid argument.
//!
//! With `G = 2^48`, `W` a box volume in grid units and `n` the number of
//! points inside, a box contributes `(n·G^s - N·W) / (N·G^s)` from above
//! and the negation from below. The supremum over half-open boxes is
//! attained or approached by
//! * closed boxes with every face on a point coordinate (excess), and
//! * boxes whose lower faces are `0` (closed) or a coordinate (open) and
//!   whose upper faces are a coordinate (open) or `1` (deficit).

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{PointSet, GRID, GRID_BITS};
use crate::error::{Error, Result};

/// Largest `N` handled exactly in each dimension `1..=3`.
pub const EXACT_BUDGET: [usize; 3] = [512, 512, 64];

trait Acc: Clone + Ord + Zero + From<u64> + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {}
impl<T: Clone + Ord + Zero + From<u64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T>> Acc for T {}

struct Ctx<T> {
    n: T,
    unit: T,
    last: usize,
}

fn distinct(pts: &[&[u64]], d: usize) -> Vec<u64> {
    let mut v: Vec<u64> = pts.iter().map(|p| p[d]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// `pts` sorted by the last coordinate; `vol` is `N` times the product of
/// the widths chosen so far.
fn excess<T: Acc>(pts: &[&[u64]], d: usize, vol: T, ctx: &Ctx<T>) -> T {
    if d == ctx.last {
        let mut best = T::zero();
        let mut pref: Option<T> = None;
        for (j, p) in pts.iter().enumerate() {
            let x = T::from(p[d]);
            let b = vol.clone() * x.clone() - ctx.unit.clone() * T::from(j as u64);
            pref = Some(match pref {
                Some(q) if q >= b => q,
                _ => b,
            });
            let a = ctx.unit.clone() * T::from(j as u64 + 1) - vol.clone() * x;
            let cand = a + pref.clone().expect("set above");
            if cand > best {
                best = cand;
            }
        }
        return best;
    }
    let vals = distinct(pts, d);
    let mut best = T::zero();
    for (i, &lo) in vals.iter().enumerate() {
        for &hi in &vals[i..] {
            let sub: Vec<&[u64]> = pts.iter().copied().filter(|p| lo <= p[d] && p[d] <= hi).collect();
            let cand = excess(&sub, d + 1, vol.clone() * T::from(hi - lo), ctx);
            if cand > best {
                best = cand;
            }
        }
    }
    best
}

fn deficit<T: Acc>(pts: &[&[u64]], d: usize, vol: T, ctx: &Ctx<T>) -> T {
    if d == ctx.last {
        let mut best = T::zero();
        // a = 0, closed: nothing at or below it is excluded
        let mut run_min = T::zero();
        let mut j = 0usize;
        while j < pts.len() {
            let v = pts[j][d];
            let first = j;
            while j < pts.len() && pts[j][d] == v {
                j += 1;
            }
            let x = T::from(v);
            if v > 0 {
                let cand = vol.clone() * x.clone() - ctx.unit.clone() * T::from(first as u64) - run_min.clone();
                if cand > best {
                    best = cand;
                }
            }
            let a = vol.clone() * x - ctx.unit.clone() * T::from(j as u64);
            if a < run_min {
                run_min = a;
            }
        }
        let cand = vol * T::from(GRID) - ctx.unit.clone() * T::from(pts.len() as u64) - run_min;
        return if cand > best { cand } else { best };
    }
    let vals = distinct(pts, d);
    let lowers = std::iter::once((0u64, true)).chain(vals.iter().map(|&v| (v, false)));
    let uppers: Vec<u64> = vals.iter().copied().chain(std::iter::once(GRID)).collect();
    let mut best = T::zero();
    for (a, closed) in lowers {
        for &b in uppers.iter().filter(|&&b| b > a) {
            let sub: Vec<&[u64]> = pts
                .iter()
                .copied()
                .filter(|p| (if closed { p[d] >= a } else { p[d] > a }) && p[d] < b)
                .collect();
            let cand = deficit(&sub, d + 1, vol.clone() * T::from(b - a), ctx);
            if cand > best {
                best = cand;
            }
        }
    }
    best
}

fn scaled_sup<T: Acc>(x: &PointSet) -> (T, T) {
    let s = x.dim();
    let n = T::from(x.len() as u64);
    let mut unit = T::from(1u64);
    for _ in 0..s {
        unit = unit * T::from(GRID);
    }
    let mut pts: Vec<&[u64]> = x.points().iter().map(Vec::as_slice).collect();
    pts.sort_by_key(|p| p[s - 1]);
    let ctx = Ctx {
        n: n.clone(),
        unit: unit.clone(),
        last: s - 1,
    };
    let e = excess(&pts, 0, n.clone(), &ctx);
    let d = deficit(&pts, 0, n, &ctx);
    let best = if e > d { e } else { d };
    (best, ctx.n * unit)
}

/// `D_N(X)` as an exact rational.
pub fn exact_discrepancy(x: &PointSet) -> Result<BigRational> {
    let (s, n) = (x.dim(), x.len());
    if s > EXACT_BUDGET.len() || n > EXACT_BUDGET[s - 1] {
        return Err(Error::ExactModeBudget { dim: s, len: n });
    }
    // n·G^s must fit comfortably in an i128
    if s <= 2 {
        let (num, den) = scaled_sup::<i128>(x);
        Ok(BigRational::new(num.into(), den.into()))
    } else {
        let (num, den) = scaled_sup::<BigInt>(x);
        Ok(BigRational::new(num, den))
    }
}

/// Exhaustive reference: every box whose faces lie on `{0, 1}` or a point
/// coordinate, with each face open or closed, counted directly.
pub fn brute_force_discrepancy(x: &PointSet) -> BigRational {
    let s = x.dim();
    let n = x.len();
    let faces: Vec<Vec<u64>> = (0..s)
        .map(|d| {
            let mut v: Vec<u64> = x.points().iter().map(|p| p[d]).chain([0, GRID]).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    // per dimension: (lo, lo_closed, hi, hi_closed)
    let sides: Vec<Vec<(u64, bool, u64, bool)>> = faces
        .iter()
        .map(|f| {
            let mut out = Vec::new();
            for &lo in f {
                for &hi in f.iter().filter(|&&h| h >= lo) {
                    for lc in [false, true] {
                        for hc in [false, true] {
                            if lo < hi || (lc && hc) {
                                out.push((lo, lc, hi, hc));
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    // |count·G^s - N·vol·G^s|, maximised, then divided by N·G^s
    let wide = s <= 2;
    let mut best_small = 0i128;
    let mut best_big = BigInt::zero();
    let mut idx = vec![0usize; s];
    loop {
        let count = x
            .points()
            .iter()
            .filter(|p| {
                (0..s).all(|d| {
                    let (lo, lc, hi, hc) = sides[d][idx[d]];
                    let v = p[d];
                    (if lc { v >= lo } else { v > lo }) && (if hc { v <= hi } else { v < hi })
                })
            })
            .count();
        if wide {
            let vol: i128 = (0..s).map(|d| (sides[d][idx[d]].2 - sides[d][idx[d]].0) as i128).product();
            let full = (GRID as i128).pow(s as u32);
            best_small = best_small.max((count as i128 * full - n as i128 * vol).abs());
        } else {
            let vol: BigInt = (0..s).map(|d| BigInt::from(sides[d][idx[d]].2 - sides[d][idx[d]].0)).product();
            let full = num_traits::pow(BigInt::from(GRID), s);
            let dev = (BigInt::from(count) * full - BigInt::from(n) * vol).abs();
            if dev > best_big {
                best_big = dev;
            }
        }
        let mut d = 0;
        loop {
            if d == s {
                let num = if wide { BigInt::from(best_small) } else { best_big };
                return BigRational::new(num, BigInt::from(n) * num_traits::pow(BigInt::from(GRID), s));
            }
            idx[d] += 1;
            if idx[d] < sides[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Exact when within budget; otherwise refuse unless the sampling
/// estimator is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscrepancyMode {
    Exact,
    /// Exact within budget, else a lower bound from `samples` random
    /// critical boxes plus all anchored boxes, seeded by `seed`.
    ExactOrEstimate { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub dim: usize,
    pub len: usize,
    /// `"exact"` or `"lower_bound"`.
    pub mode: &'static str,
    #[serde(serialize_with = "crate::report::rational")]
    pub value: BigRational,
    pub value_f64: f64,
}

pub fn discrepancy(x: &PointSet, mode: DiscrepancyMode) -> Result<DiscrepancyReport> {
    let (value, mode_name) = match (exact_discrepancy(x), mode) {
        (Ok(v), _) => (v, "exact"),
        (Err(e), DiscrepancyMode::Exact) => return Err(e),
        (Err(_), DiscrepancyMode::ExactOrEstimate { samples, seed }) => (estimate(x, samples, seed), "lower_bound"),
    };
    Ok(DiscrepancyReport {
        dim: x.dim(),
        len: x.len(),
        mode: mode_name,
        value_f64: value.to_f64().unwrap_or(f64::NAN),
        value,
    })
}

/// Signed scaled discrepancy of one box, `n·G^s - N·W`, in `f64`-free
/// exact arithmetic.
fn box_value(x: &PointSet, lo: &[(u64, bool)], hi: &[u64]) -> BigInt {
    let s = x.dim();
    let count = x
        .points()
        .iter()
        .filter(|p| (0..s).all(|d| (if lo[d].1 { p[d] >= lo[d].0 } else { p[d] > lo[d].0 }) && p[d] < hi[d]))
        .count();
    let mut vol = BigInt::from(x.len());
    for d in 0..s {
        vol *= BigInt::from(hi[d].saturating_sub(lo[d].0));
    }
    BigInt::from(count) * (BigInt::from(1u8) << (GRID_BITS as usize * s)) - vol
}

fn estimate(x: &PointSet, samples: u64, seed: u64) -> BigRational {
    let s = x.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = BigInt::zero();
    let mut consider = |v: BigInt| {
        let v = if v < BigInt::zero() { -v } else { v };
        if v > best {
            best = v;
        }
    };
    // anchored boxes [0, p) and [0, p]
    for p in x.points() {
        let lo = vec![(0u64, true); s];
        consider(box_value(x, &lo, p));
        let closed: Vec<u64> = p.iter().map(|&v| v + 1).collect();
        consider(box_value(x, &lo, &closed));
    }
    for _ in 0..samples {
        let mut lo = Vec::with_capacity(s);
        let mut hi = Vec::with_capacity(s);
        for d in 0..s {
            let a = x.points()[rng.gen_range(0..x.len())][d];
            let b = x.points()[rng.gen_range(0..x.len())][d];
            let (a, b) = (a.min(b), a.max(b));
            if rng.gen_bool(0.5) {
                // closed [a, b]
                lo.push((a, true));
                hi.push(b + 1);
            } else {
                lo.push((if rng.gen_bool(0.5) { a } else { 0 }, false));
                hi.push(if rng.gen_bool(0.5) { b } else { GRID });
            }
        }
        consider(box_value(x, &lo, &hi));
    }
    let den = BigInt::from(x.len()) * (BigInt::from(1u8) << (GRID_BITS as usize * s));
    BigRational::new(best, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(points: &[Vec<f64>]) -> PointSet {
        PointSet::from_f64(points).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_examples() {
        assert_eq!(exact_discrepancy(&set(&[vec![0.5]])).unwrap(), q(1, 1));
        let even = set(&[vec![0.0], vec![0.25], vec![0.5], vec![0.75]]);
        assert_eq!(exact_discrepancy(&even).unwrap(), q(1, 4));
        assert_eq!(exact_discrepancy(&set(&[vec![0.5, 0.5]])).unwrap(), q(1, 1));
        assert_eq!(brute_force_discrepancy(&even), q(1, 4));
    }

    #[test]
    fn three_dimensions_agree_with_brute_force() {
        let x = set(&[vec![0.1, 0.7, 0.3], vec![0.6, 0.2, 0.9], vec![0.4, 0.4, 0.5]]);
        assert_eq!(exact_discrepancy(&x).unwrap(), brute_force_discrepancy(&x));
    }

    #[test]
    fn budget_and_estimator() {
        let pts: Vec<Vec<f64>> = (0..600).map(|i| vec![(i as f64 * 0.618034) % 1.0]).collect();
        let x = set(&pts);
        assert!(matches!(exact_discrepancy(&x), Err(Error::ExactModeBudget { .. })));
        let rep = discrepancy(&x, DiscrepancyMode::ExactOrEstimate { samples: 2000, seed: 7 }).unwrap();
        assert_eq!(rep.mode, "lower_bound");
        assert!(rep.value_f64 > 0.0 && rep.value_f64 <= 1.0);
        let small = set(&pts[..100]);
        let lb = estimate(&small, 2000, 7);
        assert!(lb <= exact_discrepancy(&small).unwrap());
    }

    fn grid_set(dim: usize, max_len: usize, coarse: u64) -> impl Strategy<Value = PointSet> {
        // coarse grids force repeated coordinates
        prop::collection::vec(prop::collection::vec(0..coarse, dim), 1..=max_len).prop_map(move |pts| {
            let pts = pts.into_iter().map(|p| p.into_iter().map(|v| v * (GRID / coarse)).collect()).collect();
            PointSet::from_grid(dim, pts).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn one_dim_matches_brute_force(x in grid_set(1, 24, 16)) {
            prop_assert_eq!(exact_discrepancy(&x).unwrap(), brute_force_discrepancy(&x));
        }

        #[test]
        fn two_dim_matches_brute_force(x in grid_set(2, 7, 8)) {
            prop_assert_eq!(exact_discrepancy(&x).unwrap(), brute_force_discrepancy(&x));
        }

        #[test]
        fn discrepancy_is_at_least_one_over_n(x in grid_set(2, 20, 1 << 20)) {
            let d = exact_discrepancy(&x).unwrap();
            prop_assert!(d >= q(1, x.len() as i64) && d <= q(1, 1));
        }
    }
}
