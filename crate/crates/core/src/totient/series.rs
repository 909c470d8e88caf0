//! `S_n = Σ_{m<=n} φ(⌊m^c⌋)/⌊m^c⌋` and its fractional parts.
//!
//! The exact `S_n` has a squarefree denominator, the product of all primes
//! dividing some `⌊m^c⌋` with `m <= n`, which reaches millions of bits by
//! `n = 10^5`. The series therefore keeps
//! * the exact terms,
//! * a certified fixed-point enclosure of every `{S_n}`, and
//! * the exact `S_{n_max}`, summed by binary splitting,
//!
//! and rebuilds any other exact `S_n` on demand.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::factor::factor_u64;
use crate::error::{Error, Result};
use crate::kernel::{floor_value_small, ExponentC};

const ONE_FIXED: u128 = 1 << 64;

/// `numer / denom`, exact but not necessarily in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSum {
    pub numer: BigUint,
    pub denom: BigUint,
}

impl ExactSum {
    pub fn integer_part(&self) -> BigUint {
        &self.numer / &self.denom
    }

    /// `{S} = (numer mod denom) / denom`, unreduced.
    pub fn frac_numer(&self) -> BigUint {
        &self.numer % &self.denom
    }

    /// Reduced value. Costs a gcd on the full-size numbers.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numer.clone()), BigInt::from(self.denom.clone()))
    }

    pub fn frac_f64(&self) -> f64 {
        let shift = 64usize;
        let scaled = (self.frac_numer() << shift) / &self.denom;
        scaled.to_f64().unwrap_or(f64::NAN) / ONE_FIXED as f64
    }

    /// Circle distance from `{S}` to `t = tn/td` compared with `eps = en/ed`:
    /// `true` iff `‖{S} - t‖ < eps`.
    pub fn frac_within(&self, t: &BigRational, eps: &BigRational) -> bool {
        let (tn, td) = (to_big(t.numer()), to_big(t.denom()));
        let (en, ed) = (to_big(eps.numer()), to_big(eps.denom()));
        let full = &self.denom * &td;
        // d = ({S} - t) mod 1, scaled by denom·td
        let a = self.frac_numer() * &td;
        let b = &tn * &self.denom;
        let d = if a >= b { a - b } else { &full - (b - a) % &full } % &full;
        // d/full < en/ed  or  d/full > 1 - en/ed
        let lhs = &d * &ed;
        let rhs = &en * &full;
        if rhs >= &full * &ed {
            return true;
        }
        lhs < rhs || lhs > &full * &ed - rhs
    }
}

fn to_big(x: &BigInt) -> BigUint {
    x.to_biguint().expect("nonnegative")
}

/// One leaf or subtree of the binary-splitting sum: `numer / Π primes`.
struct Node {
    primes: Vec<u64>,
    numer: BigUint,
}

fn product(xs: &[u64]) -> BigUint {
    match xs.len() {
        0 => BigUint::one(),
        1 => BigUint::from(xs[0]),
        len => {
            let (a, b) = xs.split_at(len / 2);
            product(a) * product(b)
        }
    }
}

fn leaf(primes: &[u64]) -> Node {
    let numer = primes.iter().fold(BigUint::one(), |acc, &p| acc * (p - 1));
    Node {
        primes: primes.to_vec(),
        numer,
    }
}

/// `(l only, r only, union)` of two sorted prime lists.
fn partition(l: &[u64], r: &[u64]) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let (mut only_l, mut only_r, mut union) = (Vec::new(), Vec::new(), Vec::with_capacity(l.len() + r.len()));
    let (mut i, mut j) = (0, 0);
    while i < l.len() || j < r.len() {
        if j == r.len() || (i < l.len() && l[i] < r[j]) {
            only_l.push(l[i]);
            union.push(l[i]);
            i += 1;
        } else if i == l.len() || r[j] < l[i] {
            only_r.push(r[j]);
            union.push(r[j]);
            j += 1;
        } else {
            union.push(l[i]);
            i += 1;
            j += 1;
        }
    }
    (only_l, only_r, union)
}

fn merge(l: Node, r: Node) -> Node {
    let (only_l, only_r, primes) = partition(&l.primes, &r.primes);
    Node {
        numer: l.numer * product(&only_r) + r.numer * product(&only_l),
        primes,
    }
}

fn sum_terms(terms: &[Vec<u64>]) -> Node {
    match terms.len() {
        0 => Node {
            primes: Vec::new(),
            numer: BigUint::zero(),
        },
        1 => leaf(&terms[0]),
        len => {
            let (a, b) = terms.split_at(len / 2);
            let (l, r) = rayon::join(|| sum_terms(a), || sum_terms(b));
            merge(l, r)
        }
    }
}

/// Exact sum of `Π_{p in P_m} (1 - 1/p)` over the given prime sets.
fn exact_sum(terms: &[Vec<u64>]) -> ExactSum {
    let node = sum_terms(terms);
    ExactSum {
        denom: product(&node.primes),
        numer: node.numer,
    }
}

#[derive(Clone, Debug)]
pub struct TotientSeries {
    c: ExponentC,
    floors: Vec<u64>,
    phis: Vec<u64>,
    primes: Vec<Vec<u64>>,
    /// `Σ_{m<=n} ⌊2^64 φ/f⌋ mod 2^64`, a lower end for `{S_n}·2^64`.
    frac_lo: Vec<u64>,
    /// Number of inexact fixed-point terms up to `n`; the enclosure is
    /// `[lo, lo + slack]` on the circle.
    slack: Vec<u64>,
    total: ExactSum,
}

/// Everything about `n`, computed from `m = n` alone.
fn term(n: u64, c: ExponentC) -> Result<(u64, Vec<u64>)> {
    let f = floor_value_small(n, c).ok_or_else(|| Error::FactorizationBudget {
        cofactor: crate::kernel::floor_value(n, c),
    })?;
    Ok((f, factor_u64(f).into_iter().map(|(p, _)| p).collect()))
}

pub fn partial_sums(c: ExponentC, n_max: u64) -> Result<TotientSeries> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let terms: Vec<(u64, Vec<u64>)> = (1..=n_max)
        .collect::<Vec<_>>()
        .par_chunks(4096)
        .map(|chunk| chunk.iter().map(|&n| term(n, c)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut floors = Vec::with_capacity(terms.len());
    let mut phis = Vec::with_capacity(terms.len());
    let mut primes = Vec::with_capacity(terms.len());
    let mut frac_lo = Vec::with_capacity(terms.len());
    let mut slack = Vec::with_capacity(terms.len());
    let (mut lo, mut inexact) = (0u64, 0u64);
    for (f, ps) in terms {
        let phi = ps.iter().fold(f, |acc, &p| acc / p * (p - 1));
        if phi < f {
            let scaled = ((phi as u128) << 64) / f as u128;
            if ((phi as u128) << 64) % f as u128 != 0 {
                inexact += 1;
            }
            lo = lo.wrapping_add(scaled as u64);
        }
        floors.push(f);
        phis.push(phi);
        primes.push(ps);
        frac_lo.push(lo);
        slack.push(inexact);
    }
    let total = exact_sum(&primes);
    let series = TotientSeries {
        c,
        floors,
        phis,
        primes,
        frac_lo,
        slack,
        total,
    };
    assert!(
        series.enclosure_contains(n_max, &series.total),
        "exact S_n left its fixed-point enclosure"
    );
    Ok(series)
}

impl TotientSeries {
    pub fn c(&self) -> ExponentC {
        self.c
    }

    pub fn n_max(&self) -> u64 {
        self.floors.len() as u64
    }

    fn idx(&self, n: u64) -> usize {
        assert!(n >= 1 && n <= self.n_max(), "n = {n} outside 1..={}", self.n_max());
        n as usize - 1
    }

    /// `(⌊n^c⌋, φ(⌊n^c⌋))`
    pub fn term(&self, n: u64) -> (u64, u64) {
        let i = self.idx(n);
        (self.floors[i], self.phis[i])
    }

    /// `S_n - S_{n-1}`
    pub fn increment(&self, n: u64) -> BigRational {
        let (f, phi) = self.term(n);
        BigRational::new(phi.into(), f.into())
    }

    /// Certified enclosure `[lo, hi]` of `{S_n}`; `hi` may exceed 1 when
    /// the enclosure wraps.
    pub fn frac_bounds(&self, n: u64) -> (BigRational, BigRational) {
        let i = self.idx(n);
        let den = BigInt::from(ONE_FIXED);
        let lo = BigInt::from(self.frac_lo[i]);
        let hi = &lo + self.slack[i];
        (BigRational::new(lo, den.clone()), BigRational::new(hi, den))
    }

    /// Midpoint estimate of `{S_n}`, good to `n·2^-64`.
    pub fn frac_f64(&self, n: u64) -> f64 {
        let i = self.idx(n);
        (self.frac_lo[i] as f64 + self.slack[i] as f64 / 2.0) / ONE_FIXED as f64 % 1.0
    }

    fn enclosure_contains(&self, n: u64, s: &ExactSum) -> bool {
        let i = self.idx(n);
        let one = BigUint::from(ONE_FIXED);
        let full = &one * &s.denom;
        let x = s.frac_numer() * &one;
        let lo = BigUint::from(self.frac_lo[i]) * &s.denom;
        let d = if x >= lo { x - lo } else { &full - (lo - x) % &full } % &full;
        d <= BigUint::from(self.slack[i]) * &s.denom
    }

    /// The exact `S_{n_max}`.
    pub fn total(&self) -> &ExactSum {
        &self.total
    }

    /// The exact `S_n`, rebuilt from the stored terms.
    pub fn exact_partial(&self, n: u64) -> ExactSum {
        let i = self.idx(n);
        if i + 1 == self.floors.len() {
            return self.total.clone();
        }
        exact_sum(&self.primes[..=i])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityWitness {
    pub n: u64,
    pub frac: f64,
    pub distance: f64,
    /// Membership was re-decided on the exact `S_n`.
    pub verified: bool,
}

/// Smallest `n <= n_max` with `‖{S_n} - t‖ < eps`. `None` only speaks for
/// the computed range.
pub fn density_probe(series: &TotientSeries, t: &BigRational, eps: &BigRational) -> Result<Option<DensityWitness>> {
    let zero = BigRational::zero();
    if *t < zero || *t >= BigRational::one() {
        return Err(Error::Domain("target must lie in [0, 1)".into()));
    }
    if *eps <= zero {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let (tf, ef) = (t.to_f64().unwrap_or(f64::NAN), eps.to_f64().unwrap_or(f64::NAN));
    for n in 1..=series.n_max() {
        let x = series.frac_f64(n);
        let d = (x - tf).rem_euclid(1.0);
        let dist = d.min(1.0 - d);
        // enclosure half-width plus f64 rounding of the screen
        let margin = series.slack[n as usize - 1] as f64 / ONE_FIXED as f64 + 1e-12;
        if dist >= ef + margin {
            continue;
        }
        let exact = series.exact_partial(n);
        if exact.frac_within(t, eps) {
            let frac = exact.frac_f64();
            let d = (frac - tf).rem_euclid(1.0);
            return Ok(Some(DensityWitness {
                n,
                frac,
                distance: d.min(1.0 - d),
                verified: true,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn c32() -> ExponentC {
        ExponentC::new(3, 2).unwrap()
    }

    #[test]
    fn first_partial_sums() {
        let s = partial_sums(c32(), 3).unwrap();
        assert_eq!(s.exact_partial(1).to_rational(), q(1, 1));
        assert_eq!(s.exact_partial(2).to_rational(), q(3, 2));
        assert_eq!(s.exact_partial(3).to_rational(), q(23, 10));
        assert_eq!(s.term(3), (5, 4));
        let (lo, hi) = s.frac_bounds(3);
        assert!(lo <= q(3, 10) && q(3, 10) <= hi);
        assert!(partial_sums(c32(), 0).is_err());
    }

    #[test]
    fn exact_sum_matches_rational_fold() {
        let s = partial_sums(ExponentC::new(7, 3).unwrap(), 400).unwrap();
        let mut acc = q(0, 1);
        for n in 1..=400 {
            acc += s.increment(n);
            if n % 37 == 0 || n == 400 {
                assert_eq!(s.exact_partial(n).to_rational(), acc, "n = {n}");
                let frac = crate::kernel::identities::fract(&acc);
                let (lo, hi) = s.frac_bounds(n);
                assert!(lo <= frac && frac <= hi);
            }
        }
    }

    #[test]
    fn density_examples() {
        let s = partial_sums(c32(), 3).unwrap();
        let w = density_probe(&s, &q(0, 1), &q(1, 1000)).unwrap().unwrap();
        assert_eq!(w.n, 1);
        let w = density_probe(&s, &q(3, 10), &q(1, 100)).unwrap().unwrap();
        assert_eq!(w.n, 3);
        assert!(w.verified);
        assert_eq!(density_probe(&s, &q(99, 100), &q(1, 1_000_000_000)).unwrap().map(|w| w.n), None);
        assert!(density_probe(&s, &q(1, 1), &q(1, 10)).is_err());
    }

    #[test]
    fn frac_within_wraps_around_zero() {
        // {S} = 0.98, t = 0.01: circle distance 0.03
        let s = ExactSum {
            numer: BigUint::from(298u32),
            denom: BigUint::from(100u32),
        };
        assert!(s.frac_within(&q(1, 100), &q(4, 100)));
        assert!(!s.frac_within(&q(1, 100), &q(3, 100)));
        assert!(s.frac_within(&q(95, 100), &q(4, 100)));
    }
}
