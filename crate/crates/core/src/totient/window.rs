//! Residue windows that pin `φ(⌊(m+h)^c⌋)/⌊(m+h)^c⌋` near `2/H..3/H`.
//!
//! Families `𝒫_1..𝒫_H` of primes above `H` are chosen greedily so that
//! `(φ(h)/h)(φ(P_h)/P_h)` lands in `[2/H, 3/H]`; with `L` the next prime,
//! `R = H! ∏_{H<p<=L} p`, and `r` solving `r ≡ -h (mod P_h)`,
//! `r ≡ 0 (mod R/∏P_h)`, any `m` whose block of residues is
//! `r+1, …, r+H` has `gcd(⌊(m+h)^c⌋, R) = hP_h`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::factor::{euler_phi_u64, factorize, is_prime_u64, primes_up_to};
use crate::error::{Error, Result};
use crate::kernel::{floor_value_big, ExponentC};
use crate::report::{big_str, rational};

/// Smallest `H` for which every `φ(h)/h` with `h <= H` exceeds `3/H`.
pub const MIN_BLOCK_LEN: u32 = 21;

pub const DEFAULT_PRIME_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FamilyOptions {
    /// Permit `H < 21`, where the window may be unreachable.
    pub allow_small_h: bool,
    /// Largest prime the greedy search may consume.
    pub prime_limit: u64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            allow_small_h: false,
            prime_limit: DEFAULT_PRIME_LIMIT,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Family {
    pub h: u32,
    pub primes: Vec<u64>,
    #[serde(serialize_with = "big_str")]
    pub product: BigUint,
    /// `(φ(h)/h)(φ(P_h)/P_h)`
    #[serde(serialize_with = "rational")]
    pub ratio: BigRational,
}

/// The three family properties, evaluated as predicates.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyChecks {
    pub disjoint: bool,
    pub above_h: bool,
    /// Per `h`: `2/H <= ratio <= 3/H`.
    pub window: Vec<bool>,
}

impl FamilyChecks {
    pub fn all_hold(&self) -> bool {
        self.disjoint && self.above_h && self.window.iter().all(|&w| w)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeFamilies {
    pub block_len: u32,
    pub families: Vec<Family>,
    pub checks: FamilyChecks,
}

fn phi_ratio_u64(h: u64) -> BigRational {
    BigRational::new(euler_phi_u64(h).into(), h.into())
}

fn family_ratio(h: u32, primes: &[u64]) -> BigRational {
    let (num, den) = primes.iter().fold((BigInt::one(), BigInt::one()), |(n, d), &p| (n * (p - 1), d * p));
    phi_ratio_u64(h as u64) * BigRational::new(num, den)
}

pub fn check_families(block_len: u32, families: &[Family]) -> FamilyChecks {
    let mut seen = BTreeSet::new();
    let disjoint = families.iter().flat_map(|f| &f.primes).all(|&p| seen.insert(p));
    let above_h = families.iter().flat_map(|f| &f.primes).all(|&p| p > block_len as u64);
    let lo = BigRational::new(2.into(), block_len.into());
    let hi = BigRational::new(3.into(), block_len.into());
    let window = families
        .iter()
        .map(|f| {
            let r = family_ratio(f.h, &f.primes);
            lo <= r && r <= hi
        })
        .collect();
    FamilyChecks {
        disjoint,
        above_h,
        window,
    }
}

/// Greedy families: for `h = 1..=H`, take unused primes `> H` in
/// increasing order until the ratio first drops to `3/H` or below.
pub fn build_prime_families(block_len: u32, opts: FamilyOptions) -> Result<PrimeFamilies> {
    if block_len == 0 {
        return Err(Error::Domain("H must be positive".into()));
    }
    if block_len < MIN_BLOCK_LEN && !opts.allow_small_h {
        return Err(Error::Domain(format!(
            "H = {block_len} is below {MIN_BLOCK_LEN}; pass the small-H override to build a toy window"
        )));
    }
    let h_big = block_len as u64;
    let target = BigRational::new(3.into(), block_len.into());
    let target_f64 = 3.0 / block_len as f64;
    let pool = primes_up_to(opts.prime_limit);
    let mut next = pool.partition_point(|&p| p <= h_big);
    let mut families = Vec::with_capacity(block_len as usize);
    for h in 1..=block_len {
        let base = phi_ratio_u64(h as u64);
        let mut running = base.to_f64().expect("small ratio");
        let mut primes = Vec::new();
        loop {
            // the f64 product drifts by at most ~|primes|·2^-52 relative
            if running <= target_f64 * (1.0 + 1e-9) && family_ratio(h, &primes) <= target {
                break;
            }
            let Some(&p) = pool.get(next) else {
                return Err(Error::PrimeBudget {
                    h: h as u64,
                    limit: opts.prime_limit,
                    reached: running,
                    target: target_f64,
                });
            };
            next += 1;
            primes.push(p);
            running *= 1.0 - 1.0 / p as f64;
        }
        let product = primes.iter().fold(BigUint::one(), |acc, &p| acc * p);
        families.push(Family {
            h,
            ratio: family_ratio(h, &primes),
            primes,
            product,
        });
    }
    let checks = check_families(block_len, &families);
    Ok(PrimeFamilies {
        block_len,
        families,
        checks,
    })
}

/// `r mod M` for pairwise coprime moduli.
#[derive(Clone, Debug, Serialize)]
pub struct CrtSolution {
    #[serde(serialize_with = "big_str")]
    pub r: BigUint,
    #[serde(serialize_with = "big_str")]
    pub modulus: BigUint,
}

/// Solves `x ≡ a_i (mod m_i)` and `x ≡ 0 (mod extra_zero_modulus)`.
pub fn crt_residue(congruences: &[(BigInt, BigUint)], extra_zero_modulus: &BigUint) -> Result<CrtSolution> {
    let mut system: Vec<(BigInt, BigUint)> = congruences.to_vec();
    if extra_zero_modulus.is_zero() {
        return Err(Error::Domain("moduli must be positive".into()));
    }
    if !extra_zero_modulus.is_one() {
        system.push((BigInt::zero(), extra_zero_modulus.clone()));
    }
    for (i, (_, a)) in system.iter().enumerate() {
        if a.is_zero() {
            return Err(Error::Domain("moduli must be positive".into()));
        }
        for (_, b) in &system[i + 1..] {
            if !a.gcd(b).is_one() {
                return Err(Error::NotCoprime { a: a.clone(), b: b.clone() });
            }
        }
    }
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (a, mi) in &system {
        let mi = BigInt::from(mi.clone());
        // r + m·t ≡ a (mod mi)  =>  t ≡ (a - r)·m^{-1}
        let e = m.extended_gcd(&mi);
        let inv = e.x.mod_floor(&mi);
        let t = ((a - &r) * inv).mod_floor(&mi);
        r += &m * t;
        m *= &mi;
        r = r.mod_floor(&m);
    }
    for (a, mi) in &system {
        let mi = BigInt::from(mi.clone());
        assert_eq!(r.mod_floor(&mi), a.mod_floor(&mi), "CRT solution fails a congruence");
    }
    Ok(CrtSolution {
        r: r.to_biguint().expect("reduced"),
        modulus: m.to_biguint().expect("positive"),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowConstruction {
    pub block_len: u32,
    pub families: Vec<Family>,
    pub checks: FamilyChecks,
    /// Smallest prime above every family prime (and above `H`).
    pub cutoff: u64,
    #[serde(serialize_with = "big_str")]
    pub modulus: BigUint,
    #[serde(serialize_with = "big_str")]
    pub residue: BigUint,
    /// `H < 21`: the construction is illustrative only.
    pub toy: bool,
}

fn next_prime(mut n: u64) -> u64 {
    loop {
        n += 1;
        if is_prime_u64(n) {
            return n;
        }
    }
}

pub fn build_window(fam: PrimeFamilies) -> Result<WindowConstruction> {
    let h_big = fam.block_len as u64;
    let top = fam
        .families
        .iter()
        .flat_map(|f| f.primes.iter().copied())
        .max()
        .unwrap_or(h_big)
        .max(h_big);
    let cutoff = next_prime(top);
    let factorial = (1..=h_big).fold(BigUint::one(), |acc, k| acc * k);
    let modulus = primes_up_to(cutoff)
        .into_iter()
        .filter(|&p| p > h_big)
        .fold(factorial, |acc, p| acc * p);
    let mut congruences = Vec::new();
    let mut all_p = BigUint::one();
    for f in fam.families.iter().filter(|f| !f.product.is_one()) {
        congruences.push((-BigInt::from(f.h), f.product.clone()));
        all_p *= &f.product;
    }
    let crt = crt_residue(&congruences, &(&modulus / &all_p))?;
    debug_assert_eq!(crt.modulus, modulus);
    Ok(WindowConstruction {
        block_len: fam.block_len,
        toy: fam.block_len < MIN_BLOCK_LEN,
        families: fam.families,
        checks: fam.checks,
        cutoff,
        modulus,
        residue: crt.r,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowRow {
    pub h: u32,
    #[serde(serialize_with = "big_str")]
    pub value: BigUint,
    /// `value ≡ r + h (mod R)`
    pub congruence: bool,
    #[serde(serialize_with = "big_str")]
    pub gcd: BigUint,
    /// `gcd(value, R) = h·P_h`
    pub gcd_ok: bool,
    #[serde(serialize_with = "crate::report::opt_rational")]
    pub phi_ratio: Option<BigRational>,
    /// `1/H <= φ(n)/n <= 3/H`
    pub fundam: Option<bool>,
    /// `∏_{p | n, p > L} (1 - 1/p)`
    #[serde(serialize_with = "crate::report::opt_rational")]
    pub outer_product: Option<BigRational>,
    /// `outer_product >= 1/2`
    pub outer_ok: Option<bool>,
    pub error: Option<String>,
}

impl WindowRow {
    pub fn passes(&self) -> bool {
        self.gcd_ok && self.fundam == Some(true) && self.outer_ok == Some(true)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowReport {
    pub rows: Vec<WindowRow>,
    pub all_pass: bool,
}

fn row_for(w: &WindowConstruction, h: u32, value: &BigUint) -> WindowRow {
    let fam = &w.families[h as usize - 1];
    let expected_gcd = &fam.product * h;
    let gcd = value.gcd(&w.modulus);
    let congruence = value % &w.modulus == (&w.residue + h) % &w.modulus;
    let mut row = WindowRow {
        h,
        value: value.clone(),
        congruence,
        gcd_ok: gcd == expected_gcd,
        gcd,
        phi_ratio: None,
        fundam: None,
        outer_product: None,
        outer_ok: None,
        error: None,
    };
    if value.is_zero() {
        row.error = Some("value is zero".into());
        return row;
    }
    if !row.gcd_ok {
        // the row already fails; factoring an arbitrary value may not finish
        return row;
    }
    match factorize(value) {
        Ok(f) => {
            let mut ratio = BigRational::one();
            let mut outer = BigRational::one();
            for (p, _) in &f {
                let pi = BigInt::from(p.clone());
                let term = BigRational::new(&pi - 1, pi);
                if *p > BigUint::from(w.cutoff) {
                    outer *= &term;
                }
                ratio *= term;
            }
            let lo = BigRational::new(1.into(), w.block_len.into());
            let hi = BigRational::new(3.into(), w.block_len.into());
            row.fundam = Some(lo <= ratio && ratio <= hi);
            row.outer_ok = Some(outer >= BigRational::new(1.into(), 2.into()));
            row.phi_ratio = Some(ratio);
            row.outer_product = Some(outer);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Checks the values `n_h` for `h = 1..=H` directly.
pub fn verify_window_values(w: &WindowConstruction, values: &[BigUint]) -> Result<WindowReport> {
    if values.len() != w.block_len as usize {
        return Err(Error::Domain(format!("expected {} values, got {}", w.block_len, values.len())));
    }
    let rows: Vec<WindowRow> = values
        .iter()
        .enumerate()
        .map(|(i, v)| row_for(w, i as u32 + 1, v))
        .collect();
    let all_pass = rows.iter().all(WindowRow::passes);
    Ok(WindowReport { rows, all_pass })
}

/// Checks `n_h = ⌊(m+h)^c⌋`.
pub fn verify_window(w: &WindowConstruction, c: ExponentC, m: u64) -> Result<WindowReport> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let values: Vec<BigUint> = (1..=w.block_len as u64)
        .map(|h| floor_value_big(&BigUint::from(m + h), c))
        .collect();
    verify_window_values(w, &values)
}

/// `(3/H)(1 - 1/p_min) > 2/H` for the smallest admissible prime `p_min > H`:
/// the greedy step that first crosses `3/H` cannot overshoot `2/H`.
pub fn greedy_landing_margin(block_len: u32) -> bool {
    let p_min = next_prime(block_len as u64);
    let landing = BigRational::new(3.into(), block_len.into()) * BigRational::new((p_min - 1).into(), p_min.into());
    landing > BigRational::new(2.into(), block_len.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(h: u32) -> WindowConstruction {
        let opts = FamilyOptions {
            allow_small_h: true,
            ..FamilyOptions::default()
        };
        build_window(build_prime_families(h, opts).unwrap()).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn small_h_needs_the_override() {
        assert!(build_prime_families(4, FamilyOptions::default()).is_err());
    }

    #[test]
    fn toy_window_h4() {
        let w = toy(4);
        assert_eq!(w.families[0].primes, vec![5, 7]);
        assert!(w.families[1..].iter().all(|f| f.primes.is_empty()));
        assert!(w.checks.all_hold());
        assert_eq!(w.cutoff, 11);
        assert_eq!(w.modulus, big(9240));
        assert!(w.toy);
        // r ≡ -1 (mod 35), r ≡ 0 (mod 264)
        assert_eq!(&w.residue % 35u32, big(34));
        assert_eq!(&w.residue % 264u32, big(0));
    }

    #[test]
    fn toy_window_h5() {
        let w = toy(5);
        assert_eq!(w.families[0].primes, vec![7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(w.families[2].primes, vec![31, 37, 41, 43]);
        assert!(w.families[1].primes.is_empty() && w.families[3].primes.is_empty());
        let p5 = &w.families[4].primes;
        assert_eq!((p5[0], p5.len(), *p5.last().unwrap()), (47, 28, 181));
        assert!(w.checks.all_hold());
        assert_eq!(w.cutoff, 191);
    }

    #[test]
    fn full_size_families_run_out_of_primes() {
        let opts = FamilyOptions {
            allow_small_h: false,
            prime_limit: 100_000,
        };
        match build_prime_families(21, opts) {
            Err(Error::PrimeBudget { h, reached, target, .. }) => {
                assert_eq!(h, 1);
                assert!(reached > target);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn phi_ratio_exceeds_three_over_h() {
        for big_h in MIN_BLOCK_LEN..=60 {
            for h in 1..=big_h as u64 {
                assert!(phi_ratio_u64(h) > BigRational::new(3.into(), big_h.into()), "H={big_h} h={h}");
            }
            assert!(greedy_landing_margin(big_h));
        }
    }

    #[test]
    fn crt_examples() {
        let one = |a: i64, m: u64| (BigInt::from(a), big(m));
        let s = crt_residue(&[one(22, 23), one(27, 29)], &BigUint::one()).unwrap();
        assert_eq!((s.r, s.modulus), (big(114), big(667)));
        let s = crt_residue(&[one(5, 7)], &BigUint::one()).unwrap();
        assert_eq!(s.r, big(5));
        let s = crt_residue(&[one(-1, 23), one(-2, 29)], &big(4)).unwrap();
        assert_eq!((&s.r % 23u32, &s.r % 29u32, &s.r % 4u32), (big(22), big(27), big(0)));
        match crt_residue(&[one(1, 6), one(1, 10)], &BigUint::one()) {
            Err(Error::NotCoprime { a, b }) => assert_eq!((a, b), (big(6), big(10))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn verifier_on_synthetic_values() {
        let w = toy(4);
        let q = 1_000_000_007u64;
        let values: Vec<BigUint> = w.families.iter().map(|f| &f.product * f.h * q).collect();
        let rep = verify_window_values(&w, &values).unwrap();
        assert!(rep.all_pass, "{rep:?}");
        // 1·35·q has ratio (24/35)(1 - 1/q)
        let expect = BigRational::new(24.into(), 35.into()) * BigRational::new((q - 1).into(), q.into());
        assert_eq!(rep.rows[0].phi_ratio.clone().unwrap(), expect);
        // sharing 11 with R breaks the gcd condition
        let mut bad = values.clone();
        bad[1] = &bad[1] * 11u32;
        let rep = verify_window_values(&w, &bad).unwrap();
        assert!(!rep.rows[1].gcd_ok);
        assert!(!rep.all_pass);
        assert!(verify_window_values(&w, &values[..2]).is_err());
    }
}
