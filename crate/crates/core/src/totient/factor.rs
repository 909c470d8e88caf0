//! Certified integer factorization: trial division by the primes below
//! [`TRIAL_LIMIT`], then deterministic Miller–Rabin and Brent's variant of
//! Pollard's rho.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const TRIAL_LIMIT: u64 = 1_000_000;

/// Miller–Rabin with the primes up to 41 as bases is deterministic below
/// this bound.
const MR_DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Iterations of rho on a big cofactor before giving up.
const RHO_BUDGET: u64 = 1 << 20;

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // odd-only sieve: index i stands for 2i + 1
    let half = (limit as usize + 1) / 2;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    std::iter::once(2)
        .chain((1..half).filter(|&i| !composite[i]).map(|i| 2 * i as u64 + 1))
        .collect()
}

pub(crate) fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

/// `φ(n)` for every `n <= limit`, by sieving.
pub fn phi_sieve(limit: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=limit as u64).collect();
    for p in 2..=limit {
        if phi[p] == p as u64 {
            let mut k = p;
            while k <= limit {
                phi[k] -= phi[k] / p as u64;
                k += p;
            }
        }
    }
    phi
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of an odd composite `n`.
fn rho_u64(n: u64) -> u64 {
    const BATCH: u64 = 128;
    for c in 1..n {
        let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut ys) = (0u64, 2u64, 2u64);
        let (mut r, mut q, mut g) = (1u64, 1u64, 1u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("some c splits every odd composite")
}

fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = rho_u64(n);
    split_u64(d, out);
    split_u64(n / d, out);
}

fn collect(mut primes: Vec<u64>) -> Vec<(u64, u32)> {
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Prime factorization of `n >= 1`, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor_u64 needs n >= 1");
    let mut primes = Vec::new();
    let mut exhausted = true;
    for &p in small_primes() {
        if p * p > n {
            exhausted = false;
            break;
        }
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    if n > 1 {
        if exhausted {
            split_u64(n, &mut primes);
        } else {
            primes.push(n);
        }
    }
    collect(primes)
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().expect("n > 1");
    let d = &n1 >> s;
    'bases: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> Option<BigUint> {
    const BATCH: u64 = 128;
    let one = BigUint::one();
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut spent = 0u64;
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let (mut x, mut y, mut ys) = (BigUint::zero(), BigUint::from(2u32), BigUint::from(2u32));
        let (mut r, mut q, mut g) = (1u64, one.clone(), one.clone());
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    q = (q * diff(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += BATCH;
                spent += BATCH;
            }
            if spent > RHO_BUDGET {
                return None;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = diff(&x, &ys).gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
    }
    None
}

fn split_big(n: BigUint, out: &mut Vec<BigUint>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(v) = n.to_u64() {
        out.extend(factor_u64(v).into_iter().flat_map(|(p, e)| std::iter::repeat(BigUint::from(p)).take(e as usize)));
        return Ok(());
    }
    if is_probable_prime_big(&n) {
        if n < BigUint::from(MR_DETERMINISTIC_BOUND) {
            out.push(n);
            return Ok(());
        }
        return Err(Error::FactorizationBudget { cofactor: n });
    }
    let d = rho_big(&n).ok_or_else(|| Error::FactorizationBudget { cofactor: n.clone() })?;
    let rest = &n / &d;
    split_big(d, out)?;
    split_big(rest, out)
}

/// Prime factorization of `n >= 1`, primes ascending. Fails with the
/// unfactored cofactor when a factor cannot be certified.
pub fn factorize(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    if let Some(v) = n.to_u64() {
        return Ok(factor_u64(v).into_iter().map(|(p, e)| (BigUint::from(p), e)).collect());
    }
    let mut rest = n.clone();
    let mut primes: Vec<BigUint> = Vec::new();
    let mut exhausted = true;
    for &p in small_primes() {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            exhausted = false;
            break;
        }
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            primes.push(bp.clone());
        }
    }
    if !rest.is_one() {
        if exhausted {
            split_big(rest, &mut primes)?;
        } else {
            primes.push(rest);
        }
    }
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

pub fn euler_phi_u64(n: u64) -> u64 {
    factor_u64(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn euler_phi(n: &BigUint) -> Result<BigUint> {
    if n.is_zero() {
        return Err(Error::Domain("phi is defined for n >= 1".into()));
    }
    Ok(factorize(n)?.iter().fold(n.clone(), |acc, (p, _)| acc / p * (p - 1u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi_u64(1), 1);
        assert_eq!(euler_phi_u64(12), 4);
        assert_eq!(euler_phi_u64(1_000_003), 1_000_002);
        let brute = (1..=12u64).filter(|k| k.gcd(&12) == 1).count() as u64;
        assert_eq!(brute, 4);
    }

    #[test]
    fn sieve_agrees_to_a_hundred_thousand() {
        let phi = phi_sieve(100_000);
        for n in 1..=100_000u64 {
            assert_eq!(euler_phi_u64(n), phi[n as usize], "n = {n}");
        }
    }

    #[test]
    fn large_factorizations() {
        // 2^64 - 1 = 3 · 5 · 17 · 257 · 641 · 65537 · 6700417
        let f = factor_u64(u64::MAX);
        assert_eq!(f.iter().map(|p| p.0).collect::<Vec<_>>(), vec![3, 5, 17, 257, 641, 65537, 6700417]);
        // product of two primes above the trial limit
        let (p, q) = (1_000_000_007u64, 998_244_353u64);
        assert_eq!(factor_u64(p * q), vec![(q, 1), (p, 1)]);
        let big = BigUint::from(p) * BigUint::from(q) * BigUint::from(1_000_000_009u64) * 12u32;
        let f = factorize(&big).unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!(f[0], (BigUint::from(2u32), 2));
        assert!(is_prime_u64(p) && !is_prime_u64(p * q));
    }

    #[test]
    fn uncertifiable_cofactor_is_reported() {
        // 2^89 - 1 is prime and above the deterministic bound
        let m89 = (BigUint::one() << 89usize) - 1u32;
        match factorize(&(&m89 * 6u32)) {
            Err(Error::FactorizationBudget { cofactor }) => assert_eq!(cofactor, m89),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn phi_is_multiplicative(a in 1u64..5_000_000, b in 1u64..5_000_000) {
            prop_assume!(a.gcd(&b) == 1);
            prop_assert_eq!(euler_phi_u64(a * b), euler_phi_u64(a) * euler_phi_u64(b));
        }

        #[test]
        fn factorization_multiplies_back(n in 1u64..u64::MAX) {
            let f = factor_u64(n);
            let back = f.iter().fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e));
            prop_assert_eq!(back, n as u128);
            prop_assert!(f.iter().all(|&(p, _)| is_prime_u64(p)));
        }
    }
}
