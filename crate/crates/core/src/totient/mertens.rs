use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::factor::factorize;
use crate::error::{Error, Result};

/// `∏_{p | n, p >= (log n)^α} (1 - 1/p) >= C`, with `0 < C < α <= 1`.
#[derive(Clone, Debug, Serialize)]
pub struct MertensQuery {
    #[serde(serialize_with = "crate::report::big_str")]
    pub n: BigUint,
    pub alpha: f64,
    pub c_const: f64,
}

impl MertensQuery {
    pub fn new(n: BigUint, alpha: f64, c_const: f64) -> Result<Self> {
        if n < BigUint::one() {
            return Err(Error::Domain("n must be positive".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha = {alpha} outside (0, 1]")));
        }
        if !(c_const > 0.0 && c_const < alpha.min(1.0)) {
            return Err(Error::Domain(format!("C = {c_const} outside (0, alpha)")));
        }
        Ok(MertensQuery { n, alpha, c_const })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MertensReport {
    #[serde(serialize_with = "crate::report::big_str")]
    pub n: BigUint,
    /// `(log n)^α`
    pub threshold: f64,
    #[serde(serialize_with = "crate::report::big_vec")]
    pub primes: Vec<BigUint>,
    #[serde(serialize_with = "crate::report::rational")]
    pub value: BigRational,
    pub value_f64: f64,
    pub satisfied: bool,
}

fn ln_big(n: &BigUint) -> f64 {
    match n.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let shift = n.bits().saturating_sub(64);
            (n >> shift).to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

pub fn large_prime_product(q: &MertensQuery) -> Result<MertensReport> {
    let threshold = ln_big(&q.n).max(0.0).powf(q.alpha);
    let primes: Vec<BigUint> = factorize(&q.n)?
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| p.to_f64().unwrap_or(f64::INFINITY) >= threshold)
        .collect();
    let value = primes.iter().fold(BigRational::one(), |acc, p| {
        let p = BigInt::from(p.clone());
        acc * BigRational::new(&p - 1, p)
    });
    let c = BigRational::from_float(q.c_const).expect("finite C");
    Ok(MertensReport {
        n: q.n.clone(),
        threshold,
        satisfied: value >= c,
        value_f64: value.to_f64().unwrap_or(f64::NAN),
        primes,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(n: u64, alpha: f64, c: f64) -> MertensReport {
        large_prime_product(&MertensQuery::new(BigUint::from(n), alpha, c).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let r = query(30, 1.0, 0.5);
        assert_eq!(r.primes, vec![BigUint::from(5u32)]);
        assert_eq!(r.value, BigRational::new(4.into(), 5.into()));
        assert!(r.satisfied);
        let r = query(1_000_000_007, 0.75, 0.5);
        assert_eq!(r.value, BigRational::new(1_000_000_006u64.into(), 1_000_000_007u64.into()));
        // primorial 29#: threshold ≈ 10.36 keeps 11..29
        let r = query(6_469_693_230, 0.75, 0.5);
        assert!((r.threshold - 10.36198).abs() < 1e-4);
        assert_eq!(r.primes.len(), 6);
        assert_eq!(r.value, BigRational::new(1_935_360.into(), 2_800_733.into()));
        assert!(r.satisfied);
    }

    #[test]
    fn validation() {
        assert!(MertensQuery::new(BigUint::from(10u32), 0.0, 0.1).is_err());
        assert!(MertensQuery::new(BigUint::from(10u32), 0.5, 0.5).is_err());
        assert!(MertensQuery::new(BigUint::from(0u32), 0.5, 0.25).is_err());
    }

    #[test]
    fn monotone_in_alpha() {
        for n in [360_360u64, 9_699_690, 123_456_789, 1 << 40] {
            let mut prev = BigRational::from_integer(0.into());
            for a in [0.3, 0.5, 0.75, 0.9, 1.0] {
                let v = query(n, a, 0.1).value;
                assert!(v >= prev);
                prev = v;
            }
        }
    }
}
