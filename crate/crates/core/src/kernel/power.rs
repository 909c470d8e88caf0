use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::exponent::{ExponentC, Q64};
use super::interval::Interval;
use crate::error::{Error, Result};
use crate::report::{big_str, opt_interval};

/// Working-precision policy for adaptive enclosures: start at `start_bits`
/// fractional bits, double on every undecided comparison, give up at
/// `cap_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Precision {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 64,
            cap_bits: 16384,
        }
    }
}

impl Precision {
    /// Runs `step` at increasing precision until it returns `Some`.
    pub fn refine<T>(&self, mut step: impl FnMut(u32) -> Option<T>) -> Result<T> {
        self.refine_from(self.start_bits, &mut step)
    }

    pub(crate) fn refine_from<T>(
        &self,
        first: u32,
        step: &mut impl FnMut(u32) -> Option<T>,
    ) -> Result<T> {
        let mut bits = first.clamp(1, self.cap_bits.max(1));
        loop {
            if let Some(v) = step(bits) {
                return Ok(v);
            }
            if bits >= self.cap_bits {
                return Err(Error::PrecisionExhausted {
                    cap_bits: self.cap_bits,
                });
            }
            bits = bits.saturating_mul(2).min(self.cap_bits);
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn q64_to_big(q: &Q64) -> BigRational {
    rat(*q.numer(), *q.denom())
}

/// Enclosure of `m^e` for a rational exponent `e`, with absolute width at
/// most `2^-bits` (for `m >= 1`).
///
/// Rational values (integer exponent, or `m` a perfect `den(e)`-th power) are
/// detected algebraically and returned as exact points.
pub fn pow_enclosure(m: &BigUint, e: Q64, bits: u32) -> Interval {
    assert!(!m.is_zero(), "pow_enclosure needs m >= 1");
    let a = *e.numer();
    let b = *e.denom() as u32;
    let abs_a = a.unsigned_abs();
    let exact_base = if b == 1 {
        Some(m.clone())
    } else {
        let r = m.nth_root(b);
        if Pow::pow(&r, b) == *m {
            Some(r)
        } else {
            None
        }
    };
    if let Some(base) = exact_base {
        let v = BigInt::from(Pow::pow(&base, abs_a));
        let q = if a >= 0 {
            BigRational::from_integer(v)
        } else {
            BigRational::new(BigInt::one(), v)
        };
        return Interval::point(&q);
    }
    // m^{|a|/b} is irrational here, so the root below is never exact.
    let scaled: BigUint = Pow::pow(m, abs_a) << (bits as usize * b as usize);
    let l = BigInt::from(scaled.nth_root(b));
    let l1 = &l + 1u32;
    let two_k = BigInt::one() << bits as usize;
    if a >= 0 {
        Interval::from_parts(l, l1, two_k)
    } else {
        let den = &l * &l1;
        Interval::from_parts(&two_k * &l, &two_k * &l1, den)
    }
}

/// `⌊m^c⌋` for `m^c < 2^52`, computed with an integer-checked fix-up of a
/// floating guess. Returns `None` outside that range.
pub fn floor_value_small(m: u64, c: ExponentC) -> Option<u64> {
    let mn = (m as u128).checked_pow(c.num())?;
    let guess = (m as f64).powf(c.as_f64());
    if !(guess < 4.0e15) {
        return None;
    }
    let d = c.den();
    let le = |x: u128| x.checked_pow(d).is_some_and(|v| v <= mn);
    let mut f = guess as u128;
    while le(f + 1) {
        f += 1;
    }
    while f > 0 && !le(f) {
        f -= 1;
    }
    Some(f as u64)
}

/// `⌊m^c⌋` as an exact integer.
pub fn floor_value(m: u64, c: ExponentC) -> BigUint {
    if let Some(f) = floor_value_small(m, c) {
        return BigUint::from(f);
    }
    floor_value_big(&BigUint::from(m), c)
}

/// `⌊m^c⌋` through the big-integer `d`-th root only (no floating guess).
pub fn floor_value_big(m: &BigUint, c: ExponentC) -> BigUint {
    Pow::pow(m, c.num()).nth_root(c.den())
}

/// Checks `f^d <= m^n < (f+1)^d` for `c = n/d`.
pub fn certify_floor(m: u64, c: ExponentC, f: &BigUint) -> bool {
    let mn = Pow::pow(&BigUint::from(m), c.num());
    let d = c.den();
    Pow::pow(f, d) <= mn && mn < Pow::pow(&(f + 1u32), d)
}

/// Certified `⌊m^c⌋` together with an enclosure of `{m^c}`.
#[derive(Clone, Debug, Serialize)]
pub struct FloorPower {
    pub m: u64,
    #[serde(serialize_with = "big_str")]
    pub floor_value: BigUint,
    #[serde(serialize_with = "opt_interval")]
    pub frac_enclosure: Option<Interval>,
    pub exact_integer: bool,
}

impl FloorPower {
    pub fn certify(&self, c: ExponentC) -> bool {
        certify_floor(self.m, c, &self.floor_value)
    }
}

/// `⌊m^c⌋` with a fractional-part enclosure of width at most `tol`.
pub fn floor_pow(m: u64, c: ExponentC, tol: f64, prec: Precision) -> Result<FloorPower> {
    if m == 0 {
        return Err(Error::Domain("floor_pow needs m >= 1".into()));
    }
    let floor_value = floor_value(m, c);
    let frac = frac_scaled(
        &BigRational::one(),
        &BigUint::from(m),
        c.as_ratio(),
        1,
        tol,
        prec,
    )?;
    Ok(FloorPower {
        m,
        floor_value,
        exact_integer: frac.exact,
        frac_enclosure: Some(frac.interval),
    })
}

/// Enclosure of a fractional part, with the precision that decided it.
#[derive(Clone, Debug, Serialize)]
pub struct FracEnclosure {
    #[serde(serialize_with = "crate::report::interval")]
    pub interval: Interval,
    pub exact: bool,
    pub bits: u32,
}

/// Enclosure of `{coeff · m^exponent / modulus}` of width at most `tol`.
///
/// Precision is raised until the enclosure of the scaled value no longer
/// straddles an integer. Rational values come back as exact points.
pub fn frac_scaled(
    coeff: &BigRational,
    m: &BigUint,
    exponent: Q64,
    modulus: u64,
    tol: f64,
    prec: Precision,
) -> Result<FracEnclosure> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    if modulus == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if m.is_zero() {
        return Err(Error::Domain("base must be positive".into()));
    }
    let factor = coeff / BigRational::from_integer(BigInt::from(modulus));
    let first = bits_for_width(&factor, tol).max(prec.start_bits);
    let mut step = |bits: u32| {
        let e = pow_enclosure(m, exponent, bits).scale(&factor);
        if e.is_point() {
            return Some(FracEnclosure {
                interval: e.fract().expect("points never straddle"),
                exact: true,
                bits,
            });
        }
        let f = e.fract()?;
        (f.width_f64() <= tol).then_some(FracEnclosure {
            interval: f,
            exact: false,
            bits,
        })
    };
    prec.refine_from(first, &mut step)
}

/// Smallest `k` with `|factor| · 2^-k <= tol`.
pub(crate) fn bits_for_width(factor: &BigRational, tol: f64) -> u32 {
    let f = factor.abs().to_f64().unwrap_or(f64::MAX).max(f64::MIN_POSITIVE);
    let need = (f / tol).log2().ceil() + 1.0;
    if need.is_finite() && need > 1.0 {
        need.min(u32::MAX as f64 / 4.0) as u32
    } else {
        1
    }
}

/// `γ_c(ℓ) = c(c-1)…(c-ℓ+1)/ℓ!` for any `ℓ`, exact.
pub(crate) fn gamma_any(c: ExponentC, ell: u32) -> BigRational {
    let cr = q64_to_big(&c.as_ratio());
    let mut g = BigRational::one();
    for j in 0..ell {
        g = g * (&cr - BigRational::from_integer(j.into())) / BigRational::from_integer((j + 1).into());
    }
    g
}

/// Taylor coefficient `γ_c(ℓ)` for `0 <= ℓ <= ⌊c⌋`.
pub fn gamma_coeff(c: ExponentC, ell: u32) -> Result<BigRational> {
    if ell > c.floor() {
        return Err(Error::Domain(format!(
            "gamma index {ell} exceeds floor(c) = {}",
            c.floor()
        )));
    }
    Ok(gamma_any(c, ell))
}

/// The coefficients `γ_c(0..=⌊c⌋)` of the local expansion of `(m+h)^c`.
#[derive(Clone, Debug)]
pub struct TaylorCoefficients {
    pub c: ExponentC,
    pub gamma: Vec<BigRational>,
}

impl TaylorCoefficients {
    pub fn new(c: ExponentC) -> Self {
        let cr = q64_to_big(&c.as_ratio());
        let mut gamma = vec![BigRational::one()];
        for ell in 1..=c.floor() {
            let prev = gamma[ell as usize - 1].clone();
            gamma.push(prev * (&cr - BigRational::from_integer((ell - 1).into())) / BigRational::from_integer(ell.into()));
        }
        TaylorCoefficients { c, gamma }
    }

    /// Enclosure of `h^{⌊c⌋+1} m^{{c}-1}`.
    pub fn remainder_bound(&self, m: u64, h: u64, bits: u32) -> Interval {
        let hp = BigInt::from(h).pow(self.c.floor() + 1);
        let e = self.c.frac() - Q64::from_integer(1);
        pow_enclosure(&BigUint::from(m), e, bits).scale_int(&hp)
    }
}

/// Enclosures of `(m+h)^c`, of its polynomial part
/// `Σ_{ℓ≤⌊c⌋} γ_c(ℓ) h^ℓ m^{c-ℓ}`, and of the remainder bound.
#[derive(Clone, Debug)]
pub struct TaylorExpansion {
    pub m: u64,
    pub h: u64,
    pub power: Interval,
    pub polynomial: Interval,
    pub remainder_bound: Interval,
    pub bits: u32,
}

impl TaylorExpansion {
    /// Enclosure of the remainder `(m+h)^c - polynomial`.
    pub fn remainder(&self) -> Interval {
        if self.h == 0 {
            return Interval::zero();
        }
        self.power.sub(&self.polynomial)
    }
}

pub fn taylor_expand(m: u64, h: u64, c: ExponentC, bits: u32) -> TaylorExpansion {
    assert!(m >= 1, "taylor_expand needs m >= 1");
    let coeffs = TaylorCoefficients::new(c);
    let mb = BigUint::from(m);
    let mut polynomial = Interval::zero();
    for (ell, g) in coeffs.gamma.iter().enumerate() {
        let ell = ell as u32;
        if h == 0 && ell > 0 {
            break;
        }
        let term = pow_enclosure(&mb, c.shifted(ell), bits)
            .scale(&(g * BigRational::from_integer(BigInt::from(h).pow(ell))));
        polynomial = polynomial.add(&term);
    }
    let power = pow_enclosure(&BigUint::from(m + h), c.as_ratio(), bits);
    let remainder_bound = if h == 0 {
        Interval::zero()
    } else {
        coeffs.remainder_bound(m, h, bits)
    };
    TaylorExpansion {
        m,
        h,
        power,
        polynomial,
        remainder_bound,
        bits,
    }
}

/// Outcome of certifying `0 <= r_c(m,h) <= h^{⌊c⌋+1} m^{{c}-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RemainderCheck {
    pub nonnegative: bool,
    pub within_bound: bool,
    pub bits: u32,
}

impl RemainderCheck {
    pub fn holds(&self) -> bool {
        self.nonnegative && self.within_bound
    }
}

pub fn check_taylor_remainder(m: u64, h: u64, c: ExponentC, prec: Precision) -> Result<RemainderCheck> {
    if h == 0 {
        return Ok(RemainderCheck {
            nonnegative: true,
            within_bound: true,
            bits: 0,
        });
    }
    prec.refine(|bits| {
        let t = taylor_expand(m, h, c, bits);
        let r = t.remainder();
        let nonnegative = r.sign()? >= 0;
        let within_bound = if r.certainly_le(&t.remainder_bound) {
            true
        } else if r.certainly_gt(&t.remainder_bound) {
            false
        } else {
            return None;
        };
        Some(RemainderCheck {
            nonnegative,
            within_bound,
            bits,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: u32, d: u32) -> ExponentC {
        ExponentC::new(n, d).unwrap()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_coeff(c(3, 2), 0).unwrap(), rat(1, 1));
        assert_eq!(gamma_coeff(c(3, 2), 1).unwrap(), rat(3, 2));
        assert_eq!(gamma_coeff(c(7, 3), 2).unwrap(), rat(14, 9));
        assert!(gamma_coeff(c(3, 2), 2).is_err());
    }

    #[test]
    fn gamma_recurrence_matches_product() {
        for (n, d) in [(3, 2), (5, 2), (7, 3), (11, 10), (23, 4)] {
            let cc = c(n, d);
            let t = TaylorCoefficients::new(cc);
            for (ell, g) in t.gamma.iter().enumerate() {
                assert_eq!(*g, gamma_any(cc, ell as u32));
                assert!(g > &BigRational::zero());
            }
        }
    }

    #[test]
    fn floor_pow_examples() {
        let p = Precision::default();
        let one = floor_pow(1, c(7, 3), 1e-6, p).unwrap();
        assert_eq!(one.floor_value, BigUint::from(1u32));
        assert!(one.exact_integer);
        let ten = floor_pow(10, c(3, 2), 1e-6, p).unwrap();
        assert_eq!(ten.floor_value, BigUint::from(31u32));
        assert!(!ten.exact_integer);
        let fr = ten.frac_enclosure.unwrap();
        assert!(fr.lo_f64() <= 0.622_776_601_683_793_3 && 0.622_776_601_683_793_3 <= fr.hi_f64());
        let four = floor_pow(4, c(3, 2), 1e-6, p).unwrap();
        assert_eq!(four.floor_value, BigUint::from(8u32));
        assert!(four.exact_integer);
        assert!(four.frac_enclosure.as_ref().unwrap().is_point());
        assert!(four.certify(c(3, 2)));
    }

    #[test]
    fn small_and_big_paths_agree() {
        for cc in [c(3, 2), c(5, 2), c(7, 3), c(11, 10)] {
            for m in (1..3000u64).chain([99_999, 1_000_000, 123_456_789]) {
                let big = floor_value_big(&BigUint::from(m), cc);
                if let Some(s) = floor_value_small(m, cc) {
                    assert_eq!(BigUint::from(s), big, "m={m} c={cc}");
                }
                assert!(certify_floor(m, cc, &big));
            }
        }
    }

    #[test]
    fn frac_scaled_examples() {
        let p = Precision::default();
        let one = BigRational::one();
        let e = c(3, 2).as_ratio();
        let r = frac_scaled(&one, &BigUint::from(4u32), e, 3, 1e-6, p).unwrap();
        assert!(r.exact);
        assert_eq!(r.interval.lo(), rat(2, 3));
        let r = frac_scaled(&one, &BigUint::from(6u32), e, 3, 1e-3, p).unwrap();
        assert!(!r.exact);
        assert!(r.interval.width_f64() <= 1e-3);
        let v = 0.898_979_485_566_356_2;
        assert!(r.interval.lo_f64() <= v && v <= r.interval.hi_f64());
        let r = frac_scaled(&one, &BigUint::from(1u32), e, 1, 1e-6, p).unwrap();
        assert!(r.exact);
        assert_eq!(r.interval.lo(), rat(0, 1));
    }

    #[test]
    fn frac_scaled_rejects_bad_tolerance() {
        let r = frac_scaled(&BigRational::one(), &BigUint::from(2u32), Q64::new(1, 2), 1, 0.0, Precision::default());
        assert!(r.is_err());
    }

    #[test]
    fn precision_cap_is_reported() {
        let tight = Precision {
            start_bits: 4,
            cap_bits: 8,
        };
        let r = frac_scaled(&BigRational::one(), &BigUint::from(2u32), Q64::new(1, 2), 1, 1e-30, tight);
        assert!(matches!(r, Err(Error::PrecisionExhausted { cap_bits: 8 })));
    }

    #[test]
    fn taylor_examples() {
        let cc = c(3, 2);
        let t = taylor_expand(7, 0, cc, 64);
        assert!(t.remainder().is_point());
        assert_eq!(t.remainder().sign(), Some(0));
        let t = taylor_expand(100, 1, cc, 80);
        let r = t.remainder();
        // oracle remainder 0.037437733209917...
        assert!(r.lo_f64() <= 0.037_437_733_209_917_29 && 0.037_437_733_209_917_29 <= r.hi_f64());
        assert!(r.hi_f64() <= 0.1);
        let t = taylor_expand(10, 3, cc, 80);
        assert!((t.remainder_bound.mid_f64() - 2.846_049_894_151_541).abs() < 1e-12);
        assert!(check_taylor_remainder(10, 3, cc, Precision::default()).unwrap().holds());
    }
}
