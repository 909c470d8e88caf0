use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Closed interval `[lo/den, hi/den]` with exact rational endpoints over a
/// shared positive denominator.
///
/// Keeping one denominator avoids gcd reductions in the hot paths; endpoints
/// are only normalised when converted to [`BigRational`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    den: BigInt,
}

/// Half-open window `[a, b)` used by the acceptance rule for enclosures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub a: BigRational,
    pub b: BigRational,
}

/// Where an enclosure sits relative to a half-open window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Inside,
    Outside,
    /// Exact point equal to the closed end `a`; belongs to the window.
    AtLower,
    /// Exact point equal to the open end `b`; does not belong to the window.
    AtUpper,
    /// Undecided at this precision; the caller must refine.
    Straddles,
}

impl Location {
    pub fn is_decided(self) -> bool {
        self != Location::Straddles
    }

    /// Membership, for decided locations.
    pub fn holds(self) -> bool {
        matches!(self, Location::Inside | Location::AtLower)
    }

    pub fn is_endpoint(self) -> bool {
        matches!(self, Location::AtLower | Location::AtUpper)
    }
}

impl Window {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Window { a, b }
    }
}

impl Interval {
    /// Builds `[lo/den, hi/den]`; `den` must be positive and `lo <= hi`.
    pub fn from_parts(lo: BigInt, hi: BigInt, den: BigInt) -> Self {
        debug_assert!(den.is_positive());
        debug_assert!(lo <= hi);
        Interval { lo, hi, den }
    }

    pub fn point(q: &BigRational) -> Self {
        Interval {
            lo: q.numer().clone(),
            hi: q.numer().clone(),
            den: q.denom().clone(),
        }
    }

    pub fn integer(n: BigInt) -> Self {
        Interval {
            lo: n.clone(),
            hi: n,
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Interval::integer(BigInt::zero())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.den.clone())
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.den.clone())
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, self.den.clone())
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo().to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi().to_f64().unwrap_or(f64::NAN)
    }

    pub fn mid_f64(&self) -> f64 {
        BigRational::new(&self.lo + &self.hi, &self.den * 2)
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Rounds the midpoint to `bits` fractional bits (floor). Useful for
    /// fixed-point consumers of values in `[0, 1)`.
    pub fn mid_fixed(&self, bits: u32) -> BigInt {
        ((&self.lo + &self.hi) << bits).div_floor(&(&self.den * 2))
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        let x = q.numer() * &self.den;
        let lo = &self.lo * q.denom();
        let hi = &self.hi * q.denom();
        lo <= x && x <= hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        if self.den == other.den {
            return Interval {
                lo: &self.lo + &other.lo,
                hi: &self.hi + &other.hi,
                den: self.den.clone(),
            };
        }
        Interval {
            lo: &self.lo * &other.den + &other.lo * &self.den,
            hi: &self.hi * &other.den + &other.hi * &self.den,
            den: &self.den * &other.den,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    /// Multiplies by an exact rational.
    pub fn scale(&self, q: &BigRational) -> Interval {
        let (p, d) = (q.numer(), q.denom());
        let lo = &self.lo * p;
        let hi = &self.hi * p;
        let den = &self.den * d;
        if p.is_negative() {
            Interval { lo: hi, hi: lo, den }
        } else {
            Interval { lo, hi, den }
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Interval {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    /// `(⌊lo⌋, ⌊hi⌋)`
    pub fn floor_bounds(&self) -> (BigInt, BigInt) {
        (self.lo.div_floor(&self.den), self.hi.div_floor(&self.den))
    }

    /// Enclosure of the fractional part, or `None` when the interval
    /// contains an integer other than possibly its lower end.
    pub fn fract(&self) -> Option<Interval> {
        let (f_lo, f_hi) = self.floor_bounds();
        if f_lo != f_hi {
            return None;
        }
        let shift = &f_lo * &self.den;
        Some(Interval {
            lo: &self.lo - &shift,
            hi: &self.hi - &shift,
            den: self.den.clone(),
        })
    }

    /// Conservative comparison against `[a, b)`.
    pub fn locate(&self, w: &Window) -> Location {
        let (an, ad) = (w.a.numer(), w.a.denom());
        let (bn, bd) = (w.b.numer(), w.b.denom());
        let a_scaled = an * &self.den;
        let b_scaled = bn * &self.den;
        let lo_a = &self.lo * ad;
        let hi_a = &self.hi * ad;
        let lo_b = &self.lo * bd;
        let hi_b = &self.hi * bd;
        if self.is_point() {
            if lo_a == a_scaled {
                return Location::AtLower;
            }
            if lo_b == b_scaled {
                return Location::AtUpper;
            }
            return if lo_a > a_scaled && lo_b < b_scaled {
                Location::Inside
            } else {
                Location::Outside
            };
        }
        if lo_a >= a_scaled && hi_b < b_scaled {
            Location::Inside
        } else if hi_a < a_scaled || lo_b >= b_scaled {
            Location::Outside
        } else {
            Location::Straddles
        }
    }

    /// Sign of the enclosed value: `Some(-1|0|1)` when decided.
    pub fn sign(&self) -> Option<i8> {
        if self.is_point() {
            return Some(if self.lo.is_zero() {
                0
            } else if self.lo.is_positive() {
                1
            } else {
                -1
            });
        }
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    /// True if every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        &self.hi * &other.den <= &other.lo * &self.den
    }

    /// True if every point of `self` is `>` every point of `other`.
    pub fn certainly_gt(&self, other: &Interval) -> bool {
        &self.lo * &other.den > &other.hi * &self.den
    }
}
