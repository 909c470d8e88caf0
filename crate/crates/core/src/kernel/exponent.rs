use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Small exact rational used for exponents and derived constants of `c`.
pub type Q64 = Ratio<i64>;

/// A rational exponent `c = num/den > 1` that is not an integer.
///
/// Stored in lowest terms, so `den >= 2` is equivalent to `c` being
/// non-integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExponentC {
    num: u32,
    den: u32,
}

impl ExponentC {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidExponent("denominator is zero".into()));
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        if den < 2 {
            return Err(Error::InvalidExponent(format!(
                "c = {num} is an integer; only non-integral c is supported"
            )));
        }
        if num <= den {
            return Err(Error::InvalidExponent(format!("c = {num}/{den} is not larger than 1")));
        }
        Ok(ExponentC { num, den })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn as_ratio(&self) -> Q64 {
        Q64::new(self.num as i64, self.den as i64)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌊c⌋`
    pub fn floor(&self) -> u32 {
        self.num / self.den
    }

    /// `{c}`, strictly between 0 and 1.
    pub fn frac(&self) -> Q64 {
        Q64::new((self.num % self.den) as i64, self.den as i64)
    }

    /// `‖c‖ = min({c}, 1 - {c})`, in `(0, 1/2]`.
    pub fn dist(&self) -> Q64 {
        let f = self.frac();
        let g = Q64::from_integer(1) - f;
        f.min(g)
    }

    /// `θ = 2^{-(c+2)} ‖c‖`, the saving exponent of the exponential-sum bound.
    pub fn theta(&self) -> f64 {
        2f64.powf(-(self.as_f64() + 2.0)) * ratio_f64(&self.dist())
    }

    /// `β = 2^{c+2} (c+2)^2 / ‖c‖`, the search-range exponent.
    pub fn beta(&self) -> f64 {
        let c2 = self.as_f64() + 2.0;
        2f64.powf(c2) * c2 * c2 / ratio_f64(&self.dist())
    }

    /// `θ·β`, which equals `(c+2)^2` exactly.
    pub fn theta_beta_product(&self) -> Q64 {
        let c2 = self.as_ratio() + Q64::from_integer(2);
        c2 * c2
    }

    /// Exponent `c - ℓ` as an exact rational.
    pub fn shifted(&self, ell: u32) -> Q64 {
        self.as_ratio() - Q64::from_integer(ell as i64)
    }
}

pub(crate) fn ratio_f64(q: &Q64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

impl fmt::Display for ExponentC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for ExponentC {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => {
                return Err(Error::InvalidExponent(format!(
                    "expected n/d, got {s:?}"
                )))
            }
        };
        let num = n
            .parse::<u32>()
            .map_err(|e| Error::InvalidExponent(format!("numerator {n:?}: {e}")))?;
        let den = d
            .parse::<u32>()
            .map_err(|e| Error::InvalidExponent(format!("denominator {d:?}: {e}")))?;
        ExponentC::new(num, den)
    }
}

impl Serialize for ExponentC {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities_for_three_halves() {
        let c: ExponentC = "3/2".parse().unwrap();
        assert_eq!(c.floor(), 1);
        assert_eq!(c.frac(), Q64::new(1, 2));
        assert_eq!(c.dist(), Q64::new(1, 2));
        assert!((c.theta() - 0.044_194_173_824_159_22).abs() < 1e-15);
        assert!((c.beta() - 277.185_858_225_126_6).abs() < 1e-9);
    }

    #[test]
    fn dist_takes_the_nearer_integer() {
        let c = ExponentC::new(11, 10).unwrap();
        assert_eq!(c.dist(), Q64::new(1, 10));
        let c = ExponentC::new(9, 5).unwrap();
        assert_eq!(c.frac(), Q64::new(4, 5));
        assert_eq!(c.dist(), Q64::new(1, 5));
    }

    #[test]
    fn rejects_integers_and_small_values() {
        assert!(ExponentC::new(4, 2).is_err());
        assert!(ExponentC::new(1, 2).is_err());
        assert!(ExponentC::new(3, 0).is_err());
        assert!("3".parse::<ExponentC>().is_err());
        assert!("x/2".parse::<ExponentC>().is_err());
        // unreduced input is normalised
        assert_eq!(ExponentC::new(6, 4).unwrap(), ExponentC::new(3, 2).unwrap());
    }

    #[test]
    fn theta_beta_identity() {
        for (n, d) in [(3, 2), (5, 2), (7, 3), (11, 10), (17, 5)] {
            let c = ExponentC::new(n, d).unwrap();
            let exact = ratio_f64(&c.theta_beta_product());
            assert!((c.theta() * c.beta() - exact).abs() <= 1e-12 * exact);
        }
    }
}
