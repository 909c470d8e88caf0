//! Exact floor / fractional-part helpers on rationals and the elementary
//! relations between them that the block and window arguments rely on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn floor(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// `{x} = x - ⌊x⌋`, in `[0, 1)`.
pub fn fract(x: &BigRational) -> BigRational {
    x - BigRational::from_integer(floor(x))
}

/// `‖x‖`, the distance to the nearest integer.
pub fn dist_to_int(x: &BigRational) -> BigRational {
    let f = fract(x);
    let g = BigRational::one() - &f;
    f.min(g)
}

/// Distance between two points of the circle `ℝ/ℤ`.
pub fn circle_dist(x: &BigRational, y: &BigRational) -> BigRational {
    dist_to_int(&(x - y))
}

/// `⌊ℓx⌋ >= ℓ⌊x⌋` and `{ℓx} <= ℓ{x}`.
pub fn multfrac_holds(ell: u64, x: &BigRational) -> bool {
    let l = BigRational::from_integer(ell.into());
    let lx = &l * x;
    floor(&lx) >= BigInt::from(ell) * floor(x) && fract(&lx) <= &l * fract(x)
}

/// If `Σ{x_i} < 1` then `⌊Σ x_i⌋ = Σ⌊x_i⌋`. Returns `None` when the
/// hypothesis fails.
pub fn sumint_holds(xs: &[BigRational]) -> Option<bool> {
    let frac_sum: BigRational = xs.iter().map(fract).sum();
    if frac_sum >= BigRational::one() {
        return None;
    }
    let total: BigRational = xs.iter().cloned().sum();
    let floors: BigInt = xs.iter().map(floor).sum();
    Some(floor(&total) == floors)
}

/// If `ℓ{x} < 1` then `⌊ℓx⌋ = ℓ⌊x⌋`. `None` when the hypothesis fails.
pub fn mult_holds(ell: u64, x: &BigRational) -> Option<bool> {
    let l = BigRational::from_integer(ell.into());
    if &l * fract(x) >= BigRational::one() {
        return None;
    }
    Some(floor(&(&l * x)) == BigInt::from(ell) * floor(x))
}

/// If `{x/R} ∈ [r/R, (r+u)/R)` (with `0 <= r < R`, `u ∈ [0,1]`) then
/// `⌊x⌋ ≡ r (mod R)` and `{x} < u`. `None` when the hypothesis fails.
pub fn congfrac_holds(x: &BigRational, modulus: &BigInt, r: &BigInt, u: &BigRational) -> Option<bool> {
    assert!(modulus.is_positive() && !r.is_negative() && r < modulus);
    assert!(!u.is_negative() && u <= &BigRational::one());
    let rm = BigRational::from_integer(modulus.clone());
    let f = fract(&(x / &rm));
    let lo = BigRational::new(r.clone(), modulus.clone());
    let hi = (BigRational::from_integer(r.clone()) + u) / &rm;
    if !(lo <= f && f < hi) {
        return None;
    }
    let fl = floor(x);
    Some(fl.mod_floor(modulus) == *r && fract(x) < *u)
}

pub fn is_integer(x: &BigRational) -> bool {
    fract(x).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn floor_and_fract_of_negatives() {
        assert_eq!(floor(&q(-7, 2)), BigInt::from(-4));
        assert_eq!(fract(&q(-7, 2)), q(1, 2));
        assert_eq!(dist_to_int(&q(9, 10)), q(1, 10));
        assert_eq!(circle_dist(&q(1, 20), &q(19, 20)), q(1, 10));
    }

    #[test]
    fn identities_on_hand_cases() {
        assert!(multfrac_holds(3, &q(5, 2)));
        assert_eq!(sumint_holds(&[q(1, 3), q(5, 4)]), Some(true));
        assert_eq!(sumint_holds(&[q(2, 3), q(1, 2)]), None);
        assert_eq!(mult_holds(3, &q(31, 10)), Some(true));
        assert_eq!(mult_holds(3, &q(7, 2)), None);
        // x = 17.1, R = 5, r = 2, u = 1/4: {x/5} = 0.42 ∈ [0.4, 0.45)
        assert_eq!(
            congfrac_holds(&q(171, 10), &BigInt::from(5), &BigInt::from(2), &q(1, 4)),
            Some(true)
        );
    }
}
