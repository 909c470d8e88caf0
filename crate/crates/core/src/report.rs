//! Serialization helpers: big integers and rationals travel as decimal
//! strings so JSON consumers never lose precision.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::Serializer;

use crate::kernel::Interval;

pub fn big_str<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn bigint_str<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn big_vec<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn interval<S: Serializer>(v: &Interval, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Interval", 4)?;
    st.serialize_field("lo", &v.lo().to_string())?;
    st.serialize_field("hi", &v.hi().to_string())?;
    st.serialize_field("lo_f64", &v.lo_f64())?;
    st.serialize_field("hi_f64", &v.hi_f64())?;
    st.end()
}

pub fn opt_interval<S: Serializer>(v: &Option<Interval>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(iv) => interval(iv, s),
        None => s.serialize_none(),
    }
}

pub fn opt_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.collect_str(q),
        None => s.serialize_none(),
    }
}

/// Decimal rendering of a rational with `digits` places (truncated toward
/// negative infinity).
pub fn decimal(q: &BigRational, digits: usize) -> String {
    use num_integer::Integer;
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = (q.numer() * &scale).div_floor(q.denom());
    let (int, frac) = scaled.div_mod_floor(&scale);
    if digits == 0 {
        return int.to_string();
    }
    format!("{}.{:0>width$}", int, frac.to_string(), width = digits)
}

pub fn rational_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        let q = BigRational::new(23.into(), 10.into());
        assert_eq!(decimal(&q, 3), "2.300");
        let q = BigRational::new(1.into(), 3.into());
        assert_eq!(decimal(&q, 4), "0.3333");
    }
}
