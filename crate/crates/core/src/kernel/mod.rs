//! Certified arithmetic on real powers `m^c` for rational `c`.
//!
//! Everything here is exact or enclosure-based: floors come with an integer
//! certificate, fractional parts with a closed rational interval whose width
//! is controlled by an adaptive [`Precision`].

mod exponent;
pub mod identities;
mod interval;
mod power;

pub use exponent::{ExponentC, Q64};
pub(crate) use exponent::ratio_f64;
pub use interval::{Interval, Location, Window};
pub use power::{
    certify_floor, check_taylor_remainder, floor_pow, floor_value, floor_value_big, floor_value_small,
    frac_scaled, gamma_coeff, pow_enclosure, taylor_expand, FloorPower, FracEnclosure, Precision,
    RemainderCheck, TaylorCoefficients, TaylorExpansion,
};
pub(crate) use power::{bits_for_width, gamma_any};
