//! Conversions between the "GHz" frequency convention (rate / 2π) and the
//! angular rad/ns units used internally.

use std::f64::consts::TAU;

/// `f` in GHz (i.e. rate/2π) to rad/ns.
#[inline]
pub fn ghz(f: f64) -> f64 {
    f * TAU
}

/// rad/ns to GHz.
#[inline]
pub fn to_ghz(omega: f64) -> f64 {
    omega / TAU
}
