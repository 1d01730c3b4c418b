//! Exact rational arithmetic for potential tables.
//!
//! Table values, variations, and Birkhoff sums are kept as exact rationals
//! internally (every f64 is a rational, so loading loses nothing) and are
//! rounded to f64 once at the API boundary. Identities that hold by
//! telescoping or cancellation — coboundaries vanishing on periodic
//! orbits, variations of fully determined words being zero — then hold
//! bit-for-bit on the returned f64s instead of up to rounding noise.

use num::rational::BigRational;
use num::traits::ToPrimitive;
use num::Zero;

/// Exact scalar used for potential values.
pub(crate) type Exact = BigRational;

/// Converts a finite f64 to the rational it represents exactly.
pub(crate) fn exact_from_f64(x: f64) -> Option<Exact> {
    BigRational::from_float(x)
}

/// Rounds an exact value to f64.
pub(crate) fn exact_to_f64(x: &Exact) -> f64 {
    x.to_f64().expect("finite rational converts to f64")
}

/// Exact zero.
pub(crate) fn exact_zero() -> Exact {
    Exact::zero()
}
