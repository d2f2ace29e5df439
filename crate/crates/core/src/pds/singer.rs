use crate::arith::prime_power;
use crate::gf::{CubicExtension, GfField};

use super::{modulus_for_order, PdsError, PerfectDifferenceSet};

/// Largest order accepted by [`singer_construct`].
pub const MAX_SINGER_ORDER: u64 = 32;

/// Singer difference set of prime-power order `q`.
///
/// With `θ` a primitive element of `GF(q³)`, the points of the projective
/// plane `PG(2, q)` are the powers `θ^i`, `0 ≤ i < q² + q + 1`, up to
/// `GF(q)^*` scalars. The line `span_GF(q){1, θ}` contains `q + 1` of them;
/// their exponents form the set.
pub fn singer_construct(q: u64) -> Result<PerfectDifferenceSet, PdsError> {
    let (p, e) = prime_power(q).ok_or(PdsError::NotPrimePower(q))?;
    if q > MAX_SINGER_ORDER {
        return Err(PdsError::OrderTooLarge {
            q,
            max: MAX_SINGER_ORDER,
        });
    }
    let ext = CubicExtension::new(GfField::new(p, e)?)?;
    let theta = ext.primitive_element();
    let m = modulus_for_order(q).expect("small order");

    let mut residues = Vec::with_capacity(q as usize + 1);
    let mut power = ext.one();
    for i in 0..m {
        if ext.solve_in_span(theta, power).is_some() {
            residues.push(i);
        }
        power = ext.mul(power, theta);
    }
    PerfectDifferenceSet::from_unsigned(q, &residues)
}
