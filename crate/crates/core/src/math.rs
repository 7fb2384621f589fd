// Float helpers that `core` does not provide without std.

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Euclidean remainder, always in `[0, modulus)`.
pub(crate) fn wrap(x: f64, modulus: f64) -> f64 {
    let r = x - modulus * floor(x / modulus);
    // r can round up to exactly `modulus` for tiny negative x
    if r >= modulus {
        0.0
    } else {
        r
    }
}
