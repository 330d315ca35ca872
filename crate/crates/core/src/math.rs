// Thin wrappers so the rest of the crate reads like std float code.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn powf(x: f64, e: f64) -> f64 {
    libm::pow(x, e)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

/// Smallest residual a solver can be expected to certify at an iterate of
/// the given magnitude in double precision.
#[inline]
pub(crate) fn precision_floor(scale: f64) -> f64 {
    64.0 * f64::EPSILON * (1.0 + scale)
}

/// `ceil(x)` as an iteration count, saturating at `cap`.
pub(crate) fn ceil_count(x: f64, cap: u64) -> u64 {
    if !(x > 0.0) {
        return 0;
    }
    let c = ceil(x);
    if c >= cap as f64 {
        cap
    } else {
        c as u64
    }
}
