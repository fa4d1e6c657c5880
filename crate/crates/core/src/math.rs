//! Thin wrappers over `libm` so the crate builds without `std` and, more
//! importantly, so transcendental results do not depend on the platform
//! libm. `sqrt` is IEEE-754 correctly rounded everywhere, so the fast
//! intrinsic and `libm` agree bit for bit and we prefer the intrinsic when
//! `std` is available.

#[inline(always)]
pub(crate) fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.sqrt()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::sqrt(x)
    }
}

#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::fabs(x)
    }
}

#[inline(always)]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline(always)]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline(always)]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline(always)]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline(always)]
pub(crate) fn hypot_sq(slice: &[f64]) -> f64 {
    slice.iter().map(|v| v * v).sum()
}

#[inline(always)]
pub(crate) fn norm2(slice: &[f64]) -> f64 {
    sqrt(hypot_sq(slice))
}
