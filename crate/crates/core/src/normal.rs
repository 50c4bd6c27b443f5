//! Standard normal distribution function via the complementary error function.

use std::f64::consts::FRAC_1_SQRT_2;

/// `Φ(u)`.
pub fn std_normal_cdf(u: f64) -> f64 {
    0.5 * libm::erfc(-u * FRAC_1_SQRT_2)
}

/// `1 − Φ(u)`, accurate in the upper tail.
pub fn std_normal_sf(u: f64) -> f64 {
    0.5 * libm::erfc(u * FRAC_1_SQRT_2)
}
