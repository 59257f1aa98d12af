//! Gamma values at half-integer arguments and derived ball geometry.
//!
//! Only `Γ(k/2)` for positive integer `k` ever appears here, so the gamma
//! function reduces to the exact recursion seeded by `Γ(1/2) = √π` and
//! `Γ(1) = 1`; no approximation error enters.

use crate::math;

/// `Γ(two_x / 2)` for `two_x >= 1`, by the recursion `Γ(x+1) = x Γ(x)`.
pub fn gamma_half(two_x: u32) -> f64 {
    assert!(two_x >= 1, "gamma_half needs a positive half-integer");
    match two_x {
        1 => math::sqrt(core::f64::consts::PI),
        2 => 1.0,
        _ => (two_x as f64 / 2.0 - 1.0) * gamma_half(two_x - 2),
    }
}

/// Surface area of the sphere of radius `r` bounding a ball in `R^d`:
/// `d r^(d-1) π^(d/2) / Γ(d/2 + 1)`.
pub fn sphere_surface_area(dimension: u32, radius: f64) -> f64 {
    assert!(dimension >= 1);
    let d = dimension as f64;
    d * math::powi(radius, dimension - 1) * math::powf(core::f64::consts::PI, d / 2.0)
        / gamma_half(dimension + 2)
}

/// Volume of the ball of radius `r` in `R^d`: `π^(d/2) r^d / Γ(d/2 + 1)`.
pub fn ball_volume(dimension: u32, radius: f64) -> f64 {
    assert!(dimension >= 1);
    let d = dimension as f64;
    math::powf(core::f64::consts::PI, d / 2.0) * math::powi(radius, dimension)
        / gamma_half(dimension + 2)
}
