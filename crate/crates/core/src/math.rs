//! Float math routed through `std` or `libm`, depending on features.
//!
//! `core` provides no transcendental functions, so every module calls these
//! shims instead of inherent `f64` methods.

macro_rules! shim {
    ($($name:ident => $libm_name:ident),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub fn $name(x: f64) -> f64 {
                f64::$name(x)
            }
            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub fn $name(x: f64) -> f64 {
                libm::$libm_name(x)
            }
        )*
    };
}

shim!(
    sqrt => sqrt,
    ln => log,
    sin => sin,
    cos => cos,
    floor => floor,
    round => round,
    acos => acos,
);

#[cfg(feature = "std")]
#[inline(always)]
pub fn abs(x: f64) -> f64 {
    f64::abs(x)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub fn powf(x: f64, y: f64) -> f64 {
    f64::powf(x, y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Fused multiply-add `a * b + c` with a single rounding.
#[cfg(feature = "std")]
#[inline(always)]
pub fn fma(a: f64, b: f64, c: f64) -> f64 {
    f64::mul_add(a, b, c)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn fma(a: f64, b: f64, c: f64) -> f64 {
    libm::fma(a, b, c)
}

/// Integer power by repeated multiplication; exact for small exponents.
#[inline]
pub fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - floor(x);
    // floor(x) + 1 == x can round up to exactly 1.0
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance from `x` to the nearest integer, in `[0, 1/2]`.
#[inline]
pub fn dist_to_integers(x: f64) -> f64 {
    abs(x - round(x))
}

/// Euclidean norm of a point.
#[inline]
pub fn norm(x: &[f64]) -> f64 {
    sqrt(x.iter().map(|v| v * v).sum())
}

/// Euclidean distance between two points of equal dimension.
#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sqrt(a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_naive() {
        assert_eq!(powi(3.0, 0), 1.0);
        assert_eq!(powi(3.0, 1), 3.0);
        assert_eq!(powi(2.0, 10), 1024.0);
        assert_eq!(powi(1.5, 3), 3.375);
    }

    #[test]
    fn frac_stays_below_one() {
        assert_eq!(frac(2.25), 0.25);
        assert_eq!(frac(-0.25), 0.75);
        let tricky = 1.0 - f64::EPSILON / 4.0;
        assert!(frac(tricky) < 1.0);
        assert_eq!(frac(5.0), 0.0);
    }

    #[test]
    fn dist_to_integers_examples() {
        assert_eq!(dist_to_integers(7.25), 0.25);
        assert_eq!(dist_to_integers(0.5), 0.5);
        assert_eq!(dist_to_integers(-1.9), 0.10000000000000009);
    }
}
