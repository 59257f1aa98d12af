//! Minimal double-double arithmetic.
//!
//! A value is stored as an unevaluated sum `hi + lo` of two `f64` with
//! `|lo| <= ulp(hi)/2`, giving roughly 32 significant decimal digits. This is
//! enough to make mod-1 reductions of `r^2 k^2` meaningful at `k ~ 10^6`
//! (plain `f64` loses everything past `k ~ 10^7` to cancellation) and to make
//! the sorted-point discrepancy formulas return the correctly rounded `f64`
//! of the exact real value, so that independently coded evaluations agree
//! bitwise.

use crate::math;

/// Error-free sum: returns `(s, e)` with `s + e == a + b` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `two_sum` when `|a| >= |b|` is known.
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via fused multiply-add.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = math::fma(a, b, -p);
    (p, e)
}

/// Unevaluated sum of two doubles, `hi` carrying the leading bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Correctly rounded quotient of two exactly representable integers.
    #[inline]
    pub fn from_ratio(num: u64, den: u64) -> Dd {
        debug_assert!(num < (1 << 53) && den < (1 << 53) && den > 0);
        let a = num as f64;
        let b = den as f64;
        let q = a / b;
        // residual a - q*b is exact in one fma
        let r = math::fma(-q, b, a);
        Dd::new(q, r / b)
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        self + Dd::from_f64(x)
    }

    #[inline]
    pub fn sub_f64(self, x: f64) -> Dd {
        self + Dd { hi: -x, lo: 0.0 }
    }

    /// Product with a plain double.
    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let e = e + self.lo * x;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Fractional part in `[0, 1)` as a double-double value.
    ///
    /// `hi - floor(hi)` is exact (Sterbenz), so the only rounding is the
    /// final renormalisation against `lo`. A value just below an integer may
    /// come back as `{hi: 1.0, lo: < 0}`; that pair still represents a
    /// number in `[0, 1)`.
    #[inline]
    pub fn frac(self) -> Dd {
        let f = self.hi - math::floor(self.hi);
        let mut r = Dd::new(f, self.lo);
        let one = Dd::from_f64(1.0);
        while r.lt(Dd::ZERO) {
            r = r.add_f64(1.0);
        }
        while !r.lt(one) {
            r = r.sub_f64(1.0);
        }
        r
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn lt(self, other: Dd) -> bool {
        self.hi < other.hi || (self.hi == other.hi && self.lo < other.lo)
    }

    #[inline]
    pub fn max(self, other: Dd) -> Dd {
        if self.lt(other) {
            other
        } else {
            self
        }
    }

    #[inline]
    pub fn min(self, other: Dd) -> Dd {
        if other.lt(self) {
            other
        } else {
            self
        }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            Dd {
                hi: -self.hi,
                lo: -self.lo,
            }
        } else {
            self
        }
    }
}

impl core::ops::Add for Dd {
    type Output = Dd;

    #[inline]
    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl core::ops::Sub for Dd {
    type Output = Dd;

    #[inline]
    fn sub(self, other: Dd) -> Dd {
        self + Dd {
            hi: -other.hi,
            lo: -other.lo,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_error_free() {
        let a = 1.0e16;
        let b = 2.0 - 1.0e-8;
        let (s, e) = two_sum(a, b);
        // s + e reproduces what f64 alone cannot
        assert_eq!(s, 1.0000000000000002e16);
        assert!(e != 0.0);
    }

    #[test]
    fn ratio_is_correctly_rounded() {
        let d = Dd::from_ratio(1, 3);
        assert_eq!(d.hi, 1.0 / 3.0);
        // residual matches 1/3 - nearest(1/3) ≈ +1.85e-17
        assert!((d.lo - 1.850371707708594e-17).abs() < 1e-30, "{}", d.lo);
    }

    #[test]
    fn frac_handles_large_values() {
        // 2^40 + 0.3125 is exactly representable
        let big = Dd::from_f64(1099511627776.3125);
        let f = big.frac();
        assert_eq!(f.hi, 0.3125);
        assert_eq!(f.lo, 0.0);
    }

    #[test]
    fn frac_carries_negative_lo() {
        // 5 - 1e-20 has fractional part 1 - 1e-20, representable only as
        // {1.0, -1e-20}
        let x = Dd::new(5.0, -1e-20);
        let f = x.frac();
        assert!(f.lt(Dd::from_f64(1.0)));
        assert_eq!(f.hi, 1.0);
        assert_eq!(f.lo, -1e-20);
    }

    #[test]
    fn mul_precision() {
        // (1/3) * 3 = 1 to double-double precision
        let third = Dd::from_ratio(1, 3);
        let one = third.mul_f64(3.0);
        assert!((one.to_f64() - 1.0).abs() < 1e-31);
    }
}
