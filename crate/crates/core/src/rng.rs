//! Seeded pseudo-random generation and geometric sampling primitives.
//!
//! xoshiro256++ seeded through splitmix64, written out here so that streams
//! never change underneath recorded fixtures. Substreams for nested or
//! batched estimators come from [`substream`], which decorrelates a base seed
//! and a stream index.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic seed for stream `index` derived from `seed`.
pub fn substream(seed: u64, index: u64) -> u64 {
    let mut s = seed ^ index.wrapping_mul(0xA0761D6478BD642F);
    let a = splitmix64(&mut s);
    let b = splitmix64(&mut s);
    a ^ b.rotate_left(32)
}

/// xoshiro256++ generator.
#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn seeded(seed: u64) -> Rng {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut sm);
        }
        // the all-zero state is invalid
        if s == [0, 0, 0, 0] {
            s[0] = 1;
        }
        Rng {
            s,
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller, caching the spare draw.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u1 = self.next_f64();
            if u1 == 0.0 {
                continue;
            }
            let u2 = self.next_f64();
            let r = math::sqrt(-2.0 * math::ln(u1));
            let theta = core::f64::consts::TAU * u2;
            self.spare_normal = Some(r * math::sin(theta));
            return r * math::cos(theta);
        }
    }

    /// Uniform direction on the unit sphere, written into `out`.
    pub fn unit_vector(&mut self, out: &mut [f64]) {
        loop {
            for v in out.iter_mut() {
                *v = self.normal();
            }
            let n = math::norm(out);
            if n > 1e-12 {
                for v in out.iter_mut() {
                    *v /= n;
                }
                return;
            }
        }
    }

    /// Uniform point on the sphere of the given center and radius.
    pub fn on_sphere(&mut self, center: &[f64], radius: f64, out: &mut [f64]) {
        self.unit_vector(out);
        for (o, c) in out.iter_mut().zip(center) {
            *o = c + radius * *o;
        }
    }

    /// Uniform point in the closed ball of the given center and radius.
    pub fn in_ball(&mut self, center: &[f64], radius: f64, out: &mut [f64]) {
        let d = out.len();
        self.unit_vector(out);
        let rho = radius * math::powf(self.next_f64(), 1.0 / d as f64);
        for (o, c) in out.iter_mut().zip(center) {
            *o = c + rho * *o;
        }
    }

    /// Uniform point in the shell `r_inner <= |x - center| <= r_outer`.
    pub fn in_shell(&mut self, center: &[f64], r_inner: f64, r_outer: f64, out: &mut [f64]) {
        let d = out.len() as u32;
        self.unit_vector(out);
        let a = math::powi(r_inner, d);
        let b = math::powi(r_outer, d);
        let rho = math::powf(a + (b - a) * self.next_f64(), 1.0 / d as f64);
        for (o, c) in out.iter_mut().zip(center) {
            *o = c + rho * *o;
        }
    }
}

/// Centered cubic lattice of roughly `target` nodes covering the cube that
/// bounds the ball, filtered to the ball itself.
pub fn lattice_in_ball(center: &[f64], radius: f64, target: u64) -> Vec<Vec<f64>> {
    let d = center.len();
    let per_axis = math::powf(target as f64, 1.0 / d as f64).ceil_to_u64().max(1);
    let step = 2.0 * radius / per_axis as f64;
    let mut points = Vec::new();
    let mut idx = vec![0u64; d];
    'outer: loop {
        let mut p = Vec::with_capacity(d);
        for (&i, &c) in idx.iter().zip(center) {
            p.push(c - radius + (i as f64 + 0.5) * step);
        }
        if math::dist(&p, center) <= radius {
            points.push(p);
        }
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < per_axis {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    points
}

trait CeilToU64 {
    fn ceil_to_u64(self) -> u64;
}

impl CeilToU64 for f64 {
    fn ceil_to_u64(self) -> u64 {
        let f = math::floor(self);
        if f == self {
            f as u64
        } else {
            f as u64 + 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let mut a = Rng::seeded(42);
        let mut b = Rng::seeded(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn substreams_differ() {
        assert_ne!(substream(42, 0), substream(42, 1));
        assert_ne!(substream(42, 0), substream(43, 0));
    }

    #[test]
    fn uniform_mean_is_half() {
        let mut rng = Rng::seeded(7);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| rng.next_f64()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn normals_standardized() {
        let mut rng = Rng::seeded(9);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let z = rng.normal();
            sum += z;
            sumsq += z * z;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn shell_points_land_in_shell() {
        let mut rng = Rng::seeded(3);
        let center = [1.0, -2.0, 0.5];
        let mut p = [0.0; 3];
        for _ in 0..1000 {
            rng.in_shell(&center, 2.0, 2.5, &mut p);
            let r = math::dist(&p, &center);
            assert!((2.0..=2.5000000001).contains(&r), "radius {r}");
        }
    }

    #[test]
    fn lattice_fills_ball() {
        let pts = lattice_in_ball(&[0.0, 0.0], 1.0, 1000);
        // about pi/4 of the bounding square
        assert!(pts.len() > 700 && pts.len() < 850, "{}", pts.len());
        for p in &pts {
            assert!(math::norm(p) <= 1.0);
        }
    }
}
