//! Patterns, Haar-random rotations, and witness-verified copy searches.
//!
//! A set of density above `(n-2)/(n-1)` admits, around any point whose
//! concentric spheres are all covered beyond that threshold, a rotation
//! placing all `n` pattern points inside the set — the measure of good
//! rotations is at least `1 - Σ(1 - f_i)` by the union bound. The searches
//! here turn that into Las Vegas procedures: candidate centers come from a
//! density scan, rotations are sampled from Haar measure, and every returned
//! witness is re-verified point by point against the oracle before being
//! reported.

use alloc::vec;
use alloc::vec::Vec;

use crate::constructions::epsilon_of_n;
use crate::math;
use crate::measure::{
    concentric_sphere_scan, densest_ball_scan, grid_in_region, sphere_coverage, ScanOutcome,
};
use crate::oracle::{BallRegion, SetOracle};
use crate::rng::{self, Rng};
use crate::sampling::{Estimate, SamplerConfig};

/// Sphere-coverage samples used by the similar-copy scan.
const COVERAGE_SAMPLES: u64 = 2048;

/// A finite point configuration with at least two distinct points.
#[derive(Clone, Debug)]
pub struct Pattern {
    points: Vec<Vec<f64>>,
    sep: f64,
    diam: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternError {
    /// Fewer than two points, or two points coincide.
    Degenerate,
    DimensionMismatch,
    /// The anchor point is not a member of the set.
    AnchorNotInSet,
}

impl core::fmt::Display for PatternError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PatternError::Degenerate => write!(f, "pattern needs at least two distinct points"),
            PatternError::DimensionMismatch => write!(f, "points have mixed dimensions"),
            PatternError::AnchorNotInSet => write!(f, "anchor point is outside the set"),
        }
    }
}

impl core::error::Error for PatternError {}

impl Pattern {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Pattern, PatternError> {
        if points.len() < 2 {
            return Err(PatternError::Degenerate);
        }
        let d = points[0].len();
        if points.iter().any(|p| p.len() != d) {
            return Err(PatternError::DimensionMismatch);
        }
        let (mut sep, mut diam) = (f64::INFINITY, 0.0f64);
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let dist = math::dist(&points[i], &points[j]);
                sep = sep.min(dist);
                diam = diam.max(dist);
            }
        }
        if sep == 0.0 {
            return Err(PatternError::Degenerate);
        }
        Ok(Pattern { points, sep, diam })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    /// Minimum pairwise separation.
    pub fn sep(&self) -> f64 {
        self.sep
    }

    /// Maximum pairwise distance.
    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn scaled(&self, factor: f64) -> Pattern {
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|&v| factor * v).collect())
            .collect();
        Pattern::new(points).expect("scaling keeps points distinct")
    }

    /// An equilateral triangle with the given side, in the plane.
    pub fn equilateral_triangle(side: f64) -> Pattern {
        Pattern::new(vec![
            vec![0.0, 0.0],
            vec![side, 0.0],
            vec![side / 2.0, side * math::sqrt(3.0) / 2.0],
        ])
        .expect("triangle is nondegenerate")
    }

    /// `count` collinear points spaced `spacing` apart along the first axis.
    pub fn collinear(dimension: usize, count: usize, spacing: f64) -> Pattern {
        let points = (0..count)
            .map(|k| {
                let mut p = vec![0.0; dimension];
                p[0] = k as f64 * spacing;
                p
            })
            .collect();
        Pattern::new(points).expect("spaced points are distinct")
    }
}

/// `(sep, diam)` of a pattern.
pub fn pattern_stats(pattern: &Pattern) -> (f64, f64) {
    (pattern.sep, pattern.diam)
}

#[cfg(feature = "serde")]
impl serde::Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Pattern", 2)?;
        s.serialize_field("dimension", &self.dimension())?;
        s.serialize_field("points", &self.points)?;
        s.end()
    }
}

/// A rotation matrix in row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl RotationMatrix {
    pub fn identity(dim: usize) -> RotationMatrix {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        RotationMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.dim)
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.entries[i * self.dim..(i + 1) * self.dim]
                .iter()
                .zip(v)
                .map(|(m, x)| m * x)
                .sum();
        }
    }

    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply(v, &mut out);
        out
    }

    pub fn determinant(&self) -> f64 {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&i, &j| {
                    math::abs(a[i * n + col]).total_cmp(&math::abs(a[j * n + col]))
                })
                .unwrap();
            if a[pivot_row * n + col] == 0.0 {
                return 0.0;
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(pivot_row * n + k, col * n + k);
                }
                det = -det;
            }
            let pivot = a[col * n + col];
            det *= pivot;
            for row in col + 1..n {
                let factor = a[row * n + col] / pivot;
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
        det
    }

    /// Max deviation of `QᵀQ` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n)
                    .map(|k| self.entries[k * n + i] * self.entries[k * n + j])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(math::abs(dot - target));
            }
        }
        worst
    }

    pub fn is_special_orthogonal(&self, tol: f64) -> bool {
        self.orthogonality_defect() <= tol && math::abs(self.determinant() - 1.0) <= tol
    }
}

/// Haar-distributed rotation in `SO(d)`: Gram-Schmidt orthonormalisation of
/// a Gaussian matrix (positive-diagonal convention), with the last column
/// flipped when the determinant lands at -1. Deterministic given the seed.
pub fn random_rotation(dim: usize, seed: u64) -> RotationMatrix {
    assert!(dim >= 2);
    let mut rng = Rng::seeded(seed);
    loop {
        // columns of a Gaussian matrix, orthonormalised in order
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut degenerate = false;
        for _ in 0..dim {
            let mut col: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
            // two passes of projection for numerical orthogonality
            for _ in 0..2 {
                for q in &cols {
                    let dot: f64 = col.iter().zip(q).map(|(a, b)| a * b).sum();
                    for (c, &qi) in col.iter_mut().zip(q) {
                        *c -= dot * qi;
                    }
                }
            }
            let norm = math::norm(&col);
            if norm < 1e-12 {
                degenerate = true;
                break;
            }
            for c in &mut col {
                *c /= norm;
            }
            cols.push(col);
        }
        if degenerate {
            continue;
        }
        let mut entries = vec![0.0; dim * dim];
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                entries[i * dim + j] = v;
            }
        }
        let mut q = RotationMatrix { dim, entries };
        if q.determinant() < 0.0 {
            for i in 0..dim {
                q.entries[i * dim + dim - 1] = -q.entries[i * dim + dim - 1];
            }
        }
        return q;
    }
}

/// A similarity: `x ↦ scale · Q x + translation`.
#[derive(Clone, Debug)]
pub struct Placement {
    pub scale: f64,
    pub rotation: RotationMatrix,
    pub translation: Vec<f64>,
}

impl Placement {
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut out = self.rotation.apply_vec(p);
        for (o, t) in out.iter_mut().zip(&self.translation) {
            *o = self.scale * *o + t;
        }
        out
    }

    /// Rotation matrix sanity: orthogonal with determinant +1 within `1e-10`.
    pub fn validate(&self) -> bool {
        self.scale > 0.0 && self.rotation.is_special_orthogonal(1e-10)
    }

    /// Membership re-check of every transformed pattern point.
    pub fn verify(&self, oracle: &dyn SetOracle, pattern: &Pattern) -> bool {
        pattern.points().iter().all(|p| oracle.contains(&self.apply(p)))
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Placement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<&[f64]> = self.rotation.rows().collect();
        let mut s = serializer.serialize_struct("Placement", 3)?;
        s.serialize_field("scale", &self.scale)?;
        s.serialize_field("rotation", &rows)?;
        s.serialize_field("translation", &self.translation)?;
        s.end()
    }
}

/// Search budgets and regions for the copy finders.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub rotation_samples: u64,
    pub translation_grid_step: f64,
    pub candidate_region: BallRegion,
    pub seed: u64,
}

/// Estimated Haar measure of rotations placing the whole pattern in the set,
/// against the union-bound guarantee from sphere coverages.
#[derive(Clone, Debug)]
pub struct RotationMeasure {
    pub estimate: Estimate,
    pub lower_bound: Estimate,
}

/// Rotates the pattern about its first point `samples` times and counts full
/// membership, alongside the coverage-based lower bound
/// `1 - Σ_i (1 - f_i)`.
pub fn rotation_success_measure(
    oracle: &dyn SetOracle,
    x0: &[f64],
    pattern: &Pattern,
    samples: u64,
    seed: u64,
) -> Result<RotationMeasure, PatternError> {
    if !oracle.contains(x0) {
        return Err(PatternError::AnchorNotInSet);
    }
    if pattern.dimension() != x0.len() {
        return Err(PatternError::DimensionMismatch);
    }
    let d = x0.len();
    let anchor = &pattern.points()[0];
    let offsets: Vec<Vec<f64>> = pattern.points()[1..]
        .iter()
        .map(|p| p.iter().zip(anchor).map(|(a, b)| a - b).collect())
        .collect();

    let mut hits = 0u64;
    let mut rotated = vec![0.0; d];
    for s in 0..samples {
        let q = random_rotation(d, rng::substream(seed, s));
        let ok = offsets.iter().all(|offset| {
            q.apply(offset, &mut rotated);
            for (r, &c) in rotated.iter_mut().zip(x0) {
                *r += c;
            }
            oracle.contains(&rotated)
        });
        if ok {
            hits += 1;
        }
    }
    let n = samples as f64;
    let p = hits as f64 / n;
    let estimate = Estimate {
        value: p,
        std_error: math::sqrt(p * (1.0 - p) / n),
    };

    let mut shortfall = 0.0;
    let mut var = 0.0;
    for (i, offset) in offsets.iter().enumerate() {
        let cfg = SamplerConfig::monte_carlo(rng::substream(seed, u64::MAX - i as u64), samples);
        let cov = sphere_coverage(oracle, x0, math::norm(offset), &cfg);
        shortfall += 1.0 - cov.fraction;
        var += cov.std_error * cov.std_error;
    }
    Ok(RotationMeasure {
        estimate,
        lower_bound: Estimate {
            value: 1.0 - shortfall,
            std_error: math::sqrt(var),
        },
    })
}

/// Searches for `z` with `z + r·P ⊆ E`: locates a dense ball, then sweeps a
/// translation grid in lexicographic order, returning the first verified
/// offset.
pub fn find_translated_copy(
    oracle: &dyn SetOracle,
    pattern: &Pattern,
    r: f64,
    config: &SearchConfig,
) -> Option<Vec<f64>> {
    assert!(r > 0.0);
    let region = &config.candidate_region;
    let reach = r * pattern.diam();
    let scan_radius = (reach).min(region.radius / 2.0).max(region.radius / 16.0);
    let coarse_step = scan_radius / 2.0;
    let dense = densest_ball_scan(
        oracle,
        scan_radius,
        region,
        coarse_step,
        &SamplerConfig::monte_carlo(rng::substream(config.seed, 0), 2000),
    )
    .ok()?;

    let sweep = BallRegion {
        center: dense.center,
        radius: scan_radius + reach,
    };
    let scaled: Vec<Vec<f64>> = pattern
        .points()
        .iter()
        .map(|p| p.iter().map(|&v| r * v).collect())
        .collect();
    let mut candidate = vec![0.0; pattern.dimension()];
    for z in grid_in_region(&sweep, config.translation_grid_step) {
        let ok = scaled.iter().all(|p| {
            for ((c, &pv), &zv) in candidate.iter_mut().zip(p).zip(&z) {
                *c = pv + zv;
            }
            oracle.contains(&candidate)
        });
        if ok {
            return Some(z);
        }
    }
    None
}

/// Searches for a verified similar copy `r·Q(P) + z ⊆ E`.
///
/// Mirrors the existence argument: find a center whose spheres at the
/// pattern radii are covered beyond `(n-2)/(n-1)`, then sample rotations
/// about it until the whole pattern lands inside. The identity rotation is
/// tried first, and every returned placement is re-verified through
/// [`Placement::verify`].
pub fn find_similar_copy(
    oracle: &dyn SetOracle,
    pattern: &Pattern,
    r: f64,
    config: &SearchConfig,
) -> Option<Placement> {
    assert!(r > 0.0);
    let n = pattern.len();
    let d = pattern.dimension();
    let rho_prime = (n as f64 - 2.0) / (n as f64 - 1.0);
    let anchor = &pattern.points()[0];
    let radii: Vec<f64> = pattern.points()[1..]
        .iter()
        .map(|p| r * math::dist(p, anchor))
        .collect();

    let region = &config.candidate_region;
    let scan_radius = (r * pattern.sep())
        .min(region.radius / 2.0)
        .max(region.radius / 16.0);
    let dense = densest_ball_scan(
        oracle,
        scan_radius,
        region,
        scan_radius / 2.0,
        &SamplerConfig::monte_carlo(rng::substream(config.seed, 0), 2000),
    )
    .ok()?;

    let center_step = r * pattern.sep() / 10.0;
    let candidate_ball = BallRegion {
        center: dense.center,
        radius: scan_radius,
    };
    let mut candidates = grid_in_region(&candidate_ball, center_step);
    // fallback sweep over the whole region, coarser
    candidates.extend(grid_in_region(region, (4.0 * center_step).max(region.radius / 24.0)));

    let scan = concentric_sphere_scan(
        oracle,
        &candidates,
        &radii,
        rho_prime,
        &SamplerConfig::monte_carlo(rng::substream(config.seed, 1), COVERAGE_SAMPLES),
    );
    let x0 = match scan {
        ScanOutcome::Found(x) => x,
        ScanOutcome::Failed(_) => return None,
    };

    let attempt = |q: RotationMatrix| -> Option<Placement> {
        let rotated_anchor = q.apply_vec(anchor);
        let translation: Vec<f64> = x0
            .iter()
            .zip(&rotated_anchor)
            .map(|(c, ra)| c - r * ra)
            .collect();
        let placement = Placement {
            scale: r,
            rotation: q,
            translation,
        };
        (placement.validate() && placement.verify(oracle, pattern)).then_some(placement)
    };

    if let Some(found) = attempt(RotationMatrix::identity(d)) {
        return Some(found);
    }
    for s in 0..config.rotation_samples {
        let q = random_rotation(d, rng::substream(config.seed, 2 + s));
        if let Some(found) = attempt(q) {
            return Some(found);
        }
    }
    None
}

/// The density sandwich for guaranteed similar copies of `n`-point patterns:
/// `max(0, 1 - 10 log n / n^{1/5}) <= ρ_min <= 1 - 1/(n-1)`.
pub fn rho_min_bounds(n: u64) -> (f64, f64) {
    assert!(n >= 2);
    let lower = (1.0 - epsilon_of_n(n).value).max(0.0);
    let upper = 1.0 - 1.0 / (n as f64 - 1.0);
    (lower, upper)
}
