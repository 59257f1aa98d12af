//! Density and sphere-coverage estimation for membership-oracle sets.
//!
//! The estimators are finite-scale surrogates: ball densities stand in for
//! Banach density, and [`concentric_sphere_scan`] searches for a point whose
//! concentric spheres are all well covered, the configuration that makes a
//! rotated pattern copy land inside the set with positive probability.
//! [`mean_identity_check`] and [`meansq_identity_check`] verify the two
//! moment identities relating sphere coverage `g_r` to set volume and to the
//! overlap kernel.

use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::{kernel_value_radial, surface_area, KernelSpec};
use crate::math;
use crate::oracle::{BallRegion, SetOracle};
use crate::rng::{self, lattice_in_ball, Rng};
use crate::sampling::{Estimate, SamplerConfig, SamplerMode};
use crate::special::ball_volume;

/// Sphere samples per outer point in the nested moment estimators.
pub const INNER_SPHERE_SAMPLES: u64 = 256;

/// Cap on rejection attempts per accepted point when sampling inside an
/// oracle set through its bounding ball.
const REJECTION_CAP_FACTOR: u64 = 10_000;

/// Coverage of one sphere: the estimated fraction of its surface inside the
/// set.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageRecord {
    pub center: Vec<f64>,
    pub radius: f64,
    pub fraction: f64,
    pub std_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureError {
    /// The operation needs a bounded oracle (a bounding hint).
    UnboundedOracle,
    /// The scan grid contains no points.
    EmptyRegion,
    /// The integration region does not contain the inflated bounding hint.
    RegionTooSmall,
}

impl core::fmt::Display for MeasureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MeasureError::UnboundedOracle => {
                write!(f, "operation requires a bounded oracle with a bounding hint")
            }
            MeasureError::EmptyRegion => write!(f, "search grid is empty"),
            MeasureError::RegionTooSmall => write!(
                f,
                "integration region must contain the bounding hint inflated by the radius"
            ),
        }
    }
}

impl core::error::Error for MeasureError {}

/// Estimated fraction of the ball's volume lying in the set.
///
/// Unbiased and deterministic given the seed; the standard error is binomial
/// in Monte Carlo mode and zero for the lattice quadrature.
pub fn ball_density(oracle: &dyn SetOracle, ball: &BallRegion, sampler: &SamplerConfig) -> Estimate {
    match sampler.mode {
        SamplerMode::UniformMonteCarlo => {
            let mut rng = Rng::seeded(sampler.seed);
            let mut x = vec![0.0; ball.dimension()];
            let mut hits = 0u64;
            for _ in 0..sampler.samples {
                rng.in_ball(&ball.center, ball.radius, &mut x);
                if oracle.contains(&x) {
                    hits += 1;
                }
            }
            let n = sampler.samples as f64;
            let p = hits as f64 / n;
            Estimate {
                value: p,
                std_error: math::sqrt(p * (1.0 - p) / n),
            }
        }
        SamplerMode::LatticeGrid => {
            let nodes = lattice_in_ball(&ball.center, ball.radius, sampler.samples);
            if nodes.is_empty() {
                return Estimate::exact(0.0);
            }
            let hits = nodes.iter().filter(|x| oracle.contains(x)).count();
            Estimate::exact(hits as f64 / nodes.len() as f64)
        }
    }
}

/// A scanned ball with its estimated density.
#[derive(Clone, Debug)]
pub struct DensestBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub density: Estimate,
}

/// Scans a cubic grid of centers across the search region and returns the
/// ball of the given radius with the highest estimated density. Ties break
/// to the lexicographically first grid index, so parallel and serial sweeps
/// agree.
pub fn densest_ball_scan(
    oracle: &dyn SetOracle,
    radius: f64,
    search_region: &BallRegion,
    grid_step: f64,
    sampler: &SamplerConfig,
) -> Result<DensestBall, MeasureError> {
    assert!(grid_step > 0.0);
    let centers = grid_in_region(search_region, grid_step);
    if centers.is_empty() {
        return Err(MeasureError::EmptyRegion);
    }
    let mut best: Option<DensestBall> = None;
    for (idx, center) in centers.into_iter().enumerate() {
        let sub = SamplerConfig {
            seed: rng::substream(sampler.seed, idx as u64),
            ..*sampler
        };
        let ball = BallRegion {
            center,
            radius,
        };
        let density = ball_density(oracle, &ball, &sub);
        let better = match &best {
            None => true,
            Some(b) => density.value > b.density.value,
        };
        if better {
            best = Some(DensestBall {
                center: ball.center,
                radius,
                density,
            });
        }
    }
    Ok(best.expect("nonempty grid"))
}

/// Cubic lattice of step `grid_step` covering the region's bounding cube,
/// filtered to the region, in lexicographic index order.
pub fn grid_in_region(region: &BallRegion, grid_step: f64) -> Vec<Vec<f64>> {
    let d = region.dimension();
    let per_axis = (2.0 * region.radius / grid_step) as u64 + 1;
    let mut out = Vec::new();
    let mut idx = vec![0u64; d];
    'outer: loop {
        let mut p = Vec::with_capacity(d);
        for (i, &c) in region.center.iter().enumerate() {
            p.push(c - region.radius + idx[i] as f64 * grid_step);
        }
        if region.contains(&p) {
            out.push(p);
        }
        for i in (0..d).rev() {
            idx[i] += 1;
            if idx[i] < per_axis {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    out
}

/// Estimates the fraction of the sphere `S_radius(center)` covered by the
/// set, by uniform surface sampling (normalised Gaussian directions). In
/// lattice mode, `d = 2` uses equispaced angles; higher dimensions fall back
/// to the seeded Monte Carlo stream.
pub fn sphere_coverage(
    oracle: &dyn SetOracle,
    center: &[f64],
    radius: f64,
    sampler: &SamplerConfig,
) -> CoverageRecord {
    assert!(radius > 0.0);
    let d = center.len();
    if sampler.mode == SamplerMode::LatticeGrid && d == 2 {
        let n = sampler.samples;
        let mut hits = 0u64;
        let mut x = [0.0; 2];
        for j in 0..n {
            let theta = core::f64::consts::TAU * (j as f64 + 0.5) / n as f64;
            x[0] = center[0] + radius * math::cos(theta);
            x[1] = center[1] + radius * math::sin(theta);
            if oracle.contains(&x) {
                hits += 1;
            }
        }
        return CoverageRecord {
            center: center.to_vec(),
            radius,
            fraction: hits as f64 / n as f64,
            std_error: 0.0,
        };
    }
    let mut rng = Rng::seeded(sampler.seed);
    let mut x = vec![0.0; d];
    let mut hits = 0u64;
    for _ in 0..sampler.samples {
        rng.on_sphere(center, radius, &mut x);
        if oracle.contains(&x) {
            hits += 1;
        }
    }
    let n = sampler.samples as f64;
    let p = hits as f64 / n;
    CoverageRecord {
        center: center.to_vec(),
        radius,
        fraction: p,
        std_error: math::sqrt(p * (1.0 - p) / n),
    }
}

/// Two-sided comparison produced by the moment identity checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_std_error: f64,
    pub rhs_std_error: f64,
}

impl IdentityCheck {
    pub fn combined_std_error(&self) -> f64 {
        math::sqrt(self.lhs_std_error * self.lhs_std_error + self.rhs_std_error * self.rhs_std_error)
    }

    /// `|lhs - rhs| <= k` combined standard errors (plus a tiny absolute
    /// floor so exact zero cases compare cleanly).
    pub fn within_sigma(&self, k: f64) -> bool {
        math::abs(self.lhs - self.rhs) <= k * self.combined_std_error() + 1e-12
    }
}

fn require_region(
    oracle: &dyn SetOracle,
    radius: f64,
    region: &BallRegion,
) -> Result<BallRegion, MeasureError> {
    let hint = oracle.bounding_hint().ok_or(MeasureError::UnboundedOracle)?;
    let needed = math::dist(&hint.center, &region.center) + hint.radius + radius;
    if needed > region.radius + 1e-9 {
        return Err(MeasureError::RegionTooSmall);
    }
    Ok(hint)
}

/// Mean identity: `∫ g_r(x) dx = A_r^d · vol(E)` for bounded `E`, where
/// `g_r(x)` is the surface measure of `E` on the sphere `S_r(x)`.
///
/// The left side nests outer integration-region sampling with per-point
/// sphere substreams; the right side estimates `vol(E)` through the bounding
/// hint. Standard errors are combined in quadrature by the caller via
/// [`IdentityCheck`].
pub fn mean_identity_check(
    oracle: &dyn SetOracle,
    radius: f64,
    integration_region: &BallRegion,
    sampler: &SamplerConfig,
) -> Result<IdentityCheck, MeasureError> {
    let hint = require_region(oracle, radius, integration_region)?;
    let d = oracle.dimension() as u32;
    let area = surface_area(KernelSpec::new(d, radius).expect("valid kernel spec"));
    let region_volume = ball_volume(d, integration_region.radius);

    let outer = sampler.samples.max(1);
    let mut rng_outer = Rng::seeded(sampler.seed);
    let mut x = vec![0.0; d as usize];
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for i in 0..outer {
        rng_outer.in_ball(
            &integration_region.center,
            integration_region.radius,
            &mut x,
        );
        let inner = SamplerConfig::monte_carlo(
            rng::substream(sampler.seed, 1 + i),
            INNER_SPHERE_SAMPLES,
        );
        let cov = sphere_coverage(oracle, &x, radius, &inner);
        let y = area * cov.fraction;
        sum += y;
        sumsq += y * y;
    }
    let n = outer as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    let lhs = region_volume * mean;
    let lhs_se = region_volume * math::sqrt(var / n);

    let vol_sampler = SamplerConfig {
        seed: rng::substream(sampler.seed, 0),
        ..*sampler
    };
    let density = ball_density(oracle, &hint, &vol_sampler);
    let hint_volume = ball_volume(d, hint.radius);
    Ok(IdentityCheck {
        lhs,
        rhs: area * hint_volume * density.value,
        lhs_std_error: lhs_se,
        rhs_std_error: area * hint_volume * density.std_error,
    })
}

/// Mean-square identity: `∫ g_r(x)² dx = ∬_{E×E} K_r(y−z) dy dz`.
///
/// The left side uses the unbiased pair-count estimator of the squared
/// coverage (`k(k−1)/(N(N−1))` corrects the inner-variance inflation of a
/// plain square); the right side samples independent point pairs in `E` by
/// rejection through the bounding hint and averages the kernel, resampling
/// the measure-zero singular hits.
pub fn meansq_identity_check(
    oracle: &dyn SetOracle,
    radius: f64,
    integration_region: &BallRegion,
    sampler: &SamplerConfig,
) -> Result<IdentityCheck, MeasureError> {
    let hint = require_region(oracle, radius, integration_region)?;
    let d = oracle.dimension() as u32;
    let spec = KernelSpec::new(d, radius).expect("valid kernel spec");
    let area = surface_area(spec);
    let region_volume = ball_volume(d, integration_region.radius);

    // lhs: nested estimate of ∫ g² with the pair-count correction
    let outer = (sampler.samples / 16).max(1);
    let mut rng_outer = Rng::seeded(sampler.seed);
    let mut x = vec![0.0; d as usize];
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let inner_n = INNER_SPHERE_SAMPLES;
    for i in 0..outer {
        rng_outer.in_ball(
            &integration_region.center,
            integration_region.radius,
            &mut x,
        );
        let mut inner_rng = Rng::seeded(rng::substream(sampler.seed, 1 + i));
        let mut y = vec![0.0; d as usize];
        let mut hits = 0u64;
        for _ in 0..inner_n {
            inner_rng.on_sphere(&x, radius, &mut y);
            if oracle.contains(&y) {
                hits += 1;
            }
        }
        let unbiased_sq =
            (hits * hits.saturating_sub(1)) as f64 / (inner_n * (inner_n - 1)) as f64;
        let v = area * area * unbiased_sq;
        sum += v;
        sumsq += v * v;
    }
    let n = outer as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    let lhs = region_volume * mean;
    let lhs_se = region_volume * math::sqrt(var / n);

    // rhs: vol(E)² times the mean kernel over independent pairs in E
    let vol_sampler = SamplerConfig {
        seed: rng::substream(sampler.seed, 0),
        ..*sampler
    };
    let density = ball_density(oracle, &hint, &vol_sampler);
    let hint_volume = ball_volume(d, hint.radius);
    let set_volume = hint_volume * density.value;
    let set_volume_se = hint_volume * density.std_error;

    if set_volume == 0.0 {
        return Ok(IdentityCheck {
            lhs,
            rhs: 0.0,
            lhs_std_error: lhs_se,
            rhs_std_error: 0.0,
        });
    }

    let pairs = sampler.samples.max(1);
    let mut pair_rng = Rng::seeded(rng::substream(sampler.seed, u64::MAX / 2));
    let mut a = vec![0.0; d as usize];
    let mut b = vec![0.0; d as usize];
    let mut ksum = 0.0;
    let mut ksumsq = 0.0;
    let cap = REJECTION_CAP_FACTOR * pairs;
    let mut attempts = 0u64;
    let mut accepted = 0u64;
    while accepted < pairs && attempts < cap {
        attempts += 1;
        pair_rng.in_ball(&hint.center, hint.radius, &mut a);
        if !oracle.contains(&a) {
            continue;
        }
        let mut partner_found = false;
        while attempts < cap {
            attempts += 1;
            pair_rng.in_ball(&hint.center, hint.radius, &mut b);
            if oracle.contains(&b) {
                partner_found = true;
                break;
            }
        }
        if !partner_found {
            break;
        }
        let value = kernel_value_radial(spec, math::dist(&a, &b));
        if value.is_infinite() {
            continue; // measure-zero singular hit: resample the pair
        }
        let k = value.as_f64();
        ksum += k;
        ksumsq += k * k;
        accepted += 1;
    }
    if accepted == 0 {
        return Ok(IdentityCheck {
            lhs,
            rhs: 0.0,
            lhs_std_error: lhs_se,
            rhs_std_error: 0.0,
        });
    }
    let np = accepted as f64;
    let kmean = ksum / np;
    let kvar = (ksumsq / np - kmean * kmean).max(0.0);
    let kse = math::sqrt(kvar / np);
    let rhs = set_volume * set_volume * kmean;
    // delta method: d(v²k) = 2vk dv + v² dk
    let rhs_se = math::sqrt(
        (2.0 * set_volume * kmean * set_volume_se) * (2.0 * set_volume * kmean * set_volume_se)
            + (set_volume * set_volume * kse) * (set_volume * set_volume * kse),
    );
    Ok(IdentityCheck {
        lhs,
        rhs,
        lhs_std_error: lhs_se,
        rhs_std_error: rhs_se,
    })
}

/// Outcome of [`concentric_sphere_scan`]: a point whose spheres are all
/// sufficiently covered, or a report of the best candidate seen.
#[derive(Clone, Debug)]
pub enum ScanOutcome {
    Found(Vec<f64>),
    Failed(ScanReport),
}

impl ScanOutcome {
    pub fn found(&self) -> Option<&[f64]> {
        match self {
            ScanOutcome::Found(x) => Some(x),
            ScanOutcome::Failed(_) => None,
        }
    }
}

/// Best-effort summary when no candidate passes.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub best_candidate: Option<Vec<f64>>,
    pub best_min_coverage: f64,
    pub candidates_tested: usize,
}

/// Walks the candidate list and returns the first member point of the set
/// whose spheres at every requested radius have coverage above `rho_prime`.
pub fn concentric_sphere_scan(
    oracle: &dyn SetOracle,
    center_candidates: &[Vec<f64>],
    radii: &[f64],
    rho_prime: f64,
    sampler: &SamplerConfig,
) -> ScanOutcome {
    assert!(!radii.is_empty() && radii.iter().all(|&r| r > 0.0));
    assert!((0.0..1.0).contains(&rho_prime));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (i, candidate) in center_candidates.iter().enumerate() {
        if !oracle.contains(candidate) {
            continue;
        }
        let mut min_cov = f64::INFINITY;
        for (j, &radius) in radii.iter().enumerate() {
            let sub = SamplerConfig::monte_carlo(
                rng::substream(sampler.seed, (i as u64) << 16 | j as u64),
                sampler.samples,
            );
            let cov = sphere_coverage(oracle, candidate, radius, &sub);
            min_cov = min_cov.min(cov.fraction);
            if min_cov <= rho_prime {
                break;
            }
        }
        if min_cov > rho_prime {
            return ScanOutcome::Found(candidate.clone());
        }
        let improves = best.as_ref().map(|(_, m)| min_cov > *m).unwrap_or(true);
        if improves {
            best = Some((candidate.clone(), min_cov));
        }
    }
    let (best_candidate, best_min_coverage) = match best {
        Some((c, m)) => (Some(c), m),
        None => (None, f64::NEG_INFINITY),
    };
    ScanOutcome::Failed(ScanReport {
        best_candidate,
        best_min_coverage,
        candidates_tested: center_candidates.len(),
    })
}
