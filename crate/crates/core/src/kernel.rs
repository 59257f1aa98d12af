//! The thin-annulus overlap kernel on `R^d` and its integral identities.
//!
//! For a radius `r` sphere in `R^d`, the normalised overlap volume of two
//! annuli of thickness `δ` centred at distance `v` apart converges (as
//! `δ → 0`) to a kernel `K_r(v)` that depends on `v` only through `|v|`:
//! a closed form with an integrable singularity at `|v| = 0` and `|v| = 2r`,
//! identically zero beyond `2r`, and with total integral equal to the squared
//! sphere surface area. This module evaluates the kernel, estimates annulus
//! overlaps directly (Monte Carlo or deterministic conditional quadrature),
//! verifies the integral identity by adaptive radial quadrature, and houses
//! the Chebyshev bound used to control how far a nonnegative function strays
//! from its mean.

use alloc::vec::Vec;

use crate::math;
use crate::rng::{self, Rng};
use crate::sampling::{Estimate, SamplerConfig, SamplerMode};
use crate::special::{ball_volume, gamma_half, sphere_surface_area};

/// Absolute tolerance on `|v|` for detecting the singular cases `v = 0` and
/// `|v| = 2r`; the infinities are measure-zero and matter only for reporting.
pub const SINGULARITY_TOLERANCE: f64 = 1e-12;

/// Dimension and sphere radius parameterising the kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub dimension: u32,
    pub radius: f64,
}

impl KernelSpec {
    pub fn new(dimension: u32, radius: f64) -> Result<KernelSpec, KernelError> {
        if dimension < 2 {
            return Err(KernelError::InvalidSpec("dimension must be at least 2"));
        }
        if radius.is_nan() || radius <= 0.0 {
            return Err(KernelError::InvalidSpec("radius must be positive"));
        }
        Ok(KernelSpec { dimension, radius })
    }
}

/// A thin annulus: inner radius `kernel.radius`, thickness `thickness`,
/// centred at `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusSpec {
    pub kernel: KernelSpec,
    pub thickness: f64,
    pub center: Vec<f64>,
}

impl AnnulusSpec {
    pub fn new(kernel: KernelSpec, thickness: f64, center: Vec<f64>) -> Result<AnnulusSpec, KernelError> {
        if thickness.is_nan() || thickness <= 0.0 || thickness >= kernel.radius {
            return Err(KernelError::InvalidSpec(
                "thickness must lie in (0, radius) for the thin-annulus regime",
            ));
        }
        if center.len() != kernel.dimension as usize {
            return Err(KernelError::InvalidSpec("center dimension mismatch"));
        }
        Ok(AnnulusSpec {
            kernel,
            thickness,
            center,
        })
    }

    /// Exact Lebesgue volume of the annulus (ball-volume difference).
    pub fn volume(&self) -> f64 {
        let d = self.kernel.dimension;
        ball_volume(d, self.kernel.radius + self.thickness) - ball_volume(d, self.kernel.radius)
    }
}

/// A kernel evaluation: finite nonnegative, or the singular `+∞` cases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedValue {
    Finite(f64),
    PositiveInfinity,
}

impl ExtendedValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedValue::PositiveInfinity)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            ExtendedValue::Finite(v) => *v,
            ExtendedValue::PositiveInfinity => f64::INFINITY,
        }
    }
}

/// Inputs for [`chebyshev_bound`]: samples of a nonnegative function over a
/// domain of known measure, and the deviation multiple `θ`.
#[derive(Clone, Debug)]
pub struct ChebyshevQuery {
    pub sample_values: Vec<f64>,
    pub domain_measure: f64,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelError {
    InvalidSpec(&'static str),
    /// Sample count below the stated minimum for the operation.
    InvalidSampler { minimum: u64 },
    /// Adaptive radial quadrature failed to settle within the iteration cap.
    QuadratureFailure,
    /// Evaluation requested at `|v| = 0` or `|v| = 2r` where the kernel is singular.
    SingularPoint,
    /// All Chebyshev samples are zero, so the mean-relative deviation is undefined.
    ZeroMean,
}

impl core::fmt::Display for KernelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            KernelError::InvalidSpec(msg) => write!(f, "invalid kernel spec: {msg}"),
            KernelError::InvalidSampler { minimum } => {
                write!(f, "sampler budget below the minimum of {minimum}")
            }
            KernelError::QuadratureFailure => write!(f, "radial quadrature did not converge"),
            KernelError::SingularPoint => write!(f, "kernel is singular at this displacement"),
            KernelError::ZeroMean => write!(f, "sample values sum to zero"),
        }
    }
}

impl core::error::Error for KernelError {}

/// Surface area `A_r^d` of the radius-`r` sphere in `R^d`.
pub fn surface_area(spec: KernelSpec) -> f64 {
    sphere_surface_area(spec.dimension, spec.radius)
}

/// The kernel `K_r(v)` as a function of the displacement `v`.
///
/// Three cases: the closed form for `0 < |v| < 2r`, zero for `|v| > 2r`, and
/// `+∞` at `v = 0` and `|v| = 2r` (detected within
/// [`SINGULARITY_TOLERANCE`]).
pub fn kernel_value(spec: KernelSpec, v: &[f64]) -> ExtendedValue {
    kernel_value_radial(spec, math::norm(v))
}

/// [`kernel_value`] in terms of `|v|` alone; the kernel is rotation invariant.
pub fn kernel_value_radial(spec: KernelSpec, v_norm: f64) -> ExtendedValue {
    let r = spec.radius;
    if v_norm <= SINGULARITY_TOLERANCE || math::abs(v_norm - 2.0 * r) <= SINGULARITY_TOLERANCE {
        return ExtendedValue::PositiveInfinity;
    }
    if v_norm > 2.0 * r {
        return ExtendedValue::Finite(0.0);
    }
    let d = spec.dimension;
    let base = r * r - v_norm * v_norm / 4.0;
    let exponent = (d as f64 - 3.0) / 2.0;
    let value = 2.0 * r * r * math::powf(core::f64::consts::PI, (d as f64 - 1.0) / 2.0)
        * math::powf(base, exponent)
        / (gamma_half(d - 1) * v_norm);
    ExtendedValue::Finite(value)
}

/// Minimum Monte Carlo budget for [`annulus_overlap`].
pub const MIN_OVERLAP_SAMPLES: u64 = 10_000;

/// Normalised overlap `δ^{-2} · vol(A_δ(0) ∩ A_δ(v))` of two congruent thin
/// annuli whose centers differ by `v`.
///
/// In `UniformMonteCarlo` mode, points are drawn uniformly in the first
/// annulus and tested against the second; the standard error is binomial. In
/// `LatticeGrid` mode the radial direction is integrated exactly and the
/// polar angle is swept on a deterministic lattice restricted to the exact
/// angular support, giving a quadrature with zero reported error.
pub fn annulus_overlap(
    spec: &AnnulusSpec,
    v: &[f64],
    sampler: &SamplerConfig,
) -> Result<Estimate, KernelError> {
    if sampler.samples < MIN_OVERLAP_SAMPLES {
        return Err(KernelError::InvalidSampler {
            minimum: MIN_OVERLAP_SAMPLES,
        });
    }
    let w = math::norm(v);
    if let Some(est) = self_overlap_guard(spec, w) {
        return Ok(est);
    }
    match sampler.mode {
        SamplerMode::UniformMonteCarlo => Ok(overlap_monte_carlo(spec, v, sampler)),
        SamplerMode::LatticeGrid => Ok(Estimate::exact(overlap_lattice(spec, w, sampler.samples))),
    }
}

/// Short-circuit the trivial regimes: disjoint supports and exact
/// concentricity.
fn self_overlap_guard(spec: &AnnulusSpec, w: f64) -> Option<Estimate> {
    let outer = spec.kernel.radius + spec.thickness;
    if w >= 2.0 * outer {
        return Some(Estimate::exact(0.0));
    }
    if w <= SINGULARITY_TOLERANCE {
        let vol = spec.volume();
        return Some(Estimate::exact(vol / (spec.thickness * spec.thickness)));
    }
    None
}

fn overlap_monte_carlo(spec: &AnnulusSpec, v: &[f64], sampler: &SamplerConfig) -> Estimate {
    let d = spec.kernel.dimension as usize;
    let r = spec.kernel.radius;
    let outer = r + spec.thickness;
    let origin = alloc::vec![0.0; d];
    let mut rng = Rng::seeded(sampler.seed);
    let mut x = alloc::vec![0.0; d];
    let mut hits: u64 = 0;
    for _ in 0..sampler.samples {
        rng.in_shell(&origin, r, outer, &mut x);
        let rho = math::dist(&x, v);
        if rho >= r && rho <= outer {
            hits += 1;
        }
    }
    let n = sampler.samples as f64;
    let p = hits as f64 / n;
    let vol = spec.volume();
    let dd2 = spec.thickness * spec.thickness;
    Estimate {
        value: vol * p / dd2,
        std_error: vol * math::sqrt(p * (1.0 - p) / n) / dd2,
    }
}

/// Deterministic overlap quadrature.
///
/// Writing a point in the first annulus as `(ρ, β)` with `β` the angle to
/// `v`, membership in the second annulus is a pair of quadratic conditions in
/// `ρ`, so for each `β` the admissible radii form at most two intervals whose
/// `∫ ρ^{d-1} dρ` is exact. The angle is integrated by the midpoint rule on
/// the analytically bounded support window, weighted by the sphere factor
/// `|S^{d-2}| sin^{d-2} β`.
fn overlap_lattice(spec: &AnnulusSpec, w: f64, nodes: u64) -> f64 {
    let d = spec.kernel.dimension;
    let r = spec.kernel.radius;
    let outer = r + spec.thickness;

    let (beta_lo, beta_hi) = match angular_window(r, outer, w) {
        Some(win) => win,
        None => return 0.0,
    };

    // |S^{d-2}|, with the d = 2 convention |S^0| = 2 (two half-lines)
    let sphere_factor = if d == 2 {
        2.0
    } else {
        sphere_surface_area(d - 1, 1.0)
    };

    let h = (beta_hi - beta_lo) / nodes as f64;
    let mut acc = 0.0;
    let mut comp = 0.0; // Neumaier compensation
    for j in 0..nodes {
        let beta = beta_lo + (j as f64 + 0.5) * h;
        let m = radial_measure(d, r, outer, w, math::cos(beta));
        if m == 0.0 {
            continue;
        }
        let term = m * math::powi(math::sin(beta), d - 2);
        let t = acc + term;
        comp += if math::abs(acc) >= math::abs(term) {
            (acc - t) + term
        } else {
            (term - t) + acc
        };
        acc = t;
    }
    let integral = (acc + comp) * h * sphere_factor;
    integral / (spec.thickness * spec.thickness)
}

/// Angular support of the overlap: the `β` range (angle between `x` and `v`)
/// for which some admissible radius exists. Conservative (may be slightly
/// loose); exactness comes from the per-angle radial interval algebra.
fn angular_window(r: f64, outer: f64, w: f64) -> Option<(f64, f64)> {
    // admissible cos β is an interval [c_min, c_max]: for each ρ the allowed
    // c is [c_minus(ρ), c_plus(ρ)], and both envelopes have only interior
    // minima, so the extremes sit at the ρ endpoints (plus the interior zero
    // of c_minus)
    let c_plus = |rho: f64| (rho * rho + w * w - r * r) / (2.0 * rho * w);
    let c_minus = |rho: f64| (rho * rho + w * w - outer * outer) / (2.0 * rho * w);
    let c_max = c_plus(r).max(c_plus(outer));
    let mut c_min = c_minus(r).min(c_minus(outer));
    // interior minimum of c_minus at ρ = sqrt(outer² − w²) is zero
    if w < outer {
        let rho_star = math::sqrt(outer * outer - w * w);
        if rho_star >= r && rho_star <= outer {
            c_min = c_min.min(0.0);
        }
    }
    let c_min = c_min.clamp(-1.0, 1.0);
    let c_max = c_max.clamp(-1.0, 1.0);
    if c_min > c_max {
        return None;
    }
    // widen by one part in 2^40 against rounding of the acos bounds
    let pad = 1e-12 * (1.0 + w);
    Some((
        (math::acos(c_max) - pad).max(0.0),
        (math::acos(c_min) + pad).min(core::f64::consts::PI),
    ))
}

/// Exact `∫ ρ^{d-1} dρ` over the admissible radii along direction `cos β = c`.
fn radial_measure(d: u32, r: f64, outer: f64, w: f64, c: f64) -> f64 {
    // inside the second annulus: ρ² − 2ρwc + w² ∈ [r², outer²]
    let disc_outer = w * w * (c * c - 1.0) + outer * outer;
    if disc_outer <= 0.0 {
        return 0.0;
    }
    let s_outer = math::sqrt(disc_outer);
    let lo = (w * c - s_outer).max(r);
    let hi = (w * c + s_outer).min(outer);
    if lo >= hi {
        return 0.0;
    }
    let power = |x: f64| math::powi(x, d) / d as f64;
    let disc_inner = w * w * (c * c - 1.0) + r * r;
    if disc_inner <= 0.0 {
        return power(hi) - power(lo);
    }
    // carve out the forbidden open interval where the point falls inside the
    // inner ball of the second annulus
    let s_inner = math::sqrt(disc_inner);
    let f_lo = w * c - s_inner;
    let f_hi = w * c + s_inner;
    let mut total = 0.0;
    if f_lo > lo {
        total += power(f_lo.min(hi)) - power(lo);
    }
    if f_hi < hi {
        total += power(hi) - power(f_hi.max(lo));
    }
    total
}

/// Minimum panel count for [`kernel_integral`].
pub const MIN_QUADRATURE_POINTS: u64 = 100;
const QUADRATURE_REL_TOL: f64 = 1e-9;
const QUADRATURE_MAX_DOUBLINGS: u32 = 18;

/// `∫_{R^d} K_r(v) dv` by adaptive radial quadrature.
///
/// The radial integral is taken in the variable `ρ = 2r t^{1/2}`, which turns
/// the integrand into the beta form `t^{(d-3)/2} (1-t)^{(d-3)/2}`; the
/// further substitution `t = sin² θ` absorbs both endpoint singularities, and
/// composite Simpson panels are doubled until the estimate settles. Converges
/// to `surface_area(spec)²`.
pub fn kernel_integral(spec: KernelSpec, quadrature_points: u64) -> Result<f64, KernelError> {
    if quadrature_points < MIN_QUADRATURE_POINTS {
        return Err(KernelError::InvalidSampler {
            minimum: MIN_QUADRATURE_POINTS,
        });
    }
    let d = spec.dimension;
    let r = spec.radius;
    let a = (d as f64 - 3.0) / 2.0;
    // t^a (1-t)^a dt = 4^{-a} sin(2θ)^{2a+1} dθ on θ ∈ [0, π/2]
    let g = |theta: f64| math::powf(4.0, -a) * math::powf(math::sin(2.0 * theta), 2.0 * a + 1.0);

    let mut panels = quadrature_points;
    let mut prev = simpson(&g, 0.0, core::f64::consts::FRAC_PI_2, panels);
    for _ in 0..QUADRATURE_MAX_DOUBLINGS {
        panels *= 2;
        let next = simpson(&g, 0.0, core::f64::consts::FRAC_PI_2, panels);
        let settled = math::abs(next - prev) <= QUADRATURE_REL_TOL * math::abs(next);
        prev = next;
        if settled {
            let prefactor = 2.0 * r * r
                * math::powf(core::f64::consts::PI, (d as f64 - 1.0) / 2.0)
                / gamma_half(d - 1)
                * math::powi(2.0, d - 2)
                * math::powi(r, 2 * d - 4)
                * sphere_surface_area(d, 1.0);
            return Ok(prefactor * prev);
        }
    }
    Err(KernelError::QuadratureFailure)
}

fn simpson(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, panels: u64) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut acc = g(lo) + g(hi);
    for j in 1..panels {
        let x = lo + j as f64 * h;
        acc += if j % 2 == 1 { 4.0 } else { 2.0 } * g(x);
    }
    acc * h / 3.0
}

/// One `δ` row of [`phi_convergence_table`].
#[derive(Clone, Debug)]
pub struct PhiConvergenceRow {
    pub delta: f64,
    pub overlap: Estimate,
    pub kernel: f64,
    /// `|φ_δ(v) − K_r(v)|`.
    pub gap: f64,
    /// `δ^{-2} (vol A_δ)² − (A_r^d)²`, from exact ball-volume differences.
    pub identity_gap: f64,
}

/// Pointwise convergence report for `φ_δ(v) → K_r(v)` over a ladder of
/// thicknesses.
#[derive(Clone, Debug)]
pub struct PhiConvergenceTable {
    pub rows: Vec<PhiConvergenceRow>,
    /// Least-squares slope of `log gap` against `log δ`.
    pub fitted_order: f64,
}

/// Tabulates `φ_δ(v)` against `K_r(v)` for strictly decreasing `δ` and fits
/// the empirical convergence order, alongside the exact mean-volume identity
/// gap per `δ`.
pub fn phi_convergence_table(
    spec: KernelSpec,
    v: &[f64],
    deltas: &[f64],
    sampler: &SamplerConfig,
) -> Result<PhiConvergenceTable, KernelError> {
    let v_norm = math::norm(v);
    if v_norm <= SINGULARITY_TOLERANCE
        || math::abs(v_norm - 2.0 * spec.radius) <= SINGULARITY_TOLERANCE
    {
        return Err(KernelError::SingularPoint);
    }
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(KernelError::InvalidSpec("deltas must be strictly decreasing"));
    }
    let kernel = kernel_value_radial(spec, v_norm).as_f64();
    let area_sq = {
        let a = surface_area(spec);
        a * a
    };
    let mut rows = Vec::with_capacity(deltas.len());
    for (i, &delta) in deltas.iter().enumerate() {
        let annulus = AnnulusSpec::new(spec, delta, alloc::vec![0.0; v.len()])?;
        let sub = SamplerConfig {
            seed: rng::substream(sampler.seed, i as u64),
            ..*sampler
        };
        let overlap = annulus_overlap(&annulus, v, &sub)?;
        let vol = annulus.volume();
        let identity_gap = vol * vol / (delta * delta) - area_sq;
        rows.push(PhiConvergenceRow {
            delta,
            gap: math::abs(overlap.value - kernel),
            overlap,
            kernel,
            identity_gap,
        });
    }
    let fitted_order = fit_log_slope(
        rows.iter().map(|r| (r.delta, r.gap.max(1e-300))),
        rows.len(),
    );
    Ok(PhiConvergenceTable { rows, fitted_order })
}

fn fit_log_slope(points: impl Iterator<Item = (f64, f64)>, n: usize) -> f64 {
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        let lx = math::ln(x);
        let ly = math::ln(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let n = n as f64;
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Chebyshev deviation bound from sampled values.
///
/// `lhs` estimates the measure of the set where the function deviates from
/// its mean by at least `θ ·` mean; `rhs` is the second-moment bound
/// `θ^{-2} |D| [ |D| ∫g² / (∫g)² − 1 ]` with both integrals evaluated by
/// sample-mean quadrature. `lhs <= rhs` always.
pub fn chebyshev_bound(query: &ChebyshevQuery) -> Result<(f64, f64), KernelError> {
    let bad_measure = query.domain_measure.is_nan() || query.domain_measure <= 0.0;
    let bad_theta = query.theta.is_nan() || query.theta <= 0.0;
    if query.sample_values.is_empty() || bad_measure || bad_theta {
        return Err(KernelError::InvalidSpec(
            "chebyshev query needs samples, positive measure, positive theta",
        ));
    }
    let n = query.sample_values.len() as f64;
    let sum: f64 = query.sample_values.iter().sum();
    if sum == 0.0 {
        return Err(KernelError::ZeroMean);
    }
    let sumsq: f64 = query.sample_values.iter().map(|g| g * g).sum();
    let mean = sum / n;
    let threshold = query.theta * mean;
    let exceed = query
        .sample_values
        .iter()
        .filter(|&&g| math::abs(g - mean) >= threshold)
        .count() as f64;
    let lhs = query.domain_measure * exceed / n;
    let rhs = query.domain_measure / (query.theta * query.theta) * (n * sumsq / (sum * sum) - 1.0);
    Ok((lhs, rhs))
}
