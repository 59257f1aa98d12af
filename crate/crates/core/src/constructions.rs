//! Explicit sets and sequences: annular counterexample sets, quadratic radial
//! sequences, golden-ratio scales, and the progression-avoidance certificate.
//!
//! The annular set with gap `ε` keeps the points whose squared norm lies
//! within `(1-ε)/2` of an integer; its radial density is exactly `1-ε`. If an
//! arithmetic progression `{0, r, 2r, …, (n-1)r}` embeds isometrically into
//! it, the squared norms of the image satisfy the parallelogram recurrence
//! `a_{k+2} - 2a_{k+1} + a_k = 2r²`, hence `a_k = r²k² + Ak + B` — so the
//! progression forces `n` terms of a quadratic sequence mod 1 to avoid an
//! interval of length `ε`. [`ap_avoidance_certificate`] mechanises the
//! contrapositive: if the extreme discrepancy of the first `n` terms is below
//! `ε₀` uniformly over the shift `A` (grid plus a Lipschitz slack; `B` is
//! covered by rotation invariance), the annular set with gap `ε₀` contains no
//! congruent copy of the progression at that scale.

use alloc::vec::Vec;

use crate::dd::{two_prod, two_sum, Dd};
use crate::discrepancy;
use crate::math;
use crate::oracle::SetOracle;

/// `(√5 − 1)/2` to double-double precision.
///
/// Decimal value 0.618033988749894848204586834365638117720…; the two legs
/// reproduce it to ~2.7e-33.
pub const GOLDEN_Z: Dd = Dd {
    hi: 0.6180339887498949,
    lo: -5.432115203682506e-17,
};

/// Union of thin spherical shells: `dist(|x|², Z) < (1-ε)/2`.
#[derive(Clone, Copy, Debug)]
pub struct AnnularSet {
    pub dimension: u32,
    pub gap: f64,
}

impl AnnularSet {
    pub fn new(dimension: u32, gap: f64) -> AnnularSet {
        assert!(dimension >= 2);
        assert!(gap > 0.0 && gap < 1.0, "gap must lie in (0,1)");
        AnnularSet { dimension, gap }
    }

    /// Fraction of the radial `|x|²` line covered by the shells; exactly
    /// `1 - gap`.
    pub fn radial_density(&self) -> f64 {
        1.0 - self.gap
    }

    pub fn half_width(&self) -> f64 {
        (1.0 - self.gap) / 2.0
    }
}

impl SetOracle for AnnularSet {
    fn dimension(&self) -> usize {
        self.dimension as usize
    }
    fn contains(&self, x: &[f64]) -> bool {
        annular_membership(self, x)
    }
    fn label(&self) -> &str {
        "annular"
    }
}

/// Membership test for the annular set.
pub fn annular_membership(set: &AnnularSet, x: &[f64]) -> bool {
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    math::dist_to_integers(norm_sq) < set.half_width()
}

/// The original union-of-annuli set: `|x|² mod 1 ∈ [0, s]`, density `s`.
#[derive(Clone, Copy, Debug)]
pub struct BourgainSet {
    pub dimension: u32,
    pub s: f64,
}

impl BourgainSet {
    pub fn new(dimension: u32, s: f64) -> BourgainSet {
        assert!(dimension >= 2);
        assert!(s > 0.0 && s < 0.25, "s must lie in (0, 1/4)");
        BourgainSet { dimension, s }
    }
}

impl SetOracle for BourgainSet {
    fn dimension(&self) -> usize {
        self.dimension as usize
    }
    fn contains(&self, x: &[f64]) -> bool {
        let norm_sq: f64 = x.iter().map(|v| v * v).sum();
        math::frac(norm_sq) <= self.s
    }
    fn label(&self) -> &str {
        "bourgain"
    }
}

/// The density bound `10 log n / n^{1/5}` with its voidness flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonBound {
    pub value: f64,
    /// True when the bound is ≥ 1 and says nothing.
    pub void: bool,
}

/// `ε(n) = 10 ln n / n^{1/5}` (natural logarithm).
pub fn epsilon_of_n(n: u64) -> EpsilonBound {
    assert!(n >= 2);
    let nf = n as f64;
    let value = 10.0 * math::ln(nf) / math::powf(nf, 0.2);
    EpsilonBound {
        value,
        void: value >= 1.0,
    }
}

/// A scale whose square is the golden fractional part plus an integer:
/// `r² = offset + (√5 − 1)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibleScale {
    pub offset: u32,
    pub r: f64,
}

impl AdmissibleScale {
    /// `r²` as a double-double, exact up to the golden constant's own error.
    pub fn r_squared(&self) -> Dd {
        let (hi, lo) = two_sum(self.offset as f64, GOLDEN_Z.hi);
        Dd::new(hi, lo + GOLDEN_Z.lo)
    }
}

/// Scale with `r = √(offset + z)`, `z` the golden fractional part.
pub fn admissible_scale(offset: u32) -> AdmissibleScale {
    let r = math::sqrt(offset as f64 + GOLDEN_Z.hi);
    AdmissibleScale { offset, r }
}

/// Parameters of the radial sequence `a_k = r²k² + Ak + B`.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticSeq {
    r_squared: Dd,
    pub shift_a: f64,
    pub shift_b: f64,
    pub len: u32,
}

impl QuadraticSeq {
    pub fn new(r_squared: f64, shift_a: f64, shift_b: f64, len: u32) -> QuadraticSeq {
        assert!(len >= 2, "a sequence needs at least two terms");
        QuadraticSeq {
            r_squared: Dd::from_f64(r_squared),
            shift_a,
            shift_b,
            len,
        }
    }

    /// Sequence at an admissible scale, carrying `r²` in double-double so
    /// that `r² k² mod 1` keeps ~1e-15 absolute accuracy out to `k ~ 10^6`.
    pub fn at_scale(scale: &AdmissibleScale, shift_a: f64, shift_b: f64, len: u32) -> QuadraticSeq {
        assert!(len >= 2);
        QuadraticSeq {
            r_squared: scale.r_squared(),
            shift_a,
            shift_b,
            len,
        }
    }

    pub fn r_squared_f64(&self) -> f64 {
        self.r_squared.to_f64()
    }

    /// `a_k mod 1`, reduced with compensated double-double arithmetic.
    ///
    /// `k²` must stay exactly representable, which holds for every `k` below
    /// 2^26; the sequence lengths used here stay far under that.
    pub fn point(&self, k: u64) -> f64 {
        debug_assert!(k < (1 << 26));
        let ksq = (k * k) as f64;
        let kf = k as f64;

        // r².hi · k², r².lo · k², A · k, each split exactly, then reduced
        let (p1, e1) = two_prod(self.r_squared.hi, ksq);
        let (p2, e2) = two_prod(self.r_squared.lo, ksq);
        let (q1, f1) = two_prod(self.shift_a, kf);

        let mut acc = Dd::from_f64(p1).frac();
        acc = acc + Dd::from_f64(p2).frac();
        acc = acc + Dd::from_f64(q1).frac();
        acc = acc.add_f64(e1);
        acc = acc.add_f64(e2);
        acc = acc.add_f64(f1);
        acc = acc + Dd::from_f64(self.shift_b).frac();
        let p = acc.frac().hi;
        // a point just below 1 can round to {1.0, lo<0}; wrap it
        if p >= 1.0 {
            0.0
        } else {
            p.max(0.0)
        }
    }

    /// The unreduced term `r²k² + Ak + B`, for recurrence checks.
    pub fn raw_term(&self, k: u64) -> f64 {
        let ksq = (k * k) as f64;
        let kf = k as f64;
        let term = self.r_squared.mul_f64(ksq)
            + Dd::from_f64(self.shift_a).mul_f64(kf)
            + Dd::from_f64(self.shift_b);
        term.to_f64()
    }
}

/// The points `(a_k mod 1)` for `k = 0 .. len-1`.
pub fn quadratic_sequence(params: &QuadraticSeq) -> Vec<f64> {
    (0..params.len as u64).map(|k| params.point(k)).collect()
}

/// Residuals `a_{k+2} − 2a_{k+1} + a_k − 2r²` for `a_k = |x_k|²`.
///
/// All residuals vanish exactly when the points are an isometric image of
/// `0, r, 2r, …` on a line; curvature shows up as nonzero residuals.
pub fn verify_parallelogram_recurrence(points: &[Vec<f64>], r: f64) -> Vec<f64> {
    let sq: Vec<f64> = points
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum())
        .collect();
    let two_r_sq = 2.0 * r * r;
    sq.windows(3)
        .map(|w| w[2] - 2.0 * w[1] + w[0] - two_r_sq)
        .collect()
}

/// First index whose value lands in the centered interval
/// `[(1-eps)/2, (1+eps)/2]`, if any.
pub fn gap_hit_test(seq: &[f64], eps: f64) -> Option<usize> {
    assert!(eps > 0.0 && eps < 1.0);
    let lo = (1.0 - eps) / 2.0;
    let hi = (1.0 + eps) / 2.0;
    seq.iter().position(|&p| p >= lo && p <= hi)
}

/// Certified statement that every quadratic sequence at this scale hits every
/// arc of length `eps0` within its first `n` terms, regardless of the shifts
/// `A` and `B` — equivalently, that the annular set with gap `eps0` contains
/// no congruent copy of the `n`-term progression at scale `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AvoidanceCertificate {
    pub n: u32,
    pub scale: AdmissibleScale,
    pub eps0: f64,
    pub a_grid_step: f64,
    pub max_discrepancy_found: f64,
    pub lipschitz_slack: f64,
    pub verdict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionError {
    /// The Lipschitz slack `2(n-1)·step` already exceeds `eps0`, so no sweep
    /// can certify anything.
    GridTooCoarse,
    InvalidParameter(&'static str),
}

impl core::fmt::Display for ConstructionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ConstructionError::GridTooCoarse => {
                write!(f, "A-grid too coarse: Lipschitz slack reaches eps0")
            }
            ConstructionError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for ConstructionError {}

/// Extreme discrepancy of the first `n` terms at shift `A` (and `B = 0`;
/// every `B` gives the same value by rotation invariance of arc
/// discrepancy). This is the per-grid-point work of the certificate sweep
/// and is safe to fan out across workers.
pub fn shifted_discrepancy(scale: &AdmissibleScale, n: u32, shift_a: f64) -> f64 {
    let seq = quadratic_sequence(&QuadraticSeq::at_scale(scale, shift_a, 0.0, n));
    discrepancy::extreme_discrepancy_exact(&seq)
}

/// The certificate's `A`-grid: `0, step, 2·step, … < 1`.
pub fn certificate_grid_len(a_grid_step: f64) -> u64 {
    (1.0 / a_grid_step) as u64 + 1
}

pub fn certificate_grid_point(a_grid_step: f64, index: u64) -> f64 {
    a_grid_step * index as f64
}

/// Validates parameters and the coarseness precondition.
pub fn certificate_preflight(
    n: u32,
    eps0: f64,
    a_grid_step: f64,
) -> Result<(), ConstructionError> {
    if eps0.is_nan() || eps0 <= 0.0 || eps0 >= 1.0 {
        return Err(ConstructionError::InvalidParameter("eps0 must lie in (0,1)"));
    }
    if a_grid_step.is_nan() || a_grid_step <= 0.0 {
        return Err(ConstructionError::InvalidParameter("grid step must be positive"));
    }
    if n < 2 {
        return Err(ConstructionError::InvalidParameter("n must be at least 2"));
    }
    if lipschitz_slack(n, a_grid_step) >= eps0 {
        return Err(ConstructionError::GridTooCoarse);
    }
    Ok(())
}

/// Each sequence point moves by at most `(n-1)·|ΔA|` under a shift
/// perturbation, and inflating an interval by the displacement costs twice
/// that in discrepancy.
pub fn lipschitz_slack(n: u32, a_grid_step: f64) -> f64 {
    2.0 * (n as f64 - 1.0) * a_grid_step
}

/// Assembles the certificate from a completed sweep maximum.
pub fn assemble_certificate(
    n: u32,
    scale: AdmissibleScale,
    eps0: f64,
    a_grid_step: f64,
    max_discrepancy_found: f64,
) -> AvoidanceCertificate {
    let slack = lipschitz_slack(n, a_grid_step);
    AvoidanceCertificate {
        n,
        scale,
        eps0,
        a_grid_step,
        max_discrepancy_found,
        lipschitz_slack: slack,
        verdict: max_discrepancy_found + slack < eps0,
    }
}

/// Sweeps the `A`-grid, maximises the exact extreme discrepancy, and issues
/// the verdict `max + slack < eps0`.
pub fn ap_avoidance_certificate(
    n: u32,
    scale: &AdmissibleScale,
    eps0: f64,
    a_grid_step: f64,
) -> Result<AvoidanceCertificate, ConstructionError> {
    certificate_preflight(n, eps0, a_grid_step)?;
    let mut max_found = 0.0f64;
    for idx in 0..certificate_grid_len(a_grid_step) {
        let a = certificate_grid_point(a_grid_step, idx);
        if a >= 1.0 {
            break;
        }
        max_found = max_found.max(shifted_discrepancy(scale, n, a));
    }
    Ok(assemble_certificate(n, *scale, eps0, a_grid_step, max_found))
}

#[cfg(feature = "serde")]
impl serde::Serialize for AvoidanceCertificate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("AvoidanceCertificate", 8)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("offset", &self.scale.offset)?;
        s.serialize_field("r_squared", &self.scale.r_squared().to_f64())?;
        s.serialize_field("eps0", &self.eps0)?;
        s.serialize_field("a_grid_step", &self.a_grid_step)?;
        s.serialize_field("max_discrepancy", &self.max_discrepancy_found)?;
        s.serialize_field("slack", &self.lipschitz_slack)?;
        s.serialize_field("verdict", &self.verdict)?;
        s.end()
    }
}
