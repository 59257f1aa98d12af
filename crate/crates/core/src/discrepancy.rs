//! Exact arc discrepancy on the torus and the analytic bound chain.
//!
//! The sorted-point formulas give star and extreme discrepancy in
//! `O(n log n)`; both are evaluated in double-double so the returned `f64` is
//! the correctly rounded exact value. On top sit the Erdős–Turán bound
//! (constants 6 and 4/π as printed in the classical inequality), the van der
//! Corput shift-averaging step with its `2H/n` cost, the geometric-series
//! bound for quadratic sequences at golden-ratio scales, and the closed-form
//! final bound with the pinned choices `H = ⌊n^{2/5}/25⌋`, `M = ⌊4n^{1/5}⌋`.

use alloc::vec::Vec;

use crate::constructions::{
    self, epsilon_of_n, AdmissibleScale, QuadraticSeq, GOLDEN_Z,
};
use crate::dd::{two_prod, Dd};
use crate::math;

/// A validated finite sequence on the torus `[0, 1)`.
#[derive(Clone, Debug)]
pub struct TorusSequence {
    points: Vec<f64>,
}

impl TorusSequence {
    pub fn new(points: Vec<f64>) -> Result<TorusSequence, DiscrepancyError> {
        if points.is_empty() {
            return Err(DiscrepancyError::EmptySequence);
        }
        if points.iter().any(|&p| !(0.0..1.0).contains(&p)) {
            return Err(DiscrepancyError::PointOutOfRange);
        }
        Ok(TorusSequence { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.points
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscrepancyError {
    EmptySequence,
    PointOutOfRange,
    /// `⌊n^{2/5}/25⌋ = 0`; the pinned bound parameters need `n ≥ 3125`.
    BelowRange,
    /// The extended sequence does not provide `n + H` terms.
    InsufficientTerms,
}

impl core::fmt::Display for DiscrepancyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DiscrepancyError::EmptySequence => write!(f, "sequence is empty"),
            DiscrepancyError::PointOutOfRange => write!(f, "points must lie in [0, 1)"),
            DiscrepancyError::BelowRange => {
                write!(f, "n below 3125: the block length H floors to zero")
            }
            DiscrepancyError::InsufficientTerms => {
                write!(f, "shift averaging needs n + H sequence terms")
            }
        }
    }
}

impl core::error::Error for DiscrepancyError {}

fn sorted(points: &[f64]) -> Vec<f64> {
    let mut xs = points.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    xs
}

/// Star discrepancy (anchored intervals `[0, β)`), exact via sorted points.
pub fn star_discrepancy_exact(points: &[f64]) -> f64 {
    assert!(!points.is_empty());
    let xs = sorted(points);
    let n = xs.len() as u64;
    let mut best = Dd::ZERO;
    for (i, &x) in xs.iter().enumerate() {
        let up = Dd::from_ratio(i as u64 + 1, n).sub_f64(x);
        let down = Dd::from_f64(x) - Dd::from_ratio(i as u64, n);
        best = best.max(up).max(down);
    }
    best.to_f64()
}

/// Extreme discrepancy (all intervals `[α, β) ⊆ [0, 1)`), exact via the
/// sorted-point identity `D = D⁺ + D⁻`.
///
/// Because complementary wrap-arcs carry the same deviation, this value is
/// also the supremum over arcs of the circle, hence invariant under torus
/// rotation of the points.
pub fn extreme_discrepancy_exact(points: &[f64]) -> f64 {
    assert!(!points.is_empty());
    let xs = sorted(points);
    let n = xs.len() as u64;
    let mut d_plus = Dd::ZERO;
    let mut d_minus = Dd::ZERO;
    for (i, &x) in xs.iter().enumerate() {
        let up = Dd::from_ratio(i as u64 + 1, n).sub_f64(x);
        let down = Dd::from_f64(x) - Dd::from_ratio(i as u64, n);
        d_plus = d_plus.max(up);
        d_minus = d_minus.max(down);
    }
    (d_plus + d_minus).to_f64()
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, term: f64) {
        let t = self.sum + term;
        self.comp += if math::abs(self.sum) >= math::abs(term) {
            (self.sum - t) + term
        } else {
            (term - t) + self.sum
        };
        self.sum = t;
    }

    #[inline]
    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `| n⁻¹ Σ_k e^{2πi m x_k} |` with compensated summation; the phase
/// `m·x_k mod 1` is reduced in double-double before the trig call.
pub fn exp_sum(points: &[f64], m: u64) -> f64 {
    assert!(m >= 1);
    let mf = m as f64;
    let mut re = Compensated::default();
    let mut im = Compensated::default();
    for &x in points {
        let (p, e) = two_prod(mf, x);
        let t = Dd::from_f64(p).frac().add_f64(e).frac().to_f64();
        let theta = core::f64::consts::TAU * t;
        re.add(math::cos(theta));
        im.add(math::sin(theta));
    }
    let n = points.len() as f64;
    let re = re.total() / n;
    let im = im.total() / n;
    math::sqrt(re * re + im * im)
}

/// Erdős–Turán bound `6/(M+1) + (4/π) Σ_{m≤M} |exp sum| / m`, an upper bound
/// for the extreme discrepancy at every `M ≥ 1`.
pub fn erdos_turan_bound(points: &[f64], m_max: u64) -> f64 {
    assert!(m_max >= 1);
    let mut acc = Compensated::default();
    for m in 1..=m_max {
        acc.add(exp_sum(points, m) / m as f64);
    }
    6.0 / (m_max as f64 + 1.0) + 4.0 / core::f64::consts::PI * acc.total()
}

/// Shift-averaging gap: the exponential sum versus its average over the `H`
/// following shifts, computed from `n + H` provided terms.
///
/// Returns `(gap, 2H/n)`; the gap never exceeds the bound.
pub fn vdc_shift_gap(
    extended_points: &[f64],
    m: u64,
    h: u64,
) -> Result<(f64, f64), DiscrepancyError> {
    if extended_points.len() as u64 <= h {
        return Err(DiscrepancyError::InsufficientTerms);
    }
    let n = extended_points.len() as u64 - h;
    let mf = m as f64;
    let phase = |x: f64| {
        let (p, e) = two_prod(mf, x);
        let t = Dd::from_f64(p).frac().add_f64(e).frac().to_f64();
        core::f64::consts::TAU * t
    };

    let (mut re0, mut im0) = (Compensated::default(), Compensated::default());
    for &x in &extended_points[..n as usize] {
        let th = phase(x);
        re0.add(math::cos(th));
        im0.add(math::sin(th));
    }

    // Σ_{k<n} Σ_{1<=j<=H} e(m a_{k+j}) reweighted as a single pass
    let (mut re1, mut im1) = (Compensated::default(), Compensated::default());
    for (idx, &x) in extended_points.iter().enumerate().skip(1) {
        let idx = idx as u64;
        let k_lo = idx.saturating_sub(h);
        let k_hi = (idx - 1).min(n - 1);
        if k_lo > k_hi {
            continue;
        }
        let weight = (k_hi - k_lo + 1) as f64;
        let th = phase(x);
        re1.add(weight * math::cos(th));
        im1.add(weight * math::sin(th));
    }

    let nf = n as f64;
    let hf = h as f64;
    let dr = re0.total() / nf - re1.total() / (nf * hf);
    let di = im0.total() / nf - im1.total() / (nf * hf);
    Ok((math::sqrt(dr * dr + di * di), 2.0 * hf / nf))
}

/// Analytic bound for a quadratic-sequence exponential sum at a golden-ratio
/// scale: `2H/n + sqrt(1/H + 3Hm/n)`.
pub fn analytic_expsum_bound(n: u64, m: u64, h: u64) -> f64 {
    let nf = n as f64;
    let hf = h as f64;
    2.0 * hf / nf + math::sqrt(1.0 / hf + 3.0 * hf * m as f64 / nf)
}

/// Exact exponential sum of the quadratic sequence versus its analytic bound.
/// The exact value never exceeds the bound at admissible scales; `B` drops
/// out of the modulus entirely, and only the bound's uniformity over `A`
/// makes the downstream certificate shift-free.
pub fn quadratic_expsum_bound(
    n: u64,
    m: u64,
    h: u64,
    scale: &AdmissibleScale,
    shift_a: f64,
) -> (f64, f64) {
    assert!(h >= 1 && m >= 1);
    let params = QuadraticSeq::at_scale(scale, shift_a, 0.0, n as u32);
    let seq = constructions::quadratic_sequence(&params);
    (exp_sum(&seq, m), analytic_expsum_bound(n, m, h))
}

/// Diophantine quality report for a badly approximable number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiophantineQuality {
    pub z: f64,
    pub q_max: u64,
    /// `min_{1 ≤ q ≤ q_max} q · dist(qz, Z)`.
    pub min_product: f64,
    pub witness_q: u64,
    /// The largest Fibonacci number within range: the canonical subsequence
    /// realising the liminf `1/√5`.
    pub fib_witness_q: u64,
    /// The product at `fib_witness_q`.
    pub fib_product: f64,
}

/// Scans `q·dist(qz, Z)` for the golden fractional part `z` with
/// double-double reduction. The minimum stays above `1/3`, and the product
/// at the Fibonacci witness approaches `1/√5 ≈ 0.4472`.
pub fn golden_quality(q_max: u64) -> DiophantineQuality {
    assert!(q_max >= 1);
    let mut min_product = f64::INFINITY;
    let mut witness_q = 1;
    for q in 1..=q_max {
        let p = golden_product(q);
        if p < min_product {
            min_product = p;
            witness_q = q;
        }
    }
    let mut fib = (1u64, 2u64);
    while fib.1 <= q_max {
        fib = (fib.1, fib.0 + fib.1);
    }
    let fib_witness_q = fib.0;
    DiophantineQuality {
        z: GOLDEN_Z.hi,
        q_max,
        min_product,
        witness_q,
        fib_witness_q,
        fib_product: golden_product(fib_witness_q),
    }
}

/// `q · dist(qz, Z)` for the golden fractional part.
pub fn golden_product(q: u64) -> f64 {
    debug_assert!(q < (1 << 53));
    let t = GOLDEN_Z.mul_f64(q as f64).frac();
    let dist = t.min(Dd::from_f64(1.0) - t);
    q as f64 * dist.to_f64()
}

/// `|p² + pq − q²|`. Strictly positive whenever `q ≠ 0` (and for `p ≠ 0`,
/// `q = 0`): the quadratic has irrational roots, so the integer form never
/// vanishes away from the origin.
pub fn viete_identity(p: i64, q: i64) -> u64 {
    let p = p as i128;
    let q = q as i128;
    (p * p + p * q - q * q).unsigned_abs() as u64
}

/// Exact `⌊n^{2/5}/25⌋`: the largest `h` with `(25h)^5 ≤ n²`.
pub fn block_length(n: u64) -> u64 {
    let target = (n as u128) * (n as u128);
    largest_satisfying(|h| pow5_saturating(25 * h as u128) <= target)
}

/// Exact `⌊4 n^{1/5}⌋`: the largest `m` with `m^5 ≤ 1024 n`.
pub fn mode_cutoff(n: u64) -> u64 {
    let target = 1024u128 * n as u128;
    largest_satisfying(|m| pow5_saturating(m as u128) <= target)
}

fn pow5_saturating(x: u128) -> u128 {
    let sq = x.saturating_mul(x);
    sq.saturating_mul(sq).saturating_mul(x)
}

fn largest_satisfying(pred: impl Fn(u64) -> bool) -> u64 {
    if !pred(1) {
        return 0;
    }
    let mut hi = 1u64;
    while pred(hi * 2) {
        hi *= 2;
    }
    let mut lo = hi;
    hi *= 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `10 log n / n^{1/5}` — the density gap the final bound must undercut.
pub fn theorem_bound(n: u64) -> f64 {
    epsilon_of_n(n).value
}

/// The closed-form discrepancy bound at the pinned parameter choices.
///
/// Returns `(H, M, value)` where
/// `value = 6/(M+1) + (4/π)(1 + log M)(2H/n + H^{-1/2}) + (8√3/π)(HM/n)^{1/2}`.
pub fn final_bound(n: u64) -> Result<(u64, u64, f64), DiscrepancyError> {
    if n < 2 {
        return Err(DiscrepancyError::BelowRange);
    }
    let h = block_length(n);
    if h == 0 {
        return Err(DiscrepancyError::BelowRange);
    }
    let m = mode_cutoff(n);
    let nf = n as f64;
    let hf = h as f64;
    let mf = m as f64;
    let value = 6.0 / (mf + 1.0)
        + 4.0 / core::f64::consts::PI
            * (1.0 + math::ln(mf))
            * (2.0 * hf / nf + 1.0 / math::sqrt(hf))
        + 8.0 * math::sqrt(3.0) / core::f64::consts::PI * math::sqrt(hf * mf / nf);
    Ok((h, m, value))
}

/// The full bound chain for one sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DiscrepancyReport {
    pub n: u64,
    pub exact_star: f64,
    pub exact_extreme: f64,
    /// Erdős–Turán bound with exact exponential sums at `M`.
    pub et_bound: f64,
    pub m: u64,
    pub h: u64,
    /// Erdős–Turán with each exponential sum replaced by its analytic bound.
    pub vdc_bound: f64,
    pub final_bound: f64,
    pub theorem_bound: f64,
}

/// Exact discrepancies plus the entire analytic chain for a sequence of
/// length at least 3125 (so the pinned `H` is positive). Intended for
/// admissible-scale quadratic sequences, where the chain
/// `exact_extreme ≤ et_bound ≤ vdc_bound ≤ final_bound` holds term by term.
pub fn full_report(points: &[f64]) -> Result<DiscrepancyReport, DiscrepancyError> {
    let n = points.len() as u64;
    let (h, m, fb) = final_bound(n)?;

    let exact_star = star_discrepancy_exact(points);
    let exact_extreme = extreme_discrepancy_exact(points);

    let mut et_acc = Compensated::default();
    let mut vdc_acc = Compensated::default();
    for mode in 1..=m {
        et_acc.add(exp_sum(points, mode) / mode as f64);
        vdc_acc.add(analytic_expsum_bound(n, mode, h) / mode as f64);
    }
    let lead = 6.0 / (m as f64 + 1.0);
    let four_over_pi = 4.0 / core::f64::consts::PI;
    Ok(DiscrepancyReport {
        n,
        exact_star,
        exact_extreme,
        et_bound: lead + four_over_pi * et_acc.total(),
        m,
        h,
        vdc_bound: lead + four_over_pi * vdc_acc.total(),
        final_bound: fb,
        theorem_bound: theorem_bound(n),
    })
}
