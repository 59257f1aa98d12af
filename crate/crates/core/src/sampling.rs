//! Sampler configuration shared by every stochastic operation.

/// How an estimator draws its evaluation points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerMode {
    /// Pseudo-random points from the seeded generator; binomial or sample
    /// standard errors are reported.
    UniformMonteCarlo,
    /// Deterministic equispaced points over the sampling domain. Estimates
    /// are quadratures; the reported standard error is 0.
    LatticeGrid,
}

/// Seeded sampling budget.
///
/// Two configs with equal fields produce bit-identical estimates. Batches may
/// be split across workers as long as each batch derives its own substream
/// via [`crate::rng::substream`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: u64,
    pub mode: SamplerMode,
}

impl SamplerConfig {
    pub fn monte_carlo(seed: u64, samples: u64) -> SamplerConfig {
        SamplerConfig {
            seed,
            samples,
            mode: SamplerMode::UniformMonteCarlo,
        }
    }

    pub fn lattice(samples: u64) -> SamplerConfig {
        SamplerConfig {
            seed: 0,
            samples,
            mode: SamplerMode::LatticeGrid,
        }
    }
}

/// A numeric estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Estimate {
        Estimate {
            value,
            std_error: 0.0,
        }
    }

    /// `|self - other|` measured in combined standard errors; infinite when
    /// both errors are zero and the values differ.
    pub fn sigma_distance(&self, other: &Estimate) -> f64 {
        let d = crate::math::abs(self.value - other.value);
        let se = crate::math::sqrt(
            self.std_error * self.std_error + other.std_error * other.std_error,
        );
        if se == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / se
        }
    }
}
