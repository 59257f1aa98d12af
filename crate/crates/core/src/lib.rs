//! Computational toolkit for sets that contain (or provably avoid) large
//! copies of finite point patterns.
//!
//! The crate has four legs:
//!
//! * [`kernel`] — closed-form and quadrature evaluation of the thin-annulus
//!   overlap kernel `K_r` on `R^d`, its integral identity against the squared
//!   sphere area, and a Chebyshev mean-deviation bound.
//! * [`measure`] — Monte Carlo / lattice estimation of ball densities and
//!   sphere coverages for sets given only as membership predicates, plus the
//!   mean and mean-square identities tying sphere coverage to set volume.
//! * [`constructions`] and [`discrepancy`] — the annular counterexample sets,
//!   quadratic radial sequences on the torus, exact arc discrepancy, the
//!   Erdős–Turán and van der Corput bounds, golden-ratio Diophantine quality,
//!   and a grid-plus-Lipschitz certificate that an annular set avoids all
//!   congruent arithmetic progressions of a given length.
//! * [`pattern`] — Haar-random rotations and Las Vegas searches for
//!   translated and similar copies of patterns inside membership-oracle sets,
//!   returning only re-verified witnesses.
//!
//! Everything is deterministic given the seeds carried in
//! [`sampling::SamplerConfig`]; no global state. The crate is `no_std`
//! compatible (with `alloc`) when built with the `libm` feature instead of
//! the default `std`.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("copies-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod constructions;
pub mod dd;
pub mod discrepancy;
pub mod kernel;
pub mod math;
pub mod measure;
pub mod oracle;
pub mod pattern;
pub mod rng;
pub mod sampling;
pub mod special;

pub use oracle::{BallRegion, SetOracle};
pub use sampling::{Estimate, SamplerConfig, SamplerMode};
