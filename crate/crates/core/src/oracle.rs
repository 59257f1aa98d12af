//! Measurable sets presented as membership predicates.
//!
//! Every estimation and search operation consumes a [`SetOracle`]: a
//! deterministic membership test plus optional bounding metadata. Providers
//! must keep `contains` pure and safe to call concurrently — estimators may
//! fan batches out across workers.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::math;

/// A closed ball given by center and radius.
#[derive(Clone, Debug, PartialEq)]
pub struct BallRegion {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallRegion {
    pub fn new(center: Vec<f64>, radius: f64) -> BallRegion {
        assert!(radius > 0.0, "ball radius must be positive");
        BallRegion { center, radius }
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        math::dist(x, &self.center) <= self.radius
    }

    /// Concentric ball enlarged by `margin`.
    pub fn inflate(&self, margin: f64) -> BallRegion {
        BallRegion {
            center: self.center.clone(),
            radius: self.radius + margin,
        }
    }
}

/// Membership oracle for a measurable subset of `R^d`.
pub trait SetOracle: Sync {
    fn dimension(&self) -> usize;

    /// Deterministic membership test; same point, same answer.
    fn contains(&self, x: &[f64]) -> bool;

    /// A ball outside which membership is constantly false, when the set is
    /// known to be bounded. `None` declares the set (possibly) unbounded.
    fn bounding_hint(&self) -> Option<BallRegion> {
        None
    }

    fn label(&self) -> &str {
        "set"
    }
}

/// All of `R^d`.
pub struct Everything {
    pub dimension: usize,
}

impl SetOracle for Everything {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
    fn label(&self) -> &str {
        "everything"
    }
}

/// The empty set.
pub struct EmptySet {
    pub dimension: usize,
}

impl SetOracle for EmptySet {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn contains(&self, _x: &[f64]) -> bool {
        false
    }
    fn label(&self) -> &str {
        "empty"
    }
}

/// A single closed ball.
pub struct BallSet {
    pub region: BallRegion,
}

impl BallSet {
    pub fn new(center: Vec<f64>, radius: f64) -> BallSet {
        BallSet {
            region: BallRegion::new(center, radius),
        }
    }
}

impl SetOracle for BallSet {
    fn dimension(&self) -> usize {
        self.region.dimension()
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.region.contains(x)
    }
    fn bounding_hint(&self) -> Option<BallRegion> {
        Some(self.region.clone())
    }
    fn label(&self) -> &str {
        "ball"
    }
}

/// Open half-space `{ x : <normal, x> > offset }`.
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    /// Half-space of points with positive `axis` coordinate.
    pub fn positive_axis(dimension: usize, axis: usize) -> HalfSpace {
        let mut normal = alloc::vec![0.0; dimension];
        normal[axis] = 1.0;
        HalfSpace {
            normal,
            offset: 0.0,
        }
    }
}

impl SetOracle for HalfSpace {
    fn dimension(&self) -> usize {
        self.normal.len()
    }
    fn contains(&self, x: &[f64]) -> bool {
        let dot: f64 = self.normal.iter().zip(x).map(|(n, v)| n * v).sum();
        dot > self.offset
    }
    fn label(&self) -> &str {
        "half-space"
    }
}

/// Complement of a periodic array of cubical holes: the unit cell `[0,1)^d`
/// minus the cube `[0, hole_side)^d`, tiled over `R^d`. Density is
/// `1 - hole_side^d`.
pub struct PeriodicCellComplement {
    pub dimension: usize,
    pub hole_side: f64,
}

impl PeriodicCellComplement {
    /// Choose the hole size so the set has the requested density.
    pub fn with_density(dimension: usize, density: f64) -> PeriodicCellComplement {
        assert!((0.0..=1.0).contains(&density));
        let hole_side = math::powf(1.0 - density, 1.0 / dimension as f64);
        PeriodicCellComplement {
            dimension,
            hole_side,
        }
    }

    pub fn density(&self) -> f64 {
        1.0 - math::powi(self.hole_side, self.dimension as u32)
    }
}

impl SetOracle for PeriodicCellComplement {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn contains(&self, x: &[f64]) -> bool {
        !x.iter().all(|&v| math::frac(v) < self.hole_side)
    }
    fn label(&self) -> &str {
        "periodic-cells"
    }
}

/// Intersection of finitely many oracle sets. Bounded as soon as one member
/// is bounded.
pub struct Intersection {
    pub parts: Vec<Box<dyn SetOracle>>,
    label: String,
}

impl Intersection {
    pub fn new(parts: Vec<Box<dyn SetOracle>>) -> Intersection {
        assert!(!parts.is_empty());
        let d = parts[0].dimension();
        assert!(parts.iter().all(|p| p.dimension() == d));
        Intersection {
            parts,
            label: String::from("intersection"),
        }
    }
}

impl SetOracle for Intersection {
    fn dimension(&self) -> usize {
        self.parts[0].dimension()
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.parts.iter().all(|p| p.contains(x))
    }
    fn bounding_hint(&self) -> Option<BallRegion> {
        self.parts.iter().find_map(|p| p.bounding_hint())
    }
    fn label(&self) -> &str {
        &self.label
    }
}

/// Union of finitely many oracle sets.
pub struct Union {
    pub parts: Vec<Box<dyn SetOracle>>,
    label: String,
}

impl Union {
    pub fn new(parts: Vec<Box<dyn SetOracle>>) -> Union {
        assert!(!parts.is_empty());
        let d = parts[0].dimension();
        assert!(parts.iter().all(|p| p.dimension() == d));
        Union {
            parts,
            label: String::from("union"),
        }
    }
}

impl SetOracle for Union {
    fn dimension(&self) -> usize {
        self.parts[0].dimension()
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }
    fn bounding_hint(&self) -> Option<BallRegion> {
        // bounded only if every part is; take the smallest ball covering all hints
        let mut hints = Vec::new();
        for p in &self.parts {
            hints.push(p.bounding_hint()?);
        }
        let center = hints[0].center.clone();
        let radius = hints
            .iter()
            .map(|h| math::dist(&h.center, &center) + h.radius)
            .fold(0.0f64, f64::max);
        Some(BallRegion { center, radius })
    }
    fn label(&self) -> &str {
        &self.label
    }
}

/// Complement of an oracle set; always treated as unbounded.
pub struct Complement {
    pub inner: Box<dyn SetOracle>,
}

impl SetOracle for Complement {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn contains(&self, x: &[f64]) -> bool {
        !self.inner.contains(x)
    }
    fn label(&self) -> &str {
        "complement"
    }
}
