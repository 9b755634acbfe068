use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rstar::primitives::Line;
use rstar::{PointDistance, RTree};

use super::apriori::cavity_checks;
use super::{DistanceTriple, DomainSpec, Point2, StarShape};
use crate::error::{Error, Result};

/// Smallest accepted sample count for sampled set distances.
pub const MIN_SAMPLES: usize = 256;
/// Default number of boundary samples per curve.
pub const DEFAULT_SAMPLES: usize = 2048;

/// Nearest-segment queries against one or more closed polylines.
pub struct PolylineIndex {
    tree: RTree<Line<[f64; 2]>>,
}

impl PolylineIndex {
    pub fn from_loops<'a>(loops: impl IntoIterator<Item = &'a [Point2]>) -> Self {
        let mut segments = Vec::new();
        for pts in loops {
            let n = pts.len();
            for i in 0..n {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                segments.push(Line::new(a.to_array(), b.to_array()));
            }
        }
        Self {
            tree: RTree::bulk_load(segments),
        }
    }

    /// Index over a dense polyline of `shape`.
    pub fn of_shape(shape: &StarShape, n: usize) -> Self {
        let pts = shape.polyline(n);
        Self::from_loops([pts.as_slice()])
    }

    /// Index over every boundary curve of a domain.
    pub fn of_domain(domain: &DomainSpec, n: usize) -> Self {
        let loops: Vec<Vec<Point2>> = std::iter::once(&domain.outer)
            .chain(&domain.cavities)
            .map(|s| s.polyline(n))
            .collect();
        Self::from_loops(loops.iter().map(Vec::as_slice))
    }

    pub fn distance(&self, p: Point2) -> f64 {
        let q = p.to_array();
        self.tree
            .nearest_neighbor(&q)
            .map(|l| l.distance_2(&q).sqrt())
            .unwrap_or(f64::INFINITY)
    }
}

/// Deterministic samples of the closed region bounded by a star curve:
/// equal-angle boundary points plus rejection-sampled interior points.
pub struct RegionSampler {
    pub boundary: Vec<Point2>,
    pub interior: Vec<Point2>,
}

impl RegionSampler {
    pub fn new(shape: &StarShape, n: usize) -> Self {
        let n = n.max(MIN_SAMPLES);
        let boundary = shape.polyline(n);
        let r = shape.max_radius();
        let c = shape.center();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ n as u64);
        let mut interior = Vec::with_capacity(n);
        while interior.len() < n {
            let p = c + Point2::new(rng.random_range(-r..r), rng.random_range(-r..r));
            if shape.contains(p) {
                interior.push(p);
            }
        }
        Self { boundary, interior }
    }

    pub fn all(&self) -> impl Iterator<Item = Point2> + '_ {
        self.boundary.iter().chain(&self.interior).copied()
    }
}

/// Distance from `p` to the closed region bounded by `shape`.
fn dist_to_region(shape: &StarShape, index: &PolylineIndex, p: Point2) -> f64 {
    if shape.contains(p) {
        0.0
    } else {
        index.distance(p)
    }
}

/// Sampled Hausdorff distance between the closed regions bounded by `a` and
/// `b`. `n` below [`MIN_SAMPLES`] is raised to it.
pub fn hausdorff_distance(a: &StarShape, b: &StarShape, n: usize) -> f64 {
    let n = n.max(MIN_SAMPLES);
    let (sa, sb) = (RegionSampler::new(a, n), RegionSampler::new(b, n));
    let (ia, ib) = (PolylineIndex::of_shape(a, 4 * n), PolylineIndex::of_shape(b, 4 * n));
    let ab = sa.all().map(|p| dist_to_region(b, &ib, p)).fold(0.0, f64::max);
    let ba = sb.all().map(|p| dist_to_region(a, &ia, p)).fold(0.0, f64::max);
    ab.max(ba)
}

/// One-sided terms of `d` and `d_m` for the ordered pair `(d1, d2)`:
/// the sup over `Ω̄∖D1` (resp. `∂D1`) of the distance to `Ω̄∖D2`.
fn one_sided(
    d1: &StarShape,
    s1: &RegionSampler,
    d2: &StarShape,
    s2: &RegionSampler,
    i2: &PolylineIndex,
) -> (f64, f64) {
    // Points of Ω̄∖D1 at positive distance from Ω̄∖D2 lie inside D2, where the
    // nearest point of the complement is on ∂D2.
    let on_boundary = s1
        .boundary
        .iter()
        .filter(|p| d2.contains(**p))
        .map(|p| i2.distance(*p))
        .fold(0.0, f64::max);
    let inside = s2
        .all()
        .filter(|p| d2.contains(*p) && !d1.contains(*p))
        .map(|p| i2.distance(p))
        .fold(0.0, f64::max);
    (on_boundary.max(inside), on_boundary)
}

/// Auxiliary distances `(d, d_m, d_H)` between two cavities of `omega`.
///
/// Each cavity is checked against the a-priori cavity constraints of `omega`
/// (containment, distance to the outer boundary, boundary regularity).
pub fn auxiliary_distances(
    d1: &StarShape,
    d2: &StarShape,
    omega: &DomainSpec,
    n: usize,
) -> Result<DistanceTriple> {
    for (name, d) in [("D1", d1), ("D2", d2)] {
        if let Some(bad) = cavity_checks(omega, d).into_iter().find(|c| !c.passed) {
            return Err(Error::Constraint(format!("{name}: {}", bad.describe())));
        }
    }
    let n = n.max(MIN_SAMPLES);
    let (s1, s2) = (RegionSampler::new(d1, n), RegionSampler::new(d2, n));
    let (i1, i2) = (PolylineIndex::of_shape(d1, 4 * n), PolylineIndex::of_shape(d2, 4 * n));
    let (d12, m12) = one_sided(d1, &s1, d2, &s2, &i2);
    let (d21, m21) = one_sided(d2, &s2, d1, &s1, &i1);
    let triple = DistanceTriple {
        d: d12.max(d21),
        d_m: m12.max(m21),
        d_h: hausdorff_distance(d1, d2, n),
    };
    if !triple.satisfies_geometric_law(omega.m0, 1e-3 * omega.r0) {
        warn!(
            "d_H = {} exceeds sqrt(1+M0^2)·d = {}",
            triple.d_h,
            (1.0 + omega.m0 * omega.m0).sqrt() * triple.d
        );
    }
    Ok(triple)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(c: (f64, f64), r: f64) -> StarShape {
        StarShape::circle(Point2::new(c.0, c.1), r).unwrap()
    }

    fn big_domain() -> DomainSpec {
        DomainSpec::new(disk((0.0, 0.0), 3.0), vec![], None, 0.25, 0.5, 30.0, 1.0).unwrap()
    }

    #[test]
    fn identical_sets_have_zero_distance() {
        let a = disk((0.1, 0.2), 1.0);
        assert!(hausdorff_distance(&a, &a, 512) < 1e-12);
    }

    #[test]
    fn offset_disks() {
        // Oracle: brute force over a dense angular sample of both circles.
        let (a, b) = (disk((0.0, 0.0), 1.0), disk((0.3, 0.0), 1.0));
        let brute = {
            let pa = a.polyline(20000);
            let ib = PolylineIndex::of_shape(&b, 20000);
            pa.iter()
                .filter(|p| !b.contains(**p))
                .map(|p| ib.distance(*p))
                .fold(0.0, f64::max)
        };
        assert!((brute - 0.3).abs() < 1e-6);
        let d = hausdorff_distance(&a, &b, 2048);
        assert!((d - 0.3).abs() < 2e-3, "{d}");
    }

    #[test]
    fn concentric_disks() {
        let d = hausdorff_distance(&disk((0.0, 0.0), 1.0), &disk((0.0, 0.0), 0.8), 2048);
        assert!((d - 0.2).abs() < 1e-5, "{d}");
    }

    #[test]
    fn auxiliary_distances_of_identical_cavities_vanish() {
        let c = disk((0.0, 0.0), 0.5);
        let t = auxiliary_distances(&c, &c, &big_domain(), 1024).unwrap();
        assert!(t.d < 1e-12 && t.d_m < 1e-12 && t.d_h < 1e-12);
    }

    #[test]
    fn auxiliary_distances_offset() {
        let t = auxiliary_distances(&disk((0.0, 0.0), 0.5), &disk((0.1, 0.0), 0.5), &big_domain(), 2048)
            .unwrap();
        assert!((t.d_m - 0.1).abs() < 1e-3, "{t:?}");
        assert!((t.d_h - 0.1).abs() < 1e-3, "{t:?}");
        assert!(t.satisfies_geometric_law(0.5, 1e-3 * 0.25));
    }

    #[test]
    fn auxiliary_distances_concentric() {
        let t = auxiliary_distances(&disk((0.0, 0.0), 0.5), &disk((0.0, 0.0), 0.45), &big_domain(), 2048)
            .unwrap();
        assert!((t.d - 0.05).abs() < 1e-3, "{t:?}");
        assert!((t.d_m - 0.05).abs() < 1e-3, "{t:?}");
    }

    #[test]
    fn cavity_outside_the_class_is_rejected() {
        let err = auxiliary_distances(&disk((0.0, 0.0), 0.5), &disk((2.6, 0.0), 0.3), &big_domain(), 512)
            .unwrap_err();
        assert!(matches!(err, Error::Constraint(_)));
    }
}
