//! Plane geometry: points, infinitesimal rigid motions, star-shaped
//! boundary curves, the domain description with its a-priori constants,
//! and set distances between cavities.

mod apriori;
mod distance;
mod domain;
mod regularity;
mod star;

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub use apriori::{apriori_check, cavity_checks, cavity_scale, AprioriReport, CheckItem, CAVITY_SCALE};
pub use distance::{
    auxiliary_distances, hausdorff_distance, PolylineIndex, RegionSampler, DEFAULT_SAMPLES, MIN_SAMPLES,
};
pub use domain::{ArcInterval, DomainSpec};
pub use regularity::{graph_regularity, RegularityReport};
pub use star::{eval_star, ArclengthTable, StarShape};

/// A point (or free vector) of the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// z-component of the cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise rotation by a right angle, `e3 × v`.
    pub fn perp(self) -> Self {
        Self::new(-self.x2, self.x1)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.x1 / n, self.x2 / n)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x1, self.x2]
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(a: [f64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x1 += o.x1;
        self.x2 += o.x2;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x1 * s, self.x2 * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x1, -self.x2)
    }
}

/// Infinitesimal rigid displacement `r(x) = c + W x` with `W` antisymmetric,
/// stored through its spin `w` so that `W = [[0, -w], [w, 0]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RigidMotion {
    pub c: [f64; 2],
    pub w: f64,
}

impl RigidMotion {
    pub fn new(c: [f64; 2], w: f64) -> Self {
        Self { c, w }
    }

    /// The antisymmetric matrix `W`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[0.0, -self.w], [self.w, 0.0]]
    }

    pub fn eval(&self, x: Point2) -> [f64; 2] {
        rigid_eval(self, x)
    }
}

/// Evaluates `c + w·(−x2, x1)`.
pub fn rigid_eval(r: &RigidMotion, x: Point2) -> [f64; 2] {
    [r.c[0] - r.w * x.x2, r.c[1] + r.w * x.x1]
}

/// The three auxiliary cavity distances used by the stability argument.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DistanceTriple {
    /// Hausdorff distance between the closed complements `Ω̄∖D1`, `Ω̄∖D2`.
    pub d: f64,
    /// Largest distance from a cavity boundary to the other complement.
    pub d_m: f64,
    /// Hausdorff distance between the closed cavities.
    pub d_h: f64,
}

impl DistanceTriple {
    /// `d_H ≤ √(1+M0²)·d + slack`.
    pub fn satisfies_geometric_law(&self, m0: f64, slack: f64) -> bool {
        self.d_h <= (1.0 + m0 * m0).sqrt() * self.d + slack
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rigid_eval_examples() {
        let x = Point2::new(0.3, -1.7);
        assert_eq!(rigid_eval(&RigidMotion::default(), x), [0.0, 0.0]);
        let t = RigidMotion::new([1.0, 2.0], 0.0);
        assert_eq!(rigid_eval(&t, x), [1.0, 2.0]);
        let s = RigidMotion::new([0.0, 0.0], 1.0);
        assert_eq!(rigid_eval(&s, Point2::new(1.0, 0.0)), [0.0, 1.0]);
    }

    #[test]
    fn rigid_matrix_is_antisymmetric() {
        let w = RigidMotion::new([0.5, -0.2], 0.37).matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(w[i][j] + w[j][i], 0.0);
            }
        }
    }

    #[test]
    fn rigid_fields_have_zero_symmetric_gradient() {
        let r = RigidMotion::new([0.4, -1.1], 2.3);
        let step = 1e-5;
        for &(x1, x2) in &[(0.0, 0.0), (1.0, -2.0), (-3.5, 0.25)] {
            let x = Point2::new(x1, x2);
            let d1p = r.eval(x + Point2::new(step, 0.0));
            let d1m = r.eval(x - Point2::new(step, 0.0));
            let d2p = r.eval(x + Point2::new(0.0, step));
            let d2m = r.eval(x - Point2::new(0.0, step));
            let g = |p: [f64; 2], m: [f64; 2], k: usize| (p[k] - m[k]) / (2.0 * step);
            let e11 = g(d1p, d1m, 0);
            let e22 = g(d2p, d2m, 1);
            let e12 = 0.5 * (g(d2p, d2m, 0) + g(d1p, d1m, 1));
            let scale = r.w.abs().max(1.0);
            for e in [e11, e22, e12] {
                assert!(e.abs() <= 1e-8 * scale, "{e}");
            }
        }
    }
}
