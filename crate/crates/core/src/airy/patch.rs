//! Simply connected patches of `Ω∖D̄` carrying a local Airy function.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point2, PolylineIndex};

/// Shape of a patch.
#[derive(Clone, Debug, PartialEq)]
pub enum PatchKind {
    /// Disk compactly contained in `Ω∖D̄`.
    InteriorDisk { center: Point2, radius: f64 },
    /// `R_{r, 2M0 r}(x̄) ∩ Ω∖D̄` in the frame of cavity `cavity` at the
    /// boundary point `x̄ = D(θ)`.
    BoundaryRect {
        cavity: usize,
        theta: f64,
        origin: Point2,
        /// Unit tangent and unit normal pointing away from the cavity.
        tangent: Point2,
        normal: Point2,
        half_width: f64,
        half_height: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub kind: PatchKind,
    /// Gauge point.
    pub p0: Point2,
}

const PERIMETER_SAMPLES: usize = 512;
const GRID: usize = 48;

impl Patch {
    /// Disk `B_radius(center)`; fails unless the closed disk lies in `Ω∖D̄`.
    pub fn interior_disk(domain: &DomainSpec, center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Airy(format!("patch radius must be positive, got {radius}")));
        }
        if !domain.contains(center) {
            return Err(Error::Airy("patch center lies outside the body".into()));
        }
        for (k, c) in domain.cavities.iter().enumerate() {
            let d = PolylineIndex::of_shape(c, 2048).distance(center);
            if d <= radius {
                return Err(Error::Airy(format!(
                    "disk of radius {radius} meets cavity {k}; the patch would not be simply connected"
                )));
            }
        }
        if PolylineIndex::of_shape(&domain.outer, 2048).distance(center) <= radius {
            return Err(Error::Airy("disk meets the outer boundary".into()));
        }
        Ok(Self {
            kind: PatchKind::InteriorDisk { center, radius },
            p0: center,
        })
    }

    /// Rectangle `R_{r, 2M0 r}` at the point of cavity `cavity` with polar
    /// angle `theta`, gauged at that point.
    pub fn boundary_rect(domain: &DomainSpec, cavity: usize, theta: f64, r: f64) -> Result<Self> {
        let shape = domain
            .cavities
            .get(cavity)
            .ok_or_else(|| Error::Airy(format!("no cavity {cavity}")))?;
        let origin = shape.eval(theta);
        let normal = shape.outward_normal(theta);
        let tangent = normal.perp() * -1.0;
        let patch = Self {
            kind: PatchKind::BoundaryRect {
                cavity,
                theta,
                origin,
                tangent,
                normal,
                half_width: r,
                half_height: 2.0 * domain.m0 * r,
            },
            p0: origin,
        };
        patch.check_rect(domain)?;
        Ok(patch)
    }

    fn check_rect(&self, domain: &DomainSpec) -> Result<()> {
        let PatchKind::BoundaryRect { cavity, .. } = self.kind else { unreachable!() };
        let shape = &domain.cavities[cavity];
        // Walk the rectangle boundary; the cavity must enter and leave once.
        let corners = self.rect_corners();
        let mut inside = Vec::with_capacity(PERIMETER_SAMPLES);
        for k in 0..PERIMETER_SAMPLES {
            let s = 4.0 * k as f64 / PERIMETER_SAMPLES as f64;
            let side = s.floor() as usize;
            let f = s - side as f64;
            let p = corners[side] + (corners[(side + 1) % 4] - corners[side]) * f;
            inside.push(shape.contains(p));
        }
        let crossings = (0..inside.len()).filter(|&k| inside[k] != inside[(k + 1) % inside.len()]).count();
        if crossings != 2 {
            return Err(Error::Airy(format!(
                "cavity {cavity} crosses the patch rectangle {crossings} times; the patch is not simply connected"
            )));
        }
        for p in self.grid(GRID) {
            if !domain.outer.contains(p) {
                return Err(Error::Airy("patch rectangle leaves the outer boundary".into()));
            }
            for (k, c) in domain.cavities.iter().enumerate() {
                if k != cavity && c.contains(p) {
                    return Err(Error::Airy(format!("patch rectangle meets cavity {k}")));
                }
            }
        }
        Ok(())
    }

    fn rect_corners(&self) -> [Point2; 4] {
        let PatchKind::BoundaryRect {
            origin,
            tangent,
            normal,
            half_width,
            half_height,
            ..
        } = self.kind
        else {
            unreachable!()
        };
        let at = |u: f64, v: f64| origin + tangent * u + normal * v;
        [
            at(-half_width, -half_height),
            at(half_width, -half_height),
            at(half_width, half_height),
            at(-half_width, half_height),
        ]
    }

    /// Length scale of the patch (radius or rectangle half-width).
    pub fn scale(&self) -> f64 {
        match self.kind {
            PatchKind::InteriorDisk { radius, .. } => radius,
            PatchKind::BoundaryRect { half_width, half_height, .. } => half_width.max(half_height),
        }
    }

    pub fn center(&self) -> Point2 {
        match self.kind {
            PatchKind::InteriorDisk { center, .. } => center,
            PatchKind::BoundaryRect { origin, .. } => origin,
        }
    }

    /// Whether `x` lies in the patch region (ignoring the cavity itself).
    pub fn in_region(&self, x: Point2) -> bool {
        match self.kind {
            PatchKind::InteriorDisk { center, radius } => x.dist(center) <= radius,
            PatchKind::BoundaryRect {
                origin,
                tangent,
                normal,
                half_width,
                half_height,
                ..
            } => {
                let d = x - origin;
                d.dot(tangent).abs() <= half_width && d.dot(normal).abs() <= half_height
            }
        }
    }

    /// Whether `x` lies in the patch and in `Ω∖D̄`.
    pub fn contains(&self, domain: &DomainSpec, x: Point2) -> bool {
        self.in_region(x) && domain.contains(x)
    }

    /// `n × n` grid over the bounding region (disk: its bounding square).
    fn grid(&self, n: usize) -> Vec<Point2> {
        let mut out = Vec::with_capacity(n * n);
        let t = |k: usize| -1.0 + 2.0 * (k as f64 + 0.5) / n as f64;
        match self.kind {
            PatchKind::InteriorDisk { center, radius } => {
                for i in 0..n {
                    for j in 0..n {
                        let p = center + Point2::new(t(i), t(j)) * radius;
                        if p.dist(center) <= radius {
                            out.push(p);
                        }
                    }
                }
            }
            PatchKind::BoundaryRect {
                origin,
                tangent,
                normal,
                half_width,
                half_height,
                ..
            } => {
                for i in 0..n {
                    for j in 0..n {
                        out.push(origin + tangent * (t(i) * half_width) + normal * (t(j) * half_height));
                    }
                }
            }
        }
        out
    }

    /// Midpoint-rule samples of the patch ∩ `Ω∖D̄` with equal weights.
    pub fn samples(&self, domain: &DomainSpec, n: usize) -> (Vec<Point2>, Vec<f64>) {
        let cell = match self.kind {
            PatchKind::InteriorDisk { radius, .. } => (2.0 * radius / n as f64).powi(2),
            PatchKind::BoundaryRect { half_width, half_height, .. } => {
                4.0 * half_width * half_height / (n * n) as f64
            }
        };
        let pts: Vec<Point2> = self.grid(n).into_iter().filter(|p| domain.contains(*p)).collect();
        let w = vec![cell; pts.len()];
        (pts, w)
    }

    /// Points of the attached cavity arc inside the rectangle with the unit
    /// normal pointing into the body.
    pub fn cavity_arc(&self, domain: &DomainSpec, n: usize) -> Result<Vec<(Point2, Point2)>> {
        let PatchKind::BoundaryRect { cavity, .. } = self.kind else {
            return Err(Error::Airy("an interior patch has no cavity arc".into()));
        };
        let shape = &domain.cavities[cavity];
        let m = 16 * n;
        let mut out: Vec<(Point2, Point2)> = (0..m)
            .map(|k| TAU * k as f64 / m as f64)
            .filter(|&t| self.in_region(shape.eval(t)))
            .map(|t| (shape.eval(t), shape.outward_normal(t)))
            .collect();
        if out.len() < 2 {
            return Err(Error::Airy("cavity arc does not cross the patch".into()));
        }
        let step = (out.len() / n).max(1);
        out = out.into_iter().step_by(step).collect();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StarShape;

    fn annulus() -> DomainSpec {
        DomainSpec::new(
            StarShape::circle(Point2::ORIGIN, 2.0).unwrap(),
            vec![StarShape::circle(Point2::ORIGIN, 1.0).unwrap()],
            None,
            0.25,
            0.5,
            10.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn disks_around_cavities_are_rejected() {
        let d = annulus();
        assert!(Patch::interior_disk(&d, Point2::new(1.5, 0.0), 0.3).is_ok());
        assert!(matches!(Patch::interior_disk(&d, Point2::new(1.5, 0.0), 0.6), Err(Error::Airy(_))));
        assert!(Patch::interior_disk(&d, Point2::ORIGIN, 0.5).is_err());
    }

    #[test]
    fn boundary_rectangle_geometry() {
        let d = annulus();
        let p = Patch::boundary_rect(&d, 0, 0.0, 0.25).unwrap();
        assert!(p.contains(&d, Point2::new(1.1, 0.1)));
        assert!(!p.contains(&d, Point2::new(0.9, 0.0)));
        let arc = p.cavity_arc(&d, 20).unwrap();
        assert!(arc.iter().all(|(x, n)| (x.norm() - 1.0).abs() < 1e-12 && n.dot(*x) > 0.99));
        // Too large a rectangle wraps around the cavity.
        assert!(Patch::boundary_rect(&d, 0, 0.0, 1.2).is_err());
    }
}
