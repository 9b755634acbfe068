//! Point location in a mesh.

use std::collections::HashMap;

use rstar::primitives::{GeomWithData, Line, Rectangle};
use rstar::{RTree, AABB};

use super::Mesh;
use crate::geometry::Point2;

/// Containing triangle and barycentric coordinates of a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub triangle: usize,
    pub bary: [f64; 3],
}

type TriBox = GeomWithData<Rectangle<[f64; 2]>, usize>;
type Seg = GeomWithData<Line<[f64; 2]>, usize>;

/// Bounding-box tree over the triangles of a mesh, independent of the
/// mesh's lifetime.
#[derive(Clone, Debug)]
pub struct TriangleIndex {
    tree: RTree<TriBox>,
}

impl TriangleIndex {
    pub fn new(mesh: &Mesh) -> Self {
        let boxes = (0..mesh.triangles.len())
            .map(|t| {
                let p = mesh.triangle_points(t);
                let lo = [
                    p.iter().map(|q| q.x1).fold(f64::INFINITY, f64::min),
                    p.iter().map(|q| q.x2).fold(f64::INFINITY, f64::min),
                ];
                let hi = [
                    p.iter().map(|q| q.x1).fold(f64::NEG_INFINITY, f64::max),
                    p.iter().map(|q| q.x2).fold(f64::NEG_INFINITY, f64::max),
                ];
                GeomWithData::new(Rectangle::from_corners(lo, hi), t)
            })
            .collect();
        Self {
            tree: RTree::bulk_load(boxes),
        }
    }

    /// Triangle of `mesh` containing `p`, if any; `mesh` must be the mesh the
    /// index was built from.
    pub fn locate(&self, mesh: &Mesh, p: Point2) -> Option<Location> {
        let mut best: Option<(f64, Location)> = None;
        for item in self.tree.locate_in_envelope_intersecting(&AABB::from_point([p.x1, p.x2])) {
            let bary = barycentric(mesh.triangle_points(item.data), p);
            let worst = bary.iter().copied().fold(f64::INFINITY, f64::min);
            if worst >= -INSIDE_TOL && best.map_or(true, |(w, _)| worst > w) {
                best = Some((
                    worst,
                    Location {
                        triangle: item.data,
                        bary,
                    },
                ));
            }
        }
        best.map(|(_, l)| l)
    }

    /// Triangles whose bounding boxes meet the box `[lo, hi]`, in
    /// increasing order.
    pub fn intersecting(&self, lo: Point2, hi: Point2) -> Vec<usize> {
        let env = AABB::from_corners(lo.to_array(), hi.to_array());
        let mut out: Vec<usize> = self
            .tree
            .locate_in_envelope_intersecting(&env)
            .map(|g| g.data)
            .collect();
        out.sort_unstable();
        out
    }
}

/// Triangle index plus a segment tree over the boundary for nearest-point
/// queries outside the mesh.
pub struct Locator<'m> {
    mesh: &'m Mesh,
    tris: TriangleIndex,
    boundary: RTree<Seg>,
}

const INSIDE_TOL: f64 = 1e-12;

impl<'m> Locator<'m> {
    pub fn new(mesh: &'m Mesh) -> Self {
        let mut owner = HashMap::with_capacity(3 * mesh.triangles.len());
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for i in 0..3 {
                owner.insert((tri[i], tri[(i + 1) % 3]), t);
            }
        }
        let segs = mesh
            .boundary_edges
            .iter()
            .map(|e| {
                let [a, b] = e.nodes;
                GeomWithData::new(
                    Line::new(mesh.nodes[a].to_array(), mesh.nodes[b].to_array()),
                    owner[&(a, b)],
                )
            })
            .collect();
        Self {
            mesh,
            tris: TriangleIndex::new(mesh),
            boundary: RTree::bulk_load(segs),
        }
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    /// Barycentric coordinates of `p` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, p: Point2) -> [f64; 3] {
        barycentric(self.mesh.triangle_points(t), p)
    }

    /// Triangle containing `p`, if any.
    pub fn locate(&self, p: Point2) -> Option<Location> {
        self.tris.locate(self.mesh, p)
    }

    /// Containing triangle, or for points outside the mesh the boundary
    /// triangle at the nearest boundary point (barycentrics of that point).
    pub fn locate_or_nearest(&self, p: Point2) -> Location {
        if let Some(l) = self.locate(p) {
            return l;
        }
        let seg = self
            .boundary
            .nearest_neighbor(&[p.x1, p.x2])
            .expect("mesh has boundary edges");
        let (a, b) = (Point2::from(seg.geom().from), Point2::from(seg.geom().to));
        let d = b - a;
        let s = ((p - a).dot(d) / d.norm2()).clamp(0.0, 1.0);
        let foot = a + d * s;
        let mut bary = self.barycentric(seg.data, foot);
        for v in &mut bary {
            *v = v.max(0.0);
        }
        let sum: f64 = bary.iter().sum();
        for v in &mut bary {
            *v /= sum;
        }
        Location {
            triangle: seg.data,
            bary,
        }
    }

    /// Linear interpolation of nodal values.
    pub fn interpolate<const D: usize>(&self, values: &[[f64; D]], p: Point2) -> [f64; D] {
        let loc = self.locate_or_nearest(p);
        let tri = self.mesh.triangles[loc.triangle];
        let mut out = [0.0; D];
        for (k, &v) in tri.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(values[v]) {
                *o += loc.bary[k] * x;
            }
        }
        out
    }
}

pub(crate) fn barycentric([a, b, c]: [Point2; 3], p: Point2) -> [f64; 3] {
    let det = (b - a).cross(c - a);
    let l1 = (p - a).cross(c - a) / det;
    let l2 = (b - a).cross(p - a) / det;
    [1.0 - l1 - l2, l1, l2]
}
