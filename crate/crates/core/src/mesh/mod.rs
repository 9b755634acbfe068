//! Triangulations of `Ω∖D̄` with tagged boundary edges, boundary frames,
//! quadrature rules, point location and the `gpsmesh v1` text format.

mod generate;
mod io;
mod locator;
mod morph;
mod quadrature;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Point2;

pub use generate::{generate_mesh, generate_mesh_with, MeshOptions};
pub use io::{mesh_roundtrip, read_mesh, write_mesh};
pub use locator::{Location, Locator, TriangleIndex};
pub use morph::{morph_cavity, MorphOptions};
pub use quadrature::{gauss_legendre, QuadratureRule};

/// Tag of a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// Outer boundary outside the measurement arc.
    Outer,
    /// Outer boundary inside the measurement arc Σ.
    Sigma,
    /// Boundary of cavity `k`.
    Cavity(usize),
}

impl BoundaryTag {
    /// Whether the edge lies on `∂Ω` (either `Outer` or `Sigma`).
    pub fn is_outer(self) -> bool {
        matches!(self, BoundaryTag::Outer | BoundaryTag::Sigma)
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryTag::Outer => write!(f, "outer"),
            BoundaryTag::Sigma => write!(f, "sigma"),
            BoundaryTag::Cavity(k) => write!(f, "cavity:{k}"),
        }
    }
}

impl std::str::FromStr for BoundaryTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "outer" => Ok(BoundaryTag::Outer),
            "sigma" => Ok(BoundaryTag::Sigma),
            _ => s
                .strip_prefix("cavity:")
                .and_then(|k| k.parse().ok())
                .map(BoundaryTag::Cavity)
                .ok_or_else(|| format!("unknown boundary tag `{s}`")),
        }
    }
}

/// A boundary edge, oriented so that the domain lies on its left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Outward unit normal and the tangent `τ = e3 × n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFrame {
    pub n: Point2,
    pub tau: Point2,
}

impl BoundaryFrame {
    pub fn from_normal(n: Point2) -> Self {
        Self { n, tau: n.perp() }
    }

    /// `det[n τ]`, equal to one.
    pub fn det(&self) -> f64 {
        self.n.cross(self.tau)
    }
}

/// Unique undirected edges of a mesh; local edge `i` of a triangle joins its
/// vertices `i` and `i + 1 (mod 3)`.
#[derive(Clone, Debug)]
pub struct EdgeTable {
    pub edges: Vec<[usize; 2]>,
    pub tri_edges: Vec<[usize; 3]>,
}

/// A conforming triangulation of `Ω∖D̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point2>,
    /// Positively oriented node triples.
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<u32>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Longest edge length.
    pub h_max: f64,
}

impl Mesh {
    /// Assembles a mesh and checks its structural invariants.
    pub fn new(
        nodes: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        regions: Vec<u32>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let mut mesh = Self {
            nodes,
            triangles,
            regions,
            boundary_edges,
            h_max: 0.0,
        };
        mesh.h_max = mesh.longest_edge();
        mesh.validate()?;
        Ok(mesh)
    }

    fn longest_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |i| (t[i], t[(i + 1) % 3])))
            .map(|(a, b)| self.nodes[a].dist(self.nodes[b]))
            .fold(0.0, f64::max)
    }

    /// Checks orientation, index ranges and the boundary-edge bookkeeping.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.regions.len() != self.triangles.len() {
            return Err(Error::Meshing("region count differs from triangle count".into()));
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::Meshing(format!("triangle {i} references a missing node")));
            }
            if self.signed_area(i) <= 0.0 {
                return Err(Error::Meshing(format!("triangle {i} is not positively oriented")));
            }
        }
        let counts = self.directed_edge_owners();
        for (i, e) in self.boundary_edges.iter().enumerate() {
            let [a, b] = e.nodes;
            if a >= n || b >= n {
                return Err(Error::Meshing(format!("boundary edge {i} references a missing node")));
            }
            let fwd = counts.get(&(a, b)).copied().unwrap_or(0);
            let back = counts.get(&(b, a)).copied().unwrap_or(0);
            if fwd != 1 || back != 0 {
                return Err(Error::Meshing(format!(
                    "boundary edge {i} ({a}, {b}) does not belong to exactly one triangle with the domain on its left"
                )));
            }
        }
        let free = counts
            .keys()
            .filter(|(a, b)| !counts.contains_key(&(*b, *a)))
            .count();
        if free != self.boundary_edges.len() {
            return Err(Error::Meshing(format!(
                "{free} edges lie on one triangle but {} boundary edges are tagged",
                self.boundary_edges.len()
            )));
        }
        Ok(())
    }

    fn directed_edge_owners(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for i in 0..3 {
                *counts.entry((t[i], t[(i + 1) % 3])).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [p, q, r] = self.triangle_points(t);
        0.5 * (q - p).cross(r - p)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point2 {
        let [p, q, r] = self.triangle_points(t);
        Point2::new((p.x1 + q.x1 + r.x1) / 3.0, (p.x2 + q.x2 + r.x2) / 3.0)
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                let u = p[(i + 1) % 3] - p[i];
                let v = p[(i + 2) % 3] - p[i];
                let ang = u.cross(v).abs().atan2(u.dot(v));
                min = min.min(ang.to_degrees());
            }
        }
        min
    }

    pub fn edge_table(&self) -> EdgeTable {
        let mut index = HashMap::with_capacity(3 * self.triangles.len() / 2 + self.boundary_edges.len());
        let mut edges = Vec::new();
        let mut tri_edges = Vec::with_capacity(self.triangles.len());
        for t in &self.triangles {
            let mut te = [0; 3];
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                te[i] = *index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edges.len() - 1
                });
            }
            tri_edges.push(te);
        }
        EdgeTable { edges, tri_edges }
    }

    /// `V − E + F` over vertices, edges and triangles.
    pub fn euler_characteristic(&self) -> i64 {
        let e = self.edge_table().edges.len() as i64;
        self.nodes.len() as i64 - e + self.triangles.len() as i64
    }

    /// Frame of boundary edge `i` of [`Mesh::boundary_edges`].
    pub fn boundary_frame(&self, i: usize) -> Result<BoundaryFrame> {
        let e = self
            .boundary_edges
            .get(i)
            .ok_or_else(|| Error::InvalidArgument(format!("no boundary edge {i}")))?;
        Ok(self.frame_of(e.nodes))
    }

    /// Frame of the edge joining nodes `a` and `b`; fails on interior edges.
    pub fn boundary_frame_between(&self, a: usize, b: usize) -> Result<BoundaryFrame> {
        let e = self
            .boundary_edges
            .iter()
            .find(|e| e.nodes == [a, b] || e.nodes == [b, a])
            .ok_or_else(|| Error::InvalidArgument(format!("edge ({a}, {b}) is not a boundary edge")))?;
        Ok(self.frame_of(e.nodes))
    }

    fn frame_of(&self, [a, b]: [usize; 2]) -> BoundaryFrame {
        let t = (self.nodes[b] - self.nodes[a]).normalized();
        BoundaryFrame::from_normal(Point2::new(t.x2, -t.x1))
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        self.nodes[e.nodes[0]].dist(self.nodes[e.nodes[1]])
    }

    pub fn edges_tagged(&self, pred: impl Fn(BoundaryTag) -> bool) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges.iter().filter(move |e| pred(e.tag))
    }

    /// Node loops formed by the boundary edges selected by `pred`, each in
    /// edge orientation order. Fails if the selection is not a union of
    /// closed loops.
    pub fn boundary_loops(&self, pred: impl Fn(BoundaryTag) -> bool) -> Result<Vec<Vec<usize>>> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        let mut starts = Vec::new();
        for e in self.edges_tagged(pred) {
            if next.insert(e.nodes[0], e.nodes[1]).is_some() {
                return Err(Error::Meshing(format!("node {} starts two boundary edges", e.nodes[0])));
            }
            starts.push(e.nodes[0]);
        }
        starts.sort_unstable();
        let mut seen = std::collections::HashSet::new();
        let mut loops = Vec::new();
        for s in starts {
            if seen.contains(&s) {
                continue;
            }
            let mut lp = vec![s];
            seen.insert(s);
            let mut cur = s;
            loop {
                let nx = *next
                    .get(&cur)
                    .ok_or_else(|| Error::Meshing(format!("boundary chain broken at node {cur}")))?;
                if nx == s {
                    break;
                }
                if !seen.insert(nx) {
                    return Err(Error::Meshing(format!("boundary chain revisits node {nx}")));
                }
                lp.push(nx);
                cur = nx;
            }
            loops.push(lp);
        }
        Ok(loops)
    }

    /// Owning triangle and local edge index of every boundary edge.
    pub fn boundary_edge_owners(&self) -> Vec<(usize, usize)> {
        let mut owner = HashMap::with_capacity(3 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                owner.insert((tri[i], tri[(i + 1) % 3]), (t, i));
            }
        }
        self.boundary_edges
            .iter()
            .map(|e| owner[&(e.nodes[0], e.nodes[1])])
            .collect()
    }

    /// Number of cavities appearing in the boundary tags.
    pub fn num_cavities(&self) -> usize {
        self.boundary_edges
            .iter()
            .filter_map(|e| match e.tag {
                BoundaryTag::Cavity(k) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Indices of nodes lying on boundary edges selected by `pred`, sorted.
    pub fn boundary_nodes(&self, pred: impl Fn(BoundaryTag) -> bool) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .edges_tagged(pred)
            .flat_map(|e| e.nodes)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Mesh {
        let nodes = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let tris = vec![[0, 1, 2], [0, 2, 3]];
        let edges = [[0, 1], [1, 2], [2, 3], [3, 0]]
            .iter()
            .map(|&nodes| BoundaryEdge {
                nodes,
                tag: BoundaryTag::Outer,
            })
            .collect();
        Mesh::new(nodes, tris, vec![0, 0], edges).unwrap()
    }

    #[test]
    fn square_invariants() {
        let m = square();
        assert_eq!(m.euler_characteristic(), 1);
        assert!((m.total_area() - 1.0).abs() < 1e-15);
        assert!((m.h_max - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.boundary_loops(|_| true).unwrap(), vec![vec![0, 1, 2, 3]]);
        let f = m.boundary_frame(1).unwrap();
        assert_eq!(f.n, Point2::new(1.0, 0.0));
        assert_eq!(f.tau, Point2::new(0.0, 1.0));
        assert_eq!(f.det(), 1.0);
        assert!(m.boundary_frame_between(0, 2).is_err());
    }

    #[test]
    fn rejects_inverted_triangle_and_missing_tags() {
        let m = square();
        let mut bad = m.clone();
        bad.triangles[0] = [0, 2, 1];
        assert!(bad.validate().is_err());
        let mut untagged = m.clone();
        untagged.boundary_edges.pop();
        assert!(untagged.validate().is_err());
    }

    #[test]
    fn tag_text_roundtrip() {
        for t in [BoundaryTag::Outer, BoundaryTag::Sigma, BoundaryTag::Cavity(3)] {
            assert_eq!(t.to_string().parse::<BoundaryTag>().unwrap(), t);
        }
        assert!("cavity:x".parse::<BoundaryTag>().is_err());
    }
}
