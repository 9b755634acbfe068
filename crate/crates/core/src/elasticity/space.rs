//! Lagrange finite element spaces of degree one and two on a triangle mesh.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::{EdgeTable, Mesh};

/// Polynomial degree of the displacement approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementOrder {
    Linear,
    Quadratic,
}

impl ElementOrder {
    pub fn degree(self) -> u32 {
        match self {
            ElementOrder::Linear => 1,
            ElementOrder::Quadratic => 2,
        }
    }

    pub fn from_degree(p: u32) -> Result<Self> {
        match p {
            1 => Ok(ElementOrder::Linear),
            2 => Ok(ElementOrder::Quadratic),
            _ => Err(Error::InvalidArgument(format!("element order must be 1 or 2, got {p}"))),
        }
    }

    pub fn local_dofs(self) -> usize {
        match self {
            ElementOrder::Linear => 3,
            ElementOrder::Quadratic => 6,
        }
    }
}

/// Scalar Lagrange space; vector fields use two interleaved copies
/// (global index `2·dof + component`).
#[derive(Clone, Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    order: ElementOrder,
    edges: Option<EdgeTable>,
}

/// Local shape data of one triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    /// Gradients of the barycentric coordinates.
    pub grad_bary: [Point2; 3],
    pub area: f64,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, order: ElementOrder) -> Self {
        let edges = (order == ElementOrder::Quadratic).then(|| mesh.edge_table());
        Self { mesh, order, edges }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn order(&self) -> ElementOrder {
        self.order
    }

    /// Number of scalar degrees of freedom.
    pub fn num_dofs(&self) -> usize {
        self.mesh.num_nodes() + self.edges.as_ref().map_or(0, |e| e.edges.len())
    }

    /// Scalar dofs of triangle `t`: the vertices, then (for quadratic
    /// elements) the midpoints of local edges `(0,1)`, `(1,2)`, `(2,0)`.
    pub fn element_dofs(&self, t: usize) -> ([usize; 6], usize) {
        let tri = self.mesh.triangles[t];
        let mut d = [tri[0], tri[1], tri[2], 0, 0, 0];
        if let Some(e) = &self.edges {
            let n = self.mesh.num_nodes();
            for i in 0..3 {
                d[3 + i] = n + e.tri_edges[t][i];
            }
        }
        (d, self.order.local_dofs())
    }

    /// Location of every scalar dof.
    pub fn dof_points(&self) -> Vec<Point2> {
        let mut pts = self.mesh.nodes.clone();
        if let Some(e) = &self.edges {
            pts.extend(
                e.edges
                    .iter()
                    .map(|[a, b]| (self.mesh.nodes[*a] + self.mesh.nodes[*b]) * 0.5),
            );
        }
        pts
    }

    pub fn edge_table(&self) -> Option<&EdgeTable> {
        self.edges.as_ref()
    }

    pub fn geometry(&self, t: usize) -> ElementGeometry {
        element_geometry(self.mesh.triangle_points(t))
    }

    /// Shape function values at barycentric coordinates `l`.
    pub fn shape(&self, l: [f64; 3]) -> [f64; 6] {
        match self.order {
            ElementOrder::Linear => [l[0], l[1], l[2], 0.0, 0.0, 0.0],
            ElementOrder::Quadratic => [
                l[0] * (2.0 * l[0] - 1.0),
                l[1] * (2.0 * l[1] - 1.0),
                l[2] * (2.0 * l[2] - 1.0),
                4.0 * l[0] * l[1],
                4.0 * l[1] * l[2],
                4.0 * l[2] * l[0],
            ],
        }
    }

    /// Shape function gradients at barycentric coordinates `l`.
    pub fn shape_grad(&self, g: &ElementGeometry, l: [f64; 3]) -> [Point2; 6] {
        let gb = g.grad_bary;
        match self.order {
            ElementOrder::Linear => [gb[0], gb[1], gb[2], Point2::ORIGIN, Point2::ORIGIN, Point2::ORIGIN],
            ElementOrder::Quadratic => {
                let pair = |i: usize, j: usize| (gb[j] * l[i] + gb[i] * l[j]) * 4.0;
                [
                    gb[0] * (4.0 * l[0] - 1.0),
                    gb[1] * (4.0 * l[1] - 1.0),
                    gb[2] * (4.0 * l[2] - 1.0),
                    pair(0, 1),
                    pair(1, 2),
                    pair(2, 0),
                ]
            }
        }
    }

    /// Values of the edge shape functions along a boundary edge from local
    /// vertex `i` to `i + 1` at fraction `s`: `(dof slots, values)`.
    pub fn edge_trace(&self, local_edge: usize, s: f64) -> ([usize; 3], [f64; 3], usize) {
        let (i, j) = (local_edge, (local_edge + 1) % 3);
        match self.order {
            ElementOrder::Linear => ([i, j, 0], [1.0 - s, s, 0.0], 2),
            ElementOrder::Quadratic => (
                [i, j, 3 + local_edge],
                [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)],
                3,
            ),
        }
    }
}

pub fn element_geometry([a, b, c]: [Point2; 3]) -> ElementGeometry {
    let det = (b - a).cross(c - a);
    let inv = 1.0 / det;
    // ∇λ_i = rot(opposite edge) / det
    let g0 = Point2::new(b.x2 - c.x2, c.x1 - b.x1) * inv;
    let g1 = Point2::new(c.x2 - a.x2, a.x1 - c.x1) * inv;
    let g2 = Point2::new(a.x2 - b.x2, b.x1 - a.x1) * inv;
    ElementGeometry {
        grad_bary: [g0, g1, g2],
        area: 0.5 * det,
    }
}

/// Physical point of barycentric coordinates `l` in a triangle.
pub fn bary_point(p: [Point2; 3], l: [f64; 3]) -> Point2 {
    Point2::new(
        l[0] * p[0].x1 + l[1] * p[1].x1 + l[2] * p[2].x1,
        l[0] * p[0].x2 + l[1] * p[1].x2 + l[2] * p[2].x2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barycentric_gradients_reproduce_linear_functions() {
        let p = [Point2::new(0.1, 0.2), Point2::new(1.3, -0.1), Point2::new(0.4, 0.9)];
        let g = element_geometry(p);
        let f = |x: Point2| 2.0 * x.x1 - 3.0 * x.x2;
        let grad = g.grad_bary.iter().zip(p).fold(Point2::ORIGIN, |acc, (gi, pi)| acc + *gi * f(pi));
        assert!((grad.x1 - 2.0).abs() < 1e-13 && (grad.x2 + 3.0).abs() < 1e-13);
        let s: Point2 = g.grad_bary.iter().fold(Point2::ORIGIN, |a, b| a + *b);
        assert!(s.norm() < 1e-13);
    }

    #[test]
    fn quadratic_shapes_partition_unity_and_are_nodal() {
        let nodes = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let edges = [[0, 1], [1, 2], [2, 0]]
            .iter()
            .map(|&nodes| crate::mesh::BoundaryEdge {
                nodes,
                tag: crate::mesh::BoundaryTag::Outer,
            })
            .collect();
        let mesh = Arc::new(Mesh::new(nodes, vec![[0, 1, 2]], vec![0], edges).unwrap());
        let sp = FeSpace::new(mesh, ElementOrder::Quadratic);
        assert_eq!(sp.num_dofs(), 6);
        let pts = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];
        for (k, l) in pts.iter().enumerate() {
            let v = sp.shape(*l);
            for (m, x) in v.iter().enumerate() {
                assert!((x - if m == k { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let g = sp.geometry(0);
        let l = [0.2, 0.3, 0.5];
        let sum = sp.shape_grad(&g, l).iter().fold(Point2::ORIGIN, |a, b| a + *b);
        assert!(sum.norm() < 1e-14);
        assert!((sp.shape(l).iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
