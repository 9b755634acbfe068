//! Constrained Delaunay refinement of `Ω∖D̄`, seeded by equal-arclength
//! boundary polylines.

use std::collections::HashSet;

use log::debug;
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, RefinementParameters, Triangulation};

use super::{BoundaryEdge, BoundaryTag, Mesh};
use crate::error::{Error, Result};
use crate::geometry::{apriori_check, ArclengthTable, DomainSpec, Point2};

/// Mesh generation parameters.
#[derive(Clone, Debug)]
pub struct MeshOptions {
    /// Target edge length.
    pub h: f64,
    /// Cavity boundary spacing as a multiple of `h`; values below one grade
    /// the mesh towards the cavities.
    pub cavity_factor: f64,
    /// Minimum angle enforced by the refinement, in degrees.
    pub min_angle_deg: f64,
    /// Skip the a-priori class check and the `h ≤ r0/4` precondition.
    pub relaxed: bool,
    pub max_vertices: usize,
}

impl MeshOptions {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            cavity_factor: 1.0,
            min_angle_deg: 25.0,
            relaxed: false,
            max_vertices: 4_000_000,
        }
    }

    pub fn cavity_factor(mut self, f: f64) -> Self {
        self.cavity_factor = f;
        self
    }

    pub fn relaxed(mut self, relaxed: bool) -> Self {
        self.relaxed = relaxed;
        self
    }
}

/// Triangulates `Ω∖D̄` with target edge length `h_target`.
pub fn generate_mesh(domain: &DomainSpec, h_target: f64) -> Result<Mesh> {
    generate_mesh_with(domain, &MeshOptions::new(h_target))
}

/// Outer-boundary arclength stations: Σ's endpoints are always included.
fn outer_stations(domain: &DomainSpec, h: f64) -> Vec<f64> {
    let total = domain.outer_length();
    let sigma = domain.sigma;
    let pieces: Vec<(f64, f64)> = if sigma.is_full() {
        vec![(0.0, total)]
    } else {
        vec![(sigma.start, sigma.length), (sigma.end(), total - sigma.length)]
    };
    let mut s = Vec::new();
    for (start, len) in pieces {
        let n = ((len / h).ceil() as usize).max(if sigma.is_full() { 8 } else { 2 });
        s.extend((0..n).map(|j| start + len * j as f64 / n as f64));
    }
    s
}

pub fn generate_mesh_with(domain: &DomainSpec, opts: &MeshOptions) -> Result<Mesh> {
    let h = opts.h;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("mesh size must be positive, got {h}")));
    }
    if !opts.relaxed {
        if h > domain.r0 / 4.0 {
            return Err(Error::InvalidArgument(format!(
                "mesh size {h} exceeds r0/4 = {}",
                domain.r0 / 4.0
            )));
        }
        let report = apriori_check(domain);
        let first = report.failures().next().map(|c| c.describe());
        if let Some(bad) = first {
            return Err(Error::Constraint(bad));
        }
    }

    let mut vertices: Vec<spade::Point2<f64>> = Vec::new();
    let mut constraints: Vec<[usize; 2]> = Vec::new();
    let mut push_loop = |pts: Vec<Point2>| {
        let base = vertices.len();
        let n = pts.len();
        vertices.extend(pts.iter().map(|p| spade::Point2::new(p.x1, p.x2)));
        constraints.extend((0..n).map(|i| [base + i, base + (i + 1) % n]));
    };

    let table = domain.outer_table();
    push_loop(outer_stations(domain, h).into_iter().map(|s| table.point_at(s)).collect());
    for (k, cavity) in domain.cavities.iter().enumerate() {
        let ct = ArclengthTable::new(cavity);
        let spacing = h * opts.cavity_factor;
        let n = ((ct.length() / spacing).ceil() as usize).max(8);
        let pts: Vec<Point2> = (0..n).map(|i| ct.point_at(ct.length() * i as f64 / n as f64)).collect();
        let misplaced = pts.iter().any(|p| {
            !domain.outer.contains(*p)
                || domain
                    .cavities
                    .iter()
                    .enumerate()
                    .any(|(j, c)| j != k && c.contains(*p))
        });
        if misplaced {
            return Err(Error::Meshing(format!(
                "cavity {k} crosses the outer boundary or another cavity"
            )));
        }
        push_loop(pts);
    }
    let seeded = vertices.len();

    let mut cdt = ConstrainedDelaunayTriangulation::<spade::Point2<f64>>::bulk_load_cdt(vertices, constraints)
        .map_err(|e| Error::Meshing(format!("triangulation of the boundary loops failed: {e:?}")))?;
    let params = RefinementParameters::<f64>::new()
        .exclude_outer_faces(true)
        .with_angle_limit(AngleLimit::from_deg(opts.min_angle_deg))
        .with_max_allowed_area(3f64.sqrt() / 4.0 * h * h)
        .with_max_additional_vertices(opts.max_vertices);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(Error::Meshing(format!(
            "refinement exceeded {} additional vertices",
            opts.max_vertices
        )));
    }
    let excluded: HashSet<_> = result.excluded_faces.into_iter().collect();
    debug!(
        "mesh: {seeded} seed vertices, {} after refinement",
        cdt.num_vertices()
    );

    let mut renumber = vec![usize::MAX; cdt.num_vertices()];
    let mut nodes = Vec::new();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let mut tri = [0usize; 3];
        for (slot, v) in tri.iter_mut().zip(face.vertices()) {
            let id = v.fix().index();
            if renumber[id] == usize::MAX {
                renumber[id] = nodes.len();
                let p = v.position();
                nodes.push(Point2::new(p.x, p.y));
            }
            *slot = renumber[id];
        }
        let [a, b, c] = tri;
        if (nodes[b] - nodes[a]).cross(nodes[c] - nodes[a]) < 0.0 {
            tri.swap(1, 2);
        }
        triangles.push(tri);
    }
    if triangles.is_empty() {
        return Err(Error::Meshing("no interior triangles".into()));
    }

    let boundary_edges = tag_boundary(domain, &nodes, &triangles);
    let regions = vec![0; triangles.len()];
    let mesh = Mesh::new(nodes, triangles, regions, boundary_edges)?;

    let loops = mesh.boundary_loops(|_| true)?;
    if loops.len() != 1 + domain.cavities.len() {
        return Err(Error::Meshing(format!(
            "expected {} boundary loops, found {}",
            1 + domain.cavities.len(),
            loops.len()
        )));
    }
    for k in 0..domain.cavities.len() {
        let l = mesh.boundary_loops(|t| t == BoundaryTag::Cavity(k))?;
        if l.len() != 1 {
            return Err(Error::Meshing(format!("cavity {k} boundary is not a single closed loop")));
        }
    }
    debug!(
        "mesh: {} nodes, {} triangles, h_max {:.4e}, min angle {:.2}",
        mesh.num_nodes(),
        mesh.num_triangles(),
        mesh.h_max,
        mesh.min_angle_deg()
    );
    Ok(mesh)
}

/// Boundary edges (edges of exactly one triangle), oriented with the domain
/// on the left and tagged by the nearest boundary curve.
fn tag_boundary(domain: &DomainSpec, nodes: &[Point2], triangles: &[[usize; 3]]) -> Vec<BoundaryEdge> {
    let mut directed = HashSet::with_capacity(3 * triangles.len());
    for t in triangles {
        for i in 0..3 {
            directed.insert((t[i], t[(i + 1) % 3]));
        }
    }
    let mut edges = Vec::new();
    for t in triangles {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            if directed.contains(&(b, a)) {
                continue;
            }
            let m = Point2::new(0.5 * (nodes[a].x1 + nodes[b].x1), 0.5 * (nodes[a].x2 + nodes[b].x2));
            let mut best = (domain.outer.radial_gap(m).abs() / domain.outer.rho0(), BoundaryTag::Outer);
            for (k, c) in domain.cavities.iter().enumerate() {
                let g = c.radial_gap(m).abs() / c.rho0();
                if g < best.0 {
                    best = (g, BoundaryTag::Cavity(k));
                }
            }
            let tag = match best.1 {
                BoundaryTag::Outer if domain.sigma.is_full() || domain.sigma.contains(domain.outer_arclength(m)) => {
                    BoundaryTag::Sigma
                }
                t => t,
            };
            edges.push(BoundaryEdge { nodes: [a, b], tag });
        }
    }
    edges.sort_by_key(|e| (e.tag, e.nodes));
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StarShape;

    fn disk(c: (f64, f64), r: f64) -> StarShape {
        StarShape::circle(Point2::new(c.0, c.1), r).unwrap()
    }

    fn annulus(cavities: Vec<StarShape>) -> DomainSpec {
        DomainSpec::new(disk((0.0, 0.0), 1.0), cavities, Some((0.0, 2.0)), 0.2, 0.5, 10.0, 1.0).unwrap()
    }

    #[test]
    fn annulus_topology_and_frames() {
        let d = annulus(vec![disk((0.0, 0.0), 0.4)]);
        let m = generate_mesh_with(&d, &MeshOptions::new(0.05).relaxed(true)).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_loops(|_| true).unwrap().len(), 2);
        assert!(m.min_angle_deg() >= 20.0, "{}", m.min_angle_deg());
        assert!(m.h_max <= 0.05 * 1.5);
        for e in &m.boundary_edges {
            let f = m.boundary_frame_between(e.nodes[0], e.nodes[1]).unwrap();
            assert!((f.det() - 1.0).abs() < 1e-14);
            let mid = (m.nodes[e.nodes[0]] + m.nodes[e.nodes[1]]) * 0.5;
            let radial = mid.normalized();
            match e.tag {
                BoundaryTag::Cavity(_) => assert!(f.n.dot(radial) < -0.99),
                _ => assert!(f.n.dot(radial) > 0.99),
            }
        }
        let exact = std::f64::consts::PI * (1.0 - 0.16);
        let perimeter = 2.0 * std::f64::consts::PI * 1.4;
        assert!((m.total_area() - exact).abs() <= 2.0 * m.h_max * m.h_max * perimeter);
        assert!(m.edges_tagged(|t| t == BoundaryTag::Sigma).count() > 0);
        assert!(m.edges_tagged(|t| t == BoundaryTag::Outer).count() > 0);
    }

    #[test]
    fn two_cavities_lower_euler_characteristic() {
        let d = annulus(vec![disk((-0.4, 0.0), 0.2), disk((0.4, 0.0), 0.2)]);
        let m = generate_mesh_with(&d, &MeshOptions::new(0.05).relaxed(true)).unwrap();
        assert_eq!(m.euler_characteristic(), -1);
        assert_eq!(m.num_cavities(), 2);
    }

    #[test]
    fn halving_h_quadruples_triangles() {
        let d = annulus(vec![disk((0.0, 0.0), 0.4)]);
        let m1 = generate_mesh_with(&d, &MeshOptions::new(0.05).relaxed(true)).unwrap();
        let m2 = generate_mesh_with(&d, &MeshOptions::new(0.025).relaxed(true)).unwrap();
        let ratio = m2.num_triangles() as f64 / m1.num_triangles() as f64;
        assert!((ratio - 4.0).abs() <= 0.8, "ratio {ratio}");
    }

    #[test]
    fn strict_mode_enforces_preconditions() {
        let d = annulus(vec![disk((0.0, 0.0), 0.4)]);
        assert!(matches!(generate_mesh(&d, 0.1), Err(Error::InvalidArgument(_))));
        let near = annulus(vec![disk((0.5, 0.0), 0.4)]);
        assert!(matches!(generate_mesh(&near, 0.05), Err(Error::Constraint(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let d = annulus(vec![disk((0.1, 0.0), 0.3)]);
        let o = MeshOptions::new(0.05).relaxed(true);
        assert_eq!(generate_mesh_with(&d, &o).unwrap(), generate_mesh_with(&d, &o).unwrap());
    }
}
