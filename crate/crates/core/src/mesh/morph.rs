//! Moving a cavity boundary by deforming an existing mesh instead of
//! remeshing, so that nearby geometries share their connectivity.

use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::StarShape;

/// Blending parameters for [`morph_cavity`].
#[derive(Clone, Copy, Debug)]
pub struct MorphOptions {
    /// Width of the layer around the cavity over which the boundary
    /// displacement decays to zero.
    pub width: f64,
}

/// Maps the mesh of a domain with cavity `from` onto one with cavity `to`.
///
/// A node at polar angle `θ` (about the center of `from`) and radial
/// distance `d` outside `from` moves by `w(d)·(to(θ) − from(θ))` with
/// `w` decaying linearly from one on the cavity to zero at `d = width`.
/// Nodes on the cavity boundary land on `to`; nodes farther than `width`
/// stay put. Fails if a triangle would be inverted.
pub fn morph_cavity(mesh: &Mesh, from: &StarShape, to: &StarShape, opts: MorphOptions) -> Result<Mesh> {
    if !(opts.width > 0.0) {
        return Err(Error::InvalidArgument(format!("morph width must be positive, got {}", opts.width)));
    }
    let c = from.center();
    let nodes = mesh
        .nodes
        .iter()
        .map(|&p| {
            let theta = from.polar_angle(p);
            let d = (p - c).norm() - from.radius(theta);
            let w = (1.0 - d / opts.width).clamp(0.0, 1.0);
            if w == 0.0 {
                p
            } else {
                p + (to.eval(theta) - from.eval(theta)) * w
            }
        })
        .collect();
    let mut out = Mesh {
        nodes,
        triangles: mesh.triangles.clone(),
        regions: mesh.regions.clone(),
        boundary_edges: mesh.boundary_edges.clone(),
        h_max: 0.0,
    };
    for t in 0..out.triangles.len() {
        let a0 = mesh.signed_area(t);
        if out.signed_area(t) <= 0.05 * a0 {
            return Err(Error::Meshing(format!(
                "morphing inverts or collapses triangle {t}; displacement too large for width {}",
                opts.width
            )));
        }
    }
    out.h_max = out
        .triangles
        .iter()
        .flat_map(|t| (0..3).map(move |i| (t[i], t[(i + 1) % 3])))
        .map(|(a, b)| out.nodes[a].dist(out.nodes[b]))
        .fold(0.0, f64::max);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, Point2};
    use crate::mesh::{generate_mesh_with, BoundaryTag, MeshOptions};

    #[test]
    fn morphed_cavity_nodes_lie_on_the_new_curve() {
        let outer = StarShape::circle(Point2::ORIGIN, 1.0).unwrap();
        let from = StarShape::circle(Point2::ORIGIN, 0.4).unwrap();
        let to = StarShape::new(Point2::ORIGIN, 0.42, vec![(0.0, 0.0), (0.01, 0.0)]).unwrap();
        let d = DomainSpec::new(outer, vec![from.clone()], None, 0.2, 0.5, 10.0, 1.0).unwrap();
        let m = generate_mesh_with(&d, &MeshOptions::new(0.05).relaxed(true)).unwrap();
        let out = morph_cavity(&m, &from, &to, MorphOptions { width: 0.2 }).unwrap();
        out.validate().unwrap();
        for v in m.boundary_nodes(|t| t == BoundaryTag::Cavity(0)) {
            let theta = from.polar_angle(m.nodes[v]);
            let expect = m.nodes[v] + (to.eval(theta) - from.eval(theta));
            assert!(out.nodes[v].dist(expect) < 1e-14);
        }
        for v in m.boundary_nodes(BoundaryTag::is_outer) {
            assert_eq!(out.nodes[v], m.nodes[v]);
        }
        let area = d.outer.area() - to.area();
        assert!((out.total_area() - area).abs() < 0.01);
        assert!(morph_cavity(&m, &from, &to, MorphOptions { width: 0.0 }).is_err());
    }
}
