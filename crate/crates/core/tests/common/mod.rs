#![allow(dead_code)]

use std::sync::Arc;

use gpscav_core::elasticity::{solve_forward, SaddleSolution, SolverOptions, TractionSpec};
use gpscav_core::mesh::{generate_mesh_with, MeshOptions};
use gpscav_core::{DomainSpec, Mesh, PlateMaterial, Point2, StarShape};

pub const A: f64 = 1.0;
pub const B: f64 = 2.0;
pub const NU: f64 = 0.3;

/// Annulus `a < r < b` with Σ the whole outer circle.
pub fn annulus() -> DomainSpec {
    let outer = StarShape::circle(Point2::ORIGIN, B).unwrap();
    let cavity = StarShape::circle(Point2::ORIGIN, A).unwrap();
    DomainSpec::new(outer, vec![cavity], None, 0.5, 0.5, 10.0, 1.0).unwrap()
}

pub fn mesh(domain: &DomainSpec, h: f64) -> Arc<Mesh> {
    Arc::new(generate_mesh_with(domain, &MeshOptions::new(h).relaxed(true)).unwrap())
}

/// Radial displacement of the thick-walled cylinder under outer tension `p`.
pub fn lame_radial(r: f64, p: f64) -> f64 {
    let ca = p * B * B / (B * B - A * A);
    let cb = p * A * A * B * B / (B * B - A * A);
    (ca * (1.0 - NU) * r + cb * (1.0 + NU) / r) / 1.0
}

pub fn lame_displacement(x: Point2) -> [f64; 2] {
    let r = x.norm();
    let u = lame_radial(r, 1.0);
    [u * x.x1 / r, u * x.x2 / r]
}

pub fn solve_lame(h: f64, opts: &SolverOptions) -> SaddleSolution {
    let d = annulus();
    let m = mesh(&d, h);
    let t = TractionSpec::uniform_normal(&d, 1.0);
    solve_forward(m, &d, &PlateMaterial::homogeneous(1.0, NU, 1.0).unwrap(), &t, opts).unwrap()
}
