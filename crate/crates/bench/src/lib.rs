//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use gpscav_core::elasticity::{solve_forward, SolverOptions, TractionSpec};
use gpscav_core::mesh::{generate_mesh_with, MeshOptions};
use gpscav_core::{DomainSpec, Mesh, PlateMaterial, Point2, SaddleSolution, StarShape};

/// Annulus `1 < r < 2`.
pub fn annulus() -> DomainSpec {
    let outer = StarShape::circle(Point2::ORIGIN, 2.0).unwrap();
    let cavity = StarShape::circle(Point2::ORIGIN, 1.0).unwrap();
    DomainSpec::new(outer, vec![cavity], None, 0.4, 1.0, 10.0, 1.0).unwrap()
}

/// Disk of radius 2 around a cavity of radius 0.6.
pub fn benchmark_domain() -> DomainSpec {
    let outer = StarShape::circle(Point2::ORIGIN, 2.0).unwrap();
    let cavity = StarShape::circle(Point2::ORIGIN, 0.6).unwrap();
    DomainSpec::new(outer, vec![cavity], None, 0.5, 1.0, 10.0, 1.0).unwrap()
}

pub fn mesh(domain: &DomainSpec, h: f64) -> Arc<Mesh> {
    Arc::new(generate_mesh_with(domain, &MeshOptions::new(h).relaxed(true)).unwrap())
}

pub fn solve(domain: &DomainSpec, h: f64, opts: &SolverOptions) -> SaddleSolution {
    let t = TractionSpec::uniform_normal(domain, 1.0);
    solve_forward(mesh(domain, h), domain, &PlateMaterial::benchmark(), &t, opts).unwrap()
}
