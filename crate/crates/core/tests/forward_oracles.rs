mod common;

use std::sync::Arc;

use common::*;
use gpscav_core::elasticity::{
    boundary_sobolev_norm, boundary_traction_max, local_energy, solve_forward, stress_field, stress_in,
    DisplacementField, ElementOrder, FeSpace, Profile, SobolevOrder, SolveMethod, SolverOptions, TractionSegment,
    TractionSpec,
};
use gpscav_core::geometry::{ArcInterval, RigidMotion};
use gpscav_core::mesh::{generate_mesh_with, MeshOptions};
use gpscav_core::tensor;
use gpscav_core::{BoundaryTag, DomainSpec, PlateMaterial, Point2, StarShape};

fn rel_error(h: f64, order: ElementOrder) -> (f64, f64) {
    let sol = solve_lame(h, &SolverOptions::default().with_order(order));
    let (e, n) = sol.displacement.l2_error(lame_displacement);
    (sol.mesh().h_max, e / n)
}

#[test]
fn lame_displacement_error_and_rate() {
    let errs: Vec<_> = [0.11, 0.077, 0.054].iter().map(|h| rel_error(*h, ElementOrder::Linear)).collect();
    let (hmax, e) = errs[2];
    assert!(hmax <= 0.04 * B, "h_max {hmax}");
    assert!(e <= 0.02, "relative L2 error {e}");
    for w in errs.windows(2) {
        let rate = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
        assert!(rate >= 1.8, "rate {rate}");
    }
}

#[test]
fn zero_load_gives_zero_displacement() {
    let d = annulus();
    let sol = solve_forward(
        mesh(&d, 0.2),
        &d,
        &PlateMaterial::benchmark(),
        &TractionSpec::uniform_normal(&d, 0.0),
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(sol.displacement.values().iter().all(|v| *v == 0.0));
    assert_eq!(sol.multipliers, [0.0; 3]);
}

#[test]
fn lame_inner_boundary_is_traction_free_and_energy_identity_holds() {
    let sol = solve_lame(0.03, &SolverOptions::default().with_order(ElementOrder::Quadratic));
    let mat = PlateMaterial::homogeneous(1.0, NU, 1.0).unwrap();
    let sr = boundary_traction_max(&sol.displacement, &mat, |t| matches!(t, BoundaryTag::Cavity(_)));
    assert!(sr <= 0.02, "radial stress at the cavity {sr}");
    assert!(sol.energy_defect() <= 1e-8);
    let res = sol.displacement.normalization_residuals();
    assert!(res.iter().all(|r| r.abs() < 1e-10), "{res:?}");
}

#[test]
fn uniform_tension_on_disk_gives_uniform_stress() {
    let outer = StarShape::circle(Point2::ORIGIN, 1.0).unwrap();
    let d = DomainSpec::new(outer, vec![], None, 0.25, 0.5, 10.0, 1.0).unwrap();
    let mat = PlateMaterial::benchmark();
    let p = 0.7;
    let sol = solve_forward(mesh(&d, 0.1), &d, &mat, &TractionSpec::uniform_normal(&d, p), &SolverOptions::default())
        .unwrap();
    let n = stress_field(&sol.displacement, &mat);
    for v in &n.values {
        let dev = tensor::max_abs(&tensor::sub(v, &tensor::scale(&tensor::IDENTITY, p)));
        assert!(dev <= 0.01 * p, "{v:?}");
    }
}

#[test]
fn rigid_displacement_has_zero_stress() {
    let d = annulus();
    let sp = Arc::new(FeSpace::new(mesh(&d, 0.2), ElementOrder::Quadratic));
    let mut a = DisplacementField::zeros(sp);
    a.add_rigid(&RigidMotion::new([1.5, -0.4], 0.25));
    let n = stress_field(&a, &PlateMaterial::benchmark());
    assert!(n.max_abs() < 1e-12);
}

/// Hoop stress `τ·Nτ` at the cavity boundary edge closest to `target`.
fn hoop_at(sol: &gpscav_core::SaddleSolution, mat: &PlateMaterial, target: Point2) -> f64 {
    let mesh = sol.mesh();
    let owners = mesh.boundary_edge_owners();
    let mut best = (f64::INFINITY, 0.0);
    for (e, &(t, le)) in mesh.boundary_edges.iter().zip(&owners) {
        if !matches!(e.tag, BoundaryTag::Cavity(_)) {
            continue;
        }
        let (a, b) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
        let mid = (a + b) * 0.5;
        let dist = mid.dist(target);
        if dist < best.0 {
            let mut l = [0.0; 3];
            l[le] = 0.5;
            l[(le + 1) % 3] = 0.5;
            let n = stress_in(&sol.displacement, mat, t, l);
            let tau = (b - a).normalized();
            let hoop = tau.x1 * (n[0][0] * tau.x1 + n[0][1] * tau.x2) + tau.x2 * (n[1][0] * tau.x1 + n[1][1] * tau.x2);
            best = (dist, hoop);
        }
    }
    best.1
}

#[test]
fn kirsch_hoop_stress_concentration() {
    let a = 0.1;
    let outer = StarShape::circle(Point2::ORIGIN, 1.0).unwrap();
    let cavity = StarShape::circle(Point2::ORIGIN, a).unwrap();
    let d = DomainSpec::new(outer, vec![cavity], None, 0.05, 0.5, 40.0, 1.0).unwrap();
    let m = Arc::new(generate_mesh_with(&d, &MeshOptions::new(0.05).cavity_factor(0.1).relaxed(true)).unwrap());
    let sigma = 1.0;
    let t = TractionSpec::new(vec![TractionSegment::new(
        ArcInterval::full(d.outer_length()),
        Profile::Stress(tensor::from_voigt(sigma, 0.0, 0.0)),
    )]);
    let mat = PlateMaterial::benchmark();
    let sol = solve_forward(m, &d, &mat, &t, &SolverOptions::default().with_order(ElementOrder::Quadratic)).unwrap();
    for target in [Point2::new(0.0, a), Point2::new(0.0, -a)] {
        let k = hoop_at(&sol, &mat, target) / sigma;
        assert!((k - 3.0).abs() <= 0.08 * 3.0, "concentration {k}");
    }
}

#[test]
fn iterative_matches_direct() {
    let d = solve_lame(0.16, &SolverOptions::default());
    let i = solve_lame(0.16, &SolverOptions::default().with_method(SolveMethod::Iterative));
    let diff = d
        .displacement
        .values()
        .iter()
        .zip(i.displacement.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff < 1e-7, "{diff}");
    assert!(i.energy_defect() < 1e-8);
}

#[test]
fn solution_is_unique_up_to_rigid_motion() {
    let sol = solve_lame(0.15, &SolverOptions::default());
    for (k, r) in [RigidMotion::new([0.3, 0.1], -0.2), RigidMotion::new([-2.0, 5.0], 1.0)].iter().enumerate() {
        let mut b = sol.displacement.clone();
        b.add_rigid(r);
        b.normalize();
        let diff = b
            .values()
            .iter()
            .zip(sol.displacement.values())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-10, "seed {k}: {diff}");
    }
}

#[test]
fn stability_ratio_is_stable_under_refinement() {
    let d = annulus();
    let t = TractionSpec::new(vec![TractionSegment::new(
        ArcInterval::full(d.outer_length()),
        Profile::RadialCos { amp: 1.0, k: 2 },
    )]);
    let norm = boundary_sobolev_norm(&t, &d, SobolevOrder::MinusHalf);
    let ratios: Vec<f64> = [0.16, 0.08]
        .iter()
        .map(|h| {
            let sol = solve_forward(mesh(&d, *h), &d, &PlateMaterial::benchmark(), &t, &SolverOptions::default())
                .unwrap();
            sol.displacement.h1_norm() / (d.r0 * norm)
        })
        .collect();
    assert!((ratios[0] - ratios[1]).abs() <= 0.1 * ratios[1], "{ratios:?}");
}

#[test]
fn local_energy_grows_with_radius_on_a_solution() {
    let sol = solve_lame(0.08, &SolverOptions::default());
    let c = Point2::new(1.5, 0.0);
    let e1 = local_energy(&sol.displacement, c, 0.25).unwrap();
    let e2 = local_energy(&sol.displacement, c, 0.4).unwrap();
    assert!(0.0 < e1 && e1 <= e2);
}
