mod common;

use std::sync::Arc;

use common::*;
use gpscav_core::elasticity::{
    boundary_sobolev_norm, solve_forward, DisplacementField, FeSpace, SobolevOrder, SolverOptions, TractionSpec,
};
use gpscav_core::error::Error;
use gpscav_core::geometry::{hausdorff_distance, RigidMotion};
use gpscav_core::inverse::{
    cauchy_gap, dyadic_radii, offset_centers, reconstruct, reconstruct_discrepancy, sigma_trace, smallness_profile,
    smallness_profile_at, stability_sweep, trace_norm, vanishing_rate, CavityFamily, ObservedData,
    ReconstructOptions, SigmaSampling, SweepOptions, VanishingMode,
};
use gpscav_core::mesh::{generate_mesh_with, MeshOptions};
use gpscav_core::{DomainSpec, PlateMaterial, Point2, StarShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn benchmark() -> DomainSpec {
    let outer = StarShape::circle(Point2::ORIGIN, 2.0).unwrap();
    let cavity = StarShape::circle(Point2::ORIGIN, 0.6).unwrap();
    DomainSpec::new(outer, vec![cavity], None, 0.5, 1.0, 10.0, 1.0).unwrap()
}

fn material() -> PlateMaterial {
    PlateMaterial::homogeneous(1.0, NU, 1.0).unwrap()
}

fn family(d: &DomainSpec) -> CavityFamily {
    let ts = std::iter::once(0.0).chain((0..10).map(|k| 1.5e-3 * 1.6f64.powi(k))).collect();
    CavityFamily::radial(d.cavities[0].clone(), ts).unwrap()
}

#[test]
fn cauchy_gap_quotients_rigid_motions() {
    let d = annulus();
    let sol = solve_lame(0.1, &SolverOptions::default());
    let a = &sol.displacement;
    let s = SigmaSampling::new(&d, 512).unwrap();
    let norm = trace_norm(&sigma_trace(a, &d, &s).unwrap().values, &s.weights) / d.r0;
    assert_eq!(cauchy_gap(a, a, &d, 512).unwrap(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let r = RigidMotion::new([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], rng.random_range(-1.0..1.0));
        let mut b = a.clone();
        b.add_rigid(&r);
        let g = cauchy_gap(a, &b, &d, 512).unwrap();
        assert!(g <= 1e-10 * norm, "{g} vs {norm}");
    }
}

#[test]
fn cauchy_gap_measures_a_known_perturbation() {
    // p = (cos 2θ, 0) on the outer circle is orthogonal to the rigid traces.
    let d = annulus();
    let m = mesh(&d, 0.1);
    let space = Arc::new(FeSpace::new(m, gpscav_core::elasticity::ElementOrder::Quadratic));
    let a = DisplacementField::interpolate(space.clone(), lame_displacement);
    let b = DisplacementField::interpolate(space, |x| {
        let u = lame_displacement(x);
        [u[0] + (2.0 * x.x2.atan2(x.x1)).cos(), u[1]]
    });
    let g = cauchy_gap(&a, &b, &d, 512).unwrap();
    let expect = (std::f64::consts::PI * B).sqrt() / d.r0;
    // Quadratic interpolation of cos 2θ on edges of length ≈ 0.1.
    assert!((g - expect).abs() <= 1e-3 * expect, "{g} vs {expect}");
}

#[test]
fn stability_sweep_on_the_radial_family() {
    let d = benchmark();
    let t = TractionSpec::uniform_normal(&d, 1.0);
    let opts = SweepOptions::new(0.1);
    let res = stability_sweep(&family(&d), &d, &material(), &t, &opts).unwrap();
    assert!(res.failures.is_empty());
    let r0 = &res.rows[0];
    assert!(r0.t == 0.0 && r0.epsilon <= 1e-12 && r0.d_h == 0.0);
    let eta = res.eta.unwrap();
    assert!(eta.points >= 8, "{eta:?}");
    assert!(eta.exponent > 0.0 && eta.r_squared >= 0.9, "{eta:?}");
    assert!(res.spearman.unwrap() >= 0.95);
    for row in &res.rows {
        assert!(row.epsilon >= 0.0 && row.d_h >= 0.0 && row.d >= 0.0 && row.d_m >= 0.0);
        assert!(row.satisfies_geometric_law(d.m0, 1e-3 * d.r0), "{row:?}");
    }

    // Doubling the load doubles ε and leaves the distances alone.
    let fam = CavityFamily::radial(d.cavities[0].clone(), vec![0.01, 0.05]).unwrap();
    let one = stability_sweep(&fam, &d, &material(), &t, &opts).unwrap();
    let two = stability_sweep(&fam, &d, &material(), &t.scaled(2.0), &opts).unwrap();
    for (a, b) in one.rows.iter().zip(&two.rows) {
        assert!((b.epsilon - 2.0 * a.epsilon).abs() <= 1e-8 * a.epsilon);
        assert_eq!(a.d_h, b.d_h);
    }
}

#[test]
fn uniform_strain_energy_scales_with_area() {
    let outer = StarShape::circle(Point2::ORIGIN, 2.0).unwrap();
    let d = DomainSpec::new(outer, vec![], None, 0.5, 1.0, 10.0, 1.0).unwrap();
    let m = mesh(&d, 0.03);
    let space = Arc::new(FeSpace::new(m, gpscav_core::elasticity::ElementOrder::Linear));
    let a = DisplacementField::interpolate(space, |x| [0.3 * x.x1 + 0.1 * x.x2, -0.2 * x.x2]);
    let hmax = a.space().mesh().h_max;
    let radii = dyadic_radii(1.5, 4);
    assert!(radii[0] >= 4.0 * hmax, "{radii:?} {hmax}");
    let rate = vanishing_rate(&a, &d, Point2::new(0.05, -0.02), &radii, VanishingMode::Interior).unwrap();
    assert!((rate.fit.exponent - 2.0).abs() <= 0.05, "{rate:?}");

    let too_small = dyadic_radii(0.4 * hmax * 8.0, 4);
    assert!(matches!(
        vanishing_rate(&a, &d, Point2::ORIGIN, &too_small, VanishingMode::Interior),
        Err(Error::DegenerateFit(_))
    ));
    let zero = DisplacementField::zeros(a.space().clone());
    assert!(matches!(
        vanishing_rate(&zero, &d, Point2::ORIGIN, &radii, VanishingMode::Interior),
        Err(Error::DegenerateFit(_))
    ));
}

#[test]
fn boundary_vanishing_rate_on_the_annulus() {
    let d = annulus();
    let sol = solve_lame(0.017, &SolverOptions::default());
    let radii = dyadic_radii(0.8, 4);
    let rate = vanishing_rate(&sol.displacement, &d, Point2::new(A, 0.0), &radii, VanishingMode::Boundary).unwrap();
    assert!(rate.fit.r_squared >= 0.95, "{rate:?}");
    assert!(rate.fit.exponent.is_finite() && rate.fit.exponent > 0.0);
    assert!(rate.energies.iter().all(|e| *e > 0.0));
    assert!(vanishing_rate(&sol.displacement, &d, Point2::new(1.5, 0.0), &radii, VanishingMode::Boundary).is_err());
}

#[test]
fn smallness_profile_is_positive_monotone_and_scale_free() {
    let d = annulus();
    let m = mesh(&d, 0.025);
    let mat = material();
    let t = TractionSpec::uniform_normal(&d, 1.0);
    let one = solve_forward(m.clone(), &d, &mat, &t, &SolverOptions::default()).unwrap();
    let two = solve_forward(m, &d, &mat, &t.scaled(2.0), &SolverOptions::default()).unwrap();
    let n1 = boundary_sobolev_norm(&t, &d, SobolevOrder::MinusHalf);
    let n2 = boundary_sobolev_norm(&t.scaled(2.0), &d, SobolevOrder::MinusHalf);
    let rhos = [0.3, 0.15, 0.075];
    let p1 = smallness_profile(&one.displacement, &d, n1, &rhos, 1.5).unwrap();
    let p2 = smallness_profile(&two.displacement, &d, n2, &rhos, 1.5).unwrap();
    for (a, b) in p1.iter().zip(&p2) {
        assert!(a.value > 0.0);
        assert!((a.value - b.value).abs() <= 1e-8 * a.value, "{a:?} {b:?}");
    }
    let centers = offset_centers(&d, 1.5 * 0.3, 0.075);
    let fixed = smallness_profile_at(&one.displacement, &d, n1, &rhos, &centers).unwrap();
    assert!(fixed.windows(2).all(|w| w[1].value <= w[0].value), "{fixed:?}");
    assert!(matches!(
        smallness_profile(&one.displacement, &d, n1, &[5.0], 1.5),
        Err(Error::Inverse(_))
    ));
}

fn observed_for(target: &StarShape, d: &DomainSpec, t: &TractionSpec, h: f64) -> ObservedData {
    let dt = d.with_cavity(0, target.clone()).unwrap();
    // Data on a finer mesh than the reconstruction.
    let fine = generate_mesh_with(&dt, &MeshOptions::new(h / 2.0)).unwrap();
    let sol = solve_forward(Arc::new(fine), &dt, &material(), t, &SolverOptions::default()).unwrap();
    ObservedData::from_solution(&sol, d, 512).unwrap()
}

#[test]
fn reconstruction_of_a_three_coefficient_target() {
    let d = benchmark();
    let t = TractionSpec::uniform_normal(&d, 1.0);
    let target = StarShape::from_params(Point2::ORIGIN, &[0.65, 0.0, 0.0, 0.05, -0.03]).unwrap();
    let obs = observed_for(&target, &d, &t, 0.1);
    let opts = ReconstructOptions::new(0.1);
    let start = std::time::Instant::now();
    let r = reconstruct(&d, &material(), &t, &obs, &d.cavities[0], &opts).unwrap();
    assert!(start.elapsed().as_secs() <= 300);
    assert!(r.misfit_history.windows(2).all(|w| w[1] <= w[0]));
    let dh = hausdorff_distance(&r.recovered, &target, 512);
    assert!(dh <= 0.02 * d.r0, "d_H {dh}");

    let (noisy, delta) = obs.with_noise(1e-3, 7, d.r0).unwrap();
    let start = std::time::Instant::now();
    let r = reconstruct_discrepancy(&d, &material(), &t, &noisy, &d.cavities[0], &opts, delta, 1.1, &[1e-2, 1e-3, 1e-4, 0.0])
        .unwrap();
    assert!(start.elapsed().as_secs() <= 300);
    let dh = hausdorff_distance(&r.recovered, &target, 512);
    assert!(dh <= 0.05 * d.r0, "d_H {dh} at weight {}", r.reg_weight);
}

#[test]
fn reconstruction_from_its_own_data_is_a_fixed_point() {
    let d = benchmark();
    let t = TractionSpec::uniform_normal(&d, 1.0);
    let opts = ReconstructOptions::new(0.1);
    let init = d.cavities[0].with_modes(opts.modes).unwrap();
    let m = generate_mesh_with(&d, &opts.mesh).unwrap();
    let sol = solve_forward(Arc::new(m), &d, &material(), &t, &opts.solver).unwrap();
    let obs = ObservedData::from_solution(&sol, &d, 512).unwrap();
    let r = reconstruct(&d, &material(), &t, &obs, &init, &opts).unwrap();
    assert_eq!(r.iterations, 0);
    assert!(r.converged);
    assert_eq!(r.recovered, init);
}
