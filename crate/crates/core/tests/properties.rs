mod common;

use std::sync::{Arc, OnceLock};

use common::*;
use gpscav_core::airy::{airy_from_fn, airy_gradient_along, field_residuals, sandwich_fraction, strain_k, AiryOptions, Patch};
use gpscav_core::elasticity::{DisplacementField, ElementOrder, FeSpace};
use gpscav_core::geometry::{auxiliary_distances, cavity_checks, eval_star, hausdorff_distance, rigid_eval};
use gpscav_core::inverse::{sigma_trace, trace_gap, SigmaSampling, Trace};
use gpscav_core::mesh::{BoundaryTag, QuadratureRule};
use gpscav_core::tensor::{self, Mat2};
use gpscav_core::{DomainSpec, PlateMaterial, Point2, RigidMotion, StarShape};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sym() -> impl Strategy<Value = Mat2> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b, c)| tensor::from_voigt(a, b, c))
}

fn point(r: f64) -> impl Strategy<Value = Point2> {
    (-r..r, -r..r).prop_map(|(x, y)| Point2::new(x, y))
}

fn shape() -> impl Strategy<Value = StarShape> {
    (point(0.3), 0.5..1.0f64, prop::collection::vec(-0.04..0.04f64, 4)).prop_map(|(c, r, f)| {
        let mut p = vec![r];
        p.extend(f);
        StarShape::from_params(c, &p).unwrap()
    })
}

fn material() -> impl Strategy<Value = PlateMaterial> {
    (0.1..100.0f64, -0.9..0.45f64, 0.01..2.0f64).prop_map(|(e, nu, h)| PlateMaterial::homogeneous(e, nu, h).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_evaluation_is_periodic(s in shape(), theta in -10.0..10.0f64) {
        let a = eval_star(&s, theta);
        let b = eval_star(&s, theta + std::f64::consts::TAU);
        prop_assert!(a.dist(b) <= 1e-13 * s.max_radius().max(1.0));
    }

    #[test]
    fn rigid_motions_are_strain_free(c in point(5.0), w in -3.0..3.0f64, x in point(5.0)) {
        let r = RigidMotion::new([c.x1, c.x2], w);
        let d = 1e-4;
        let du = |e: Point2| {
            let (p, m) = (rigid_eval(&r, x + e * d), rigid_eval(&r, x - e * d));
            [(p[0] - m[0]) / (2.0 * d), (p[1] - m[1]) / (2.0 * d)]
        };
        let (g1, g2) = (du(Point2::new(1.0, 0.0)), du(Point2::new(0.0, 1.0)));
        let strain = [g1[0], g2[1], 0.5 * (g1[1] + g2[0])];
        let scale = w.abs().max(1.0);
        prop_assert!(strain.iter().all(|e| e.abs() <= 1e-8 * scale), "{strain:?}");
    }

    #[test]
    fn elasticity_tensor_is_symmetric_and_convex(m in material(), a in sym(), b in sym(), x in point(3.0)) {
        let ca = m.apply_c(x, &a);
        let cb = m.apply_c(x, &b);
        let (l, r) = (tensor::dot(&ca, &b), tensor::dot(&a, &cb));
        prop_assert!((l - r).abs() <= 1e-12 * tensor::norm2(&ca).sqrt() * tensor::norm2(&b).sqrt() + 1e-300);
        let h = m.moduli_at(x).h;
        prop_assert!(tensor::dot(&ca, &a) >= h * m.xi0() * tensor::norm2(&a) * (1.0 - 1e-12));
    }

    #[test]
    fn compliance_inverts_stiffness(m in material(), a in sym(), x in point(3.0)) {
        // ℂ carries the thickness and 𝕃 its inverse, so 𝕃ℂ is the identity.
        let back = m.apply_l(x, &m.apply_c(x, &a));
        prop_assert!(tensor::max_abs(&tensor::sub(&back, &a)) <= 1e-12 * tensor::max_abs(&a).max(1e-300));
    }

    #[test]
    fn rot_is_an_involution(a in sym()) {
        prop_assert_eq!(tensor::rot(&tensor::rot(&a)), a);
    }

    #[test]
    fn quadrature_is_exact_to_its_degree(k in 0usize..4) {
        let rule = [QuadratureRule::degree1, QuadratureRule::degree2, QuadratureRule::degree4, QuadratureRule::degree5][k]();
        // ∫ ξ^i η^j over the reference triangle is i! j! / (i + j + 2)!.
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        for i in 0..=rule.degree {
            for j in 0..=rule.degree - i {
                let q: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[1].powi(i as i32) * p[2].powi(j as i32)).sum();
                let exact = fact(i) * fact(j) / fact(i + j + 2);
                prop_assert!((q - exact).abs() <= 1e-14, "{i} {j}: {q} vs {exact}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hausdorff_is_a_metric_on_sampled_triples(a in shape(), b in shape(), c in shape()) {
        let n = 1024;
        let (ab, ba) = (hausdorff_distance(&a, &b, n), hausdorff_distance(&b, &a, n));
        prop_assert!((ab - ba).abs() <= 1e-12);
        let (ac, cb) = (hausdorff_distance(&a, &c, n), hausdorff_distance(&c, &b, n));
        // Sampling error of the three region samplers.
        prop_assert!(ab <= ac + cb + 1e-2, "{ab} > {ac} + {cb}");
        prop_assert!(hausdorff_distance(&a, &a, n) <= 1e-12);
    }

    #[test]
    fn mesh_area_and_normals(c in point(0.5), r in 0.3..0.8f64, h in 0.12..0.25f64) {
        let outer = StarShape::circle(Point2::ORIGIN, 2.0).unwrap();
        let cavity = StarShape::circle(c, r).unwrap();
        let d = DomainSpec::new(outer, vec![cavity], None, 0.5, 1.0, 10.0, 1.0).unwrap();
        let m = mesh(&d, h);
        let perimeter = d.outer_length() + std::f64::consts::TAU * r;
        prop_assert!((m.total_area() - d.area()).abs() <= 2.0 * m.h_max * m.h_max * perimeter);
        for tag in [BoundaryTag::Sigma, BoundaryTag::Cavity(0)] {
            let mut acc = Point2::ORIGIN;
            let mut len = 0.0;
            for (i, e) in m.boundary_edges.iter().enumerate().filter(|(_, e)| e.tag == tag) {
                let l = m.edge_length(e);
                acc = acc + m.boundary_frame(i).unwrap().n * l;
                len += l;
            }
            prop_assert!(len > 0.0);
            prop_assert!(acc.norm() <= 1e-12 * len, "{tag}: {acc:?}");
        }
    }
}

fn airy_domain() -> DomainSpec {
    annulus()
}

/// `φ = Σ c_ij u^i v^j` for `2 ≤ i + j ≤ 4` in coordinates centered at `p0`,
/// so `φ(p0) = ∇φ(p0) = 0`.
struct Quartic {
    p0: Point2,
    c: Vec<(i32, i32, f64)>,
}

impl Quartic {
    fn new(p0: Point2, coeffs: &[f64]) -> Self {
        let mut c = Vec::new();
        let mut k = 0;
        for deg in 2..=4 {
            for i in 0..=deg {
                c.push((i, deg - i, coeffs[k]));
                k += 1;
            }
        }
        Self { p0, c }
    }

    fn d(&self, x: Point2, di: i32, dj: i32) -> f64 {
        let (u, v) = (x.x1 - self.p0.x1, x.x2 - self.p0.x2);
        let fall = |n: i32, k: i32| (0..k).map(|m| f64::from(n - m)).product::<f64>();
        self.c
            .iter()
            .filter(|(i, j, _)| *i >= di && *j >= dj)
            .map(|(i, j, c)| c * fall(*i, di) * fall(*j, dj) * u.powi(i - di) * v.powi(j - dj))
            .sum()
    }

    fn stress(&self, x: Point2) -> Mat2 {
        tensor::rot(&tensor::from_voigt(self.d(x, 2, 0), self.d(x, 0, 2), self.d(x, 1, 1)))
    }
}

fn quartic() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closed_form_potentials_are_reproduced(c in quartic(), center in (1.3..1.6f64, -0.2..0.2f64)) {
        let d = airy_domain();
        let p0 = Point2::new(center.0, center.1);
        let q = Quartic::new(p0, &c);
        let patch = Patch::interior_disk(&d, p0, 0.3).unwrap();
        let airy = airy_from_fn(&patch, &d, |x| q.stress(x), 24, &AiryOptions::default()).unwrap();
        let scale = airy.points.iter().map(|x| q.d(*x, 0, 0).abs()).fold(0.0, f64::max);
        for x in &airy.points {
            prop_assert!((airy.phi(*x) - q.d(*x, 0, 0)).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn affine_terms_do_not_change_derived_fields(c in quartic(), c0 in -5.0..5.0f64, g in point(5.0)) {
        let d = airy_domain();
        let mat = PlateMaterial::homogeneous(1.0, NU, 1.0).unwrap();
        let p0 = Point2::new(0.0, 1.5);
        let q = Quartic::new(p0, &c);
        let patch = Patch::interior_disk(&d, p0, 0.35).unwrap();
        let a = airy_from_fn(&patch, &d, |x| q.stress(x), 24, &AiryOptions::default()).unwrap();
        let mut b = a.clone();
        b.add_affine(c0, [g.x1, g.x2]);
        for x in &a.points {
            prop_assert_eq!(a.hessian(*x), b.hessian(*x));
        }
        prop_assert_eq!(strain_k(&mat, &a), strain_k(&mat, &b));
        prop_assert_eq!(field_residuals(&a, &mat, &d).unwrap(), field_residuals(&b, &mat, &d).unwrap());
        let eps = |x: Point2| Some(tensor::sym(&[[0.3 * x.x1, 0.1], [0.2, -x.x2]]));
        prop_assert_eq!(
            sandwich_fraction(&a.points, |x| a.hessian(x), eps, &mat, 0.05),
            sandwich_fraction(&b.points, |x| b.hessian(x), eps, &mat, 0.05)
        );
    }

    #[test]
    fn airy_gradient_is_single_valued_on_loops(c in quartic(), r in 0.05..0.3f64, k in 3usize..40) {
        let d = airy_domain();
        let p0 = Point2::new(-1.5, 0.0);
        let q = Quartic::new(p0, &c);
        let patch = Patch::interior_disk(&d, p0, 0.35).unwrap();
        let airy = airy_from_fn(&patch, &d, |x| q.stress(x), 24, &AiryOptions::default()).unwrap();
        let mut pts: Vec<Point2> = (0..k)
            .map(|i| p0 + Point2::from_polar(r, std::f64::consts::TAU * i as f64 / k as f64))
            .collect();
        pts.push(pts[0]);
        let g = airy_gradient_along(&pts, |x, n| {
            let s = airy.stress(x);
            [s[0][0] * n.x1 + s[0][1] * n.x2, s[1][0] * n.x1 + s[1][1] * n.x2]
        })
        .unwrap();
        let end = g.grad.last().unwrap();
        let scale = airy.points.iter().map(|x| tensor::max_abs(&airy.stress(*x))).fold(0.0, f64::max) * r;
        prop_assert!(end[0].abs().max(end[1].abs()) <= 1e-10 * scale.max(1e-300), "{end:?}");
        // The increments match ∇φ itself.
        let (g0, g1) = (airy.grad(pts[0]), airy.grad(pts[k / 2]));
        let inc = g.grad[k / 2];
        prop_assert!((inc[0] - (g1[0] - g0[0])).abs() <= 1e-8 * scale && (inc[1] - (g1[1] - g0[1])).abs() <= 1e-8 * scale);
    }
}

struct GapFixture {
    domain: DomainSpec,
    space: Arc<FeSpace>,
    sampling: SigmaSampling,
}

fn gap_fixture() -> &'static GapFixture {
    static F: OnceLock<GapFixture> = OnceLock::new();
    F.get_or_init(|| {
        let domain = annulus();
        let space = Arc::new(FeSpace::new(mesh(&domain, 0.15), ElementOrder::Quadratic));
        let sampling = SigmaSampling::new(&domain, 512).unwrap();
        GapFixture { domain, space, sampling }
    })
}

fn field_trace(c: &[f64]) -> Trace {
    let f = gap_fixture();
    let a = DisplacementField::interpolate(f.space.clone(), |x| {
        [
            c[0] * x.x1 * x.x1 + c[1] * x.x2 + c[2] * (2.0 * x.x1).sin(),
            c[3] * x.x1 * x.x2 + c[4] * x.x2 * x.x2 * x.x1 + c[5],
        ]
    });
    sigma_trace(&a, &f.domain, &f.sampling).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cauchy_gap_is_a_pseudometric(a in coeffs(), b in coeffs(), c in coeffs(), r in (point(2.0), -1.0..1.0f64)) {
        let f = gap_fixture();
        let (ta, tb, tc) = (field_trace(&a), field_trace(&b), field_trace(&c));
        let gap = |u: &Trace, v: &Trace| trace_gap(u, v, &f.sampling, f.domain.r0).unwrap();
        let (ab, ba) = (gap(&ta, &tb), gap(&tb, &ta));
        prop_assert!((ab - ba).abs() <= 1e-10 * ab.max(1.0));
        prop_assert!(ab <= gap(&ta, &tc) + gap(&tc, &tb) + 1e-10);
        prop_assert_eq!(gap(&ta, &ta), 0.0);

        let rigid = RigidMotion::new([r.0.x1, r.0.x2], r.1);
        let mut shifted = ta.clone();
        for (v, x) in shifted.values.iter_mut().zip(&ta.points) {
            let w = rigid_eval(&rigid, *x);
            v[0] += w[0];
            v[1] += w[1];
        }
        prop_assert!(gap(&ta, &shifted) <= 1e-10 * ab.max(1.0));
        prop_assert!((gap(&shifted, &tb) - ab).abs() <= 1e-10 * ab.max(1.0));
    }
}

/// Benchmark body: outer circle of radius 2 around a cavity of radius 0.6.
fn benchmark() -> DomainSpec {
    let outer = StarShape::circle(Point2::ORIGIN, 2.0).unwrap();
    let cavity = StarShape::circle(Point2::ORIGIN, 0.6).unwrap();
    DomainSpec::new(outer, vec![cavity], None, 0.5, 1.0, 10.0, 1.0).unwrap()
}

/// Random admissible cavity: perturbed center, radius and two Fourier modes,
/// resampled until every a-priori cavity check passes.
fn random_cavity(d: &DomainSpec, rng: &mut ChaCha8Rng) -> StarShape {
    loop {
        let c = Point2::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
        let mut p = vec![rng.random_range(0.45..0.8)];
        p.extend((0..4).map(|_| rng.random_range(-0.03..0.03)));
        let s = StarShape::from_params(c, &p).unwrap();
        if cavity_checks(d, &s).iter().all(|c| c.passed) {
            return s;
        }
    }
}

#[test]
fn geometric_law_on_random_pairs() {
    let d = benchmark();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let slack = 1e-3 * d.r0;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = (random_cavity(&d, &mut rng), random_cavity(&d, &mut rng));
        let t = auxiliary_distances(&a, &b, &d, 1024).unwrap();
        worst = worst.max(t.d_h - (1.0 + d.m0 * d.m0).sqrt() * t.d);
        assert!(t.satisfies_geometric_law(d.m0, slack), "{t:?}");
    }
    assert!(worst <= slack);
}
