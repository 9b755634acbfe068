//! Displacement and stress fields on a finite element space.

use std::sync::{Arc, OnceLock};

use log::warn;

use super::space::{bary_point, FeSpace};
use crate::error::{Error, Result};
use crate::geometry::{Point2, RigidMotion};
use crate::material::PlateMaterial;
use crate::mesh::{BoundaryTag, Location, QuadratureRule, TriangleIndex};
use crate::tensor::{self, Mat2};

/// Vector field `a = Σ a_i φ_i` with interleaved coefficients
/// (`values[2i + k]` is component `k` at scalar dof `i`).
#[derive(Clone, Debug)]
pub struct DisplacementField {
    space: Arc<FeSpace>,
    values: Vec<f64>,
    index: OnceLock<TriangleIndex>,
}

impl PartialEq for DisplacementField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) && self.values == other.values
    }
}

impl DisplacementField {
    pub fn new(space: Arc<FeSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != 2 * space.num_dofs() {
            return Err(Error::InvalidArgument(format!(
                "displacement has {} coefficients, space needs {}",
                values.len(),
                2 * space.num_dofs()
            )));
        }
        Ok(Self {
            space,
            values,
            index: OnceLock::new(),
        })
    }

    pub fn zeros(space: Arc<FeSpace>) -> Self {
        let n = 2 * space.num_dofs();
        Self::new(space, vec![0.0; n]).expect("sized to the space")
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(space: Arc<FeSpace>, f: impl Fn(Point2) -> [f64; 2]) -> Self {
        let values = space.dof_points().into_iter().flat_map(f).collect();
        Self::new(space, values).expect("sized to the space")
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    fn index(&self) -> &TriangleIndex {
        self.index.get_or_init(|| TriangleIndex::new(self.space.mesh()))
    }

    pub fn locate(&self, p: Point2) -> Option<Location> {
        self.index().locate(self.space.mesh(), p)
    }

    /// Triangles whose bounding boxes meet `[lo, hi]`.
    pub fn triangles_near(&self, lo: Point2, hi: Point2) -> Vec<usize> {
        self.index().intersecting(lo, hi)
    }

    pub fn eval_in(&self, t: usize, l: [f64; 3]) -> [f64; 2] {
        let (dofs, n) = self.space.element_dofs(t);
        let phi = self.space.shape(l);
        let mut out = [0.0; 2];
        for k in 0..n {
            out[0] += phi[k] * self.values[2 * dofs[k]];
            out[1] += phi[k] * self.values[2 * dofs[k] + 1];
        }
        out
    }

    /// `∇a` with `[i][j] = ∂a_i/∂x_j`.
    pub fn grad_in(&self, t: usize, l: [f64; 3]) -> Mat2 {
        let (dofs, n) = self.space.element_dofs(t);
        let g = self.space.geometry(t);
        let dphi = self.space.shape_grad(&g, l);
        let mut out = tensor::ZERO;
        for k in 0..n {
            let (u, v) = (self.values[2 * dofs[k]], self.values[2 * dofs[k] + 1]);
            out[0][0] += u * dphi[k].x1;
            out[0][1] += u * dphi[k].x2;
            out[1][0] += v * dphi[k].x1;
            out[1][1] += v * dphi[k].x2;
        }
        out
    }

    pub fn strain_in(&self, t: usize, l: [f64; 3]) -> Mat2 {
        tensor::sym(&self.grad_in(t, l))
    }

    pub fn eval(&self, p: Point2) -> Option<[f64; 2]> {
        self.locate(p).map(|l| self.eval_in(l.triangle, l.bary))
    }

    pub fn grad(&self, p: Point2) -> Option<Mat2> {
        self.locate(p).map(|l| self.grad_in(l.triangle, l.bary))
    }

    /// Values at the mesh vertices.
    pub fn nodal(&self) -> Vec<[f64; 2]> {
        (0..self.space.mesh().num_nodes())
            .map(|i| [self.values[2 * i], self.values[2 * i + 1]])
            .collect()
    }

    pub fn add_rigid(&mut self, r: &RigidMotion) {
        for (i, p) in self.space.dof_points().into_iter().enumerate() {
            let v = r.eval(p);
            self.values[2 * i] += v[0];
            self.values[2 * i + 1] += v[1];
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    /// `∫ f(x, a, ∇a)` over the mesh with a rule of the given degree.
    pub fn integrate(&self, degree: u32, f: impl Fn(Point2, [f64; 2], &Mat2) -> f64) -> f64 {
        let rule = QuadratureRule::for_degree(degree);
        let mesh = self.space.mesh();
        (0..mesh.num_triangles())
            .map(|t| {
                let pts = mesh.triangle_points(t);
                let jac = 2.0 * mesh.signed_area(t);
                rule.points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, w)| w * jac * f(bary_point(pts, *l), self.eval_in(t, *l), &self.grad_in(t, *l)))
                    .sum::<f64>()
            })
            .sum()
    }

    fn degree(&self) -> u32 {
        2 * self.space.order().degree()
    }

    /// `(∫a1, ∫a2, ∫(a2,1 − a1,2))`.
    pub fn normalization_residuals(&self) -> [f64; 3] {
        let d = self.degree();
        [
            self.integrate(d, |_, a, _| a[0]),
            self.integrate(d, |_, a, _| a[1]),
            self.integrate(d, |_, _, g| g[1][0] - g[0][1]),
        ]
    }

    /// Subtracts the rigid motion that makes the normalization residuals
    /// vanish.
    pub fn normalize(&mut self) {
        let mesh = self.space.mesh();
        let area = mesh.total_area();
        let d = self.degree();
        let m1 = self.integrate(d, |x, _, _| x.x1);
        let m2 = self.integrate(d, |x, _, _| x.x2);
        let res = self.normalization_residuals();
        // ∫ of (c + w(−x2, x1)) and its curl 2w.
        let w = res[2] / (2.0 * area);
        let c = [(res[0] + w * m2) / area, (res[1] - w * m1) / area];
        self.add_rigid(&RigidMotion::new([-c[0], -c[1]], -w));
    }

    pub fn l2_norm(&self) -> f64 {
        self.integrate(self.degree(), |_, a, _| a[0] * a[0] + a[1] * a[1]).sqrt()
    }

    /// `(∫|∇a|²)^{1/2}`.
    pub fn h1_seminorm(&self) -> f64 {
        self.integrate(self.degree(), |_, _, g| tensor::norm2(g)).sqrt()
    }

    pub fn h1_norm(&self) -> f64 {
        self.l2_norm().hypot(self.h1_seminorm())
    }

    /// `(‖a − u‖_{L²}, ‖u‖_{L²})` for a reference field `u`.
    pub fn l2_error(&self, exact: impl Fn(Point2) -> [f64; 2]) -> (f64, f64) {
        let err = self.integrate(5, |x, a, _| {
            let u = exact(x);
            (a[0] - u[0]).powi(2) + (a[1] - u[1]).powi(2)
        });
        let norm = self.integrate(5, |x, _, _| {
            let u = exact(x);
            u[0] * u[0] + u[1] * u[1]
        });
        (err.sqrt(), norm.sqrt())
    }
}

/// Stress resultants sampled at quadrature points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StressField {
    pub points: Vec<Point2>,
    pub triangles: Vec<usize>,
    /// Quadrature weights including the element area.
    pub weights: Vec<f64>,
    pub values: Vec<Mat2>,
}

impl StressField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest entry magnitude over all points.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(tensor::max_abs(v)))
    }

    /// Weighted RMS of `|N|`.
    pub fn rms(&self) -> f64 {
        let w: f64 = self.weights.iter().sum();
        let s: f64 = self.weights.iter().zip(&self.values).map(|(w, v)| w * tensor::norm2(v)).sum();
        (s / w).sqrt()
    }
}

/// `N = ℂ∇̂a` at the points of a rule exact for the strain energy.
pub fn stress_field(a: &DisplacementField, material: &PlateMaterial) -> StressField {
    let space = a.space();
    let mesh = space.mesh();
    let rule = QuadratureRule::for_degree(2 * space.order().degree());
    let mut out = StressField::default();
    for t in 0..mesh.num_triangles() {
        let pts = mesh.triangle_points(t);
        let area = mesh.signed_area(t);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let x = bary_point(pts, *l);
            out.points.push(x);
            out.triangles.push(t);
            out.weights.push(2.0 * area * w);
            out.values.push(material.apply_c(x, &a.strain_in(t, *l)));
        }
    }
    out
}

/// Stress at a point of triangle `t`.
pub fn stress_in(a: &DisplacementField, material: &PlateMaterial, t: usize, l: [f64; 3]) -> Mat2 {
    let x = bary_point(a.space().mesh().triangle_points(t), l);
    material.apply_c(x, &a.strain_in(t, l))
}

/// Largest `|N·n|` at the midpoints of boundary edges selected by `pred`,
/// evaluated in the owning triangles.
pub fn boundary_traction_max(
    a: &DisplacementField,
    material: &PlateMaterial,
    pred: impl Fn(BoundaryTag) -> bool,
) -> f64 {
    let mesh = a.space().mesh();
    let owners = mesh.boundary_edge_owners();
    let mut worst: f64 = 0.0;
    for (e, &(t, le)) in mesh.boundary_edges.iter().zip(&owners) {
        if !pred(e.tag) {
            continue;
        }
        let mut l = [0.0; 3];
        l[le] = 0.5;
        l[(le + 1) % 3] = 0.5;
        let n = stress_in(a, material, t, l);
        let Ok(frame) = mesh.boundary_frame_between(e.nodes[0], e.nodes[1]) else { continue };
        let v = [n[0][0] * frame.n.x1 + n[0][1] * frame.n.x2, n[1][0] * frame.n.x1 + n[1][1] * frame.n.x2];
        worst = worst.max(v[0].hypot(v[1]));
    }
    worst
}

const SUBDIV: usize = 4;

/// Barycentric sample points and relative weights of the 3-point rule on
/// each of the `SUBDIV²` congruent subtriangles.
fn clip_samples() -> &'static [([f64; 3], f64)] {
    static S: OnceLock<Vec<([f64; 3], f64)>> = OnceLock::new();
    S.get_or_init(|| {
        let m = SUBDIV as f64;
        let mut subs = Vec::new();
        for i in 0..SUBDIV {
            for j in 0..SUBDIV - i {
                let v = |a: usize, b: usize| [a as f64 / m, b as f64 / m];
                subs.push([v(i, j), v(i + 1, j), v(i, j + 1)]);
                if i + j + 1 < SUBDIV {
                    subs.push([v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)]);
                }
            }
        }
        let w = 1.0 / (3.0 * subs.len() as f64);
        let mut out = Vec::with_capacity(3 * subs.len());
        for s in subs {
            for k in 0..3 {
                let c = [
                    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
                    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
                ][k];
                let x = c[0] * s[0][0] + c[1] * s[1][0] + c[2] * s[2][0];
                let y = c[0] * s[0][1] + c[1] * s[1][1] + c[2] * s[2][1];
                out.push(([1.0 - x - y, x, y], w));
            }
        }
        out
    })
}

/// `∫_{B_r(c) ∩ Ω_h} |∇̂a|²`; triangles crossing the circle are clipped by
/// sub-sampling.
pub fn local_energy(a: &DisplacementField, center: Point2, radius: f64) -> Result<f64> {
    let mesh = a.space().mesh();
    if !(radius > 2.0 * mesh.h_max) {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} must exceed twice the mesh size {}",
            mesh.h_max
        )));
    }
    let d = Point2::new(radius, radius);
    let tris = a.triangles_near(center - d, center + d);
    let r2 = radius * radius;
    let mut total = 0.0;
    let mut hit = false;
    for t in tris {
        let pts = mesh.triangle_points(t);
        let area = mesh.signed_area(t);
        for (l, w) in clip_samples() {
            let x = bary_point(pts, *l);
            if (x - center).norm2() <= r2 {
                hit = true;
                total += w * area * tensor::norm2(&a.strain_in(t, *l));
            }
        }
    }
    if !hit {
        warn!("disk of radius {radius} at ({}, {}) misses the mesh", center.x1, center.x2);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elasticity::ElementOrder;
    use crate::geometry::{DomainSpec, StarShape};
    use crate::mesh::{generate_mesh_with, MeshOptions};
    use std::f64::consts::PI;

    fn disk_space(order: ElementOrder, h: f64) -> Arc<FeSpace> {
        let d = DomainSpec::new(StarShape::circle(Point2::ORIGIN, 1.0).unwrap(), vec![], None, 0.2, 0.5, 10.0, 1.0)
            .unwrap();
        let m = generate_mesh_with(&d, &MeshOptions::new(h).relaxed(true)).unwrap();
        Arc::new(FeSpace::new(Arc::new(m), order))
    }

    #[test]
    fn clip_weights_sum_to_one() {
        let s: f64 = clip_samples().iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert_eq!(clip_samples().len(), 48);
    }

    #[test]
    fn uniform_strain_energy_matches_disk_area() {
        let sp = disk_space(ElementOrder::Linear, 0.05);
        let eps = [[0.01, 0.02], [0.02, -0.005]];
        let a = DisplacementField::interpolate(sp, |x| {
            [eps[0][0] * x.x1 + eps[0][1] * x.x2, eps[1][0] * x.x1 + eps[1][1] * x.x2]
        });
        let r = 0.4;
        let e = local_energy(&a, Point2::new(0.1, -0.1), r).unwrap();
        let exact = tensor::norm2(&eps) * PI * r * r;
        assert!((e - exact).abs() < 0.02 * exact, "{e} vs {exact}");
        assert!(local_energy(&a, Point2::ORIGIN, 0.05).is_err());
    }

    #[test]
    fn rigid_fields_have_no_energy_and_normalize_to_zero() {
        for order in [ElementOrder::Linear, ElementOrder::Quadratic] {
            let sp = disk_space(order, 0.15);
            let mut a = DisplacementField::zeros(sp);
            a.add_rigid(&RigidMotion::new([0.3, -1.2], 0.7));
            assert!(local_energy(&a, Point2::ORIGIN, 0.5).unwrap() < 1e-24);
            a.normalize();
            assert!(a.values().iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn energy_is_monotone_in_radius() {
        let sp = disk_space(ElementOrder::Quadratic, 0.1);
        let a = DisplacementField::interpolate(sp, |x| [x.x1 * x.x2, x.x1.powi(2) - 0.3 * x.x2]);
        let mut prev = 0.0;
        for k in 1..20 {
            let e = local_energy(&a, Point2::new(0.05, 0.02), 0.3 + 0.03 * k as f64).unwrap();
            assert!(e >= prev);
            prev = e;
        }
    }
}
