//! Least-squares recovery of a local Airy function from a stress field.

use log::warn;
use nalgebra::{DMatrix, DVector};

use super::patch::Patch;
use super::poly::LocalPoly;
use crate::elasticity::StressField;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point2};
use crate::mesh::Mesh;
use crate::tensor::{self, Mat2};

/// Construction parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryOptions {
    /// Total degree of the polynomial representing `φ`.
    pub degree: u32,
    /// Relative Hessian mismatch above which a warning is logged.
    pub warn_residual: f64,
}

impl Default for AiryOptions {
    fn default() -> Self {
        Self {
            degree: 8,
            warn_residual: 0.05,
        }
    }
}

/// Airy function `φ` on a patch, with `N11 = φ,22`, `N22 = φ,11`,
/// `N12 = −φ,12`.
///
/// `φ = p(x) + c0 + c·(x − P0)` where `p` has no constant or linear part in
/// coordinates centered at `P0`, so the construction gauge is
/// `φ(P0) = ∇φ(P0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AiryField {
    pub patch: Patch,
    poly: LocalPoly,
    /// `(c0, c1, c2)`.
    pub affine: [f64; 3],
    /// Weighted RMS of `∇²φ − rot N` over the RMS of `N`.
    pub fit_residual: f64,
    /// Points and weights the fit used.
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl AiryField {
    pub fn phi(&self, x: Point2) -> f64 {
        let d = x - self.patch.p0;
        self.poly.value(x) + self.affine[0] + self.affine[1] * d.x1 + self.affine[2] * d.x2
    }

    pub fn grad(&self, x: Point2) -> [f64; 2] {
        let g = self.poly.grad(x);
        [g[0] + self.affine[1], g[1] + self.affine[2]]
    }

    pub fn hessian(&self, x: Point2) -> Mat2 {
        self.poly.hessian(x)
    }

    /// Stress `rot ∇²φ`.
    pub fn stress(&self, x: Point2) -> Mat2 {
        tensor::rot(&self.hessian(x))
    }

    /// `Δ²φ`.
    pub fn bilaplacian(&self, x: Point2) -> f64 {
        self.poly.bilaplacian(x)
    }

    /// Adds `c0 + c·(x − P0)`.
    pub fn add_affine(&mut self, c0: f64, c: [f64; 2]) {
        self.affine[0] += c0;
        self.affine[1] += c[0];
        self.affine[2] += c[1];
    }

    /// Changes the gauge so that `φ(p) = ∇φ(p) = 0`.
    pub fn regauge(&mut self, p: Point2) {
        let g = self.grad(p);
        let v = self.phi(p);
        let d = p - self.patch.p0;
        // Subtract the tangent plane at p: v + g·(x − p).
        self.add_affine(-(v - g[0] * d.x1 - g[1] * d.x2), [-g[0], -g[1]]);
    }

    /// `(node, x, [φ, φ,1, φ,2])` at the mesh nodes inside the patch.
    pub fn nodal(&self, mesh: &Mesh, domain: &DomainSpec) -> Vec<(usize, Point2, [f64; 3])> {
        mesh.nodes
            .iter()
            .enumerate()
            .filter(|(_, x)| self.patch.in_region(**x) && (domain.contains(**x) || mesh_boundary_point(domain, **x)))
            .map(|(i, x)| {
                let g = self.grad(*x);
                (i, *x, [self.phi(*x), g[0], g[1]])
            })
            .collect()
    }
}

fn mesh_boundary_point(domain: &DomainSpec, x: Point2) -> bool {
    let tol = 1e-9 * domain.outer.rho0();
    domain.outer.radial_gap(x) <= tol && domain.cavities.iter().all(|c| c.radial_gap(x) >= -tol)
}

/// Fits `φ` to a stress given at weighted sample points of the patch.
pub fn airy_from_samples(
    patch: &Patch,
    points: Vec<Point2>,
    weights: Vec<f64>,
    stress: &[Mat2],
    opts: &AiryOptions,
) -> Result<AiryField> {
    if opts.degree < 2 {
        return Err(Error::Airy("polynomial degree must be at least 2".into()));
    }
    let mut poly = LocalPoly::new(patch.p0, patch.scale(), 2, opts.degree);
    let nt = poly.terms.len();
    if points.len() * 3 < 2 * nt {
        return Err(Error::Airy(format!(
            "{} sample points are too few for a degree {} fit",
            points.len(),
            opts.degree
        )));
    }
    let mut a = DMatrix::<f64>::zeros(3 * points.len(), nt);
    let mut b = DVector::<f64>::zeros(3 * points.len());
    let mut norm2 = 0.0;
    for (k, (x, w)) in points.iter().zip(&weights).enumerate() {
        let sw = w.sqrt();
        let r = tensor::rot(&stress[k]);
        let rows = [
            (poly.basis_derivative(*x, 2, 0), r[0][0], 1.0),
            (poly.basis_derivative(*x, 0, 2), r[1][1], 1.0),
            (poly.basis_derivative(*x, 1, 1), r[0][1], std::f64::consts::SQRT_2),
        ];
        for (q, (row, rhs, s)) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                a[(3 * k + q, c)] = sw * s * v;
            }
            b[3 * k + q] = sw * s * rhs;
        }
        norm2 += w * tensor::norm2(&stress[k]);
    }
    let coeffs = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-13)
        .map_err(|e| Error::Airy(format!("least-squares solve failed: {e}")))?;
    let res = (&a * &coeffs - &b).norm();
    poly.coeffs = coeffs.iter().copied().collect();
    let fit_residual = if norm2 > 0.0 { res / norm2.sqrt() } else { res };
    if fit_residual > opts.warn_residual {
        warn!("Airy fit residual {fit_residual:.3e}: stress may not be equilibrated on the patch");
    }
    Ok(AiryField {
        patch: patch.clone(),
        poly,
        affine: [0.0; 3],
        fit_residual,
        points,
        weights,
    })
}

/// Airy function of a finite element stress on a patch, fitted at the
/// stress quadrature points inside the patch.
pub fn airy_on_patch(patch: &Patch, domain: &DomainSpec, stress: &StressField, opts: &AiryOptions) -> Result<AiryField> {
    let mut pts = Vec::new();
    let mut ws = Vec::new();
    let mut vals = Vec::new();
    for ((x, w), n) in stress.points.iter().zip(&stress.weights).zip(&stress.values) {
        if patch.in_region(*x) && (domain.contains(*x) || mesh_boundary_point(domain, *x)) {
            pts.push(*x);
            ws.push(*w);
            vals.push(*n);
        }
    }
    airy_from_samples(patch, pts, ws, &vals, opts)
}

/// Airy function of a closed-form stress, fitted on a regular grid.
pub fn airy_from_fn(
    patch: &Patch,
    domain: &DomainSpec,
    stress: impl Fn(Point2) -> Mat2,
    grid: usize,
    opts: &AiryOptions,
) -> Result<AiryField> {
    let (pts, ws) = patch.samples(domain, grid);
    let vals: Vec<Mat2> = pts.iter().map(|x| stress(*x)).collect();
    airy_from_samples(patch, pts, ws, &vals, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StarShape;

    fn disk() -> DomainSpec {
        DomainSpec::new(StarShape::circle(Point2::ORIGIN, 1.0).unwrap(), vec![], None, 0.2, 0.5, 10.0, 1.0).unwrap()
    }

    #[test]
    fn uniaxial_and_shear_states() {
        let d = disk();
        let c = Point2::new(0.1, 0.2);
        let patch = Patch::interior_disk(&d, c, 0.4).unwrap();
        let sigma = 2.5;
        let a = airy_from_fn(&patch, &d, |_| tensor::from_voigt(sigma, 0.0, 0.0), 24, &AiryOptions::default()).unwrap();
        for x in [Point2::new(0.3, 0.1), Point2::new(-0.1, 0.4)] {
            let expect = sigma * (x.x2 - c.x2).powi(2) / 2.0;
            assert!((a.phi(x) - expect).abs() < 1e-10);
        }
        let tau = -0.7;
        let s = airy_from_fn(&patch, &d, |_| tensor::from_voigt(0.0, 0.0, tau), 24, &AiryOptions::default()).unwrap();
        let x = Point2::new(0.35, -0.05);
        let expect = -tau * (x.x1 - c.x1) * (x.x2 - c.x2);
        assert!((s.phi(x) - expect).abs() < 1e-10);
        let z = airy_from_fn(&patch, &d, |_| tensor::ZERO, 24, &AiryOptions::default()).unwrap();
        assert!(tensor::max_abs(&z.hessian(x)) == 0.0);
    }

    #[test]
    fn regauge_moves_the_flat_point() {
        let d = disk();
        let patch = Patch::interior_disk(&d, Point2::ORIGIN, 0.5).unwrap();
        let mut a = airy_from_fn(&patch, &d, |x| tensor::from_voigt(x.x2, x.x1, 0.0), 24, &AiryOptions::default())
            .unwrap();
        let h = a.hessian(Point2::new(0.1, 0.1));
        let p = Point2::new(0.2, -0.3);
        a.regauge(p);
        assert!(a.phi(p).abs() < 1e-14 && a.grad(p)[0].abs() < 1e-14 && a.grad(p)[1].abs() < 1e-14);
        assert_eq!(a.hessian(Point2::new(0.1, 0.1)), h);
    }
}
