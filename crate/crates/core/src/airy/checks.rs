//! Diagnostics of a local Airy function: Dirichlet data on a traction-free
//! arc, strain functions, field-equation residuals and the sandwich bound.

use std::f64::consts::TAU;

use super::field::AiryField;
use super::patch::{Patch, PatchKind};
use crate::elasticity::DisplacementField;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point2, PolylineIndex};
use crate::material::PlateMaterial;
use crate::mesh::gauss_legendre;
use crate::tensor::{self, Mat2};

/// Boundary values of `φ` and `φ,n` on a cavity arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletResidual {
    pub max_phi: f64,
    pub max_phi_n: f64,
    /// `max|φ|` on the arc over `max|φ|` in the patch.
    pub phi_rel: f64,
    /// `max|φ,n|` on the arc over `max|∇φ|` in the patch.
    pub phi_n_rel: f64,
}

/// `(max|φ|, max|φ,n|)` along the cavity arc of a boundary patch.
pub fn dirichlet_residual(airy: &AiryField, domain: &DomainSpec, samples: usize) -> Result<DirichletResidual> {
    let arc = airy.patch.cavity_arc(domain, samples)?;
    let mut max_phi: f64 = 0.0;
    let mut max_phi_n: f64 = 0.0;
    for (x, n) in &arc {
        let g = airy.grad(*x);
        max_phi = max_phi.max(airy.phi(*x).abs());
        max_phi_n = max_phi_n.max((g[0] * n.x1 + g[1] * n.x2).abs());
    }
    let mut ref_phi: f64 = 0.0;
    let mut ref_grad: f64 = 0.0;
    for x in &airy.points {
        let g = airy.grad(*x);
        ref_phi = ref_phi.max(airy.phi(*x).abs());
        ref_grad = ref_grad.max(g[0].hypot(g[1]));
    }
    let rel = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
    Ok(DirichletResidual {
        max_phi,
        max_phi_n,
        phi_rel: rel(max_phi, ref_phi),
        phi_n_rel: rel(max_phi_n, ref_grad),
    })
}

/// Strain functions `K = 𝕃∇²φ` at the fit points of an Airy function.
#[derive(Clone, Debug, PartialEq)]
pub struct StrainFunctions {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
    pub values: Vec<Mat2>,
}

/// `K = ((1+ν)∇²φ − ν Δφ I) / (Eh)` at a point.
pub fn strain_function_at(material: &PlateMaterial, airy: &AiryField, x: Point2) -> Mat2 {
    let m = material.moduli_at(x);
    let h = airy.hessian(x);
    let lap = h[0][0] + h[1][1];
    let eh = m.e * m.h;
    [
        [((1.0 + m.nu) * h[0][0] - m.nu * lap) / eh, (1.0 + m.nu) * h[0][1] / eh],
        [(1.0 + m.nu) * h[1][0] / eh, ((1.0 + m.nu) * h[1][1] - m.nu * lap) / eh],
    ]
}

pub fn strain_k(material: &PlateMaterial, airy: &AiryField) -> StrainFunctions {
    StrainFunctions {
        points: airy.points.clone(),
        weights: airy.weights.clone(),
        values: airy.points.iter().map(|x| strain_function_at(material, airy, *x)).collect(),
    }
}

impl StrainFunctions {
    /// Strains `rot K`.
    pub fn strains(&self) -> Vec<Mat2> {
        self.values.iter().map(tensor::rot).collect()
    }

    /// Weighted RMS of `rot K − ∇̂a` over the RMS of `∇̂a`.
    pub fn strain_mismatch(&self, a: &DisplacementField) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((x, w), k) in self.points.iter().zip(&self.weights).zip(&self.values) {
            let Some(loc) = a.locate(*x) else { continue };
            let eps = a.strain_in(loc.triangle, loc.bary);
            num += w * tensor::norm2(&tensor::sub(&tensor::rot(k), &eps));
            den += w * tensor::norm2(&eps);
        }
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            num.sqrt()
        }
    }
}

/// Normalized residuals of the field equations on a patch.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldResiduals {
    /// Largest `|∫K:∇²ψ| / ∫|K||∇²ψ|` over the bump test functions.
    pub plate: f64,
    /// Weighted RMS of `ε11,22 + ε22,11 − 2ε12,12` for `ε = rot K`, scaled
    /// by the patch size squared over the RMS of `K`.
    pub compatibility: f64,
    /// Raw `∫K:∇²ψ` per test function.
    pub weak: Vec<f64>,
    pub tests: Vec<Bump>,
}

/// Test function `ψ = (1 − |x − c|²/ρ²)⁴` on `B_ρ(c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub center: Point2,
    pub radius: f64,
}

impl Bump {
    pub fn value(&self, x: Point2) -> f64 {
        let q = 1.0 - (x - self.center).norm2() / (self.radius * self.radius);
        if q <= 0.0 {
            0.0
        } else {
            q.powi(4)
        }
    }

    pub fn hessian(&self, x: Point2) -> Mat2 {
        let y = x - self.center;
        let r2 = self.radius * self.radius;
        let q = 1.0 - y.norm2() / r2;
        if q <= 0.0 {
            return tensor::ZERO;
        }
        let a = -8.0 * q.powi(3) / r2;
        let b = 48.0 * q * q / (r2 * r2);
        [[a + b * y.x1 * y.x1, b * y.x1 * y.x2], [b * y.x1 * y.x2, a + b * y.x2 * y.x2]]
    }

    /// `∫ψ = πρ²/5`.
    pub fn integral(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius / 5.0
    }

    /// Polar product rule on the disk.
    pub fn quadrature(&self) -> Vec<(Point2, f64)> {
        let (gx, gw) = gauss_legendre(6);
        let rings = 8;
        let sectors = 96;
        let mut out = Vec::with_capacity(rings * 6 * sectors);
        for k in 0..rings {
            for (x, w) in gx.iter().zip(&gw) {
                let r = self.radius * (k as f64 + x) / rings as f64;
                let wr = w * self.radius / rings as f64 * r * TAU / sectors as f64;
                for j in 0..sectors {
                    let t = TAU * j as f64 / sectors as f64;
                    out.push((self.center + Point2::from_polar(r, t), wr));
                }
            }
        }
        out
    }
}

/// Bumps whose supports lie inside the patch and `Ω∖D̄`.
pub fn test_bumps(patch: &Patch, domain: &DomainSpec, max: usize) -> Vec<Bump> {
    let (candidates, radius): (Vec<Point2>, f64) = match patch.kind {
        PatchKind::InteriorDisk { center, radius } => {
            let r = 0.45 * radius;
            let mut c = vec![center];
            for k in 0..6 {
                c.push(center + Point2::from_polar(0.5 * radius, TAU * k as f64 / 6.0));
            }
            (c, r)
        }
        PatchKind::BoundaryRect {
            origin,
            tangent,
            normal,
            half_width,
            half_height,
            ..
        } => {
            let r = 0.3 * half_width.min(half_height);
            let mut c = Vec::new();
            for j in [0.65, 0.4, 0.85] {
                for i in [0.0, -0.5, 0.5] {
                    c.push(origin + tangent * (i * half_width) + normal * (j * half_height));
                }
            }
            (c, r)
        }
    };
    let walls: Vec<PolylineIndex> = std::iter::once(&domain.outer)
        .chain(&domain.cavities)
        .map(|s| PolylineIndex::of_shape(s, 1024))
        .collect();
    candidates
        .into_iter()
        .filter(|c| {
            domain.contains(*c)
                && walls.iter().all(|w| w.distance(*c) > 1.05 * radius)
                && (0..32).all(|k| patch.in_region(*c + Point2::from_polar(radius, TAU * k as f64 / 32.0)))
        })
        .take(max)
        .map(|center| Bump { center, radius })
        .collect()
}

/// `K_{11,11} + K_{22,22} + 2K_{12,12}` of the strain functions.
fn div_div_k(material: &PlateMaterial, airy: &AiryField, x: Point2) -> f64 {
    if material.is_homogeneous() {
        let m = material.moduli_at(x);
        return airy.bilaplacian(x) / (m.e * m.h);
    }
    let d = 1e-2 * airy.patch.scale();
    div_div(|y| strain_function_at(material, airy, y), x, d)
}

/// Fourth-order central differences of `A11,11 + A22,22 + 2A12,12`.
fn div_div(f: impl Fn(Point2) -> Mat2, x: Point2, d: f64) -> f64 {
    let e1 = Point2::new(d, 0.0);
    let e2 = Point2::new(0.0, d);
    let second = |e: Point2, i: usize, j: usize| {
        (-f(x + e * 2.0)[i][j] + 16.0 * f(x + e)[i][j] - 30.0 * f(x)[i][j] + 16.0 * f(x - e)[i][j]
            - f(x - e * 2.0)[i][j])
            / (12.0 * d * d)
    };
    let mixed = |i: usize, j: usize| {
        let c = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
        let mut s = 0.0;
        for (a, wa) in c {
            for (b, wb) in c {
                s += wa * wb * f(x + e1 * a + e2 * b)[i][j];
            }
        }
        s / (144.0 * d * d)
    };
    second(e1, 0, 0) + second(e2, 1, 1) + 2.0 * mixed(0, 1)
}

/// Saint-Venant residual `ε11,22 + ε22,11 − 2ε12,12` of a strain field by
/// central differences with step `d`.
pub fn compatibility_at(strain: impl Fn(Point2) -> Mat2, x: Point2, d: f64) -> f64 {
    // With ε = rot K the Saint-Venant operator is div div K.
    div_div(|y| tensor::rot(&strain(y)), x, d)
}

/// Weak plate and compatibility residuals of an Airy function.
pub fn field_residuals(airy: &AiryField, material: &PlateMaterial, domain: &DomainSpec) -> Result<FieldResiduals> {
    let tests = test_bumps(&airy.patch, domain, 5);
    if tests.is_empty() {
        return Err(Error::Airy("no test function fits inside the patch".into()));
    }
    let mut plate: f64 = 0.0;
    let mut weak = Vec::with_capacity(tests.len());
    for b in &tests {
        let mut s = 0.0;
        let mut abs = 0.0;
        for (x, w) in b.quadrature() {
            let k = strain_function_at(material, airy, x);
            let h = b.hessian(x);
            s += w * tensor::dot(&k, &h);
            abs += w * tensor::norm2(&k).sqrt() * tensor::norm2(&h).sqrt();
        }
        weak.push(s);
        plate = plate.max(if abs > 0.0 { s.abs() / abs } else { 0.0 });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, w) in airy.points.iter().zip(&airy.weights) {
        num += w * div_div_k(material, airy, *x).powi(2);
        den += w * tensor::norm2(&strain_function_at(material, airy, *x));
    }
    let l2 = airy.patch.scale().powi(2);
    let compatibility = if den > 0.0 { l2 * (num / den).sqrt() } else { 0.0 };
    Ok(FieldResiduals {
        plate,
        compatibility,
        weak,
        tests,
    })
}

/// Outcome of the two-sided energy comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichReport {
    pub points: usize,
    pub satisfied: usize,
    /// Extremes of `|∇̂a|²(Eh)² / |∇²φ|²` over points with nonzero Hessian.
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl SandwichReport {
    pub fn fraction(&self) -> f64 {
        if self.points == 0 {
            1.0
        } else {
            self.satisfied as f64 / self.points as f64
        }
    }
}

/// Checks `(1−|ν|)²/(Eh)²|∇²φ|² ≤ |∇̂a|² ≤ (1+|ν|)²/(Eh)²|∇²φ|²` with
/// multiplicative slack at each point.
pub fn sandwich_fraction(
    points: &[Point2],
    hessian: impl Fn(Point2) -> Mat2,
    strain: impl Fn(Point2) -> Option<Mat2>,
    material: &PlateMaterial,
    slack: f64,
) -> SandwichReport {
    let mut rep = SandwichReport {
        points: 0,
        satisfied: 0,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
    };
    for x in points {
        let Some(eps) = strain(*x) else { continue };
        let m = material.moduli_at(*x);
        let eh2 = (m.e * m.h).powi(2);
        let h2 = tensor::norm2(&hessian(*x));
        let e2 = tensor::norm2(&eps);
        let lo = (1.0 - m.nu.abs()).powi(2) / eh2 * h2;
        let hi = (1.0 + m.nu.abs()).powi(2) / eh2 * h2;
        rep.points += 1;
        if lo <= e2 * (1.0 + slack) && e2 <= hi * (1.0 + slack) {
            rep.satisfied += 1;
        }
        if h2 > 0.0 {
            let r = e2 * eh2 / h2;
            rep.min_ratio = rep.min_ratio.min(r);
            rep.max_ratio = rep.max_ratio.max(r);
        }
    }
    rep
}

/// Sandwich check of an Airy function against a displacement at the fit
/// points.
pub fn sandwich_check(airy: &AiryField, a: &DisplacementField, material: &PlateMaterial, slack: f64) -> SandwichReport {
    sandwich_fraction(
        &airy.points,
        |x| airy.hessian(x),
        |x| a.locate(x).map(|l| a.strain_in(l.triangle, l.bary)),
        material,
        slack,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::field::{airy_from_fn, AiryOptions};
    use crate::geometry::StarShape;

    fn disk() -> DomainSpec {
        DomainSpec::new(StarShape::circle(Point2::ORIGIN, 1.0).unwrap(), vec![], None, 0.2, 0.5, 10.0, 1.0).unwrap()
    }

    /// Stress whose Airy function is `φ` (given by its Hessian).
    fn stress_of(h: impl Fn(Point2) -> Mat2) -> impl Fn(Point2) -> Mat2 {
        move |x| tensor::rot(&h(x))
    }

    #[test]
    fn biharmonic_input_has_vanishing_residuals() {
        let d = disk();
        let patch = Patch::interior_disk(&d, Point2::new(0.1, 0.0), 0.5).unwrap();
        // φ = x1³x2
        let h = |x: Point2| [[6.0 * x.x1 * x.x2, 3.0 * x.x1 * x.x1], [3.0 * x.x1 * x.x1, 0.0]];
        let a = airy_from_fn(&patch, &d, stress_of(h), 24, &AiryOptions::default()).unwrap();
        let mat = PlateMaterial::benchmark();
        let r = field_residuals(&a, &mat, &d).unwrap();
        assert!(r.tests.len() >= 3);
        assert!(r.plate <= 1e-8 && r.compatibility <= 1e-8, "{r:?}");
    }

    #[test]
    fn x1_fourth_is_detected() {
        let d = disk();
        let patch = Patch::interior_disk(&d, Point2::ORIGIN, 0.5).unwrap();
        let h = |x: Point2| [[12.0 * x.x1 * x.x1, 0.0], [0.0, 0.0]];
        let a = airy_from_fn(&patch, &d, stress_of(h), 24, &AiryOptions::default()).unwrap();
        let mat = PlateMaterial::homogeneous(2.0, 0.25, 0.5).unwrap();
        let r = field_residuals(&a, &mat, &d).unwrap();
        for (w, b) in r.weak.iter().zip(&r.tests) {
            let expect = 24.0 * b.integral() / (2.0 * 0.5);
            assert!((w - expect).abs() < 1e-8 * expect, "{w} vs {expect}");
        }
        assert!(r.plate > 0.01);
    }

    #[test]
    fn strain_functions_match_the_compliance() {
        let d = disk();
        let patch = Patch::interior_disk(&d, Point2::ORIGIN, 0.5).unwrap();
        let h = |x: Point2| [[x.x2.sin() + 1.0, 0.3 * x.x1], [0.3 * x.x1, x.x1.cos()]];
        let a = airy_from_fn(&patch, &d, stress_of(h), 16, &AiryOptions::default()).unwrap();
        let mat = PlateMaterial::homogeneous(3.0, 0.2, 0.7).unwrap();
        let k = strain_k(&mat, &a);
        for (x, v) in k.points.iter().zip(&k.values) {
            let other = mat.apply_l(*x, &a.hessian(*x));
            assert!(tensor::max_abs(&tensor::sub(v, &other)) <= 1e-12 * (1.0 + tensor::max_abs(v)));
        }
        // ν = 0, φ = σx2²/2 gives K22 = σ/(Eh) and rot K = ε.
        let sigma = 1.7;
        let u = airy_from_fn(&patch, &d, |_| tensor::from_voigt(sigma, 0.0, 0.0), 16, &AiryOptions::default()).unwrap();
        let m0 = PlateMaterial::homogeneous(2.0, 0.0, 0.5).unwrap();
        let kk = strain_function_at(&m0, &u, Point2::new(0.1, 0.2));
        assert!((kk[1][1] - sigma).abs() < 1e-10 && kk[0][0].abs() < 1e-10 && kk[0][1].abs() < 1e-10);
    }

    #[test]
    fn sandwich_extremes() {
        let mat = PlateMaterial::homogeneous(1.0, 0.3, 1.0).unwrap();
        let pts = [Point2::new(0.1, 0.1)];
        let shear = tensor::from_voigt(0.0, 0.0, 0.4);
        let r = sandwich_fraction(&pts, |_| tensor::rot(&shear), |x| Some(mat.apply_l(x, &shear)), &mat, 1e-12);
        assert!((r.max_ratio - 1.69).abs() < 1e-12 && r.fraction() == 1.0);
        let bi = tensor::scale(&tensor::IDENTITY, 0.8);
        let r = sandwich_fraction(&pts, |_| tensor::rot(&bi), |x| Some(mat.apply_l(x, &bi)), &mat, 1e-12);
        assert!((r.min_ratio - 0.49).abs() < 1e-12 && r.fraction() == 1.0);
        let m0 = PlateMaterial::homogeneous(1.0, 0.0, 1.0).unwrap();
        let n = tensor::from_voigt(0.3, -0.2, 0.1);
        let r = sandwich_fraction(&pts, |_| tensor::rot(&n), |x| Some(m0.apply_l(x, &n)), &m0, 0.0);
        assert!((r.min_ratio - 1.0).abs() < 1e-12 && (r.max_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_displacement_strain_is_compatible() {
        let u = |x: Point2| [x.x1.sin() * x.x2, (x.x1 * x.x2).cos()];
        let strain = |x: Point2| {
            let d = 1e-6;
            let g = |i: usize, e: Point2| (u(x + e)[i] - u(x - e)[i]) / (2.0 * d);
            let (e1, e2) = (Point2::new(d, 0.0), Point2::new(0.0, d));
            tensor::sym(&[[g(0, e1), g(0, e2)], [g(1, e1), g(1, e2)]])
        };
        let exact = |x: Point2| {
            // Closed-form symmetric gradient.
            let a11 = x.x1.cos() * x.x2;
            let a12 = x.x1.sin();
            let a21 = -(x.x1 * x.x2).sin() * x.x2;
            let a22 = -(x.x1 * x.x2).sin() * x.x1;
            tensor::sym(&[[a11, a12], [a21, a22]])
        };
        let x = Point2::new(0.3, -0.4);
        assert!(tensor::max_abs(&tensor::sub(&strain(x), &exact(x))) < 1e-8);
        assert!(compatibility_at(exact, x, 1e-2).abs() < 1e-6);
    }
}
