//! Lamé fields, moduli conversions, the plate elasticity tensor `ℂ` and the
//! compliance tensor `𝕃` acting on Airy Hessians.

use std::sync::Arc;

use log::warn;
use rstar::primitives::GeomWithData;
use rstar::RTree;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point2};
use crate::mesh::{Mesh, TriangleIndex};
use crate::tensor::{self, Mat2};

/// Young's modulus and Poisson ratio from the Lamé moduli.
pub fn enu_from_lame(mu: f64, lambda: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0) {
        return Err(Error::Material(format!("mu must be positive, got {mu}")));
    }
    if !(2.0 * mu + 3.0 * lambda > 0.0) {
        return Err(Error::Material(format!(
            "2 mu + 3 lambda must be positive, got {}",
            2.0 * mu + 3.0 * lambda
        )));
    }
    Ok(enu_unchecked(mu, lambda))
}

fn enu_unchecked(mu: f64, lambda: f64) -> (f64, f64) {
    let e = mu * (2.0 * mu + 3.0 * lambda) / (mu + lambda);
    let nu = lambda / (2.0 * (mu + lambda));
    (e, nu)
}

/// Lamé moduli `(μ, λ)` from Young's modulus and Poisson ratio.
pub fn lame_from_enu(e: f64, nu: f64) -> Result<(f64, f64)> {
    if !(e > 0.0) {
        return Err(Error::Material(format!("E must be positive, got {e}")));
    }
    if !(nu > -1.0 && nu < 0.5) {
        return Err(Error::Material(format!(
            "nu = {nu} outside (-1, 0.5): singular Lamé moduli"
        )));
    }
    Ok((e / (2.0 * (1.0 + nu)), nu * e / ((1.0 + nu) * (1.0 - 2.0 * nu))))
}

/// Plane-stress effective modulus `λ* = 2μλ/(λ + 2μ)`.
pub fn lambda_star(mu: f64, lambda: f64) -> Result<f64> {
    if !(lambda + 2.0 * mu > 0.0) {
        return Err(Error::Material(format!(
            "lambda + 2 mu must be positive, got {}",
            lambda + 2.0 * mu
        )));
    }
    Ok(2.0 * mu * lambda / (lambda + 2.0 * mu))
}

/// Pointwise plate moduli.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moduli {
    pub e: f64,
    pub nu: f64,
    /// Plate thickness.
    pub h: f64,
}

impl Moduli {
    pub fn mu(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    /// `ℂA = Eh/(1−ν²)·((1−ν)Â + ν tr(A) I)`.
    pub fn apply_c(&self, a: &Mat2) -> Mat2 {
        let k = self.e * self.h / (1.0 - self.nu * self.nu);
        let s = tensor::sym(a);
        let tr = tensor::trace(a);
        [
            [k * ((1.0 - self.nu) * s[0][0] + self.nu * tr), k * (1.0 - self.nu) * s[0][1]],
            [k * (1.0 - self.nu) * s[1][0], k * ((1.0 - self.nu) * s[1][1] + self.nu * tr)],
        ]
    }

    /// `𝕃A = (1+ν)/(Eh)·A − ν/(Eh)·tr(A) I`.
    pub fn apply_l(&self, a: &Mat2) -> Mat2 {
        let eh = self.e * self.h;
        let tr = tensor::trace(a);
        [
            [((1.0 + self.nu) * a[0][0] - self.nu * tr) / eh, (1.0 + self.nu) * a[0][1] / eh],
            [(1.0 + self.nu) * a[1][0] / eh, ((1.0 + self.nu) * a[1][1] - self.nu * tr) / eh],
        ]
    }
}

/// Bivariate polynomial in `(u, v)` with dense coefficients `c[i][j]` of
/// `u^i v^j`.
#[derive(Clone, Debug, PartialEq)]
struct Poly2 {
    c: Vec<Vec<f64>>,
}

impl Poly2 {
    /// `Σ_j a_j (u² + v²)^j`.
    fn radial(coeffs: &[f64]) -> Self {
        let deg = 2 * coeffs.len().max(1);
        let mut c = vec![vec![0.0; deg + 1]; deg + 1];
        for (j, &a) in coeffs.iter().enumerate() {
            // (u² + v²)^j = Σ_m C(j, m) u^{2m} v^{2(j−m)}
            let mut binom = 1.0;
            for m in 0..=j {
                c[2 * m][2 * (j - m)] += a * binom;
                binom = binom * (j - m) as f64 / (m + 1) as f64;
            }
        }
        Self { c }
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.c.iter().enumerate().rev() {
            let mut r = 0.0;
            for &a in row.iter().rev() {
                r = r * v + a;
            }
            s += r * u.powi(i as i32);
        }
        s
    }

    fn du(&self) -> Self {
        let n = self.c.len();
        let mut c = vec![vec![0.0; n]; n];
        for i in 1..n {
            for j in 0..n {
                c[i - 1][j] = i as f64 * self.c[i][j];
            }
        }
        Self { c }
    }

    fn dv(&self) -> Self {
        let n = self.c.len();
        let mut c = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 1..n {
                c[i][j - 1] = j as f64 * self.c[i][j];
            }
        }
        Self { c }
    }
}

/// Per-node values on a mesh, interpolated linearly.
#[derive(Clone, Debug)]
pub struct NodalField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
    index: TriangleIndex,
    nodes: RTree<GeomWithData<[f64; 2], usize>>,
}

impl NodalField {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_nodes() {
            return Err(Error::Material(format!(
                "{} nodal values for a mesh with {} nodes",
                values.len(),
                mesh.num_nodes()
            )));
        }
        let index = TriangleIndex::new(&mesh);
        let nodes = RTree::bulk_load(
            mesh.nodes
                .iter()
                .enumerate()
                .map(|(i, p)| GeomWithData::new(p.to_array(), i))
                .collect(),
        );
        Ok(Self {
            mesh,
            values,
            index,
            nodes,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: Point2) -> f64 {
        match self.index.locate(&self.mesh, x) {
            Some(l) => {
                let t = self.mesh.triangles[l.triangle];
                (0..3).map(|k| l.bary[k] * self.values[t[k]]).sum()
            }
            None => {
                let n = self.nodes.nearest_neighbor(&x.to_array()).expect("non-empty mesh");
                self.values[n.data]
            }
        }
    }
}

/// Specification of a scalar coefficient field.
#[derive(Clone, Debug)]
pub enum ScalarField {
    Constant(f64),
    /// `Σ_j c_j |x − center|^{2j}`.
    Radial { center: Point2, coeffs: Vec<f64> },
    Nodal(Arc<NodalField>),
}

impl ScalarField {
    pub fn eval(&self, x: Point2) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Radial { center, coeffs } => {
                let r2 = (x - *center).norm2();
                coeffs.iter().rev().fold(0.0, |acc, c| acc * r2 + c)
            }
            ScalarField::Nodal(n) => n.eval(x),
        }
    }

    /// `Σ_{k≤4} r0^k max_{|β|=k} sup |∂^β f|` over the sample points, or
    /// `None` for nodal data.
    pub fn c4_norm(&self, r0: f64, samples: &[Point2]) -> Option<f64> {
        match self {
            ScalarField::Constant(c) => Some(c.abs()),
            ScalarField::Radial { center, coeffs } => {
                let mut level = vec![Poly2::radial(coeffs)];
                let mut total = 0.0;
                for k in 0..=4 {
                    let sup = level
                        .iter()
                        .flat_map(|p| samples.iter().map(move |x| p.eval(x.x1 - center.x1, x.x2 - center.x2).abs()))
                        .fold(0.0, f64::max);
                    total += r0.powi(k) * sup;
                    let mut next = vec![level[0].du()];
                    next.extend(level.iter().map(Poly2::dv));
                    level = next;
                }
                Some(total)
            }
            ScalarField::Nodal(_) => None,
        }
    }
}

/// Lamé coefficient fields with their a-priori bounds.
#[derive(Clone, Debug)]
pub struct LameField {
    pub lambda: ScalarField,
    pub mu: ScalarField,
    /// Lower bound for `μ`.
    pub alpha0: f64,
    /// Lower bound for `2μ + 3λ`.
    pub gamma0: f64,
    /// Upper bound for the `C⁴` norms of `λ` and `μ`.
    pub lambda0: f64,
}

/// Sample points covering `Ω̄∖D`: a grid restricted to the domain plus the
/// boundary curves.
fn domain_samples(domain: &DomainSpec) -> Vec<Point2> {
    let mut pts = domain.outer.polyline(256);
    for c in &domain.cavities {
        pts.extend(c.polyline(128));
    }
    let (c, r) = (domain.outer.center(), domain.outer.max_radius());
    let n = 48;
    for i in 0..=n {
        for j in 0..=n {
            let p = c + Point2::new(-r + 2.0 * r * i as f64 / n as f64, -r + 2.0 * r * j as f64 / n as f64);
            if domain.contains(p) {
                pts.push(p);
            }
        }
    }
    pts
}

impl LameField {
    /// Checks `μ ≥ α0`, `2μ + 3λ ≥ γ0` at sample points of the domain (and
    /// at the nodes of nodal data) and the `C⁴` bounds for analytic fields.
    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.gamma0 > 0.0 && self.lambda0 > 0.0) {
            return Err(Error::Material("alpha0, gamma0 and Lambda0 must be positive".into()));
        }
        let mut pts = domain_samples(domain);
        for f in [&self.lambda, &self.mu] {
            if let ScalarField::Nodal(n) = f {
                pts.extend(n.mesh.nodes.iter().copied());
            }
        }
        for x in &pts {
            let (mu, lambda) = (self.mu.eval(*x), self.lambda.eval(*x));
            if !(mu >= self.alpha0 * (1.0 - 1e-12)) {
                return Err(Error::Material(format!(
                    "mu = {mu} below alpha0 = {} at ({}, {})",
                    self.alpha0, x.x1, x.x2
                )));
            }
            if !(2.0 * mu + 3.0 * lambda >= self.gamma0 * (1.0 - 1e-12)) {
                return Err(Error::Material(format!(
                    "2 mu + 3 lambda = {} below gamma0 = {} at ({}, {})",
                    2.0 * mu + 3.0 * lambda,
                    self.gamma0,
                    x.x1,
                    x.x2
                )));
            }
        }
        for (name, f) in [("lambda", &self.lambda), ("mu", &self.mu)] {
            match f.c4_norm(domain.r0, &pts) {
                Some(norm) if norm > self.lambda0 * (1.0 + 1e-12) => {
                    return Err(Error::Material(format!(
                        "C4 norm of {name} = {norm} exceeds Lambda0 = {}",
                        self.lambda0
                    )));
                }
                Some(_) => {}
                None => warn!("C4 bound of nodal {name} data not verified"),
            }
        }
        Ok(())
    }
}

/// Plate of thickness `h` made of a (possibly inhomogeneous) isotropic
/// material.
#[derive(Clone, Debug)]
pub struct PlateMaterial {
    pub h: f64,
    pub lame: LameField,
}

impl PlateMaterial {
    /// Homogeneous plate; the bounds are set to the attained values.
    pub fn homogeneous(e: f64, nu: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Material(format!("thickness must be positive, got {h}")));
        }
        let (mu, lambda) = lame_from_enu(e, nu)?;
        Ok(Self {
            h,
            lame: LameField {
                lambda: ScalarField::Constant(lambda),
                mu: ScalarField::Constant(mu),
                alpha0: mu,
                gamma0: 2.0 * mu + 3.0 * lambda,
                lambda0: mu.max(lambda.abs()),
            },
        })
    }

    /// The benchmark material `E = 1`, `ν = 0.3`, `h = 1`.
    pub fn benchmark() -> Self {
        Self::homogeneous(1.0, 0.3, 1.0).expect("valid benchmark moduli")
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(
            (&self.lame.lambda, &self.lame.mu),
            (ScalarField::Constant(_), ScalarField::Constant(_))
        )
    }

    pub fn moduli_at(&self, x: Point2) -> Moduli {
        let (e, nu) = enu_unchecked(self.lame.mu.eval(x), self.lame.lambda.eval(x));
        Moduli { e, nu, h: self.h }
    }

    pub fn apply_c(&self, x: Point2, a: &Mat2) -> Mat2 {
        self.moduli_at(x).apply_c(a)
    }

    pub fn apply_l(&self, x: Point2, a: &Mat2) -> Mat2 {
        self.moduli_at(x).apply_l(a)
    }

    /// `ξ0 = min(2α0, γ0)`, the convexity constant of `ℂ/h`.
    pub fn xi0(&self) -> f64 {
        (2.0 * self.lame.alpha0).min(self.lame.gamma0)
    }

    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        self.lame.validate(domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn conversion_examples() {
        assert_eq!(enu_from_lame(1.0, 0.0).unwrap(), (2.0, 0.0));
        let (e, nu) = enu_from_lame(1.0, 1.0).unwrap();
        assert_relative_eq!(e, 2.5, epsilon = 1e-15);
        assert_relative_eq!(nu, 0.25, epsilon = 1e-15);
        assert_eq!(lame_from_enu(2.0, 0.0).unwrap(), (1.0, 0.0));
        let (mu, lambda) = lame_from_enu(2.5, 0.25).unwrap();
        assert_relative_eq!(mu, 1.0, epsilon = 1e-15);
        assert_relative_eq!(lambda, 1.0, epsilon = 1e-15);
        assert!(lame_from_enu(1.0, 0.5).is_err());
        assert!(lame_from_enu(1.0, -1.0).is_err());
        assert!(enu_from_lame(0.0, 1.0).is_err());
        assert_relative_eq!(lambda_star(1.0, 1.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(lambda_star(1.0, 0.0).unwrap(), 0.0);
        assert!(lambda_star(1.0, -2.0).is_err());
    }

    #[test]
    fn apply_examples() {
        let m = Moduli { e: 2.0, nu: 0.3, h: 0.5 };
        let eh = m.e * m.h;
        let c = m.apply_c(&tensor::IDENTITY);
        assert_relative_eq!(c[0][0], eh / (1.0 - m.nu), epsilon = 1e-14);
        assert_eq!(c[0][1], 0.0);
        let dev = tensor::from_voigt(1.0, -1.0, 0.7);
        let cd = m.apply_c(&dev);
        for (x, y) in cd.iter().flatten().zip(dev.iter().flatten()) {
            assert_relative_eq!(*x, eh / (1.0 + m.nu) * y, epsilon = 1e-14);
        }
        assert_eq!(m.apply_c(&[[0.0, 1.0], [-1.0, 0.0]]), tensor::ZERO);
        let l = m.apply_l(&tensor::IDENTITY);
        assert_relative_eq!(l[1][1], (1.0 - m.nu) / eh, epsilon = 1e-15);
        let m0 = Moduli { nu: 0.0, ..m };
        assert_eq!(m0.apply_l(&dev), tensor::scale(&dev, 1.0 / eh));
    }

    #[test]
    fn radial_field_and_c4_norm() {
        // f = 1 + 2 r²: derivatives up to order two are nonzero.
        let f = ScalarField::Radial {
            center: Point2::ORIGIN,
            coeffs: vec![1.0, 2.0],
        };
        assert_relative_eq!(f.eval(Point2::new(0.3, 0.4)), 1.5, epsilon = 1e-15);
        // Oracle at the single sample (1, 0): |f| = 3, max|∇f| = 4, max|D²f| = 4.
        let n = f.c4_norm(0.5, &[Point2::new(1.0, 0.0)]).unwrap();
        assert_relative_eq!(n, 3.0 + 0.5 * 4.0 + 0.25 * 4.0, epsilon = 1e-14);
    }

    #[test]
    fn homogeneous_bounds_validate() {
        let d = DomainSpec::new(
            crate::geometry::StarShape::circle(Point2::ORIGIN, 1.0).unwrap(),
            vec![],
            None,
            0.2,
            0.5,
            10.0,
            1.0,
        )
        .unwrap();
        let m = PlateMaterial::benchmark();
        m.validate(&d).unwrap();
        let mut soft = m.clone();
        soft.lame.alpha0 *= 2.0;
        assert!(soft.validate(&d).is_err());
    }
}
