//! Bivariate polynomials in scaled local coordinates.

use crate::geometry::Point2;
use crate::tensor::Mat2;

/// Monomials `u^i v^j` with `lo ≤ i + j ≤ degree`, where
/// `(u, v) = (x − origin) / scale`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct LocalPoly {
    pub origin: Point2,
    pub scale: f64,
    pub terms: Vec<(u32, u32)>,
    pub coeffs: Vec<f64>,
}

fn falling(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    ((n - k + 1)..=n).map(f64::from).product()
}

impl LocalPoly {
    pub fn new(origin: Point2, scale: f64, lo: u32, degree: u32) -> Self {
        let mut terms = Vec::new();
        for d in lo..=degree {
            for j in 0..=d {
                terms.push((d - j, j));
            }
        }
        let coeffs = vec![0.0; terms.len()];
        Self {
            origin,
            scale,
            terms,
            coeffs,
        }
    }

    fn uv(&self, x: Point2) -> (f64, f64) {
        ((x.x1 - self.origin.x1) / self.scale, (x.x2 - self.origin.x2) / self.scale)
    }

    /// `∂^{a+b} m_k / ∂x1^a ∂x2^b` for every term `m_k`.
    pub fn basis_derivative(&self, x: Point2, a: u32, b: u32) -> Vec<f64> {
        let (u, v) = self.uv(x);
        let s = self.scale.powi(-((a + b) as i32));
        self.terms
            .iter()
            .map(|&(i, j)| {
                if i < a || j < b {
                    0.0
                } else {
                    s * falling(i, a) * falling(j, b) * u.powi((i - a) as i32) * v.powi((j - b) as i32)
                }
            })
            .collect()
    }

    pub fn derivative(&self, x: Point2, a: u32, b: u32) -> f64 {
        self.basis_derivative(x, a, b).iter().zip(&self.coeffs).map(|(m, c)| m * c).sum()
    }

    pub fn value(&self, x: Point2) -> f64 {
        self.derivative(x, 0, 0)
    }

    pub fn grad(&self, x: Point2) -> [f64; 2] {
        [self.derivative(x, 1, 0), self.derivative(x, 0, 1)]
    }

    pub fn hessian(&self, x: Point2) -> Mat2 {
        let h12 = self.derivative(x, 1, 1);
        [[self.derivative(x, 2, 0), h12], [h12, self.derivative(x, 0, 2)]]
    }

    /// `Δ²p`.
    pub fn bilaplacian(&self, x: Point2) -> f64 {
        self.derivative(x, 4, 0) + 2.0 * self.derivative(x, 2, 2) + self.derivative(x, 0, 4)
    }
}
