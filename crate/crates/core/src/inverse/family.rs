//! One-parameter cavity families `D_t = D + t·δ`.

use crate::error::{Error, Result};
use crate::geometry::{apriori_check, cavity_checks, DomainSpec, Point2, StarShape};

#[derive(Clone, Debug, PartialEq)]
pub struct CavityFamily {
    pub base: StarShape,
    /// Perturbation of the center.
    pub dcenter: Point2,
    /// Perturbation of `[ρ0, a1, b1, …]`.
    pub direction: Vec<f64>,
    pub t_values: Vec<f64>,
}

impl CavityFamily {
    pub fn new(base: StarShape, dcenter: Point2, direction: Vec<f64>, t_values: Vec<f64>) -> Result<Self> {
        if t_values.is_empty() {
            return Err(Error::InvalidArgument("cavity family has no t values".into()));
        }
        if t_values.iter().chain(&direction).any(|v| !v.is_finite()) || !dcenter.is_finite() {
            return Err(Error::InvalidArgument("cavity family has non-finite data".into()));
        }
        Ok(Self {
            base,
            dcenter,
            direction,
            t_values,
        })
    }

    /// Dilations `ρ0 + t` of a base shape.
    pub fn radial(base: StarShape, t_values: Vec<f64>) -> Result<Self> {
        Self::new(base, Point2::ORIGIN, vec![1.0], t_values)
    }

    pub fn shape(&self, t: f64) -> Result<StarShape> {
        self.base.displaced(self.dcenter, &self.direction, t)
    }

    /// Checks that every member, placed as cavity `k` of `domain`, keeps the
    /// domain in the a-priori class.
    pub fn validate(&self, domain: &DomainSpec, k: usize) -> Result<()> {
        for &t in &self.t_values {
            let shape = self.shape(t)?;
            if let Some(bad) = cavity_checks(domain, &shape).into_iter().find(|c| !c.passed) {
                return Err(Error::Constraint(format!("family member t = {t}: {}", bad.describe())));
            }
            let report = apriori_check(&domain.with_cavity(k, shape)?);
            let first = report.failures().next().map(|c| c.describe());
            if let Some(bad) = first {
                return Err(Error::Constraint(format!("family member t = {t}: {bad}")));
            }
        }
        Ok(())
    }
}
