use std::sync::OnceLock;

use super::{ArclengthTable, Point2, StarShape};
use crate::error::{Error, Result};

/// Arclength interval `[start, start + length]` on a closed curve of length
/// `total`, taken modulo `total`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcInterval {
    pub start: f64,
    pub length: f64,
    pub total: f64,
}

impl ArcInterval {
    pub fn new(start: f64, end: f64, total: f64) -> Result<Self> {
        if !(total > 0.0) || !start.is_finite() || !end.is_finite() || end <= start {
            return Err(Error::InvalidArgument(format!(
                "arclength interval [{start}, {end}] on a curve of length {total}"
            )));
        }
        let length = (end - start).min(total);
        Ok(Self {
            start: start.rem_euclid(total),
            length,
            total,
        })
    }

    pub fn full(total: f64) -> Self {
        Self {
            start: 0.0,
            length: total,
            total,
        }
    }

    pub fn is_full(&self) -> bool {
        self.length >= self.total * (1.0 - 1e-12)
    }

    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    /// Offset of `s` from the interval start, in `[0, total)`.
    pub fn offset(&self, s: f64) -> f64 {
        (s - self.start).rem_euclid(self.total)
    }

    pub fn contains(&self, s: f64) -> bool {
        self.is_full() || self.offset(s) <= self.length
    }

    /// Whether `[a, a + len]` lies in the interior of this interval; every
    /// arc is compactly contained in the whole (closed) curve.
    pub fn contains_compactly(&self, a: f64, len: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let off = self.offset(a);
        off > 0.0 && off + len < self.length
    }

    pub fn midpoint(&self) -> f64 {
        (self.start + 0.5 * self.length).rem_euclid(self.total)
    }
}

/// Outer domain, cavities, measurement arc and the a-priori constants
/// `r0`, `M0`, `M1`, `α`.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub outer: StarShape,
    pub cavities: Vec<StarShape>,
    /// Σ as an arclength interval on the outer boundary.
    pub sigma: ArcInterval,
    /// Anchor point `P0 ∈ Σ`.
    pub p0: Point2,
    pub r0: f64,
    pub m0: f64,
    pub m1: f64,
    pub alpha: f64,
    table: OnceLock<ArclengthTable>,
}

impl DomainSpec {
    /// Builds a domain; `sigma` is `(start, end)` in arclength of the outer
    /// curve, `None` meaning the whole outer boundary. `P0` defaults to the
    /// midpoint of Σ.
    pub fn new(
        outer: StarShape,
        cavities: Vec<StarShape>,
        sigma: Option<(f64, f64)>,
        r0: f64,
        m0: f64,
        m1: f64,
        alpha: f64,
    ) -> Result<Self> {
        for (name, v) in [("r0", r0), ("M0", m0), ("M1", m1)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        let table = ArclengthTable::new(&outer);
        let total = table.length();
        let sigma = match sigma {
            Some((a, b)) => ArcInterval::new(a, b, total)?,
            None => ArcInterval::full(total),
        };
        let p0 = table.point_at(sigma.midpoint());
        let lock = OnceLock::new();
        let _ = lock.set(table);
        Ok(Self {
            outer,
            cavities,
            sigma,
            p0,
            r0,
            m0,
            m1,
            alpha,
            table: lock,
        })
    }

    pub fn with_p0(mut self, p0: Point2) -> Self {
        self.p0 = p0;
        self
    }

    /// Copy of the domain with cavity `k` replaced.
    pub fn with_cavity(&self, k: usize, shape: StarShape) -> Result<Self> {
        if k >= self.cavities.len() {
            return Err(Error::InvalidArgument(format!(
                "cavity index {k} out of range ({} cavities)",
                self.cavities.len()
            )));
        }
        let mut d = self.clone();
        d.cavities[k] = shape;
        Ok(d)
    }

    /// Arclength table of the outer boundary.
    pub fn outer_table(&self) -> &ArclengthTable {
        self.table.get_or_init(|| ArclengthTable::new(&self.outer))
    }

    pub fn outer_length(&self) -> f64 {
        self.outer_table().length()
    }

    /// Arclength coordinate (on the exact outer curve) of the boundary point
    /// in the direction of `p` from the outer center.
    pub fn outer_arclength(&self, p: Point2) -> f64 {
        self.outer_table().arclength(self.outer.polar_angle(p))
    }

    /// Whether `p` lies in `Ω∖D̄` (strict on every curve).
    pub fn contains(&self, p: Point2) -> bool {
        self.outer.contains(p) && self.cavities.iter().all(|c| c.radial_gap(p) > 0.0)
    }

    pub fn area(&self) -> f64 {
        self.outer.area() - self.cavities.iter().map(StarShape::area).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_wraps_around() {
        let i = ArcInterval::new(5.0, 7.0, 6.0).unwrap();
        assert!(i.contains(5.5));
        assert!(i.contains(0.5));
        assert!(!i.contains(2.0));
        assert!(i.contains_compactly(5.5, 1.0));
        assert!(!i.contains_compactly(4.5, 1.0));
        assert!(!i.contains_compactly(5.5, 2.0));
    }

    #[test]
    fn full_interval_contains_everything() {
        let i = ArcInterval::full(3.0);
        assert!(i.is_full());
        assert!(i.contains(2.9));
        assert!(i.contains_compactly(1.0, 2.5));
    }

    #[test]
    fn domain_membership() {
        let outer = StarShape::circle(Point2::ORIGIN, 1.0).unwrap();
        let cav = StarShape::circle(Point2::ORIGIN, 0.4).unwrap();
        let d = DomainSpec::new(outer, vec![cav], None, 0.2, 0.5, 20.0, 1.0).unwrap();
        assert!(d.contains(Point2::new(0.7, 0.0)));
        assert!(!d.contains(Point2::new(0.1, 0.0)));
        assert!(!d.contains(Point2::new(1.1, 0.0)));
        assert!((d.area() - std::f64::consts::PI * 0.84).abs() < 1e-12);
    }
}
