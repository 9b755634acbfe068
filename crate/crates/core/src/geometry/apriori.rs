//! Verification of the a-priori geometric class of a [`DomainSpec`].

use std::fmt;

use super::distance::PolylineIndex;
use super::regularity::graph_regularity;
use super::{DomainSpec, StarShape};

const CURVE_SAMPLES: usize = 2048;
const CAVITY_ORDER: usize = 6;
const OUTER_ORDER: usize = 1;
const SIGMA_ORDER: usize = 2;
/// Largest local-graph scale for a cavity, as a fraction of its mean radius.
pub const CAVITY_SCALE: f64 = 0.1;

/// One verified constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    /// Measured quantity.
    pub value: f64,
    /// Bound the quantity was compared with.
    pub bound: f64,
}

impl CheckItem {
    fn new(name: impl Into<String>, passed: bool, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed,
            value,
            bound,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{} {} (value {:.6e}, bound {:.6e})",
            self.name,
            if self.passed { "passed" } else { "FAILED" },
            self.value,
            self.bound
        )
    }
}

/// Pass/fail report over every constraint of the class.
#[derive(Clone, Debug, Default)]
pub struct AprioriReport {
    pub items: Vec<CheckItem>,
}

impl AprioriReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|c| !c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&CheckItem> {
        self.items.iter().find(|c| c.name.starts_with(name))
    }
}

impl fmt::Display for AprioriReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.items {
            writeln!(f, "{}", c.describe())?;
        }
        Ok(())
    }
}

/// Local-graph scale used for the regularity of a cavity boundary.
pub fn cavity_scale(omega: &DomainSpec, shape: &StarShape) -> f64 {
    omega.r0.min(CAVITY_SCALE * shape.rho0())
}

/// Constraints involving a single cavity: containment, distance to `∂Ω`
/// and boundary regularity.
pub fn cavity_checks(omega: &DomainSpec, shape: &StarShape) -> Vec<CheckItem> {
    let pts = shape.polyline(CURVE_SAMPLES);
    let inside = pts.iter().all(|p| omega.outer.contains(*p));
    let outer_index = PolylineIndex::of_shape(&omega.outer, 4 * CURVE_SAMPLES);
    let gap = if inside {
        pts.iter().map(|p| outer_index.distance(*p)).fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    let bound = 2.0 * omega.m0 * omega.r0;
    let scale = cavity_scale(omega, shape);
    let reg = graph_regularity(shape, CAVITY_ORDER, omega.alpha, scale, omega.m0, None);
    vec![
        CheckItem::new("cavity inside outer domain", inside, gap, 0.0),
        CheckItem::new("dist(D, outer boundary) >= 2 M0 r0", inside && gap >= bound, gap, bound),
        CheckItem::new(
            "cavity boundary C^{6,alpha} norm <= M0 r0",
            reg.passed(),
            reg.max_ratio * omega.m0 * scale,
            omega.m0 * scale,
        ),
    ]
}

/// Checks every constraint of the a-priori class; failures are reported, not
/// raised.
pub fn apriori_check(domain: &DomainSpec) -> AprioriReport {
    let mut items = Vec::new();
    let (r0, m0) = (domain.r0, domain.m0);
    items.push(CheckItem::new("M0 >= 1/2", m0 >= 0.5, m0, 0.5));

    let outer_pts = domain.outer.polyline(512);
    let diam = outer_pts
        .iter()
        .flat_map(|a| outer_pts.iter().map(move |b| a.dist(*b)))
        .fold(0.0, f64::max);
    items.push(CheckItem::new("diam(Omega) <= M1 r0", diam <= domain.m1 * r0, diam, domain.m1 * r0));

    let outer_reg = graph_regularity(&domain.outer, OUTER_ORDER, domain.alpha, r0, m0, None);
    items.push(CheckItem::new(
        "outer boundary C^{1,alpha} norm <= M0 r0",
        outer_reg.passed(),
        outer_reg.max_ratio * m0 * r0,
        m0 * r0,
    ));

    for (k, cavity) in domain.cavities.iter().enumerate() {
        for mut c in cavity_checks(domain, cavity) {
            c.name = format!("[cavity {k}] {}", c.name);
            items.push(c);
        }
    }

    let indices: Vec<PolylineIndex> = domain
        .cavities
        .iter()
        .map(|c| PolylineIndex::of_shape(c, 4 * CURVE_SAMPLES))
        .collect();
    for i in 0..domain.cavities.len() {
        for j in i + 1..domain.cavities.len() {
            let pts = domain.cavities[i].polyline(CURVE_SAMPLES);
            let overlap = pts.iter().any(|p| domain.cavities[j].contains(*p))
                || domain.cavities[j]
                    .polyline(CURVE_SAMPLES)
                    .iter()
                    .any(|p| domain.cavities[i].contains(*p));
            let gap = if overlap {
                0.0
            } else {
                pts.iter().map(|p| indices[j].distance(*p)).fold(f64::INFINITY, f64::min)
            };
            items.push(CheckItem::new(
                format!("[cavities {i},{j}] distance >= r0"),
                gap >= r0,
                gap,
                r0,
            ));
        }
    }

    // Σ regularity and the containment of ∂Ω ∩ R(P0) in Σ.
    let table = domain.outer_table();
    let total = table.length();
    let sigma = domain.sigma;
    let n_sigma = 64;
    let sigma_thetas: Vec<f64> = (0..n_sigma)
        .map(|i| table.angle(sigma.start + sigma.length * (i as f64 + 0.5) / n_sigma as f64))
        .collect();
    let sig_reg = graph_regularity(&domain.outer, SIGMA_ORDER, domain.alpha, r0, m0, Some(&sigma_thetas));
    items.push(CheckItem::new(
        "Sigma C^{2,alpha} norm <= M0 r0",
        sig_reg.passed(),
        sig_reg.max_ratio * m0 * r0,
        m0 * r0,
    ));

    let theta0 = domain.outer.polar_angle(domain.p0);
    let tau0 = domain.outer.velocity(theta0).normalized();
    let n0 = tau0.perp();
    let mut outside = 0.0f64;
    for i in 0..CURVE_SAMPLES {
        let s = total * i as f64 / CURVE_SAMPLES as f64;
        let p = table.point_at(s) - domain.p0;
        if p.dot(tau0).abs() < r0 && p.dot(n0).abs() < 2.0 * m0 * r0 && !sigma.contains(s) {
            outside = outside.max(p.norm());
        }
    }
    items.push(CheckItem::new(
        "outer boundary within R(P0) lies in Sigma",
        sigma.is_full() || outside == 0.0,
        outside,
        0.0,
    ));

    AprioriReport { items }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn disk(c: (f64, f64), r: f64) -> StarShape {
        StarShape::circle(Point2::new(c.0, c.1), r).unwrap()
    }

    fn domain(cavities: Vec<StarShape>) -> DomainSpec {
        let (r0, m1) = (0.1, 40.0);
        DomainSpec::new(disk((0.0, 0.0), m1 * r0 / 2.0), cavities, Some((0.0, 3.0)), r0, 0.5, m1, 1.0)
            .unwrap()
    }

    #[test]
    fn small_central_circle_passes() {
        let rep = apriori_check(&domain(vec![disk((0.0, 0.0), 0.03)]));
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn cavity_near_boundary_fails_distance() {
        let rep = apriori_check(&domain(vec![disk((1.9, 0.0), 0.05)]));
        assert!(!rep.find("[cavity 0] dist").unwrap().passed);
    }

    #[test]
    fn wiggly_cavity_fails_regularity() {
        let mut modes = vec![(0.0, 0.0); 6];
        modes[5] = (0.1, 0.0);
        let wiggly = StarShape::new(Point2::ORIGIN, 0.5, modes).unwrap();
        let rep = apriori_check(&domain(vec![wiggly]));
        assert!(!rep.find("[cavity 0] cavity boundary").unwrap().passed, "{rep}");
        assert!(rep.find("[cavity 0] dist").unwrap().passed);
    }

    #[test]
    fn close_cavities_fail_pairwise_distance() {
        let rep = apriori_check(&domain(vec![disk((-0.3, 0.0), 0.2), disk((0.15, 0.0), 0.2)]));
        assert!(!rep.find("[cavities 0,1]").unwrap().passed);
    }

    #[test]
    fn small_sigma_violates_containment() {
        let d = DomainSpec::new(disk((0.0, 0.0), 2.0), vec![], Some((0.0, 0.05)), 0.1, 0.5, 40.0, 1.0).unwrap();
        assert!(!apriori_check(&d).find("outer boundary within").unwrap().passed);
    }
}
