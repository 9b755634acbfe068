//! Boundary traces on Σ and their misfit modulo rigid motions.

use crate::elasticity::DisplacementField;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point2, RigidMotion};

/// Default number of Σ samples.
pub const SIGMA_SAMPLES: usize = 512;

/// Midpoint samples of Σ in arclength of the exact outer curve.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSampling {
    pub s: Vec<f64>,
    pub points: Vec<Point2>,
    /// Arclength weights summing to `|Σ|`.
    pub weights: Vec<f64>,
}

impl SigmaSampling {
    pub fn new(domain: &DomainSpec, n: usize) -> Result<Self> {
        let sigma = domain.sigma;
        if n == 0 || !(sigma.length > 0.0) {
            return Err(Error::Inverse("Σ sampling is empty".into()));
        }
        let total = domain.outer_length();
        let table = domain.outer_table();
        let h = sigma.length / n as f64;
        let s: Vec<f64> = (0..n).map(|k| (sigma.start + (k as f64 + 0.5) * h).rem_euclid(total)).collect();
        let points = s.iter().map(|v| table.point_at(*v)).collect();
        Ok(Self {
            s,
            points,
            weights: vec![h; n],
        })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Displacement trace at the Σ samples, located on the boundary chords of
/// the mesh it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub points: Vec<Point2>,
    pub values: Vec<[f64; 2]>,
}

/// Trace of `a` at the Σ samples, interpolated along the outer boundary
/// edges of its mesh.
pub fn sigma_trace(a: &DisplacementField, domain: &DomainSpec, sampling: &SigmaSampling) -> Result<Trace> {
    let space = a.space();
    let mesh = space.mesh();
    let total = domain.outer_length();
    let owners = mesh.boundary_edge_owners();
    // (start arclength, length, triangle, local edge)
    let mut edges: Vec<(f64, f64, usize, usize)> = mesh
        .boundary_edges
        .iter()
        .zip(&owners)
        .filter(|(e, _)| e.tag.is_outer())
        .map(|(e, &(t, l))| {
            let sa = domain.outer_arclength(mesh.nodes[e.nodes[0]]);
            let sb = domain.outer_arclength(mesh.nodes[e.nodes[1]]);
            (sa, (sb - sa).rem_euclid(total), t, l)
        })
        .collect();
    if edges.is_empty() {
        return Err(Error::Inverse("mesh has no outer boundary edges".into()));
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let vals = a.values();
    let pairs = sampling
        .s
        .iter()
        .map(|&s| {
            let k = match edges.partition_point(|e| e.0 <= s) {
                0 => edges.len() - 1,
                k => k - 1,
            };
            let (sa, len, t, l) = edges[k];
            let f = (s - sa).rem_euclid(total) / len;
            if !(f <= 1.0 + 1e-9) {
                return Err(Error::Inverse(format!("Σ sample at s = {s} is not covered by an outer edge")));
            }
            let f = f.min(1.0);
            let (dofs, _) = space.element_dofs(t);
            let (slots, w, n) = space.edge_trace(l, f);
            let tri = mesh.triangles[t];
            let (pa, pb) = (mesh.nodes[tri[l]], mesh.nodes[tri[(l + 1) % 3]]);
            let mut u = [0.0; 2];
            for j in 0..n {
                let d = dofs[slots[j]];
                u[0] += w[j] * vals[2 * d];
                u[1] += w[j] * vals[2 * d + 1];
            }
            Ok((pa + (pb - pa) * f, u))
        })
        .collect::<Result<Vec<_>>>()?;
    let (points, values) = pairs.into_iter().unzip();
    Ok(Trace { points, values })
}

/// `min_r ‖u − r‖_{L²(Σ)}` over rigid motions for values `u` at `points`
/// with quadrature weights `w`, with the minimizer.
pub fn rigid_quotient(u: &[[f64; 2]], points: &[Point2], w: &[f64]) -> Result<(f64, RigidMotion)> {
    if u.len() != points.len() || u.len() != w.len() || u.is_empty() {
        return Err(Error::Inverse(format!(
            "{} trace values for {} points and {} weights",
            u.len(),
            points.len(),
            w.len()
        )));
    }
    let wsum: f64 = w.iter().sum();
    let mut xc = Point2::ORIGIN;
    let mut mean = [0.0; 2];
    for ((x, v), wi) in points.iter().zip(u).zip(w) {
        xc += *x * (*wi / wsum);
        mean[0] += wi * v[0] / wsum;
        mean[1] += wi * v[1] / wsum;
    }
    // With centered coordinates the spin is orthogonal to translations.
    let (mut num, mut den) = (0.0, 0.0);
    for ((x, v), wi) in points.iter().zip(u).zip(w) {
        let y = *x - xc;
        num += wi * (-y.x2 * (v[0] - mean[0]) + y.x1 * (v[1] - mean[1]));
        den += wi * y.norm2();
    }
    let spin = if den > 0.0 { num / den } else { 0.0 };
    let r = RigidMotion::new([mean[0] + spin * xc.x2, mean[1] - spin * xc.x1], spin);
    let mut sq = 0.0;
    for ((x, v), wi) in points.iter().zip(u).zip(w) {
        let rv = r.eval(*x);
        sq += wi * ((v[0] - rv[0]).powi(2) + (v[1] - rv[1]).powi(2));
    }
    Ok((sq.max(0.0).sqrt(), r))
}

/// Cauchy-data gap between two traces: `min_r ‖u1 − u2 − r‖_{L²(Σ)} / r0`,
/// with rigid motions evaluated at the points of `u1`.
pub fn trace_gap(u1: &Trace, u2: &Trace, sampling: &SigmaSampling, r0: f64) -> Result<f64> {
    if u1.values.len() != u2.values.len() {
        return Err(Error::Inverse("traces have different lengths".into()));
    }
    let d: Vec<[f64; 2]> = u1.values.iter().zip(&u2.values).map(|(a, b)| [a[0] - b[0], a[1] - b[1]]).collect();
    Ok(rigid_quotient(&d, &u1.points, &sampling.weights)?.0 / r0)
}

/// Cauchy-data gap between two displacement fields on `n` Σ samples.
pub fn cauchy_gap(a1: &DisplacementField, a2: &DisplacementField, domain: &DomainSpec, n: usize) -> Result<f64> {
    let sampling = SigmaSampling::new(domain, n)?;
    let u1 = sigma_trace(a1, domain, &sampling)?;
    let u2 = sigma_trace(a2, domain, &sampling)?;
    trace_gap(&u1, &u2, &sampling, domain.r0)
}

/// `‖u‖_{L²(Σ)}`.
pub fn trace_norm(u: &[[f64; 2]], weights: &[f64]) -> f64 {
    u.iter()
        .zip(weights)
        .map(|(v, w)| w * (v[0] * v[0] + v[1] * v[1]))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StarShape;

    fn domain() -> DomainSpec {
        let outer = StarShape::circle(Point2::new(0.3, -0.2), 2.0).unwrap();
        let total = 2.0 * std::f64::consts::TAU;
        DomainSpec::new(outer, vec![], Some((0.5, 0.5 + total / 3.0)), 0.5, 0.5, 10.0, 1.0).unwrap()
    }

    #[test]
    fn rigid_traces_have_zero_gap() {
        let d = domain();
        let s = SigmaSampling::new(&d, 512).unwrap();
        let r = RigidMotion::new([0.7, -1.1], 0.37);
        let u: Vec<[f64; 2]> = s.points.iter().map(|x| r.eval(*x)).collect();
        let (g, fit) = rigid_quotient(&u, &s.points, &s.weights).unwrap();
        assert!(g < 1e-13);
        assert!((fit.w - 0.37).abs() < 1e-13 && (fit.c[0] - 0.7).abs() < 1e-13 && (fit.c[1] + 1.1).abs() < 1e-13);
    }

    #[test]
    fn orthogonal_perturbation_is_measured_exactly() {
        // On a full circle of radius R, p = (cos 2θ, 0) is L²-orthogonal to
        // translations and to the spin field, so the gap is ‖p‖/r0 = √(πR)/r0.
        let c = Point2::new(0.3, -0.2);
        let d = DomainSpec::new(StarShape::circle(c, 2.0).unwrap(), vec![], None, 0.5, 0.5, 10.0, 1.0).unwrap();
        let s = SigmaSampling::new(&d, 512).unwrap();
        let p: Vec<[f64; 2]> = s
            .points
            .iter()
            .map(|x| [(2.0 * (x.x2 - c.x2).atan2(x.x1 - c.x1)).cos(), 0.0])
            .collect();
        let zero = vec![[0.0; 2]; s.len()];
        let tr = |values| Trace {
            points: s.points.clone(),
            values,
        };
        let g = trace_gap(&tr(p), &tr(zero), &s, d.r0).unwrap();
        let expect = (std::f64::consts::PI * 2.0).sqrt() / d.r0;
        assert!((g - expect).abs() < 1e-10 * expect, "{g} vs {expect}");
    }

    #[test]
    fn empty_sigma_fails() {
        let d = domain();
        assert!(matches!(SigmaSampling::new(&d, 0), Err(Error::Inverse(_))));
    }
}
