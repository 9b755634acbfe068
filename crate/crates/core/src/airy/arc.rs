//! Gradient of the Airy function along a loaded boundary arc.

use crate::elasticity::{Profile, TractionSpec};
use crate::error::{Error, Result};
use crate::geometry::{ArcInterval, DomainSpec, Point2};
use crate::mesh::gauss_legendre;

/// `∇φ` along an arc, gauged to vanish at the first point.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcGradient {
    /// Arclength from the start of the arc.
    pub s: Vec<f64>,
    pub points: Vec<Point2>,
    pub grad: Vec<[f64; 2]>,
}

/// `∇φ(s) = (−∫N̂2, ∫N̂1)` along a counter-clockwise polyline, with the
/// traction given as a function of position and outward unit normal.
pub fn airy_gradient_along(points: &[Point2], traction: impl Fn(Point2, Point2) -> [f64; 2]) -> Result<ArcGradient> {
    if points.len() < 2 {
        return Err(Error::Airy("an arc needs at least two points".into()));
    }
    let (gx, gw) = gauss_legendre(6);
    let mut out = ArcGradient {
        s: vec![0.0],
        points: vec![points[0]],
        grad: vec![[0.0; 2]],
    };
    for w in points.windows(2) {
        let d = w[1] - w[0];
        let len = d.norm();
        if !(len > 0.0) {
            return Err(Error::Airy("arc has a zero-length segment".into()));
        }
        let t = d * (1.0 / len);
        let n = Point2::new(t.x2, -t.x1);
        let mut acc = [0.0; 2];
        for (x, wt) in gx.iter().zip(&gw) {
            let v = traction(w[0] + d * *x, n);
            acc[0] += wt * len * v[0];
            acc[1] += wt * len * v[1];
        }
        let g = *out.grad.last().unwrap();
        out.grad.push([g[0] - acc[1], g[1] + acc[0]]);
        out.s.push(out.s.last().unwrap() + len);
        out.points.push(w[1]);
    }
    Ok(out)
}

/// `∇φ` along a chain of outer-boundary arcs for a prescribed traction,
/// sampled at `n` points of the exact curve per arc. Concentrated forces
/// add jumps.
pub fn airy_gradient_on_arc(domain: &DomainSpec, t: &TractionSpec, arcs: &[ArcInterval], n: usize) -> Result<ArcGradient> {
    if arcs.is_empty() {
        return Err(Error::Airy("empty arc".into()));
    }
    let total = domain.outer_length();
    let tol = 1e-9 * total;
    for w in arcs.windows(2) {
        let gap = (w[1].start - w[0].end()).rem_euclid(total);
        if gap > tol && total - gap > tol {
            return Err(Error::Airy(format!(
                "arc pieces are disconnected: gap of length {gap:.3e} at s = {:.6}",
                w[0].end().rem_euclid(total)
            )));
        }
    }
    if arcs.iter().any(|a| !(a.length > 0.0)) {
        return Err(Error::Airy("arc piece has zero length".into()));
    }
    let table = domain.outer_table();
    let (gx, gw) = gauss_legendre(6);
    let n = n.max(2);
    let mut out = ArcGradient {
        s: vec![0.0],
        points: vec![table.point_at(arcs[0].start.rem_euclid(total))],
        grad: vec![[0.0; 2]],
    };
    let frame = |s: f64| {
        let th = table.angle(s.rem_euclid(total));
        (domain.outer.eval(th), domain.outer.outward_normal(th))
    };
    let mut offset = 0.0;
    for arc in arcs {
        let h = arc.length / n as f64;
        for k in 0..n {
            let a = arc.start + k as f64 * h;
            let mut acc = [0.0; 2];
            for (x, wt) in gx.iter().zip(&gw) {
                let s = a + x * h;
                let (p, nn) = frame(s);
                let v = t.density(domain, p, s.rem_euclid(total), nn);
                acc[0] += wt * h * v[0];
                acc[1] += wt * h * v[1];
            }
            for seg in &t.segments {
                if let Profile::Point(f) = seg.profile {
                    let off = (seg.interval.start - a).rem_euclid(total);
                    let last = k + 1 == n;
                    if off < h || (last && off <= h + tol) {
                        acc[0] += f[0];
                        acc[1] += f[1];
                    }
                }
            }
            let g = *out.grad.last().unwrap();
            out.grad.push([g[0] - acc[1], g[1] + acc[0]]);
            out.s.push(offset + (k + 1) as f64 * h);
            out.points.push(frame(a + h).0);
        }
        offset += arc.length;
    }
    Ok(out)
}
