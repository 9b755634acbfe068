//! Minimum local energy over interior disks of a given radius.

use rayon::prelude::*;

use crate::elasticity::{local_energy, DisplacementField};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point2, PolylineIndex};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub rho: f64,
    /// `min_x ∫_{B_ρ(x)}|∇̂a|² / (r0²‖N̂‖²)`.
    pub value: f64,
    pub argmin: Point2,
    pub centers: usize,
}

/// Grid points of spacing `spacing` in `{x ∈ Ω∖D̄ : dist(x, ∂(Ω∖D̄)) > offset}`.
pub fn offset_centers(domain: &DomainSpec, offset: f64, spacing: f64) -> Vec<Point2> {
    let walls = PolylineIndex::of_domain(domain, 4096);
    let pts = domain.outer.polyline(1024);
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = Point2::new(lo.x1.min(p.x1), lo.x2.min(p.x2));
        hi = Point2::new(hi.x1.max(p.x1), hi.x2.max(p.x2));
    }
    let nx = ((hi.x1 - lo.x1) / spacing).floor() as usize;
    let ny = ((hi.x2 - lo.x2) / spacing).floor() as usize;
    let mut out = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let x = Point2::new(lo.x1 + i as f64 * spacing, lo.x2 + j as f64 * spacing);
            if domain.contains(x) && walls.distance(x) > offset {
                out.push(x);
            }
        }
    }
    out
}

/// Profile at a fixed set of centers.
pub fn smallness_profile_at(
    a: &DisplacementField,
    domain: &DomainSpec,
    load_norm: f64,
    rho_values: &[f64],
    centers: &[Point2],
) -> Result<Vec<ProfilePoint>> {
    if centers.is_empty() {
        return Err(Error::Inverse("empty interior offset set".into()));
    }
    if !(load_norm > 0.0) {
        return Err(Error::Load("normalization needs a nonzero traction".into()));
    }
    let scale = (domain.r0 * load_norm).powi(2);
    rho_values
        .iter()
        .map(|&rho| {
            let energies = centers
                .par_iter()
                .map(|c| local_energy(a, *c, rho))
                .collect::<Result<Vec<f64>>>()?;
            let (k, e) = energies
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |m, (k, e)| if *e < m.1 { (k, *e) } else { m });
            Ok(ProfilePoint {
                rho,
                value: e / scale,
                argmin: centers[k],
                centers: centers.len(),
            })
        })
        .collect()
}

/// Profile over the centers of the offset set `(Ω∖D̄)_{sρ}` on a grid of
/// spacing `ρ/4`.
pub fn smallness_profile(
    a: &DisplacementField,
    domain: &DomainSpec,
    load_norm: f64,
    rho_values: &[f64],
    s: f64,
) -> Result<Vec<ProfilePoint>> {
    if !(s >= 1.0) {
        return Err(Error::InvalidArgument(format!("offset factor s must be at least 1, got {s}")));
    }
    let mut out = Vec::with_capacity(rho_values.len());
    for &rho in rho_values {
        let centers = offset_centers(domain, s * rho, rho / 4.0);
        if centers.is_empty() {
            return Err(Error::Inverse(format!("offset set for ρ = {rho}, s = {s} is empty")));
        }
        out.extend(smallness_profile_at(a, domain, load_norm, &[rho], &centers)?);
    }
    Ok(out)
}
