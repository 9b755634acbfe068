//! Growth of the local energy `∫_{B_r}|∇̂a|²` with the radius.

use super::stats::{linear_fit, RateFit};
use crate::elasticity::{local_energy, DisplacementField};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point2, PolylineIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VanishingMode {
    /// Disks compactly inside `Ω∖D̄`.
    Interior,
    /// Disks centered on a cavity boundary, intersected with `Ω∖D̄`.
    Boundary,
}

/// Energies at the given radii and the slope of `log E` against `log r`.
#[derive(Clone, Debug, PartialEq)]
pub struct VanishingRate {
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
    pub fit: RateFit,
}

pub fn vanishing_rate(
    a: &DisplacementField,
    domain: &DomainSpec,
    center: Point2,
    radii: &[f64],
    mode: VanishingMode,
) -> Result<VanishingRate> {
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let (rmin, rmax) = match (radii.first(), radii.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => (lo, hi),
        _ => return Err(Error::InvalidArgument("radii must be positive and nonempty".into())),
    };
    if rmax < 8.0 * rmin {
        return Err(Error::InvalidArgument(format!(
            "radii span {rmin}..{rmax}, fewer than three dyadic levels"
        )));
    }
    let h = a.space().mesh().h_max;
    if rmin < 4.0 * h {
        return Err(Error::DegenerateFit(format!(
            "smallest radius {rmin} is below the mesh resolution 4·h_max = {}",
            4.0 * h
        )));
    }
    let outer = PolylineIndex::of_shape(&domain.outer, 4096);
    if outer.distance(center) <= rmax || !domain.outer.contains(center) {
        return Err(Error::InvalidArgument(format!("disk of radius {rmax} leaves the outer domain")));
    }
    let tol = 1e-9 * domain.r0.max(1.0);
    match mode {
        VanishingMode::Interior => {
            if !domain.contains(center) {
                return Err(Error::InvalidArgument("center lies outside the body".into()));
            }
            for (k, c) in domain.cavities.iter().enumerate() {
                if PolylineIndex::of_shape(c, 4096).distance(center) <= rmax {
                    return Err(Error::InvalidArgument(format!("disk of radius {rmax} meets cavity {k}")));
                }
            }
        }
        VanishingMode::Boundary => {
            let on: Vec<usize> = (0..domain.cavities.len())
                .filter(|&k| domain.cavities[k].radial_gap(center).abs() <= tol)
                .collect();
            let Some(&k) = on.first() else {
                return Err(Error::InvalidArgument("boundary mode needs a center on a cavity boundary".into()));
            };
            for (j, c) in domain.cavities.iter().enumerate() {
                if j != k && PolylineIndex::of_shape(c, 4096).distance(center) <= rmax {
                    return Err(Error::InvalidArgument(format!("disk of radius {rmax} meets cavity {j}")));
                }
            }
        }
    }
    let energies = radii
        .iter()
        .map(|r| local_energy(a, center, *r))
        .collect::<Result<Vec<f64>>>()?;
    if let Some((r, e)) = radii.iter().zip(&energies).find(|(_, e)| **e <= 10.0 * f64::EPSILON) {
        return Err(Error::DegenerateFit(format!("local energy {e:e} vanishes at radius {r}")));
    }
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = energies.iter().map(|e| e.ln()).collect();
    let (slope, intercept, r_squared) = linear_fit(&x, &y)?;
    Ok(VanishingRate {
        fit: RateFit {
            exponent: slope,
            intercept,
            r_squared,
            window: (rmin, rmax),
            points: radii.len(),
        },
        radii,
        energies,
    })
}

/// `n` radii `r_max·2^{-k}`, `k = n−1, …, 0`.
pub fn dyadic_radii(r_max: f64, n: usize) -> Vec<f64> {
    (0..n).rev().map(|k| r_max * 0.5f64.powi(k as i32)).collect()
}
