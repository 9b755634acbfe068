//! Stability sweeps along a cavity family.

use std::f64::consts::E;
use std::sync::Arc;

use log::warn;
use rayon::prelude::*;

use super::family::CavityFamily;
use super::gap::{sigma_trace, trace_gap, SigmaSampling, SIGMA_SAMPLES};
use super::stats::{linear_fit, spearman, RateFit};
use crate::elasticity::{boundary_sobolev_norm, solve_forward, SobolevOrder, SolverOptions, TractionSpec};
use crate::error::{Error, Result};
use crate::geometry::{auxiliary_distances, DomainSpec, PolylineIndex, StarShape, DEFAULT_SAMPLES};
use crate::material::PlateMaterial;
use crate::mesh::{generate_mesh_with, morph_cavity, Mesh, MeshOptions, MorphOptions};

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub mesh: MeshOptions,
    pub solver: SolverOptions,
    /// Index of the cavity the family replaces.
    pub cavity: usize,
    pub sigma_samples: usize,
    pub distance_samples: usize,
    /// Morphing layer width; `None` uses half the gap to the outer boundary.
    pub morph_width: Option<f64>,
    /// Threshold `d0 = d0_factor·r0` of the small-distance regime.
    pub d0_factor: f64,
}

impl SweepOptions {
    pub fn new(h: f64) -> Self {
        Self {
            mesh: MeshOptions::new(h),
            solver: SolverOptions::default(),
            cavity: 0,
            sigma_samples: SIGMA_SAMPLES,
            distance_samples: DEFAULT_SAMPLES,
            morph_width: None,
            d0_factor: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub epsilon: f64,
    pub d_h: f64,
    pub d: f64,
    pub d_m: f64,
    /// `‖N̂‖_{H^{-1/2}}`.
    pub nhat_norm: f64,
}

impl SweepRow {
    /// `d_H ≤ √(1+M0²)·d + slack`.
    pub fn satisfies_geometric_law(&self, m0: f64, slack: f64) -> bool {
        self.d_h <= (1.0 + m0 * m0).sqrt() * self.d + slack
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepFailure {
    pub t: f64,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
    pub nhat_norm: f64,
    /// Fit of `log d_H` against `log|log(ε/‖N̂‖)|`; `exponent` is `η`.
    pub eta: Option<RateFit>,
    /// The same fit restricted to rows with `d ≤ d0`.
    pub small_d: Option<RateFit>,
    /// Rank correlation of `ε` and `d_H` over all rows.
    pub spearman: Option<f64>,
    /// Largest `d/d_m` over rows with `0 < d ≤ d0`.
    pub d_over_dm: Option<f64>,
}

/// Rows entering the `η` fit: `t ≠ 0`, positive distances and
/// `0 < ε/‖N̂‖ < e⁻¹`.
pub fn fit_rows(rows: &[SweepRow]) -> Vec<SweepRow> {
    rows.iter()
        .filter(|r| {
            let q = r.epsilon / r.nhat_norm;
            r.t != 0.0 && r.d_h > 0.0 && q > 0.0 && q < 1.0 / E
        })
        .copied()
        .collect()
}

/// `−slope` of `log d_H` against `log|log(ε/‖N̂‖)|`.
pub fn fit_eta(rows: &[SweepRow]) -> Result<RateFit> {
    let rows = fit_rows(rows);
    if rows.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} rows with 0 < ε/‖N̂‖ < 1/e; at least 3 are needed",
            rows.len()
        )));
    }
    let x: Vec<f64> = rows.iter().map(|r| (r.epsilon / r.nhat_norm).ln().abs().ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.d_h.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&x, &y)?;
    let ts = rows.iter().map(|r| r.t.abs());
    Ok(RateFit {
        exponent: -slope,
        intercept,
        r_squared: r2,
        window: (ts.clone().fold(f64::INFINITY, f64::min), ts.fold(0.0, f64::max)),
        points: rows.len(),
    })
}

fn morph_width(domain: &DomainSpec, base: &StarShape) -> f64 {
    let pts = base.polyline(512);
    let gap_to = |idx: PolylineIndex| pts.iter().map(|p| idx.distance(*p)).fold(f64::INFINITY, f64::min);
    let mut gap = gap_to(PolylineIndex::of_shape(&domain.outer, 2048));
    for c in domain.cavities.iter().filter(|c| *c != base) {
        gap = gap.min(gap_to(PolylineIndex::of_shape(c, 1024)));
    }
    0.5 * gap
}

/// Mesh of `domain` with cavity `k` replaced by `shape`, morphed from a
/// reference mesh when possible so that the outer boundary discretization
/// is shared.
pub fn family_mesh(
    reference: &Mesh,
    base: &StarShape,
    shape: &StarShape,
    domain: &DomainSpec,
    width: f64,
    mesh: &MeshOptions,
) -> Result<Mesh> {
    if shape == base {
        return Ok(reference.clone());
    }
    match morph_cavity(reference, base, shape, MorphOptions { width }) {
        Ok(m) => Ok(m),
        Err(e) => {
            warn!("{e}; remeshing instead");
            generate_mesh_with(domain, mesh)
        }
    }
}

/// Evaluates rows in parallel, keeping their order; a failed row is
/// recorded and skipped.
fn run_rows(ts: &[f64], row: impl Fn(f64) -> Result<SweepRow> + Sync) -> (Vec<SweepRow>, Vec<SweepFailure>) {
    let results: Vec<(f64, Result<SweepRow>)> = ts.par_iter().map(|&tv| (tv, row(tv))).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (tv, r) in results {
        match r {
            Ok(r) => rows.push(r),
            Err(e) => {
                warn!("sweep row t = {tv} failed: {e}");
                failures.push(SweepFailure {
                    t: tv,
                    message: e.to_string(),
                });
            }
        }
    }
    (rows, failures)
}

/// Forward solves along the family against the base cavity and the
/// resulting stability table.
pub fn stability_sweep(
    family: &CavityFamily,
    domain: &DomainSpec,
    material: &PlateMaterial,
    t: &TractionSpec,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    let k = opts.cavity;
    let base_domain = domain.with_cavity(k, family.base.clone())?;
    family.validate(&base_domain, k)?;
    let nhat_norm = boundary_sobolev_norm(t, domain, SobolevOrder::MinusHalf);
    if !(nhat_norm > 0.0) {
        return Err(Error::Load("a stability sweep needs a nonzero traction".into()));
    }
    let sampling = SigmaSampling::new(domain, opts.sigma_samples)?;
    let reference = generate_mesh_with(&base_domain, &opts.mesh)?;
    let width = opts.morph_width.unwrap_or_else(|| morph_width(&base_domain, &family.base));
    let sol0 = solve_forward(Arc::new(reference.clone()), &base_domain, material, t, &opts.solver)?;
    let u0 = sigma_trace(&sol0.displacement, &base_domain, &sampling)?;

    let row = |tv: f64| -> Result<SweepRow> {
        let shape = family.shape(tv)?;
        let dom = base_domain.with_cavity(k, shape.clone())?;
        let mesh = family_mesh(&reference, &family.base, &shape, &dom, width, &opts.mesh)?;
        let sol = solve_forward(Arc::new(mesh), &dom, material, t, &opts.solver)?;
        let u = sigma_trace(&sol.displacement, &dom, &sampling)?;
        let epsilon = trace_gap(&u0, &u, &sampling, domain.r0)?;
        let dist = auxiliary_distances(&family.base, &shape, &base_domain, opts.distance_samples)?;
        Ok(SweepRow {
            t: tv,
            epsilon,
            d_h: dist.d_h,
            d: dist.d,
            d_m: dist.d_m,
            nhat_norm,
        })
    };
    let (rows, failures) = run_rows(&family.t_values, row);
    let eta = fit_eta(&rows).map_err(|e| warn!("η fit: {e}")).ok();
    let d0 = opts.d0_factor * domain.r0;
    let small: Vec<SweepRow> = rows.iter().filter(|r| r.d <= d0).copied().collect();
    let small_d = fit_eta(&small).ok();
    let (eps, dh): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.epsilon, r.d_h)).unzip();
    let spearman = spearman(&eps, &dh).ok();
    let d_over_dm = small
        .iter()
        .filter(|r| r.d > 0.0 && r.d_m > 0.0)
        .map(|r| r.d / r.d_m)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    Ok(SweepResult {
        rows,
        failures,
        nhat_norm,
        eta,
        small_d,
        spearman,
        d_over_dm,
    })
}
