//! Cavity reconstruction from Σ displacement data by damped Gauss–Newton.

use std::sync::Arc;

use log::{debug, info, warn};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::gap::{rigid_quotient, sigma_trace, trace_norm, SigmaSampling, Trace, SIGMA_SAMPLES};
use crate::elasticity::{solve_forward, SaddleSolution, SolverOptions, TractionSpec};
use crate::error::{Error, Result};
use crate::geometry::{cavity_checks, DomainSpec, Point2, StarShape};
use crate::material::PlateMaterial;
use crate::mesh::{generate_mesh_with, morph_cavity, Mesh, MeshOptions, MorphOptions};

/// Σ displacement samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedData {
    pub sampling: SigmaSampling,
    pub trace: Trace,
}

impl ObservedData {
    pub fn from_solution(sol: &SaddleSolution, domain: &DomainSpec, n: usize) -> Result<Self> {
        let sampling = SigmaSampling::new(domain, n)?;
        let trace = sigma_trace(&sol.displacement, domain, &sampling)?;
        Ok(Self { sampling, trace })
    }

    /// Adds Gaussian noise of standard deviation `level` times the RMS of
    /// the data; returns the noisy data and the noise norm modulo rigid
    /// motions, divided by `r0`.
    pub fn with_noise(&self, level: f64, seed: u64, r0: f64) -> Result<(Self, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len: f64 = self.sampling.weights.iter().sum();
        let rms = trace_norm(&self.trace.values, &self.sampling.weights) / len.sqrt();
        let noise: Vec<[f64; 2]> = (0..self.trace.values.len())
            .map(|_| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                [level * rms * a, level * rms * b]
            })
            .collect();
        let values = self
            .trace
            .values
            .iter()
            .zip(&noise)
            .map(|(v, n)| [v[0] + n[0], v[1] + n[1]])
            .collect();
        let delta = rigid_quotient(&noise, &self.trace.points, &self.sampling.weights)?.0 / r0;
        Ok((
            Self {
                sampling: self.sampling.clone(),
                trace: Trace {
                    points: self.trace.points.clone(),
                    values,
                },
            },
            delta,
        ))
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructOptions {
    pub mesh: MeshOptions,
    pub solver: SolverOptions,
    pub cavity: usize,
    /// Fourier orders fitted besides `ρ0`.
    pub modes: usize,
    /// Also fit the center.
    pub fit_center: bool,
    pub reg_weight: f64,
    /// Finite-difference step in units of `r0`.
    pub fd_step: f64,
    /// Stopping step length in units of `r0`.
    pub step_tol: f64,
    pub max_iter: usize,
    pub morph_width: Option<f64>,
}

impl ReconstructOptions {
    pub fn new(h: f64) -> Self {
        Self {
            mesh: MeshOptions::new(h),
            solver: SolverOptions::default(),
            cavity: 0,
            modes: 2,
            fit_center: false,
            reg_weight: 0.0,
            fd_step: 1e-4,
            step_tol: 1e-5,
            max_iter: 50,
            morph_width: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub recovered: StarShape,
    /// Objective after the initial evaluation and after each accepted step.
    pub misfit_history: Vec<f64>,
    pub reg_weight: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `cauchy_gap(a(recovered), observed)`.
    pub data_misfit: f64,
}

struct Problem<'a> {
    domain: &'a DomainSpec,
    material: &'a PlateMaterial,
    t: &'a TractionSpec,
    observed: &'a ObservedData,
    opts: &'a ReconstructOptions,
    center: Point2,
    base_shape: StarShape,
    base_mesh: Mesh,
    width: f64,
}

impl Problem<'_> {
    fn shape(&self, q: &[f64]) -> Result<StarShape> {
        let (center, params) = if self.opts.fit_center {
            (Point2::new(q[0], q[1]), &q[2..])
        } else {
            (self.center, q)
        };
        StarShape::from_params(center, params)
    }

    fn params(&self, s: &StarShape) -> Result<Vec<f64>> {
        let s = s.with_modes(self.opts.modes)?;
        let mut q = Vec::new();
        if self.opts.fit_center {
            q.extend([s.center().x1, s.center().x2]);
        }
        q.extend(s.params());
        Ok(q)
    }

    fn mesh(&self, shape: &StarShape, domain: &DomainSpec) -> Result<Mesh> {
        if *shape == self.base_shape {
            return Ok(self.base_mesh.clone());
        }
        morph_cavity(&self.base_mesh, &self.base_shape, shape, MorphOptions { width: self.width })
            .or_else(|_| generate_mesh_with(domain, &self.opts.mesh))
    }

    /// Data residual `√w (u − u_obs − r)/r0` followed by `√λ·(a, b)`; the
    /// data part squared sums to the gap squared.
    fn residual(&self, q: &[f64]) -> Result<(DVector<f64>, f64)> {
        let shape = self.shape(q)?;
        if let Some(bad) = cavity_checks(self.domain, &shape).into_iter().find(|c| !c.passed) {
            return Err(Error::Constraint(bad.describe()));
        }
        let domain = self.domain.with_cavity(self.opts.cavity, shape.clone())?;
        let mesh = self.mesh(&shape, &domain)?;
        let sol = solve_forward(Arc::new(mesh), &domain, self.material, self.t, &self.opts.solver)?;
        let s = &self.observed.sampling;
        let u = sigma_trace(&sol.displacement, &domain, s)?;
        let d: Vec<[f64; 2]> = u
            .values
            .iter()
            .zip(&self.observed.trace.values)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1]])
            .collect();
        let (gap, r) = rigid_quotient(&d, &u.points, &s.weights)?;
        let nf = 2 * shape.num_modes();
        let mut out = DVector::zeros(2 * d.len() + nf);
        for (k, ((v, x), w)) in d.iter().zip(&u.points).zip(&s.weights).enumerate() {
            let rv = r.eval(*x);
            let sw = w.sqrt() / self.domain.r0;
            out[2 * k] = sw * (v[0] - rv[0]);
            out[2 * k + 1] = sw * (v[1] - rv[1]);
        }
        let sl = self.opts.reg_weight.sqrt();
        for (j, c) in shape.params()[1..].iter().enumerate() {
            out[2 * d.len() + j] = sl * c;
        }
        Ok((out, gap / self.domain.r0))
    }
}

/// Minimizes `cauchy_gap(a(D), observed)² + λ‖(a_k, b_k)‖²` over the
/// shape parameters, starting from `init`.
pub fn reconstruct(
    domain: &DomainSpec,
    material: &PlateMaterial,
    t: &TractionSpec,
    observed: &ObservedData,
    init: &StarShape,
    opts: &ReconstructOptions,
) -> Result<ReconstructionResult> {
    if let Some(bad) = cavity_checks(domain, init).into_iter().find(|c| !c.passed) {
        return Err(Error::Constraint(format!("initial cavity: {}", bad.describe())));
    }
    let init = init.with_modes(opts.modes)?;
    let dom0 = domain.with_cavity(opts.cavity, init.clone())?;
    let base_mesh = generate_mesh_with(&dom0, &opts.mesh)?;
    let width = opts.morph_width.unwrap_or(0.5 * (domain.m0 * domain.r0).max(0.25 * init.rho0()));
    let mut prob = Problem {
        domain,
        material,
        t,
        observed,
        opts,
        center: init.center(),
        base_shape: init.clone(),
        base_mesh,
        width,
    };
    let mut q = prob.params(&init)?;
    let (mut r, mut gap) = prob.residual(&q)?;
    let mut f = r.norm_squared();
    let mut history = vec![f];
    let h = opts.fd_step * domain.r0;
    let tol = opts.step_tol * domain.r0;
    let mut mu = 1e-3;
    let mut iterations = 0;
    let mut converged = f == 0.0;
    while !converged && iterations < opts.max_iter {
        let cols: Vec<Result<DVector<f64>>> = (0..q.len())
            .into_par_iter()
            .map(|j| {
                let mut qj = q.clone();
                qj[j] += h;
                prob.residual(&qj).map(|(rj, _)| (rj - &r) / h)
            })
            .collect();
        let mut jac = DMatrix::zeros(r.len(), q.len());
        for (j, c) in cols.into_iter().enumerate() {
            jac.set_column(j, &c?);
        }
        let a = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let scale = a.diagonal().max().max(f64::MIN_POSITIVE);
        let mut accepted = false;
        for _ in 0..12 {
            let mut m = a.clone();
            for i in 0..q.len() {
                m[(i, i)] += mu * (a[(i, i)] + 1e-12 * scale);
            }
            let step = match m.clone().cholesky() {
                Some(c) => c.solve(&(-&g)),
                None => m.svd(true, true).solve(&(-&g), 1e-14).map_err(|e| Error::Inverse(e.to_string()))?,
            };
            if step.norm() < tol {
                converged = true;
                break;
            }
            let trial: Vec<f64> = q.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            match prob.residual(&trial) {
                Ok((rt, gt)) if rt.norm_squared() < f => {
                    q = trial;
                    r = rt;
                    gap = gt;
                    f = r.norm_squared();
                    history.push(f);
                    mu = (mu / 3.0).max(1e-9);
                    accepted = true;
                    debug!("iteration {}: objective {f:.6e}, step {:.3e}", iterations + 1, step.norm());
                    break;
                }
                Ok(_) => mu *= 4.0,
                Err(e) => {
                    debug!("trial rejected: {e}");
                    mu *= 4.0;
                }
            }
        }
        if !accepted {
            if !converged {
                warn!("damping exhausted after {iterations} iterations");
            }
            break;
        }
        iterations += 1;
        // Remesh when the iterate has drifted far from the morphing base.
        let shape = prob.shape(&q)?;
        let drift = (0..64)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / 64.0;
                (shape.eval(th) - prob.base_shape.eval(th)).norm()
            })
            .fold(0.0, f64::max);
        if drift > 0.25 * width {
            let dom = domain.with_cavity(opts.cavity, shape.clone())?;
            prob.base_mesh = generate_mesh_with(&dom, &opts.mesh)?;
            prob.base_shape = shape;
            let (rr, gg) = prob.residual(&q)?;
            r = rr;
            gap = gg;
            f = r.norm_squared();
        }
    }
    if !converged && iterations >= opts.max_iter {
        warn!("reconstruction stopped after {iterations} iterations without converging");
    }
    info!("reconstruction: {iterations} iterations, gap {gap:.6e}");
    Ok(ReconstructionResult {
        recovered: prob.shape(&q)?,
        misfit_history: history,
        reg_weight: opts.reg_weight,
        iterations,
        converged,
        data_misfit: gap,
    })
}

/// Runs [`reconstruct`] for decreasing regularization weights and returns
/// the first result whose data misfit is at most `tau·delta` (discrepancy
/// principle), or the last one.
pub fn reconstruct_discrepancy(
    domain: &DomainSpec,
    material: &PlateMaterial,
    t: &TractionSpec,
    observed: &ObservedData,
    init: &StarShape,
    opts: &ReconstructOptions,
    delta: f64,
    tau: f64,
    weights: &[f64],
) -> Result<ReconstructionResult> {
    let mut ws = weights.to_vec();
    ws.sort_by(|a, b| b.total_cmp(a));
    let mut last = None;
    for w in ws {
        let o = ReconstructOptions {
            reg_weight: w,
            ..opts.clone()
        };
        let res = reconstruct(domain, material, t, observed, init, &o)?;
        info!("regularization {w:.3e}: data misfit {:.6e} (target {:.6e})", res.data_misfit, tau * delta);
        if res.data_misfit <= tau * delta {
            return Ok(res);
        }
        last = Some(res);
    }
    last.ok_or_else(|| Error::InvalidArgument("no regularization weights given".into()))
}

/// Default Σ sample count for observations.
pub const OBSERVED_SAMPLES: usize = SIGMA_SAMPLES;
