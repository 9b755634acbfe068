//! Assembly of the stiffness matrix and solution of the Neumann problem with
//! the three rigid-motion constraints enforced by Lagrange multipliers.

use std::sync::{Arc, OnceLock};

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;
use faer::Mat;
use log::{debug, warn};
use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::fields::DisplacementField;
use super::space::{bary_point, ElementOrder, FeSpace};
use super::traction::{check_load_equilibrium, equilibrium_of, EquilibriumReport, TractionSpec};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::material::PlateMaterial;
use crate::mesh::{Mesh, QuadratureRule};

/// Linear solver used for the constrained system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    /// Sparse Cholesky of the stiffness with the rigid kernel pinned, the
    /// multipliers in closed form and the constraints restored exactly.
    Direct,
    /// Jacobi-preconditioned conjugate gradients on the consistent singular
    /// system, followed by rigid normalization.
    Iterative,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub order: ElementOrder,
    pub method: SolveMethod,
    /// Relative residual target of the iterative solver.
    pub tol: f64,
    pub max_iter: usize,
    /// Remove the rigid part of an unbalanced load on Σ instead of failing.
    pub project_load: bool,
    /// Relative rigid residual accepted as balanced.
    pub equilibrium_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            order: ElementOrder::Linear,
            method: SolveMethod::Direct,
            tol: 1e-10,
            max_iter: 20_000,
            project_load: true,
            equilibrium_tol: 1e-8,
        }
    }
}

impl SolverOptions {
    pub fn with_order(mut self, order: ElementOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_method(mut self, method: SolveMethod) -> Self {
        self.method = method;
        self
    }
}

/// Solution of the constrained Neumann problem.
#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub displacement: DisplacementField,
    /// Multipliers of `∫a1`, `∫a2`, `∫(a2,1 − a1,2)`.
    pub multipliers: [f64; 3],
    /// `‖Ka + Bᵀm − f‖ / ‖f‖`.
    pub residual: f64,
    /// `|Ba|` relative to the displacement scale.
    pub constraint_residual: f64,
    /// `∫ℂ∇a·∇a`.
    pub energy: f64,
    /// `∫N̂·a`.
    pub work: f64,
    pub equilibrium: EquilibriumReport,
    /// Load vector actually solved for.
    pub load: Vec<f64>,
}

impl SaddleSolution {
    pub fn space(&self) -> &Arc<FeSpace> {
        self.displacement.space()
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.displacement.space().mesh()
    }

    /// `|energy − work| / max(energy, work)`.
    pub fn energy_defect(&self) -> f64 {
        let s = self.energy.abs().max(self.work.abs());
        if s == 0.0 {
            0.0
        } else {
            (self.energy - self.work).abs() / s
        }
    }
}

/// Symmetric stiffness in compressed row form.
#[derive(Clone, Debug)]
pub struct Stiffness {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Stiffness {
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        });
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.cols[k] == i)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.mul(x, &mut y);
        dot(x, &y)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn stiffness_rule(space: &FeSpace, material: &PlateMaterial) -> QuadratureRule {
    let p = space.order().degree();
    let extra = if material.is_homogeneous() { 0 } else { 2 };
    QuadratureRule::for_degree(2 * (p - 1) + extra)
}

fn element_stiffness(space: &FeSpace, material: &PlateMaterial, rule: &QuadratureRule, t: usize) -> ([usize; 6], usize, [[f64; 12]; 12]) {
    let (dofs, n) = space.element_dofs(t);
    let g = space.geometry(t);
    let pts = space.mesh().triangle_points(t);
    let mut k = [[0.0; 12]; 12];
    for (l, w) in rule.points.iter().zip(&rule.weights) {
        let m = material.moduli_at(bary_point(pts, *l));
        let c = m.e * m.h / (1.0 - m.nu * m.nu);
        let s = 0.5 * (1.0 - m.nu);
        let wk = w * 2.0 * g.area * c;
        let d = space.shape_grad(&g, *l);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (d[i], d[j]);
                k[2 * i][2 * j] += wk * (a.x1 * b.x1 + s * a.x2 * b.x2);
                k[2 * i][2 * j + 1] += wk * (m.nu * a.x1 * b.x2 + s * a.x2 * b.x1);
                k[2 * i + 1][2 * j] += wk * (m.nu * a.x2 * b.x1 + s * a.x1 * b.x2);
                k[2 * i + 1][2 * j + 1] += wk * (a.x2 * b.x2 + s * a.x1 * b.x1);
            }
        }
    }
    (dofs, n, k)
}

/// Global stiffness `∫ℂ∇̂φ_i·∇̂φ_j`.
pub fn assemble_stiffness(space: &FeSpace, material: &PlateMaterial) -> Stiffness {
    let rule = stiffness_rule(space, material);
    let nt = space.mesh().num_triangles();
    let locals: Vec<_> = (0..nt)
        .into_par_iter()
        .map(|t| element_stiffness(space, material, &rule, t))
        .collect();
    let n = 2 * space.num_dofs();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (dofs, m, k) in &locals {
        for i in 0..2 * m {
            let gi = 2 * dofs[i / 2] + i % 2;
            for j in 0..2 * m {
                rows[gi].push((2 * dofs[j / 2] + j % 2, k[i][j]));
            }
        }
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for mut r in rows {
        // Stable sort keeps the element order of duplicate contributions.
        r.sort_by_key(|e| e.0);
        let mut last = usize::MAX;
        for (c, v) in r {
            if c == last {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                last = c;
            }
        }
        row_ptr.push(cols.len());
    }
    Stiffness { n, row_ptr, cols, vals }
}

/// Rows of `∫a1`, `∫a2`, `∫(a2,1 − a1,2)` as dense vectors.
pub fn constraint_rows(space: &FeSpace) -> [Vec<f64>; 3] {
    let n = 2 * space.num_dofs();
    let mut b = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let rule = QuadratureRule::for_degree(2 * space.order().degree());
    let mesh = space.mesh();
    for t in 0..mesh.num_triangles() {
        let (dofs, m) = space.element_dofs(t);
        let g = space.geometry(t);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let wt = w * 2.0 * g.area;
            let phi = space.shape(*l);
            let d = space.shape_grad(&g, *l);
            for k in 0..m {
                let i = dofs[k];
                b[0][2 * i] += wt * phi[k];
                b[1][2 * i + 1] += wt * phi[k];
                b[2][2 * i + 1] += wt * d[k].x1;
                b[2][2 * i] -= wt * d[k].x2;
            }
        }
    }
    b
}

/// Rigid basis `e1`, `e2`, `(−x2, x1)` at the dofs.
pub fn rigid_basis(space: &FeSpace) -> [Vec<f64>; 3] {
    let pts = space.dof_points();
    let n = 2 * pts.len();
    let mut r = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, p) in pts.iter().enumerate() {
        r[0][2 * i] = 1.0;
        r[1][2 * i + 1] = 1.0;
        r[2][2 * i] = -p.x2;
        r[2][2 * i + 1] = p.x1;
    }
    r
}

/// Assembled operator pieces shared by repeated solves on one space.
pub struct System {
    pub space: Arc<FeSpace>,
    pub stiffness: Stiffness,
    pub constraints: [Vec<f64>; 3],
    rigid: [Vec<f64>; 3],
    /// `(B R)^{-1}`.
    br_inv: Matrix3<f64>,
    factor: OnceLock<std::result::Result<Llt<usize, f64>, String>>,
}

impl System {
    pub fn new(space: Arc<FeSpace>, material: &PlateMaterial) -> Result<Self> {
        let stiffness = assemble_stiffness(&space, material);
        let constraints = constraint_rows(&space);
        let rigid = rigid_basis(&space);
        let br = Matrix3::from_fn(|i, j| dot(&constraints[i], &rigid[j]));
        let br_inv = br
            .try_inverse()
            .ok_or_else(|| Error::Solver("rigid constraints are rank deficient".into()))?;
        Ok(Self {
            space,
            stiffness,
            constraints,
            rigid,
            br_inv,
            factor: OnceLock::new(),
        })
    }

    /// `m = (BR)^{-T} Rᵀ f`.
    pub fn multipliers(&self, f: &[f64]) -> [f64; 3] {
        let rf = Vector3::from_fn(|i, _| dot(&self.rigid[i], f));
        let m = self.br_inv.transpose() * rf;
        [m[0], m[1], m[2]]
    }

    /// Subtracts the rigid motion `R (BR)^{-1} B a`.
    pub fn normalize(&self, a: &mut [f64]) {
        let ba = Vector3::from_fn(|i, _| dot(&self.constraints[i], a));
        let c = self.br_inv * ba;
        for k in 0..3 {
            for (x, r) in a.iter_mut().zip(&self.rigid[k]) {
                *x -= c[k] * r;
            }
        }
    }

    fn residual(&self, a: &[f64], m: &[f64; 3], f: &[f64]) -> f64 {
        let mut r = vec![0.0; a.len()];
        self.stiffness.mul(a, &mut r);
        for k in 0..3 {
            for (ri, b) in r.iter_mut().zip(&self.constraints[k]) {
                *ri += m[k] * b;
            }
        }
        let num: f64 = r.iter().zip(f).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        num / dot(f, f).sqrt().max(f64::MIN_POSITIVE)
    }

    /// Solves `Ka + Bᵀm = f`, `Ba = 0`.
    pub fn solve(&self, f: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, [f64; 3], f64)> {
        let n = self.stiffness.n;
        if f.len() != n {
            return Err(Error::InvalidArgument(format!("load has length {}, expected {n}", f.len())));
        }
        if f.iter().all(|v| *v == 0.0) {
            return Ok((vec![0.0; n], [0.0; 3], 0.0));
        }
        let (a, m) = match opts.method {
            SolveMethod::Direct => self.solve_direct(f)?,
            SolveMethod::Iterative => self.solve_cg(f, opts)?,
        };
        let res = self.residual(&a, &m, f);
        debug!("saddle solve: {n} unknowns, relative residual {res:.3e}");
        Ok((a, m, res))
    }

    /// `f − Bᵀm`, orthogonal to the rigid motions.
    fn consistent(&self, f: &[f64], m: &[f64; 3]) -> Vec<f64> {
        let mut b = f.to_vec();
        for k in 0..3 {
            for (bi, c) in b.iter_mut().zip(&self.constraints[k]) {
                *bi -= m[k] * c;
            }
        }
        b
    }

    /// Three dofs whose values determine a rigid motion: both components at
    /// the leftmost node and the second component at the rightmost one.
    fn pinned(&self) -> [usize; 3] {
        let nodes = &self.space.mesh().nodes;
        let by_x = |a: &usize, b: &usize| nodes[*a].x1.total_cmp(&nodes[*b].x1).then(a.cmp(b));
        let lo = (0..nodes.len()).min_by(by_x).expect("mesh has nodes");
        let hi = (0..nodes.len()).max_by(by_x).expect("mesh has nodes");
        [2 * lo, 2 * lo + 1, 2 * hi + 1]
    }

    fn factor(&self) -> Result<&Llt<usize, f64>> {
        self.factor
            .get_or_init(|| {
                faer::set_global_parallelism(faer::Par::Seq);
                let st = &self.stiffness;
                let pinned = self.pinned();
                let mut trip = Vec::with_capacity(st.vals.len() / 2 + st.n);
                for i in 0..st.n {
                    if pinned.contains(&i) {
                        trip.push(Triplet::new(i, i, 1.0));
                        continue;
                    }
                    for k in st.row_ptr[i]..st.row_ptr[i + 1] {
                        let j = st.cols[k];
                        if j <= i && !pinned.contains(&j) {
                            trip.push(Triplet::new(i, j, st.vals[k]));
                        }
                    }
                }
                let mat = SparseColMat::<usize, f64>::try_new_from_triplets(st.n, st.n, &trip)
                    .map_err(|e| format!("matrix assembly failed: {e:?}"))?;
                mat.sp_cholesky(Side::Lower)
                    .map_err(|e| format!("sparse Cholesky failed: {e:?}"))
            })
            .as_ref()
            .map_err(|e| Error::Solver(e.clone()))
    }

    /// Factorizes `K` with the rigid kernel removed by three pinned dofs,
    /// solves the consistent system and restores the constraints `Ba = 0`.
    fn solve_direct(&self, f: &[f64]) -> Result<(Vec<f64>, [f64; 3])> {
        let n = self.stiffness.n;
        let m = self.multipliers(f);
        let b = self.consistent(f, &m);
        let llt = self.factor()?;
        let pinned = self.pinned();
        let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| if pinned.contains(&i) { 0.0 } else { b[i] });
        llt.solve_in_place(rhs.as_mut());
        let mut x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("stiffness factorization is singular".into()));
        }
        self.normalize(&mut x);
        Ok((x, m))
    }

    fn solve_cg(&self, f: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, [f64; 3])> {
        let st = &self.stiffness;
        let n = st.n;
        let m = self.multipliers(f);
        let b = self.consistent(f, &m);
        let inv_d: Vec<f64> = st.diag().into_iter().map(|d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
        let bnorm = dot(&b, &b).sqrt();
        let mut x = vec![0.0; n];
        let mut r = b.clone();
        let mut z: Vec<f64> = r.iter().zip(&inv_d).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut q = vec![0.0; n];
        let mut rel = 1.0;
        for it in 0..opts.max_iter {
            rel = dot(&r, &r).sqrt() / bnorm;
            if rel <= opts.tol {
                debug!("cg converged in {it} iterations");
                self.normalize(&mut x);
                return Ok((x, m));
            }
            st.mul(&p, &mut q);
            let alpha = rz / dot(&p, &q);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            for i in 0..n {
                z[i] = r[i] * inv_d[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::Solver(format!(
            "conjugate gradients did not converge in {} iterations (relative residual {rel:.3e})",
            opts.max_iter
        )))
    }
}

/// Forward solve on a given finite element space.
pub fn solve_on_space(
    space: Arc<FeSpace>,
    domain: &DomainSpec,
    material: &PlateMaterial,
    t: &TractionSpec,
    opts: &SolverOptions,
) -> Result<SaddleSolution> {
    let (f, equilibrium) = balanced_load(&space, domain, t, opts)?;
    let system = System::new(space.clone(), material)?;
    solve_system(&system, f, equilibrium, opts)
}

/// Load vector after the equilibrium check and, if enabled, projection.
pub fn balanced_load(
    space: &FeSpace,
    domain: &DomainSpec,
    t: &TractionSpec,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, EquilibriumReport)> {
    let f = t.assemble(space, domain)?;
    let raw = equilibrium_of(space, &f, None);
    if raw.is_balanced(opts.equilibrium_tol) {
        return Ok((f, raw));
    }
    if !opts.project_load {
        return Err(Error::Load(format!(
            "load is not self-equilibrated: force ({:.3e}, {:.3e}), moment {:.3e}",
            raw.force[0], raw.force[1], raw.moment
        )));
    }
    let (f, rep) = check_load_equilibrium(t, space, domain, true)?;
    warn!(
        "load projected onto the equilibrated subspace (correction {:.3e})",
        rep.correction.unwrap_or(0.0)
    );
    Ok((f, rep))
}

/// Solves for a prepared load vector.
pub fn solve_system(
    system: &System,
    f: Vec<f64>,
    equilibrium: EquilibriumReport,
    opts: &SolverOptions,
) -> Result<SaddleSolution> {
    let (a, m, residual) = system.solve(&f, opts)?;
    let energy = system.stiffness.quadratic_form(&a);
    let work = dot(&f, &a);
    let amax = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let area = system.space.mesh().total_area();
    let constraint_residual = system
        .constraints
        .iter()
        .map(|b| dot(b, &a).abs())
        .fold(0.0, f64::max)
        / (amax * area);
    let sol = SaddleSolution {
        displacement: DisplacementField::new(system.space.clone(), a)?,
        multipliers: m,
        residual,
        constraint_residual,
        energy,
        work,
        equilibrium,
        load: f,
    };
    if sol.energy_defect() > 1e-8 {
        return Err(Error::Solver(format!(
            "energy identity violated: energy {:.6e}, work {:.6e}",
            sol.energy, sol.work
        )));
    }
    Ok(sol)
}

/// Forward solve of the traction problem on `mesh`.
pub fn solve_forward(
    mesh: Arc<Mesh>,
    domain: &DomainSpec,
    material: &PlateMaterial,
    t: &TractionSpec,
    opts: &SolverOptions,
) -> Result<SaddleSolution> {
    let space = Arc::new(FeSpace::new(mesh, opts.order));
    solve_on_space(space, domain, material, t, opts)
}
